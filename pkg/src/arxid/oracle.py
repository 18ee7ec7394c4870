"""Independent numerical verification of the variational claims.

Two cross-checks, deliberately kept apart from the estimation path:

* quadrature_cost integrates the frequency-domain cost J = J_r + J_e on a
  uniform grid, so a time-domain least-squares cost can be validated via
  Parseval.
* verify_proposition1 minimizes the quadrature approximation of
  (1/2pi) int |X|^2 |Z|^2 d omega over monic polynomials X of fixed degree
  by brute force (the cost is an exact quadratic, solved through its normal
  equations), and should converge to minimizer Z^-1 with minimum 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PoleOnGrid, UnstableExpansion, UnstableZ
from .ltisys import RationalTF, SystemSpec, closed_loop_char_poly
from .polyq import Poly, poly_add, poly_mul, roots

DEFAULT_QUAD_POINTS = 4096
_POLE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class CostDecomposition:
    """Reference and noise contributions to the asymptotic quadratic cost."""

    J_r: float
    J_e: float
    J_total: float
    quadrature_points: int


def power_series(tf: RationalTF, m: int) -> Poly:
    """First m+1 impulse-response coefficients of tf by long division.

    The denominator must have all roots strictly inside the unit circle for
    the series to converge; otherwise UnstableExpansion is raised.
    """
    if m < 0:
        raise ValueError("m must be nonnegative")
    if tf.den.degree > 0:
        rs = roots(tf.den)
        if rs.antistable.size or rs.on_circle.size:
            raise UnstableExpansion("denominator has roots on or outside the unit circle")
    num, den = tf.num.coeffs, tf.den.coeffs
    g = np.zeros(m + 1)
    for i in range(m + 1):
        acc = num[i] if i < len(num) else 0.0
        for k in range(1, min(i, len(den) - 1) + 1):
            acc -= den[k] * g[i - k]
        g[i] = acc  # den[0] == 1 by RationalTF normalization
    return Poly(g)


def _half_grid(points: int) -> tuple[np.ndarray, np.ndarray]:
    """Frequencies in [0, pi] and weights reproducing the uniform M-point
    grid mean over [-pi, pi) for integrands even in omega."""
    if points < 16 or points % 2:
        raise ValueError("quadrature points must be even and at least 16")
    half = points // 2
    om = np.pi * np.arange(half + 1) / half
    w = np.full(half + 1, 2.0)
    w[0] = w[-1] = 1.0
    return om, w / points


def _eval_poly(p: Poly, om: np.ndarray) -> np.ndarray:
    return p.at_freq(om)


def _check_no_pole(name: str, values: np.ndarray, scale: float) -> None:
    if np.any(np.abs(values) < _POLE_TOL * max(1.0, scale)):
        raise PoleOnGrid(f"{name} vanishes on the quadrature grid")


def quadrature_cost(
    A: Poly, B: Poly, spec: SystemSpec, M: int = DEFAULT_QUAD_POINTS
) -> CostDecomposition:
    """Trapezoidal approximation of the frequency-domain cost

        J_r = (1/2pi) int |A G - B|^2 |S|^2 Phi_r d omega
        J_e = (1/2pi) int |A + K B|^2 |H S|^2 lambda_e d omega

    over [-pi, pi] with M uniform points, exploiting conjugate symmetry.
    The reference spectrum is the constant Phi_r = lambda_r (white
    reference).  Both integrands are evaluated in structurally reduced form,

        (A G - B) S   = (A L - B Gamma F) den(K) / den_cl
        (A + K B) H S = (A den(K) + num(K) B) C F / (D den_cl)

    so the only denominators are the stable den_cl and D.
    """
    om, w = _half_grid(M)
    den_cl = closed_loop_char_poly(spec)
    gamma_f = poly_mul(spec.Gamma, spec.F)

    den_cl_v = _eval_poly(den_cl, om)
    _check_no_pole("closed-loop denominator", den_cl_v, float(np.sum(np.abs(den_cl.coeffs))))
    d_v = _eval_poly(spec.D, om)
    _check_no_pole("D", d_v, float(np.sum(np.abs(spec.D.coeffs))))

    num_r = poly_mul(
        poly_add(poly_mul(A, spec.L), poly_mul(B, gamma_f).scaled(-1.0)),
        spec.K.den,
    )
    j_r = spec.lambda_r * float(np.sum(w * np.abs(_eval_poly(num_r, om) / den_cl_v) ** 2))

    num_e = poly_mul(
        poly_add(poly_mul(A, spec.K.den), poly_mul(spec.K.num, B)),
        poly_mul(spec.C, spec.F),
    )
    j_e = spec.lambda_e * float(np.sum(w * np.abs(_eval_poly(num_e, om) / (d_v * den_cl_v)) ** 2))

    return CostDecomposition(J_r=j_r, J_e=j_e, J_total=j_r + j_e, quadrature_points=M)


def _require_stable_roots(p: Poly, what: str) -> None:
    if p.degree == 0:
        return
    rs = roots(p)
    if rs.antistable.size or rs.on_circle.size:
        raise UnstableZ(f"{what} has roots on or outside the unit circle")


def verify_proposition1(
    Z: RationalTF, m: int, M: int = DEFAULT_QUAD_POINTS
) -> tuple[Poly, float]:
    """Brute-force minimizer of (1/M) sum_j |X(e^{i om_j})|^2 |Z(e^{i om_j})|^2
    over monic X of degree m.

    The cost is an exact quadratic in the free coefficients of X, so the
    minimizer is obtained from the normal equations built out of quadrature
    inner products.  Returns (X_min, J_min).  For admissible Z (stable,
    inversely stable, Z at infinity equal to 1) J_min decreases to 1 and
    X_min converges to the power series of Z^-1 as m grows.
    """
    if m < 0:
        raise ValueError("m must be nonnegative")
    if Z.num.coeffs[0] != 1.0 or Z.den.coeffs[0] != 1.0:
        raise ValueError("Z must satisfy Z(infinity) = 1 (monic numerator and denominator)")
    _require_stable_roots(Z.den, "Z denominator")
    _require_stable_roots(Z.num, "Z numerator")

    om, w = _half_grid(M)
    weight = w * np.abs(Z.at_freq(om)) ** 2
    if m == 0:
        return Poly([1.0]), float(np.sum(weight))
    k = np.arange(1, m + 1)
    cos_b = np.cos(np.outer(om, k))  # (grid, m)
    sin_b = np.sin(np.outer(om, k))
    q_mat = cos_b.T @ (weight[:, None] * cos_b) + sin_b.T @ (weight[:, None] * sin_b)
    b_vec = cos_b.T @ weight
    x = np.linalg.solve(q_mat, -b_vec)
    j_min = float(np.sum(weight) + b_vec @ x)
    return Poly(np.concatenate(([1.0], x))), j_min
