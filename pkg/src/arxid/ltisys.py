"""Rational transfer functions, the structured true system, and the
closed-loop algebra used for simulation and frequency analysis.

The true system is
    y_t = G(q) u_t + H(q) e_t,   G = L / (Gamma F),   H = C / (Gamma D),
operated under feedback u_t = r_t - K(q) y_t, which gives the four
closed-loop paths y = GS r + HS e and u = S r - KHS e with sensitivity
S = 1 / (1 + K G).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AlgebraicLoop, PoleOnGrid, RootOnUnitCircle
from .polyq import EPS_CLUSTER, Poly, poly_add, poly_mul, roots

_POLE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class RationalTF:
    """Ratio of two q^-1 polynomials with a monic denominator.

    The denominator is normalized monic on construction (its constant
    coefficient is folded into the numerator), which guarantees the ratio
    is expandable as a power series in q^-1.  No common factors are ever
    cancelled automatically.
    """

    num: Poly
    den: Poly

    def __post_init__(self):
        num, den = Poly(self.num.coeffs), Poly(self.den.coeffs)
        if den.is_zero:
            raise ValueError("denominator must not be the zero polynomial")
        c0 = den.coeffs[0]
        if c0 == 0.0:
            raise ValueError("denominator must have a nonzero constant term")
        if c0 != 1.0:
            num, den = num.scaled(1.0 / c0), den.scaled(1.0 / c0)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @classmethod
    def constant(cls, value: float) -> "RationalTF":
        return cls(Poly([float(value)]), Poly([1.0]))

    @classmethod
    def from_coeffs(cls, num, den) -> "RationalTF":
        return cls(Poly(num), Poly(den))

    def __mul__(self, other: "RationalTF") -> "RationalTF":
        return RationalTF(poly_mul(self.num, other.num), poly_mul(self.den, other.den))

    def at_freq(self, omega):
        den_val = self.den.at_freq(omega)
        tol = _POLE_TOL * max(1.0, float(np.sum(np.abs(self.den.coeffs))))
        if np.any(np.abs(den_val) < tol):
            where = np.atleast_1d(np.asarray(omega, dtype=float))
            bad = where[np.atleast_1d(np.abs(den_val) < tol)]
            raise PoleOnGrid(f"denominator vanishes at omega={bad[0]}")
        return self.num.at_freq(omega) / den_val

    def to_json(self) -> dict:
        return {"num": self.num.to_list(), "den": self.den.to_list()}

    def __str__(self) -> str:
        return f"({self.num}) / ({self.den})"


@dataclass(frozen=True, eq=False)
class FreqGrid:
    """Strictly increasing radian frequencies in (0, pi], with optional
    named response samples attached."""

    omegas: np.ndarray
    values: dict | None = None

    def __post_init__(self):
        om = np.asarray(self.omegas, dtype=float)
        if om.ndim != 1 or om.size == 0:
            raise ValueError("omegas must be a non-empty 1-d array")
        if om[0] <= 0.0 or om[-1] > np.pi + 1e-12 or np.any(np.diff(om) <= 0):
            raise ValueError("omegas must be strictly increasing within (0, pi]")
        om = om.copy()
        om.setflags(write=False)
        object.__setattr__(self, "omegas", om)

    @classmethod
    def log_spaced(cls, omega_min: float, omega_max: float, points: int) -> "FreqGrid":
        return cls(np.logspace(np.log10(omega_min), np.log10(omega_max), points))


@dataclass(frozen=True, eq=False)
class SystemSpec:
    """The true data-generating system plus its feedback regulator.

    L, Gamma, F, C, D are the structural polynomials (Gamma, F, C, D monic;
    L with zero constant term), K the regulator, lambda_e the innovation
    variance and lambda_r the variance of the white external reference.
    """

    L: Poly
    Gamma: Poly
    F: Poly
    C: Poly
    D: Poly
    K: RationalTF
    lambda_e: float
    lambda_r: float

    def __post_init__(self):
        for name in ("Gamma", "F", "C", "D"):
            if not getattr(self, name).is_monic:
                raise ValueError(f"{name} must be monic")
        if not self.L.is_zero and self.L.coeffs[0] != 0.0:
            raise ValueError("L must have a zero constant term (at least one delay)")
        if self.lambda_e < 0 or self.lambda_r < 0:
            raise ValueError("variances must be nonnegative")
        for name in ("C", "D"):
            p = getattr(self, name)
            if p.degree > 0:
                rs = roots(p)
                if rs.antistable.size or rs.on_circle.size:
                    raise ValueError(f"{name} must be stable")
        f_roots = roots(self.F)
        on = f_roots.on_circle
        if on.size:
            raise RootOnUnitCircle(on[0], "F must not have roots on the unit circle")
        if self.D.degree > 0 and self.F.degree > 0:
            d_roots = roots(self.D).expanded()
            for p in f_roots.expanded():
                if np.min(np.abs(d_roots - p)) <= EPS_CLUSTER:
                    raise ValueError("F and D must be coprime")

    @property
    def orders(self) -> dict:
        return {
            "m_l": self.L.degree,
            "m_gamma": self.Gamma.degree,
            "m_f": self.F.degree,
            "m_c": self.C.degree,
            "m_d": self.D.degree,
        }

    def to_json(self) -> dict:
        return {
            "L": self.L.to_list(),
            "Gamma": self.Gamma.to_list(),
            "F": self.F.to_list(),
            "C": self.C.to_list(),
            "D": self.D.to_list(),
            "K_num": self.K.num.to_list(),
            "K_den": self.K.den.to_list(),
            "lambda_e": self.lambda_e,
            "lambda_r": self.lambda_r,
        }

    @classmethod
    def from_json(cls, data: dict) -> "SystemSpec":
        return cls(
            L=Poly(data["L"]),
            Gamma=Poly(data["Gamma"]),
            F=Poly(data["F"]),
            C=Poly(data["C"]),
            D=Poly(data["D"]),
            K=RationalTF.from_coeffs(data["K_num"], data["K_den"]),
            lambda_e=float(data["lambda_e"]),
            lambda_r=float(data["lambda_r"]),
        )


def make_G(spec: SystemSpec) -> RationalTF:
    """Plant G = L / (Gamma F), denominators expanded, nothing cancelled."""
    return RationalTF(spec.L, poly_mul(spec.Gamma, spec.F))


def make_H(spec: SystemSpec) -> RationalTF:
    """Noise model H = C / (Gamma D)."""
    return RationalTF(spec.C, poly_mul(spec.Gamma, spec.D))


def sensitivity(G: RationalTF, K: RationalTF) -> RationalTF:
    """S = 1 / (1 + K G) as a rational function.

    The returned denominator is den(G) den(K) + num(K) num(G), normalized
    monic with the normalization constant folded into the numerator.
    """
    den = poly_add(poly_mul(G.den, K.den), poly_mul(K.num, G.num))
    scale = max(1.0, float(np.max(np.abs(den.coeffs))))
    if abs(den.coeffs[0]) < _POLE_TOL * scale:
        raise AlgebraicLoop("1 + K G has zero constant term")
    return RationalTF(poly_mul(G.den, K.den), den)


def is_stable(tf: RationalTF) -> bool:
    """True iff every denominator root is strictly inside the unit circle.

    A root inside the tolerance band is neither stable nor anti-stable and
    raises RootOnUnitCircle.
    """
    if tf.den.degree == 0:
        return True
    rs = roots(tf.den)
    on = rs.on_circle
    if on.size:
        raise RootOnUnitCircle(on[0])
    return rs.antistable.size == 0


def freq_response(tf: RationalTF, grid: FreqGrid) -> np.ndarray:
    """Exact rational evaluation at z = e^{i omega} over the grid."""
    return tf.at_freq(grid.omegas)


def closed_loop_char_poly(spec: SystemSpec) -> Poly:
    """Closed-loop characteristic polynomial den(K) Gamma F + num(K) L."""
    return poly_add(
        poly_mul(spec.K.den, poly_mul(spec.Gamma, spec.F)),
        poly_mul(spec.K.num, spec.L),
    )


def closed_loop_paths(spec: SystemSpec) -> dict[str, RationalTF]:
    """The four closed-loop transfer functions GS, HS, S, KHS.

    Each path is reduced symbolically from the system structure (the Gamma F
    and den(K) factors shared between numerator and denominator are removed
    algebraically, not by numerical cancellation), so the returned filters
    are internally stable whenever K stabilizes the loop:

        GS  = L den(K) / den_cl
        S   = Gamma F den(K) / den_cl
        HS  = C F den(K) / (D den_cl)
        KHS = num(K) C F / (D den_cl)

    with den_cl = den(K) Gamma F + num(K) L.
    """
    den_cl = closed_loop_char_poly(spec)
    scale = max(1.0, float(np.max(np.abs(den_cl.coeffs))))
    if abs(den_cl.coeffs[0]) < _POLE_TOL * scale:
        raise AlgebraicLoop("closed-loop denominator has zero constant term")
    den_noise = poly_mul(spec.D, den_cl)
    return {
        "GS": RationalTF(poly_mul(spec.L, spec.K.den), den_cl),
        "S": RationalTF(poly_mul(poly_mul(spec.Gamma, spec.F), spec.K.den), den_cl),
        "HS": RationalTF(poly_mul(poly_mul(spec.C, spec.F), spec.K.den), den_noise),
        "KHS": RationalTF(poly_mul(poly_mul(spec.K.num, spec.C), spec.F), den_noise),
    }
