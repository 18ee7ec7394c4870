"""Real-coefficient polynomials in the delay operator q^-1.

A polynomial c_0 + c_1 q^-1 + ... + c_n q^-n is stored as the ascending
coefficient array [c_0, ..., c_n].  Its roots are defined in the z variable,
i.e. the zeros of z^n p(z^-1), so a monic p factors as prod_k (1 - p_k q^-1).
Roots are classified against the unit circle with a tolerance band; roots
inside the band are ambiguous and raise rather than being silently assigned.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NotAntiStable, RootOnUnitCircle, ZeroPolynomial

# Classification and reconstruction tolerances.
EPS_UC = 1e-6        # half-width of the unit-circle ambiguity band
EPS_CONJ = 1e-8      # conjugate pairing / imaginary-residue truncation
EPS_RECON = 1e-6     # relative tolerance for re-expansion checks
EPS_CLUSTER = 1e-6   # eigenvalue clustering radius for multiplicities

STABLE = "stable"
ANTISTABLE = "antistable"
ON_CIRCLE = "oncircle"


def classify_root(p: complex) -> str:
    """Classify a z-plane root against the unit circle."""
    m = abs(p)
    if m < 1.0 - EPS_UC:
        return STABLE
    if m > 1.0 + EPS_UC:
        return ANTISTABLE
    return ON_CIRCLE


@dataclass(frozen=True, eq=False)
class Poly:
    """Polynomial in q^-1 with real coefficients, lowest order first.

    Trailing zero coefficients are trimmed on construction so the degree is
    well defined; the zero polynomial is represented as [0].  Leading zeros
    are kept (numerators such as B carry a structural zero constant term).
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs))
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coefficients must be a non-empty 1-d sequence")
        if np.iscomplexobj(c):
            scale = max(1.0, float(np.max(np.abs(c.real)))) if c.size else 1.0
            if np.max(np.abs(c.imag)) > EPS_CONJ * scale:
                raise ValueError("coefficients have a non-negligible imaginary part")
            c = c.real
        c = c.astype(float)
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        nz = np.nonzero(c)[0]
        c = c[: nz[-1] + 1] if nz.size else np.zeros(1)
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_roots(cls, roots) -> "Poly":
        """Monic polynomial prod_k (1 - p_k q^-1) over the given z-plane roots."""
        roots = np.asarray(list(roots), dtype=complex)
        return cls(np.poly(roots)) if roots.size else cls([1.0])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return self.degree == 0 and self.coeffs[0] == 0.0

    @property
    def is_monic(self) -> bool:
        return self.coeffs[0] == 1.0

    def at_freq(self, omega):
        """Evaluate at q = e^{i omega}, i.e. sum_k c_k e^{-i omega k}."""
        z = np.exp(-1j * np.asarray(omega, dtype=float))
        return np.polyval(self.coeffs[::-1], z)

    def scaled(self, factor: float) -> "Poly":
        return Poly(self.coeffs * factor)

    def to_list(self) -> list[float]:
        """Coefficients lowest order first, for JSON serialization."""
        return [float(c) for c in self.coeffs]

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for k, c in enumerate(self.coeffs):
            if c == 0.0:
                continue
            mag = f"{abs(c):g}"
            if k == 0:
                parts.append(f"-{mag}" if c < 0 else mag)
                continue
            sign = "-" if c < 0 else "+"
            term = f"q^-{k}" if abs(c) == 1.0 else f"{mag} q^-{k}"
            if not parts:
                parts.append(term if c > 0 else f"-{term}")
            else:
                parts.append(f"{sign} {term}")
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"Poly({self.to_list()})"


@dataclass(frozen=True, eq=False)
class RootSet:
    """Distinct z-plane roots with multiplicities and circle classifications."""

    roots: np.ndarray            # complex, one entry per cluster
    multiplicities: np.ndarray   # positive ints, aligned with roots
    labels: tuple = field(default=())

    def __post_init__(self):
        labels = tuple(classify_root(p) for p in self.roots)
        object.__setattr__(self, "labels", labels)
        _check_conjugate_closure(self.expanded())

    def expanded(self) -> np.ndarray:
        """All roots repeated by multiplicity."""
        if len(self.roots) == 0:
            return np.empty(0, dtype=complex)
        return np.repeat(self.roots, self.multiplicities)

    def select(self, label: str) -> np.ndarray:
        keep = [i for i, lab in enumerate(self.labels) if lab == label]
        if not keep:
            return np.empty(0, dtype=complex)
        return np.repeat(self.roots[keep], self.multiplicities[keep])

    @property
    def stable(self) -> np.ndarray:
        return self.select(STABLE)

    @property
    def antistable(self) -> np.ndarray:
        return self.select(ANTISTABLE)

    @property
    def on_circle(self) -> np.ndarray:
        return self.select(ON_CIRCLE)

    @property
    def count(self) -> int:
        return int(np.sum(self.multiplicities)) if len(self.roots) else 0


def _check_conjugate_closure(roots: np.ndarray) -> None:
    # Roots of a real polynomial must pair up under conjugation.
    pending = [p for p in roots if p.imag > EPS_CONJ]
    pool = [p for p in roots if p.imag < -EPS_CONJ]
    for p in pending:
        dist = [abs(q - p.conjugate()) for q in pool]
        if not dist or min(dist) > EPS_CONJ * max(1.0, abs(p)):
            raise ValueError(f"root set not closed under conjugation near {p}")
        pool.pop(int(np.argmin(dist)))


def _cluster(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Greedy clustering of near-coincident eigenvalues into multiplicities."""
    vals = values[np.lexsort((values.imag, values.real))]
    used = np.zeros(len(vals), dtype=bool)
    reps, mults = [], []
    for i in range(len(vals)):
        if used[i]:
            continue
        members = ~used & (np.abs(vals - vals[i]) <= EPS_CLUSTER)
        centroid = vals[members].mean()
        refined = ~used & (np.abs(vals - centroid) <= EPS_CLUSTER)
        refined[i] = True  # the seed always belongs to its own cluster
        used |= refined
        reps.append(vals[refined].mean())
        mults.append(int(refined.sum()))
    return np.asarray(reps, dtype=complex), np.asarray(mults, dtype=int)


def roots(p: Poly) -> RootSet:
    """Roots of z^n p(z^-1) via companion-matrix eigenvalues.

    Leading zero coefficients reduce the effective degree, so a polynomial
    with c_0 = 0 of degree n yields fewer than n roots.
    """
    if p.is_zero:
        raise ZeroPolynomial("the zero polynomial has no well-defined roots")
    if p.degree == 0:
        return RootSet(np.empty(0, dtype=complex), np.empty(0, dtype=int))
    rts = np.roots(p.coeffs)  # ascending q^-1 coeffs == descending z coeffs
    reps, mults = _cluster(rts)
    return RootSet(reps, mults)


def factor_stable_antistable(f: Poly) -> tuple[Poly, Poly]:
    """Split a monic polynomial into its stable and anti-stable factors.

    Returns (f_s, f_a), both monic with real coefficients, such that
    poly_mul(f_s, f_a) reproduces f.  Raises RootOnUnitCircle if any root
    falls inside the classification band.
    """
    if not f.is_monic:
        raise ValueError("factorization requires a monic polynomial")
    rs = roots(f)
    on = rs.on_circle
    if on.size:
        raise RootOnUnitCircle(on[0])
    return Poly.from_roots(rs.stable), Poly.from_roots(rs.antistable)


def _antistable_roots(f_a: Poly) -> np.ndarray:
    if not f_a.is_monic:
        raise ValueError("expected a monic polynomial")
    rs = roots(f_a)
    bad = [p for p, lab in zip(rs.roots, rs.labels) if lab != ANTISTABLE]
    if bad:
        raise NotAntiStable(f"root {bad[0]} is not anti-stable")
    return rs.expanded()


def mirror(f_a: Poly) -> Poly:
    """Reflect every root of an anti-stable monic polynomial inside the
    unit circle: prod_k (1 - p_k^-1 q^-1)."""
    return Poly.from_roots(1.0 / _antistable_roots(f_a))


def allpass_gain(f_a: Poly) -> float:
    """Squared magnitude of f_a / mirror(f_a) on the unit circle.

    The ratio is an all-pass filter, so the value prod_k |p_k|^2 is constant
    over frequency.
    """
    rts = _antistable_roots(f_a)
    return float(np.prod(np.abs(rts) ** 2)) if rts.size else 1.0


def poly_mul(a: Poly, b: Poly) -> Poly:
    if a.is_zero or b.is_zero:
        return Poly([0.0])
    return Poly(np.convolve(a.coeffs, b.coeffs))


def poly_add(a: Poly, b: Poly) -> Poly:
    n = max(len(a.coeffs), len(b.coeffs))
    out = np.zeros(n)
    out[: len(a.coeffs)] += a.coeffs
    out[: len(b.coeffs)] += b.coeffs
    return Poly(out)
