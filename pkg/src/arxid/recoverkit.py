"""Recovery of the plant, the corrected noise model, and the noise variance
from an estimated ARX model.

When the plant is unstable, the asymptotic ARX numerator 1/H picks up the
amplifying all-pass factor A_a / A_a* built from the anti-stable roots of A.
Recovery therefore factors the estimated A, mirrors its anti-stable part,
and divides the attained cost by the constant squared all-pass magnitude:

    G_hat      = B / A
    H_hat      = (1/A) (A_a / A_a*)   (the A_a factor cancels inside A)
    lambda_hat = J_hat / allpass_gain(A_a)

For a stable plant A_a = 1 and everything reduces to H_hat = 1/A,
lambda_hat = J_hat.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .arxfit import ArxEstimate
from .errors import InverselyUnstableH, RootOnUnitCircle
from .ltisys import FreqGrid, RationalTF, SystemSpec, is_stable, make_G, make_H
from .polyq import Poly, allpass_gain, factor_stable_antistable, mirror, poly_mul, roots


@dataclass(frozen=True, eq=False)
class RecoveredModel:
    G_hat: RationalTF
    H_hat: RationalTF
    lambda_hat: float
    A_a: Poly             # anti-stable factor of the estimated A
    A_a_mirror: Poly      # its roots reflected inside the unit circle
    gain: float           # squared all-pass magnitude, >= 1
    H_uncorrected: RationalTF  # 1 / A, for diagnostics

    def to_json(self) -> dict:
        return {
            "G_hat": self.G_hat.to_json(),
            "H_hat": self.H_hat.to_json(),
            "lambda_hat": self.lambda_hat,
            "A_a": self.A_a.to_list(),
            "A_a_mirror": self.A_a_mirror.to_list(),
            "gain": self.gain,
            "H_uncorrected": self.H_uncorrected.to_json(),
        }


def recover(est: ArxEstimate) -> RecoveredModel:
    """Recover plant, corrected noise model and noise variance from an
    ARX estimate.

    The corrected noise model is assembled in root space: the anti-stable
    roots of A are removed from the denominator multiset and replaced by
    their mirrors, so the known common factor cancels exactly and the
    result 1 / (A_stable A_a*) is stable by construction.  Raises
    RootOnUnitCircle when A has a root inside the classification band.
    """
    rs = roots(est.A)
    on = rs.on_circle
    if on.size:
        raise RootOnUnitCircle(on[0], "recovery undefined: A has a near-unit-circle root")
    stable_roots = rs.stable
    anti_roots = rs.antistable
    a_a = Poly.from_roots(anti_roots)
    a_a_mirror = Poly.from_roots(1.0 / anti_roots) if anti_roots.size else Poly([1.0])
    gain = float(np.prod(np.abs(anti_roots) ** 2)) if anti_roots.size else 1.0
    h_den = Poly.from_roots(np.concatenate([stable_roots, 1.0 / anti_roots]))
    return RecoveredModel(
        G_hat=RationalTF(est.B, est.A),
        H_hat=RationalTF(Poly([1.0]), h_den),
        lambda_hat=est.J_hat / gain,
        A_a=a_a,
        A_a_mirror=a_a_mirror,
        gain=gain,
        H_uncorrected=RationalTF(Poly([1.0]), est.A),
    )


def theoretical_minimizers(spec: SystemSpec) -> tuple[RationalTF, RationalTF, float]:
    """Closed-form asymptotic ARX minimizers and attained cost for a system
    with a stable, inversely stable noise model.

    Returns (A_bar, B_bar, J_star) with

        A_bar  = (Gamma D / C) (F_a / F_a*)
        B_bar  = (D / C) (L / (F_s F_a*))
        J_star = allpass_gain(F_a) lambda_e

    so a stable F gives back (1/H, G/H) and J_star = lambda_e.
    """
    h = make_H(spec)
    if not is_stable(h):
        raise ValueError("noise model H must be stable")
    if spec.C.degree > 0 and roots(spec.C).antistable.size:
        raise InverselyUnstableH("C has anti-stable roots; minimum-phase H required")
    f_s, f_a = factor_stable_antistable(spec.F)
    f_a_star = mirror(f_a)
    a_bar = RationalTF(
        poly_mul(poly_mul(spec.Gamma, spec.D), f_a),
        poly_mul(spec.C, f_a_star),
    )
    b_bar = RationalTF(
        poly_mul(spec.D, spec.L),
        poly_mul(poly_mul(spec.C, f_s), f_a_star),
    )
    return a_bar, b_bar, allpass_gain(f_a) * spec.lambda_e


@dataclass(frozen=True, eq=False)
class ComparisonReport:
    """Frequency-wise agreement between a recovered model and the truth.

    Magnitudes are in dB; correction_ratio is |H_uncorrected| / |H_hat|,
    which equals 1/sqrt(gain) at every frequency (the all-pass correction
    is constant in magnitude).
    """

    omegas: np.ndarray
    mag_G_true_db: np.ndarray
    mag_G_hat_db: np.ndarray
    mag_H_true_db: np.ndarray
    mag_H_hat_db: np.ndarray
    mag_H_uncorr_db: np.ndarray
    phase_G_err_deg: np.ndarray
    phase_H_err_deg: np.ndarray
    correction_ratio: np.ndarray

    @property
    def mag_G_err_db(self) -> np.ndarray:
        return self.mag_G_hat_db - self.mag_G_true_db

    @property
    def mag_H_err_db(self) -> np.ndarray:
        return self.mag_H_hat_db - self.mag_H_true_db

    def to_csv(self, path) -> None:
        columns = (
            self.omegas,
            self.mag_G_true_db,
            self.mag_G_hat_db,
            self.mag_H_true_db,
            self.mag_H_hat_db,
            self.mag_H_uncorr_db,
        )
        with open(path, "w", newline="\n") as fh:
            fh.write("omega,mag_G_true_db,mag_G_hat_db,mag_H_true_db,mag_H_hat_db,mag_H_uncorr_db\n")
            for row in zip(*columns):
                fh.write(",".join(repr(float(v)) for v in row) + "\n")


def _mag_db(values: np.ndarray) -> np.ndarray:
    return 20.0 * np.log10(np.abs(values))


def _phase_err_deg(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    delta = np.degrees(np.angle(a) - np.angle(b))
    return (delta + 180.0) % 360.0 - 180.0


def compare_models(recovered: RecoveredModel, spec: SystemSpec, grid: FreqGrid) -> ComparisonReport:
    """Magnitude and phase errors of the recovered G and H against the true
    system over a frequency grid."""
    om = grid.omegas
    g_true = make_G(spec).at_freq(om)
    h_true = make_H(spec).at_freq(om)
    g_hat = recovered.G_hat.at_freq(om)
    h_hat = recovered.H_hat.at_freq(om)
    h_unc = recovered.H_uncorrected.at_freq(om)
    return ComparisonReport(
        omegas=om,
        mag_G_true_db=_mag_db(g_true),
        mag_G_hat_db=_mag_db(g_hat),
        mag_H_true_db=_mag_db(h_true),
        mag_H_hat_db=_mag_db(h_hat),
        mag_H_uncorr_db=_mag_db(h_unc),
        phase_G_err_deg=_phase_err_deg(g_hat, g_true),
        phase_H_err_deg=_phase_err_deg(h_hat, h_true),
        correction_ratio=np.abs(h_unc) / np.abs(h_hat),
    )
