"""High-order ARX estimation by linear least squares.

The model A(q) y_t = B(q) u_t + e_t with A monic of degree n_a and B of
degree n_b (zero constant term) is fitted by minimizing the mean squared
one-step prediction error over t = max(n_a, n_b)+1 .. N.  The regression
starts past the longest lag (no pre-windowing), and the attained cost is
normalized by the number of residual terms actually used.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .errors import RankDeficient
from .polyq import Poly

EPS_LS = 1e-12  # reciprocal-condition threshold for the regressor matrix


@dataclass(frozen=True, eq=False)
class ArxOrders:
    n_a: int
    n_b: int

    def __post_init__(self):
        if self.n_a < 1 or self.n_b < 1:
            raise ValueError("orders must be at least 1")

    @property
    def max_lag(self) -> int:
        return max(self.n_a, self.n_b)


@dataclass(frozen=True, eq=False)
class ArxEstimate:
    """Estimated ARX polynomials with the attained mean squared residual."""

    A: Poly
    B: Poly
    J_hat: float
    N_eff: int
    orders: ArxOrders

    def __post_init__(self):
        if not self.A.is_monic:
            raise ValueError("A must be monic")
        if self.A.degree > self.orders.n_a or self.B.degree > self.orders.n_b:
            raise ValueError("polynomial degrees exceed the declared orders")
        if not self.B.is_zero and self.B.coeffs[0] != 0.0:
            raise ValueError("B must have a zero constant term")
        if self.J_hat < 0:
            raise ValueError("J_hat must be nonnegative")

    def to_json(self) -> dict:
        return {
            "A": self.A.to_list(),
            "B": self.B.to_list(),
            "J_hat": self.J_hat,
            "n_a": self.orders.n_a,
            "n_b": self.orders.n_b,
            "N_eff": self.N_eff,
        }

    @classmethod
    def from_json(cls, data: dict) -> "ArxEstimate":
        return cls(
            A=Poly(data["A"]),
            B=Poly(data["B"]),
            J_hat=float(data["J_hat"]),
            N_eff=int(data["N_eff"]),
            orders=ArxOrders(int(data["n_a"]), int(data["n_b"])),
        )


def _lag_matrix(x: np.ndarray, lags: int, start: int) -> np.ndarray:
    """Columns x_{t-1} .. x_{t-lags} for t = start .. N-1, shape (N-start, lags)."""
    n = len(x)
    return np.stack([x[start - k : n - k] for k in range(1, lags + 1)], axis=1)


def regressor_matrix(y: np.ndarray, u: np.ndarray, orders: ArxOrders) -> tuple[np.ndarray, np.ndarray]:
    """Regression Phi theta ~= rhs with theta = [a_1..a_na, b_1..b_nb].

    Row t holds [-y_{t-1} .. -y_{t-n_a}, u_{t-1} .. u_{t-n_b}] and the
    right-hand side is y_t, for t = max(n_a, n_b) .. N-1.
    """
    m = orders.max_lag
    phi = np.hstack([-_lag_matrix(y, orders.n_a, m), _lag_matrix(u, orders.n_b, m)])
    return phi, y[m:]


def estimate_arx(y, u, orders: ArxOrders) -> ArxEstimate:
    """Least-squares ARX fit via QR of the regressor matrix.

    Raises RankDeficient when the reciprocal condition estimate of the
    triangular factor falls below EPS_LS, which signals insufficient
    excitation for the requested orders.
    """
    y = np.asarray(y, dtype=float)
    u = np.asarray(u, dtype=float)
    if y.shape != u.shape or y.ndim != 1:
        raise ValueError("y and u must be 1-d arrays of equal length")
    n = len(y)
    if n <= orders.max_lag + orders.n_a + orders.n_b:
        raise ValueError("record too short for the requested orders")

    phi, rhs = regressor_matrix(y, u, orders)
    q, r = np.linalg.qr(phi)
    diag = np.abs(np.diag(r))
    if diag.min() <= EPS_LS * diag.max():
        raise RankDeficient(
            f"regressor matrix numerically singular (rcond ~ {diag.min() / diag.max():.2e})"
        )
    theta = np.linalg.solve(r, q.T @ rhs)
    res = rhs - phi @ theta
    n_eff = len(rhs)
    return ArxEstimate(
        A=Poly(np.concatenate(([1.0], theta[: orders.n_a]))),
        B=Poly(np.concatenate(([0.0], theta[orders.n_a :]))),
        J_hat=float(res @ res / n_eff),
        N_eff=n_eff,
        orders=orders,
    )


def residuals(est: ArxEstimate, y, u) -> np.ndarray:
    """Prediction errors A(q) y_t - B(q) u_t over the valid range
    t = max(n_a, n_b) .. N-1."""
    y = np.asarray(y, dtype=float)
    u = np.asarray(u, dtype=float)
    a_part = lfilter(est.A.coeffs, [1.0], y)
    b_part = lfilter(est.B.coeffs, [1.0], u) if not est.B.is_zero else np.zeros_like(u)
    return (a_part - b_part)[est.orders.max_lag :]
