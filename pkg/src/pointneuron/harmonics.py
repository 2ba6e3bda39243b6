"""Cylindrical-harmonics interior field expansion fit by regularized least squares.

The conventional comparison method: in the measurement plane the field is
expanded as sum_n alpha_n J_n(k r) e^{i n phi} about the target-region center
and the coefficients are found from the microphone pressures. Its well-known
failure mode, blow-up when J_n(kR) crosses zero on a circular array, is
surfaced through the condition-number report.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import special

from .kernels import as_points
from .room import FieldSamples

COND_LIMIT = 1e12


class RankDeficiencyWarning(UserWarning):
    """The basis matrix is numerically singular for this geometry/frequency."""


@dataclass
class HarmonicModel:
    k: float
    center: np.ndarray            # (3,)
    order: int                    # truncation N; coefficients run n = -N..N
    coefficients: np.ndarray      # (2N+1,) complex
    condition_number: float = 0.0
    rank_deficient: bool = False

    def __post_init__(self):
        self.center = as_points(self.center)
        self.coefficients = np.asarray(self.coefficients, dtype=complex).reshape(-1)
        if self.coefficients.shape[0] != 2 * self.order + 1:
            raise ValueError("need 2N+1 coefficients")


def bessel_j(n: int, x) -> float | np.ndarray:
    """Cylindrical Bessel function of the first kind, integer order."""
    out = special.jv(n, x)
    return float(out) if np.ndim(out) == 0 else out


def truncation_order(k: float, radius: float) -> int:
    """N = ceil(kR), the interior-field dimensionality rule."""
    return int(np.ceil(k * radius))


def _basis_matrix(k: float, center: np.ndarray, order: int, points: np.ndarray) -> np.ndarray:
    dx = points[:, 0] - center[0]
    dy = points[:, 1] - center[1]
    r = np.hypot(dx, dy)
    phi = np.arctan2(dy, dx)
    ns = np.arange(-order, order + 1)
    return special.jv(ns[None, :], k * r[:, None]) * np.exp(1j * ns[None, :] * phi[:, None])


def fit_harmonics(obs_positions, obs_pressures, k: float, center, order: int,
                  tikhonov: float | None = None) -> HarmonicModel:
    """Least-squares coefficient fit with Tikhonov regularization.

    tikhonov=None uses the default 1e-8 * sigma_max^2, which keeps the solve
    stable near Bessel zeros; pass 0 for the raw least-squares solution.
    """
    points = as_points(obs_positions).reshape(-1, 3)
    pressures = np.asarray(obs_pressures, dtype=complex).reshape(-1)
    center = as_points(center)
    a = _basis_matrix(k, center, order, points)
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    cond = float(s[0] / s[-1]) if s[-1] > 0 else np.inf
    deficient = cond > COND_LIMIT
    if deficient:
        warnings.warn(f"harmonic basis numerically singular (condition number {cond:.3e})",
                      RankDeficiencyWarning)
    if tikhonov is None:
        tikhonov = 1e-8 * s[0] ** 2
    filt = s / (s ** 2 + tikhonov)
    coeff = vh.conj().T @ (filt * (u.conj().T @ pressures))
    return HarmonicModel(k, center, order, coeff, condition_number=cond, rank_deficient=deficient)


def eval_harmonics(model: HarmonicModel, points) -> FieldSamples:
    """Expansion field at the given in-plane points."""
    points = as_points(points).reshape(-1, 3)
    a = _basis_matrix(model.k, model.center, model.order, points)
    return FieldSamples(model.k, points, a @ model.coefficients)
