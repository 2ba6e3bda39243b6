"""Acoustic kernels: free-space Green function, spherical Hankel h0, point neuron unit.

All functions broadcast over trailing point axes. Positions are Cartesian
(x, y, z) in meters with the room origin at the center; pressures are complex.
"""

import numpy as np

SPEED_OF_SOUND = 343.0  # m/s, configurable everywhere it is used
SINGULARITY_EPS = 1e-9  # m, kernel evaluation guard (training relocation uses its own threshold)


class SingularityError(ValueError):
    """Evaluation point coincides (within eps) with a source position."""


def wavenumber(frequency_hz: float, c: float = SPEED_OF_SOUND) -> float:
    """k = 2*pi*f/c [rad/m]."""
    if frequency_hz <= 0 or c <= 0:
        raise ValueError(f"frequency and sound speed must be positive, got f={frequency_hz}, c={c}")
    return 2.0 * np.pi * frequency_hz / c


def as_points(p) -> np.ndarray:
    """Coerce to a float array with trailing axis of length 3."""
    a = np.asarray(p, dtype=float)
    if a.shape[-1] != 3:
        raise ValueError(f"expected (..., 3) point array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("point coordinates must be finite")
    return a


def green_free_space(x, y, k: float, eps: float = SINGULARITY_EPS):
    """Free-space Green function e^{ikr} / (4*pi*r) with r = ||x - y||.

    Raises SingularityError if any pairwise distance is <= eps.
    """
    x = as_points(x)
    y = as_points(y)
    r = np.linalg.norm(x - y, axis=-1)
    if np.any(r <= eps):
        raise SingularityError(f"evaluation point within {eps} m of source")
    out = np.exp(1j * k * r) / (4.0 * np.pi * r)
    return out if out.ndim else complex(out)


def spherical_hankel0(r, eps: float = SINGULARITY_EPS):
    """Zeroth-order spherical Hankel function of the first kind, e^{ir} / (ir)."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= eps):
        raise SingularityError(f"argument must exceed {eps}")
    out = np.exp(1j * r) / (1j * r)
    return out if out.ndim else complex(out)


def point_neuron_eval(x, b, k: float, eps: float = SINGULARITY_EPS):
    """Normalized point-source unit (D_v / D_q^v) * e^{ik(D_q^v - D_v)}.

    D_v = ||b|| is the virtual-source distance from the origin and
    D_q^v = ||b - x|| its distance from the evaluation point. The 1/(4*pi)
    of the raw Green function is deliberately absorbed into the learned
    weight; this is the convention the analytic gradients assume.
    """
    x = as_points(x)
    b = as_points(b)
    d_v = np.linalg.norm(b, axis=-1)
    d_q = np.linalg.norm(np.subtract(b, x), axis=-1)
    if np.any(d_v <= eps) or np.any(d_q <= eps):
        raise SingularityError("virtual source at origin or at the evaluation point")
    out = (d_v / d_q) * np.exp(1j * k * (d_q - d_v))
    return out if out.ndim else complex(out)
