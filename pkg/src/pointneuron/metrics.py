"""Reconstruction quality metrics: NMSE, MAC, per-point NSE map, evaluation grid.

NMSE follows the printed definition, a dB ratio of summed error magnitudes to
summed truth magnitudes (an l1 ratio, despite the name); nmse_l2 gives the
energy-ratio variant for sensitivity checks. Exact matches clamp at -300 dB
so exported tables stay finite.
"""

from dataclasses import dataclass

import numpy as np

from .kernels import as_points

DB_FLOOR = -300.0
NSE_TRUTH_FLOOR = 1e-12


@dataclass
class MetricsRecord:
    frequency_hz: float
    nmse_db: float
    mac: float
    method: str = ""
    seed: int = 0


def _to_vec(x) -> np.ndarray:
    v = np.asarray(x, dtype=complex).reshape(-1)
    if v.shape[0] < 1:
        raise ValueError("empty pressure vector")
    return v


def _ratio_db(num: float, den: float) -> float:
    if num == 0.0:
        return DB_FLOOR
    return max(20.0 * np.log10(num / den), DB_FLOOR)


def nmse(truth, estimate) -> float:
    """20*log10( sum|est - truth| / sum|truth| ) [dB]."""
    t, e = _to_vec(truth), _to_vec(estimate)
    if t.shape != e.shape:
        raise ValueError("length mismatch")
    den = float(np.sum(np.abs(t)))
    if den == 0.0:
        raise ValueError("NMSE undefined for all-zero truth")
    return _ratio_db(float(np.sum(np.abs(e - t))), den)


def nmse_l2(truth, estimate) -> float:
    """Energy-ratio variant, 20*log10( ||est - truth|| / ||truth|| ) [dB]."""
    t, e = _to_vec(truth), _to_vec(estimate)
    den = float(np.linalg.norm(t))
    if den == 0.0:
        raise ValueError("NMSE undefined for all-zero truth")
    return _ratio_db(float(np.linalg.norm(e - t)), den)


def mac(truth, estimate) -> float:
    """Modal assurance criterion |t^H e|^2 / ((t^H t)(e^H e)) in [0, 1]."""
    t, e = _to_vec(truth), _to_vec(estimate)
    tt = float(np.vdot(t, t).real)
    ee = float(np.vdot(e, e).real)
    if tt == 0.0 or ee == 0.0:
        raise ValueError("MAC undefined for a zero vector")
    return float(np.abs(np.vdot(t, e)) ** 2 / (tt * ee))


def nse_map(truth, estimate) -> np.ndarray:
    """Per-point 20*log10(|est - truth| / |truth|) [dB]; NaN where |truth| < 1e-12."""
    t, e = _to_vec(truth), _to_vec(estimate)
    if t.shape != e.shape:
        raise ValueError("length mismatch")
    out = np.full(t.shape, np.nan)
    ok = np.abs(t) >= NSE_TRUTH_FLOOR
    err = np.abs(e[ok] - t[ok])
    with np.errstate(divide="ignore"):
        out[ok] = np.maximum(20.0 * np.log10(err / np.abs(t[ok])), DB_FLOOR)
    return out


def make_eval_grid(center, radius: float, spacing: float) -> np.ndarray:
    """Square lattice registered at the center, clipped to the disk, row-major order.

    With the 5.3 cm spacing and R = 1 m of the reference setup this yields
    1109 points (the lattice registration is ours; counts near 1124 depend on
    the unstated registration convention).
    """
    if spacing <= 0:
        raise ValueError("spacing must be positive")
    center = as_points(center)
    n = int(radius / spacing) + 1
    offs = spacing * np.arange(-n, n + 1)
    xx, yy = np.meshgrid(offs, offs, indexing="xy")
    keep = xx ** 2 + yy ** 2 <= radius ** 2 + 1e-12
    return np.column_stack([center[0] + xx[keep],
                            center[1] + yy[keep],
                            np.full(np.count_nonzero(keep), center[2])])
