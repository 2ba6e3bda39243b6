"""Frequency-domain image source method for rectangular rooms, mic placement, noise.

The room origin is at the geometric center. Walls carry real reflection
coefficients (beta_x-, beta_x+, beta_y-, beta_y+, beta_z-, beta_z+); an
image's amplitude is the product of the coefficients of every wall crossed
on its reflection path. Fields are summed per frequency directly from the
free-space Green function at the image positions, so there is no time-domain
truncation to worry about.
"""

from dataclasses import dataclass, field

import numpy as np

from .kernels import SINGULARITY_EPS, SingularityError, as_points


@dataclass(frozen=True)
class RoomSpec:
    dimensions: tuple = (6.0, 4.0, 4.0)                  # Lx, Ly, Lz [m]
    reflection: tuple = (0.8, 0.8, 0.8, 0.8, 0.0, 0.0)   # x-, x+, y-, y+, z-, z+

    def __post_init__(self):
        if any(d <= 0 for d in self.dimensions):
            raise ValueError("room dimensions must be positive")
        if len(self.reflection) != 6 or any(not 0 <= b <= 1 for b in self.reflection):
            raise ValueError("need six reflection coefficients in [0, 1]")

    def contains(self, p) -> bool:
        p = as_points(p)
        return bool(np.all(np.abs(p) < np.asarray(self.dimensions) / 2))


@dataclass(frozen=True)
class SourceSpec:
    position: tuple
    strength: complex = 1.0 + 0.0j


@dataclass
class ImageSource:
    position: np.ndarray
    amplitude: float
    order: int


@dataclass
class MicArray:
    positions: np.ndarray        # (Q, 3)
    kind: str = "circular"       # circular | random
    seed: int | None = None


@dataclass
class FieldSamples:
    k: float
    positions: np.ndarray        # (M, 3)
    pressures: np.ndarray        # (M,) complex

    def __post_init__(self):
        self.positions = as_points(self.positions).reshape(-1, 3)
        self.pressures = np.asarray(self.pressures, dtype=complex).reshape(-1)
        if self.pressures.shape[0] != self.positions.shape[0]:
            raise ValueError("positions/pressures length mismatch")


def _axis_images(length: float, beta_lo: float, beta_hi: float, s: float, max_order: int):
    """Per-axis image coordinates, reflection counts, and amplitudes.

    Shifted frame with walls at 0 and L: images sit at (1-2q)*s' + 2mL for
    q in {0,1}; the lower wall is crossed |m - q| times and the upper |m|.
    """
    s_shift = s + length / 2
    m_max = max_order // 2 + 1
    pos, cnt, amp = [], [], []
    for m in range(-m_max, m_max + 1):
        for q in (0, 1):
            n_lo, n_hi = abs(m - q), abs(m)
            if n_lo + n_hi > max_order:
                continue
            pos.append((1 - 2 * q) * s_shift + 2 * m * length - length / 2)
            cnt.append(n_lo + n_hi)
            amp.append(beta_lo ** n_lo * beta_hi ** n_hi)
    return np.array(pos), np.array(cnt), np.array(amp)


def _image_arrays(room: RoomSpec, src: SourceSpec, max_order: int, drop_zero: bool = False):
    """All images up to max_order as (positions (N,3), amplitudes, orders), canonically ordered."""
    lx, ly, lz = room.dimensions
    bxm, bxp, bym, byp, bzm, bzp = room.reflection
    sx, sy, sz = src.position
    px, cx, ax = _axis_images(lx, bxm, bxp, sx, max_order)
    py, cy, ay = _axis_images(ly, bym, byp, sy, max_order)
    pz, cz, az = _axis_images(lz, bzm, bzp, sz, max_order)

    order = cx[:, None, None] + cy[None, :, None] + cz[None, None, :]
    keep = order <= max_order
    amp = (ax[:, None, None] * ay[None, :, None] * az[None, None, :])[keep]
    ordv = order[keep]
    ix, iy, iz = np.nonzero(keep)
    positions = np.column_stack([px[ix], py[iy], pz[iz]])
    if drop_zero:
        nz = amp != 0
        positions, amp, ordv = positions[nz], amp[nz], ordv[nz]
        ix, iy, iz = ix[nz], iy[nz], iz[nz]
    key = np.lexsort((iz, iy, ix, ordv))
    return positions[key], amp[key], ordv[key]


def enumerate_images(room: RoomSpec, src: SourceSpec, max_order: int) -> list:
    """All image sources with reflection count <= max_order, ordered by order then index."""
    if max_order < 0:
        raise ValueError("max_order must be >= 0")
    positions, amp, ordv = _image_arrays(room, src, max_order)
    return [ImageSource(p, float(a), int(o)) for p, a, o in zip(positions, amp, ordv)]


def simulate_field(room: RoomSpec, sources: list, points, k: float,
                   max_order: int = 30, eps: float = SINGULARITY_EPS) -> FieldSamples:
    """Reverberant pressure at the given points: Green-function sum over all images."""
    points = as_points(points).reshape(-1, 3)
    total = np.zeros(points.shape[0], dtype=complex)
    for src in sources:
        positions, amp, _ = _image_arrays(room, src, max_order, drop_zero=True)
        r = np.linalg.norm(points[:, None, :] - positions[None, :, :], axis=2)
        if np.any(r <= eps):
            raise SingularityError("evaluation point coincides with an image source")
        total += src.strength * (np.exp(1j * k * r) / (4.0 * np.pi * r)) @ amp
    return FieldSamples(k, points, total)


def place_mics_circular(center, radius: float, n_mics: int) -> MicArray:
    """Uniformly spaced microphones on the circle boundary, first one at azimuth 0."""
    if n_mics < 1:
        raise ValueError("need at least one microphone")
    center = as_points(center)
    az = 2.0 * np.pi * np.arange(n_mics) / n_mics
    pos = np.column_stack([center[0] + radius * np.cos(az),
                           center[1] + radius * np.sin(az),
                           np.full(n_mics, center[2])])
    return MicArray(pos, kind="circular")


def place_mics_random(center, radius: float, n_mics: int, seed: int,
                      min_separation: float = 0.01) -> MicArray:
    """Area-uniform microphones inside the disk, rejection-sampled for separation."""
    if n_mics < 1:
        raise ValueError("need at least one microphone")
    center = as_points(center)
    rng = np.random.default_rng(seed)
    pos = np.empty((0, 3))
    for _ in range(100_000):
        r = radius * np.sqrt(rng.uniform())
        phi = rng.uniform(0.0, 2.0 * np.pi)
        cand = np.array([center[0] + r * np.cos(phi), center[1] + r * np.sin(phi), center[2]])
        if pos.shape[0] and np.min(np.linalg.norm(pos - cand, axis=1)) < min_separation:
            continue
        pos = np.vstack([pos, cand])
        if pos.shape[0] == n_mics:
            return MicArray(pos, kind="random", seed=seed)
    raise RuntimeError(f"could not place {n_mics} microphones with {min_separation} m separation")


def mic_count_rule(f_max_hz: float, radius: float, c: float) -> int:
    """Q = 2N + 1 with N = ceil(k_max * R)."""
    n = int(np.ceil(2.0 * np.pi * f_max_hz / c * radius))
    return 2 * n + 1


def add_noise(samples: FieldSamples, snr_db: float | None, seed: int) -> FieldSamples:
    """Add circular complex Gaussian noise at the given array-average SNR.

    The noise variance is common to all sensors: mean signal power divided by
    10^(snr/10). snr_db = None (or +inf) leaves the samples untouched.
    """
    if snr_db is None or np.isinf(snr_db):
        return FieldSamples(samples.k, samples.positions.copy(), samples.pressures.copy())
    power = float(np.mean(np.abs(samples.pressures) ** 2))
    if power == 0.0:
        raise ValueError("SNR undefined for an all-zero signal")
    sigma2 = power / 10.0 ** (snr_db / 10.0)
    rng = np.random.default_rng(seed)
    noise = rng.normal(scale=np.sqrt(sigma2 / 2), size=(samples.pressures.shape[0], 2))
    return FieldSamples(samples.k, samples.positions.copy(),
                        samples.pressures + noise[:, 0] + 1j * noise[:, 1])
