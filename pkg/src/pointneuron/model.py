"""Point neuron network: forward field, cost, analytic complex gradients, training.

The model is a weighted sum of normalized point-source kernels. Weights are
updated by steepest descent on the conjugate (Wirtinger) gradient, virtual
source positions by ordinary real gradients. Both gradients are closed-form;
see gradcheck.py for the finite-difference verification harness.
"""

from dataclasses import dataclass, field

import numpy as np

from .kernels import SINGULARITY_EPS, SingularityError, as_points


class DegenerateGeometryError(ValueError):
    """A virtual source sits too close to the origin or a microphone."""


class InitRegionError(ValueError):
    """Initialization region cannot host the requested number of sources."""


@dataclass(frozen=True)
class InitRegion:
    """Planar rectangle hosting virtual sources, with a circular hole cut out.

    The hole is the target (reconstruction) region: virtual sources model the
    interior field from outside, so they must never enter it.
    """

    center: tuple = (0.0, 0.0, 0.0)       # rectangle center, z fixes the plane
    size_x: float = 9.0                    # m
    size_y: float = 9.0                    # m
    hole_center: tuple = (0.0, 0.0, 0.0)
    hole_radius: float = 0.0               # m, 0 disables the hole

    def admissible(self, xy: np.ndarray) -> np.ndarray:
        """Boolean mask: inside the rectangle, outside the closed hole, off the origin."""
        cx, cy, _ = self.center
        hx, hy, _ = self.hole_center
        in_rect = (np.abs(xy[:, 0] - cx) <= self.size_x / 2) & (np.abs(xy[:, 1] - cy) <= self.size_y / 2)
        out_hole = np.hypot(xy[:, 0] - hx, xy[:, 1] - hy) > self.hole_radius
        z = self.center[2]
        off_origin = np.hypot(xy[:, 0], xy[:, 1]) ** 2 + z ** 2 > 0
        return in_rect & out_hole & off_origin


@dataclass
class PointNeuronModel:
    k: float                    # rad/m
    weights: np.ndarray         # (V,) complex
    biases: np.ndarray          # (V, 3) float, virtual source positions [m]

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=complex).reshape(-1)
        self.biases = as_points(self.biases).reshape(-1, 3)
        if self.weights.shape[0] != self.biases.shape[0] or self.weights.shape[0] < 1:
            raise ValueError("need matching weights/biases with V >= 1")

    @property
    def n_neurons(self) -> int:
        return self.weights.shape[0]

    def copy(self) -> "PointNeuronModel":
        return PointNeuronModel(self.k, self.weights.copy(), self.biases.copy())


@dataclass
class Observations:
    positions: np.ndarray       # (Q, 3) float
    pressures: np.ndarray       # (Q,) complex

    def __post_init__(self):
        self.positions = as_points(self.positions).reshape(-1, 3)
        self.pressures = np.asarray(self.pressures, dtype=complex).reshape(-1)
        q = self.positions.shape[0]
        if q < 1 or self.pressures.shape[0] != q:
            raise ValueError("need Q >= 1 positions with matching pressures")


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 3e-2
    l1_weight: float = 1e-3
    max_iterations: int = 20000
    relocation_eps: float = 0.05     # m
    stop_tolerance: float = 1e-8     # relative loss change over stop_window iterations
    stop_window: int = 50
    rng_seed: int = 0
    bias_learning_rate: float | None = None  # optional override; defaults to learning_rate
    init_weight_scale: float = 1.0           # shrinks the random initial weights

    def __post_init__(self):
        if self.learning_rate <= 0 or self.l1_weight < 0 or self.max_iterations < 1:
            raise ValueError("invalid training configuration")
        if self.relocation_eps <= 0 or self.stop_tolerance < 0 or self.init_weight_scale < 0:
            raise ValueError("invalid training configuration")


@dataclass
class RelocationEvent:
    iteration: int
    neuron: int
    old_position: np.ndarray
    new_position: np.ndarray


@dataclass
class LossHistory:
    total: list = field(default_factory=list)
    data_term: list = field(default_factory=list)
    l1_term: list = field(default_factory=list)
    relocations: list = field(default_factory=list)

    def record(self, total, data_term, l1_term):
        self.total.append(total)
        self.data_term.append(data_term)
        self.l1_term.append(l1_term)


# ---------------------------------------------------------------------------
# forward model and cost
# ---------------------------------------------------------------------------

def _distances(biases: np.ndarray, points: np.ndarray):
    """(d_origin (V,), d_points (Q, V)) distances for the kernel matrix."""
    d_v = np.linalg.norm(biases, axis=1)
    d_q = np.linalg.norm(points[:, None, :] - biases[None, :, :], axis=2)
    return d_v, d_q


def kernel_matrix(model: PointNeuronModel, points: np.ndarray, eps: float = SINGULARITY_EPS) -> np.ndarray:
    """(Q, V) matrix of point-neuron responses; forward field is K @ weights."""
    points = as_points(points).reshape(-1, 3)
    d_v, d_q = _distances(model.biases, points)
    if np.any(d_v <= eps) or np.any(d_q <= eps):
        raise SingularityError("evaluation point or origin coincides with a virtual source")
    return (d_v[None, :] / d_q) * np.exp(1j * model.k * (d_q - d_v[None, :]))


def forward(model: PointNeuronModel, x) -> np.ndarray:
    """Predicted complex pressure at x; scalar for a single point, (Q,) for many."""
    pts = as_points(x)
    single = pts.ndim == 1
    out = kernel_matrix(model, pts.reshape(-1, 3)) @ model.weights
    return complex(out[0]) if single else out


def cost(model: PointNeuronModel, obs: Observations, l1_weight: float) -> float:
    """Sum of squared residuals at the microphones plus l1 penalty on weights."""
    r = forward(model, obs.positions) - obs.pressures
    return float(np.sum(np.abs(r) ** 2) + l1_weight * np.sum(np.abs(model.weights)))


def _cost_terms(model, obs, l1_weight):
    r = forward(model, obs.positions) - obs.pressures
    data = float(np.sum(np.abs(r) ** 2))
    l1 = float(np.sum(np.abs(model.weights)))
    return data + l1_weight * l1, data, l1


# ---------------------------------------------------------------------------
# analytic gradients
# ---------------------------------------------------------------------------

def _check_geometry(d_v, d_q, threshold):
    if np.any(d_v <= threshold) or np.any(d_q <= threshold):
        raise DegenerateGeometryError(
            f"virtual source within {threshold} m of the origin or a microphone"
        )


def grad_weights(model: PointNeuronModel, obs: Observations, l1_weight: float,
                 threshold: float = SINGULARITY_EPS) -> np.ndarray:
    """Conjugate (Wirtinger) gradient of the cost w.r.t. every weight, shape (V,).

    The l1 subgradient at w = 0 is taken as 0 (the standard choice at the kink).
    """
    d_v, d_q = _distances(model.biases, obs.positions)
    _check_geometry(d_v, d_q, threshold)
    kmat = (d_v[None, :] / d_q) * np.exp(1j * model.k * (d_q - d_v[None, :]))
    residual = kmat @ model.weights - obs.pressures
    g = kmat.conj().T @ residual
    nz = model.weights != 0
    g[nz] += 0.5 * l1_weight * np.exp(1j * np.angle(model.weights[nz]))
    return g


def grad_weight(model, obs, l1_weight, v: int, threshold: float = SINGULARITY_EPS) -> complex:
    return complex(grad_weights(model, obs, l1_weight, threshold)[v])


def grad_biases(model: PointNeuronModel, obs: Observations,
                threshold: float = SINGULARITY_EPS) -> np.ndarray:
    """Real gradient of the cost w.r.t. every virtual source position, shape (V, 3).

    The l1 penalty does not depend on positions, so it contributes nothing.
    """
    d_v, d_q = _distances(model.biases, obs.positions)       # (V,), (Q, V)
    _check_geometry(d_v, d_q, threshold)
    kmat = (d_v[None, :] / d_q) * np.exp(1j * model.k * (d_q - d_v[None, :]))
    residual = kmat @ model.weights - obs.pressures           # (Q,)
    # common per-(q, v) complex factor: conj(residual) * w_v * kernel
    f = residual.conj()[:, None] * model.weights[None, :] * kmat
    ik = 1j * model.k
    coef_v = -(ik * d_v - 1.0) / d_v ** 2                     # (V,)
    coef_q = (ik * d_q - 1.0) / d_q ** 2                      # (Q, V)
    diff = model.biases[None, :, :] - obs.positions[:, None, :]   # (Q, V, 3)
    inner = coef_v[None, :, None] * model.biases[None, :, :] + coef_q[:, :, None] * diff
    return 2.0 * np.sum((f[:, :, None] * inner).real, axis=0)


def grad_bias(model, obs, v: int, threshold: float = SINGULARITY_EPS) -> tuple:
    g = grad_biases(model, obs, threshold)[v]
    return (float(g[0]), float(g[1]), float(g[2]))


# ---------------------------------------------------------------------------
# training
# ---------------------------------------------------------------------------

def relocate_degenerate(model: PointNeuronModel, obs: Observations, relocation_eps: float,
                        region: InitRegion, rng: np.random.Generator,
                        iteration: int = 0, history: LossHistory | None = None) -> PointNeuronModel:
    """Resample any virtual source that crowds the origin or a microphone.

    New positions are drawn uniformly over the admissible initialization
    region, re-checked against the same distance bounds. Non-degenerate
    neurons are left bit-exact.
    """
    d_v, d_q = _distances(model.biases, obs.positions)
    bad = np.flatnonzero((d_v <= relocation_eps) | np.any(d_q <= relocation_eps, axis=0))
    if bad.size == 0:
        return model
    out = model.copy()
    cx, cy, cz = region.center
    for v in bad:
        for _ in range(1000):
            xy = np.array([[cx + (rng.uniform() - 0.5) * region.size_x,
                            cy + (rng.uniform() - 0.5) * region.size_y]])
            if not region.admissible(xy)[0]:
                continue
            cand = np.array([xy[0, 0], xy[0, 1], cz])
            if np.linalg.norm(cand) <= relocation_eps:
                continue
            if np.min(np.linalg.norm(obs.positions - cand, axis=1)) <= relocation_eps:
                continue
            if history is not None:
                history.relocations.append(
                    RelocationEvent(iteration, int(v), out.biases[v].copy(), cand.copy()))
            out.biases[v] = cand
            break
        else:
            raise InitRegionError(f"could not relocate neuron {v} after 1000 attempts")
    return out


def step(model: PointNeuronModel, obs: Observations, cfg: TrainConfig,
         region: InitRegion, rng: np.random.Generator,
         iteration: int = 0, history: LossHistory | None = None) -> PointNeuronModel:
    """One full gradient-descent update of all weights and positions, then relocation.

    Degenerate geometry never raises here: the incoming model is relocated
    first if needed, and the updated model is relocated again.
    """
    model = relocate_degenerate(model, obs, cfg.relocation_eps, region, rng, iteration, history)
    gw = grad_weights(model, obs, cfg.l1_weight, threshold=cfg.relocation_eps)
    gb = grad_biases(model, obs, threshold=cfg.relocation_eps)
    xi_b = cfg.bias_learning_rate if cfg.bias_learning_rate is not None else cfg.learning_rate
    out = PointNeuronModel(model.k,
                           model.weights - cfg.learning_rate * gw,
                           model.biases - xi_b * gb)
    return relocate_degenerate(out, obs, cfg.relocation_eps, region, rng, iteration, history)


def init_model(k: float, n_neurons: int, region: InitRegion,
               rng: np.random.Generator) -> PointNeuronModel:
    """Random weights (|w| uniform in [0, 1], phase uniform), mesh-grid positions.

    The mesh spacing is the smallest uniform spacing whose admissible node
    count reaches n_neurons; the first n_neurons admissible nodes (row-major)
    are used.
    """
    if n_neurons < 1:
        raise ValueError("need at least one neuron")
    mag = rng.uniform(0.0, 1.0, size=n_neurons)
    phase = rng.uniform(0.0, 2.0 * np.pi, size=n_neurons)
    weights = mag * np.exp(1j * phase)

    cx, cy, cz = region.center
    for n in range(2, 4096):
        gx = cx + np.linspace(-region.size_x / 2, region.size_x / 2, n)
        gy = cy + np.linspace(-region.size_y / 2, region.size_y / 2, n)
        xx, yy = np.meshgrid(gx, gy, indexing="xy")
        xy = np.column_stack([xx.ravel(), yy.ravel()])
        ok = region.admissible(xy)
        if np.count_nonzero(ok) >= n_neurons:
            nodes = xy[ok][:n_neurons]
            biases = np.column_stack([nodes, np.full(n_neurons, cz)])
            return PointNeuronModel(k, weights, biases)
    raise InitRegionError(f"region too small to host {n_neurons} virtual sources")


def train(obs: Observations, k: float, cfg: TrainConfig, region: InitRegion,
          init: PointNeuronModel | None = None,
          n_neurons: int | None = None) -> tuple[PointNeuronModel, LossHistory]:
    """Gradient-descent training loop; returns the best-loss model seen.

    Stops at max_iterations or when the relative loss change over the last
    stop_window iterations falls below stop_tolerance.
    """
    rng = np.random.default_rng(cfg.rng_seed)
    if init is None:
        if n_neurons is None:
            raise ValueError("provide either an initial model or n_neurons")
        model = init_model(k, n_neurons, region, rng)
        model.weights *= cfg.init_weight_scale
    else:
        model = init.copy()
    model = relocate_degenerate(model, obs, cfg.relocation_eps, region, rng)

    history = LossHistory()
    total, data, l1 = _cost_terms(model, obs, cfg.l1_weight)
    history.record(total, data, l1)
    best_model, best_loss = model.copy(), total

    for it in range(1, cfg.max_iterations + 1):
        model = step(model, obs, cfg, region, rng, it, history)
        total, data, l1 = _cost_terms(model, obs, cfg.l1_weight)
        if not np.isfinite(total):
            raise FloatingPointError(f"loss diverged at iteration {it}")
        history.record(total, data, l1)
        if total < best_loss:
            best_loss, best_model = total, model.copy()
        if it >= cfg.stop_window:
            prev = history.total[it - cfg.stop_window]
            if abs(prev - total) < cfg.stop_tolerance * max(prev, 1e-300):
                break
    return best_model, history


def neuron_count_for_frequency(frequency_hz: float,
                               f_lo: float = 100.0, v_lo: int = 25,
                               f_hi: float = 2000.0, v_hi: int = 465) -> int:
    """Linear interpolation between the (100 Hz, 25) and (2000 Hz, 465) endpoints."""
    t = (frequency_hz - f_lo) / (f_hi - f_lo)
    return int(round(v_lo + t * (v_hi - v_lo)))
