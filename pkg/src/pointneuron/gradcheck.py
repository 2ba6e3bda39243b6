"""Finite-difference verification of the analytic gradients.

Independent oracle: the conjugate gradient of a real loss is
0.5 * (dL/dRe w + i dL/dIm w), and position gradients are plain partials,
both computed here by central differences on the cost alone. Used by the
test suite and the `gradcheck` CLI subcommand.
"""

from dataclasses import dataclass, field

import numpy as np

from .model import Observations, PointNeuronModel, cost, grad_biases, grad_weights

WEIGHT_FD_STEP = 1e-6
BIAS_FD_STEP = 1e-5
SMALL_GRAD = 1e-3   # below this magnitude compare absolutely


def fd_grad_weight(model: PointNeuronModel, obs: Observations, l1_weight: float,
                   v: int, step: float = WEIGHT_FD_STEP) -> complex:
    def perturbed(delta):
        m = model.copy()
        m.weights[v] = m.weights[v] + delta
        return cost(m, obs, l1_weight)

    d_re = (perturbed(step) - perturbed(-step)) / (2 * step)
    d_im = (perturbed(1j * step) - perturbed(-1j * step)) / (2 * step)
    return 0.5 * (d_re + 1j * d_im)


def fd_grad_bias(model: PointNeuronModel, obs: Observations, l1_weight: float,
                 v: int, step: float = BIAS_FD_STEP) -> np.ndarray:
    out = np.empty(3)
    for axis in range(3):
        m_plus, m_minus = model.copy(), model.copy()
        m_plus.biases[v, axis] += step
        m_minus.biases[v, axis] -= step
        out[axis] = (cost(m_plus, obs, l1_weight) - cost(m_minus, obs, l1_weight)) / (2 * step)
    return out


def _rel_err(analytic, numeric) -> float:
    mag = max(abs(analytic), abs(numeric))
    if mag < SMALL_GRAD:
        return abs(analytic - numeric)   # absolute where the gradient is near zero
    return abs(analytic - numeric) / mag


@dataclass
class GradCheckReport:
    trials: int
    failures: int = 0
    worst_weight_err: float = 0.0
    worst_bias_err: float = 0.0
    messages: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failures == 0


def random_instance(rng: np.random.Generator):
    """Random small model/observation pair with non-degenerate geometry."""
    n_neurons = int(rng.integers(1, 9))
    n_mics = int(rng.integers(1, 9))
    k = float(rng.uniform(1.0, 40.0))
    weights = rng.normal(size=n_neurons) + 1j * rng.normal(size=n_neurons)
    # biases on a shell 1..3 m from the origin, mics within 0.5 m of it
    b_dir = rng.normal(size=(n_neurons, 3))
    b_dir /= np.linalg.norm(b_dir, axis=1, keepdims=True)
    biases = b_dir * rng.uniform(1.0, 3.0, size=(n_neurons, 1))
    mics = rng.uniform(-0.5, 0.5, size=(n_mics, 3))
    pressures = rng.normal(size=n_mics) + 1j * rng.normal(size=n_mics)
    return PointNeuronModel(k, weights, biases), Observations(mics, pressures)


def run_gradcheck(trials: int = 100, seed: int = 0, tolerance: float = 1e-6,
                  l1_weights=(0.0, 1e-3, 1.0),
                  flip_sign: bool = False) -> GradCheckReport:
    """Compare analytic and finite-difference gradients over random instances.

    flip_sign negates the analytic weight gradient; it exists so the harness
    itself can be shown to catch a wrong gradient.
    """
    rng = np.random.default_rng(seed)
    report = GradCheckReport(trials=trials)
    if trials == 0:
        report.messages.append("warning: zero trials requested, vacuous pass")
        return report
    for t in range(trials):
        model, obs = random_instance(rng)
        l1 = float(l1_weights[t % len(l1_weights)])
        gw = grad_weights(model, obs, l1)
        if flip_sign:
            gw = -gw
        gb = grad_biases(model, obs)
        for v in range(model.n_neurons):
            err_w = _rel_err(gw[v], fd_grad_weight(model, obs, l1, v))
            report.worst_weight_err = max(report.worst_weight_err, err_w)
            fd_b = fd_grad_bias(model, obs, l1, v)
            err_b = max(_rel_err(gb[v, a], fd_b[a]) for a in range(3))
            report.worst_bias_err = max(report.worst_bias_err, err_b)
            if err_w > tolerance or err_b > tolerance:
                report.failures += 1
                report.messages.append(
                    f"trial {t} neuron {v}: weight err {err_w:.3e}, bias err {err_b:.3e}")
    return report
