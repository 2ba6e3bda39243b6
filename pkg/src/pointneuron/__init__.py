"""Physics-embedded point-source network for sound field reconstruction.

The forward model is a weighted sum of normalized free-space point-source
kernels, so every field it can represent satisfies the homogeneous wave
equation exactly; training adjusts complex source strengths and positions
from sparse microphone observations. The package also provides an
image-source room simulator, a cylindrical-harmonics baseline, and NMSE /
MAC / NSE evaluation tools.
"""

__version__ = "0.1.0"

from .kernels import (SINGULARITY_EPS, SPEED_OF_SOUND, SingularityError,
                      green_free_space, point_neuron_eval, spherical_hankel0, wavenumber)
from .model import (DegenerateGeometryError, InitRegion, LossHistory, Observations,
                    PointNeuronModel, TrainConfig, cost, forward, grad_bias, grad_biases,
                    grad_weight, grad_weights, init_model, neuron_count_for_frequency,
                    relocate_degenerate, step, train)
from .room import (FieldSamples, ImageSource, MicArray, RoomSpec, SourceSpec, add_noise,
                   enumerate_images, mic_count_rule, place_mics_circular, place_mics_random,
                   simulate_field)
from .harmonics import (HarmonicModel, RankDeficiencyWarning, bessel_j, eval_harmonics,
                        fit_harmonics, truncation_order)
from .metrics import MetricsRecord, mac, make_eval_grid, nmse, nmse_l2, nse_map
from .scenario import Scenario, load_scenario, reference_scenario, save_scenario
from .gradcheck import run_gradcheck
