"""Reconstruct a reverberant sound field inside the reference room.

Simulates the 6 x 4 x 4 m room with five sources at 500 Hz, measures 75 noisy
microphones on the 1 m target circle, trains the point-source network, and
compares it with the cylindrical-harmonics least-squares baseline on a dense
interior grid. Run: python3 demos/02_room_reconstruction.py  (~1 minute)
"""

import numpy as np

import pointneuron as pn
from pointneuron.harmonics import fit_harmonics, eval_harmonics, truncation_order
from pointneuron.room import simulate_field, add_noise
from pointneuron.runner import (default_init_region, experiment_neuron_count,
                                experiment_train_config)

freq = 500.0
scen = pn.reference_scenario()
k = pn.wavenumber(freq)

mics = scen.mic_array()
clean = simulate_field(scen.room, scen.sources, mics.positions, k, scen.max_order)
noisy = add_noise(clean, scen.snr_db, seed=1)
obs = pn.Observations(noisy.positions, noisy.pressures)

grid = pn.make_eval_grid(scen.target_center, scen.target_radius, scen.eval_spacing)
truth = simulate_field(scen.room, scen.sources, grid, k, scen.max_order)
print(f"{freq:.0f} Hz, {mics.positions.shape[0]} mics at {scen.snr_db} dB SNR, "
      f"{grid.shape[0]} evaluation points")

# point-source network
cfg = experiment_train_config(rng_seed=0)
model, history = pn.train(obs, k, cfg, default_init_region(scen),
                          n_neurons=experiment_neuron_count(freq))
est_pn = pn.forward(model, grid)
print(f"point neuron : NMSE {pn.nmse(truth.pressures, est_pn):+6.2f} dB, "
      f"MAC {pn.mac(truth.pressures, est_pn):.4f} "
      f"({len(history.total) - 1} iterations, {len(history.relocations)} relocations)")

# harmonics baseline on the same observations
hmodel = fit_harmonics(obs.positions, obs.pressures, k, scen.target_center,
                       truncation_order(k, scen.target_radius))
est_h = eval_harmonics(hmodel, grid).pressures
print(f"harmonics    : NMSE {pn.nmse(truth.pressures, est_h):+6.2f} dB, "
      f"MAC {pn.mac(truth.pressures, est_h):.4f} "
      f"(order {hmodel.order}, condition {hmodel.condition_number:.1e})")

# per-point error map summary for the network
nse = pn.nse_map(truth.pressures, est_pn)
print(f"NSE map      : median {np.nanmedian(nse):+.1f} dB, "
      f"90th percentile {np.nanpercentile(nse, 90):+.1f} dB")
