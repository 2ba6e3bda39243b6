"""Why a circular array breaks the harmonics baseline at certain frequencies.

When every microphone sits at radius R, the n-th basis column is J_n(kR) times
a unit phasor: wherever J_n(kR) crosses zero that mode becomes unobservable
and the least-squares fit blows up. Random in-disk placement removes the
degeneracy. Run: python3 demos/03_bessel_zero_failure.py  (~1 minute)
"""

import warnings

import numpy as np
from scipy import special

import pointneuron as pn
from pointneuron.harmonics import fit_harmonics, eval_harmonics, truncation_order
from pointneuron.room import simulate_field, add_noise, place_mics_random

scen = pn.reference_scenario()
R = scen.target_radius
grid = pn.make_eval_grid(scen.target_center, R, scen.eval_spacing)
zeros = np.concatenate([special.jn_zeros(n, 25) for n in (0, 1, 2)])

placements = {
    "circular": scen.mic_array(),
    "random": place_mics_random(scen.target_center, R, scen.n_mics, seed=42),
}

print("freq    kR     nearest-zero  circular      random")
warnings.simplefilter("ignore")
for freq in scen.frequencies:
    k = pn.wavenumber(freq)
    truth = simulate_field(scen.room, scen.sources, grid, k, scen.max_order)
    gap = np.min(np.abs(k * R - zeros))
    row = [f"{freq:5.0f}  {k * R:6.2f}  {gap:6.3f}"]
    for kind, mics in placements.items():
        clean = simulate_field(scen.room, scen.sources, mics.positions, k, scen.max_order)
        noisy = add_noise(clean, scen.snr_db, seed=7)
        model = fit_harmonics(noisy.positions, noisy.pressures, k,
                              scen.target_center, truncation_order(k, R))
        est = eval_harmonics(model, grid).pressures
        row.append(f"{pn.nmse(truth.pressures, est):+7.2f} dB")
    marker = "  <- near a Bessel zero" if gap < 0.05 else ""
    print("  ".join(row) + marker)
