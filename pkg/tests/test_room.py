"""Image source enumeration, field simulation, mic placement, and noise."""

import numpy as np
import pytest

import pointneuron as pn
from pointneuron import (FieldSamples, RoomSpec, SourceSpec, add_noise,
                         enumerate_images, green_free_space, mic_count_rule,
                         place_mics_circular, place_mics_random, simulate_field)


ROOM = RoomSpec()   # 6 x 4 x 4, beta = 0.8 on the x/y walls, 0 on the z walls


def test_room_spec_validation():
    with pytest.raises(ValueError):
        RoomSpec(dimensions=(0.0, 4.0, 4.0))
    with pytest.raises(ValueError):
        RoomSpec(reflection=(0.8,) * 5)
    with pytest.raises(ValueError):
        RoomSpec(reflection=(1.5, 0.8, 0.8, 0.8, 0.0, 0.0))


def test_first_order_images_hand_check():
    # walls sit at x=+-3, y=+-2, z=+-2; a first-order image is the source
    # mirrored in one wall, weighted by that wall's coefficient
    src = SourceSpec((0.5, 0.3, 0.0))
    images = enumerate_images(ROOM, src, max_order=1)
    assert len(images) == 7
    direct = images[0]
    assert direct.order == 0 and direct.amplitude == 1.0
    np.testing.assert_allclose(direct.position, [0.5, 0.3, 0.0])

    got = {(round(i.position[0], 9), round(i.position[1], 9), round(i.position[2], 9)):
           i.amplitude for i in images[1:]}
    expect = {(-6.5, 0.3, 0.0): 0.8, (5.5, 0.3, 0.0): 0.8,
              (0.5, -4.3, 0.0): 0.8, (0.5, 3.7, 0.0): 0.8,
              (0.5, 0.3, -4.0): 0.0, (0.5, 0.3, 4.0): 0.0}
    assert got == expect


def test_image_count_grows_with_order():
    src = SourceSpec((0.5, 0.3, 0.0))
    n = [len(enumerate_images(ROOM, src, o)) for o in range(4)]
    assert n[0] == 1
    assert all(a < b for a, b in zip(n, n[1:]))
    with pytest.raises(ValueError):
        enumerate_images(ROOM, src, -1)


def test_zero_reflection_equals_free_space():
    room = RoomSpec(reflection=(0.0,) * 6)
    sources = [SourceSpec((1.0, 0.5, 0.2), 2.0 - 1.0j), SourceSpec((-2.0, 1.0, -0.5))]
    pts = np.random.default_rng(4).uniform(-0.4, 0.4, size=(10, 3))
    k = 5.0
    sim = simulate_field(room, sources, pts, k, max_order=10)
    direct = sum(s.strength * green_free_space(pts, s.position, k) for s in sources)
    np.testing.assert_allclose(sim.pressures, direct, rtol=1e-12)


def test_field_self_convergence_in_order():
    # truncation error decays geometrically (~beta per reflection order): the
    # default order 30 sits well under 1e-3 relative truncation at 900 Hz
    scen = pn.reference_scenario()
    k = pn.wavenumber(900.0)
    pts = place_mics_circular(scen.target_center, scen.target_radius, 16).positions
    fields = {o: simulate_field(scen.room, scen.sources, pts, k, max_order=o).pressures
              for o in (20, 25, 30, 40)}
    rel = {o: np.linalg.norm(fields[o] - fields[40]) / np.linalg.norm(fields[40])
           for o in (20, 25, 30)}
    assert rel[20] > rel[25] > rel[30]
    assert rel[25] <= 1e-3
    assert rel[30] <= 3e-4


def test_field_reciprocity():
    # swapping source and receiver leaves the reverberant Green function unchanged
    a, b = (1.2, 0.7, 0.3), (-1.5, -0.8, -0.6)
    k = 9.0
    p_ab = simulate_field(ROOM, [SourceSpec(a)], [b], k, max_order=12).pressures[0]
    p_ba = simulate_field(ROOM, [SourceSpec(b)], [a], k, max_order=12).pressures[0]
    assert p_ab == pytest.approx(p_ba, rel=1e-10)


def test_field_samples_validation():
    with pytest.raises(ValueError):
        FieldSamples(1.0, np.zeros((3, 3)), np.zeros(2, dtype=complex))


def test_circular_placement():
    arr = place_mics_circular((-1.0, 0.5, 0.0), 1.0, 75)
    assert arr.positions.shape == (75, 3)
    radii = np.hypot(arr.positions[:, 0] + 1.0, arr.positions[:, 1] - 0.5)
    np.testing.assert_allclose(radii, 1.0, rtol=1e-12)
    np.testing.assert_allclose(arr.positions[0], [0.0, 0.5, 0.0], atol=1e-12)
    assert len(np.unique(arr.positions.round(9), axis=0)) == 75


def test_random_placement_statistics():
    arr = place_mics_random((0.0, 0.0, 0.0), 1.0, 75, seed=3)
    radii = np.hypot(arr.positions[:, 0], arr.positions[:, 1])
    assert np.all(radii <= 1.0)
    d = np.linalg.norm(arr.positions[:, None] - arr.positions[None, :], axis=2)
    assert np.min(d[np.triu_indices(75, 1)]) >= 0.01
    # area-uniform sampling has mean radius 2R/3
    many = place_mics_random((0.0, 0.0, 0.0), 1.0, 5000, seed=9, min_separation=0.0)
    mean_r = np.mean(np.hypot(many.positions[:, 0], many.positions[:, 1]))
    assert mean_r == pytest.approx(2.0 / 3.0, rel=0.01)
    # deterministic per seed
    again = place_mics_random((0.0, 0.0, 0.0), 1.0, 75, seed=3)
    np.testing.assert_array_equal(arr.positions, again.positions)


def test_mic_count_rule():
    # N = ceil(k_max R) = 37 at 2 kHz with R = 1 m, hence Q = 75
    assert mic_count_rule(2000.0, 1.0, 343.0) == 75
    assert mic_count_rule(100.0, 1.0, 343.0) == 2 * int(np.ceil(pn.wavenumber(100.0))) + 1


def test_noise_hits_requested_snr():
    rng = np.random.default_rng(6)
    q = 20000
    clean = FieldSamples(1.0, rng.normal(size=(q, 3)),
                         rng.normal(size=q) + 1j * rng.normal(size=q))
    for snr in (10.0, 20.0, 40.0):
        noisy = add_noise(clean, snr, seed=1)
        noise = noisy.pressures - clean.pressures
        measured = 10 * np.log10(np.mean(np.abs(clean.pressures) ** 2)
                                 / np.mean(np.abs(noise) ** 2))
        assert measured == pytest.approx(snr, abs=0.1)


def test_noise_sentinels_and_determinism():
    clean = FieldSamples(1.0, np.zeros((4, 3)) + [[1, 0, 0]], np.array([1, 2, 3, 4], dtype=complex))
    for snr in (None, np.inf):
        out = add_noise(clean, snr, seed=0)
        np.testing.assert_array_equal(out.pressures, clean.pressures)
    a = add_noise(clean, 20.0, seed=5)
    b = add_noise(clean, 20.0, seed=5)
    np.testing.assert_array_equal(a.pressures, b.pressures)
    with pytest.raises(ValueError):
        add_noise(FieldSamples(1.0, [[1.0, 0, 0]], [0.0 + 0j]), 20.0, seed=0)
