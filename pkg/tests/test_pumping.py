"""Tests for long-time pumping averages: iterated, spectral, closed-form."""

import numpy as np
import pytest

import oracle_refs

from zmaplab import (
    DimensionMismatch,
    GeometricAngles,
    PopulationDistribution,
    PumpingGridResult,
    SpinSpecies,
    closed_spin1_arrays,
    closed_spin_half_arrays,
    dephasing_scan,
    diagonal_ensemble,
    extract_angles,
    iterated_average,
    pg_closed_form_spin1,
    pg_closed_form_spin_half,
    pumping_grid,
    random_unitary,
    resonance_flag,
    rotation_angle,
    su2_cycle_operator,
    su3_cycle_operator,
)
from zmaplab.pumping import cesaro_populations_batch


def u2(theta, phi):
    return su2_cycle_operator(GeometricAngles(theta=theta, phi=phi))


def u3(theta, phi):
    return su3_cycle_operator(GeometricAngles(theta=theta, phi=phi))


# ------------------------------------------------------------ iterated route


def test_iterated_half_turn_two_cycles():
    # populations alternate 1, 0; the two-cycle average is exactly 1/2
    dist = iterated_average(u2(np.pi, 0.3), "+1/2", n=2)
    assert isinstance(dist, PopulationDistribution)
    assert dist.n_cycles == 2
    assert dist.probability("-1/2") == pytest.approx(0.5, abs=1e-15)


def test_iterated_identity_stays_put():
    dist = iterated_average(np.eye(3, dtype=complex), "+1", n=17)
    assert dist.probability("+1") == pytest.approx(1.0, abs=1e-15)
    assert dist.probability("-1") == 0.0


def test_iterated_quarter_turn_four_cycles():
    dist = iterated_average(u2(np.pi / 2, 0.0), "+1/2", n=4)
    assert dist.probability("-1/2") == pytest.approx(0.5, abs=1e-15)


def test_iterated_su3_half_turn():
    dist = iterated_average(u3(np.pi, 0.0), "+1", n=100)
    assert dist.probability("-1") == pytest.approx(0.5, abs=1e-12)
    assert dist.probability("0") == pytest.approx(0.0, abs=1e-12)


def test_iterated_rejects_bad_inputs():
    with pytest.raises(ValueError):
        iterated_average(np.eye(2, dtype=complex), "-1/2", n=0)
    with pytest.raises(DimensionMismatch):
        iterated_average(np.eye(2, dtype=complex), "-1", n=5)


def test_iterated_distribution_normalizes():
    dist = iterated_average(u2(0.8, 0.4), "+1/2", n=9)
    assert dist.species is SpinSpecies.HALF
    assert np.sum(dist.probabilities) == pytest.approx(1.0, abs=1e-12)


def test_cesaro_batch_matches_reference_loop():
    rng = np.random.default_rng(61)
    for dim in (2, 3):
        mats = np.stack([random_unitary(dim, rng) for _ in range(20)])
        got = cesaro_populations_batch(mats, 0, 137)
        for c in range(20):
            ref = oracle_refs.cesaro(mats[c], 0, 137)
            assert np.max(np.abs(got[c] - ref)) <= 1e-12


# ---------------------------------------------------------- diagonal ensemble


def test_diagonal_ensemble_frozen_value():
    dist = diagonal_ensemble(u2(np.pi / 2, 0.5), "+1/2")
    assert dist.n_cycles == np.inf
    assert dist.probability("-1/2") == pytest.approx(0.406554025881195, rel=1e-12)


def test_diagonal_ensemble_identity():
    dist = diagonal_ensemble(np.eye(3, dtype=complex), "+1")
    assert dist.probability("+1") == pytest.approx(1.0, abs=1e-12)


def test_diagonal_ensemble_su3_half_turn_degenerate_merge():
    dist = diagonal_ensemble(u3(np.pi, 0.4), "+1")
    assert dist.probability("-1") == pytest.approx(0.5, abs=1e-12)
    assert dist.probability("0") == pytest.approx(0.0, abs=1e-12)


def test_diagonal_ensemble_matches_reference_average():
    rng = np.random.default_rng(71)
    for dim in (2, 3):
        species = SpinSpecies.HALF if dim == 2 else SpinSpecies.ONE
        for _ in range(60):
            u = random_unitary(dim, rng)
            dist = diagonal_ensemble(u, species.levels[0])
            ref = oracle_refs.spectral_average(u, 0)
            assert np.max(np.abs(dist.probabilities - ref)) <= 1e-9


def test_diagonal_ensemble_is_cesaro_limit():
    # the spectral value is the n -> infinity limit of the iterated average
    rng = np.random.default_rng(3)
    t, p = rng.uniform(0.3, 2.8), rng.uniform(-2.5, 2.5)
    lim = diagonal_ensemble(u3(t, p), "+1").probability("-1")
    run = iterated_average(u3(t, p), "+1", n=200000).probability("-1")
    assert abs(run - lim) <= 2e-3


# ----------------------------------------------------------------- closed form


def test_closed_spin1_at_theta_pi_is_flat():
    m1, z, p1 = closed_spin1_arrays(np.pi, 1.234)
    assert float(m1) == pytest.approx(0.375, abs=1e-12)
    assert float(z) == pytest.approx(0.25, abs=1e-12)
    assert float(p1) == pytest.approx(0.375, abs=1e-12)


def test_closed_forms_at_theta_zero():
    m1, z, p1 = closed_spin1_arrays(0.0, 0.7)
    assert (float(m1), float(z), float(p1)) == (0.0, 0.0, 1.0)
    assert float(closed_spin_half_arrays(0.0, 0.7)) == 0.0


def test_closed_forms_match_reference():
    rng = np.random.default_rng(13)
    for _ in range(300):
        t = rng.uniform(0.0, np.pi)
        p = rng.uniform(-np.pi, np.pi)
        assert float(closed_spin_half_arrays(t, p)) == pytest.approx(
            oracle_refs.closed_half(t, p), rel=1e-12, abs=1e-15
        )
        got = closed_spin1_arrays(t, p)
        want = oracle_refs.closed_one(t, p)
        for g, w in zip(got, want):
            assert float(g) == pytest.approx(w, rel=1e-12, abs=1e-15)


def test_closed_spin1_normalizes():
    t = np.linspace(0.0, np.pi, 101)
    p = np.linspace(-np.pi, np.pi, 101)
    tt, pp = np.meshgrid(t, p)
    m1, z, p1 = closed_spin1_arrays(tt, pp)
    total = m1 + z + p1
    assert np.max(np.abs(total - 1.0)) <= 1e-12
    for arr in (m1, z, p1):
        assert np.all(arr >= -1e-15)
        assert np.all(arr <= 1.0 + 1e-15)


def test_closed_half_is_pi_periodic_spin1_is_not():
    t = 1.3
    p = np.linspace(-np.pi, 0.0, 200)
    h0 = closed_spin_half_arrays(t, p)
    h1 = closed_spin_half_arrays(t, p + np.pi)
    assert np.max(np.abs(h0 - h1)) <= 1e-12
    a0 = closed_spin1_arrays(t, p)[2]
    a1 = closed_spin1_arrays(t, p + np.pi)[2]
    assert np.max(np.abs(a0 - a1)) > 0.01


def test_scalar_wrappers():
    ga = GeometricAngles(theta=np.pi / 2, phi=0.5)
    assert pg_closed_form_spin_half(ga) == pytest.approx(0.406554025881195, rel=1e-12)
    trip = pg_closed_form_spin1(GeometricAngles(theta=np.pi, phi=0.2))
    assert trip == pytest.approx((0.375, 0.25, 0.375), abs=1e-12)


def test_closed_form_equals_diagonal_ensemble_spin_half():
    rng = np.random.default_rng(29)
    for _ in range(150):
        t = rng.uniform(0.05, np.pi)
        p = rng.uniform(-np.pi, np.pi)
        lim = diagonal_ensemble(u2(t, p), "+1/2").probability("-1/2")
        assert abs(lim - float(closed_spin_half_arrays(t, p))) <= 1e-9


def test_closed_form_equals_diagonal_ensemble_spin1():
    rng = np.random.default_rng(37)
    for _ in range(100):
        t = rng.uniform(0.05, np.pi)
        p = rng.uniform(-np.pi, np.pi)
        dist = diagonal_ensemble(u3(t, p), "+1")
        m1, z, p1 = closed_spin1_arrays(t, p)
        assert abs(dist.probability("+1") - float(p1)) <= 1e-9
        assert abs(dist.probability("0") - float(z)) <= 1e-9
        assert abs(dist.probability("-1") - float(m1)) <= 1e-9


def test_spectral_flip_matches_reference_axis_route():
    # two independent derivations of the same number for arbitrary SU(2)
    rng = np.random.default_rng(83)
    for _ in range(200):
        u = random_unitary(2, rng)
        u = u / np.sqrt(np.linalg.det(u))
        mine = diagonal_ensemble(u, "+1/2").probability("-1/2")
        ref = oracle_refs.pflip_spectral(u)
        assert abs(mine - ref) <= 1e-9


# ------------------------------------------------------ resonance bookkeeping


def test_rotation_angle_definitions():
    # spin-half: cos(a/2) = cos(t/2) cos(p); spin-1: cos(a/2) = cos(t/2) cos(p/2)
    t, p = 1.1, 0.6
    a_half = rotation_angle(SpinSpecies.HALF, t, p)
    a_one = rotation_angle(SpinSpecies.ONE, t, p)
    assert a_half == pytest.approx(2 * np.arccos(np.cos(t / 2) * np.cos(p)), abs=1e-12)
    assert a_one == pytest.approx(2 * np.arccos(np.cos(t / 2) * np.cos(p / 2)), abs=1e-12)
    assert rotation_angle(SpinSpecies.ONE, t, 0.0) == pytest.approx(t, abs=1e-12)


def test_resonance_flag_at_half_turn():
    assert resonance_flag(SpinSpecies.HALF, np.pi, 0.7) is True
    assert resonance_flag(SpinSpecies.ONE, np.pi, 0.7) is True


def test_resonance_flag_off_resonance():
    # alpha = pi - pi/16 sits at least 0.19 from every 2*pi*(p/q), q <= 8
    assert resonance_flag(SpinSpecies.HALF, np.pi - np.pi / 16, 0.0) is False


def test_resonance_flag_window_and_broadcast():
    assert resonance_flag(SpinSpecies.HALF, np.pi - 0.01, 0.0) is True
    assert resonance_flag(SpinSpecies.HALF, np.pi - 0.01, 0.0, window=0.001) is False
    flags = resonance_flag(
        SpinSpecies.ONE, np.array([[np.pi, np.pi - np.pi / 16]]), np.array([[0.0, 0.0]])
    )
    assert flags.shape == (1, 2)
    assert flags.dtype == bool
    assert flags[0, 0] and not flags[0, 1]


# ----------------------------------------------------------------- grid sweep


def test_grid_single_cell_closed_form():
    res = pumping_grid(SpinSpecies.ONE, "-1", [np.pi], [0.0], "closed_form")
    assert isinstance(res, PumpingGridResult)
    assert res.method == "closed_form"
    assert res.channel == "-1"
    assert res.values.shape == (1, 1)
    assert res.values[0, 0] == pytest.approx(0.375, abs=1e-12)
    assert bool(res.resonant[0, 0]) is True


def test_grid_single_cell_iterated_label_and_value():
    res = pumping_grid(SpinSpecies.ONE, "-1", [np.pi], [0.0], "iterated", n_cycles=100)
    assert res.method == "iterated_n100"
    assert res.values[0, 0] == pytest.approx(0.5, abs=1e-12)


def test_grid_theta_zero_row_is_zero():
    res = pumping_grid(SpinSpecies.HALF, "-1/2", [0.0], [1.0], "closed_form")
    assert res.values[0, 0] == 0.0
    res = pumping_grid(SpinSpecies.ONE, "-1", [0.0], [1.0], "diagonal_ensemble")
    assert res.values[0, 0] == pytest.approx(0.0, abs=1e-12)


def test_grid_methods_agree_off_resonance():
    tg = [0.9, 1.7]
    pg = [-2.1, 0.4, 1.3]
    a = pumping_grid(SpinSpecies.ONE, "-1", tg, pg, "closed_form")
    b = pumping_grid(SpinSpecies.ONE, "-1", tg, pg, "diagonal_ensemble")
    assert np.max(np.abs(a.values - b.values)) <= 1e-9


def test_grid_channel_complement_spin_half():
    tg = [0.9]
    pg = [0.3, 2.0]
    flip = pumping_grid(SpinSpecies.HALF, "-1/2", tg, pg, "closed_form")
    stay = pumping_grid(SpinSpecies.HALF, "+1/2", tg, pg, "closed_form")
    assert np.allclose(flip.values + stay.values, 1.0, atol=1e-12)


def test_grid_is_deterministic_across_workers():
    tg = np.linspace(0.2, 3.0, 6)
    pg = np.linspace(-3.0, 3.0, 7)
    for method, n in (("iterated", 150), ("diagonal_ensemble", 0), ("closed_form", 0)):
        one = pumping_grid(SpinSpecies.ONE, "-1", tg, pg, method, n_cycles=max(n, 1), workers=1)
        four = pumping_grid(SpinSpecies.ONE, "-1", tg, pg, method, n_cycles=max(n, 1), workers=4)
        assert np.array_equal(one.values, four.values)
        assert np.array_equal(one.resonant, four.resonant)


def test_grid_rejects_bad_inputs():
    with pytest.raises(ValueError):
        pumping_grid(SpinSpecies.HALF, "-1/2", [], [0.0], "closed_form")
    with pytest.raises(ValueError):
        pumping_grid(SpinSpecies.HALF, "-1/2", [4.0], [0.0], "closed_form")
    with pytest.raises(ValueError):
        pumping_grid(SpinSpecies.HALF, "-1/2", [1.0], [0.0], "not_a_method")
    with pytest.raises(DimensionMismatch):
        pumping_grid(SpinSpecies.HALF, "-1", [1.0], [0.0], "closed_form")


# ------------------------------------------------------------- dephasing scan


def test_dephasing_spread_vanishes_at_theta_pi():
    pg = np.linspace(-np.pi, np.pi, 400)
    for channel in ("+1", "0", "-1"):
        mean, spread = dephasing_scan(SpinSpecies.ONE, channel, np.pi, pg)
        assert spread == 0.0
    mean, spread = dephasing_scan(SpinSpecies.ONE, "-1", np.pi, pg)
    assert mean == pytest.approx(0.375, abs=1e-12)


def test_dephasing_near_pi_is_flat():
    pg = np.linspace(-np.pi, np.pi, 400)
    mean, spread = dephasing_scan(SpinSpecies.ONE, "-1", 3.1, pg)
    assert spread / mean <= 2e-3


def test_dephasing_mid_theta_is_not_flat():
    pg = np.linspace(-np.pi, np.pi, 400)
    mean, spread = dephasing_scan(SpinSpecies.HALF, "-1/2", np.pi / 2, pg)
    assert spread / mean > 0.5


def test_dephasing_spread_decreases_with_theta():
    pg = np.linspace(-np.pi, np.pi, 400)
    spreads = [
        dephasing_scan(SpinSpecies.ONE, "-1", t, pg)[1]
        for t in (1.0, 1.8, 2.4, 2.9, 3.1)
    ]
    assert all(a > b for a, b in zip(spreads, spreads[1:]))
