import numpy as np
import pytest

from bandbraid import numerics, reconstruct
from bandbraid.errors import IncompleteSettings
from bandbraid.reconstruct import (BlochAngles2, BlochAngles4, bloch_angles_2band,
                                   bloch_angles_4band, canonical_gauge,
                                   conditional_expectations_4band,
                                   pauli_expectations_2band, reconstruct_2band,
                                   reconstruct_4band, reconstruct_from_records)
from bandbraid.twister import TwisterSpec, build_hamiltonian

from conftest import POINT_HOPF_2B, records_from_state


def state_4band(th_a, th_b, th_ab, ph_a, ph_b, ph_ab):
    return np.array([
        np.cos(th_a / 2) * np.cos(th_ab / 2) * np.exp(1j * (ph_a + ph_ab)),
        np.sin(th_a / 2) * np.cos(th_ab / 2) * np.exp(1j * ph_ab),
        np.cos(th_b / 2) * np.sin(th_ab / 2) * np.exp(1j * ph_b),
        np.sin(th_b / 2) * np.sin(th_ab / 2),
    ])


# -- two-band -------------------------------------------------------------------

def test_pauli_expectations_basis_states():
    recs = records_from_state(np.array([1.0, 0.0]), 2)
    assert pauli_expectations_2band(recs) == pytest.approx((0.0, 0.0, 1.0), abs=1e-12)
    recs = records_from_state(np.array([1.0, 1.0]) / np.sqrt(2), 2)
    assert pauli_expectations_2band(recs) == pytest.approx((1.0, 0.0, 0.0), abs=1e-12)


def test_pauli_expectations_incomplete():
    recs = records_from_state(np.array([1.0, 0.0]), 2)[:2]
    with pytest.raises(IncompleteSettings):
        pauli_expectations_2band(recs)


def test_bloch_angles_2band_examples():
    a = bloch_angles_2band(0.0, 0.0, 1.0)
    assert a.theta == 0.0 and a.phi == 0.0 and a.phi_degenerate
    a = bloch_angles_2band(1.0, 0.0, 0.0)
    assert a.theta == pytest.approx(np.pi / 2) and a.phi == 0.0
    a = bloch_angles_2band(0.0, -1.0, 0.0)
    assert a.phi == pytest.approx(-np.pi / 2)


def test_reconstruct_2band_poles():
    s = reconstruct_2band(BlochAngles2(theta=0.0, phi=0.0))
    assert np.allclose(s.amplitudes, [1.0, 0.0])
    s = reconstruct_2band(BlochAngles2(theta=np.pi, phi=1.3))
    assert np.allclose(s.amplitudes, [0.0, 1.0], atol=1e-12)  # gauge-fixed


def test_two_band_round_trip():
    rng = np.random.default_rng(21)
    for _ in range(50):
        theta = rng.uniform(0.05, np.pi - 0.05)
        phi = rng.uniform(-np.pi, np.pi) * 0.999
        state = reconstruct_2band(BlochAngles2(theta=theta, phi=phi)).amplitudes
        sx, sy, sz = reconstruct.expectations_from_state_2band(state)
        back = bloch_angles_2band(sx, sy, sz)
        assert back.theta == pytest.approx(theta, abs=1e-9)
        assert back.phi == pytest.approx(phi, abs=1e-9)


def test_two_band_reconstruction_consistency():
    rng = np.random.default_rng(22)
    for _ in range(50):
        psi = rng.normal(size=2) + 1j * rng.normal(size=2)
        psi = psi / np.linalg.norm(psi)
        recs = records_from_state(psi, 2)
        got = reconstruct_from_records(2, recs).amplitudes
        assert abs(np.vdot(got, psi)) >= 1 - 1e-8


# -- four-band -------------------------------------------------------------------

def test_conditional_expectations_product_state():
    recs = records_from_state(np.array([1.0, 0, 0, 0]), 4)
    cond = conditional_expectations_4band(recs)
    assert cond.a["z"] == pytest.approx(1.0)
    assert cond.pmab["z"] == pytest.approx(1.0)
    assert "empty_sector_B" in cond.flags


def test_conditional_expectations_uniform():
    recs = records_from_state(np.ones(4) / 2.0, 4)
    cond = conditional_expectations_4band(recs)
    assert cond.pmab["z"] == pytest.approx(0.0, abs=1e-12)


def test_conditional_expectations_incomplete():
    recs = records_from_state(np.ones(4) / 2.0, 4)
    recs = [r for r in recs if r.setting != "B:y"]
    with pytest.raises(IncompleteSettings):
        conditional_expectations_4band(recs)


def test_reconstruct_4band_corners():
    s = reconstruct_4band(BlochAngles4(0, 0, 0, 0, 0, 0))
    assert np.allclose(s.amplitudes, [1, 0, 0, 0])
    s = reconstruct_4band(BlochAngles4(0, np.pi, np.pi, 0, 0, 0))
    assert np.allclose(s.amplitudes, [0, 0, 0, 1], atol=1e-12)


def test_reconstruct_4band_unit_norm():
    rng = np.random.default_rng(27)
    for _ in range(30):
        ang = BlochAngles4(*rng.uniform(0, np.pi, 3), *rng.uniform(-np.pi, np.pi, 3))
        assert np.linalg.norm(reconstruct_4band(ang).amplitudes) == pytest.approx(1.0, abs=1e-12)


def test_four_band_reference_angle_round_trip():
    angles = (np.pi / 3, np.pi / 4, np.pi / 5, 0.3, -0.7, 1.1)
    psi = state_4band(*angles)
    cond = conditional_expectations_4band(records_from_state(psi, 4))
    back = bloch_angles_4band(cond)
    got = (back.theta_a, back.theta_b, back.theta_ab, back.phi_a, back.phi_b, back.phi_ab)
    assert np.allclose(got, angles, atol=1e-9)


def test_four_band_reconstruction_consistency():
    rng = np.random.default_rng(33)
    for _ in range(100):
        psi = rng.normal(size=4) + 1j * rng.normal(size=4)
        psi = psi / np.linalg.norm(psi)
        got = reconstruct_from_records(4, records_from_state(psi, 4)).amplitudes
        assert abs(np.vdot(got, psi)) >= 1 - 1e-8


def test_gauge_idempotent():
    rng = np.random.default_rng(35)
    psi = rng.normal(size=4) + 1j * rng.normal(size=4)
    once = canonical_gauge(psi)
    assert np.array_equal(once, canonical_gauge(once))
    assert once[-1].imag == pytest.approx(0.0, abs=1e-15) and once[-1].real >= 0


def test_exact_pipeline_fidelity_spot_check(hopf_run):
    spec = TwisterSpec.concrete(2, *POINT_HOPF_2B)
    for ki in (0, 25, 50, 75):
        k = hopf_run.k_grid[ki]
        dec = numerics.eig(build_hamiltonian(spec, k))
        for band in range(2):
            state = hopf_run.states[band][ki].amplitudes
            best = max(abs(np.vdot(state, dec.right[:, b])) for b in range(2))
            assert best > 0.999


def test_states_round_trip(tmp_path, hopf_run):
    states = hopf_run.states[0][:5]
    path = tmp_path / "states.txt"
    reconstruct.save_states(path, states)
    back = reconstruct.load_states(path)
    assert len(back) == 5
    for a, b in zip(states, back):
        assert a.k == b.k and a.band == b.band
        assert np.array_equal(a.amplitudes, b.amplitudes)
