"""Kerr parametric oscillator: landscape, steady states, stability, variances.

Hand-derived oracle values used below (U = 1, G = 0.5, kappa = 0.3,
delta = 1 unless stated):

* branch photon numbers n = (delta -+ s)/U with s = sqrt(0.25 - 0.09)
  = 0.4, so n1 = 0.6 and n3 = 1.4;
* large-branch amplitude: alpha3^2 = n3 * G*((delta - U n3) - i kappa)
  / |G|^2 = 1.4 * (-0.8 - 0.6i) = -1.12 - 0.84i;
* NP eigenvalues -kappa +- sqrt(|G|^2 - delta^2) = -0.3 +- 0.8660254...i,
  PPS eigenvalues -kappa +- sqrt(|G + U a^2|^2 - (delta - 2Un)^2):
  both branches give |G + U a^2|^2 = 1.09, so
  PPS3: -0.3 +- i sqrt(3.24 - 1.09) = -0.3 +- 1.4662878...i (stable),
  PPS1: -0.3 +- sqrt(1.09 - 0.04)   = -0.3 +- 1.0246950...   (unstable);
* NP variances (den = delta^2 - |G|^2 + kappa^2 = 0.84):
  Var_Re = 1.59/0.84 = 53/28, Var_Im = 0.59/0.84 = 59/84, and the
  Lyapunov cross-covariance solves to -5/28 (worked by hand from
  M K + K M^T + 2 kappa I = 0 with M = [[-0.3, -1.5], [0.5, -0.3]]).
"""

import numpy as np
import pytest

from dpt.kpo import (
    KpoParams,
    KpoState,
    closed_excitation_form,
    closed_ground_state,
    default_seeds,
    fluctuation_eigenvalues,
    fluctuation_matrix,
    keldysh_fluctuation_form,
    mean_field_rhs,
    mf_energy,
    np_variance_closed_form,
    open_steady_states,
    residual_and_jacobian,
    stability_report,
    variance_lyapunov,
)
from dpt.numerics import StabilityError, ValidationError, eig, newton_multistart

RUN = KpoParams(delta=1.0, kerr=1.0, pump=0.5, kappa=0.3)


def test_params_validation():
    with pytest.raises(ValidationError):
        KpoParams(delta=0.0, kerr=0.0, pump=0.1)
    with pytest.raises(ValidationError):
        KpoParams(delta=0.0, kerr=1.0, pump=0.1, kappa=-0.1)
    with pytest.raises(ValidationError):
        KpoParams(delta=np.nan, kerr=1.0, pump=0.1)


def test_open_steady_state_census():
    states = open_steady_states(RUN)
    # large-amplitude (always-stable) pair is emitted before the small one
    assert [s.branch for s in states] == [0, 3, 4, 1, 2]
    assert states[0].label == "NP" and states[0].alpha == 0.0
    for s in states:
        assert abs(mean_field_rhs(RUN, s.alpha)) <= 1e-10
    by_branch = {s.branch: s for s in states}
    # photon numbers and Z2 pairing
    assert abs(by_branch[1].alpha) ** 2 == pytest.approx(0.6, abs=1e-12)
    assert abs(by_branch[3].alpha) ** 2 == pytest.approx(1.4, abs=1e-12)
    assert by_branch[2].alpha == pytest.approx(-by_branch[1].alpha, abs=1e-14)
    assert by_branch[4].alpha == pytest.approx(-by_branch[3].alpha, abs=1e-14)
    assert by_branch[3].alpha ** 2 == pytest.approx(-1.12 - 0.84j, abs=1e-12)


def test_open_steady_state_regimes():
    # pump below loss: NP only
    assert len(open_steady_states(KpoParams(1.0, 1.0, 0.2, 0.3))) == 1
    # negative detuning pushes both photon numbers negative: NP only
    assert len(open_steady_states(KpoParams(-1.0, 1.0, 0.5, 0.3))) == 1
    # threshold |G| = kappa: the branches coincide, one pair only
    states = open_steady_states(KpoParams(1.0, 1.0, 0.3, 0.3))
    assert [s.branch for s in states] == [0, 3, 4]
    assert abs(states[1].alpha) ** 2 == pytest.approx(1.0, abs=1e-12)


def test_np_eigenvalues_frozen():
    np_state = open_steady_states(RUN)[0]
    eps = fluctuation_eigenvalues(RUN, np_state)
    assert eps[0] == pytest.approx(-0.3 + 0.8660254037844386j, abs=1e-14)
    assert eps[1] == pytest.approx(-0.3 - 0.8660254037844386j, abs=1e-14)


def test_pps_eigenvalues_frozen():
    by_branch = {s.branch: s for s in open_steady_states(RUN)}
    eps3 = fluctuation_eigenvalues(RUN, by_branch[3])
    assert eps3[0] == pytest.approx(-0.3 + 1.4662878298615183j, abs=1e-13)
    eps1 = fluctuation_eigenvalues(RUN, by_branch[1])
    assert np.all(eps1.imag == 0.0)
    assert eps1[0] == pytest.approx(-0.3 + 1.0246950765959598, abs=1e-13)
    assert eps1[1] == pytest.approx(-0.3 - 1.0246950765959598, abs=1e-13)


def test_closed_form_eigenvalues_match_jacobian():
    rng = np.random.default_rng(11)
    checked = 0
    while checked < 100:
        params = KpoParams(
            delta=rng.uniform(-2.0, 2.0),
            kerr=rng.choice([-1.0, 1.0]) * rng.uniform(0.2, 2.0),
            pump=rng.normal() + 1j * rng.normal(),
            kappa=rng.uniform(0.0, 1.0),
        )
        for state in open_steady_states(params):
            eps = fluctuation_eigenvalues(params, state)
            numeric = eig(fluctuation_matrix(params, state)).values
            assert np.allclose(eps, numeric, atol=1e-10)
            checked += 1


def test_stability_assignments():
    states = open_steady_states(RUN)
    rep = {s.branch: stability_report(RUN, s) for s in states}
    assert rep[0].stable  # |G|^2 < delta^2 + kappa^2
    assert rep[3].stable and rep[4].stable
    assert not rep[1].stable and not rep[2].stable
    assert rep[1].overdamped  # real-split spectrum with damping
    assert rep[3].covariance is not None
    assert rep[1].covariance is None
    # NP loses stability once |G|^2 > delta^2 + kappa^2
    hot = KpoParams(delta=0.2, kerr=1.0, pump=0.6, kappa=0.3)
    assert not stability_report(hot, open_steady_states(hot)[0]).stable


def test_np_variance_closed_form_frozen():
    var_re, var_im = np_variance_closed_form(RUN)
    assert var_re == pytest.approx(53.0 / 28.0, abs=1e-14)
    assert var_im == pytest.approx(59.0 / 84.0, abs=1e-14)
    cov = variance_lyapunov(RUN, open_steady_states(RUN)[0])
    assert cov[0, 0] == pytest.approx(var_re, abs=1e-12)
    assert cov[1, 1] == pytest.approx(var_im, abs=1e-12)
    assert cov[0, 1] == pytest.approx(-5.0 / 28.0, abs=1e-12)
    assert cov[1, 0] == pytest.approx(cov[0, 1], abs=1e-14)


def test_np_variance_special_points():
    # undriven vacuum is exactly (1, 1) regardless of kappa
    assert np_variance_closed_form(KpoParams(0.0, 1.0, 0.0, 0.4)) == (1.0, 1.0)
    # purely imaginary pump on resonance: squeezing is loss-limited
    var_re, var_im = np_variance_closed_form(KpoParams(0.0, 1.0, 0.2j, 0.4))
    assert var_re == pytest.approx(2.0, abs=1e-14)
    assert var_im == pytest.approx(2.0 / 3.0, abs=1e-14)


def test_np_variance_closed_vs_lyapunov_random():
    rng = np.random.default_rng(7)
    checked = 0
    while checked < 300:
        kappa = rng.uniform(0.05, 1.0)
        delta = rng.uniform(-2.0, 2.0)
        pump = rng.normal() + 1j * rng.normal()
        if abs(pump) ** 2 >= delta**2 + kappa**2 - 1e-6:
            continue
        params = KpoParams(delta, 1.0, pump, kappa)
        var_re, var_im = np_variance_closed_form(params)
        cov = variance_lyapunov(params, KpoState(0.0j, "NP", 0))
        assert abs(cov[0, 0] - var_re) <= 1e-10
        assert abs(cov[1, 1] - var_im) <= 1e-10
        checked += 1


def test_np_variance_unstable_raises():
    with pytest.raises(StabilityError):
        np_variance_closed_form(KpoParams(0.0, 1.0, 0.6, 0.3))
    with pytest.raises(StabilityError):
        variance_lyapunov(KpoParams(1.0, 1.0, 0.5, 0.0), KpoState(0.0j, "NP", 0))


def test_closed_ground_state_regimes():
    # deep NP side: only the NP, zero energy
    only = closed_ground_state(KpoParams(-1.0, 1.0, 0.5))
    assert len(only) == 1 and only[0].label == "NP" and only[0].energy == 0.0
    # boundary delta = -|G|: the pair has collapsed onto the NP
    assert len(closed_ground_state(KpoParams(-0.5, 1.0, 0.5))) == 1
    # broken side: pair first, NP kept as reference
    states = closed_ground_state(KpoParams(1.0, 1.0, 0.5))
    assert [s.branch for s in states] == [3, 4, 0]
    assert abs(states[0].alpha) ** 2 == pytest.approx(1.5, abs=1e-12)
    assert states[0].energy == pytest.approx(states[1].energy, abs=1e-14)
    assert states[0].energy == pytest.approx(-1.125, abs=1e-12)
    assert states[0].energy < states[2].energy
    # attractive Kerr mirrors the condition through sign(U)
    flipped = closed_ground_state(KpoParams(-1.0, -1.0, 0.5))
    assert [s.branch for s in flipped] == [3, 4, 0]
    assert abs(flipped[0].alpha) ** 2 == pytest.approx(1.5, abs=1e-12)


def test_conjugation_metamorphic_map():
    # alpha -> conj(alpha) maps solutions of (delta, U, G) onto solutions
    # of (-delta, -U, -conj(G)) with identical eigenvalue spectra
    rng = np.random.default_rng(23)
    for _ in range(25):
        params = KpoParams(
            delta=rng.uniform(-2.0, 2.0),
            kerr=rng.choice([-1.0, 1.0]) * rng.uniform(0.2, 2.0),
            pump=rng.normal() + 1j * rng.normal(),
            kappa=rng.uniform(0.0, 1.0),
        )
        mirror = KpoParams(
            -params.delta, -params.kerr, -np.conj(params.pump), params.kappa
        )
        states = open_steady_states(params)
        mirrored = open_steady_states(mirror)
        assert len(states) == len(mirrored)
        for s in states:
            partner = min(mirrored, key=lambda m: abs(m.alpha - np.conj(s.alpha)))
            assert partner.alpha == pytest.approx(np.conj(s.alpha), abs=1e-9)
            eps_a = fluctuation_eigenvalues(params, s)
            eps_b = fluctuation_eigenvalues(mirror, partner)
            assert np.allclose(eps_a, eps_b, atol=1e-9)


def test_stale_state_guard():
    state = open_steady_states(RUN)[3]
    other = KpoParams(delta=0.4, kerr=1.0, pump=0.5, kappa=0.3)
    with pytest.raises(ValidationError):
        fluctuation_matrix(other, state)
    with pytest.raises(ValidationError):
        fluctuation_eigenvalues(other, state)


def test_multistart_confirms_closed_form():
    residual, jacobian = residual_and_jacobian(RUN)
    roots = newton_multistart(residual, jacobian, default_seeds(RUN))
    states = open_steady_states(RUN)
    assert len(roots) == len(states)
    for s in states:
        target = np.array([s.alpha.real, s.alpha.imag])
        assert min(np.linalg.norm(r - target) for r in roots) <= 1e-9
    # NP-only parameters: every seed must fall back to the origin
    lone = KpoParams(delta=-1.0, kerr=1.0, pump=0.2, kappa=0.3)
    residual, jacobian = residual_and_jacobian(lone)
    roots = newton_multistart(residual, jacobian, default_seeds(lone))
    assert len(roots) == 1
    assert np.linalg.norm(roots[0]) <= 1e-10


def test_quadratic_form_and_losses():
    np_state = open_steady_states(RUN)[0]
    form, losses = keldysh_fluctuation_form(RUN, np_state)
    assert losses == (0.3,)
    assert np.allclose(form.matrix, [[-1.0, 0.5], [0.5, -1.0]])
    assert form.constant_offset == 0.0
    pps = {s.branch: s for s in open_steady_states(RUN)}[3]
    h = closed_excitation_form(RUN, pps).matrix
    assert h[0, 0] == pytest.approx(-1.0 + 2.0 * 1.4, abs=1e-12)
    assert h[0, 1] == pytest.approx(0.5 + pps.alpha**2, abs=1e-12)
    assert h[1, 0] == pytest.approx(np.conj(h[0, 1]), abs=1e-14)


def test_mf_energy_values():
    assert mf_energy(RUN, 0.0) == 0.0
    # alpha = 1: E = -delta + U/2 + Re G
    assert mf_energy(RUN, 1.0 + 0.0j) == pytest.approx(0.0, abs=1e-15)
    assert mf_energy(RUN, 1.0j) == pytest.approx(-1.0 + 0.5 - 0.5, abs=1e-15)
