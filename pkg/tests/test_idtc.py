"""Cavity-spin model: steady states, constrained stability, NP excitations.

Hand-derived / frozen oracle values (omega_c = omega_z = 1 throughout):

* critical coupling sqrt(omega_c*omega_z)/2 = 0.5;
* NP excitation frequencies: squared frequencies are the roots of
  u^2 - (wc^2 + wz^2 + 8 lx ly) u + (4 lx^2 - wc wz)(4 ly^2 - wc wz),
  giving (sqrt(0.4), sqrt(1.6)) at (lx, ly) = (0.3, 0),
  (sqrt(0.32), sqrt(1.92)) at (0.3, 0.1), and exactly (0.6, 1.4) on the
  symmetric line (0.2, 0.2) where the two sectors decouple;
* identity (w2_soft * w2_hard) = (4 lx^2 - wc wz)(4 ly^2 - wc wz): the
  soft branch crosses zero when the dominant coupling hits 1/2;
* kappa = 0.1 steady states (canonical representative, X > 0):
  (0.7, 0.3):  (-0.591320..., -0.072637..., 0.427560..., -0.022509...,
               -0.258235...),
  (0.7, 0.0):  Z = -0.2576530612244899 and tangent spectrum
               -0.009495279714548 +- 2.0221877430179576i,
               -0.09050472028545216 +- 0.8215493290852185i (stable);
* with kappa = 0.1 the empty-cavity state destabilizes at
  lambda* = sqrt(wz (wc^2 + kappa^2) / (4 wc)) = 0.5024937810560445;
* two-sided couplings suppress the broken phase inside the wedge
  ly/lx in (sqrt(1 + kappa^2/wc^2) -+ kappa/wc): at lx = 0.7 the lower
  edge sits at 0.6334912934784622, so (0.7, 0.7) has no broken states
  while (0.7, 0.55) carries two pairs.
"""

import numpy as np
import pytest

from dpt.idtc import (
    IdtcParams,
    IdtcState,
    closed_ground_state,
    closed_np_excitations,
    critical_coupling,
    default_seeds,
    fluctuation_matrix,
    keldysh_fluctuation_form_np,
    mean_field_rhs,
    mf_energy,
    normal_phase,
    np_excitation_frequencies,
    np_quadratic_form,
    np_retarded_green_closed_form,
    open_steady_states,
    residual_and_jacobian,
    sp_candidates_closed_form,
    stability_report,
    tangent_projector,
    tangent_system,
)
from dpt.numerics import StabilityError, ValidationError, eig

RUN = IdtcParams(omega_c=1.0, omega_z=1.0, lambda_x=0.7, lambda_y=0.3, kappa=0.1)
DICKE = IdtcParams(omega_c=1.0, omega_z=1.0, lambda_x=0.7, lambda_y=0.0, kappa=0.1)


def test_params_validation():
    with pytest.raises(ValidationError):
        IdtcParams(omega_c=0.0, omega_z=1.0, lambda_x=0.1, lambda_y=0.0)
    with pytest.raises(ValidationError):
        IdtcParams(omega_c=1.0, omega_z=1.0, lambda_x=-0.1, lambda_y=0.0)
    with pytest.raises(ValidationError):
        IdtcParams(omega_c=1.0, omega_z=1.0, lambda_x=0.1, lambda_y=0.0, kappa=-1.0)


def test_spin_sphere_validation():
    with pytest.raises(ValidationError):
        IdtcState(0.0j, 0.3, 0.0, 0.0, "SP", 1)
    # exact sphere point passes
    IdtcState(0.0j, 0.3, 0.0, -0.4, "SP", 1)


def test_normal_phase_is_steady():
    state = normal_phase()
    assert state.alpha == 0.0 and state.spin_z == -0.5
    rates = mean_field_rhs(RUN, state)
    assert rates.dalpha == 0.0
    assert rates.dspin_x == rates.dspin_y == rates.dspin_z == 0.0
    assert mf_energy(RUN, state) == pytest.approx(-0.5, abs=1e-15)


def test_critical_coupling():
    assert critical_coupling(RUN) == pytest.approx(0.5, abs=1e-15)
    assert critical_coupling(
        IdtcParams(omega_c=2.0, omega_z=0.5, lambda_x=0.0, lambda_y=0.0)
    ) == pytest.approx(0.5, abs=1e-15)


def test_np_excitation_frequencies_frozen():
    cases = {
        (0.3, 0.0): (0.6324555320336759, 1.2649110640673518),
        (0.3, 0.1): (0.5656854249492381, 1.3856406460551018),
        (0.2, 0.2): (0.6, 1.4),
    }
    for (lx, ly), (soft, hard) in cases.items():
        w2s, w2h = np_excitation_frequencies(
            IdtcParams(omega_c=1.0, omega_z=1.0, lambda_x=lx, lambda_y=ly)
        )
        assert np.sqrt(w2s) == pytest.approx(soft, abs=1e-12)
        assert np.sqrt(w2h) == pytest.approx(hard, abs=1e-12)
    # decoupled limit: the bare cavity and spin frequencies
    w2s, w2h = np_excitation_frequencies(
        IdtcParams(omega_c=1.3, omega_z=0.8, lambda_x=0.0, lambda_y=0.0)
    )
    assert (np.sqrt(w2s), np.sqrt(w2h)) == pytest.approx((0.8, 1.3), abs=1e-12)


def test_soft_mode_zero_at_dominant_critical_coupling():
    w2s, _ = np_excitation_frequencies(
        IdtcParams(omega_c=1.0, omega_z=1.0, lambda_x=0.5, lambda_y=0.2)
    )
    assert w2s == pytest.approx(0.0, abs=1e-12)


def test_squared_frequency_product_identity():
    # w2_soft * w2_hard = (4 lx^2 - wc wz)(4 ly^2 - wc wz) exactly
    rng = np.random.default_rng(5)
    for _ in range(50):
        p = IdtcParams(
            omega_c=rng.uniform(0.3, 2.0),
            omega_z=rng.uniform(0.3, 2.0),
            lambda_x=rng.uniform(0.0, 1.2),
            lambda_y=rng.uniform(0.0, 1.2),
        )
        w2s, w2h = np_excitation_frequencies(p)
        target = (4 * p.lambda_x**2 - p.omega_c * p.omega_z) * (
            4 * p.lambda_y**2 - p.omega_c * p.omega_z
        )
        assert w2s * w2h == pytest.approx(target, rel=1e-12, abs=1e-12)


def test_np_frequencies_match_flow_jacobian():
    # independent route: the kappa = 0 tangent-flow Jacobian at the NP has
    # eigenvalues +-i omega, so -eps^2 must reproduce the squared closed form
    rng = np.random.default_rng(9)
    for _ in range(30):
        p = IdtcParams(
            omega_c=rng.uniform(0.3, 2.0),
            omega_z=rng.uniform(0.3, 2.0),
            lambda_x=rng.uniform(0.0, 1.2),
            lambda_y=rng.uniform(0.0, 1.2),
        )
        w2 = np.array(np_excitation_frequencies(p))
        jac_r, _ = tangent_system(p, normal_phase())
        u = np.sort(np.real(-eig(jac_r).values ** 2))[::2]
        assert np.allclose(np.sort(u), np.sort(w2), atol=1e-10)


def test_closed_np_excitations_crosscheck():
    exc = closed_np_excitations(IdtcParams(1.0, 1.0, 0.3, 0.1))
    assert exc.soft_frequency == pytest.approx(0.5656854249492381, abs=1e-12)
    assert exc.hard_frequency == pytest.approx(1.3856406460551018, abs=1e-12)
    assert all(m.physical for m in exc.soft + exc.hard)
    assert exc.soft[0].symplectic_norm > 0 > exc.soft[1].symplectic_norm
    # one coupling beyond threshold: imaginary soft pair, flagged
    broken = closed_np_excitations(IdtcParams(1.0, 1.0, 0.7, 0.3))
    assert broken.soft_frequency.real == pytest.approx(0.0, abs=1e-12)
    assert broken.soft_frequency.imag > 0
    assert not any(m.physical for m in broken.soft)
    # both couplings beyond threshold: the pair turns real again
    revived = closed_np_excitations(IdtcParams(1.0, 1.0, 0.7, 0.6))
    assert all(m.physical for m in revived.soft)


def test_np_quadratic_form_structure():
    form = np_quadratic_form(IdtcParams(1.0, 1.0, 0.3, 0.1))
    h = form.matrix
    assert np.allclose(h, h.conj().T)
    assert h[0, 1] == pytest.approx(0.4)  # rotating: lx + ly
    assert h[0, 3] == pytest.approx(0.2)  # counter-rotating: lx - ly
    form2, losses = keldysh_fluctuation_form_np(DICKE)
    assert losses == (0.1, 0.0)
    assert np.allclose(form2.matrix, np_quadratic_form(DICKE).matrix)


def test_open_steady_state_census():
    states = open_steady_states(RUN)
    assert len(states) == 3
    assert states[0].label == "NP" and states[0].branch == 0
    rep, partner = states[1], states[2]
    assert rep.branch == 1 and partner.branch == 2
    expected = np.array(
        [
            -0.591320425736097,
            -0.07263751418513299,
            0.4275601265390074,
            -0.02250911935253883,
            -0.2582357019080072,
        ]
    )
    assert np.allclose(rep.vector(), expected, atol=1e-10)
    flip = np.array([-1.0, -1.0, -1.0, -1.0, 1.0])
    assert np.allclose(partner.vector(), expected * flip, atol=1e-10)
    for s in states:
        rates = mean_field_rhs(RUN, s)
        flat = [abs(rates.dalpha), rates.dspin_x, rates.dspin_y, rates.dspin_z]
        assert np.linalg.norm(flat) <= 1e-10


def test_closed_form_candidates_match_multistart():
    # the c-quadratic representatives must coincide (up to Z2) with the
    # Newton search run from the coupling-agnostic sphere grid alone
    for params in (RUN, DICKE, IdtcParams(1.0, 1.0, 0.7, 0.55, 0.1)):
        cands = sp_candidates_closed_form(params)
        seeds = [s for s in default_seeds(params)[: 4 * 8]]  # grid only
        states = open_steady_states(params, seeds=seeds)
        reps = [s.vector() for s in states[1::2]]
        assert len(cands) == len(reps)
        flip = np.array([-1.0, -1.0, -1.0, -1.0, 1.0])
        for cand in cands:
            best = min(
                min(np.linalg.norm(cand - r), np.linalg.norm(cand * flip - r))
                for r in reps
            )
            assert best <= 1e-9


def test_no_broken_states_inside_wedge():
    # lower edge at lx = 0.7: ly = 0.7*(sqrt(1.01) - 0.1)
    edge = 0.7 * (np.sqrt(1.01) - 0.1)
    assert edge == pytest.approx(0.6334912934784622, abs=1e-15)
    assert len(open_steady_states(IdtcParams(1.0, 1.0, 0.7, 0.7, 0.1))) == 1
    assert len(open_steady_states(IdtcParams(1.0, 1.0, 0.7, 0.55, 0.1))) == 5
    assert len(open_steady_states(IdtcParams(1.0, 1.0, 0.7, 0.64, 0.1))) == 1


def test_empty_seed_list_skips_search():
    states = open_steady_states(RUN, seeds=[])
    assert len(states) == 1 and states[0].label == "NP"


def test_tangent_restriction_is_exact():
    for params, state in ((RUN, open_steady_states(RUN)[1]), (DICKE, normal_phase())):
        jac = fluctuation_matrix(params, state)
        jac_r, proj = tangent_system(params, state)
        assert proj.shape == (4, 5)
        assert np.allclose(proj @ proj.T, np.eye(4), atol=1e-12)
        full = np.sort_complex(eig(jac).values)
        restricted = np.sort_complex(np.append(eig(jac_r).values, 0.0))
        assert np.allclose(full, restricted, atol=1e-9)


def test_radial_left_null_vector():
    state = open_steady_states(RUN)[1]
    jac = fluctuation_matrix(RUN, state)
    radial = np.zeros(5)
    radial[2:] = state.vector()[2:]
    assert np.linalg.norm(radial @ jac) <= 1e-12


def test_dicke_sp_stability_frozen():
    states = open_steady_states(DICKE)
    assert len(states) == 3
    rep = states[1]
    assert rep.spin_z == pytest.approx(-0.2576530612244899, abs=1e-12)
    assert rep.spin_y == pytest.approx(0.0, abs=1e-12)
    report = stability_report(DICKE, rep)
    assert report.stable and not report.boundary
    assert report.constraint_index is not None
    assert abs(report.eigenvalues[report.constraint_index]) <= 1e-9
    tangent_vals = np.sort_complex(eig(tangent_system(DICKE, rep)[0]).values)
    expected = np.sort_complex(
        np.array(
            [
                -0.009495279714548 + 2.0221877430179576j,
                -0.009495279714548 - 2.0221877430179576j,
                -0.09050472028545216 + 0.8215493290852185j,
                -0.09050472028545216 - 0.8215493290852185j,
            ]
        )
    )
    assert np.allclose(tangent_vals, expected, atol=1e-10)


def test_np_destabilizes_at_dissipative_threshold():
    lam = np.sqrt(1.0 * (1.0 + 0.01) / 4.0)
    assert lam == pytest.approx(0.5024937810560445, abs=1e-15)
    below = IdtcParams(1.0, 1.0, lam - 1e-6, 0.0, 0.1)
    above = IdtcParams(1.0, 1.0, lam + 1e-6, 0.0, 0.1)
    assert stability_report(below, normal_phase()).stable
    assert not stability_report(above, normal_phase()).stable


def test_covariance_solves_restricted_lyapunov():
    report = stability_report(DICKE, open_steady_states(DICKE)[1])
    cov = report.covariance
    assert cov is not None and cov.shape == (4, 4)
    assert np.allclose(cov, cov.T, atol=1e-10)
    assert np.all(np.linalg.eigvalsh(cov) > 0)
    jac_r, proj = tangent_system(DICKE, open_steady_states(DICKE)[1])
    diffusion = proj @ np.diag([0.2, 0.2, 0.0, 0.0, 0.0]) @ proj.T
    assert np.allclose(jac_r @ cov + cov @ jac_r.T + diffusion, 0.0, atol=1e-8)


def test_stale_state_guard():
    state = open_steady_states(RUN)[1]
    other = IdtcParams(1.0, 1.0, 0.6, 0.3, 0.1)
    with pytest.raises(ValidationError):
        fluctuation_matrix(other, state)


def test_jacobian_matches_finite_differences():
    residual, jacobian = residual_and_jacobian(RUN)
    rng = np.random.default_rng(2)
    v = np.array([0.3, -0.2, 0.1, 0.2, -0.4])
    jac = jacobian(v)
    assert jac.shape == (6, 5)
    step = 1e-7
    for j in range(5):
        dv = np.zeros(5)
        dv[j] = step
        numeric = (residual(v + dv) - residual(v - dv)) / (2 * step)
        assert np.allclose(jac[:, j], numeric, atol=1e-6)
    assert rng is not None


def test_closed_ground_state_regimes():
    # below threshold: NP alone at energy -wz/2
    low = closed_ground_state(IdtcParams(1.0, 1.0, 0.3, 0.2))
    assert len(low) == 1 and low[0].energy == pytest.approx(-0.5)
    # x-dominant: pair first, magnetization along x, real cavity amplitude
    states = closed_ground_state(IdtcParams(1.0, 1.0, 0.7, 0.3))
    assert [s.branch for s in states] == [1, 2, 0]
    rep = states[0]
    assert rep.spin_z == pytest.approx(-0.25 / (2 * 0.49), abs=1e-12)
    assert rep.spin_y == 0.0 and rep.alpha.imag == 0.0
    assert states[0].energy == pytest.approx(states[1].energy, abs=1e-14)
    assert states[0].energy < states[2].energy
    # y-dominant mirror: imaginary cavity amplitude
    mirror = closed_ground_state(IdtcParams(1.0, 1.0, 0.3, 0.7))
    assert mirror[0].spin_x == 0.0 and mirror[0].alpha.real == 0.0
    assert mirror[0].energy == pytest.approx(states[0].energy, abs=1e-12)
    # symmetric line: degenerate direction, x-axis representative returned
    tc = closed_ground_state(IdtcParams(1.0, 1.0, 0.7, 0.7))
    assert tc[0].spin_y == 0.0 and tc[0].spin_x > 0


def test_closed_form_green_function_reduces_at_zero_coupling():
    p = IdtcParams(1.0, 1.0, 0.0, 0.0, 0.1)
    omega = np.linspace(-3.0, 3.0, 11)
    gf = np_retarded_green_closed_form(p, omega)
    bare = 1.0 / (omega - 1.0 + 0.1j)
    assert np.allclose(gf, bare, atol=1e-14)
