"""Bosonic Bogoliubov diagonalization and symplectic-norm bookkeeping."""

import numpy as np
import pytest

from dpt.bogoliubov import (
    BogoliubovTransform,
    QuadraticForm,
    diagonalize_excitations,
    dynamical_matrix,
    particle_hole_metric,
    symplectic_norm,
)
from dpt.numerics import DegenerateInputError, ValidationError


def kpo_np_form(delta, pump):
    return QuadraticForm(np.array([[-delta, pump], [np.conj(pump), -delta]], dtype=complex))


def test_metric_shape_and_signs():
    metric = particle_hole_metric(3)
    assert metric.shape == (6, 6)
    assert np.all(np.diag(metric)[:3] == 1.0)
    assert np.all(np.diag(metric)[3:] == -1.0)


def test_quadratic_form_validation():
    with pytest.raises(ValidationError):
        QuadraticForm(np.array([[0.0, 1.0], [0.0, 0.0]]))  # not Hermitian
    with pytest.raises(ValidationError):
        QuadraticForm(np.eye(3))  # odd dimension


def test_dynamical_matrix_is_metric_times_form():
    form = kpo_np_form(0.7, 0.2 + 0.1j)
    d = dynamical_matrix(form)
    assert np.allclose(d, particle_hole_metric(1) @ form.matrix)


def test_symplectic_norm_values():
    assert symplectic_norm(np.array([1.0, 0.0])) == pytest.approx(1.0)
    assert symplectic_norm(np.array([0.0, 1.0])) == pytest.approx(-1.0)
    # a null vector is legitimate input (critical mode), only zero is not
    assert symplectic_norm(np.array([1.0, 1.0])) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(DegenerateInputError):
        symplectic_norm(np.zeros(2))


def test_stable_np_frequencies_and_norm():
    # one driven mode, red-detuned: frequencies +-sqrt(delta^2 - |G|^2)
    modes, transform = diagonalize_excitations(kpo_np_form(-1.0, 0.5))
    freqs = sorted((m.frequency.real for m in modes), reverse=True)
    assert freqs[0] == pytest.approx(np.sqrt(0.75), abs=1e-12)
    assert freqs[1] == pytest.approx(-np.sqrt(0.75), abs=1e-12)
    top = modes[0]
    assert top.physical
    assert top.symplectic_norm > 0
    # norm of the raw eigenvector rescaled so its hole component is 1
    scaled = top.symplectic_norm / abs(top.eigenvector[1]) ** 2
    assert scaled == pytest.approx(12.928203230275498, rel=1e-10)
    assert isinstance(transform, BogoliubovTransform)


def test_hole_like_positive_frequency_mode():
    # blue-detuned: the positive-frequency excitation carries negative norm
    modes, _ = diagonalize_excitations(kpo_np_form(1.0, 0.5))
    top = max(modes, key=lambda m: m.frequency.real)
    assert top.frequency.real == pytest.approx(0.8660254037844386, abs=1e-12)
    assert top.physical
    assert top.symplectic_norm < 0


def test_unstable_form_returns_unphysical_modes_no_transform():
    modes, transform = diagonalize_excitations(kpo_np_form(0.2, 0.5))
    assert transform is None
    assert any(not m.physical for m in modes)
    assert all(abs(m.frequency.imag) > 1e-9 for m in modes if not m.physical)


def test_para_unitarity_on_random_stable_forms():
    rng = np.random.default_rng(3)
    metric = particle_hole_metric(2)
    checked = 0
    while checked < 30:
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        b = rng.normal(size=(2, 2))
        h = np.block([[a @ a.conj().T + 2.0 * np.eye(2), b], [b.T, (a @ a.conj().T + 2.0 * np.eye(2)).conj()]])
        h = 0.5 * (h + h.conj().T)
        form = QuadraticForm(h)
        modes, transform = diagonalize_excitations(form)
        if transform is None:
            continue
        checked += 1
        v = transform.matrix
        assert np.allclose(v.conj().T @ metric @ v, metric, atol=1e-9)
        # transform diagonalizes the dynamical matrix
        d = dynamical_matrix(form)
        freqs = np.array([m.frequency for m in modes])
        diag = np.linalg.inv(v) @ d @ v
        assert np.allclose(diag - np.diag(np.diag(diag)), 0.0, atol=1e-7)
        # unit symplectic norm per column, +1 then -1 blocks
        norms = np.real(np.einsum("ik,ij,jk->k", v.conj(), metric, v))
        assert np.allclose(norms[:2], 1.0, atol=1e-9)
        assert np.allclose(norms[2:], -1.0, atol=1e-9)


def test_frequencies_come_in_opposite_pairs():
    rng = np.random.default_rng(17)
    for _ in range(20):
        delta = rng.uniform(-2, 2)
        pump = rng.uniform(0, 1) * np.exp(2j * np.pi * rng.uniform())
        modes, _ = diagonalize_excitations(kpo_np_form(delta, pump))
        freqs = sorted(np.round([m.frequency for m in modes], 10), key=lambda z: (z.real, z.imag))
        assert freqs[0] == -freqs[1]
