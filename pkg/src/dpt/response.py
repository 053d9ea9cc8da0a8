"""Dynamical response functions of quadratic open (Keldysh) systems.

Given a Hermitian fluctuation form H in the doubled basis
(a_1..a_N, a_1^dag..a_N^dag) and per-mode loss rates, the retarded
Green's function is

    GR(omega) = [I_minus (omega*1 + i K) - H]^{-1},

with I_minus the particle-hole metric and K = diag(losses, losses).  The
advanced function is its conjugate transpose and the Keldysh component of
a vacuum-noise-driven stationary state is GK = -GR DK GA with
DK = 2i diag(losses, losses), which is anti-Hermitian exactly.

Observables derived from the (0,0) mode component:

* spectral function     A(omega) = -2 Im GR_00
* power spectrum        C(omega) =  Re(i GK_00)   (>= 0 for stable states)
* fluorescence          S(omega) =  Re(i/2 (GK - GR + GA)_00)
* occupation            n = (integral C domega/2pi - 1)/2

An equivalent route starts from the real Jacobian of the quadrature flow
(`response_from_jacobian`); the two constructions agree wherever both
apply and the Jacobian route extends to states with no quadratic form at
hand (constrained spin tangents, broken-symmetry branches).
"""

from __future__ import annotations

import logging
import numpy as np
from dataclasses import dataclass, field

from .bogoliubov import QuadraticForm, particle_hole_metric
from .numerics import PoleError, StabilityError, ValidationError, eig

# np.trapz was renamed in numpy 2.0; support both without warnings
_trapezoid = getattr(np, "trapezoid", None) or np.trapz

logger = logging.getLogger(__name__)

ADVANCED_TOL = 1e-12
KELDYSH_HERMITICITY_TOL = 1e-10
TAIL_FRACTION_TOL = 1e-4
MAX_GRID_EXTENSIONS = 8
BASE_GRID_POINTS = 4001
REFINE_POINTS = 241


def _loss_diagonal(losses, n_modes: int) -> np.ndarray:
    k = np.asarray(losses, dtype=float).ravel()
    if k.size != n_modes:
        raise ValidationError(f"expected {n_modes} loss rates, got {k.size}")
    if np.any(k < 0):
        raise ValidationError("loss rates must be >= 0")
    return np.concatenate([k, k])


def default_dk(losses, n_modes: int) -> np.ndarray:
    """Vacuum-noise Keldysh self-energy 2i diag(losses, losses)."""
    return 2j * np.diag(_loss_diagonal(losses, n_modes))


def greens_poles(form: QuadraticForm, losses) -> np.ndarray:
    """Complex poles of GR: eigenvalues of I_minus H - i K."""
    n = form.n_modes
    metric = particle_hole_metric(n)
    return eig(metric @ form.matrix - 1j * np.diag(_loss_diagonal(losses, n))).values


def build_default_grid(poles, omega_max: float | None = None, n_base: int = BASE_GRID_POINTS) -> np.ndarray:
    """Symmetric frequency grid with refinement windows near pole lines.

    The base grid spans [-4 Omega, 4 Omega] with Omega set by the largest
    pole magnitude (or by omega_max/4 when given); each pole with a real
    part inside the span contributes a dense window around it whose width
    tracks the pole's damping.
    """
    poles = np.asarray(poles, dtype=complex).ravel()
    scale = max(float(np.max(np.abs(poles))) if poles.size else 0.0, 1e-6)
    span = 4.0 * scale if omega_max is None else float(omega_max)
    pieces = [np.linspace(-span, span, n_base)]
    for p in poles:
        if abs(p.real) > span:
            continue
        half = max(6.0 * abs(p.imag), span / 200.0)
        pieces.append(np.linspace(p.real - half, p.real + half, REFINE_POINTS))
    grid = np.unique(np.concatenate(pieces))
    return grid[(grid >= -span) & (grid <= span)]


def retarded_green(form: QuadraticForm, losses, omega):
    """Retarded Green's function at scalar or array omega.

    Raises
    ------
    PoleError
        If any requested frequency sits exactly on a pole (singular
        kernel); use `keldysh_green`, which flags such points instead,
        for grid work.
    """
    gr, flags = _gr_on_grid(form, losses, np.atleast_1d(np.asarray(omega, dtype=float)))
    if np.any(flags):
        raise PoleError("retarded kernel is singular at a requested frequency")
    return gr if np.ndim(omega) else gr[0]


def _gr_on_grid(form: QuadraticForm, losses, grid: np.ndarray):
    n = form.n_modes
    metric = particle_hole_metric(n)
    kmat = 1j * np.diag(_loss_diagonal(losses, n))
    eye = np.eye(2 * n)
    gr = np.empty((grid.size, 2 * n, 2 * n), dtype=complex)
    flags = np.zeros(grid.size, dtype=bool)
    for i, w in enumerate(grid):
        kernel = metric @ (w * eye + kmat) - form.matrix
        try:
            block = np.linalg.inv(kernel)
        except np.linalg.LinAlgError:
            block = None
        if block is None or not np.all(np.isfinite(block.view(float))):
            gr[i] = complex(np.nan, np.nan)
            flags[i] = True
        else:
            gr[i] = block
    return gr, flags


@dataclass
class GreensSet:
    """Retarded/advanced/Keldysh functions sampled on a frequency grid.

    pole_flags marks grid points where the kernel was exactly singular
    (entries there are NaN).  The set carries its own evaluator so that
    integrals may extend the grid on demand.
    """

    omega: np.ndarray
    gr: np.ndarray
    ga: np.ndarray
    gk: np.ndarray
    pole_flags: np.ndarray
    poles: np.ndarray
    n_modes: int
    evaluator: object = field(default=None, repr=False)

    def __post_init__(self):
        ok = ~self.pole_flags
        if not np.any(ok):
            raise ValidationError("every grid point sits on a pole")
        ga_dev = float(np.max(np.abs(self.ga[ok] - np.conj(np.swapaxes(self.gr[ok], 1, 2)))))
        scale = max(1.0, float(np.max(np.abs(self.gr[ok]))))
        if ga_dev > ADVANCED_TOL * scale:
            raise ValidationError("advanced component is not the conjugate transpose of the retarded one")
        gk_dev = float(np.max(np.abs(self.gk[ok] + np.conj(np.swapaxes(self.gk[ok], 1, 2)))))
        gk_scale = max(1.0, float(np.max(np.abs(self.gk[ok]))))
        if gk_dev > KELDYSH_HERMITICITY_TOL * gk_scale:
            raise ValidationError("Keldysh component is not anti-Hermitian")

    def evaluate(self, omega: np.ndarray):
        """(gr, ga, gk, pole_flags) on an arbitrary frequency array."""
        if self.evaluator is None:
            raise ValidationError("this GreensSet carries no evaluator")
        return self.evaluator(np.asarray(omega, dtype=float))


def _assemble(evaluator, poles, n_modes, grid) -> GreensSet:
    gr, ga, gk, flags = evaluator(grid)
    return GreensSet(
        omega=grid,
        gr=gr,
        ga=ga,
        gk=gk,
        pole_flags=flags,
        poles=np.asarray(poles, dtype=complex),
        n_modes=n_modes,
        evaluator=evaluator,
    )


def keldysh_green(form: QuadraticForm, losses, grid=None) -> GreensSet:
    """Full Keldysh triple (GR, GA, GK) of a quadratic open system.

    GK is built from vacuum noise on the lossy modes, GK = -GR DK GA; its
    anti-Hermiticity is exact and is validated.  With no grid given, a
    default pole-refined grid is used.
    """
    n = form.n_modes
    dk = default_dk(losses, n)
    poles = greens_poles(form, losses)
    if grid is None:
        grid = build_default_grid(poles)
    grid = np.asarray(grid, dtype=float)

    def evaluator(omega):
        gr, flags = _gr_on_grid(form, losses, omega)
        ga = np.conj(np.swapaxes(gr, 1, 2))
        gk = -np.einsum("nij,jk,nkl->nil", gr, dk, ga)
        gk = 0.5 * (gk - np.conj(np.swapaxes(gk, 1, 2)))
        return gr, ga, gk, flags

    return _assemble(evaluator, poles, n, grid)


def kpo_quadrature_map() -> np.ndarray:
    """Quadrature -> field map for one cavity mode: (x, y) -> (a, a^dag)."""
    return np.array([[1.0, 1j], [1.0, -1j]])


def idtc_np_quadrature_map() -> np.ndarray:
    """(x, y, X, Y) -> (a, b, a^dag, b^dag) for the cavity-spin NP.

    The spin-wave mode around the south pole is b = X - iY.
    """
    return np.array(
        [
            [1.0, 1j, 0.0, 0.0],
            [0.0, 0.0, 1.0, -1j],
            [1.0, -1j, 0.0, 0.0],
            [0.0, 0.0, 1.0, 1j],
        ]
    )


def cavity_only_map() -> np.ndarray:
    """Map for broken-symmetry cavity-spin branches: cavity quadratures to
    (a, ., a^dag, .), spin tangents passed through untouched.  Only the
    cavity components of the resulting functions are physical.
    """
    return np.array(
        [
            [1.0, 1j, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [1.0, -1j, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )


def response_from_jacobian(matrix, losses, basis_map, grid=None) -> GreensSet:
    """Green's functions from the real quadrature Jacobian.

    GR(omega) = -i T (-i omega 1 - M)^{-1} T^{-1} I_minus with M the
    Jacobian and T the quadrature->field map; this agrees with the
    quadratic-form construction wherever both exist, and applies directly
    to linearized flows around broken-symmetry states.
    """
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
        raise ValidationError("Jacobian must be square with even dimension")
    n = m.shape[0] // 2
    t = np.asarray(basis_map, dtype=complex)
    if t.shape != m.shape:
        raise ValidationError("basis map shape must match the Jacobian")
    t_inv = np.linalg.inv(t)
    metric = particle_hole_metric(n)
    dk = default_dk(losses, n)
    poles = 1j * eig(m).values
    if grid is None:
        grid = build_default_grid(poles)
    grid = np.asarray(grid, dtype=float)
    eye = np.eye(2 * n)

    def evaluator(omega):
        gr = np.empty((omega.size, 2 * n, 2 * n), dtype=complex)
        flags = np.zeros(omega.size, dtype=bool)
        for i, w in enumerate(omega):
            kernel = -1j * w * eye - m
            try:
                block = -1j * t @ np.linalg.solve(kernel, t_inv) @ metric
            except np.linalg.LinAlgError:
                block = None
            if block is None or not np.all(np.isfinite(block.view(float))):
                gr[i] = complex(np.nan, np.nan)
                flags[i] = True
            else:
                gr[i] = block
        ga = np.conj(np.swapaxes(gr, 1, 2))
        gk = -np.einsum("nij,jk,nkl->nil", gr, dk, ga)
        gk = 0.5 * (gk - np.conj(np.swapaxes(gk, 1, 2)))
        return gr, ga, gk, flags

    return _assemble(evaluator, poles, n, grid)


def spectral_function(gset: GreensSet, mode: int = 0) -> np.ndarray:
    """A(omega) = -2 Im GR_mm; NaN at flagged pole points."""
    return -2.0 * gset.gr[:, mode, mode].imag


def power_spectrum(gset: GreensSet, mode: int = 0) -> np.ndarray:
    """C(omega) = Re(i GK_mm), the symmetrized noise power."""
    return (1j * gset.gk[:, mode, mode]).real


def fluorescence(gset: GreensSet, mode: int = 0) -> np.ndarray:
    """S(omega) = Re(i/2 (GK - GR + GA)_mm), the emission spectrum."""
    comb = gset.gk[:, mode, mode] - gset.gr[:, mode, mode] + gset.ga[:, mode, mode]
    return (0.5j * comb).real


@dataclass
class SpectraTable:
    """Columnar bundle of the three mode-resolved spectra."""

    omega: np.ndarray
    spectral: np.ndarray
    power: np.ndarray
    fluorescence: np.ndarray
    mode: int


def build_spectra(gset: GreensSet, mode: int = 0) -> SpectraTable:
    """Evaluate all three spectra of one mode on the set's grid."""
    return SpectraTable(
        omega=gset.omega.copy(),
        spectral=spectral_function(gset, mode),
        power=power_spectrum(gset, mode),
        fluorescence=fluorescence(gset, mode),
        mode=mode,
    )


def _integral_with_tails(gset: GreensSet, values: np.ndarray, sample, what: str) -> float:
    """Trapezoid + analytic 1/omega^2 tail integral with grid extension.

    Both the spectral function and the power spectrum of a damped
    quadratic system decay as c/omega^2 far outside the pole span, so the
    integral beyond the last gridded frequency +-L is value(L)*L.  When
    that correction carries more than a 1e-4 fraction of the mass, the
    grid is extended geometrically through the set's evaluator.
    """
    omega = gset.omega[~gset.pole_flags]
    values = values[~gset.pole_flags]
    if omega.size < 3:
        raise ValidationError("grid too small for spectral integrals")
    for _ in range(MAX_GRID_EXTENSIONS + 1):
        body = float(_trapezoid(values, omega))
        tail = abs(values[-1] * omega[-1]) + abs(values[0] * omega[0])
        mass = float(_trapezoid(np.abs(values), omega)) + tail
        if tail <= TAIL_FRACTION_TOL * max(mass, 1e-300):
            return body + values[-1] * omega[-1] + values[0] * omega[0]
        hi = np.geomspace(omega[-1], 2.5 * omega[-1], 160)[1:]
        lo = -np.geomspace(-omega[0], -2.5 * omega[0], 160)[1:][::-1]
        omega = np.concatenate([lo, omega, hi])
        values = np.concatenate([sample(lo), values, sample(hi)])
        keep = np.isfinite(values)
        omega, values = omega[keep], values[keep]
    raise StabilityError(f"{what} tails did not converge; the integral diverges")


def spectral_sum_rule(gset: GreensSet, mode: int = 0) -> float:
    """Integral of A(omega) domega / 2pi (equals 1 for a bosonic mode)."""

    def sample(omega):
        gr, _, _, flags = gset.evaluate(omega)
        return np.where(flags, np.nan, -2.0 * gr[:, mode, mode].imag)

    return _integral_with_tails(gset, spectral_function(gset, mode), sample, "spectral-function") / (2.0 * np.pi)


def mode_occupation(gset: GreensSet, mode: int = 0) -> float:
    """Stationary occupation n = (integral C domega/2pi - 1)/2.

    Raises StabilityError if the state is not strictly decaying (no
    stationary covariance exists) or the tails refuse to converge.
    """
    if np.any(gset.poles.imag > -1e-12):
        raise StabilityError("occupation requires a strictly stable, decaying state")
    if float(np.max(np.abs(gset.gk[~gset.pole_flags]))) == 0.0:
        raise StabilityError("no stationary fluctuation state without loss")

    def sample(omega):
        _, _, gk, flags = gset.evaluate(omega)
        return np.where(flags, np.nan, (1j * gk[:, mode, mode]).real)

    total = _integral_with_tails(gset, power_spectrum(gset, mode), sample, "power-spectrum")
    return float((total / (2.0 * np.pi) - 1.0) / 2.0)
