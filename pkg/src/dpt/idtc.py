"""Interpolating Dicke--Tavis-Cummings (cavity + collective spin) model.

A single cavity mode (frequency ``omega_c``, loss ``kappa``) couples to a
collective spin (splitting ``omega_z``) through independent rotating and
counter-rotating couplings, parametrized here by ``lambda_x`` and
``lambda_y``: equal couplings give the Tavis-Cummings limit (U(1)
symmetric), ``lambda_y = 0`` the Dicke limit (Z2).  The mean field is the
cavity amplitude alpha and the normalized spin vector (X, Y, Z) of fixed
length 1/2 (spin-length conservation is exact and is the one constraint
the Jacobian analysis must respect).  Rescaled equations of motion::

    d(alpha)/dt = -(i*omega_c + kappa)*alpha - 2i*lambda_x*X - 2*lambda_y*Y
    dX/dt = -omega_z*Y - 4*lambda_y*Im(alpha)*Z
    dY/dt =  omega_z*X - 4*lambda_x*Re(alpha)*Z
    dZ/dt =  4*lambda_x*Re(alpha)*Y + 4*lambda_y*Im(alpha)*X

Steady states: the normal phase NP = (0, 0, 0, -1/2) always exists;
superradiant phases (SP) carry a macroscopic cavity field plus in-plane
magnetization and come in Z2 pairs (alpha, X, Y) -> -(alpha, X, Y).

The radial spin direction is an exact left null vector of the 5x5
Jacobian at every steady state, so stability is decided on the 4-dim
tangent space (cavity quadratures + two spin tangents); the leftover zero
eigenvalue is reported tagged as the constraint mode, never as marginal
physics.
"""

from __future__ import annotations

import numpy as np
from dataclasses import dataclass

from .bogoliubov import ExcitationMode, QuadraticForm, diagonalize_excitations
from .numerics import (
    NumericsError,
    PoleError,
    StabilityError,
    StabilityReport,
    ValidationError,
    eig,
    newton_multistart,
    solve_lyapunov,
    stability_verdict,
)

SPIN_LENGTH_TOL = 1e-9
STEADY_STATE_TOL = 1e-10
STALE_STATE_TOL = 1e-8
CROSSCHECK_TOL = 1e-10


@dataclass(frozen=True)
class IdtcParams:
    """Cavity-spin model parameters.

    Attributes
    ----------
    omega_c : float
        Cavity frequency (> 0).
    omega_z : float
        Spin splitting (> 0).
    lambda_x, lambda_y : float
        Couplings of the two spin quadratures to the cavity (>= 0);
        lambda_x = lambda_y is the Tavis-Cummings line, lambda_y = 0 the
        Dicke line.
    kappa : float
        Cavity loss rate (>= 0); the spin is lossless.
    """

    omega_c: float
    omega_z: float
    lambda_x: float
    lambda_y: float
    kappa: float = 0.0

    def __post_init__(self):
        vals = (self.omega_c, self.omega_z, self.lambda_x, self.lambda_y, self.kappa)
        if not all(np.isfinite(v) for v in vals):
            raise ValidationError("parameters must be finite")
        if self.omega_c <= 0 or self.omega_z <= 0:
            raise ValidationError("omega_c and omega_z must be > 0")
        if self.lambda_x < 0 or self.lambda_y < 0 or self.kappa < 0:
            raise ValidationError("couplings and kappa must be >= 0")


@dataclass
class IdtcState:
    """Mean-field state: cavity amplitude + normalized spin vector.

    The spin vector must sit on the |S| = 1/2 sphere to 1e-9.  label is
    "NP" or "SP"; branch 0 is the NP, SP pairs use (1,2), (3,4) ordered by
    descending Z.
    """

    alpha: complex
    spin_x: float
    spin_y: float
    spin_z: float
    label: str
    branch: int
    energy: float | None = None

    def __post_init__(self):
        length = self.spin_x ** 2 + self.spin_y ** 2 + self.spin_z ** 2
        if abs(length - 0.25) > SPIN_LENGTH_TOL:
            raise ValidationError(
                f"spin vector length^2 = {length:.12f} violates the 1/4 "
                "constraint beyond 1e-9"
            )

    def vector(self) -> np.ndarray:
        """Real state vector (Re alpha, Im alpha, X, Y, Z)."""
        a = complex(self.alpha)
        return np.array([a.real, a.imag, self.spin_x, self.spin_y, self.spin_z])


def normal_phase() -> IdtcState:
    """The NP state (empty cavity, spin fully down)."""
    return IdtcState(0.0j, 0.0, 0.0, -0.5, "NP", 0)


@dataclass
class MeanFieldRates:
    """Time-derivative record of one mean-field configuration."""

    dalpha: complex
    dspin_x: float
    dspin_y: float
    dspin_z: float


def critical_coupling(params: IdtcParams) -> float:
    """Closed-system critical coupling sqrt(omega_c * omega_z)/2."""
    return float(np.sqrt(params.omega_c * params.omega_z) / 2.0)


def mf_energy(params: IdtcParams, state: IdtcState) -> float:
    """Mean-field energy omega_c|a|^2 + omega_z Z + 4 lx x X - 4 ly y Y."""
    a = complex(state.alpha)
    return float(
        params.omega_c * abs(a) ** 2
        + params.omega_z * state.spin_z
        + 4.0 * params.lambda_x * a.real * state.spin_x
        - 4.0 * params.lambda_y * a.imag * state.spin_y
    )


def _rhs_vec(params: IdtcParams, v: np.ndarray) -> np.ndarray:
    x, y, sx, sy, sz = v
    wc, wz = params.omega_c, params.omega_z
    lx, ly, k = params.lambda_x, params.lambda_y, params.kappa
    return np.array(
        [
            -k * x + wc * y - 2.0 * ly * sy,
            -wc * x - k * y - 2.0 * lx * sx,
            -wz * sy - 4.0 * ly * y * sz,
            wz * sx - 4.0 * lx * x * sz,
            4.0 * lx * x * sy + 4.0 * ly * y * sx,
        ]
    )


def mean_field_rhs(params: IdtcParams, state: IdtcState) -> MeanFieldRates:
    """Evaluate the mean-field equations of motion at a state."""
    dv = _rhs_vec(params, state.vector())
    return MeanFieldRates(
        dalpha=complex(dv[0], dv[1]),
        dspin_x=float(dv[2]),
        dspin_y=float(dv[3]),
        dspin_z=float(dv[4]),
    )


def _jacobian_vec(params: IdtcParams, v: np.ndarray) -> np.ndarray:
    x, y, sx, sy, sz = v
    wc, wz = params.omega_c, params.omega_z
    lx, ly, k = params.lambda_x, params.lambda_y, params.kappa
    return np.array(
        [
            [-k, wc, 0.0, -2.0 * ly, 0.0],
            [-wc, -k, -2.0 * lx, 0.0, 0.0],
            [0.0, -4.0 * ly * sz, 0.0, -wz, -4.0 * ly * y],
            [-4.0 * lx * sz, 0.0, wz, 0.0, -4.0 * lx * x],
            [4.0 * lx * sy, 4.0 * ly * sx, 4.0 * ly * y, 4.0 * lx * x, 0.0],
        ]
    )


def _check_steady(params: IdtcParams, state: IdtcState):
    resid = float(np.linalg.norm(_rhs_vec(params, state.vector())))
    if resid > STALE_STATE_TOL:
        raise ValidationError(
            f"state (branch {state.branch}) is not a steady state of these "
            f"parameters (residual {resid:.3e}); stale or mismatched"
        )


def fluctuation_matrix(params: IdtcParams, state: IdtcState) -> np.ndarray:
    """Analytic 5x5 Jacobian of the mean-field flow at a steady state.

    The radial spin direction (X, Y, Z)/|S| is an exact left null vector,
    reflecting spin-length conservation; use `stability_report` for a
    verdict that projects it out.
    """
    _check_steady(params, state)
    return _jacobian_vec(params, state.vector())


def tangent_projector(state: IdtcState) -> np.ndarray:
    """Rows: cavity quadratures + orthonormal spin-tangent pair (4x5)."""
    v = state.vector()
    radial = v[2:] / np.linalg.norm(v[2:])
    rows = [np.array([1.0, 0, 0, 0, 0]), np.array([0.0, 1, 0, 0, 0])]
    tangents = []
    for seed in np.eye(3):
        t = seed - (seed @ radial) * radial
        for u in tangents:
            t -= (t @ u) * u
        nrm = np.linalg.norm(t)
        if nrm > 1e-8:
            tangents.append(t / nrm)
        if len(tangents) == 2:
            break
    for t in tangents:
        row = np.zeros(5)
        row[2:] = t
        rows.append(row)
    return np.array(rows)


def tangent_system(params: IdtcParams, state: IdtcState):
    """(restricted 4x4 Jacobian, 4x5 projector) on the constraint tangent.

    The restriction is exact: the full spectrum equals the restricted
    spectrum plus the single constraint zero.
    """
    jac = fluctuation_matrix(params, state)
    proj = tangent_projector(state)
    return proj @ jac @ proj.T, proj


def stability_report(params: IdtcParams, state: IdtcState, want_covariance: bool = True) -> StabilityReport:
    """Stability verdict on the tangent space, constraint mode tagged.

    Reports the full five-eigenvalue spectrum with ``constraint_index``
    pointing at the spin-length zero mode (|eps| <= 1e-9), which is
    excluded from the verdict.  The covariance (when requested, strictly
    stable, kappa > 0) solves the Lyapunov equation of the restricted
    4-dim system with vacuum diffusion 2*kappa on the cavity quadratures
    and zero on the lossless spin tangents; at the NP the tangent basis is
    (X, Y) so this is the plain reduced 4-dim block.
    """
    jac_r, proj = tangent_system(params, state)
    eps_r = eig(jac_r).values
    stable, boundary = stability_verdict(eps_r)

    full = eig(fluctuation_matrix(params, state)).values
    constraint_index = int(np.argmin(np.abs(full)))
    if abs(full[constraint_index]) > SPIN_LENGTH_TOL:
        constraint_index = None  # should not happen; report honestly

    overdamped = bool(
        params.kappa > 0
        and np.all(eps_r.imag == 0.0)
        and np.unique(eps_r.real).size == eps_r.size
    )
    cov = None
    if want_covariance and stable and params.kappa > 0:
        diffusion = proj @ np.diag([2.0 * params.kappa, 2.0 * params.kappa, 0.0, 0.0, 0.0]) @ proj.T
        cov = solve_lyapunov(jac_r, diffusion)
    return StabilityReport(
        eigenvalues=full,
        stable=stable,
        boundary=boundary,
        overdamped=overdamped,
        covariance=cov,
        constraint_index=constraint_index,
    )


# --------------------------------------------------------------------------
# steady states
# --------------------------------------------------------------------------

def sp_candidates_closed_form(params: IdtcParams):
    """Closed-form superradiant steady-state candidates (representatives).

    Eliminating the cavity from the fixed-point equations leaves a
    quadratic for c = 8 Z / (kappa^2 + omega_c^2):

        c^2 lx^2 ly^2 (omega_c^2 + kappa^2)
        + c omega_c omega_z (lx^2 + ly^2) + omega_z^2 = 0,

    each physical root (-1/2 <= Z < 0) fixing the in-plane direction via
    (X, Y) proportional to (m, -a) with a = omega_z + c lx^2 omega_c,
    m = c lx ly kappa, and the cavity via
    alpha = -(2i lx X + 2 ly Y)/(i omega_c + kappa).  One representative
    per Z2 pair is returned, sorted by descending Z.
    """
    wc, wz = params.omega_c, params.omega_z
    lx, ly, k = params.lambda_x, params.lambda_y, params.kappa
    quad_a = lx * lx * ly * ly * (wc * wc + k * k)
    quad_b = wc * wz * (lx * lx + ly * ly)
    quad_c = wz * wz
    if quad_a < 1e-30:
        roots = [-quad_c / quad_b] if quad_b > 0 else []
    else:
        disc = quad_b * quad_b - 4.0 * quad_a * quad_c
        if disc < 0:
            roots = []
        else:
            sq = np.sqrt(disc)
            roots = [(-quad_b + sq) / (2 * quad_a), (-quad_b - sq) / (2 * quad_a)]
    out = []
    for c in roots:
        sz = c * (k * k + wc * wc) / 8.0
        if not (-0.5 <= sz < 0.0):
            continue
        a_fac = wz + c * lx * lx * wc
        m_fac = c * lx * ly * k
        if abs(m_fac) > 1e-14:
            dx, dy = m_fac, -a_fac
        else:
            b_fac = wz + c * ly * ly * wc
            dx, dy = ((1.0, 0.0) if abs(a_fac) <= abs(b_fac) else (0.0, 1.0))
        nrm = float(np.hypot(dx, dy))
        radius = np.sqrt(max(0.25 - sz * sz, 0.0))
        sx, sy = radius * dx / nrm, radius * dy / nrm
        alpha = -(2j * lx * sx + 2.0 * ly * sy) / (1j * wc + k)
        out.append(np.array([alpha.real, alpha.imag, sx, sy, sz]))
    out.sort(key=lambda v: -v[4])
    return out


def residual_and_jacobian(params: IdtcParams):
    """Sphere-constrained residual/Jacobian callables for root finding.

    The residual appends the constraint |S|^2 - 1/4 to the five flow
    components; the 6x5 Jacobian drives Gauss-Newton steps.
    """

    def residual(v):
        cons = v[2] ** 2 + v[3] ** 2 + v[4] ** 2 - 0.25
        return np.concatenate([_rhs_vec(params, v), [cons]])

    def jacobian(v):
        grad = np.array([[0.0, 0.0, 2.0 * v[2], 2.0 * v[3], 2.0 * v[4]]])
        return np.vstack([_jacobian_vec(params, v), grad])

    return residual, jacobian


def default_seeds(params: IdtcParams):
    """Sphere-grid seeds plus closed-form candidates for the SP search."""
    seeds = []
    for sz in (-0.45, -0.35, -0.2, -0.05):
        radius = np.sqrt(0.25 - sz * sz)
        for j in range(8):
            ang = 2.0 * np.pi * j / 8.0
            sx, sy = radius * np.cos(ang), radius * np.sin(ang)
            alpha = -(2j * params.lambda_x * sx + 2.0 * params.lambda_y * sy) / (
                1j * params.omega_c + params.kappa
            )
            seeds.append(np.array([alpha.real, alpha.imag, sx, sy, sz]))
    seeds.extend(sp_candidates_closed_form(params))
    return seeds


def _canonical_pair_sign(v: np.ndarray) -> np.ndarray:
    """Pick the Z2 representative: first significant in-plane component > 0."""
    for comp in (v[2], v[3], v[0], v[1]):
        if abs(comp) > 1e-10:
            return v if comp > 0 else v * np.array([-1, -1, -1, -1, 1.0])
    return v


def open_steady_states(params: IdtcParams, seeds=None, tol=1e-12):
    """All mean-field steady states: the NP plus Z2 pairs of SPs.

    SP branches are located by damped multi-start Newton on the
    sphere-constrained residual (seed policy: sphere grid with
    cavity-consistent amplitudes, plus closed-form candidates).  Every
    returned state satisfies the flow equations to 1e-10 and sits on the
    spin sphere to 1e-9; each SP is returned with its Z2 partner.
    """
    states = [normal_phase()]
    if params.lambda_x == 0.0 and params.lambda_y == 0.0:
        return states
    if seeds is None:
        seeds = default_seeds(params)
    if len(seeds) == 0:
        return states
    residual, jacobian = residual_and_jacobian(params)
    roots = newton_multistart(residual, jacobian, seeds, tol=tol)

    reps = []
    for root in roots:
        if np.linalg.norm(root[:4]) < 1e-8:
            continue  # the NP (or its antipode handled below)
        v = _canonical_pair_sign(root)
        if v[4] > 0.49999999:
            continue  # spin-up pole: stationary only without coupling
        if any(np.linalg.norm(v - u) < 1e-8 for u in reps):
            continue
        resid = float(np.linalg.norm(_rhs_vec(params, v)))
        if resid > STEADY_STATE_TOL:
            raise StabilityError(
                f"multistart root fails the steady-state bound ({resid:.3e})"
            )
        reps.append(v)
    reps.sort(key=lambda v: -v[4])
    for i, v in enumerate(reps):
        partner = v * np.array([-1, -1, -1, -1, 1.0])
        states.append(
            IdtcState(complex(v[0], v[1]), v[2], v[3], v[4], "SP", 2 * i + 1)
        )
        states.append(
            IdtcState(
                complex(partner[0], partner[1]),
                partner[2],
                partner[3],
                partner[4],
                "SP",
                2 * i + 2,
            )
        )
    return states


def closed_ground_state(params: IdtcParams):
    """Closed-system (kappa ignored) ground state(s) with energies.

    Below the critical coupling the NP (spin down, empty cavity) is the
    ground state.  Above it the dominant coupling axis orders: the SP pair
    has Z = -lambda_c^2/(2*lambda_d^2) with lambda_d = max(lambda_x,
    lambda_y), in-plane magnetization along that axis, and a real
    (x-type) or imaginary (y-type) cavity amplitude.  On the
    Tavis-Cummings diagonal the in-plane direction is U(1) degenerate and
    the x-axis representative is returned.
    """
    lam_c = critical_coupling(params)
    np_state = normal_phase()
    np_state.energy = mf_energy(params, np_state)
    lam_d = max(params.lambda_x, params.lambda_y)
    if lam_d <= lam_c:
        return [np_state]
    sz = -(lam_c ** 2) / (2.0 * lam_d ** 2)
    radius = np.sqrt(0.25 - sz * sz)
    if params.lambda_x >= params.lambda_y:
        sx, sy = radius, 0.0
        alpha = complex(-2.0 * params.lambda_x * sx / params.omega_c, 0.0)
    else:
        sx, sy = 0.0, radius
        alpha = complex(0.0, 2.0 * params.lambda_y * sy / params.omega_c)
    pair = []
    for sign, branch in ((1.0, 1), (-1.0, 2)):
        st = IdtcState(sign * alpha, sign * sx, sign * sy, sz, "SP", branch)
        st.energy = mf_energy(params, st)
        pair.append(st)
    return pair + [np_state]


# --------------------------------------------------------------------------
# NP fluctuation forms and closed-form response
# --------------------------------------------------------------------------

def np_quadratic_form(params: IdtcParams) -> QuadraticForm:
    """NP fluctuation form, doubled basis ordered (a, b, a^dag, b^dag).

    b is the spin fluctuation mode (spin-wave expansion around the south
    pole); the rotating coupling enters as lambda_x + lambda_y, the
    counter-rotating one as lambda_x - lambda_y.
    """
    wc, wz = params.omega_c, params.omega_z
    lp = params.lambda_x + params.lambda_y
    lm = params.lambda_x - params.lambda_y
    h = np.array(
        [
            [wc, lp, 0.0, lm],
            [lp, wz, lm, 0.0],
            [0.0, lm, wc, lp],
            [lm, 0.0, lp, wz],
        ],
        dtype=complex,
    )
    return QuadraticForm(h)


def keldysh_fluctuation_form_np(params: IdtcParams):
    """(QuadraticForm, per-mode losses): cavity decays, spin is lossless."""
    return np_quadratic_form(params), (params.kappa, 0.0)


@dataclass
class NpExcitations:
    """Soft/hard NP excitation pairs with their closed-form frequencies."""

    soft: tuple[ExcitationMode, ExcitationMode]
    hard: tuple[ExcitationMode, ExcitationMode]
    soft_frequency: complex
    hard_frequency: float


def np_excitation_frequencies(params: IdtcParams):
    """Closed-form squared NP excitation frequencies (soft, hard).

    omega^2_{s,h} = (wc^2 + wz^2 + 8 lx ly -+ R)/2 with
    R = sqrt((wc^2 - wz^2)^2 + 16 [lx ly (wc^2 + wz^2) + wc wz (lx^2 + ly^2)]).
    Equivalently, omega^2_s and omega^2_h are the roots of
    u^2 - (wc^2 + wz^2 + 8 lx ly) u + (4 lx^2 - wc wz)(4 ly^2 - wc wz) = 0,
    the kappa = 0 denominator of the closed-form cavity response.  The
    soft branch crosses zero exactly when the dominant coupling reaches
    the critical value sqrt(wc wz)/2.
    """
    wc, wz = params.omega_c, params.omega_z
    lx, ly = params.lambda_x, params.lambda_y
    root = np.sqrt(
        (wc * wc - wz * wz) ** 2
        + 16.0 * (lx * ly * (wc * wc + wz * wz) + wc * wz * (lx * lx + ly * ly))
    )
    base = wc * wc + wz * wz + 8.0 * lx * ly
    return 0.5 * (base - root), 0.5 * (base + root)


def closed_np_excitations(params: IdtcParams) -> NpExcitations:
    """NP excitations of the closed system, soft mode flagged.

    Diagonalizes the 4x4 NP form and cross-checks every frequency against
    the closed-form branches to 1e-10 (raising NumericsError on mismatch).
    Above the critical coupling the soft pair is imaginary and flagged
    unphysical.
    """
    w2_soft, w2_hard = np_excitation_frequencies(params)
    soft_freq = complex(np.sqrt(complex(w2_soft)))
    hard_freq = float(np.sqrt(w2_hard))
    modes, _ = diagonalize_excitations(np_quadratic_form(params))

    def take_pair(target):
        scored = sorted(
            modes, key=lambda m: min(abs(m.frequency - target), abs(m.frequency + target))
        )
        pair = scored[:2]
        pair.sort(key=lambda m: (-m.frequency.real, -m.frequency.imag))
        return pair

    hard_pair = take_pair(hard_freq)
    soft_pair = [m for m in modes if all(m is not h for h in hard_pair)]
    soft_pair.sort(key=lambda m: (-m.frequency.real, -m.frequency.imag))

    scale = max(1.0, hard_freq)
    for mode, target in (
        (hard_pair[0], hard_freq),
        (hard_pair[1], -hard_freq),
        (soft_pair[0], soft_freq),
        (soft_pair[1], -soft_freq),
    ):
        if min(abs(mode.frequency - target), abs(mode.frequency + np.conj(target))) > CROSSCHECK_TOL * scale:
            raise NumericsError(
                "NP excitation cross-check failed: matrix frequency "
                f"{mode.frequency} vs closed form {target}"
            )
    return NpExcitations(
        soft=(soft_pair[0], soft_pair[1]),
        hard=(hard_pair[0], hard_pair[1]),
        soft_frequency=soft_freq,
        hard_frequency=hard_freq,
    )


def np_retarded_green_closed_form(params: IdtcParams, omega):
    """Closed-form NP cavity response (retarded, particle component).

    Rational in omega; the denominator zeros are the four NP excitation
    poles shifted by the cavity loss.  Scalar or array omega.

    Raises
    ------
    PoleError
        When evaluated exactly at a zero of the denominator.
    """
    wc, wz = params.omega_c, params.omega_z
    lx, ly, k = params.lambda_x, params.lambda_y, params.kappa
    w = np.asarray(omega, dtype=complex)
    ssum = lx * lx + ly * ly
    num = 2.0 * wz * ssum - 4.0 * lx * ly * w + (w * w - wz * wz) * (1j * k + w + wc)
    den = (
        16.0 * lx * lx * ly * ly
        - 8.0 * lx * ly * w * (w + 1j * k)
        - 4.0 * wc * wz * ssum
        + (w * w - wz * wz) * ((w + 1j * k) ** 2 - wc * wc)
    )
    if np.any(den == 0):
        raise PoleError("closed-form response evaluated exactly at a pole")
    out = num / den
    return out if out.ndim else complex(out)
