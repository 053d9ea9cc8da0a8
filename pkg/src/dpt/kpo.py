"""Kerr parametric oscillator: mean-field landscape, steady states,
fluctuations and quadrature variances.

Model: a single cavity mode with detuning ``delta``, Kerr nonlinearity
``kerr`` (U), two-photon pump ``pump`` (complex G) and single-photon loss
``kappa``, in the frame rotating at half the pump frequency.  The
mean-field amplitude obeys::

    d(alpha)/dt = i*(delta*alpha - U*|alpha|^2*alpha - G*conj(alpha)) - kappa*alpha

Steady states are the normal phase (NP, alpha = 0) and parametric phase
states (PPS): finite-amplitude solutions that break the Z2 symmetry
alpha -> -alpha and therefore come in pi-shifted pairs.  Amplitudes and
phases are closed-form:

* photon number n solves |G|^2 = (delta - U n)^2 + kappa^2, giving the
  two branches n = (delta -+ s)/U with s = sqrt(|G|^2 - kappa^2);
* the phase obeys exp(2i*theta) = G*((delta - U n) - i*kappa)/|G|^2.

Linear stability comes from the Jacobian of the real/imaginary quadrature
flow.  Note that the Jacobian is *not* the quasilinear matrix M(alpha)
satisfying M*alpha = rhs -- differentiating the cubic term produces extra
anomalous contributions (the x^2+3y^2 / 3x^2+y^2 entries below); the
quasilinear form is singular at every finite-amplitude fixed point and
would misclassify all of them.  Both matrices coincide at the NP.
"""

import numpy as np
from dataclasses import dataclass

from .bogoliubov import QuadraticForm
from .numerics import (
    StabilityError,
    StabilityReport,
    ValidationError,
    eig,
    solve_lyapunov,
    stability_verdict,
)

# A constructed steady state must satisfy the mean-field equation this well.
STEADY_STATE_TOL = 1e-10
# Tolerance when *validating* a state handed back to us (stale-state guard).
STALE_STATE_TOL = 1e-8


@dataclass(frozen=True)
class KpoParams:
    """Kerr parametric oscillator parameters (rotating frame).

    Attributes
    ----------
    delta : float
        Pump-cavity detuning.
    kerr : float
        Kerr coefficient U; must be nonzero (the model is defined by its
        quartic landscape).
    pump : complex
        Two-photon drive amplitude G (complex; only |G| enters phase
        boundaries, the phase rotates the quadrature ellipse).
    kappa : float
        Single-photon loss rate, >= 0.
    """

    delta: float
    kerr: float
    pump: complex
    kappa: float = 0.0

    def __post_init__(self):
        vals = (self.delta, self.kerr, abs(self.pump), self.kappa)
        if not all(np.isfinite(v) for v in vals):
            raise ValidationError("parameters must be finite")
        if self.kerr == 0.0:
            raise ValidationError("kerr must be nonzero")
        if self.kappa < 0.0:
            raise ValidationError(f"kappa must be >= 0, got {self.kappa}")


@dataclass
class KpoState:
    """One mean-field state of the KPO.

    label is "NP" (alpha = 0) or "PPS"; branch numbering: 0 = NP,
    1/2 = the small-amplitude pair +-alpha_1, 3/4 = the large-amplitude
    pair +-alpha_3 (3/4 is also used for the closed-system pair, which is
    the kappa -> 0 limit of the large branch).  energy is the mean-field
    energy for closed-system states, None for open steady states.
    """

    alpha: complex
    label: str
    branch: int
    energy: float | None = None


def mf_energy(params: KpoParams, alpha: complex) -> float:
    """Mean-field energy E = -delta|a|^2 + (U/2)|a|^4 + Re(G conj(a)^2)."""
    a = complex(alpha)
    n = abs(a) ** 2
    return float(
        -params.delta * n
        + 0.5 * params.kerr * n * n
        + np.real(params.pump * np.conj(a) ** 2)
    )


def mean_field_rhs(params: KpoParams, alpha: complex) -> complex:
    """Time derivative of the mean-field amplitude."""
    a = complex(alpha)
    return (
        1j * (params.delta * a - params.kerr * abs(a) ** 2 * a - params.pump * np.conj(a))
        - params.kappa * a
    )


def _pps_phase(params: KpoParams, n: float) -> float:
    """Phase of a PPS branch with photon number n.

    From the steady-state condition, exp(2i*theta) =
    G*((delta - U*n) - i*kappa)/|G|^2.  For G = 0 (only reachable with
    kappa = 0) the phase circle is degenerate and theta = 0 is returned
    as the representative.
    """
    g = params.pump
    if abs(g) == 0.0:
        return 0.0
    z = g * ((params.delta - params.kerr * n) - 1j * params.kappa)
    return 0.5 * float(np.angle(z))


def closed_ground_state(params: KpoParams):
    """Closed-system (kappa ignored) ground state(s) with energies.

    Returns
    -------
    list of KpoState
        Ground state(s) first.  The NP is the ground state iff
        sign(U)*delta < -|G|; otherwise the Z2-broken pair with
        |alpha|^2 = (delta + sign(U)|G|)/U is returned (both partners),
        followed by the NP as a stationary reference point.
    """
    u, g = params.kerr, params.pump
    sgn = 1.0 if u > 0 else -1.0
    np_state = KpoState(0.0j, "NP", 0, energy=mf_energy(params, 0.0))
    if sgn * params.delta < -abs(g):
        return [np_state]
    n = (params.delta + sgn * abs(g)) / u
    if n <= 0.0:
        # boundary case sign(U)*delta == -|G|: the pair collapses onto the NP
        return [np_state]
    if abs(g) == 0.0:
        theta = 0.0  # degenerate U(1) circle; representative phase
    else:
        # closed-limit phase: exp(2i*theta) = -sign(U) * G/|G|
        theta = 0.5 * float(np.angle(-sgn * g))
    alpha = np.sqrt(n) * np.exp(1j * theta)
    pair = [
        KpoState(alpha, "PPS", 3, energy=mf_energy(params, alpha)),
        KpoState(-alpha, "PPS", 4, energy=mf_energy(params, -alpha)),
    ]
    return pair + [np_state]


def open_steady_states(params: KpoParams):
    """All mean-field steady states of the dissipative system.

    Returns
    -------
    list of KpoState
        The NP (branch 0) plus every existing PPS branch.  PPS branches
        require |G| >= kappa and a nonnegative photon number; when the two
        photon-number branches coincide (|G| = kappa) only one pair is
        emitted.  Every returned state satisfies
        |mean_field_rhs| <= 1e-10 * max(1, |alpha|).
    """
    states = [KpoState(0.0j, "NP", 0)]
    u, g, k = params.kerr, params.pump, params.kappa
    s_sq = abs(g) ** 2 - k * k
    if s_sq < 0.0:
        return states
    s = np.sqrt(s_sq)
    branches = [(3, (params.delta + s) / u), (1, (params.delta - s) / u)]
    if s == 0.0:
        branches = branches[:1]  # the two branches coincide
    for branch, n in branches:
        if n <= 0.0:
            continue
        theta = _pps_phase(params, n)
        alpha = np.sqrt(n) * np.exp(1j * theta)
        for b, a in ((branch, alpha), (branch + 1, -alpha)):
            resid = abs(mean_field_rhs(params, a))
            if resid > STEADY_STATE_TOL * max(1.0, abs(a)):
                raise StabilityError(
                    f"constructed PPS branch {b} misses the fixed point "
                    f"(residual {resid:.3e})"
                )
            states.append(KpoState(a, "PPS", b))
    return states


def _check_steady(params: KpoParams, state: KpoState):
    resid = abs(mean_field_rhs(params, state.alpha))
    if resid > STALE_STATE_TOL * max(1.0, abs(state.alpha)):
        raise ValidationError(
            f"state (branch {state.branch}) is not a steady state of these "
            f"parameters (residual {resid:.3e}); it is stale or mismatched"
        )


def _jacobian_xy(params: KpoParams, x: float, y: float) -> np.ndarray:
    """Quadrature-flow Jacobian at alpha = x + i y (any point, not only
    fixed points)."""
    u, k = params.kerr, params.kappa
    d = params.delta
    gre, gim = params.pump.real, params.pump.imag
    return np.array(
        [
            [2.0 * u * x * y + gim - k, -d + u * (x * x + 3.0 * y * y) - gre],
            [d - u * (3.0 * x * x + y * y) - gre, -2.0 * u * x * y - gim - k],
        ]
    )


def fluctuation_matrix(params: KpoParams, state: KpoState) -> np.ndarray:
    """Jacobian of the quadrature flow at a steady state.

    Entries (alpha = x + iy):

        [[ 2Uxy + Im G - kappa,   -delta + U(x^2+3y^2) - Re G ],
         [ delta - U(3x^2+y^2) - Re G,  -2Uxy - Im G - kappa  ]]

    Raises
    ------
    ValidationError
        If the state does not satisfy the steady-state equation for these
        parameters to 1e-8 (stale-state guard).
    """
    _check_steady(params, state)
    a = complex(state.alpha)
    return _jacobian_xy(params, a.real, a.imag)


def fluctuation_eigenvalues(params: KpoParams, state: KpoState) -> np.ndarray:
    """Closed-form fluctuation eigenvalues at a steady state.

    eps_+- = -kappa +- sqrt(|G + U alpha^2|^2 - (delta - 2U|alpha|^2)^2),
    with the square root taken over the complex numbers.  Matches
    ``eig(fluctuation_matrix(...))`` to 1e-10 (enforced by the test
    suite).  Sorted by descending real part, ties by descending imaginary
    part.
    """
    _check_steady(params, state)
    a = complex(state.alpha)
    n = abs(a) ** 2
    gap = params.delta - 2.0 * params.kerr * n
    mix = abs(params.pump + params.kerr * a * a) ** 2
    root = np.sqrt(complex(mix - gap * gap))
    pair = np.array([-params.kappa + root, -params.kappa - root])
    order = np.lexsort((-pair.imag, -pair.real))
    return pair[order]


def stability_report(params: KpoParams, state: KpoState, want_covariance: bool = True) -> StabilityReport:
    """Full linear-stability report (eigenvalues, verdict, covariance).

    The covariance solves M K + K M^T + D = 0 with vacuum-noise diffusion
    D = 2*kappa*I on the (Re alpha, Im alpha) quadratures; it is filled
    only for strictly stable states with kappa > 0.
    """
    eps = fluctuation_eigenvalues(params, state)
    stable, boundary = stability_verdict(eps)
    overdamped = bool(
        params.kappa > 0
        and np.all(np.abs(eps.imag) == 0.0)
        and abs(eps[0] - eps[1]) > 0.0
    )
    cov = None
    if want_covariance and stable and params.kappa > 0:
        m = fluctuation_matrix(params, state)
        cov = solve_lyapunov(m, 2.0 * params.kappa * np.eye(2))
    return StabilityReport(
        eigenvalues=eps,
        stable=stable,
        boundary=boundary,
        overdamped=overdamped,
        covariance=cov,
    )


def np_variance_closed_form(params: KpoParams):
    """Closed-form NP quadrature variances (Var Re alpha, Var Im alpha).

    With D = delta, G = pump, k = kappa and den = D^2 - |G|^2 + k^2:

        Var_Re = (D^2 + k*(Im G + k) + D*Re G) / den
        Var_Im = (D^2 + k*(k - Im G) - D*Re G) / den

    den > 0 is exactly the NP stability condition; the vacuum point
    delta = G = 0 gives (1, 1) (vacuum normalization).  At kappa = 0 the
    expression is the kappa -> 0+ limit of the stationary variances.

    Raises
    ------
    StabilityError
        If den <= 0 (on or beyond the NP instability boundary).
    """
    d, k = params.delta, params.kappa
    gre, gim = params.pump.real, params.pump.imag
    den = d * d - abs(params.pump) ** 2 + k * k
    if den <= 0.0:
        raise StabilityError(
            f"NP variance undefined: denominator {den:.3e} <= 0 "
            "(NP on/inside its instability boundary)"
        )
    var_re = (d * d + k * (gim + k) + d * gre) / den
    var_im = (d * d + k * (k - gim) - d * gre) / den
    return float(var_re), float(var_im)


def variance_lyapunov(params: KpoParams, state: KpoState) -> np.ndarray:
    """Stationary quadrature covariance by the numeric Lyapunov route.

    Works for any strictly stable steady state (NP or PPS), which is the
    route to use beyond the NP closed form.
    """
    if params.kappa <= 0:
        raise StabilityError("stationary covariance needs kappa > 0")
    m = fluctuation_matrix(params, state)
    return solve_lyapunov(m, 2.0 * params.kappa * np.eye(2))


def closed_excitation_form(params: KpoParams, state: KpoState) -> QuadraticForm:
    """Quadratic fluctuation form around a state, doubled basis (a, a^dag).

    H = [[-delta + 2U|a|^2,  G + U a^2      ],
         [conj(G + U a^2),  -delta + 2U|a|^2]]

    with the mean-field energy as constant offset.
    """
    a = complex(state.alpha)
    diag = -params.delta + 2.0 * params.kerr * abs(a) ** 2
    off = params.pump + params.kerr * a * a
    h = np.array([[diag, off], [np.conj(off), diag]], dtype=complex)
    return QuadraticForm(h, constant_offset=mf_energy(params, a))


def keldysh_fluctuation_form(params: KpoParams, state: KpoState):
    """(QuadraticForm, per-mode losses) feeding the response machinery."""
    return closed_excitation_form(params, state), (params.kappa,)


# --------------------------------------------------------------------------
# multistart root finding interface (used for oracle cross-checks and CLI)
# --------------------------------------------------------------------------

def residual_and_jacobian(params: KpoParams):
    """Residual/Jacobian callables over the real vector (Re a, Im a)."""

    def residual(v):
        rhs = mean_field_rhs(params, complex(v[0], v[1]))
        return np.array([rhs.real, rhs.imag])

    def jacobian(v):
        return _jacobian_xy(params, v[0], v[1])

    return residual, jacobian


def default_seeds(params: KpoParams):
    """Ring-of-starts seeding policy for the steady-state search.

    Rings at 8 angles, plus the origin.  Every steady state satisfies
    |alpha|^2 = (delta -+ s)/U with s <= |G|, so
    |alpha| <= R = sqrt((|delta| + |G|)/|U|); besides the fixed radii
    {0.1, 1} the ladder places rings at fractions {0.4, 0.65, 0.85, 1}
    of R, because the inner pair's Newton basin hugs mid radii and seeds
    on the bound itself slide to the outer pair.
    """
    radii = [0.1, 1.0]
    scale = (abs(params.delta) + abs(params.pump)) / abs(params.kerr)
    if scale > 0:
        bound = float(np.sqrt(scale))
        radii.extend(f * bound for f in (0.4, 0.65, 0.85, 1.0))
    seeds = [np.zeros(2)]
    for r in radii:
        for j in range(8):
            ang = 2.0 * np.pi * j / 8.0
            seeds.append(np.array([r * np.cos(ang), r * np.sin(ang)]))
    return seeds
