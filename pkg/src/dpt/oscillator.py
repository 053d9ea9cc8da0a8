"""Damped harmonic oscillator reference model.

The classical noisy oscillator x'' = -omega0^2 x - kappa x' + xi(t) with
<xi(t) xi(t')> = sigma^2 delta(t - t') is the minimal system showing the two
ingredients the larger models combine: an overdamped (exceptional-point-like)
eigenvalue collision at kappa = 2 omega0, and a stationary covariance that
stays perfectly smooth across that collision.  Everything is closed-form;
the Lyapunov route exists purely as a cross-check, so no stochastic
integrator is provided or needed.
"""

import numpy as np
from dataclasses import dataclass

from .numerics import StabilityError, ValidationError


@dataclass(frozen=True)
class OscParams:
    """Parameters of the noisy damped oscillator.

    Attributes
    ----------
    omega0 : float
        Bare frequency (>= 0).
    kappa : float
        Friction coefficient (>= 0).
    sigma : float
        White-noise strength (>= 0); enters variances as sigma^2.
    """

    omega0: float
    kappa: float
    sigma: float = 1.0

    def __post_init__(self):
        for name in ("omega0", "kappa", "sigma"):
            v = getattr(self, name)
            if not np.isfinite(v):
                raise ValidationError(f"{name} must be finite, got {v}")
            if v < 0:
                raise ValidationError(f"{name} must be >= 0, got {v}")


def companion_matrix(params: OscParams) -> np.ndarray:
    """Drift matrix of the (x, p) first-order system."""
    return np.array([[0.0, 1.0], [-params.omega0 ** 2, -params.kappa]])


def overdamped_eigenvalues(params: OscParams):
    """Closed-form drift eigenvalues and the overdamped flag.

    Returns
    -------
    (eigenvalues, overdamped)
        ``eigenvalues`` is a length-2 complex array sorted by descending
        real part (ties: descending imaginary part);
        ``overdamped`` is True when both are real and distinct with
        kappa > 0, i.e. strictly beyond the coalescence kappa = 2 omega0.
        At exact coalescence both eigenvalues are -kappa/2 and the flag
        is False (they are not distinct).
    """
    k, w0 = params.kappa, params.omega0
    disc = k * k - 4.0 * w0 * w0
    if disc > 0:
        root = np.sqrt(disc)
        pair = np.array([(-k + root) / 2.0, (-k - root) / 2.0], dtype=complex)
        overdamped = k > 0
    elif disc == 0:
        pair = np.array([-k / 2.0, -k / 2.0], dtype=complex)
        overdamped = False
    else:
        root = np.sqrt(-disc)
        pair = np.array([(-k + 1j * root) / 2.0, (-k - 1j * root) / 2.0])
        overdamped = False
    return pair, overdamped


def overdamped_variance(params: OscParams):
    """Stationary variances (Var x, Var p) of the noisy oscillator.

    Var x = sigma^2 / (2 kappa omega0^2),  Var p = sigma^2 / (2 kappa);
    the cross-covariance vanishes identically.  Valid on both sides of the
    eigenvalue coalescence -- the covariance does not feel the overdamped
    transition.

    Raises
    ------
    StabilityError
        If kappa = 0 or omega0 = 0: the drift is not Hurwitz and no
        stationary distribution exists.
    """
    k, w0, s = params.kappa, params.omega0, params.sigma
    if k == 0.0 or w0 == 0.0:
        raise StabilityError(
            "no stationary distribution: need kappa > 0 and omega0 > 0"
        )
    return s * s / (2.0 * k * w0 * w0), s * s / (2.0 * k)


def rotating_spectral_function(detuning: float, kappa: float, omega):
    """Spectral function of an empty damped mode in a rotating frame.

    A(omega) = 2 kappa / ((omega + detuning)^2 + kappa^2): a unit-weight
    Lorentzian centered at -detuning.  Accepts scalar or array omega.

    Raises
    ------
    ValidationError
        If kappa <= 0 (the Lorentzian degenerates to a delta function).
    """
    if not (kappa > 0):
        raise ValidationError(f"need kappa > 0, got {kappa}")
    w = np.asarray(omega, dtype=float)
    out = 2.0 * kappa / ((w + detuning) ** 2 + kappa ** 2)
    return out if out.ndim else float(out)
