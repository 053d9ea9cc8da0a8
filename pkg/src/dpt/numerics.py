"""Shared numerical kernels: eigensystems, Lyapunov covariance, polynomial
roots and damped multi-start Newton root finding.

Everything here is model-agnostic.  Dense LAPACK routines (via numpy) are
used under the hood; every result is re-verified against an explicit
residual bound before it is returned, so callers can rely on the contracts
rather than on solver internals.
"""

import logging

import numpy as np
from dataclasses import dataclass

logger = logging.getLogger(__name__)

# Residual bounds enforced on solver output.
EIG_RESIDUAL_RTOL = 1e-10
LYAPUNOV_RESIDUAL_RTOL = 1e-10
ROOTS_RESIDUAL_RTOL = 1e-9

MAX_POLY_DEGREE = 8
MAX_NEWTON_STEPS = 200

# Verdict tolerance: eigenvalues with |Re| <= STABILITY_TOL sit on a phase
# boundary within numerical resolution and are flagged rather than judged.
STABILITY_TOL = 1e-9


class ValidationError(ValueError):
    """Malformed or inconsistent input (wrong shape, broken precondition)."""


class DegenerateInputError(ValueError):
    """Input is degenerate for the requested operation (e.g. zero vector)."""


class NumericsError(RuntimeError):
    """A solver finished but its result failed the residual contract."""


class ConvergenceError(RuntimeError):
    """An iterative routine exhausted its budget without converging."""


class StabilityError(RuntimeError):
    """Operation requires a strictly stable (Hurwitz) system and got none."""


class PoleError(ZeroDivisionError):
    """Evaluation requested exactly at a pole of a response function."""


class BracketingError(ValueError):
    """A bisection bracket does not actually bracket a sign/label change."""


@dataclass
class EigenSystem:
    """Eigenvalues and right eigenvectors of a dense matrix.

    Attributes
    ----------
    values : ndarray, shape (n,)
        Eigenvalues sorted by descending real part, ties broken by
        descending imaginary part.
    vectors : ndarray, shape (n, n)
        Unit-norm right eigenvectors; column ``i`` belongs to ``values[i]``.
    """

    values: np.ndarray
    vectors: np.ndarray


@dataclass
class StabilityReport:
    """Linear-stability verdict for one steady state.

    Attributes
    ----------
    eigenvalues : ndarray
        Fluctuation-matrix eigenvalues, sorted as in `eig`.
    stable : bool
        True when every relevant eigenvalue satisfies Re e < -STABILITY_TOL.
    boundary : bool
        True when the verdict sits within +-STABILITY_TOL of marginality.
    overdamped : bool
        True when the relevant eigenvalues are all real and distinct with
        nonzero damping (exceptional-point-like regime).
    covariance : ndarray or None
        Steady-state quadrature covariance (None when unstable or not
        requested).
    constraint_index : int or None
        Index into ``eigenvalues`` of an exact conserved-constraint zero
        mode (spin-length conservation); excluded from the verdict.
    """

    eigenvalues: np.ndarray
    stable: bool
    boundary: bool
    overdamped: bool
    covariance: np.ndarray | None = None
    constraint_index: int | None = None


def _as_square_matrix(a, name="matrix"):
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"{name} must be square 2-d, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{name} contains non-finite entries")
    return a


def eig(matrix):
    """Dense eigendecomposition with verified residuals and fixed ordering.

    Parameters
    ----------
    matrix : array_like, shape (n, n)
        Real or complex square matrix.

    Returns
    -------
    EigenSystem
        Sorted eigenpairs; every pair satisfies
        ``|A v - lam v| <= 1e-10 * |A|_F * |v|``.

    Raises
    ------
    ValidationError
        If the input is not a finite square matrix.
    NumericsError
        If a residual exceeds the contract bound.
    ConvergenceError
        If the underlying QR iteration fails to converge.
    """
    a = _as_square_matrix(matrix)
    try:
        values, vectors = np.linalg.eig(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ConvergenceError(f"eigenvalue iteration failed: {exc}") from exc

    order = np.lexsort((-values.imag, -values.real))
    values = values[order]
    vectors = vectors[:, order]
    norms = np.linalg.norm(vectors, axis=0)
    vectors = vectors / norms

    scale = np.linalg.norm(a)
    resid = np.linalg.norm(a @ vectors - vectors * values, axis=0)
    bound = EIG_RESIDUAL_RTOL * max(scale, 1e-300)
    if np.any(resid > bound):
        raise NumericsError(
            f"eigenpair residual {resid.max():.3e} exceeds {bound:.3e}"
        )
    return EigenSystem(values=values, vectors=vectors)


def stability_verdict(eigenvalues, tol=STABILITY_TOL):
    """Classify a spectrum as stable/unstable with a boundary flag.

    Returns
    -------
    (stable, boundary) : tuple of bool
        ``stable`` uses the strict rule Re e < -tol for all eigenvalues;
        ``boundary`` is True when the largest real part lies within
        ``+-tol`` of zero (the verdict is then a boundary sample; for
        labeling purposes boundary samples count as stable).
    """
    if len(eigenvalues) == 0:
        return True, False
    top = float(np.max(np.real(eigenvalues)))
    return top < -tol, abs(top) <= tol


def solve_lyapunov(m, d):
    """Solve the continuous Lyapunov equation M K + K M^T + D = 0.

    Uses the Kronecker-product vectorization solved directly by dense LU:
    the matrices here are tiny (2x2 ... 5x5) so the O(n^6) cost is
    irrelevant and the direct route keeps the result reproducible.

    Parameters
    ----------
    m : array_like, shape (n, n)
        Drift matrix; must be Hurwitz (all eigenvalues strictly damped).
    d : array_like, shape (n, n)
        Diffusion (inhomogeneity) matrix.

    Returns
    -------
    ndarray, shape (n, n)
        Stationary covariance K with residual
        ``|M K + K M^T + D|_F <= 1e-10 * max(|D|_F, |M|_F * |K|_F)``.
        The |M||K| term keeps the bound honest near marginal stability,
        where K itself grows like 1/|Re eps| and backward-stable solves
        cannot do better than roundoff relative to the terms being
        cancelled.

    Raises
    ------
    StabilityError
        If ``m`` is not Hurwitz (no stationary solution exists).
    NumericsError
        If the verified residual exceeds the bound.
    """
    m = _as_square_matrix(m, "M")
    d = _as_square_matrix(d, "D")
    if m.shape != d.shape:
        raise ValidationError(f"shape mismatch: M {m.shape} vs D {d.shape}")

    spectrum = eig(m).values
    top = float(np.max(spectrum.real))
    if top >= 0.0:
        raise StabilityError(
            f"drift matrix is not Hurwitz (max Re eigenvalue = {top:.3e}); "
            "no stationary covariance exists"
        )

    n = m.shape[0]
    ident = np.eye(n)
    # vec(M K) = (I (x) M) vec(K);  vec(K M^T) = (M (x) I) vec(K)
    lhs = np.kron(ident, m) + np.kron(m, ident)
    k = np.linalg.solve(lhs, -d.reshape(-1, order="F")).reshape((n, n), order="F")
    if np.allclose(d, d.T, rtol=0.0, atol=1e-14 * max(np.linalg.norm(d), 1.0)):
        k = 0.5 * (k + k.T)

    resid = np.linalg.norm(m @ k + k @ m.T + d)
    scale = max(np.linalg.norm(d), np.linalg.norm(m) * np.linalg.norm(k), 1e-300)
    bound = LYAPUNOV_RESIDUAL_RTOL * scale
    if resid > bound:
        raise NumericsError(
            f"Lyapunov residual {resid:.3e} exceeds {bound:.3e}"
        )
    return k


def roots_polynomial(coeffs):
    """Roots of a low-degree polynomial with verified residuals.

    Parameters
    ----------
    coeffs : array_like
        Coefficients, highest power first (numpy convention), degree <= 8.

    Returns
    -------
    ndarray
        Complex roots sorted by descending real part then descending
        imaginary part; each root r satisfies
        ``|p(r)| <= 1e-9 * max|coeff|``.

    Raises
    ------
    ValidationError
        Degree above 8 or non-finite coefficients.
    DegenerateInputError
        All coefficients zero (every point is a root).
    NumericsError
        A root fails the residual bound.
    """
    c = np.atleast_1d(np.asarray(coeffs, dtype=complex))
    if c.ndim != 1:
        raise ValidationError("coefficients must be one-dimensional")
    if not np.all(np.isfinite(c)):
        raise ValidationError("coefficients contain non-finite entries")
    if c.size - 1 > MAX_POLY_DEGREE:
        raise ValidationError(
            f"degree {c.size - 1} exceeds supported maximum {MAX_POLY_DEGREE}"
        )
    scale = float(np.max(np.abs(c))) if c.size else 0.0
    if scale == 0.0:
        raise DegenerateInputError("zero polynomial has no isolated roots")
    # strip numerically-zero leading coefficients so np.roots sees the true degree
    nz = np.flatnonzero(np.abs(c) > 1e-300)
    c = c[nz[0]:]
    if c.size == 1:
        return np.array([], dtype=complex)

    roots = np.roots(c)
    resid = np.abs(np.polyval(c, roots))
    bound = ROOTS_RESIDUAL_RTOL * scale
    if np.any(resid > bound):
        raise NumericsError(
            f"polynomial root residual {resid.max():.3e} exceeds {bound:.3e}"
        )
    order = np.lexsort((-roots.imag, -roots.real))
    return roots[order]


def _polish(residual_fn, jacobian_fn, x, r, rnorm):
    """Two undamped Newton steps past convergence.

    A simple root reached with |r| <= tol can still sit ~tol/sigma_min(J)
    away from the true solution, which defeats positional deduplication;
    quadratic convergence pushes the position to machine accuracy.
    """
    for _ in range(2):
        jac = np.asarray(jacobian_fn(x), dtype=float)
        try:
            if jac.shape[0] == jac.shape[1]:
                step = np.linalg.solve(jac, -r)
            else:
                step = np.linalg.lstsq(jac, -r, rcond=None)[0]
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(step)):
            break
        xn = x + step
        rn = np.asarray(residual_fn(xn), dtype=float)
        rn_norm = np.linalg.norm(rn)
        if rn_norm >= rnorm:
            break
        x, r, rnorm = xn, rn, rn_norm
    return x, rnorm


def _newton_single(residual_fn, jacobian_fn, seed, tol):
    """Damped Newton from one seed; returns (solution, |r|) or (None, |r|)."""
    x = np.array(seed, dtype=float)
    r = np.asarray(residual_fn(x), dtype=float)
    rnorm = np.linalg.norm(r)
    for _ in range(MAX_NEWTON_STEPS):
        if rnorm <= tol:
            return _polish(residual_fn, jacobian_fn, x, r, rnorm)
        jac = np.asarray(jacobian_fn(x), dtype=float)
        try:
            if jac.shape[0] == jac.shape[1]:
                step = np.linalg.solve(jac, -r)
            else:
                step = np.linalg.lstsq(jac, -r, rcond=None)[0]
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(jac, -r, rcond=None)[0]
        if not np.all(np.isfinite(step)):
            return None, rnorm
        # backtracking damping: accept the first decrease
        t = 1.0
        while t >= 1e-6:
            xn = x + t * step
            rn = np.asarray(residual_fn(xn), dtype=float)
            rn_norm = np.linalg.norm(rn)
            if rn_norm < rnorm * (1.0 - 1e-4 * t):
                x, r, rnorm = xn, rn, rn_norm
                break
            t *= 0.5
        else:
            return None, rnorm  # stuck: no damped step decreases the residual
    if rnorm <= tol:
        return _polish(residual_fn, jacobian_fn, x, r, rnorm)
    return None, rnorm


def newton_multistart(residual_fn, jacobian_fn, seeds, tol=1e-12):
    """Collect distinct roots of a nonlinear system from many Newton starts.

    Parameters
    ----------
    residual_fn : callable
        Maps a real vector x to the residual vector r(x).
    jacobian_fn : callable
        Maps x to the Jacobian dr/dx (may be rectangular; least-squares
        steps are used then).
    seeds : iterable of array_like
        Starting points.
    tol : float
        Convergence threshold on the residual 2-norm.

    Returns
    -------
    list of ndarray
        Deduplicated converged roots (pairwise separation > 10*tol),
        sorted lexicographically for determinism.  Empty when no seed
        converged; a diagnostic is logged in that case rather than raised,
        because "no root" is a legitimate answer for some parameters.
    """
    found = []
    best_fail = np.inf
    for seed in seeds:
        sol, rnorm = _newton_single(residual_fn, jacobian_fn, seed, tol)
        if sol is None:
            best_fail = min(best_fail, rnorm)
            continue
        for prev, prev_r in found:
            if np.linalg.norm(sol - prev) <= 10.0 * tol:
                if rnorm < prev_r:
                    prev[...] = sol
                break
        else:
            found.append((sol, rnorm))
    if not found:
        logger.warning(
            "newton_multistart: no seed converged (%d seeds, best residual %.3e, tol %.1e)",
            len(list(seeds)) if hasattr(seeds, "__len__") else -1,
            best_fail,
            tol,
        )
        return []
    sols = [s for s, _ in found]
    sols.sort(key=lambda v: tuple(np.round(v, 12)))
    return sols
