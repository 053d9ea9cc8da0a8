"""Bosonic Bogoliubov diagonalization with symplectic-norm bookkeeping.

A quadratic bosonic form H (Hermitian, written in the doubled basis
(a_1..a_N, a_1^dag..a_N^dag)) is diagonalized through its *dynamical
matrix* D = I_- H, where I_- = diag(+1_N, -1_N).  D is generally
non-Hermitian: its eigenvalues come in (+w, -w) pairs and its eigenvectors
carry a symplectic norm v^dag I_- v whose sign distinguishes particle-like
(+) from hole-like (-) excitations.  A stable-but-inverted mode -- positive
damping yet negative norm at positive frequency -- is the fingerprint of a
dissipation-stabilized phase, which is why the norm is tracked explicitly
everywhere instead of being normalized away.

Conventions fixed here and relied on by the rest of the package:

* the dynamical matrix carries no 1/2 prefactor, so for a single mode the
  zero-coupling gap equals the bare detuning;
* eigenvalues/modes are ordered by descending real part (ties: descending
  imaginary part), matching `numerics.eig`;
* transform columns are ordered positive-norm first.
"""

import numpy as np
from dataclasses import dataclass, field

from .numerics import (
    DegenerateInputError,
    NumericsError,
    ValidationError,
    eig,
)

HERMITICITY_TOL = 1e-12
IMAG_FREQ_TOL = 1e-9      # |Im w| above this marks the mode unphysical
NORM_ZERO_TOL = 1e-9      # |ds^2| below this marks a critical/diabolical mode
PARA_UNITARITY_TOL = 1e-9


def particle_hole_metric(n_modes: int) -> np.ndarray:
    """Return I_- = diag(+1_N, -1_N) for N modes."""
    if n_modes < 1:
        raise ValidationError(f"need at least one mode, got {n_modes}")
    return np.diag(np.concatenate([np.ones(n_modes), -np.ones(n_modes)]))


@dataclass
class QuadraticForm:
    """Hermitian quadratic bosonic form in the doubled (a, a^dag) basis.

    Attributes
    ----------
    matrix : ndarray, shape (2N, 2N)
        Hermitian coefficient matrix.
    constant_offset : float
        Scalar energy offset carried along for bookkeeping (does not enter
        the dynamics).
    """

    matrix: np.ndarray
    constant_offset: float = 0.0

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError(f"matrix must be square, got shape {m.shape}")
        if m.shape[0] % 2 != 0:
            raise ValidationError(
                f"doubled basis requires even dimension, got {m.shape[0]}"
            )
        scale = max(float(np.max(np.abs(m))), 1.0)
        if np.max(np.abs(m - m.conj().T)) > HERMITICITY_TOL * scale:
            raise ValidationError("matrix is not Hermitian")
        self.matrix = m

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0] // 2


@dataclass
class ExcitationMode:
    """One Bogoliubov excitation.

    Attributes
    ----------
    frequency : complex
        Eigenvalue of the dynamical matrix.
    eigenvector : ndarray
        Unit-norm right eigenvector in the doubled basis.
    symplectic_norm : float
        ds^2 = v^dag I_- v of the (unit-norm) eigenvector.
    physical : bool
        True when |Im frequency| <= 1e-9 (real excitation energy).
    """

    frequency: complex
    eigenvector: np.ndarray
    symplectic_norm: float
    physical: bool


@dataclass
class BogoliubovTransform:
    """Para-unitary transform V with V^dag I_- V = I_-.

    Columns are symplectically normalized eigenvectors of the dynamical
    matrix, positive-norm columns first (descending frequency), then the
    negative-norm partners (ascending frequency, so column N+k partners
    column k).
    """

    matrix: np.ndarray
    n_modes: int = field(default=0)

    def __post_init__(self):
        v = np.asarray(self.matrix, dtype=complex)
        n = v.shape[0] // 2
        self.n_modes = n
        metric = particle_hole_metric(n)
        gram = v.conj().T @ metric @ v
        if np.max(np.abs(gram - metric)) > PARA_UNITARITY_TOL:
            raise NumericsError(
                "transform is not para-unitary: max deviation "
                f"{np.max(np.abs(gram - metric)):.3e}"
            )
        self.matrix = v


def dynamical_matrix(form: QuadraticForm) -> np.ndarray:
    """Return D = I_- H for a validated quadratic form (no 1/2 prefactor)."""
    if not isinstance(form, QuadraticForm):
        form = QuadraticForm(np.asarray(form))
    return particle_hole_metric(form.n_modes) @ form.matrix


def symplectic_norm(vector) -> float:
    """Symplectic norm ds^2 = v^dag I_- v of a doubled-basis vector.

    The value is real for any vector (I_- is Hermitian); hole-like
    excitations have ds^2 < 0.

    Raises
    ------
    DegenerateInputError
        For a (numerically) zero vector, whose norm sign is undefined.
    """
    v = np.asarray(vector, dtype=complex).ravel()
    if v.size % 2 != 0:
        raise ValidationError(f"doubled basis requires even length, got {v.size}")
    nrm = np.linalg.norm(v)
    if nrm == 0.0 or not np.isfinite(nrm):
        raise DegenerateInputError("symplectic norm of the zero vector is undefined")
    metric = particle_hole_metric(v.size // 2)
    return float(np.real(v.conj() @ metric @ v))


def _fix_phase(v: np.ndarray) -> np.ndarray:
    """Deterministic gauge: first significantly nonzero component real-positive."""
    idx = np.flatnonzero(np.abs(v) > 1e-12 * np.max(np.abs(v)))
    pivot = v[idx[0]] if idx.size else v[0]
    if pivot == 0:
        return v
    return v * (abs(pivot) / pivot)


def _metric_gram_schmidt(columns, norms, metric):
    """I_- -orthogonalize degenerate-frequency columns (signature-aware)."""
    out = []
    for v, ds in zip(columns, norms):
        w = v.copy()
        for u, du in out:
            w = w - u * ((u.conj() @ metric @ w) / du)
        ds_w = float(np.real(w.conj() @ metric @ w))
        out.append((w, ds_w))
    return [c for c, _ in out], [d for _, d in out]


def diagonalize_excitations(form: QuadraticForm):
    """Diagonalize a quadratic form into excitation modes.

    Parameters
    ----------
    form : QuadraticForm

    Returns
    -------
    (modes, transform)
        ``modes`` is a list of ExcitationMode sorted like `numerics.eig`
        output; ``transform`` is a BogoliubovTransform when every mode is
        physical with |ds^2| > 1e-9, and None otherwise (complex spectrum,
        or a critical zero-norm mode at a phase boundary).  This function
        never raises on unstable/critical spectra -- flags carry the
        information instead.
    """
    d = dynamical_matrix(form)
    system = eig(d)
    n = form.n_modes
    metric = particle_hole_metric(n)

    modes = []
    for val, vec in zip(system.values, system.vectors.T):
        vec = _fix_phase(vec)
        modes.append(
            ExcitationMode(
                frequency=complex(val),
                eigenvector=vec,
                symplectic_norm=float(np.real(vec.conj() @ metric @ vec)),
                physical=bool(abs(val.imag) <= IMAG_FREQ_TOL),
            )
        )

    if not all(m.physical for m in modes):
        return modes, None
    if any(abs(m.symplectic_norm) < NORM_ZERO_TOL for m in modes):
        # critical mode: symplectic normalization impossible at the boundary
        return modes, None

    # group equal frequencies (within tolerance) for metric orthogonalization
    positive = [m for m in modes if m.symplectic_norm > 0]
    negative = [m for m in modes if m.symplectic_norm < 0]
    if len(positive) != n or len(negative) != n:
        return modes, None
    positive.sort(key=lambda m: -m.frequency.real)
    negative.sort(key=lambda m: m.frequency.real)

    cols = []
    for group in (positive, negative):
        i = 0
        while i < len(group):
            j = i + 1
            while (
                j < len(group)
                and abs(group[j].frequency.real - group[i].frequency.real) < 1e-9
            ):
                j += 1
            block = group[i:j]
            vecs = [m.eigenvector for m in block]
            norms = [m.symplectic_norm for m in block]
            if len(block) > 1:
                vecs, norms = _metric_gram_schmidt(vecs, norms, metric)
            for v, ds in zip(vecs, norms):
                if abs(ds) < NORM_ZERO_TOL:
                    return modes, None
                cols.append(_fix_phase(v / np.sqrt(abs(ds))))
            i = j
    transform = BogoliubovTransform(np.column_stack(cols))
    return modes, transform
