"""Operator algebra on the emitter (x) cavity Hilbert space.

The emitter has three levels, 1 = ground, 2 = exciton, 3 = pump level,
stored at emitter indices 0, 1, 2.  The cavity is a Fock space truncated at
``n_fock`` photons.  Basis index of ``|level, n>`` is::

    index = (level - 1) * (n_fock + 1) + n

i.e. the emitter is the slow (left) tensor factor.  Operators and density
matrices are dense complex ``numpy`` arrays.
"""

from dataclasses import dataclass

import numpy as np

EMITTER_DIM = 3
GROUND, EXCITON, PUMP = 1, 2, 3


class InvalidDimensionError(ValueError):
    pass


class InvalidLevelError(ValueError):
    pass


class DimensionMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class HilbertSpace:
    """Three-level emitter coupled to a single cavity mode."""

    n_fock: int

    def __post_init__(self):
        if int(self.n_fock) != self.n_fock or self.n_fock < 1:
            raise InvalidDimensionError(f"n_fock must be an integer >= 1, got {self.n_fock!r}")

    @property
    def emitter_dim(self):
        return EMITTER_DIM

    @property
    def cavity_dim(self):
        return self.n_fock + 1

    @property
    def total_dim(self):
        return EMITTER_DIM * self.cavity_dim

    def index(self, level, photons):
        """Basis index of ``|level, photons>`` (level counted from 1)."""
        _check_level(level)
        if not 0 <= photons <= self.n_fock:
            raise InvalidDimensionError(f"photon number {photons} outside 0..{self.n_fock}")
        return (level - 1) * self.cavity_dim + photons

    def label(self, index):
        """Inverse of :meth:`index`: returns ``(level, photons)``."""
        if not 0 <= index < self.total_dim:
            raise InvalidDimensionError(f"index {index} outside 0..{self.total_dim - 1}")
        level, photons = divmod(index, self.cavity_dim)
        return level + 1, photons


def make_space(n_fock=2):
    return HilbertSpace(n_fock)


def _check_level(level):
    if level not in (1, 2, 3):
        raise InvalidLevelError(f"emitter level must be 1, 2 or 3, got {level!r}")


def _check_square(A, dim=None):
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {A.shape}")
    if dim is not None and A.shape[0] != dim:
        raise DimensionMismatchError(f"expected dimension {dim}, got {A.shape[0]}")
    return A


def _check_pair(A, B):
    A = _check_square(A)
    B = _check_square(B)
    if A.shape != B.shape:
        raise DimensionMismatchError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return A, B


def identity(space):
    return np.eye(space.total_dim, dtype=complex)


def annihilation(space):
    """Cavity lowering operator ``I_emitter (x) a``."""
    a = np.diag(np.sqrt(np.arange(1, space.cavity_dim, dtype=float)), k=1)
    return np.kron(np.eye(EMITTER_DIM), a).astype(complex)


def creation(space):
    return adjoint(annihilation(space))


def number(space):
    """Photon number ``a^dag a``; diagonal with the photon count of each basis state."""
    n = np.tile(np.arange(space.cavity_dim, dtype=float), EMITTER_DIM)
    return np.diag(n).astype(complex)


def sigma(space, to_level, from_level):
    """Emitter transition ``|to_level><from_level| (x) I_cavity``."""
    _check_level(to_level)
    _check_level(from_level)
    s = np.zeros((EMITTER_DIM, EMITTER_DIM))
    s[to_level - 1, from_level - 1] = 1.0
    return np.kron(s, np.eye(space.cavity_dim)).astype(complex)


def top_fock_projector(space):
    """Projector onto all basis states holding ``n_fock`` photons."""
    p = np.zeros((space.cavity_dim, space.cavity_dim))
    p[-1, -1] = 1.0
    return np.kron(np.eye(EMITTER_DIM), p).astype(complex)


def adjoint(A):
    return _check_square(A).conj().T


def compose(A, B):
    A, B = _check_pair(A, B)
    return A @ B


def add_scaled(A, B, c=1.0):
    """Return ``A + c B``."""
    A, B = _check_pair(A, B)
    return A + c * B


def expectation(rho, A):
    """``Tr(A rho)`` as a complex number."""
    rho, A = _check_pair(rho, A)
    # Tr(A rho) = sum_ij A_ij rho_ji
    return complex(np.sum(A * rho.T))


def dissipator(L, rho):
    """Unscaled Lindblad dissipator ``L rho L^dag - {L^dag L, rho}/2``."""
    L, rho = _check_pair(L, rho)
    Ld = L.conj().T
    LdL = Ld @ L
    return L @ rho @ Ld - 0.5 * (LdL @ rho + rho @ LdL)


def basis_state(space, level, photons=0):
    """Pure density matrix ``|level, photons><level, photons|``."""
    rho = np.zeros((space.total_dim, space.total_dim), dtype=complex)
    i = space.index(level, photons)
    rho[i, i] = 1.0
    return rho


def maximally_mixed(space):
    return identity(space) / space.total_dim


def level_populations(rho, space):
    """Populations of the three emitter levels (traced over the cavity)."""
    diag = np.real(np.diagonal(rho, axis1=-2, axis2=-1))
    return diag.reshape(diag.shape[:-1] + (EMITTER_DIM, space.cavity_dim)).sum(axis=-1)


def density_matrix_errors(rho):
    """Return ``(trace_error, hermiticity_error, min_eigenvalue)`` for ``rho``."""
    rho = _check_square(rho)
    trace_error = abs(np.trace(rho) - 1.0)
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    min_eig = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
    return trace_error, herm, min_eig


def is_density_matrix(rho, herm_tol=1e-10, trace_tol=1e-8, eig_tol=1e-9):
    try:
        tr, herm, ev = density_matrix_errors(rho)
    except DimensionMismatchError:
        return False
    return tr < trace_tol and herm < herm_tol and ev >= -eig_tol
