"""Two-qubit (and up to four-qubit) density operators.

Qubits are ordered big-endian: the leftmost tensor factor is qubit 0 and
carries the most significant bit of the computational-basis index, so
``|01>`` is basis index 1 and ``|10>`` is basis index 2. Subsystem labels
passed to :func:`partial_trace` are 0-based positions in that ordering.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Union

import numpy as np

from .errors import DimensionError, DomainError, InvalidStateError, NotXFormError

TOL_HERM = 1e-10
TOL_TRACE = 1e-10
TOL_PSD = 1e-10
TOL_X = 1e-10

MAX_DIM = 16

# slack on the theta <= pi/4 bound so inputs rounded to four decimals (0.7854) are accepted
THETA_SLACK = 5e-5

# index pairs that must vanish for an X-form 4x4 matrix
_OFF_X = [(0, 1), (0, 2), (1, 0), (1, 3), (2, 0), (2, 3), (3, 1), (3, 2)]


def _n_qubits(dim: int) -> int:
    n = dim.bit_length() - 1
    if dim < 2 or (1 << n) != dim or dim > MAX_DIM:
        raise DimensionError(f"dimension {dim} is not 2**n with 1 <= n <= 4")
    return n


def validate_density_matrix(matrix: np.ndarray) -> None:
    """Raise :class:`InvalidStateError` unless ``matrix`` is a density matrix.

    Checks Hermiticity, unit trace and positive semidefiniteness against the
    module tolerances.
    """
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise InvalidStateError(f"expected a square matrix, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise InvalidStateError("matrix has non-finite entries")
    herm_err = np.max(np.abs(matrix - matrix.conj().T))
    if herm_err > TOL_HERM:
        raise InvalidStateError(f"matrix is not Hermitian (max deviation {herm_err:.3g})")
    tr = np.trace(matrix)
    if abs(tr - 1) > TOL_TRACE:
        raise InvalidStateError(f"trace is {tr.real:.12g}, expected 1")
    lam_min = np.linalg.eigvalsh(0.5 * (matrix + matrix.conj().T))[0]
    if lam_min < -TOL_PSD:
        raise InvalidStateError(f"matrix is not positive semidefinite (eigenvalue {lam_min:.3g})")


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Immutable density matrix on 1 to 4 qubits.

    The wrapped array is copied, cast to ``complex128`` and made read-only.
    Construction validates the state unless ``validate=False`` is passed,
    which is reserved for internal callers that already guarantee validity.
    """

    matrix: np.ndarray
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128, copy=True)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"expected a square matrix, got shape {m.shape}")
        _n_qubits(m.shape[0])
        if self.validate:
            validate_density_matrix(m)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_qubits(self) -> int:
        return _n_qubits(self.dim)

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.matrix.copy() if copy else self.matrix
        return self.matrix.astype(dtype)

    def eigvalsh(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def allclose(self, other, atol: float = 1e-12) -> bool:
        return np.allclose(self.matrix, np.asarray(other), rtol=0, atol=atol)


StateLike = Union[DensityOperator, np.ndarray]


def as_density(state: StateLike) -> DensityOperator:
    """Coerce an array (or pass through a :class:`DensityOperator`), validating it."""
    if isinstance(state, DensityOperator):
        return state
    return DensityOperator(np.asarray(state))


def pure(vector) -> DensityOperator:
    """Projector onto the normalised ``vector``."""
    v = np.asarray(vector, dtype=np.complex128).ravel()
    nrm = np.linalg.norm(v)
    if nrm == 0:
        raise DomainError("zero vector has no projector")
    v = v / nrm
    return DensityOperator(np.outer(v, v.conj()))


def maximally_mixed(n_qubits: int) -> DensityOperator:
    d = 2**n_qubits
    return DensityOperator(np.eye(d) / d)


@dataclass(frozen=True)
class XFormState:
    """The seven scalars of an X-shaped two-qubit density matrix.

    ``a, b, c, d`` are the diagonal populations, ``w`` the ``|00><11|``
    coherence and ``z`` the ``|01><10|`` coherence.
    """

    a: float
    b: float
    c: float
    d: float
    w: complex = 0.0
    z: complex = 0.0

    def __post_init__(self):
        a, b, c, d = self.a, self.b, self.c, self.d
        if abs(a + b + c + d - 1) > TOL_TRACE:
            raise InvalidStateError(f"populations sum to {a + b + c + d:.12g}, expected 1")
        if min(a, b, c, d) < -TOL_PSD:
            raise InvalidStateError("negative population")
        if abs(self.w) ** 2 > a * d + TOL_PSD or abs(self.z) ** 2 > b * c + TOL_PSD:
            raise InvalidStateError("coherence too large for the populations")

    def matrix(self) -> np.ndarray:
        w, z = complex(self.w), complex(self.z)
        return np.array(
            [
                [self.a, 0, 0, w],
                [0, self.b, z, 0],
                [0, z.conjugate(), self.c, 0],
                [w.conjugate(), 0, 0, self.d],
            ],
            dtype=np.complex128,
        )

    def to_density(self) -> DensityOperator:
        return DensityOperator(self.matrix())


def to_xform(state: StateLike, tol: float = TOL_X) -> XFormState:
    """Extract ``(a, b, c, d, w, z)`` from a two-qubit X-form state.

    Raises :class:`NotXFormError` if any of the eight entries outside the
    diagonal and anti-diagonal exceeds ``tol`` in magnitude.
    """
    rho = as_density(state)
    if rho.dim != 4:
        raise DimensionError("to_xform needs a two-qubit state")
    m = rho.matrix
    worst = max(abs(m[i, j]) for i, j in _OFF_X)
    if worst > tol:
        raise NotXFormError(f"off-X entry of magnitude {worst:.3g}")
    return XFormState(
        a=float(m[0, 0].real),
        b=float(m[1, 1].real),
        c=float(m[2, 2].real),
        d=float(m[3, 3].real),
        w=complex(m[0, 3]),
        z=complex(m[1, 2]),
    )


@dataclass(frozen=True)
class AlmeidaParams:
    """Mixture weight ``k`` in [0, 1] and angle ``theta`` in [0, pi/4]."""

    k: float
    theta: float

    def __post_init__(self):
        if not 0.0 <= self.k <= 1.0:
            raise DomainError(f"k={self.k} outside [0, 1]")
        if not 0.0 <= self.theta <= math.pi / 4 + THETA_SLACK:
            raise DomainError(f"theta={self.theta} outside [0, pi/4]")


def phi_plus_theta(theta: float) -> np.ndarray:
    """State vector ``cos(theta)|00> + sin(theta)|11>``."""
    return np.array([math.cos(theta), 0.0, 0.0, math.sin(theta)], dtype=np.complex128)


def make_almeida(k: float, theta: float) -> DensityOperator:
    """Partially entangled state with coloured noise.

    ``k |phi(theta)><phi(theta)| + (1 - k) rho_A(theta) (x) I/2`` where
    ``rho_A(theta)`` is the reduced state of ``|phi(theta)>`` on qubit 0.
    """
    params = AlmeidaParams(k, theta)
    v = phi_plus_theta(params.theta)
    rho_a = np.diag([math.cos(params.theta) ** 2, math.sin(params.theta) ** 2])
    m = params.k * np.outer(v, v.conj()) + (1 - params.k) * np.kron(rho_a, np.eye(2) / 2)
    return DensityOperator(m)


def lhs_admissible(k: float, theta: float) -> bool:
    """True when the Almeida state ``(k, theta)`` is known to admit a local-hidden-state model.

    Condition: ``cos^2(2 theta) >= (2k - 1) / ((2 - k) k^3)``; at ``k = 0``
    the right-hand side diverges to minus infinity.
    """
    params = AlmeidaParams(k, theta)
    if params.k == 0:
        return True
    rhs = (2 * params.k - 1) / ((2 - params.k) * params.k**3)
    return math.cos(2 * params.theta) ** 2 >= rhs


class BellIndex(enum.IntEnum):
    """Labels of the four Bell states."""

    PHI1 = 1  # (|00> + |11>)/sqrt2
    PHI2 = 2  # (|00> - |11>)/sqrt2
    PHI3 = 3  # (|01> + |10>)/sqrt2
    PHI4 = 4  # (|01> - |10>)/sqrt2


_BELL_VECTORS = {
    BellIndex.PHI1: np.array([1, 0, 0, 1]) / math.sqrt(2),
    BellIndex.PHI2: np.array([1, 0, 0, -1]) / math.sqrt(2),
    BellIndex.PHI3: np.array([0, 1, 1, 0]) / math.sqrt(2),
    BellIndex.PHI4: np.array([0, 1, -1, 0]) / math.sqrt(2),
}


def bell_index(i) -> BellIndex:
    try:
        return BellIndex(int(i))
    except (ValueError, TypeError):
        raise DomainError(f"Bell index must be one of 1, 2, 3, 4 (got {i!r})") from None


def bell_vector(i) -> np.ndarray:
    return _BELL_VECTORS[bell_index(i)].astype(np.complex128)


def make_bell(i) -> DensityOperator:
    v = bell_vector(i)
    return DensityOperator(np.outer(v, v.conj()))


def tensor(*states: StateLike) -> DensityOperator:
    """Kronecker product of density operators, leftmost factor first."""
    if not states:
        raise DimensionError("tensor needs at least one state")
    rhos = [as_density(s) for s in states]
    dim = math.prod(r.dim for r in rhos)
    if dim > MAX_DIM:
        raise DimensionError(f"tensor product dimension {dim} exceeds {MAX_DIM}")
    m = rhos[0].matrix
    for r in rhos[1:]:
        m = np.kron(m, r.matrix)
    return DensityOperator(m, validate=False)


def partial_trace(state: StateLike, keep: Iterable[int]) -> DensityOperator:
    """Reduced state on the qubits listed in ``keep`` (0-based, output in ascending order)."""
    rho = as_density(state)
    n = rho.n_qubits
    keep = sorted(set(int(q) for q in keep))
    if not keep or len(keep) == n or keep[0] < 0 or keep[-1] >= n:
        raise DimensionError(f"keep={keep} is not a nonempty proper subset of qubits 0..{n - 1}")
    return DensityOperator(_ptrace(rho.matrix, n, keep), validate=False)


def _ptrace(m: np.ndarray, n: int, keep: list[int]) -> np.ndarray:
    t = m.reshape([2] * (2 * n))
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = list(letters[:n])
    col = [letters[n + q] if q in keep else row[q] for q in range(n)]
    out = [row[q] for q in keep] + [col[q] for q in keep]
    t = np.einsum("".join(row) + "".join(col) + "->" + "".join(out), t)
    d = 2 ** len(keep)
    return t.reshape(d, d)
