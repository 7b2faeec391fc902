"""Concurrence, F3 EPR-steering and interferometric power of two-qubit states.

Each quantifier has a general route working on any density matrix. For
X-shaped states there are closed formulas (``*_xform``), and the
interferometric power has a brute-force minimisation over local
Hamiltonians (:func:`ip_bruteforce`) used as an independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import DimensionError, DomainError, NonHermitianError
from .states import TOL_HERM, StateLike, XFormState, as_density

TOL_DEG = 1e-12

SQRT3_M1 = math.sqrt(3.0) - 1.0

I2 = np.eye(2, dtype=np.complex128)
SX = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SY = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SZ = np.array([[1, 0], [0, -1]], dtype=np.complex128)
PAULIS = (SX, SY, SZ)
SYSY = np.kron(SY, SY)


def _two_qubit(state: StateLike) -> np.ndarray:
    rho = as_density(state)
    if rho.dim != 4:
        raise DimensionError(f"expected a two-qubit state, got dimension {rho.dim}")
    return rho.matrix


def _eigh_clamped(m: np.ndarray):
    q, v = np.linalg.eigh(m)
    return np.clip(q, 0.0, None), v


def concurrence(state: StateLike) -> float:
    """Wootters concurrence ``max(0, l1 - l2 - l3 - l4)``.

    The ``l_i`` are square roots of the eigenvalues of
    ``rho (sy x sy) rho* (sy x sy)``, sorted in descending order. They are
    obtained as the singular values of ``W^T (sy x sy) W`` with
    ``rho = W W^dagger``, which yields the same numbers without taking square
    roots of tiny, noise-dominated eigenvalues.
    """
    m = _two_qubit(state)
    q, v = _eigh_clamped(m)
    w = v * np.sqrt(q)
    tau = w.T @ SYSY @ w
    lam = np.sort(np.linalg.svd(tau, compute_uv=False))[::-1]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def concurrence_eig(state: StateLike) -> float:
    # literal eigenvalue route, kept for cross-checks; noisy near rank deficiency
    m = _two_qubit(state)
    r = m @ SYSY @ m.conj() @ SYSY
    lam = np.sort(np.clip(np.linalg.eigvals(r).real, 0.0, None))[::-1]
    s = np.sqrt(lam)
    return float(max(0.0, s[0] - s[1] - s[2] - s[3]))


def concurrence_xform(x: XFormState) -> float:
    return float(
        2.0
        * max(
            0.0,
            abs(x.z) - math.sqrt(max(x.a * x.d, 0.0)),
            abs(x.w) - math.sqrt(max(x.b * x.c, 0.0)),
        )
    )


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    """``T_ij = Tr[rho (s_i x s_j)]`` and its singular values in descending order."""

    entries: np.ndarray
    singulars: np.ndarray


def correlation_matrix(state: StateLike) -> CorrelationMatrix:
    m = _two_qubit(state)
    t = np.empty((3, 3))
    for i, si in enumerate(PAULIS):
        for j, sj in enumerate(PAULIS):
            t[i, j] = np.trace(m @ np.kron(si, sj)).real
    s = np.linalg.svd(t, compute_uv=False)
    return CorrelationMatrix(entries=t, singulars=s)


def f3_steering(state: StateLike) -> float:
    """Steering quantifier ``max(0, (sqrt(s1^2 + s2^2 + s3^2) - 1) / (sqrt3 - 1))``.

    The state violates the three-setting steering inequality exactly when the
    result is positive.
    """
    s = correlation_matrix(state).singulars
    return float(max(0.0, (math.sqrt(float(np.sum(s**2))) - 1.0) / SQRT3_M1))


def f3_xform(x: XFormState) -> float:
    r = math.sqrt((x.a - x.b - x.c + x.d) ** 2 + 8.0 * (abs(x.w) ** 2 + abs(x.z) ** 2))
    return float(max(0.0, (r - 1.0) / SQRT3_M1))


def _qfi_weights(q: np.ndarray) -> np.ndarray:
    qi, ql = q[:, None], q[None, :]
    tot = qi + ql
    mask = tot > TOL_DEG
    c = np.zeros_like(tot)
    c[mask] = (qi - ql)[mask] ** 2 / tot[mask]
    return c


def qfi(state: StateLike, hamiltonian) -> float | np.ndarray:
    """Quantum Fisher information of ``state`` for unitary encoding by ``hamiltonian``.

    ``2 sum_{i,l} (q_i - q_l)^2 / (q_i + q_l) |<psi_i|H|psi_l>|^2`` over the
    eigensystem of the state, skipping pairs with ``q_i + q_l`` below
    ``TOL_DEG``. ``hamiltonian`` may carry leading batch dimensions, in which
    case an array of values is returned.
    """
    rho = as_density(state)
    h = np.asarray(hamiltonian, dtype=np.complex128)
    if h.shape[-2:] != (rho.dim, rho.dim):
        raise DimensionError(f"observable shape {h.shape} does not match state dimension {rho.dim}")
    if np.max(np.abs(h - np.swapaxes(h.conj(), -1, -2)), initial=0.0) > TOL_HERM:
        raise NonHermitianError("observable is not Hermitian")
    q, v = _eigh_clamped(rho.matrix)
    c = _qfi_weights(q)
    h_eig = v.conj().T @ h @ v
    out = 2.0 * np.sum(c * np.abs(h_eig) ** 2, axis=(-2, -1))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class MMatrix:
    """Symmetric 3x3 quadratic form of the local QFI and its smallest eigenvalue."""

    entries: np.ndarray
    zeta_min: float


def _local_paulis(side: str) -> list[np.ndarray]:
    if side == "A":
        return [np.kron(s, I2) for s in PAULIS]
    if side == "B":
        return [np.kron(I2, s) for s in PAULIS]
    raise DomainError(f"side must be 'A' or 'B', got {side!r}")


def m_matrix(state: StateLike, side: str = "A") -> MMatrix:
    m = _two_qubit(state)
    q, v = _eigh_clamped(m)
    c = _qfi_weights(q)
    s = [v.conj().T @ p @ v for p in _local_paulis(side)]
    mm = np.empty((3, 3))
    for a in range(3):
        for b in range(3):
            mm[a, b] = 0.5 * np.sum(c * s[a] * s[b].T).real
    mm = 0.5 * (mm + mm.T)
    zeta = float(np.linalg.eigvalsh(mm)[0])
    return MMatrix(entries=mm, zeta_min=zeta)


def interferometric_power(state: StateLike, side: str = "A") -> float:
    """Interferometric power with the local Hamiltonian acting on ``side``.

    Returned as the smallest eigenvalue of the 3x3 matrix ``M`` built from the
    eigensystem of the state; rounding noise below zero is clipped.
    """
    return max(0.0, m_matrix(state, side).zeta_min)


def _bloch_dirs(polar: np.ndarray, azim: np.ndarray) -> np.ndarray:
    return np.stack(
        [np.sin(polar) * np.cos(azim), np.sin(polar) * np.sin(azim), np.cos(polar)], axis=-1
    )


def ip_bruteforce(state: StateLike, n_grid: int = 200, side: str = "A", refine: bool = True) -> float:
    """Minimum over unit Bloch directions ``n`` of ``qfi(state, (n.sigma) x 1) / 4``.

    Scans an ``n_grid x n_grid`` grid in polar and azimuthal angle, then
    polishes the best grid point with Nelder-Mead. Spectrum of every trial
    Hamiltonian is fixed to ``{+1, -1}``.
    """
    if n_grid < 16:
        raise DomainError("n_grid must be at least 16")
    rho = as_density(state)
    if rho.dim != 4:
        raise DimensionError("ip_bruteforce needs a two-qubit state")
    local = np.stack(_local_paulis(side))

    def hamiltonians(dirs):
        return np.tensordot(dirs, local, axes=(-1, 0))

    polar = np.linspace(0.0, math.pi, n_grid)
    azim = np.linspace(0.0, 2 * math.pi, n_grid, endpoint=False)
    pp, aa = np.meshgrid(polar, azim, indexing="ij")
    vals = qfi(rho, hamiltonians(_bloch_dirs(pp, aa))) / 4.0
    idx = np.unravel_index(np.argmin(vals), vals.shape)
    best = float(vals[idx])
    if refine:
        res = minimize(
            lambda x: qfi(rho, hamiltonians(_bloch_dirs(x[0], x[1]))) / 4.0,
            x0=[pp[idx], aa[idx]],
            method="Nelder-Mead",
            options={"xatol": 1e-9, "fatol": 1e-12},
        )
        best = min(best, float(res.fun))
    return max(0.0, best)


def partial_transpose(state: StateLike, side: str = "B") -> np.ndarray:
    m = _two_qubit(state).reshape(2, 2, 2, 2)
    if side == "B":
        return m.transpose(0, 3, 2, 1).reshape(4, 4)
    if side == "A":
        return m.transpose(2, 1, 0, 3).reshape(4, 4)
    raise DomainError(f"side must be 'A' or 'B', got {side!r}")


def negativity(state: StateLike) -> float:
    """``max(0, -2 lambda_min)`` of the partial transpose over qubit B."""
    pt = partial_transpose(state, "B")
    lam = np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))[0]
    return float(max(0.0, -2.0 * lam))


QUANTIFIERS = {
    "steering": f3_steering,
    "concurrence": concurrence,
    "discord": interferometric_power,
}


def quantify(state: StateLike) -> dict[str, float]:
    """All three quantifiers keyed by ``steering``, ``concurrence`` and ``discord``."""
    rho = as_density(state)
    return {name: fn(rho) for name, fn in QUANTIFIERS.items()}
