"""Entanglement swapping through a Bell measurement on the middle pair.

Two pairs ``rho_12`` and ``rho_34`` occupy tensor slots 0-1 and 2-3. The
middle qubits (slots 1 and 2) are projected onto a Bell state and the outer
qubits (slots 0 and 3) are returned, normalised, with the outcome
probability.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ZeroProbabilityOutcome
from .states import BellIndex, DensityOperator, StateLike, _ptrace, as_density, bell_index, bell_vector

TOL_PROB = 1e-12

_I2 = np.eye(2)


@dataclass(frozen=True, eq=False)
class SwapOutcome:
    """Post-measurement outer-pair state; ``state`` is None when the outcome cannot occur."""

    state: DensityOperator | None
    probability: float
    bell_index: BellIndex


def bell_projector_middle(i) -> np.ndarray:
    """``1 (x) |phi_i><phi_i| (x) 1`` on four qubits."""
    v = bell_vector(i)
    return np.kron(np.kron(_I2, np.outer(v, v.conj())), _I2)


def _project(rho12: DensityOperator, rho34: DensityOperator, i: BellIndex):
    if rho12.dim != 4 or rho34.dim != 4:
        raise DimensionError("swapping needs two two-qubit states")
    big = np.kron(rho12.matrix, rho34.matrix)
    m = bell_projector_middle(i)
    post = m @ big @ m.conj().T
    prob = float(np.trace(post).real)
    return post, prob


def _outcome(post: np.ndarray, prob: float, i: BellIndex) -> SwapOutcome:
    rho14 = _ptrace(post, 4, [0, 3]) / prob
    rho14 = 0.5 * (rho14 + rho14.conj().T)
    return SwapOutcome(DensityOperator(rho14), min(max(prob, 0.0), 1.0), i)


def swap(rho12: StateLike, rho34: StateLike, i) -> SwapOutcome:
    """Swap entanglement onto the outer qubits, conditioned on Bell outcome ``i``.

    Raises :class:`ZeroProbabilityOutcome` when the outcome probability is at
    most ``TOL_PROB``, since the conditional state is then undefined.
    """
    i = bell_index(i)
    post, prob = _project(as_density(rho12), as_density(rho34), i)
    if prob <= TOL_PROB:
        raise ZeroProbabilityOutcome(f"Bell outcome {int(i)} has probability {prob:.3g}")
    return _outcome(post, prob, i)


def swap_all(rho12: StateLike, rho34: StateLike) -> list[SwapOutcome]:
    rho12, rho34 = as_density(rho12), as_density(rho34)
    outcomes = []
    for i in BellIndex:
        post, prob = _project(rho12, rho34, i)
        if prob <= TOL_PROB:
            outcomes.append(SwapOutcome(None, max(prob, 0.0), i))
        else:
            outcomes.append(_outcome(post, prob, i))
    return outcomes
