"""Kraus-represented noisy channels on one and two qubits.

Provides phase damping (PD), generalized amplitude damping (GAD) and the
two-qubit stochastic dephasing channel (SDC), lifting of single-qubit
channels to two qubits, channel application, and closed-form images of the
Almeida family under each channel (used as oracles for the Kraus path).

Channel catalogs serialize to JSON::

    {"format": "qsteer-kraus/1",
     "channels": [{"label": "PD", "params": {"p": 0.4}, "dim": 2,
                   "operators": [[[[re, im], [re, im]], [[re, im], [re, im]]], ...]}]}

``operators`` is a list of ``dim x dim`` matrices whose entries are
``[real, imag]`` pairs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DimensionError, DomainError, NotTracePreservingError
from .states import AlmeidaParams, DensityOperator, StateLike, as_density

TOL_CPTP = 1e-12

CATALOG_FORMAT = "qsteer-kraus/1"


def _check_unit(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise DomainError(f"{name}={value} outside [0, 1]")
    return value


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Ordered Kraus operators of a CPTP map, plus the parameters that produced them."""

    operators: tuple
    label: str = "custom"
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        ops = []
        for k in self.operators:
            a = np.array(k, dtype=np.complex128, copy=True)
            a.setflags(write=False)
            ops.append(a)
        if not ops:
            raise DimensionError("a channel needs at least one Kraus operator")
        shape = ops[0].shape
        if len(shape) != 2 or shape[0] != shape[1] or any(a.shape != shape for a in ops):
            raise DimensionError("Kraus operators must be square and of equal size")
        object.__setattr__(self, "operators", tuple(ops))
        object.__setattr__(self, "params", MappingProxyType(dict(self.params)))
        res = self.closure_residual()
        if res > TOL_CPTP:
            raise NotTracePreservingError(f"sum K^dagger K deviates from identity by {res:.3g}")

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    def __len__(self) -> int:
        return len(self.operators)

    def closure_residual(self) -> float:
        s = sum(k.conj().T @ k for k in self.operators)
        return float(np.max(np.abs(s - np.eye(self.dim))))

    def __call__(self, state: StateLike) -> DensityOperator:
        return apply_channel(state, self)


def identity_channel(dim: int = 2) -> KrausChannel:
    return KrausChannel((np.eye(dim),), label="identity")


def pd_channel(p: float) -> KrausChannel:
    """Single-qubit phase damping; ``p = 1`` removes all coherence."""
    p = _check_unit("p", p)
    k1 = np.diag([1.0, math.sqrt(1 - p)])
    k2 = np.diag([0.0, math.sqrt(p)])
    return KrausChannel((k1, k2), label="PD", params={"p": p})


def gad_channel(p: float, gamma: float) -> KrausChannel:
    """Single-qubit generalized amplitude damping.

    ``gamma`` is the probability of losing an excitation and ``p`` sets the
    fixed point ``diag(p, 1 - p)``.
    """
    p = _check_unit("p", p)
    g = _check_unit("gamma", gamma)
    sp, sq = math.sqrt(p), math.sqrt(1 - p)
    k1 = sp * np.array([[1.0, 0.0], [0.0, math.sqrt(1 - g)]])
    k2 = sp * np.array([[0.0, math.sqrt(g)], [0.0, 0.0]])
    k3 = sq * np.array([[math.sqrt(1 - g), 0.0], [0.0, 1.0]])
    k4 = sq * np.array([[0.0, 0.0], [math.sqrt(g), 0.0]])
    return KrausChannel((k1, k2, k3, k4), label="GAD", params={"p": p, "gamma": g})


def sdc_channel(p: float) -> KrausChannel:
    """Two-qubit stochastic dephasing channel (three 4x4 diagonal operators)."""
    p = _check_unit("p", p)
    k1 = np.diag([math.sqrt(1 - p), 1.0, 1.0, math.sqrt(1 - p)])
    k2 = np.diag([math.sqrt(p), 0.0, 0.0, -math.sqrt(p) * (1 - p)])
    k3 = np.diag([0.0, 0.0, 0.0, p * math.sqrt(2 - p)])
    return KrausChannel((k1, k2, k3), label="SDC", params={"p": p})


def lift_two_qubit(ch: KrausChannel, other: KrausChannel | None = None) -> KrausChannel:
    """Two-qubit channel with operators ``K_i (x) L_j``.

    ``ch`` acts on qubit 0 and ``other`` (default: ``ch``) on qubit 1.
    """
    other = ch if other is None else other
    if ch.dim != 2 or other.dim != 2:
        raise DimensionError("only single-qubit channels can be lifted")
    ops = tuple(np.kron(a, b) for a in ch.operators for b in other.operators)
    if other is ch:
        return KrausChannel(ops, label=ch.label, params=ch.params)
    params = {f"{key}_0": v for key, v in ch.params.items()}
    params.update({f"{key}_1": v for key, v in other.params.items()})
    return KrausChannel(ops, label="custom", params=params)


def apply_channel(state: StateLike, ch: KrausChannel) -> DensityOperator:
    """``sum_i K_i rho K_i^dagger``, re-Hermitized."""
    rho = as_density(state)
    if rho.dim != ch.dim:
        raise DimensionError(f"channel dimension {ch.dim} does not match state dimension {rho.dim}")
    m = rho.matrix
    out = sum(k @ m @ k.conj().T for k in ch.operators)
    return DensityOperator(0.5 * (out + out.conj().T))


def two_qubit_channel(name: str, p: float, gamma: float | None = None) -> KrausChannel:
    """Named noise model acting identically on both qubits of a pair."""
    name = name.lower()
    if name == "pd":
        return lift_two_qubit(pd_channel(p))
    if name == "gad":
        if gamma is None:
            raise DomainError("GAD needs gamma")
        return lift_two_qubit(gad_channel(p, gamma))
    if name == "sdc":
        return sdc_channel(p)
    raise DomainError(f"unknown channel {name!r} (expected pd, gad or sdc)")


def time_to_p(t: float, relaxation_time: float) -> float:
    """Noise strength ``1 - exp(-t / T)`` reached after time ``t``."""
    if relaxation_time <= 0:
        raise DomainError("relaxation time must be positive")
    if t < 0:
        raise DomainError("time must be non-negative")
    return -math.expm1(-t / relaxation_time)


# closed forms for Almeida inputs


def _almeida_x(diag, coherence) -> DensityOperator:
    a, b, c, d = diag
    m = np.array(
        [[a, 0, 0, coherence], [0, b, 0, 0], [0, 0, c, 0], [coherence, 0, 0, d]],
        dtype=np.complex128,
    )
    return DensityOperator(m)


def _almeida_diag(k: float, theta: float):
    c2, s2 = math.cos(theta) ** 2, math.sin(theta) ** 2
    return ((1 + k) * c2 / 2, (1 - k) * c2 / 2, (1 - k) * s2 / 2, (1 + k) * s2 / 2)


def almeida_after_pd(k: float, theta: float, p: float) -> DensityOperator:
    """Almeida state after PD on both qubits; coherence scales as ``1 - p``."""
    AlmeidaParams(k, theta)
    p = _check_unit("p", p)
    coh = k * (1 - p) * math.cos(theta) * math.sin(theta)
    return _almeida_x(_almeida_diag(k, theta), coh)


def almeida_after_sdc(k: float, theta: float, p: float) -> DensityOperator:
    """Almeida state after SDC; coherence scales as ``(1 - p)^2``."""
    AlmeidaParams(k, theta)
    p = _check_unit("p", p)
    coh = k * (1 - p) ** 2 * math.cos(theta) * math.sin(theta)
    return _almeida_x(_almeida_diag(k, theta), coh)


def almeida_after_gad(k: float, theta: float, p: float, gamma: float) -> DensityOperator:
    """Almeida state after GAD on both qubits."""
    AlmeidaParams(k, theta)
    p = _check_unit("p", p)
    g = _check_unit("gamma", gamma)
    c2 = math.cos(2 * theta)
    m1 = (k * (1 - g) ** 2 + (-1 + g - 2 * p * g) ** 2 - (1 + k) * (g - 1) * (1 + (2 * p - 1) * g) * c2) / 4
    m2 = (1 - k * (1 - g) ** 2 - (1 - 2 * p) ** 2 * g**2 + (g - 1) * (-1 + k + (1 + k) * (-1 + 2 * p) * g) * c2) / 4
    m3 = (1 - k * (1 - g) ** 2 - (1 - 2 * p) ** 2 * g**2 + (g - 1) * (1 - k + (1 + k) * (2 * p - 1) * g) * c2) / 4
    m4 = (k * (1 - g) ** 2 + (1 + g - 2 * p * g) ** 2 - (1 + k) * (g - 1) * (-1 + (2 * p - 1) * g) * c2) / 4
    coh = k * (1 - g) * math.cos(theta) * math.sin(theta)
    return _almeida_x((m1, m2, m3, m4), coh)


# serialization


def channel_to_dict(ch: KrausChannel) -> dict:
    return {
        "label": ch.label,
        "params": dict(ch.params),
        "dim": ch.dim,
        "operators": [
            [[[float(z.real), float(z.imag)] for z in row] for row in k] for k in ch.operators
        ],
    }


def channel_from_dict(data: Mapping) -> KrausChannel:
    try:
        ops = [np.array([[complex(re, im) for re, im in row] for row in k]) for k in data["operators"]]
        ch = KrausChannel(tuple(ops), label=data.get("label", "custom"), params=data.get("params", {}))
    except (DimensionError, NotTracePreservingError):
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"malformed channel record: {exc}") from exc
    if "dim" in data and int(data["dim"]) != ch.dim:
        raise DimensionError(f"declared dim {data['dim']} but operators are {ch.dim}x{ch.dim}")
    return ch


def dumps_catalog(channels: Iterable[KrausChannel]) -> str:
    doc = {"format": CATALOG_FORMAT, "channels": [channel_to_dict(c) for c in channels]}
    return json.dumps(doc, indent=2)


def loads_catalog(text: str) -> list[KrausChannel]:
    doc = json.loads(text)
    if doc.get("format") != CATALOG_FORMAT:
        raise DomainError(f"unsupported catalog format {doc.get('format')!r}")
    return [channel_from_dict(c) for c in doc["channels"]]


def save_catalog(path, channels: Sequence[KrausChannel]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_catalog(channels))
        fh.write("\n")


def load_catalog(path) -> list[KrausChannel]:
    with open(path, encoding="utf-8") as fh:
        return loads_catalog(fh.read())
