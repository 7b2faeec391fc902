import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qsteer.errors import DimensionError, DomainError, InvalidStateError, NotXFormError
from qsteer.quantifiers import concurrence
from qsteer.states import (
    AlmeidaParams,
    DensityOperator,
    XFormState,
    lhs_admissible,
    make_almeida,
    make_bell,
    maximally_mixed,
    partial_trace,
    pure,
    tensor,
    to_xform,
)

from conftest import random_density

ket0 = np.array([1, 0])
ket1 = np.array([0, 1])


def test_density_operator_is_read_only():
    rho = maximally_mixed(2)
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 1


@pytest.mark.parametrize(
    "m",
    [
        np.array([[1, 0.1], [0, 0]]),  # not Hermitian
        np.diag([0.6, 0.6]),  # trace 1.2
        np.diag([1.5, -0.5]),  # negative eigenvalue
    ],
)
def test_invalid_matrices_rejected(m):
    with pytest.raises(InvalidStateError):
        DensityOperator(m)


def test_bad_dimension():
    with pytest.raises(DimensionError):
        DensityOperator(np.eye(3) / 3)


def test_almeida_bell_corner():
    v = np.array([1, 0, 0, 1]) / math.sqrt(2)
    assert make_almeida(1, math.pi / 4).allclose(np.outer(v, v))


@pytest.mark.parametrize("theta", [0.0, 0.3, math.pi / 4])
def test_almeida_k0_is_product(theta):
    rho_a = np.diag([math.cos(theta) ** 2, math.sin(theta) ** 2])
    assert make_almeida(0, theta).allclose(np.kron(rho_a, np.eye(2) / 2))


def test_almeida_xform_values():
    x = to_xform(make_almeida(0.5, math.pi / 6))
    assert x.a == pytest.approx(0.5625, abs=1e-15)
    assert x.b == pytest.approx(0.1875, abs=1e-15)
    assert x.c == pytest.approx(0.0625, abs=1e-15)
    assert x.d == pytest.approx(0.1875, abs=1e-15)
    assert abs(x.w - math.sqrt(3) / 8) < 1e-15
    assert x.z == 0


@pytest.mark.parametrize("k,theta", [(-0.1, 0.2), (1.1, 0.2), (0.5, -0.01), (0.5, 0.8)])
def test_almeida_domain(k, theta):
    with pytest.raises(DomainError):
        make_almeida(k, theta)


def test_almeida_grid_valid():
    for k in np.linspace(0, 1, 50):
        for theta in np.linspace(0, math.pi / 4, 50):
            m = make_almeida(k, theta).matrix
            assert np.max(np.abs(m - m.conj().T)) <= 1e-12
            assert abs(np.trace(m) - 1) <= 1e-12
            assert np.linalg.eigvalsh(m)[0] >= -1e-12


def test_bell_states():
    v1 = np.array([1, 0, 0, 1]) / math.sqrt(2)
    v4 = np.array([0, 1, -1, 0]) / math.sqrt(2)
    assert make_bell(1).allclose(np.outer(v1, v1))
    assert make_bell(4).allclose(np.outer(v4, v4))
    for i in range(1, 5):
        b = make_bell(i)
        assert np.linalg.matrix_rank(b.matrix, tol=1e-10) == 1
        assert concurrence(b) == pytest.approx(1, abs=1e-12)
    with pytest.raises(DomainError):
        make_bell(5)


def test_tensor_examples():
    assert tensor(maximally_mixed(1), maximally_mixed(1)).allclose(np.eye(4) / 4)
    assert tensor(pure(ket0), pure(ket1)).allclose(np.diag([0, 1, 0, 0]))
    big = tensor(make_almeida(1, math.pi / 4), make_almeida(1, math.pi / 4))
    assert big.dim == 16
    assert np.linalg.matrix_rank(big.matrix, tol=1e-10) == 1
    assert np.allclose(big.matrix @ big.matrix, big.matrix)


def test_tensor_too_large():
    with pytest.raises(DimensionError):
        tensor(make_bell(1), make_bell(1), maximally_mixed(1))


def test_partial_trace_examples(rng):
    theta = 0.4
    v = np.array([math.cos(theta), 0, 0, math.sin(theta)])
    red = partial_trace(pure(v), [0])
    assert red.allclose(np.diag([math.cos(theta) ** 2, math.sin(theta) ** 2]))

    rho, sigma = random_density(rng, 2), random_density(rng, 4)
    assert partial_trace(tensor(rho, sigma), [0]).allclose(rho)
    assert partial_trace(tensor(rho, sigma), [1, 2]).allclose(sigma)

    r12, r34 = random_density(rng), random_density(rng)
    r1 = partial_trace(r12, [0]).matrix
    r4 = partial_trace(r34, [1]).matrix
    assert partial_trace(tensor(r12, r34), [0, 3]).allclose(np.kron(r1, r4))


def test_partial_trace_against_index_sum(rng):
    rho = random_density(rng, 8).matrix
    t = rho.reshape([2] * 6)
    # keep qubits 0 and 2: sum over qubit 1 by hand
    expected = np.zeros((4, 4), dtype=complex)
    for a in range(2):
        for c in range(2):
            for a2 in range(2):
                for c2 in range(2):
                    expected[2 * a + c, 2 * a2 + c2] = sum(t[a, b, c, a2, b, c2] for b in range(2))
    assert partial_trace(rho, [0, 2]).allclose(expected)


@pytest.mark.parametrize("keep", [[], [0, 1], [2], [-1]])
def test_partial_trace_bad_labels(keep):
    with pytest.raises(DimensionError):
        partial_trace(make_bell(1), keep)


def test_partial_trace_marginal_k_independent():
    for theta in np.linspace(0, math.pi / 4, 9):
        target = np.diag([math.cos(theta) ** 2, math.sin(theta) ** 2])
        for k in np.linspace(0, 1, 11):
            assert partial_trace(make_almeida(k, theta), [0]).allclose(target, atol=1e-12)


def test_to_xform_identity_and_rejection():
    x = to_xform(np.eye(4) / 4)
    assert (x.a, x.b, x.c, x.d, x.w, x.z) == (0.25, 0.25, 0.25, 0.25, 0, 0)
    m = np.eye(4) / 4
    m[0, 1] = m[1, 0] = 0.1
    with pytest.raises(NotXFormError):
        to_xform(m)


@settings(max_examples=100, deadline=None)
@given(
    st.floats(0, 1), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1),
    st.floats(0, 1), st.floats(0, 2 * math.pi), st.floats(0, 1), st.floats(0, 2 * math.pi),
)
def test_xform_roundtrip(a, b, c, d, rw, pw, rz, pz):
    tot = a + b + c + d
    if tot < 1e-3:
        return
    a, b, c, d = a / tot, b / tot, c / tot, d / tot
    x = XFormState(a, b, c, d, rw * math.sqrt(a * d) * np.exp(1j * pw), rz * math.sqrt(b * c) * np.exp(1j * pz))
    y = to_xform(x.to_density())
    for f in "abcd":
        assert abs(getattr(x, f) - getattr(y, f)) <= 1e-14
    assert abs(x.w - y.w) <= 1e-14 and abs(x.z - y.z) <= 1e-14


def test_xform_invalid():
    with pytest.raises(InvalidStateError):
        XFormState(0.5, 0.5, 0.1, 0.0)
    with pytest.raises(InvalidStateError):
        XFormState(0.25, 0.25, 0.25, 0.25, w=0.3)


def test_lhs_examples():
    assert lhs_admissible(0.5, 0.0)
    assert not lhs_admissible(1.0, math.pi / 8)
    for theta in np.linspace(0, math.pi / 4, 7):
        assert lhs_admissible(0.4, theta)
    assert lhs_admissible(0.0, 0.3)


def test_lhs_k1():
    assert lhs_admissible(1.0, 0.0)
    for theta in np.linspace(1e-6, math.pi / 4, 50):
        assert not lhs_admissible(1.0, theta)


def test_almeida_params_validation():
    with pytest.raises(DomainError):
        AlmeidaParams(0.5, 1.0)
    # four-decimal rounding of pi/4 is accepted
    AlmeidaParams(0.5, 0.7854)
