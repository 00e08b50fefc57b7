import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ncqm.errors import DimensionMismatch
from ncqm.fock import build_ladder
from ncqm.qspace import (
    ModelParams,
    SuperOp,
    edge_mask,
    edge_norm,
    hs_inner,
    matrix_unit,
    position_momentum_ops,
    random_state,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def _rand_superop(rng, n, terms=3):
    out = SuperOp.zero(n)
    for _ in range(terms):
        A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        C = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        out = out + complex(*rng.standard_normal(2)) * (SuperOp.left(A) @ SuperOp.right(C))
    return out


def test_params_validation():
    with pytest.raises(ValueError):
        ModelParams(theta=-1)
    with pytest.raises(ValueError):
        ModelParams(m=0)
    with pytest.raises(ValueError):
        ModelParams(omega_l=-0.5)
    assert ModelParams(m=2, hbar=0.5, theta=0.25).T == pytest.approx(1.0)


def test_hs_inner_of_units():
    assert hs_inner(matrix_unit(4, 1, 2), matrix_unit(4, 1, 2)) == 1
    assert hs_inner(matrix_unit(4, 1, 2), matrix_unit(4, 2, 1)) == 0
    with pytest.raises(DimensionMismatch):
        hs_inner(np.eye(3), np.eye(4))


@given(seeds)
def test_hs_inner_hermitian_symmetry(seed):
    rng = np.random.default_rng(seed)
    a, b = random_state(6, rng), random_state(6, rng)
    assert abs(hs_inner(a, b) - np.conj(hs_inner(b, a))) < 1e-14


@given(seeds)
def test_dense_matches_apply(seed):
    rng = np.random.default_rng(seed)
    S = _rand_superop(rng, 5)
    psi = random_state(5, rng)
    assert np.allclose(S.dense() @ psi.ravel(), S(psi).ravel())


@given(seeds)
def test_composition_is_sequential(seed):
    rng = np.random.default_rng(seed)
    S, R = _rand_superop(rng, 4), _rand_superop(rng, 4)
    psi = random_state(4, rng)
    assert np.allclose((S @ R)(psi), S(R(psi)))


@given(seeds)
def test_dag_is_hs_adjoint(seed):
    rng = np.random.default_rng(seed)
    S = _rand_superop(rng, 5)
    a, b = random_state(5, rng), random_state(5, rng)
    assert abs(hs_inner(a, S(b)) - hs_inner(S.dag(a), b)) < 1e-12


def test_dense_compression_removes_corner():
    # B_L^dag B_L compressed from a larger truncation is exact on the block
    b, bd = build_ladder(6)
    Nl = SuperOp.left(b) @ SuperOp.left(bd)  # b b^dag, corner-sensitive
    D = Nl.dense(keep=4)
    ref = np.kron(np.diag(np.arange(1, 5)), np.eye(4))
    assert np.allclose(D, ref)


def test_superop_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        SuperOp.identity(3) + SuperOp.identity(4)
    with pytest.raises(DimensionMismatch):
        SuperOp.identity(3)(np.eye(4))


@given(seeds, st.floats(0.05, 3.0), st.floats(0.3, 2.0))
def test_heisenberg_algebra(seed, theta, hbar):
    n = 24
    p = ModelParams(theta=theta, hbar=hbar)
    ops = position_momentum_ops(p, n)
    psi = random_state(n, np.random.default_rng(seed), margin=6)
    inner = edge_mask(n, 3)

    def com(A, B):
        return (A @ B - B @ A)(psi)

    scale = max(1.0, hbar / theta, theta)
    assert np.linalg.norm((com(ops.X, ops.Y) - 1j * theta * psi)[inner]) < 1e-12 * scale
    assert np.linalg.norm((com(ops.X, ops.Px) - 1j * hbar * psi)[inner]) < 1e-12 * scale
    assert np.linalg.norm((com(ops.Y, ops.Py) - 1j * hbar * psi)[inner]) < 1e-12 * scale
    assert np.linalg.norm(com(ops.X, ops.Py)[inner]) < 1e-12 * scale
    assert np.linalg.norm(com(ops.Px, ops.Py)[inner]) < 1e-11 * scale**2


def test_complex_momentum_is_commutator_with_b(ref_params):
    n = 12
    ops = position_momentum_ops(ref_params, n)
    psi = random_state(n, np.random.default_rng(3))
    b, _ = build_ladder(n)
    k = ref_params.hbar * np.sqrt(2 / ref_params.theta)
    assert np.allclose((ops.Px + 1j * ops.Py)(psi), ops.P(psi))
    assert np.allclose(ops.P(psi), -1j * k * (b @ psi - psi @ b))
    assert np.allclose(ops.Pdag(psi), ops.P.dag(psi))


def test_edge_helpers():
    M = np.ones((6, 6))
    assert edge_norm(M, 2) == pytest.approx(4.0)
    assert edge_mask(6, 2).sum() == 16
    s = random_state(6, np.random.default_rng(0), margin=2)
    assert np.all(s[~edge_mask(6, 2)] == 0)
    assert np.linalg.norm(s) == pytest.approx(1.0)
