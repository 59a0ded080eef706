import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from corrspace import aklt, mps
from corrspace.errors import BudgetExceededError, ChannelInvalidError, DimensionMismatchError
from corrspace.operators import PAULI, is_unitary, max_norm, phase_distance, random_unitary


def random_kraus(d, chi, seed):
    """Random isometry C^chi -> C^d (x) C^chi, split into Kraus operators."""
    u = random_unitary(d * chi, np.random.default_rng(seed))
    return mps.KrausSet(u[:, :chi].reshape(d, chi, chi))


def naive_amplitudes(k, n, left, right):
    out = []
    for idx in itertools.product(range(k.phys_dim), repeat=n):
        m = np.eye(k.bond_dim)
        for i in idx:
            m = m @ k.ops[i]
        out.append(right.conj() @ m @ left)
    return np.array(out)


shapes = st.tuples(st.integers(2, 3), st.integers(1, 3), st.integers(1, 4), st.integers(0, 10**6))


@given(shapes)
def test_random_isometry_is_channel(args):
    d, chi, _, seed = args
    assert mps.validate_channel(random_kraus(d, chi, seed)).passed


@given(shapes)
def test_assemble_matches_naive_products(args):
    d, chi, n, seed = args
    k = random_kraus(d, chi, seed)
    rng = np.random.default_rng(seed + 1)
    left = rng.normal(size=chi) + 1j * rng.normal(size=chi)
    right = rng.normal(size=chi) + 1j * rng.normal(size=chi)
    bp = mps.BoundaryPair(left, right)
    psi = mps.assemble_state(k, n, bp, normalize=False)
    ref = naive_amplitudes(k, n, bp.left, bp.right)
    assert max_norm(psi - ref) < 1e-12


@given(shapes)
def test_open_right_leg_is_trailing_index(args):
    d, chi, n, seed = args
    k = random_kraus(d, chi, seed)
    left = np.eye(chi)[0]
    open_psi = mps.assemble_state(k, n, mps.BoundaryPair(left), normalize=False).reshape(-1, chi)
    for r in range(chi):
        closed = mps.assemble_state(k, n, mps.BoundaryPair(left, np.eye(chi)[r]), normalize=False)
        assert max_norm(open_psi[:, r] - closed) < 1e-12


@given(shapes)
def test_isometric_open_state_is_normalized(args):
    # an isometric tensor with an open bond keeps the norm of the left boundary
    d, chi, n, seed = args
    k = random_kraus(d, chi, seed)
    psi = mps.assemble_state(k, n, mps.BoundaryPair(np.eye(chi)[0]), normalize=False)
    assert abs(np.linalg.norm(psi) - 1) < 1e-10


@given(shapes)
def test_dilation_unitary_reproduces_kraus(args):
    d, chi, _, seed = args
    k = random_kraus(d, chi, seed)
    u = mps.dilation_unitary(k)
    assert is_unitary(u)
    for v in np.eye(chi):
        out = u @ np.kron(np.eye(d)[0], v)
        assert max_norm(out.reshape(d, chi) - np.einsum("iab,b->ia", k.ops, v)) < 1e-12


@given(shapes)
def test_sequential_circuit_agrees_with_contraction(args):
    d, chi, n, seed = args
    k = random_kraus(d, chi, seed)
    left = np.random.default_rng(seed).normal(size=chi) + 0j
    bp = mps.BoundaryPair(left)
    via_circuit = mps.circuit_state(mps.dilation_unitary(k), d, n, bp, normalize=False)
    # the circuit emits site N first, so after reordering it is A_{i1} ... A_{iN} |L>
    expected = np.zeros((d,) * n + (chi,), dtype=complex)
    for idx in itertools.product(range(d), repeat=n):
        m = np.eye(chi)
        for i in idx:
            m = m @ k.ops[i]
        expected[idx] = m @ bp.left
    assert max_norm(via_circuit - expected.reshape(-1)) < 1e-12


def test_block_composes_in_physical_order():
    a = random_kraus(2, 2, 1)
    b = random_kraus(3, 2, 2)
    blk = mps.block(a, b)
    assert blk.phys_dim == 6 and blk.labels[4] == "1|1"
    for s, t in itertools.product(range(2), range(3)):
        assert max_norm(blk.ops[s * 3 + t] - b.ops[t] @ a.ops[s]) < 1e-14
    assert mps.validate_channel(blk).passed


def test_transpose_and_weights():
    k = aklt.spin1_kraus().kraus
    assert k.weight == pytest.approx(1 / np.sqrt(3))
    assert max_norm(k.unit_words()[1] - PAULI["Y"]) < 1e-14
    assert max_norm(k.transpose().ops[1] + k.ops[1]) < 1e-14


def test_invalid_inputs():
    with pytest.raises(DimensionMismatchError):
        mps.KrausSet(np.zeros((2, 2, 3)))
    with pytest.raises(DimensionMismatchError):
        mps.KrausSet(np.zeros((2, 2, 2)), labels=["a"])
    with pytest.raises(ChannelInvalidError):
        mps.dilation_unitary(mps.KrausSet(np.array([np.eye(2), np.eye(2)])))
    with pytest.raises(ValueError):
        mps.BoundaryPair(np.zeros(2))
    with pytest.raises(DimensionMismatchError):
        mps.assemble_state(aklt.spin1_kraus().kraus, 2, mps.BoundaryPair(np.ones(3)))


def test_budget_guard(monkeypatch):
    k = aklt.spin1_kraus().kraus
    with pytest.raises(BudgetExceededError):
        mps.assemble_state(k, 8, budget=100)
    monkeypatch.setenv("MBQC_BUDGET", "50")
    assert mps.amplitude_budget() == 50
    with pytest.raises(MemoryError):
        mps.assemble_state(k, 5)


# ---------------------------------------------------------------- spin-1 chain


def spin1_cartesian():
    eps = np.zeros((3, 3, 3))
    for a, b, c in itertools.permutations(range(3)):
        eps[a, b, c] = np.linalg.det(np.eye(3)[[a, b, c]])
    return -1j * eps  # (S_a)_{bc} = -i eps_abc


def test_spin1_chain_is_frustration_free_ground_state():
    s = spin1_cartesian()
    dot = sum(np.kron(s[a], s[a]) for a in range(3))
    p2 = dot / 2 + dot @ dot / 6 + np.eye(9) / 3
    assert max_norm(p2 @ p2 - p2) < 1e-12 and np.trace(p2).real == pytest.approx(5)
    k = aklt.spin1_kraus().kraus
    n = 4
    h = sum(np.kron(np.kron(np.eye(3**j), p2), np.eye(3 ** (n - j - 2))) for j in range(n - 1))
    ground = []
    for left in np.eye(2):
        psi = mps.assemble_state(k, n, mps.BoundaryPair(left)).reshape(-1, 2)
        for r in range(2):
            v = psi[:, r]
            assert max_norm(h @ v) < 1e-12
            ground.append(v)
    assert np.linalg.matrix_rank(np.array(ground), tol=1e-8) == 4
    assert np.sum(np.linalg.eigvalsh(h) < 1e-10) == 4


def test_spin1_symmetry_condition_against_rotation_matrix():
    k = aklt.spin1_kraus().kraus
    rng = np.random.default_rng(3)
    for _ in range(20):
        v = random_unitary(2, rng)
        r = np.array([[np.trace(PAULI[j] @ v.conj().T @ PAULI[i] @ v).real / 2 for j in "XYZ"] for i in "XYZ"])
        assert max_norm(r.T @ r - np.eye(3)) < 1e-12
        rep = mps.check_symmetry_condition(k, r, v)
        assert rep.passed and abs(rep.phase) < 1e-9


def test_symmetry_condition_detects_violation():
    k = aklt.spin1_kraus().kraus
    v = np.diag([1, 1j])
    rep = mps.check_symmetry_condition(k, np.eye(3), v)
    assert not rep.passed


def test_phase_only_difference_is_accepted():
    k = random_kraus(2, 2, 4)
    psi1 = mps.assemble_state(k, 3)
    psi2 = mps.assemble_state(k.scaled(np.exp(0.3j).real), 3)
    assert phase_distance(psi1, psi2) < 1e-12
