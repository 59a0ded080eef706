import itertools
from math import gcd

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from corrspace import cluster
from corrspace.cluster import ClusterSpec
from corrspace.errors import InvalidDimensionError, NothingToFactorError, PlanError
from corrspace.operators import clock, max_norm, phase_distance, shift


def dense_cluster(d, n, powers, pbc):
    """Independent oracle: |+>^N then a diagonal phase gate per bond, looping over basis states."""
    w = np.exp(2j * np.pi / d)
    bonds = [(k, k + 1) for k in range(n - 1)] + ([(n - 1, 0)] if pbc else [])
    psi = np.zeros(d**n, dtype=complex)
    for idx, digits in enumerate(itertools.product(range(d), repeat=n)):
        phase = 1.0
        for k, (a, b) in enumerate(bonds):
            phase *= w ** (powers[k % 2] * digits[a] * digits[b])
        psi[idx] = phase
    return psi / np.sqrt(d**n)


specs = st.integers(2, 5).flatmap(
    lambda d: st.tuples(st.just(d), st.integers(1, d - 1), st.integers(3, 5 if d <= 3 else 4),
                        st.sampled_from(["obc", "pbc"])))


def test_controlled_phase_qutrit_diagonal():
    w = np.exp(2j * np.pi / 3)
    expected = np.diag([1, 1, 1, 1, w, w**2, 1, w**2, w])
    assert max_norm(cluster.controlled_phase(3, 1) - expected) < 1e-12


def test_controlled_phase_qubit_is_cz():
    assert max_norm(cluster.controlled_phase(2, 1) - np.diag([1, 1, 1, -1])) < 1e-12


@given(specs)
def test_build_matches_dense_oracle(args):
    d, x, n, bc = args
    spec = ClusterSpec(d, x, n, bc)
    psi = cluster.build_cluster(spec)
    assert abs(np.linalg.norm(psi) - 1) < 1e-12
    assert max_norm(psi - dense_cluster(d, n, (x, d - x), bc == "pbc")) < 1e-12


@given(specs)
def test_every_stabilizer_fixes_state(args):
    d, x, n, bc = args
    spec = ClusterSpec(d, x, n, bc)
    psi = cluster.build_cluster(spec)
    for w in cluster.stabilizer_generators(spec):
        assert max_norm(w.apply(psi, d, n) - psi) < 1e-9
        assert max_norm(w.matrix(d, n) @ psi - psi) < 1e-9


def test_interior_stabilizer_shape():
    spec = ClusterSpec(5, 2, 5, "obc")
    words = {w.center: w for w in cluster.stabilizer_generators(spec)}
    # site 1 sits between a bond of power x=2 and one of power y=3
    assert words[1].factors == ((0, 0, 3), (1, 1, 0), (2, 0, 2))


@given(st.sampled_from([(2, 1), (3, 1), (3, 2), (4, 1), (5, 2)]))
def test_stabilizer_generators_commute(dx):
    d, x = dx
    spec = ClusterSpec(d, x, 4, "pbc")
    mats = [w.matrix(d, 4) for w in cluster.stabilizer_generators(spec)]
    for a, b in itertools.combinations(mats, 2):
        assert max_norm(a @ b - b @ a) < 1e-10


@pytest.mark.parametrize("d,x,n", [(2, 1, 4), (3, 1, 4), (3, 2, 3), (4, 1, 4), (5, 2, 3)])
def test_pbc_parent_hamiltonian_unique_ground_state(d, x, n):
    spec = ClusterSpec(d, x, n, "pbc")
    h = cluster.parent_hamiltonian(spec)
    evals, evecs = np.linalg.eigh(h)
    assert evals[0] == pytest.approx(-2 * n)
    assert evals[1] - evals[0] > 1e-6
    assert phase_distance(evecs[:, 0], cluster.build_cluster(spec)) < 1e-9


def test_obc_hamiltonian_has_edge_degeneracy():
    spec = ClusterSpec(3, 1, 4, "obc")
    evals = np.linalg.eigvalsh(cluster.parent_hamiltonian(spec))
    ground = np.sum(np.abs(evals - evals[0]) < 1e-8)
    assert ground == 9
    psi = cluster.build_cluster(spec)
    assert np.vdot(psi, cluster.parent_hamiltonian(spec) @ psi).real == pytest.approx(evals[0])


@given(st.sampled_from([(2, 1), (3, 1), (3, 2), (4, 1), (4, 3), (5, 1), (5, 4)]))
def test_onsite_symmetry_even_chain(dx):
    d, x = dx
    a, b = cluster.onsite_symmetry_deviation(ClusterSpec(d, x, 4, "pbc"))
    assert a < 1e-9 and b < 1e-9


def test_onsite_symmetry_needs_even_chain():
    with pytest.raises(InvalidDimensionError):
        cluster.onsite_symmetry_deviation(ClusterSpec(3, 1, 3, "pbc"))


@given(st.sampled_from([(3, 1), (4, 1), (5, 2), (5, 3)]))
def test_translation_swaps_powers(dx):
    d, x = dx
    psi = cluster.build_cluster(ClusterSpec(d, x, 4, "pbc"))
    swapped = cluster.build_cluster(ClusterSpec(d, d - x, 4, "pbc"))
    assert phase_distance(cluster.translate(psi, d, 4, 1), swapped) < 1e-12


# ---------------------------------------------------------------- SPT labels


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_cocycle_phase_exact(d):
    for x in range(1, d):
        lab = cluster.spt_label(d, x)
        assert lab.cocycle_phase == pytest.approx(np.exp(2j * np.pi * x / d), abs=1e-12)
        assert lab.mnc == (gcd(x, d) == 1)
        assert lab.bond_dim == d // gcd(x, d)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_projective_rep_composition(d):
    for x in range(1, d):
        for i, j, a, b in itertools.product(range(d), repeat=4):
            lhs = cluster.projective_rep(d, x, i, j) @ cluster.projective_rep(d, x, a, b)
            rhs = cluster.cocycle(d, x, (i, j), (a, b)) * cluster.projective_rep(d, x, i + a, j + b)
            assert max_norm(lhs - rhs) < 1e-12


# ---------------------------------------------------------------- transitions


def test_example_route_f13_to_c23():
    spec = ClusterSpec(5, 4, 4, "pbc", y=1)
    res = cluster.lu_transition(spec, "f_ax_alternating", offset=0, a=1, xf=3)
    assert (res.target.x, res.target.y) == (2, 3)
    assert res.passed


@pytest.mark.parametrize("d", [4, 5])
def test_pi_pairs_reaches_c11(d):
    spec = ClusterSpec(d, 1, 4, "pbc")
    res = cluster.lu_transition(spec, "pi_pairs")
    assert (res.target.x, res.target.y) == (1, 1)
    assert phase_distance(res.state, cluster.build_cluster(ClusterSpec(d, 1, 4, "pbc", y=1))) < 1e-9
    shifted = cluster.lu_transition(spec, "pi_pairs", offset=3)
    assert (shifted.target.x, shifted.target.y) == (d - 1, d - 1) and shifted.passed


def test_transition_target_checked_against_dense_oracle():
    spec = ClusterSpec(5, 1, 4, "pbc")
    res = cluster.lu_transition(spec, "pi_alternating")
    oracle = dense_cluster(5, 4, (res.target.x, res.target.y), True)
    assert phase_distance(res.state, oracle) < 1e-9


def test_transition_rejects_non_alternating_result():
    with pytest.raises(PlanError):
        cluster.lu_transition(ClusterSpec(5, 1, 3, "pbc"), "pi_alternating")
    with pytest.raises(PlanError):
        cluster.lu_transition(ClusterSpec(5, 1, 4, "pbc"), "warp")


def test_local_unitaries_keep_single_site_spectrum():
    spec = ClusterSpec(5, 2, 4, "pbc")
    res = cluster.lu_transition(spec, "pi_alternating")
    before = cluster.reduced_spectrum(cluster.build_cluster(spec), 5, 4, 0)
    after = cluster.reduced_spectrum(res.state, 5, 4, 0)
    assert max_norm(before - after) < 1e-12


# ---------------------------------------------------------------- factorization


@pytest.mark.parametrize("d,x,n", [(4, 2, 2), (4, 2, 3), (6, 2, 2), (6, 2, 3), (6, 3, 2), (6, 3, 3)])
def test_noncoprime_factorization(d, x, n):
    res = cluster.factorize_noncoprime(d, x, n)
    assert res.fidelity > 1 - 1e-9
    assert (res.s, res.b, res.a) == (gcd(x, d), d // gcd(x, d), x // gcd(x, d))


def test_factorization_d4_by_hand():
    # l = 2q + r: the state should be |C_2(1,1)> on the r digits and |+> on the q digits
    big = cluster.build_cluster(ClusterSpec(4, 2, 2)).reshape(2, 2, 2, 2)
    w = np.exp(2j * np.pi / 4)
    for q1, r1, q2, r2 in itertools.product(range(2), repeat=4):
        l1, l2 = 2 * q1 + r1, 2 * q2 + r2
        assert big[q1, r1, q2, r2] == pytest.approx(w ** (2 * l1 * l2) / 4)
        assert big[q1, r1, q2, r2] == pytest.approx((-1) ** (r1 * r2) / 4)


def test_factorization_needs_common_factor():
    with pytest.raises(NothingToFactorError):
        cluster.factorize_noncoprime(5, 2, 2)


# ---------------------------------------------------------------- teleportation


@pytest.mark.parametrize("d,x", [(2, 1), (3, 1), (3, 2), (4, 1), (5, 2)])
def test_teleport_identities(d, x):
    rep = cluster.teleport_identities(d, x, seed=d + x)
    assert rep.passed, rep


def test_qubit_teleport_by_hand():
    # measuring site 1 in X and site 2 in X leaves X^t Z^s |psi> on site 3 up to H H = 1
    rng = np.random.default_rng(5)
    psi = rng.normal(size=2) + 1j * rng.normal(size=2)
    psi /= np.linalg.norm(psi)
    block = cluster.three_qudit_block(psi, 2, 1)
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    for s, t in itertools.product(range(2), repeat=2):
        out = np.einsum("a,b,abc->c", h[s], h[t], block) * 2
        assert phase_distance(out, shift(2, t) @ clock(2, s) @ psi) < 1e-12


# ---------------------------------------------------------------- MPS form


@pytest.mark.parametrize("d,x", [(2, 1), (3, 1), (3, 2), (5, 2)])
def test_cluster_kraus_is_channel(d, x):
    from corrspace.mps import validate_channel

    assert validate_channel(cluster.cluster_kraus(d, x)).passed


def test_chain_with_input_matches_dense_oracle():
    rng = np.random.default_rng(9)
    psi = rng.normal(size=3) + 1j * rng.normal(size=3)
    t = cluster.chain_with_input(psi, 3, 1, 2)
    w = np.exp(2j * np.pi / 3)
    for a, b, c in itertools.product(range(3), repeat=3):
        assert t[a, b, c] == pytest.approx(psi[a] * w ** (a * b + 2 * b * c) / 3)


def test_spec_validation():
    with pytest.raises(InvalidDimensionError):
        ClusterSpec(3, 0, 3)
    with pytest.raises(InvalidDimensionError):
        ClusterSpec(3, 1, 2, "pbc")
    with pytest.raises(ValueError):
        ClusterSpec(3, 1, 3, "ring")
    spec = ClusterSpec.from_dict({"d": 5, "x": 2, "N": 3, "bc": "PBC"})
    assert spec.y == 3 and ClusterSpec.from_dict(spec.to_dict()) == spec
