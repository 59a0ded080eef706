"""Kraus sets of AKLT-type valence-bond resource states.

Every family here has Kraus operators ``A_i = U_i / sqrt(phys_dim)`` with
``U_i`` unitary words: Heisenberg-Weyl words for SU(N), Pauli words for the
spin-1, SO(2l+1) and Sp(2n) families.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import InvalidDimensionError, PlanError
from .mps import KrausSet, SymmetryReport, check_symmetry_condition
from .operators import (
    EPS,
    PAULI,
    OperatorBasis,
    clifford_matrices,
    gellmann_basis,
    identify_pauli,
    pauli_basis,
    pauli_word,
    so_spinor_generators,
    sp_generators,
    weyl,
    weyl_basis,
    weyl_index_pairs,
    weyl_label,
)

FAMILY_TAGS = ("spin1", "su", "so_fund", "so_adj", "sp", "cluster")


@dataclass(frozen=True, eq=False)
class ByproductGroup:
    """Finite group (up to phases) of correctable byproduct words.

    ``words`` always contains the identity at index 0.
    """

    words: OperatorBasis

    @property
    def dim(self) -> int:
        return self.words.dim

    def identify(self, m: np.ndarray, tol: float = 1e-8) -> tuple[int, complex] | None:
        """``(index, c)`` with ``m = c * words[index]``, or ``None``."""
        m = np.asarray(m, dtype=complex)
        flat = self.words.elements.reshape(len(self.words), -1)
        coeffs = flat.conj() @ m.reshape(-1) / self.dim
        k = int(np.argmax(np.abs(coeffs)))
        c = coeffs[k]
        if abs(c) < tol or np.max(np.abs(m - c * self.words[k])) > tol * max(1.0, abs(c)):
            return None
        return k, complex(c)

    def label(self, index: int) -> str:
        return self.words.labels[index]

    def product(self, a: int, b: int) -> tuple[int, complex]:
        """``words[a] @ words[b] = phase * words[c]``."""
        found = self.identify(self.words[a] @ self.words[b])
        if found is None:
            raise PlanError("byproduct set is not closed under multiplication")
        return found


def weyl_group(d: int) -> ByproductGroup:
    return ByproductGroup(weyl_basis(d, "alpha", include_identity=True))


def pauli_group(n_qubits: int) -> ByproductGroup:
    return ByproductGroup(pauli_basis(n_qubits, include_identity=True))


@dataclass(frozen=True, eq=False)
class ResourceFamily:
    """A resource state's site tensor together with its computational data.

    ``words`` are the Kraus operators with the common weight divided out,
    ``algebra`` holds Hermitian generators of the virtual symmetry group and
    ``lift_basis`` starts with ``words`` and is completed to a basis of
    traceless operators on the bond space.
    """

    tag: str
    params: dict
    kraus: KrausSet
    byproducts: ByproductGroup
    algebra: OperatorBasis
    lift_basis: OperatorBasis
    is_pauli: bool
    notes: dict = field(default_factory=dict)

    @property
    def phys_dim(self) -> int:
        return self.kraus.phys_dim

    @property
    def bond_dim(self) -> int:
        return self.kraus.bond_dim

    @property
    def words(self) -> OperatorBasis:
        return OperatorBasis(self.bond_dim, self.kraus.unit_words(), self.kraus.labels)

    @property
    def name(self) -> str:
        if not self.params:
            return self.tag
        inner = ",".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.tag}({inner})"

    def to_dict(self) -> dict:
        return {"family": self.tag, **self.params}


AkltFamily = ResourceFamily


def _complete_with_paulis(mats: np.ndarray, words: list[str], n_qubits: int) -> OperatorBasis:
    """``mats`` first (signs kept), then the remaining non-identity Pauli words."""
    rest = [w for w in pauli_basis(n_qubits).labels if w not in set(words)]
    els = np.concatenate([mats, np.array([pauli_word(w) for w in rest]).reshape(-1, *mats.shape[1:])])
    return OperatorBasis(2**n_qubits, els, words + rest)


def _pauli_family(tag: str, params: dict, mats: np.ndarray, algebra: OperatorBasis,
                  labels: list[str] | None = None) -> ResourceFamily:
    """Family whose Kraus words are (signed) Pauli words."""
    nq = int(round(np.log2(mats.shape[1])))
    spelled = []
    for m in mats:
        found = identify_pauli(m)
        if found is None or abs(abs(found[1]) - 1) > EPS:
            raise InvalidDimensionError("family words must be Pauli words up to phase")
        spelled.append(found[0])
    weight = 1 / np.sqrt(len(mats))
    kraus = KrausSet(weight * mats, weight, labels or spelled)
    return ResourceFamily(tag, params, kraus, pauli_group(nq), algebra,
                          _complete_with_paulis(mats, spelled, nq), True, {"words": spelled})


def spin1_kraus() -> ResourceFamily:
    """Spin-1 AKLT tensor ``{X, Y, Z} / sqrt(3)`` on a qubit bond."""
    mats = np.array([PAULI[c] for c in "XYZ"])
    algebra = OperatorBasis(2, mats / 2, ["X/2", "Y/2", "Z/2"])
    return _pauli_family("spin1", {}, mats, algebra, ["X", "Y", "Z"])


def su_family(n: int, inverted: bool = False) -> ResourceFamily:
    """SU(N) state with fundamental/antifundamental bonds, Weyl-word Kraus set.

    Words are listed in the blocked order (``X^a Z^k`` groups, then ``Z^k``).
    ``inverted=True`` gives the spatially inverted state (transposed words).
    """
    if n < 2:
        raise InvalidDimensionError("SU(N) family needs N >= 2")
    pairs = weyl_index_pairs(n, "blocked")
    mats = np.array([weyl(n, j, k) for j, k in pairs])
    labels = [weyl_label(j, k) for j, k in pairs]
    if inverted:
        mats = np.transpose(mats, (0, 2, 1))
        labels = [f"{lab}^T" for lab in labels]
    weight = 1 / np.sqrt(n * n - 1)
    kraus = KrausSet(weight * mats, weight, labels)
    lift = OperatorBasis(n, mats, labels)
    algebra = gellmann_basis(n)
    return ResourceFamily("su", {"N": n, **({"inverted": True} if inverted else {})}, kraus,
                          weyl_group(n), algebra, lift, n == 2)


def so_fund_family(l: int) -> ResourceFamily:  # noqa: E741
    """SO(2l+1) state with vector sites and spinor bonds: Clifford words."""
    if l < 1:
        raise InvalidDimensionError("SO(2l+1) family needs l >= 1")
    gam = clifford_matrices(l)
    return _pauli_family("so_fund", {"l": l}, gam.elements, so_spinor_generators(l), list(gam.labels))


def so_adj_family(l: int) -> ResourceFamily:  # noqa: E741
    """SO(2l+1) state with adjoint sites and spinor bonds: ``Gamma^{ab}`` words."""
    if l < 1:
        raise InvalidDimensionError("SO(2l+1) family needs l >= 1")
    gen = so_spinor_generators(l)
    return _pauli_family("so_adj", {"l": l}, gen.elements, gen, list(gen.labels))


def sp_family(m: int) -> ResourceFamily:
    """Sp(2n) state, ``n = 2^m``, with adjoint sites: canonical Pauli-word generators."""
    if m < 1:
        raise InvalidDimensionError("Sp(2n) family needs m >= 1")
    n = 2**m
    gen = sp_generators(n, canonical=True)
    return _pauli_family("sp", {"m": m}, gen.elements, gen, list(gen.labels))


_ALIASES = {"spin1": "spin1", "spin-1": "spin1", "aklt": "spin1", "su": "su",
            "so-fund": "so_fund", "so_fund": "so_fund", "sofund": "so_fund",
            "so-adj": "so_adj", "so_adj": "so_adj", "soadj": "so_adj", "sp": "sp"}


def canonical_tag(name: str) -> str:
    try:
        return _ALIASES[str(name).lower()]
    except KeyError:
        raise PlanError(f"unknown AKLT family {name!r}") from None


def family_from_spec(spec: dict) -> ResourceFamily:
    """Parse ``{"family": "su", "N": 3}`` and friends."""
    tag = canonical_tag(spec.get("family", ""))
    try:
        if tag == "spin1":
            return spin1_kraus()
        if tag == "su":
            return su_family(int(spec["N"]), bool(spec.get("inverted", False)))
        if tag == "so_fund":
            return so_fund_family(int(spec["l"]))
        if tag == "so_adj":
            return so_adj_family(int(spec["l"]))
        return sp_family(int(spec["m"]))
    except KeyError as exc:
        raise PlanError(f"family {tag!r} needs parameter {exc.args[0]!r}") from None


def all_table_families() -> list[ResourceFamily]:
    """Desk-size members of every AKLT-type family."""
    fams = [su_family(n) for n in range(2, 6)]
    fams += [so_fund_family(l) for l in range(1, 4)]
    fams += [so_adj_family(l) for l in range(1, 4)]
    fams += [sp_family(m) for m in range(1, 3)]
    return fams


@dataclass(frozen=True)
class FamilySymmetryReport:
    family: str
    samples: int
    max_deviation: float
    passed: bool


def random_algebra_element(fam: ResourceFamily, rng: np.random.Generator,
                           theta: float | None = None) -> np.ndarray:
    """``exp(-i theta G)`` for a random element ``G`` of the virtual algebra."""
    coeffs = rng.standard_normal(len(fam.algebra))
    g = np.einsum("k,kab->ab", coeffs, fam.algebra.elements)
    g = g / np.linalg.norm(g)
    theta = rng.uniform(-np.pi, np.pi) if theta is None else theta
    return scipy.linalg.expm(-1j * theta * g)


def physical_rep(fam: ResourceFamily, v: np.ndarray) -> np.ndarray:
    """Physical unitary ``u(g)`` paired with the virtual ``V`` in the symmetry condition."""
    from .engine import adjoint_lift

    return adjoint_lift(v, fam.lift_basis, len(fam.words)).conj()


def verify_family_symmetry(fam: ResourceFamily, samples: int = 50, seed: int = 0,
                           tol: float = 1e-7) -> FamilySymmetryReport:
    """Check ``sum_j u_ij A_j = V^dag A_i V`` for random group elements ``V``."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        v = random_algebra_element(fam, rng)
        rep: SymmetryReport = check_symmetry_condition(fam.kraus, physical_rep(fam, v), v, tol)
        worst = max(worst, rep.deviation)
    return FamilySymmetryReport(fam.name, samples, worst, worst < tol)


def byproduct_closure_defect(fam: ResourceFamily) -> int:
    """Number of word pairs whose product is not a phase times a group word."""
    g = fam.byproducts
    bad = 0
    for a in range(len(g.words)):
        for b in range(len(g.words)):
            if g.identify(g.words[a] @ g.words[b]) is None:
                bad += 1
    return bad

