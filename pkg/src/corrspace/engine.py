"""Measurement-based computation in the correlation (bond) space.

A measurement of a site in the basis ``<i|W = sum_j w_ij <j|`` induces the
operators ``A~_i = sum_j w_ij A_j`` on the bond space. Plans are ordered lists
of such rotations; step 1 acts first on the input vector, so a branch's net
operator is ``A~_{i_n} ... A~_{i_1}``.

Bookkeeping keeps ``net = F L`` exactly, where ``F`` is the byproduct frame
(a phase times a byproduct word) and ``L`` the logical operation. A step
outcome ``M = B E`` (``B`` a word, ``E`` the enacted part) updates the pair by
either moving ``F`` through ``E`` (when ``E F E^-1`` is again a word, as for
Fourier/Hadamard steps) or by conjugating ``E`` with ``F`` (AKLT gates,
where adaptive sign choices make ``F^dag E F`` the intended gate).
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

import numpy as np
import scipy.linalg
from numpy.typing import NDArray

from .aklt import ByproductGroup, ResourceFamily, weyl_group
from .cluster import chain_with_input, cluster_kraus
from .errors import DimensionMismatchError, LeakageError, NonUnitaryError, NotPowerOfTwoError, PlanError
from .mps import BoundaryPair, KrausSet, assemble_state, check_budget, circuit_state, dilation_unitary
from .operators import (
    EPS,
    Matrix,
    OperatorBasis,
    anticommutes,
    commutes,
    fourier_k,
    gellmann_basis,
    is_unitary,
    max_norm,
    pauli_word,
    phase_distance,
    proportionality,
    sp_word_sets,
    weyl,
    weyl_basis,
)

CLASSES = ("clean-identity", "active-gate", "projection-hit", "other")
SVD_CUT = 1e-8


# --------------------------------------------------------------------------
# adjoint lift and induced operators


def adjoint_lift(v: Matrix, basis: OperatorBasis, subset: int | None = None,
                 tol: float = 1e-8) -> Matrix:
    """``u_ij = tr(G_i^dag V G_j V^dag) / tr(G_i^dag G_i)`` on the first ``subset`` elements.

    Conjugation by ``V`` must map the span of those elements to itself;
    otherwise the block is not unitary and :class:`LeakageError` is raised.
    """
    v = np.asarray(v, dtype=complex)
    if v.shape != (basis.dim, basis.dim):
        raise DimensionMismatchError("virtual gate does not act on the bond space")
    if not is_unitary(v, 1e-7):
        raise NonUnitaryError("virtual gate must be unitary")
    k = len(basis) if subset is None else subset
    els = basis.elements[:k]
    moved = np.einsum("ab,jbc,dc->jad", v, els, v.conj())
    norms = np.real(np.einsum("iab,iab->i", els.conj(), els))
    u = np.einsum("iab,jab->ij", els.conj(), moved) / norms[:, None]
    if not is_unitary(u, tol):
        dev = max_norm(u @ u.conj().T - np.eye(k))
        raise LeakageError(f"conjugation leaves the operator span (unitarity defect {dev:.3g})")
    return u


def induced_operators(k: KrausSet, w: Matrix) -> NDArray[np.complex128]:
    """``A~_i = sum_j w_ij A_j`` as a ``(d, chi, chi)`` stack."""
    w = np.asarray(w, dtype=complex)
    if w.shape != (k.phys_dim, k.phys_dim):
        raise DimensionMismatchError("rotation must act on the physical space")
    if not is_unitary(w, 1e-7):
        raise NonUnitaryError("measurement rotation must be unitary")
    return np.einsum("ij,jab->iab", w, k.ops)


def measurement_rotation(fam: ResourceFamily, v: Matrix) -> Matrix:
    """Rotation ``W`` whose induced operators are ``V^dag A_i V``."""
    return adjoint_lift(v, fam.lift_basis, fam.phys_dim).conj()


# --------------------------------------------------------------------------
# byproduct words


@dataclass(frozen=True)
class ByproductWord:
    """A byproduct in normal form: ``phase * words[index]``.

    ``factors`` keeps the per-step byproduct indices that produced it.
    """

    index: int
    phase: complex
    label: str
    factors: tuple[int, ...] = ()


def reduce_factors(group: ByproductGroup, factors, right_to_left: bool = False) -> tuple[int, complex]:
    """Reduce the matrix product ``words[f_0] words[f_1] ...`` to ``(index, phase)``."""
    factors = list(factors)
    if not factors:
        return 0, 1.0 + 0j
    if right_to_left:
        idx, ph = factors[-1], 1.0 + 0j
        for f in reversed(factors[:-1]):
            idx, c = group.product(f, idx)
            ph *= c
    else:
        idx, ph = factors[0], 1.0 + 0j
        for f in factors[1:]:
            idx, c = group.product(idx, f)
            ph *= c
    return idx, complex(ph)


def word_from_factors(group: ByproductGroup, factors) -> ByproductWord:
    idx, ph = reduce_factors(group, factors)
    return ByproductWord(idx, ph, group.label(idx), tuple(factors))


# --------------------------------------------------------------------------
# plans


@dataclass(frozen=True, eq=False)
class MeasurementStep:
    """One measured site (or two-site block).

    ``generator``/``theta`` describe the target ``V = exp(-i theta G)`` of gate
    steps. With ``adaptive=True`` the step switches to ``alt_rotation`` (built
    for ``exp(+i theta G)``) whenever the accumulated byproduct anticommutes
    with ``G``.
    """

    rotation: Matrix
    intent: str = "gate"
    label: str = ""
    generator: Matrix | None = None
    theta: float = 0.0
    adaptive: bool = False
    alt_rotation: Matrix | None = None
    reference: bool = False

    def __post_init__(self):
        if self.intent not in ("gate", "projection", "wire"):
            raise PlanError(f"unknown step intent {self.intent!r}")
        if self.adaptive and (self.generator is None or self.alt_rotation is None):
            raise PlanError("adaptive steps need a generator and an alternative rotation")
        for r in (self.rotation, self.alt_rotation):
            if r is not None and not is_unitary(np.asarray(r), 1e-7):
                raise NonUnitaryError("basis rotations must be unitary")


@dataclass(frozen=True, eq=False)
class MeasurementPlan:
    family: ResourceFamily
    steps: tuple[MeasurementStep, ...]
    input_state: NDArray[np.complex128]

    def __post_init__(self):
        steps = tuple(self.steps)
        if not steps:
            raise PlanError("a plan needs at least one step")
        for s in steps:
            if np.shape(s.rotation) != (self.family.phys_dim, self.family.phys_dim):
                raise DimensionMismatchError("step rotation does not match the physical dimension")
        psi = np.asarray(self.input_state, dtype=complex).reshape(-1)
        if len(psi) != self.family.bond_dim:
            raise DimensionMismatchError("input state must live in the bond space")
        nrm = np.linalg.norm(psi)
        if nrm < 1e-14:
            raise PlanError("input state is zero")
        object.__setattr__(self, "steps", steps)
        object.__setattr__(self, "input_state", psi / nrm)


@dataclass(frozen=True, eq=False)
class BranchRecord:
    outcomes: tuple[int, ...]
    probability: float
    net_operator: Matrix
    byproduct: ByproductWord | None
    logical: Matrix
    classes: tuple[str, ...]
    flipped: tuple[bool, ...]
    anomaly: bool = False

    @property
    def fully_active(self) -> bool:
        return all(c == "active-gate" for c in self.classes)


@dataclass(frozen=True)
class StepOutcome:
    cls: str
    word: int | None
    enacted: Matrix


def expected_projection_rank(fam: ResourceFamily) -> int:
    if fam.tag in ("su", "cluster"):
        return 1
    return fam.bond_dim // 2


def _projector_word(group: ByproductGroup, n: Matrix, rank: int) -> int | None:
    for k, w in enumerate(group.words.elements):
        q = w.conj().T @ n
        c = np.trace(q) / rank
        if abs(abs(c) - 1) > 1e-7:
            continue
        p = q / c
        if max_norm(p - p.conj().T) < 1e-7 and max_norm(p @ p - p) < 1e-7:
            return k
    return None


def classify_operator(m: Matrix, group: ByproductGroup, rank: int) -> tuple[str, int | None]:
    """Classify an induced operator; returns the class and the byproduct word found."""
    s = np.linalg.svd(m, compute_uv=False)
    if s[0] < 1e-12:
        return "other", None
    n = m / s[0]
    if s[-1] > s[0] * (1 - SVD_CUT):
        found = group.identify(n)
        if found is not None:
            return "clean-identity", found[0]
        return "active-gate", None
    nonzero = s[s > s[0] * SVD_CUT]
    if len(nonzero) == rank and np.all(nonzero > s[0] * (1 - SVD_CUT)):
        k = _projector_word(group, n, rank)
        if k is not None:
            return "projection-hit", k
    return "other", None


def analyse_outcome(fam: ResourceFamily, step: MeasurementStep, induced: NDArray, i: int) -> StepOutcome:
    """Split ``M = A~_i`` into a byproduct word and the enacted operator ``E = B^dag M``."""
    group = fam.byproducts
    m = induced[i]
    cls, word = classify_operator(m, group, expected_projection_rank(fam))
    if word is None and cls == "active-gate":
        if step.reference:
            ref = induced[0] / np.linalg.norm(induced[0], 2)
            found = group.identify(m @ ref.conj().T / np.linalg.norm(m, 2))
        else:
            found = group.identify(fam.words[i])
        word = None if found is None else found[0]
    if word is None:
        return StepOutcome(cls, None, m)
    return StepOutcome(cls, word, group.words[word].conj().T @ m)


def _choose_rotation(step: MeasurementStep, frame: Matrix) -> tuple[Matrix, bool]:
    if step.adaptive and anticommutes(frame / np.linalg.norm(frame, 2), step.generator, 1e-8):
        return step.alt_rotation, True
    return step.rotation, False


def _advance(group: ByproductGroup, frame: Matrix, logical: Matrix, out: StepOutcome):
    """Update ``(F, L)`` with ``net = F L`` after an outcome ``M = B E``."""
    if out.word is None:
        return None, out.enacted @ frame @ logical
    b = group.words[out.word]
    e = out.enacted
    s = np.linalg.svd(e, compute_uv=False)
    if s[-1] > s[0] * (1 - SVD_CUT):
        moved = e @ frame @ np.linalg.inv(e)
        if group.identify(moved / np.linalg.norm(moved, 2)) is not None:
            return b @ moved, e @ logical
    return b @ frame, np.linalg.inv(frame) @ e @ frame @ logical


def run_plan(plan: MeasurementPlan, mode: str = "enumerate", seed: int | None = None) -> list[BranchRecord]:
    """Enumerate every outcome branch, or sample one trajectory with ``seed``."""
    if mode not in ("enumerate", "sample"):
        raise PlanError(f"unknown mode {mode!r}")
    fam = plan.family
    group = fam.byproducts
    chi, d = fam.bond_dim, fam.phys_dim
    cache: dict[int, NDArray] = {}

    def induced_for(rot: Matrix) -> NDArray:
        key = id(rot)
        if key not in cache:
            cache[key] = induced_operators(fam.kraus, rot)
        return cache[key]

    def finish(outcomes, net, frame, logical, classes, flips, factors) -> BranchRecord:
        vec = net @ plan.input_state
        prob = float(np.real(np.vdot(vec, vec)))
        word = None
        if frame is not None:
            found = group.identify(frame / np.linalg.norm(frame, 2))
            if found is not None:
                word = ByproductWord(found[0], found[1] / abs(found[1]), group.label(found[0]),
                                     tuple(f for f in factors if f is not None))
        anomaly = any(c == "other" and s.intent != "projection" for c, s in zip(classes, plan.steps))
        return BranchRecord(tuple(outcomes), prob, net, word, logical, tuple(classes), tuple(flips), anomaly)

    eye = np.eye(chi, dtype=complex)
    if mode == "sample":
        rng = np.random.default_rng(seed)
        net, frame, logical = eye, eye, eye
        outcomes, classes, flips, factors = [], [], [], []
        for step in plan.steps:
            rot, flip = _choose_rotation(step, frame if frame is not None else eye)
            ind = induced_for(rot)
            vec = net @ plan.input_state
            branch = np.einsum("iab,b->ia", ind, vec)
            probs = np.real(np.einsum("ia,ia->i", branch.conj(), branch))
            i = int(rng.choice(d, p=probs / probs.sum()))
            out = analyse_outcome(fam, step, ind, i)
            net = ind[i] @ net
            if frame is not None:
                frame, logical = _advance(group, frame, logical, out)
            else:
                logical = out.enacted @ logical
            outcomes.append(i)
            classes.append(out.cls)
            flips.append(flip)
            factors.append(out.word)
        return [finish(outcomes, net, frame, logical, classes, flips, factors)]

    check_budget(d ** len(plan.steps) * chi * chi)
    records: list[BranchRecord] = []

    def walk(k, outcomes, net, frame, logical, classes, flips, factors):
        if k == len(plan.steps):
            records.append(finish(outcomes, net, frame, logical, classes, flips, factors))
            return
        step = plan.steps[k]
        rot, flip = _choose_rotation(step, frame if frame is not None else eye)
        ind = induced_for(rot)
        for i in range(d):
            out = analyse_outcome(fam, step, ind, i)
            if frame is not None:
                nf, nl = _advance(group, frame, logical, out)
            else:
                nf, nl = None, out.enacted @ logical
            walk(k + 1, outcomes + [i], ind[i] @ net, nf, nl, classes + [out.cls],
                 flips + [flip], factors + [out.word])

    walk(0, [], eye, eye, eye, [], [], [])
    return records


# --------------------------------------------------------------------------
# elementary generators and gate steps


_MUB = re.compile(r"^(?:X(\d*))?(?:Z(\d*))?-mub(?::(\d+))?$")


def mub_operators(n: int) -> list[tuple[str, Matrix]]:
    """``Z, X, XZ, X^2 Z, ..., X^(n-1) Z``; only ``Z`` and ``X`` unless ``n`` is prime."""
    ops = [("Z", weyl(n, 0, 1)), ("X", weyl(n, 1, 0))]
    if _is_prime(n):
        ops += [(("X" if j == 1 else f"X{j}") + "Z", weyl(n, j, 1)) for j in range(1, n)]
    return ops


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % p for p in range(2, int(n**0.5) + 1))


def mub_eigenvectors(op: Matrix) -> Matrix:
    """Columns are eigenvectors sorted by eigenvalue angle in ``[0, 2 pi)``."""
    vals, vecs = np.linalg.eig(op)
    order = np.argsort(np.mod(np.angle(vals), 2 * np.pi) + 1e-12)
    vecs = vecs[:, order]
    q, _ = np.linalg.qr(vecs)
    phases = np.diag(q.conj().T @ vecs)
    return q * (phases / np.abs(phases))


def resolve_generator(fam: ResourceFamily, name: str) -> Matrix:
    """Hermitian ``G`` with target ``V = exp(-i theta G)``.

    For SU(N) the name ``"<op>-mub:<e>"`` selects ``G = -|lambda_e><lambda_e|``
    (so ``V = exp(i theta |lambda><lambda|)``) for the MUB operator ``op``.
    Other families take a label of their algebra or a Pauli word.
    """
    if fam.tag == "su":
        n = fam.bond_dim
        mt = _MUB.match(name)
        if not mt:
            raise PlanError(f"SU({n}) generators look like 'Z-mub:0', got {name!r}")
        ops = dict(mub_operators(n))
        key = name.split("-mub")[0]
        if key not in ops:
            raise PlanError(f"{key} is not an admissible MUB operator for N={n}")
        e = int(mt.group(3) or 0)
        if not 0 <= e < n:
            raise PlanError(f"eigenvector index must lie in [0, {n})")
        lam = mub_eigenvectors(ops[key])[:, e]
        return -np.outer(lam, lam.conj())
    if name in fam.algebra.labels:
        return fam.algebra[fam.algebra.index(name)]
    if fam.tag == "spin1" and name in ("X", "Y", "Z"):
        return pauli_word(name) / 2
    try:
        g = pauli_word(name)
    except ValueError:
        raise PlanError(f"unknown generator {name!r} for {fam.name}") from None
    if g.shape != (fam.bond_dim, fam.bond_dim):
        raise PlanError(f"generator {name!r} has the wrong size")
    if not any(proportionality(g, a) is not None for a in fam.algebra):
        raise PlanError(f"{name!r} is outside the algebra of {fam.name}")
    return g


def elementary_generators(fam: ResourceFamily) -> list[tuple[str, Matrix]]:
    if fam.tag == "su":
        out = []
        for key, _ in mub_operators(fam.bond_dim):
            for e in range(fam.bond_dim):
                name = f"{key}-mub:{e}"
                out.append((name, resolve_generator(fam, name)))
        return out
    if fam.tag == "spin1":
        return [(c, pauli_word(c) / 2) for c in "XYZ"]
    return list(zip(fam.algebra.labels, fam.algebra.elements))


def elementary_gate_plan(fam: ResourceFamily, generator: str | Matrix, theta: float,
                         adaptive: bool = False) -> MeasurementStep:
    """Gate step targeting ``V = exp(-i theta G)``; the outcome operators are ``V^dag A_i V``."""
    if fam.tag == "cluster":
        raise PlanError("cluster steps are built with cluster_basis_step")
    name = generator if isinstance(generator, str) else "custom"
    g = resolve_generator(fam, generator) if isinstance(generator, str) else np.asarray(generator, dtype=complex)
    v = scipy.linalg.expm(-1j * theta * g)
    rot = measurement_rotation(fam, v)
    alt = measurement_rotation(fam, v.conj().T) if adaptive else None
    return MeasurementStep(rot, "gate", f"{name}({theta:g})", g, theta, adaptive, alt)


def wire_step(fam: ResourceFamily) -> MeasurementStep:
    return MeasurementStep(np.eye(fam.phys_dim, dtype=complex), "wire", "wire")


# --------------------------------------------------------------------------
# cluster resources


def cluster_resource(d: int, x: int, y: int | None = None, blocked: bool | None = None) -> ResourceFamily:
    """Cluster wire as a resource; two-site blocks unless ``x == y``."""
    y = d - x if y is None else y
    blocked = (x != y) if blocked is None else blocked
    k = cluster_kraus(d, x, y, blocked)
    basis = weyl_basis(d)
    return ResourceFamily("cluster", {"d": d, "x": x, "y": y, "blocked": blocked}, k, weyl_group(d),
                          gellmann_basis(d), basis, d == 2)


def site_rotation(d: int, token: str) -> Matrix:
    """``I``, ``H`` (qubits), ``F<k>`` or ``F<k>:<a>`` (``F_k diag(e^{i a l})``)."""
    token = token.strip()
    if token == "I":
        return np.eye(d, dtype=complex)
    if token == "H":
        if d != 2:
            raise PlanError("H is only defined for qubits; use F1")
        return fourier_k(2, 1)
    mt = re.fullmatch(r"F(\d+)(?::([-+0-9.eE]+))?", token)
    if not mt:
        raise PlanError(f"unknown site basis {token!r}")
    f = fourier_k(d, int(mt.group(1)))
    if mt.group(2) is not None:
        f = f @ np.diag(np.exp(1j * float(mt.group(2)) * np.arange(d)))
    return f


def cluster_basis_step(fam: ResourceFamily, tokens, intent: str = "wire") -> MeasurementStep:
    d = fam.params["d"]
    tokens = [tokens] if isinstance(tokens, str) else list(tokens)
    per_block = 2 if fam.params["blocked"] else 1
    if len(tokens) == 1 and per_block == 2:
        tokens = tokens * 2
    if len(tokens) != per_block:
        raise PlanError(f"need {per_block} site bases per step, got {len(tokens)}")
    rot = np.ones((1, 1), dtype=complex)
    for t in tokens:
        rot = np.kron(rot, site_rotation(d, t))
    return MeasurementStep(rot, intent, "|".join(tokens), reference=True)


# --------------------------------------------------------------------------
# standard plans


def teleport_plan(input_state=None) -> MeasurementPlan:
    """Qubit cluster wire measured twice in the ``X`` basis."""
    fam = cluster_resource(2, 1)
    psi = np.array([1.0, 0.0]) if input_state is None else input_state
    step = cluster_basis_step(fam, "H")
    return MeasurementPlan(fam, (step, step), psi)


def euler_plan(fam: ResourceFamily, angles=(0.3, 0.7, -0.4), axes=("Z", "X", "Z"),
               input_state=None) -> MeasurementPlan:
    """Three adaptive gate steps; fully active branches enact ``V_3^2 V_2^2 V_1^2``."""
    if not fam.is_pauli:
        raise PlanError("adaptive Euler plans need a Pauli byproduct group")
    steps = tuple(elementary_gate_plan(fam, g, t, adaptive=True) for g, t in zip(axes, angles))
    psi = np.eye(fam.bond_dim)[0] if input_state is None else input_state
    return MeasurementPlan(fam, steps, psi)


def euler_target(fam: ResourceFamily, angles, axes) -> Matrix:
    """``V_n^2 ... V_1^2`` for ``V_k = exp(-i theta_k G_k)``."""
    out = np.eye(fam.bond_dim, dtype=complex)
    for g, t in zip(axes, angles):
        out = scipy.linalg.expm(-2j * t * resolve_generator(fam, g)) @ out
    return out


# --------------------------------------------------------------------------
# success census


@dataclass(frozen=True)
class CensusResult:
    family: str
    fraction: Fraction
    per_generator: dict
    independent: bool
    table: tuple


def success_census(fam: ResourceFamily, theta: float = 0.37, generators=None) -> CensusResult:
    """Exact fraction of single-step outcomes that enact a nontrivial gate.

    Every elementary generator of the family is tried; the fraction must not
    depend on the choice.
    """
    gens = elementary_generators(fam) if generators is None else [
        (g, resolve_generator(fam, g)) for g in generators]
    per: dict[str, Fraction] = {}
    table = ()
    for name, g in gens:
        step = elementary_gate_plan(fam, g, theta)
        ind = induced_operators(fam.kraus, step.rotation)
        rows = []
        active = 0
        for i in range(fam.phys_dim):
            out = analyse_outcome(fam, step, ind, i)
            active += out.cls == "active-gate"
            rows.append((fam.kraus.labels[i], out.cls))
        per[name] = Fraction(active, fam.phys_dim)
        if not table:
            table = tuple(rows)
    values = set(per.values())
    frac = next(iter(values)) if len(values) == 1 else min(values)
    return CensusResult(fam.name, frac, per, len(values) == 1, table)


def closed_form_fraction(fam: ResourceFamily) -> Fraction:
    if fam.tag == "spin1":
        return Fraction(2, 3)
    if fam.tag == "su":
        n = fam.params["N"]
        return Fraction(n, n + 1)
    if fam.tag == "so_fund":
        return Fraction(2, 2 * fam.params["l"] + 1)
    if fam.tag == "so_adj":
        l = fam.params["l"]  # noqa: E741
        return Fraction(2 * (2 * l - 1), l * (2 * l + 1))
    if fam.tag == "sp":
        n = 2 ** fam.params["m"]
        return Fraction(n + 1, 2 * n + 1)
    raise PlanError(f"no closed form for {fam.tag}")


# --------------------------------------------------------------------------
# projection bases


@dataclass(frozen=True, eq=False)
class ProjectionResult:
    family: str
    rotation: Matrix
    induced: NDArray[np.complex128]
    classes: tuple[str, ...]
    hits: tuple[int, ...]
    fraction: Fraction
    detail: dict = field(default_factory=dict)


def _su_projection_rotation(n: int) -> Matrix:
    f = np.exp(2j * np.pi * np.outer(np.arange(n), np.arange(n)) / n) / np.sqrt(n)
    return scipy.linalg.block_diag(*([f] * (n - 1)), np.eye(n - 1))


def _pauli_projection_rotation(fam: ResourceFamily, qubit: int, r: str):
    words = fam.words.elements
    nq = int(round(np.log2(fam.bond_dim)))
    rmat = pauli_word("".join(r if q == qubit else "1" for q in range(nq)))
    w = np.eye(fam.phys_dim, dtype=complex)
    paired: set[int] = set()
    pairs = []
    for p in range(len(words)):
        if p in paired:
            continue
        pr = words[p] @ rmat
        for q in range(p + 1, len(words)):
            if q in paired:
                continue
            c = proportionality(words[q], pr)
            if c is not None and abs(abs(c) - 1) < 1e-9:
                w[p, p], w[p, q] = 1 / np.sqrt(2), np.conj(c) / np.sqrt(2)
                w[q, p], w[q, q] = 1 / np.sqrt(2), -np.conj(c) / np.sqrt(2)
                paired |= {p, q}
                pairs.append((p, q))
                break
    return w, pairs


def projection_basis(fam: ResourceFamily) -> ProjectionResult:
    """Rotation turning as many outcomes as possible into byproduct-times-projector operators.

    SU(N): a Fourier transform on every ``X^a Z^k`` group, giving
    ``sqrt(N) X^a P_{-i}`` up to the Kraus weight. Pauli families: outcome
    pairs ``P, Q = c P R`` with ``R`` a single-qubit Pauli are recombined into
    ``P (1 +- R) / sqrt(2)``; the qubit and ``R`` are chosen to maximize hits.
    """
    rank = expected_projection_rank(fam)
    if fam.tag == "su":
        n = fam.bond_dim
        w = _su_projection_rotation(n)
        detail = {"scheme": "fourier-blocks"}
    elif fam.is_pauli and fam.tag != "cluster":
        nq = int(round(np.log2(fam.bond_dim)))
        best = None
        for q in reversed(range(nq)):
            for r in "ZXY":
                w, pairs = _pauli_projection_rotation(fam, q, r)
                if best is None or len(pairs) > len(best[1]):
                    best = (w, pairs, q, r)
        w, pairs, q, r = best
        detail = {"scheme": "pauli-pairs", "qubit": q, "pauli": r,
                  "pairs": [(fam.kraus.labels[a], fam.kraus.labels[b]) for a, b in pairs]}
    else:
        raise PlanError(f"no projection basis for {fam.name}")
    ind = induced_operators(fam.kraus, w)
    classes = tuple(classify_operator(m, fam.byproducts, rank)[0] for m in ind)
    hits = tuple(i for i, c in enumerate(classes) if c == "projection-hit")
    return ProjectionResult(fam.name, w, ind, classes, hits, Fraction(len(hits), fam.phys_dim), detail)


def su_projection_expected(n: int) -> NDArray[np.complex128]:
    """``sqrt(N) X^a P_{-i}`` blocks followed by ``Z^k``, times the Kraus weight."""
    weight = 1 / np.sqrt(n * n - 1)
    out = []
    for a in range(1, n):
        for i in range(n):
            p = np.zeros((n, n), dtype=complex)
            p[(-i) % n, (-i) % n] = 1.0
            out.append(weight * np.sqrt(n) * weyl(n, a, 0) @ p)
    out += [weight * weyl(n, 0, k) for k in range(1, n)]
    return np.array(out)


# --------------------------------------------------------------------------
# byproduct propagation


@dataclass(frozen=True, eq=False)
class PullThroughResult:
    word: Matrix
    gate: Matrix
    classification: str
    deviation: float


def byproduct_pullthrough(word: Matrix, generator: Matrix, theta: float) -> PullThroughResult:
    """Move ``V = exp(-i theta G)`` to the left of the byproduct ``B``: ``V B = B V'``.

    Commuting: ``V' = V``. Anticommuting: ``V' = exp(+i theta G)``, and then also
    ``V^dag B V = B exp(-2 i theta G)``. Otherwise ``V' = B^dag V B``.
    """
    b = np.asarray(word, dtype=complex)
    v = scipy.linalg.expm(-1j * theta * generator)
    if commutes(b, generator):
        gate, cls = v, "clean"
        dev = max_norm(v @ b - b @ gate)
    elif anticommutes(b, generator):
        gate, cls = scipy.linalg.expm(1j * theta * generator), "active"
        doubled = scipy.linalg.expm(-2j * theta * generator)
        dev = max(max_norm(v @ b - b @ gate), max_norm(v.conj().T @ b @ v - b @ doubled))
    else:
        gate, cls = b.conj().T @ v @ b, "other"
        dev = max_norm(v @ b - b @ gate)
    return PullThroughResult(b, gate, cls, dev)


# --------------------------------------------------------------------------
# symplectic commutation facts


@dataclass(frozen=True)
class CommutationRow:
    pair: str
    observed: tuple[int, ...]
    expected: int
    passed: bool


def sp_commutation_census(n: int) -> list[CommutationRow]:
    """Commuting-partner counts between the ``{X_ij}``, ``{Y_ij}``, ``{Z_j}`` word sets.

    Each element of the first set is paired with every element of the second
    set (itself included when the sets coincide).
    """
    if n < 2 or n & (n - 1):
        raise NotPowerOfTwoError(f"n must be a power of two >= 2, got {n}")
    sets = dict(zip("XYZ", sp_word_sets(n)))
    mats = {k: [pauli_word(w) for w in v] for k, v in sets.items()}
    expected = {"X-X": n * n // 4, "Y-Y": n * n // 4, "X-Y": n * n // 4 - n // 2,
                "X-Z": n // 2 - 1, "Y-Z": n // 2 - 1,
                "Z-X": n * n // 4 - n // 2, "Z-Y": n * n // 4 - n // 2}
    rows = []
    for pair, exp in expected.items():
        a, b = pair.split("-")
        counts = tuple(sum(commutes(p, q) for q in mats[b]) for p in mats[a])
        rows.append(CommutationRow(pair, counts, exp, all(c == exp for c in counts)))
    return rows


# --------------------------------------------------------------------------
# real versus virtual picture


@dataclass(frozen=True)
class RealVirtualReport:
    family: str
    branches: int
    max_state_deviation: float
    max_probability_deviation: float
    mps_consistency: float
    passed: bool


def real_vs_virtual_check(plan: MeasurementPlan, tol: float = 1e-8) -> RealVirtualReport:
    """Measure the physical resource state branch by branch and compare with ``run_plan``.

    Cluster wires are prepared gate by gate with the input on the first site.
    AKLT-type chains are prepared by a sequential circuit of the dilation
    unitary, the bond register starting in the input state, so the first
    measured site is the one produced first. Residual bond/site vectors must
    equal ``net |in>``.
    """
    fam = plan.family
    records = run_plan(plan, "enumerate")
    steps = len(plan.steps)
    psi = plan.input_state
    worst_state = worst_prob = 0.0
    consistency = 0.0
    if fam.tag == "cluster":
        d, x, y = fam.params["d"], fam.params["x"], fam.params["y"]
        per = 2 if fam.params["blocked"] else 1
        phys = chain_with_input(psi, d, x, steps * per, y)
        for rec in records:
            t = phys
            for k, i in enumerate(rec.outcomes):
                rot = plan.steps[k].alt_rotation if rec.flipped[k] else plan.steps[k].rotation
                row = rot[i].reshape((d,) * per)
                t = np.tensordot(t, row, axes=(list(range(per)), list(range(per))))
            virt = rec.net_operator @ psi
            worst_state = max(worst_state, phase_distance(t, virt) if np.linalg.norm(virt) > 1e-12
                              else max_norm(t))
            worst_prob = max(worst_prob, abs(float(np.vdot(t, t).real) - rec.probability))
    else:
        d, chi = fam.phys_dim, fam.bond_dim
        boundary = BoundaryPair(psi, None)
        phys = circuit_state(dilation_unitary(fam.kraus), d, steps, boundary, normalize=False)
        mps = assemble_state(fam.kraus, steps, boundary, normalize=False)
        consistency = max_norm(phys - mps)
        phys = phys.reshape((d,) * steps + (chi,))
        for rec in records:
            t = phys
            for k, i in enumerate(rec.outcomes):
                rot = plan.steps[k].alt_rotation if rec.flipped[k] else plan.steps[k].rotation
                # step 1 acts first on the bond vector, i.e. on the last site
                t = np.tensordot(t, rot[i], axes=([t.ndim - 2], [0]))
            virt = rec.net_operator @ psi
            worst_state = max(worst_state, phase_distance(t, virt) if np.linalg.norm(virt) > 1e-12
                              else max_norm(t))
            worst_prob = max(worst_prob, abs(float(np.vdot(t, t).real) - rec.probability))
    passed = max(worst_state, worst_prob, consistency) < tol
    return RealVirtualReport(fam.name, len(records), worst_state, worst_prob, consistency, passed)


# --------------------------------------------------------------------------
# universality


@dataclass(frozen=True)
class SpanReport:
    family: str
    generators: int
    rank: int
    expected: int
    passed: bool


def lie_closure_rank(generators, tol: float = 1e-9) -> int:
    """Real dimension of the Lie algebra generated by ``{i G}`` (traceless parts)."""
    basis: list[np.ndarray] = []
    mats: list[Matrix] = []

    def add(m: Matrix) -> bool:
        dim = len(m)
        m = m - np.trace(m) / dim * np.eye(dim)
        v = np.concatenate([m.real.ravel(), m.imag.ravel()])
        for b in basis:
            v = v - np.dot(b, v) * b
        for b in basis:
            v = v - np.dot(b, v) * b
        nv = np.linalg.norm(v)
        if nv < tol:
            return False
        v = v / nv
        basis.append(v)
        half = len(v) // 2
        mats.append((v[:half] + 1j * v[half:]).reshape(dim, dim))
        return True

    gens = [1j * np.asarray(g, dtype=complex) for g in generators]
    for g in gens:
        add(g)
    frontier = list(mats)
    while frontier:
        fresh = []
        for a in frontier:
            for g in gens:
                if add(a @ g - g @ a):
                    fresh.append(mats[-1])
        frontier = fresh
    return len(basis)


def expected_algebra_dim(fam: ResourceFamily) -> int:
    if fam.tag in ("su", "spin1", "cluster"):
        return fam.bond_dim**2 - 1
    if fam.tag in ("so_fund", "so_adj"):
        l = fam.params["l"]  # noqa: E741
        return l * (2 * l + 1)
    n = 2 ** fam.params["m"]
    return n * (2 * n + 1)


def universality_span_check(fam: ResourceFamily) -> SpanReport:
    gens = [g for _, g in elementary_generators(fam)]
    rank = lie_closure_rank(gens)
    exp = expected_algebra_dim(fam)
    return SpanReport(fam.name, len(gens), rank, exp, rank == exp)


def coprime_residues(d: int) -> list[int]:
    return [k for k in range(1, d) if gcd(k, d) == 1]


def all_outcomes(d: int, steps: int):
    return itertools.product(range(d), repeat=steps)
