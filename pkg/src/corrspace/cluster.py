"""Qudit cluster states ``|C_d(x, y)>`` and their identities.

Sites are 0-based internally. Bond ``k`` joins sites ``k`` and ``k + 1`` and
carries the controlled-phase power ``x`` for even ``k`` and ``y`` for odd
``k`` (so the first bond carries ``S^x``). Under periodic boundaries the
wrap-around bond ``(N-1, 0)`` continues the alternation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd

import numpy as np
from numpy.typing import NDArray

from .errors import DimensionMismatchError, InvalidDimensionError, NothingToFactorError, PlanError
from .mps import KrausSet, block, check_budget
from .operators import (
    EPS,
    Matrix,
    basis_projector,
    clock,
    fourier_k,
    fourier_pair,
    max_norm,
    permutation_pi,
    phase_distance,
    plus_state,
    proportionality,
    random_state,
    shift,
)


@dataclass(frozen=True)
class ClusterSpec:
    """Qudit cluster chain. ``y`` defaults to ``d - x``."""

    d: int
    x: int
    n: int
    bc: str = "obc"
    y: int | None = None

    def __post_init__(self):
        if self.d < 2:
            raise InvalidDimensionError("cluster dimension must be >= 2")
        y = self.d - self.x if self.y is None else self.y
        object.__setattr__(self, "y", y)
        for p in (self.x, y):
            if not 1 <= p <= self.d - 1:
                raise InvalidDimensionError(f"gate powers must lie in [1, {self.d - 1}], got {p}")
        if self.bc not in ("obc", "pbc"):
            raise ValueError(f"boundary must be 'obc' or 'pbc', got {self.bc!r}")
        if self.n < 2 or (self.bc == "pbc" and self.n < 3):
            raise InvalidDimensionError("need N >= 2 sites (N >= 3 with periodic boundaries)")

    @classmethod
    def from_dict(cls, data: dict) -> ClusterSpec:
        return cls(d=int(data["d"]), x=int(data["x"]), n=int(data.get("N", data.get("n", 4))),
                   bc=str(data.get("bc", "obc")).lower(),
                   y=None if data.get("y") is None else int(data["y"]))

    def to_dict(self) -> dict:
        return {"family": "cluster", "d": self.d, "x": self.x, "y": self.y, "N": self.n, "bc": self.bc}

    def bonds(self) -> list[tuple[int, int, int]]:
        """``(site_a, site_b, power)`` for every entangling gate."""
        out = [(k, k + 1, self.x if k % 2 == 0 else self.y) for k in range(self.n - 1)]
        if self.bc == "pbc":
            k = self.n - 1
            out.append((k, 0, self.x if k % 2 == 0 else self.y))
        return out


def controlled_phase(d: int, x: int) -> Matrix:
    """``S^x = sum_l P_l (x) Z^(x l)``."""
    if not 1 <= x <= d - 1:
        raise InvalidDimensionError(f"power must lie in [1, {d - 1}], got {x}")
    ell = np.arange(d)
    return np.diag(np.exp(2j * np.pi * ((x * np.outer(ell, ell)) % d) / d).reshape(-1))


def build_cluster(spec: ClusterSpec) -> NDArray[np.complex128]:
    """Normalized ``|C_d(x, y)>`` as a flat vector over ``(i_1, ..., i_N)``."""
    d, n = spec.d, spec.n
    check_budget(d**n)
    exponent = np.zeros((d,) * n, dtype=np.int64)
    ell = np.arange(d)
    for a, b, p in spec.bonds():
        shape_a = [1] * n
        shape_a[a] = d
        shape_b = [1] * n
        shape_b[b] = d
        exponent = exponent + p * ell.reshape(shape_a) * ell.reshape(shape_b)
    psi = np.exp(2j * np.pi * (exponent % d) / d) / np.sqrt(d) ** n
    return psi.reshape(-1)


# --------------------------------------------------------------------------
# local operators on dense chains


def apply_local(state: NDArray, op: Matrix, site: int, d: int, n: int) -> NDArray:
    t = np.asarray(state).reshape((d,) * n)
    t = np.moveaxis(np.tensordot(op, t, axes=([1], [site])), 0, site)
    return t.reshape(-1)


def apply_pattern(state: NDArray, ops: dict[int, Matrix], d: int, n: int) -> NDArray:
    for site, op in ops.items():
        state = apply_local(state, op, site, d, n)
    return state


def translate(state: NDArray, d: int, n: int, by: int = 1) -> NDArray:
    """Move the content of site ``k`` to site ``k + by`` (cyclically)."""
    t = np.asarray(state).reshape((d,) * n)
    return np.moveaxis(t, list(range(n)), [(k + by) % n for k in range(n)]).reshape(-1)


@dataclass(frozen=True)
class StabilizerWord:
    """``X`` on ``center`` with ``Z`` powers on its neighbours.

    ``factors`` maps site to ``(x_power, z_power)``; the local operator is
    ``X^x Z^z``.
    """

    center: int
    factors: tuple[tuple[int, int, int], ...]

    def local_ops(self, d: int) -> dict[int, Matrix]:
        return {s: shift(d, xp) @ clock(d, zp) for s, xp, zp in self.factors}

    def apply(self, state: NDArray, d: int, n: int, dagger: bool = False) -> NDArray:
        ops = self.local_ops(d)
        if dagger:
            ops = {s: m.conj().T for s, m in ops.items()}
        return apply_pattern(state, ops, d, n)

    def matrix(self, d: int, n: int) -> Matrix:
        ops = self.local_ops(d)
        out = np.ones((1, 1), dtype=complex)
        for s in range(n):
            out = np.kron(out, ops.get(s, np.eye(d)))
        return out

    def describe(self) -> str:
        parts = []
        for s, xp, zp in self.factors:
            parts.append(f"{s}:" + ("X" if xp else "") + (f"Z^{zp}" if zp else ""))
        return " ".join(parts)


def stabilizer_generators(spec: ClusterSpec) -> list[StabilizerWord]:
    """One generator per site: ``X`` there and ``Z^(-p)`` across each bond of power ``p``.

    For interior sites this is ``Z^x X Z^y`` on odd (1-based) sites and
    ``Z^y X Z^x`` on even ones. OBC end sites get truncated words.
    """
    d = spec.d
    words = []
    for a in range(spec.n):
        zp: dict[int, int] = {}
        for s, t, p in spec.bonds():
            if s == a:
                zp[t] = (zp.get(t, 0) - p) % d
            elif t == a:
                zp[s] = (zp.get(s, 0) - p) % d
        factors = [(a, 1, 0)] + [(s, 0, z) for s, z in sorted(zp.items()) if z]
        words.append(StabilizerWord(a, tuple(sorted(factors))))
    return words


def is_boundary_generator(spec: ClusterSpec, word: StabilizerWord) -> bool:
    return spec.bc == "obc" and word.center in (0, spec.n - 1)


def parent_hamiltonian(spec: ClusterSpec) -> Matrix:
    """``H = -sum (K + K^dag)`` over stabilizer generators (OBC end terms dropped)."""
    dim = spec.d**spec.n
    check_budget(dim * dim)
    h = np.zeros((dim, dim), dtype=complex)
    for w in stabilizer_generators(spec):
        if is_boundary_generator(spec, w):
            continue
        k = w.matrix(spec.d, spec.n)
        h -= k + k.conj().T
    return h


# --------------------------------------------------------------------------
# symmetry-protected order


@dataclass(frozen=True, eq=False)
class SPTLabel:
    d: int
    x: int
    bond_dim: int
    vg: Matrix
    vh: Matrix
    cocycle_phase: complex
    mnc: bool


def spt_label(d: int, x: int) -> SPTLabel:
    """Projective representation carried by the bond of ``|C_d(x, d-x)>``."""
    if not 1 <= x <= d - 1:
        raise InvalidDimensionError(f"x must lie in [1, {d - 1}]")
    s = gcd(x, d)
    b, a = d // s, x // s
    vg = shift(b, 1)
    vh = clock(b, a)
    c = proportionality(vg @ vh, vh @ vg)
    return SPTLabel(d, x, b, vg, vh, complex(c), s == 1)


def projective_rep(d: int, x: int, i: int, j: int) -> Matrix:
    """``v_x(g_i, h_j) = X^i Z^(x j)``."""
    return shift(d, i % d) @ clock(d, (x * j) % d)


def cocycle(d: int, x: int, first: tuple[int, int], second: tuple[int, int]) -> complex:
    """2-cocycle ``w^(-x a j)`` for ``first = (i, j)`` and ``second = (a, b)``."""
    _, j = first
    a, _ = second
    return complex(np.exp(-2j * np.pi * ((x * a * j) % d) / d))


# --------------------------------------------------------------------------
# local-unitary transitions


@dataclass(frozen=True, eq=False)
class TransitionResult:
    pattern: str
    state: NDArray[np.complex128]
    target: ClusterSpec
    deviation: float
    passed: bool


def _multiplier(op: Matrix, d: int) -> int:
    """``mu`` for a permutation ``|m> -> |mu m>`` (must fix ``|0>``)."""
    image = int(np.argmax(np.abs(op[:, 1])))
    expected = np.zeros((d, d), dtype=complex)
    for m in range(d):
        expected[(image * m) % d, m] = 1.0
    if max_norm(np.abs(op) - expected) > EPS:
        raise PlanError("local operator is not a multiplicative relabeling")
    return image


def transition_ops(spec: ClusterSpec, pattern: str, offset: int = 0,
                   a: int | None = None, xf: int | None = None) -> dict[int, Matrix]:
    d, n = spec.d, spec.n
    if pattern == "identity":
        return {}
    if pattern == "pi_alternating":
        return {s: permutation_pi(d) for s in range(n) if (s - offset) % 2 == 0}
    if pattern == "pi_pairs":
        return {s: permutation_pi(d) for s in range(n) if (s + offset) % 4 in (2, 3)}
    if pattern == "f_ax_alternating":
        if a is None or xf is None:
            raise PlanError("f_ax_alternating needs parameters a and x")
        if gcd(a, d) != 1 or gcd(xf, d) != 1:
            raise PlanError("F_ax needs a and x coprime to d")
        f = fourier_pair(d, a, xf)
        return {s: f for s in range(n) if (s - offset) % 2 == 0}
    raise PlanError(f"unknown transition pattern {pattern!r}")


def lu_transition(spec: ClusterSpec, pattern: str, offset: int = 0, a: int | None = None,
                  xf: int | None = None, tol: float = EPS) -> TransitionResult:
    """Apply a site pattern of ``Pi`` / ``F_{ax}`` and compare with the rebuilt target.

    The target's gate powers follow from the relabelings: conjugating
    ``S^p`` by ``|m> -> |mu m>`` on one end gives ``S^(p / mu)``.
    """
    d = spec.d
    ops = transition_ops(spec, pattern, offset, a, xf)
    mu = {s: _multiplier(op, d) for s, op in ops.items()}
    powers = []
    for s, t, p in spec.bonds():
        q = p
        for site in (s, t):
            if site in mu:
                q = (q * pow(mu[site], -1, d)) % d
        powers.append(q)
    xt = powers[0]
    yt = powers[1] if len(powers) > 1 else (d - xt)
    if any(q != (xt if k % 2 == 0 else yt) for k, q in enumerate(powers)) or 0 in (xt, yt):
        raise PlanError(f"pattern {pattern!r} does not produce an alternating cluster from {spec}")
    target = ClusterSpec(d, xt, spec.n, spec.bc, y=yt)
    state = apply_pattern(build_cluster(spec), ops, d, spec.n)
    dev = phase_distance(build_cluster(target), state)
    return TransitionResult(pattern, state, target, dev, dev < tol)


def reduced_spectrum(state: NDArray, d: int, n: int, site: int) -> NDArray[np.float64]:
    t = np.moveaxis(np.asarray(state).reshape((d,) * n), site, 0).reshape(d, -1)
    return np.sort(np.linalg.eigvalsh(t @ t.conj().T))


# --------------------------------------------------------------------------
# non-coprime factorization


@dataclass(frozen=True)
class FactorizationResult:
    d: int
    x: int
    s: int
    b: int
    a: int
    fidelity: float
    passed: bool


def factorize_noncoprime(d: int, x: int, n: int, tol: float = EPS) -> FactorizationResult:
    """Check ``|C_sb(sa, sb-sa)> = |C_b(a, b-a)> (x) |+_s>^N``.

    Local isomorphism ``|l>_d <-> |q>_s |r>_b`` with ``l = q b + r``; the
    ``r`` factors of all sites are gathered first.
    """
    s = gcd(x, d)
    if s == 1:
        raise NothingToFactorError(f"gcd({x}, {d}) = 1")
    b, a = d // s, x // s
    big = build_cluster(ClusterSpec(d, x, n)).reshape((s, b) * n)
    big = np.transpose(big, [2 * k + 1 for k in range(n)] + [2 * k for k in range(n)]).reshape(-1)
    small = build_cluster(ClusterSpec(b, a, n)) if b >= 2 else np.ones(1, dtype=complex)
    ref = np.kron(small, np.ones(s**n) / np.sqrt(s) ** n)
    fid = float(abs(np.vdot(ref, big)) ** 2)
    return FactorizationResult(d, x, s, b, a, fid, fid > 1 - tol)


# --------------------------------------------------------------------------
# teleportation through a three-qudit block


@dataclass(frozen=True)
class TeleportReport:
    d: int
    x: int
    shifted_deviation: float
    fourier_deviation: float
    passed: bool


def three_qudit_block(psi: NDArray, d: int, x: int) -> NDArray:
    """``(1 (x) S^y)(S^x (x) 1)|psi>|+>|+>`` as a ``(d, d, d)`` tensor."""
    y = d - x
    eye = np.eye(d)
    state = np.kron(np.kron(psi, plus_state(d)), plus_state(d))
    state = np.kron(eye, controlled_phase(d, y)) @ (np.kron(controlled_phase(d, x), eye) @ state)
    return state.reshape(d, d, d)


def teleport_identities(d: int, x: int, seed: int = 0, tol: float = EPS) -> TeleportReport:
    """Check the shifted-outcome and Fourier-basis teleportation relations.

    * ``<s|<t|(X^i (x) X^j)|Psi> = F_y P_{t+j} F_x P_{s+i}|psi>``
    * ``<s|<t|(F_a (x) F_b (x) 1)|Psi> = F_y Z^(b t) F_x Z^(a s)|psi> / d``
    """
    y = d - x
    psi = random_state(d, np.random.default_rng(seed))
    big = three_qudit_block(psi, d, x)
    fx, fy = fourier_k(d, x), fourier_k(d, y)
    dev1 = 0.0
    for s, t, i, j in itertools.product(range(d), repeat=4):
        lhs = np.einsum("a,b,abc->c", shift(d, i)[s], shift(d, j)[t], big)
        rhs = fy @ basis_projector(d, t + j) @ fx @ basis_projector(d, s + i) @ psi
        dev1 = max(dev1, max_norm(lhs - rhs))
    dev2 = 0.0
    coprime = [k for k in range(1, d) if gcd(k, d) == 1]
    for al, be in itertools.product(coprime, repeat=2):
        fa, fb = fourier_k(d, al), fourier_k(d, be)
        for s, t in itertools.product(range(d), repeat=2):
            lhs = np.einsum("a,b,abc->c", fa[s], fb[t], big)
            rhs = fy @ clock(d, (be * t) % d) @ fx @ clock(d, (al * s) % d) @ psi / d
            dev2 = max(dev2, max_norm(lhs - rhs))
    return TeleportReport(d, x, dev1, dev2, max(dev1, dev2) < tol)


# --------------------------------------------------------------------------
# MPS form


def cluster_site_kraus(d: int, p: int) -> KrausSet:
    """Single-site tensor ``{F_p P_s}`` of a site whose right bond carries ``S^p``."""
    f = fourier_k(d, p)
    ops = np.array([f @ basis_projector(d, s) for s in range(d)])
    return KrausSet(ops, 1.0, [str(s) for s in range(d)])


def cluster_kraus(d: int, x: int, y: int | None = None, blocked: bool = True) -> KrausSet:
    """Kraus set of ``|C_d(x, y)>``; two-site blocks ``F_y P_t F_x P_s`` by default."""
    y = d - x if y is None else y
    if blocked:
        return block(cluster_site_kraus(d, x), cluster_site_kraus(d, y))
    if x != y:
        raise DimensionMismatchError("single-site cluster tensors need x == y")
    return cluster_site_kraus(d, x)


def chain_with_input(psi: NDArray, d: int, x: int, n_measured: int, y: int | None = None) -> NDArray:
    """Physical chain: ``|psi>`` on site 0, ``|+>`` on sites ``1..n``, alternating ``S^x, S^y``.

    Returns a ``(d,) * (n_measured + 1)`` tensor whose last site is unmeasured.
    """
    y = d - x if y is None else y
    n = n_measured + 1
    check_budget(d**n)
    state = np.asarray(psi, dtype=complex)
    for _ in range(n_measured):
        state = np.kron(state, plus_state(d))
    ell = np.arange(d)
    t = state.reshape((d,) * n)
    for k in range(n - 1):
        p = x if k % 2 == 0 else y
        shape_a = [1] * n
        shape_a[k] = d
        shape_b = [1] * n
        shape_b[k + 1] = d
        t = t * np.exp(2j * np.pi * ((p * ell.reshape(shape_a) * ell.reshape(shape_b)) % d) / d)
    return t


def onsite_symmetry_deviation(spec: ClusterSpec) -> tuple[float, float]:
    """Deviation of ``u(g) = X (x) 1`` and ``u(h) = 1 (x) X`` (on every block) from invariance."""
    if spec.n % 2:
        raise InvalidDimensionError("on-site symmetry of two-site blocks needs even N")
    psi = build_cluster(spec)
    x = shift(spec.d, 1)
    devs = []
    for parity in (0, 1):
        moved = apply_pattern(psi, {s: x for s in range(parity, spec.n, 2)}, spec.d, spec.n)
        devs.append(phase_distance(psi, moved))
    return devs[0], devs[1]
