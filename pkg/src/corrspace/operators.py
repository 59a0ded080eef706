"""Operator families used throughout the package.

Heisenberg-Weyl words, generalized Fourier transforms, Gell-Mann matrices,
Clifford (gamma) matrices and their spinor SO(2l+1) generators, Sp(2n)
generators and the symplectic form, plus small predicates for comparing
dense matrices. Every function returns fresh ``complex128`` arrays.

Conventions
-----------
``X^j = sum_l |l><l+j|`` and ``Z^k = sum_l w^(k l) |l><l|`` with
``w = exp(2 pi i / d)``, so that ``X^j Z^k = w^(jk) Z^k X^j``. The linear
Weyl index is ``alpha = j + d k`` (X-power on the fast axis).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache, reduce
from math import gcd

import numpy as np
from numpy.typing import NDArray

from .errors import (
    InvalidDimensionError,
    MismatchedCountError,
    NonOrthogonalBasisError,
    NonUnitaryError,
    NotCoprimeError,
    NotPowerOfTwoError,
)

EPS = 1e-9

Matrix = NDArray[np.complex128]

PAULI = {
    "1": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


# --------------------------------------------------------------------------
# predicates


def max_norm(a: NDArray) -> float:
    return float(np.max(np.abs(a))) if np.size(a) else 0.0


def is_unitary(m: Matrix, tol: float = EPS) -> bool:
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and max_norm(m @ m.conj().T - np.eye(len(m))) < tol


def is_hermitian(m: Matrix, tol: float = EPS) -> bool:
    return max_norm(m - m.conj().T) < tol


def is_projector(m: Matrix, tol: float = EPS) -> bool:
    return is_hermitian(m, tol) and max_norm(m @ m - m) < tol


def commutes(a: Matrix, b: Matrix, tol: float = EPS) -> bool:
    return max_norm(a @ b - b @ a) < tol


def anticommutes(a: Matrix, b: Matrix, tol: float = EPS) -> bool:
    return max_norm(a @ b + b @ a) < tol


def fit_phase(target: NDArray, candidate: NDArray) -> complex:
    """Unit phase ``c`` minimizing ``|target - c * candidate|``.

    The phase is read off the largest-magnitude entry of ``candidate``.
    """
    target = np.ravel(target)
    candidate = np.ravel(candidate)
    k = int(np.argmax(np.abs(candidate)))
    if abs(candidate[k]) < 1e-15 or abs(target[k]) < 1e-15:
        return 1.0 + 0j
    c = target[k] / candidate[k]
    return complex(c / abs(c))


def phase_distance(a: NDArray, b: NDArray) -> float:
    """Max-norm distance between ``a`` and ``b`` after fitting a global phase."""
    return max_norm(np.ravel(a) - fit_phase(a, b) * np.ravel(b))


def proportionality(a: Matrix, b: Matrix) -> complex | None:
    """Return ``c`` with ``a = c b`` (within EPS), or ``None``."""
    nb = np.vdot(b, b)
    if abs(nb) < 1e-15:
        return None
    c = np.vdot(b, a) / nb
    if max_norm(a - c * b) < EPS * max(1.0, abs(c)):
        return complex(c)
    return None


# --------------------------------------------------------------------------
# Heisenberg-Weyl family


def _check_dim(d: int) -> None:
    if int(d) != d or d < 2:
        raise InvalidDimensionError(f"qudit dimension must be an integer >= 2, got {d}")


def omega(d: int) -> complex:
    _check_dim(d)
    return complex(np.exp(2j * np.pi / d))


def shift(d: int, j: int = 1) -> Matrix:
    """``X^j = sum_l |l><l+j|``."""
    _check_dim(d)
    m = np.zeros((d, d), dtype=complex)
    for ell in range(d):
        m[ell, (ell + j) % d] = 1.0
    return m


def clock(d: int, k: int = 1) -> Matrix:
    """``Z^k = sum_l w^(k l) |l><l|``."""
    _check_dim(d)
    ell = np.arange(d)
    return np.diag(np.exp(2j * np.pi * ((k * ell) % d) / d))


def weyl(d: int, j: int, k: int) -> Matrix:
    """Heisenberg-Weyl word ``X^j Z^k``."""
    _check_dim(d)
    if not (0 <= j < d and 0 <= k < d):
        raise InvalidDimensionError(f"residues must lie in [0, {d}), got ({j}, {k})")
    return shift(d, j) @ clock(d, k)


def weyl_commutation_phase(d: int, j: int, k: int) -> complex:
    """Phase ``w^(jk)`` with ``X^j Z^k = w^(jk) Z^k X^j``."""
    _check_dim(d)
    return complex(np.exp(2j * np.pi * ((j * k) % d) / d))


def weyl_label(j: int, k: int) -> str:
    if j == 0 and k == 0:
        return "1"
    parts = []
    if j:
        parts.append("X" if j == 1 else f"X{j}")
    if k:
        parts.append("Z" if k == 1 else f"Z{k}")
    return "".join(parts)


def weyl_index_pairs(d: int, order: str = "alpha") -> list[tuple[int, int]]:
    """Non-identity ``(j, k)`` exponent pairs in a declared order.

    ``"alpha"`` sorts by ``j + d k``. ``"blocked"`` lists ``X^a Z^k`` for
    ``a = 1..d-1`` (inner ``k = 0..d-1``) followed by ``Z^k``, ``k = 1..d-1``;
    this is the ordering in which projection rotations are block diagonal.
    """
    if order == "alpha":
        return [(a % d, a // d) for a in range(1, d * d)]
    if order == "blocked":
        pairs = [(a, k) for a in range(1, d) for k in range(d)]
        return pairs + [(0, k) for k in range(1, d)]
    raise ValueError(f"unknown Weyl ordering {order!r}")


# --------------------------------------------------------------------------
# Fourier family


def fourier_k(d: int, k: int) -> Matrix:
    """Generalized Fourier operator ``(F_k)_{jl} = w^(k j l) / sqrt(d)``."""
    _check_dim(d)
    if not 1 <= k <= d - 1:
        raise InvalidDimensionError(f"Fourier index must lie in [1, {d - 1}], got {k}")
    if gcd(k, d) != 1:
        raise NotCoprimeError(f"gcd({k}, {d}) != 1")
    idx = np.arange(d)
    return np.exp(2j * np.pi * ((k * np.outer(idx, idx)) % d) / d) / np.sqrt(d)


def fourier_pair(d: int, l: int, k: int) -> Matrix:  # noqa: E741
    """``F_{lk} = F_l F_k``, a permutation matrix."""
    return fourier_k(d, l) @ fourier_k(d, k)


def permutation_pi(d: int) -> Matrix:
    """``Pi = sum_l |l><-l|``."""
    _check_dim(d)
    m = np.zeros((d, d), dtype=complex)
    for ell in range(d):
        m[ell, (-ell) % d] = 1.0
    return m


def plus_state(d: int) -> NDArray[np.complex128]:
    return np.full(d, 1 / np.sqrt(d), dtype=complex)


def basis_projector(d: int, s: int) -> Matrix:
    m = np.zeros((d, d), dtype=complex)
    m[s % d, s % d] = 1.0
    return m


# --------------------------------------------------------------------------
# operator bases


@dataclass(frozen=True, eq=False)
class OperatorBasis:
    """Ordered operator set with labels.

    ``elements`` is a ``(count, dim, dim)`` array.
    """

    dim: int
    elements: NDArray[np.complex128]
    labels: tuple[str, ...]

    def __post_init__(self):
        els = np.asarray(self.elements, dtype=complex)
        if els.ndim != 3 or els.shape[1:] != (self.dim, self.dim):
            raise InvalidDimensionError(f"elements must have shape (n, {self.dim}, {self.dim})")
        if len(self.labels) != len(els):
            raise MismatchedCountError("one label per element is required")
        els.setflags(write=False)
        object.__setattr__(self, "elements", els)
        object.__setattr__(self, "labels", tuple(self.labels))

    def __len__(self) -> int:
        return len(self.elements)

    def __getitem__(self, i: int) -> Matrix:
        return self.elements[i]

    def __iter__(self):
        return iter(self.elements)

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def gram(self) -> Matrix:
        """Hilbert-Schmidt Gram matrix ``tr(A_i^dag A_j)``."""
        flat = self.elements.reshape(len(self), -1)
        return flat.conj() @ flat.T

    def is_orthogonal(self, tol: float = EPS) -> bool:
        g = self.gram()
        return max_norm(g - np.diag(np.diag(g))) < tol * max(1.0, self.dim)

    def norms_squared(self) -> NDArray[np.float64]:
        return np.real(np.diag(self.gram()))

    def scaled(self, factor: complex) -> OperatorBasis:
        return OperatorBasis(self.dim, factor * self.elements, self.labels)

    def subset(self, indices) -> OperatorBasis:
        indices = list(indices)
        return OperatorBasis(self.dim, self.elements[indices], [self.labels[i] for i in indices])


def weyl_basis(d: int, order: str = "alpha", include_identity: bool = False) -> OperatorBasis:
    pairs = weyl_index_pairs(d, order)
    if include_identity:
        pairs = [(0, 0), *pairs]
    els = np.array([weyl(d, j, k) for j, k in pairs])
    return OperatorBasis(d, els, [weyl_label(j, k) for j, k in pairs])


def gellmann_basis(n: int) -> OperatorBasis:
    """Generalized Gell-Mann matrices ``{X_ij, Y_ij, Z_j}`` (1-based labels).

    Normalization is ``tr(M^2) = 1/2``.
    """
    if n < 2:
        raise InvalidDimensionError("Gell-Mann basis needs n >= 2")
    els, labels = [], []

    def unit(i, j):
        m = np.zeros((n, n), dtype=complex)
        m[i, j] = 1.0
        return m

    for i, j in itertools.combinations(range(n), 2):
        els.append(0.5 * (unit(i, j) + unit(j, i)))
        labels.append(f"X{i + 1}{j + 1}" if n < 10 else f"X{i + 1},{j + 1}")
    for i, j in itertools.combinations(range(n), 2):
        els.append(-0.5j * (unit(i, j) - unit(j, i)))
        labels.append(f"Y{i + 1}{j + 1}" if n < 10 else f"Y{i + 1},{j + 1}")
    for j in range(2, n + 1):
        diag = np.zeros(n)
        diag[: j - 1] = 1.0
        diag[j - 1] = -(j - 1)
        els.append(np.diag(diag / np.sqrt(2 * j * (j - 1))).astype(complex))
        labels.append(f"Z{j}")
    return OperatorBasis(n, np.array(els), labels)


def su3_ladder_basis() -> OperatorBasis:
    """SU(3) Kraus set built from ladder combinations of Gell-Mann matrices.

    Ordered ``(V-, U+, I+, I-, V+, U-, sqrt2 T3, sqrt2 T8)`` with
    ``T^a = lambda^a / 2`` and every element rescaled to ``tr(A^dag A) = 3``
    (the Weyl-word norm). In this order the change of basis from the
    blocked Weyl set is ``diag(F, F, E)``.
    """
    def unit(i, j):
        m = np.zeros((3, 3), dtype=complex)
        m[i, j] = 1.0
        return m

    t3 = np.diag([1.0, -1.0, 0.0]) / 2
    t8 = np.diag([1.0, 1.0, -2.0]) / (2 * np.sqrt(3))
    els = [unit(2, 0), unit(1, 2), unit(0, 1), unit(1, 0), unit(0, 2), unit(2, 1),
           np.sqrt(2) * t3, np.sqrt(2) * t8]
    labels = ["V-", "U+", "I+", "I-", "V+", "U-", "T3", "T8"]
    return OperatorBasis(3, np.sqrt(3) * np.array(els, dtype=complex), labels)


# --------------------------------------------------------------------------
# Pauli words, Clifford matrices, spinor generators


@lru_cache(maxsize=None)
def _pauli_word_cached(word: str) -> Matrix:
    return reduce(np.kron, (PAULI[c] for c in word))


def pauli_word(word: str) -> Matrix:
    """Dense matrix of a Pauli word such as ``"1XZ"`` (first letter = first factor)."""
    if not word or any(c not in PAULI for c in word):
        raise ValueError(f"not a Pauli word: {word!r}")
    return _pauli_word_cached(word).copy()


def pauli_basis(n_qubits: int, include_identity: bool = False) -> OperatorBasis:
    words = ["".join(w) for w in itertools.product("1XYZ", repeat=n_qubits)]
    if not include_identity:
        words = words[1:]
    return OperatorBasis(2**n_qubits, np.array([pauli_word(w) for w in words]), words)


def identify_pauli(m: Matrix) -> tuple[str, complex] | None:
    """Decompose ``m = phase * P`` with ``P`` a Pauli word, if possible."""
    dim = len(m)
    nq = int(round(np.log2(dim)))
    if 2**nq != dim:
        return None
    for w in itertools.product("1XYZ", repeat=nq):
        word = "".join(w)
        c = proportionality(m, _pauli_word_cached(word))
        if c is not None and abs(c) > 1e-12:
            return word, c
    return None


def clifford_matrices(l: int) -> OperatorBasis:  # noqa: E741
    """``2l+1`` mutually anticommuting Hermitian unitaries of dimension ``2^l``.

    Built recursively: ``Gamma_i = X (x) Gamma'_i``, ``Gamma_2l = Y (x) 1``,
    ``Gamma_2l+1 = Z (x) 1``, starting from the Pauli matrices.
    """
    if l < 1:
        raise InvalidDimensionError("Clifford matrices need l >= 1")
    words = ["X", "Y", "Z"]
    for level in range(2, l + 1):
        ident = "1" * (level - 1)
        words = ["X" + w for w in words] + ["Y" + ident, "Z" + ident]
    return OperatorBasis(2**l, np.array([pauli_word(w) for w in words]),
                         [f"G{a + 1}" for a in range(len(words))])


def clifford_words(l: int) -> list[str]:  # noqa: E741
    """Pauli-word spelling of :func:`clifford_matrices`."""
    basis = clifford_matrices(l)
    return [identify_pauli(g)[0] for g in basis]


def so_spinor_generators(l: int) -> OperatorBasis:  # noqa: E741
    """``Gamma^{ab} = -i Gamma^a Gamma^b`` for ``a < b``; labels ``G<a>-<b>``."""
    gam = clifford_matrices(l)
    els, labels = [], []
    for a, b in itertools.combinations(range(len(gam)), 2):
        els.append(-1j * gam[a] @ gam[b])
        labels.append(f"G{a + 1}-{b + 1}")
    return OperatorBasis(gam.dim, np.array(els), labels)


# --------------------------------------------------------------------------
# symplectic family


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def sp_word_sets(n: int) -> tuple[list[str], list[str], list[str]]:
    """Pauli-word forms of the ``{X_ij}``, ``{Y_ij}``, ``{Z_j}`` sets for ``n = 2^m``.

    Starts from ``({X}, {Y}, {Z})`` at ``n = 2`` and doubles with::

        X' = X1, XX, XZ (x in X), YY (y in Y), ZX (z in Z), 1X
        Y' = Y1, YX, YZ (y in Y), XY (x in X), ZY (z in Z), 1Y
        Z' = Z1, ZZ (z in Z), 1Z
    """
    if n < 2 or not _is_power_of_two(n):
        raise NotPowerOfTwoError(f"n must be a power of two >= 2, got {n}")
    xs, ys, zs = ["X"], ["Y"], ["Z"]
    size = 2
    while size < n:
        ident = "1" * len(xs[0])
        new_x = ([x + "1" for x in xs] + [x + "X" for x in xs] + [x + "Z" for x in xs]
                 + [y + "Y" for y in ys] + [z + "X" for z in zs] + [ident + "X"])
        new_y = ([y + "1" for y in ys] + [y + "X" for y in ys] + [y + "Z" for y in ys]
                 + [x + "Y" for x in xs] + [z + "Y" for z in zs] + [ident + "Y"])
        new_z = [z + "1" for z in zs] + [z + "Z" for z in zs] + [ident + "Z"]
        xs, ys, zs = new_x, new_y, new_z
        size *= 2
    return xs, ys, zs


def sp_generators(n: int, canonical: bool = False) -> OperatorBasis:
    """Generators ``{X_ij s_k, Y_ij 1, Z_j s_k, 1 s_k}`` of Sp(2n), ``n(2n+1)`` of them.

    The ``n``-dimensional factor comes first and the Pauli factor ``s_k``
    second. With ``canonical=True`` (``n`` a power of two) the Gell-Mann
    factors are replaced by Pauli words spanning the same spaces, so every
    generator is a Hermitian Pauli word.
    """
    sig = ["X", "Y", "Z"]
    if canonical:
        xs, ys, zs = sp_word_sets(n)
        ident = "1" * len(xs[0])
        words = ([x + s for x in xs for s in sig] + [y + "1" for y in ys]
                 + [z + s for z in zs for s in sig] + [ident + s for s in sig])
        return OperatorBasis(2 * n, np.array([pauli_word(w) for w in words]), words)
    if n < 2:
        raise InvalidDimensionError("Sp(2n) generators need n >= 2")
    gm = gellmann_basis(n)
    els, labels = [], []
    groups = {"X": [], "Y": [], "Z": []}
    for m, lab in zip(gm.elements, gm.labels):
        groups[lab[0]].append((m, lab))
    for m, lab in groups["X"]:
        for s in sig:
            els.append(np.kron(m, PAULI[s]))
            labels.append(f"{lab}*{s}")
    for m, lab in groups["Y"]:
        els.append(np.kron(m, PAULI["1"]))
        labels.append(f"{lab}*1")
    for m, lab in groups["Z"]:
        for s in sig:
            els.append(np.kron(m, PAULI[s]))
            labels.append(f"{lab}*{s}")
    for s in sig:
        els.append(np.kron(np.eye(n), PAULI[s]))
        labels.append(f"1*{s}")
    return OperatorBasis(2 * n, np.array(els), labels)


def symplectic_form(n: int, interleaved: bool = False) -> Matrix:
    """Symplectic form of dimension ``2n``.

    Default is the block form ``[[0, -1_n], [1_n, 0]]``. ``interleaved=True``
    returns ``1_n (x) [[0, -1], [1, 0]]``, the form preserved by
    :func:`sp_generators` (whose Pauli factor is the last tensor factor).
    """
    if n < 1:
        raise InvalidDimensionError("symplectic form needs n >= 1")
    j = np.array([[0, -1], [1, 0]], dtype=complex)
    if interleaved:
        return np.kron(np.eye(n), j)
    return np.kron(j, np.eye(n))


# --------------------------------------------------------------------------
# basis change and rebit embedding


def basis_change(source: OperatorBasis, target: OperatorBasis, tol: float = EPS) -> Matrix:
    """Unitary ``u`` with ``sum_b u[a, b] source[b] = target[a]``.

    Both bases must be Hilbert-Schmidt orthogonal with a common norm and
    span the same operator space.
    """
    if len(source) != len(target) or source.dim != target.dim:
        raise MismatchedCountError(
            f"cannot map {len(source)} operators of dim {source.dim} "
            f"onto {len(target)} of dim {target.dim}")
    for basis in (source, target):
        norms = basis.norms_squared()
        if not basis.is_orthogonal(tol) or np.ptp(norms) > tol * max(1.0, norms.max()):
            raise NonOrthogonalBasisError("basis is not orthogonal with equal norms")
    if abs(source.norms_squared()[0] - target.norms_squared()[0]) > tol * source.dim:
        raise NonOrthogonalBasisError("source and target norms differ")
    norm = source.norms_squared()[0]
    s_flat = source.elements.reshape(len(source), -1)
    t_flat = target.elements.reshape(len(target), -1)
    u = (t_flat @ s_flat.conj().T) / norm
    rebuilt = (u @ s_flat).reshape(target.elements.shape)
    if max_norm(rebuilt - target.elements) > tol * 10 or not is_unitary(u, tol * 10):
        raise NonOrthogonalBasisError("bases do not span the same operator space")
    return u


def rebit_embed(u: Matrix) -> NDArray[np.float64]:
    """Real orthogonal-symplectic image ``[[V, -W], [W, V]]`` of ``U = V + iW``."""
    u = np.asarray(u, dtype=complex)
    if not is_unitary(u):
        raise NonUnitaryError("rebit embedding requires a unitary input")
    v, w = u.real, u.imag
    return np.block([[v, -w], [w, v]])


def random_unitary(dim: int, rng: np.random.Generator) -> Matrix:
    """Haar-random unitary via QR of a complex Gaussian matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_state(dim: int, rng: np.random.Generator) -> NDArray[np.complex128]:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def projective_distance(a: NDArray, b: NDArray) -> float:
    """:func:`phase_distance` after scaling both arguments to unit Frobenius norm."""
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na < 1e-300 or nb < 1e-300:
        return float(max(na, nb))
    return phase_distance(np.asarray(a) / na, np.asarray(b) / nb)
