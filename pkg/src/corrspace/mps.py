"""Translation-invariant matrix product states as Kraus sets.

A site tensor ``{A_i}`` is stored as a :class:`KrausSet`. Physical states
have amplitudes ``<R| A_{i_1} ... A_{i_N} |L>`` so site ``N`` sits next to
the left boundary vector and is the first one consumed by a sequential
(circuit) preparation. Leaving ``right`` unset keeps the bond index open as
an extra trailing tensor factor, which is what the real-versus-virtual
comparison measures against.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .errors import BudgetExceededError, ChannelInvalidError, DimensionMismatchError, NonUnitaryError
from .operators import EPS, Matrix, fit_phase, is_unitary, max_norm

DEFAULT_BUDGET = 20_000_000


def amplitude_budget() -> int:
    """Amplitude-count guard, overridable through ``MBQC_BUDGET``."""
    raw = os.environ.get("MBQC_BUDGET")
    return int(float(raw)) if raw else DEFAULT_BUDGET


def check_budget(n_amplitudes: int, budget: int | None = None) -> None:
    budget = amplitude_budget() if budget is None else budget
    if n_amplitudes > budget:
        raise BudgetExceededError(f"{n_amplitudes} amplitudes exceed the budget of {budget}")


@dataclass(frozen=True, eq=False)
class KrausSet:
    """Site tensor of a translation-invariant MPS.

    ``ops`` holds the actual Kraus operators (weight already applied);
    ``weight`` records the common scale when each operator is
    ``weight * unitary``.
    """

    ops: NDArray[np.complex128]
    weight: float = 1.0
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        ops = np.array(self.ops, dtype=complex)
        if ops.ndim != 3 or ops.shape[1] != ops.shape[2]:
            raise DimensionMismatchError("Kraus operators must be a (d, chi, chi) stack")
        ops.setflags(write=False)
        object.__setattr__(self, "ops", ops)
        labels = tuple(self.labels) or tuple(str(i) for i in range(len(ops)))
        if len(labels) != len(ops):
            raise DimensionMismatchError("one label per Kraus operator is required")
        object.__setattr__(self, "labels", labels)

    @property
    def phys_dim(self) -> int:
        return self.ops.shape[0]

    @property
    def bond_dim(self) -> int:
        return self.ops.shape[1]

    def transpose(self) -> KrausSet:
        """Spatially inverted tensor (every Kraus operator transposed)."""
        return KrausSet(np.transpose(self.ops, (0, 2, 1)), self.weight, self.labels)

    def scaled(self, factor: float) -> KrausSet:
        return KrausSet(factor * self.ops, self.weight * factor, self.labels)

    def unit_words(self) -> NDArray[np.complex128]:
        """Kraus operators with the weight divided out."""
        return self.ops / self.weight


def block(first: KrausSet, second: KrausSet) -> KrausSet:
    """Two-site block: outcome ``(s, t) -> second[t] @ first[s]``, index ``s * d2 + t``."""
    if first.bond_dim != second.bond_dim:
        raise DimensionMismatchError("blocked tensors must share the bond dimension")
    ops = np.einsum("tab,sbc->stac", second.ops, first.ops).reshape(-1, first.bond_dim, first.bond_dim)
    labels = [f"{a}|{b}" for a in first.labels for b in second.labels]
    return KrausSet(ops, first.weight * second.weight, labels)


@dataclass(frozen=True)
class ChannelReport:
    deviation: float
    passed: bool


def validate_channel(k: KrausSet, tol: float = EPS) -> ChannelReport:
    """Max-norm deviation of ``sum_i A_i^dag A_i`` from the identity."""
    total = np.einsum("iba,ibc->ac", k.ops.conj(), k.ops)
    dev = max_norm(total - np.eye(k.bond_dim))
    return ChannelReport(dev, dev < tol)


def _complete_columns(cols: NDArray[np.complex128], dim: int) -> NDArray[np.complex128]:
    """Extend orthonormal columns to a unitary by Gram-Schmidt over ``e_0, e_1, ...``."""
    basis = [c for c in cols.T]
    for e in np.eye(dim, dtype=complex):
        if len(basis) == dim:
            break
        v = e.copy()
        for _ in range(2):
            for b in basis:
                v -= np.vdot(b, v) * b
        nv = np.linalg.norm(v)
        if nv > 1e-8:
            basis.append(v / nv)
    return np.array(basis).T


def dilation_unitary(k: KrausSet) -> Matrix:
    """Unitary on ``physical (x) bond`` with ``U(|0> (x) |v>) = sum_i |i> (x) A_i |v>``.

    Index order is ``i * chi + a``. Columns outside the ``|0> (x) .`` block
    are completed deterministically.
    """
    report = validate_channel(k)
    if not report.passed:
        raise ChannelInvalidError(f"sum A^dag A deviates from identity by {report.deviation:.3g}")
    d, chi = k.phys_dim, k.bond_dim
    defined = k.ops.reshape(d * chi, chi)
    u = _complete_columns(defined, d * chi)
    if not is_unitary(u):
        raise NonUnitaryError("column completion failed")
    return u


@dataclass(frozen=True, eq=False)
class BoundaryPair:
    """Boundary vectors; ``right=None`` leaves the bond index open."""

    left: NDArray[np.complex128]
    right: NDArray[np.complex128] | None = None

    def __post_init__(self):
        left = np.asarray(self.left, dtype=complex)
        if np.linalg.norm(left) < 1e-14:
            raise ValueError("left boundary must be nonzero")
        object.__setattr__(self, "left", left / np.linalg.norm(left))
        if self.right is not None:
            right = np.asarray(self.right, dtype=complex)
            if np.linalg.norm(right) < 1e-14:
                raise ValueError("right boundary must be nonzero")
            object.__setattr__(self, "right", right / np.linalg.norm(right))

    @classmethod
    def default(cls, chi: int) -> BoundaryPair:
        """``|L> = |0>`` and uniform ``<R|``."""
        left = np.zeros(chi, dtype=complex)
        left[0] = 1.0
        return cls(left, np.ones(chi, dtype=complex))


def assemble_state(k: KrausSet, n_sites: int, boundary: BoundaryPair | None = None,
                   normalize: bool = True, budget: int | None = None) -> NDArray[np.complex128]:
    """Dense MPS amplitudes ``<R| A_{i_1} ... A_{i_N} |L>``.

    Returns a flat vector over ``(i_1, ..., i_N)`` (plus a trailing bond
    index when ``boundary.right`` is ``None``).
    """
    if n_sites < 1:
        raise ValueError("need at least one site")
    boundary = boundary or BoundaryPair.default(k.bond_dim)
    d, chi = k.phys_dim, k.bond_dim
    if len(boundary.left) != chi or (boundary.right is not None and len(boundary.right) != chi):
        raise DimensionMismatchError("boundary vectors must match the bond dimension")
    check_budget(d**n_sites * (chi if boundary.right is None else 1), budget)
    # tensor over (bond a, i_m, ..., i_N)
    t = boundary.left.reshape(chi, 1)
    for _ in range(n_sites):
        t = np.einsum("iab,br->air", k.ops, t).reshape(chi, -1)
    if boundary.right is None:
        psi = t.T.reshape(-1)
    else:
        psi = boundary.right.conj() @ t
    if normalize:
        nrm = np.linalg.norm(psi)
        if nrm < 1e-300:
            raise ValueError("boundary choice annihilates the state")
        psi = psi / nrm
    return psi


def circuit_state(u: Matrix, phys_dim: int, n_sites: int, boundary: BoundaryPair,
                  spin_init: NDArray | None = None, normalize: bool = True) -> NDArray[np.complex128]:
    """Sequential preparation with a site unitary (independent of :func:`assemble_state`).

    The bond register starts in ``|L>``; each step appends a spin in
    ``spin_init`` (default ``|0>``) and applies ``u`` to ``(spin, bond)``.
    The first spin produced is site ``N``. The bond is finally projected on
    ``<R|`` or left open as the last factor.
    """
    chi = len(boundary.left)
    if u.shape != (phys_dim * chi, phys_dim * chi):
        raise DimensionMismatchError("site unitary has the wrong dimension")
    init = np.zeros(phys_dim, dtype=complex)
    init[0] = 1.0
    if spin_init is not None:
        init = np.asarray(spin_init, dtype=complex)
    check_budget(phys_dim**n_sites * chi)
    state = boundary.left.reshape(1, chi)  # (produced spins, bond)
    for _ in range(n_sites):
        joint = np.einsum("s,pa->psa", init, state).reshape(state.shape[0], phys_dim * chi)
        state = (joint @ u.T).reshape(-1, chi)
    # produced order is (site N, site N-1, ..., site 1); reverse to (1..N)
    shape = [phys_dim] * n_sites + [chi]
    full = state.reshape(shape)
    full = np.transpose(full, list(range(n_sites - 1, -1, -1)) + [n_sites])
    if boundary.right is None:
        psi = full.reshape(-1)
    else:
        psi = full.reshape(-1, chi) @ boundary.right.conj()
    if normalize:
        psi = psi / np.linalg.norm(psi)
    return psi


@dataclass(frozen=True)
class SymmetryReport:
    phase: float
    deviation: float
    passed: bool


def check_symmetry_condition(k: KrausSet, ug: Matrix, vg: Matrix, tol: float = EPS) -> SymmetryReport:
    """Check ``sum_j u_ij A_j = e^{i phi} V^dag A_i V`` for every ``i``."""
    ug = np.asarray(ug, dtype=complex)
    vg = np.asarray(vg, dtype=complex)
    if ug.shape != (k.phys_dim, k.phys_dim) or vg.shape != (k.bond_dim, k.bond_dim):
        raise DimensionMismatchError("symmetry operators do not match the Kraus set dimensions")
    if not (is_unitary(ug, 1e-7) and is_unitary(vg, 1e-7)):
        raise NonUnitaryError("symmetry operators must be unitary")
    lhs = np.einsum("ij,jab->iab", ug, k.ops)
    rhs = np.einsum("ba,ibc,cd->iad", vg.conj(), k.ops, vg)
    c = fit_phase(lhs, rhs)
    dev = max_norm(lhs - c * rhs)
    return SymmetryReport(float(np.angle(c)), dev, dev < tol)
