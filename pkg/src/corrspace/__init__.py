"""Correlation-space simulation of measurement-based computation.

Resource states are translation-invariant matrix product states: qudit
cluster wires and AKLT-type valence-bond chains with SU(N), SO(2l+1) and
Sp(2n) symmetry. Measuring a site in a rotated basis acts on the bond
(correlation) space through the induced Kraus operators; the engine tracks
every branch, its byproduct word and the enacted gate.
"""

from .aklt import (
    AkltFamily,
    ResourceFamily,
    family_from_spec,
    so_adj_family,
    so_fund_family,
    sp_family,
    spin1_kraus,
    su_family,
    verify_family_symmetry,
)
from .cluster import (
    ClusterSpec,
    build_cluster,
    cluster_kraus,
    controlled_phase,
    factorize_noncoprime,
    lu_transition,
    parent_hamiltonian,
    spt_label,
    stabilizer_generators,
    teleport_identities,
)
from .engine import (
    MeasurementPlan,
    MeasurementStep,
    adjoint_lift,
    byproduct_pullthrough,
    elementary_gate_plan,
    induced_operators,
    projection_basis,
    real_vs_virtual_check,
    run_plan,
    sp_commutation_census,
    success_census,
    universality_span_check,
)
from .mps import KrausSet, assemble_state, block, dilation_unitary, validate_channel

__version__ = "0.1.0"

__all__ = [
    "AkltFamily", "ClusterSpec", "KrausSet", "MeasurementPlan", "MeasurementStep", "ResourceFamily",
    "adjoint_lift", "assemble_state", "block", "build_cluster", "byproduct_pullthrough", "cluster_kraus",
    "controlled_phase", "dilation_unitary", "elementary_gate_plan", "factorize_noncoprime",
    "family_from_spec", "induced_operators", "lu_transition", "parent_hamiltonian", "projection_basis",
    "real_vs_virtual_check", "run_plan", "so_adj_family", "so_fund_family", "sp_commutation_census",
    "sp_family", "spin1_kraus", "spt_label", "stabilizer_generators", "su_family", "success_census",
    "teleport_identities", "universality_span_check", "validate_channel", "verify_family_symmetry",
]
