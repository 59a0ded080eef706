"""JSON interchange: complex numbers as ``[re, im]``, matrices row-major."""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from .aklt import canonical_tag, family_from_spec
from .cluster import ClusterSpec
from .engine import (
    BranchRecord,
    MeasurementPlan,
    MeasurementStep,
    cluster_basis_step,
    cluster_resource,
    elementary_gate_plan,
    projection_basis,
    wire_step,
)
from .errors import CorrspaceError
from .mps import KrausSet


class PlanParseError(CorrspaceError, ValueError):
    """A plan file is not valid JSON or violates the plan schema."""


def _num(x: float) -> float:
    x = float(x)
    return 0.0 if abs(x) < 5e-16 else round(x, 15)


def complex_to_json(z) -> list[float]:
    z = complex(z)
    return [_num(z.real), _num(z.imag)]


def array_to_json(a) -> list:
    """Nested lists of ``[re, im]`` pairs with the array's shape."""
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return complex_to_json(a)
    return [array_to_json(x) for x in a]


def array_from_json(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.shape[-1] == 2:
        return arr[..., 0] + 1j * arr[..., 1]
    return arr.astype(complex)


def vector_from_json(data) -> np.ndarray:
    """Accept real numbers or ``[re, im]`` pairs."""
    if all(isinstance(x, (int, float)) for x in data):
        return np.asarray(data, dtype=complex)
    return array_from_json(data)


def kraus_to_json(k: KrausSet, meta: dict | None = None) -> dict:
    return {"kind": "kraus", **(meta or {}), "phys_dim": k.phys_dim, "bond_dim": k.bond_dim,
            "weight": _num(k.weight), "labels": list(k.labels), "ops": array_to_json(k.ops)}


def kraus_from_json(data: dict) -> KrausSet:
    return KrausSet(array_from_json(data["ops"]), float(data.get("weight", 1.0)), data.get("labels", ()))


def state_to_json(psi, spec: ClusterSpec) -> dict:
    psi = np.asarray(psi)
    return {"kind": "state", **spec.to_dict(), "dimension": int(len(psi)),
            "norm": _num(np.linalg.norm(psi)), "amplitudes": array_to_json(psi)}


def to_jsonable(obj):
    """Convert report payloads (numpy scalars, fractions, complex) to JSON types."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return complex_to_json(obj)
    if isinstance(obj, np.ndarray):
        return array_to_json(obj) if np.iscomplexobj(obj) else to_jsonable(obj.tolist())
    return obj


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True)


def branch_to_json(rec: BranchRecord, input_state=None) -> dict:
    out = {"outcomes": list(rec.outcomes), "probability": _num(rec.probability),
           "classes": list(rec.classes), "flipped": list(rec.flipped), "anomaly": rec.anomaly,
           "byproduct": None if rec.byproduct is None else {
               "label": rec.byproduct.label, "index": rec.byproduct.index,
               "phase": complex_to_json(rec.byproduct.phase)},
           "net_operator": array_to_json(rec.net_operator)}
    if input_state is not None:
        out["output"] = array_to_json(rec.net_operator @ input_state)
    return out


# --------------------------------------------------------------------------
# plans


def _field(data: dict, key: str, where: str):
    if key not in data:
        raise PlanParseError(f"{where}: missing field {key!r}")
    return data[key]


def resource_from_json(data) -> object:
    """Family block: ``{"family": "su", "N": 3}`` or ``{"family": "cluster", "d": 3, "x": 1}``."""
    if isinstance(data, str):
        data = {"family": data}
    name = str(data.get("family", "")).lower()
    if name == "cluster":
        d = int(_field(data, "d", "family"))
        x = int(_field(data, "x", "family"))
        y = data.get("y")
        return cluster_resource(d, x, None if y is None else int(y), data.get("blocked"))
    try:
        canonical_tag(name)
        return family_from_spec(data)
    except CorrspaceError as exc:
        raise PlanParseError(f"family: {exc}") from None


def _step_from_json(fam, raw: dict, where: str) -> MeasurementStep:
    if not isinstance(raw, dict):
        raise PlanParseError(f"{where}: each step must be an object")
    intent = raw.get("intent", "gate")
    try:
        if "rotation" in raw:
            return MeasurementStep(array_from_json(raw["rotation"]), intent, raw.get("label", "custom"),
                                   reference=fam.tag == "cluster")
        if fam.tag == "cluster":
            return cluster_basis_step(fam, raw.get("basis", "I"), intent)
        if intent == "wire":
            return wire_step(fam)
        if intent == "projection":
            return MeasurementStep(projection_basis(fam).rotation, "projection", "projection")
        if intent == "gate":
            gen = _field(raw, "generator", where)
            theta = float(_field(raw, "theta", where))
            return elementary_gate_plan(fam, gen, theta, bool(raw.get("adaptive", False)))
    except PlanParseError:
        raise
    except (CorrspaceError, ValueError, TypeError) as exc:
        raise PlanParseError(f"{where}: {exc}") from None
    raise PlanParseError(f"{where}: unknown intent {intent!r}")


def plan_from_json(data: dict) -> MeasurementPlan:
    if not isinstance(data, dict):
        raise PlanParseError("plan: top level must be an object")
    fam_block = _field(data, "family", "plan")
    if isinstance(fam_block, str):
        fam_block = {k: v for k, v in data.items() if k not in ("steps", "input", "mode", "seed")}
    fam = resource_from_json(fam_block)
    raw_steps = _field(data, "steps", "plan")
    if not isinstance(raw_steps, list) or not raw_steps:
        raise PlanParseError("plan.steps: expected a nonempty list")
    steps = [_step_from_json(fam, s, f"plan.steps[{k}]") for k, s in enumerate(raw_steps)]
    if "input" in data:
        try:
            psi = vector_from_json(data["input"])
        except (ValueError, TypeError) as exc:
            raise PlanParseError(f"plan.input: {exc}") from None
    else:
        psi = np.eye(fam.bond_dim)[0]
    try:
        return MeasurementPlan(fam, tuple(steps), psi)
    except CorrspaceError as exc:
        raise PlanParseError(f"plan: {exc}") from None


def load_plan(path: str | Path) -> tuple[MeasurementPlan, dict]:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PlanParseError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return plan_from_json(data), data
