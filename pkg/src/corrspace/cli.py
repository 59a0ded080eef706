"""``corrspace`` command line: build | verify | run | table1."""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import aklt, cluster, engine, suites
from .errors import CorrspaceError, NotPowerOfTwoError
from .mps import validate_channel
from .serialize import PlanParseError, branch_to_json, dumps, kraus_to_json, load_plan, state_to_json


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--family", help="cluster | spin1 | su | so-fund | so-adj | sp")
    common.add_argument("--d", type=int, help="qudit dimension (cluster)")
    common.add_argument("--x", type=int, help="gate power x (cluster)")
    common.add_argument("--y", type=int, help="gate power y (cluster, default d-x)")
    common.add_argument("--N", type=int, help="site count (cluster) or N of SU(N)")
    common.add_argument("--l", type=int, help="l of SO(2l+1)")
    common.add_argument("--m", type=int, help="Sp(2n) with n = 2^m")
    common.add_argument("--n", type=int, help="Sp(2n) by n (must be a power of two)")
    common.add_argument("--bc", default="obc", choices=["obc", "pbc"])
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--tolerance", type=float, default=1e-9)
    common.add_argument("--out", help="write the JSON output here instead of stdout")

    p = argparse.ArgumentParser(prog="corrspace", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("build", parents=[common], help="write a cluster state or a Kraus set as JSON")
    v = sub.add_parser("verify", parents=[common], help="run an invariant suite")
    v.add_argument("suite", choices=["cluster", "aklt", "engine", "all"])
    r = sub.add_parser("run", parents=[common], help="execute a measurement plan or a census")
    r.add_argument("plan", nargs="?", help="plan JSON file")
    r.add_argument("--mode", default=None, choices=["enumerate", "sample", "census"])
    sub.add_parser("table1", parents=[common], help="success probabilities of every AKLT-type family")
    return p


def _family(args) -> aklt.ResourceFamily | None:
    if not args.family:
        return None
    tag = aklt.canonical_tag(args.family)
    if tag == "sp" and args.n is not None:
        n = args.n
        if n < 2 or n & (n - 1):
            raise NotPowerOfTwoError(f"Sp(2n) needs n a power of two, got n={n}")
        return aklt.sp_family(n.bit_length() - 1)
    spec = {"family": tag, "N": args.N, "l": args.l, "m": args.m}
    return aklt.family_from_spec({k: v for k, v in spec.items() if v is not None})


def _emit(payload: dict, out: str | None) -> None:
    text = dumps(payload)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _report(args, argv, checks: list[suites.Check], extra: dict | None = None, t0: float = 0.0) -> int:
    ok = all(c.passed for c in checks)
    payload = {"command": argv, "seed": args.seed, "checks": [c.to_dict() for c in checks],
               "status": "pass" if ok else "fail", **(extra or {}),
               "timing": {"seconds": round(time.perf_counter() - t0, 3)}}
    _emit(payload, args.out)
    if args.out:
        failed = [c.name for c in checks if not c.passed]
        print(f"{len(checks) - len(failed)}/{len(checks)} checks passed" + (f"; failed: {failed}" if failed else ""))
    return 0 if ok else 1


def cmd_build(args) -> int:
    if (args.family or "cluster").lower() == "cluster":
        if args.d is None or args.x is None:
            raise CorrspaceError("build cluster needs --d and --x")
        spec = cluster.ClusterSpec(args.d, args.x, args.N or 4, args.bc, args.y)
        psi = cluster.build_cluster(spec)
        payload = state_to_json(psi, spec)
        summary = f"cluster d={spec.d} x={spec.x} y={spec.y} N={spec.n} {spec.bc}: " \
                  f"{len(psi)} amplitudes, norm {np.linalg.norm(psi):.12f}"
    else:
        fam = _family(args)
        payload = kraus_to_json(fam.kraus, fam.to_dict())
        summary = f"{fam.name}: {fam.phys_dim} Kraus operators on a {fam.bond_dim}-dim bond, " \
                  f"channel deviation {validate_channel(fam.kraus).deviation:.2e}"
    _emit(payload, args.out)
    print(summary, file=sys.stderr if not args.out else sys.stdout)
    return 0


def cmd_verify(args, argv) -> int:
    t0 = time.perf_counter()
    fam = _family(args)
    fams = [fam] if fam is not None else None
    checks: list[suites.Check] = []
    if args.suite in ("cluster", "all"):
        ds = [args.d] if args.d else [2, 3, 4, 5]
        bc = args.bc if args.d else "pbc"
        for d in ds:
            checks += suites.cluster_checks(d, args.x, args.N or 4, bc, args.tolerance)
    if args.suite in ("aklt", "all"):
        checks += suites.aklt_checks(fams, tol=args.tolerance)
    if args.suite in ("engine", "all"):
        checks += suites.engine_checks(fams, args.tolerance, args.seed or 0)
    extra = {"suite": args.suite}
    if args.suite == "all":
        extra["table1"] = suites.table1_rows()
    return _report(args, argv, checks, extra, t0)


def cmd_run(args, argv) -> int:
    t0 = time.perf_counter()
    if args.mode == "census" or (args.plan is None and args.family):
        fam = _family(args)
        if fam is None:
            raise CorrspaceError("census needs --family")
        census = engine.success_census(fam)
        check = suites.census_check(fam)
        table = [{"outcome": lab, "class": cls} for lab, cls in census.table]
        return _report(args, argv, [check], {"family": fam.to_dict(), "fraction": census.fraction,
                                             "per_generator": census.per_generator, "branches": table}, t0)
    if args.plan is None:
        raise CorrspaceError("run needs a plan file or --mode census --family ...")
    plan, raw = load_plan(args.plan)
    mode = args.mode or raw.get("mode", "enumerate")
    seed = args.seed if args.seed is not None else raw.get("seed", 0)
    records = engine.run_plan(plan, mode, seed)
    total = sum(r.probability for r in records)
    checks = []
    if mode == "enumerate":
        checks.append(suites.Check("branch probabilities sum to 1", abs(total - 1) < args.tolerance * 10,
                                   1.0, total, abs(total - 1)))
    anomalies = sum(r.anomaly for r in records)
    checks.append(suites.Check("no anomalous outcomes", anomalies == 0, 0, anomalies))
    extra = {"family": plan.family.to_dict(), "mode": mode, "n_branches": len(records),
             "fully_active": sum(r.fully_active for r in records),
             "branches": [branch_to_json(r, plan.input_state) for r in records]}
    return _report(args, argv, checks, extra, t0)


def cmd_table1(args, argv) -> int:
    t0 = time.perf_counter()
    rows = suites.table1_rows()
    checks = [suites.Check(f"{r['family']} census", r["status"] == "pass", r["closed_form"], r["census"])
              for r in rows]
    if not args.out:
        for r in rows:
            print(f"# {r['family']:<14} dims ({r['on_site_dim']:>3}, {r['virtual_dim']:>2})  "
                  f"census {suites.fraction_str(r['census']):>6}  closed form "
                  f"{suites.fraction_str(r['closed_form']):>6}  {r['status']}", file=sys.stderr)
    return _report(args, argv, checks, {"rows": rows, "closed_forms": suites.table1_closed_forms()}, t0)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = _parser().parse_args(argv)
    try:
        if args.command == "build":
            return cmd_build(args)
        if args.command == "verify":
            return cmd_verify(args, argv)
        if args.command == "run":
            return cmd_run(args, argv)
        return cmd_table1(args, argv)
    except PlanParseError as exc:
        print(f"plan error: {exc}", file=sys.stderr)
        return 2
    except (CorrspaceError, MemoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
