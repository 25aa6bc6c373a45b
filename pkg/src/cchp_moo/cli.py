"""Command-line front end.

Verbs: ``solve``, ``reference``, ``compare`` and ``oracle``. Output goes to
``--out`` if given, else to ``$CCHP_MOO_OUTPUT_DIR``, else to ``./results``.

Exit codes: 0 success, 2 bad input, 3 no feasible solution found.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .frontio import fmt, read_front_csv, rounded, write_front_csv
from .gde3 import BcsMode, SolveResult, bcs_index, compromise_distances
from .harness import ALGORITHMS, comparison_table, compare_fronts, make_params, run_batch
from .metrics import brute_force_front
from .model import Interpretation, Scenario, improvement_rate, reference_objectives
from .scenario_io import ScenarioError, load_scenario, parse_case, resolve_scenario

log = logging.getLogger("cchp_moo")

OUTPUT_ENV = "CCHP_MOO_OUTPUT_DIR"
EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE = 0, 2, 3


class UsageError(Exception):
    pass


def output_dir(arg: str | None) -> Path:
    path = Path(arg or os.environ.get(OUTPUT_ENV) or "results")
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_json(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, indent=2, allow_nan=True) + "\n")


def _scenario(ref: str, args) -> Scenario:
    scenario = resolve_scenario(ref)
    changes = {}
    if getattr(args, "case", None) is not None:
        changes["case"] = parse_case(args.case)
    if getattr(args, "interpretation", None) is not None:
        changes["interpretation"] = Interpretation(args.interpretation)
    return scenario.with_options(**changes) if changes else scenario


def _vec(v) -> list[float]:
    return [float(fmt(t)) for t in np.ravel(v)]


def _bcs_record(F: np.ndarray, X: np.ndarray, mode: BcsMode, ref) -> dict:
    i = bcs_index(F, mode)
    rec = {
        "index": i,
        "decision": _vec(X[i]),
        "objectives": dict(zip(("cost", "pec", "cde"), _vec(F[i]))),
        "distance": float(fmt(compromise_distances(F, mode)[i])),
    }
    if ref is not None and all(r > 0 for r in ref):
        rec["improvement_rate_pct"] = dict(zip(("cost", "pec", "cde"), _vec(improvement_rate(ref, F[i]))))
    return rec


# ---------------------------------------------------------------- manifests


def load_manifest(path: str) -> dict:
    """Read a run manifest: scenario, algorithm, params, seeds, output_dir."""
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: line {exc.lineno}: {exc.msg}") from None
    seeds = doc.get("seeds", [1])
    if not isinstance(seeds, list) or not seeds:
        raise UsageError(f"{path}: seeds must be a non-empty list")
    if "fronts" in doc:
        return {"name": doc.get("name", Path(path).stem), "fronts": doc["fronts"], "seeds": seeds}
    if "scenario" not in doc:
        raise UsageError(f"{path}: field scenario is required")
    algorithm = doc.get("algorithm", "bcs-gde")
    if algorithm not in ALGORITHMS:
        raise UsageError(f"{path}: unknown algorithm {algorithm!r}")
    base = Path(path).parent
    scen = doc["scenario"]
    if (base / scen).exists():
        scen = str(base / scen)
    return {
        "name": doc.get("name", algorithm),
        "scenario": scen,
        "algorithm": algorithm,
        "params": doc.get("params", {}),
        "seeds": seeds,
        "case": doc.get("case"),
        "interpretation": doc.get("interpretation"),
        "output_dir": doc.get("output_dir"),
    }


# ---------------------------------------------------------------- solve


def write_solve_outputs(out: Path, scenario: Scenario, algorithm: str, seed: int, result: SolveResult) -> bool:
    front = result.front
    write_front_csv(out / "front.csv", front.X, front.F)
    ref = reference_objectives(scenario)
    doc = {"algorithm": algorithm, "seed": seed, "scenario": scenario.name, "case": int(scenario.case),
           "interpretation": scenario.interpretation.value, "feasible": result.feasible,
           "reference": dict(zip(("cost", "pec", "cde"), _vec(ref)))}
    if result.feasible:
        F, X = rounded(front.F), rounded(front.X)
        doc["front_size"] = len(front)
        for mode in BcsMode:
            doc[mode.value] = _bcs_record(F, X, mode, ref)
    else:
        diag = result.diagnostic
        doc["diagnostic"] = {
            "decision": _vec(diag.decision),
            "objectives": dict(zip(("cost", "pec", "cde"), _vec(diag.objectives))),
            "violation": {"electric_deficit": diag.violation.electric_deficit,
                          "heat_deficit": diag.violation.heat_deficit,
                          "total": diag.violation.total},
        }
    _write_json(out / "bcs.json", doc)
    _write_json(out / "telemetry.json", {"algorithm": algorithm, "seed": seed,
                                         "iterations": [asdict(s) for s in result.telemetry]})
    return result.feasible


def cmd_solve(args) -> int:
    if args.manifest:
        m = load_manifest(args.manifest)
        if "fronts" in m:
            raise UsageError("solve needs a manifest with a scenario, not external fronts")
        args.case = args.case if args.case is not None else m["case"]
        args.interpretation = args.interpretation or m["interpretation"]
        scenario = _scenario(m["scenario"], args)
        algorithm, seeds, overrides = m["algorithm"], m["seeds"], dict(m["params"])
        out_arg = args.out or m["output_dir"]
    else:
        scenario = _scenario(args.scenario, args)
        algorithm, seeds, overrides = args.algorithm, [args.seed], {}
        out_arg = args.out
    for key in ("pop_size", "max_iters", "f", "cr", "threads", "bcs_mode"):
        val = getattr(args, key)
        if val is not None:
            overrides["n_threads" if key == "threads" else key] = val
    if algorithm == "nsga2":
        for k in ("f", "cr", "bcs_mode"):
            overrides.pop(k, None)
    try:
        for s in seeds:
            make_params(algorithm, s, overrides)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    out = output_dir(out_arg)
    jobs = [(scenario, algorithm, s, overrides) for s in seeds]
    all_ok = True
    for _, seed, result in run_batch(jobs, args.workers):
        target = out if len(seeds) == 1 else out / f"seed_{seed}"
        target.mkdir(parents=True, exist_ok=True)
        ok = write_solve_outputs(target, scenario, algorithm, seed, result)
        if ok:
            print(f"seed {seed}: {len(result.front)} non-dominated solutions -> {target}")
        else:
            d = result.diagnostic
            print(f"seed {seed}: no feasible solution found; least violation {d.violation.total:.6g} kWh "
                  f"(electric {d.violation.electric_deficit:.6g}, heat {d.violation.heat_deficit:.6g})",
                  file=sys.stderr)
        all_ok &= ok
    return EXIT_OK if all_ok else EXIT_INFEASIBLE


# ---------------------------------------------------------------- reference


def cmd_reference(args) -> int:
    scenario = _scenario(args.scenario, args)
    ref = reference_objectives(scenario)
    doc = {"scenario": scenario.name, "reference_chain": scenario.reference_chain.value,
           "reference": dict(zip(("cost", "pec", "cde"), _vec(ref)))}
    print(f"reference system: cost {ref.cost:.6g}  PEC {ref.pec:.6g}  CDE {ref.cde:.6g}")
    if args.front:
        data = read_front_csv(args.front)
        feas = data.violation == 0
        if not feas.any():
            raise UsageError(f"{args.front}: no feasible solutions")
        if any(r <= 0 for r in ref):
            raise UsageError("reference objectives contain zero; improvement rates are undefined")
        F, X = data.F[feas], data.X[feas] if data.X.size else np.zeros((int(feas.sum()), 0))
        modes = list(BcsMode) if args.bcs_mode is None else [BcsMode(args.bcs_mode)]
        for mode in modes:
            rec = _bcs_record(F, X, mode, ref)
            doc[mode.value] = rec
            rate = rec["improvement_rate_pct"]
            print(f"{mode.value:>10} BCS improvement: cost {rate['cost']:.2f}%  PEC {rate['pec']:.2f}%  CDE {rate['cde']:.2f}%")
    _write_json(output_dir(args.out) / "reference.json", doc)
    return EXIT_OK


# ---------------------------------------------------------------- compare


def _external_fronts(name: str, pattern: str, seeds: list[int]) -> list[np.ndarray]:
    fronts = []
    for s in seeds:
        path = Path(pattern.format(seed=s))
        if not path.exists():
            raise UsageError(f"{name}: missing front file {path}")
        data = read_front_csv(path)
        fronts.append(data.F[data.violation == 0])
    return fronts


def cmd_compare(args) -> int:
    entries = [load_manifest(m) for m in args.manifest or []]
    if args.scenario:
        seeds = list(range(1, args.seeds + 1))
        for alg in args.algorithms.split(","):
            entries.append({"name": alg, "scenario": args.scenario, "algorithm": alg.strip(), "params": {},
                            "seeds": seeds, "case": args.case, "interpretation": args.interpretation})
    for item in args.external or []:
        name, _, pattern = item.partition("=")
        if not pattern:
            raise UsageError(f"--external expects NAME=PATTERN, got {item!r}")
        entries.append({"name": name, "fronts": pattern, "seeds": list(range(1, args.seeds + 1))})
    if len(entries) < 2:
        raise UsageError("compare needs at least two algorithms")
    counts = [(e["name"], len(e["seeds"])) for e in entries]
    if len({c for _, c in counts}) != 1:
        raise UsageError(f"mismatched seed counts across algorithms: {counts}")
    names = [e["name"] for e in entries]
    if len(set(names)) != len(names):
        raise UsageError(f"algorithm names must be distinct: {names}")

    out = output_dir(args.out)
    jobs, owners = [], []
    for e in entries:
        if "fronts" in e:
            continue
        ns = argparse.Namespace(case=e.get("case"), interpretation=e.get("interpretation"))
        scenario = _scenario(e["scenario"], ns)
        for s in e["seeds"]:
            jobs.append((scenario, e["algorithm"], s, e["params"]))
            owners.append(e["name"])
    results = run_batch(jobs, args.workers)

    fronts: dict[str, list[np.ndarray]] = {}
    for e in entries:
        if "fronts" in e:
            fronts[e["name"]] = _external_fronts(e["name"], e["fronts"], e["seeds"])
            continue
        d = out / "fronts" / e["name"]
        d.mkdir(parents=True, exist_ok=True)
        fronts[e["name"]] = []
        for owner, (_, seed, res) in zip(owners, results):
            if owner != e["name"]:
                continue
            path = d / f"seed_{seed}.csv"
            write_front_csv(path, res.front.X, res.front.F)
            # indicators are computed from the file so re-ingesting it reproduces them
            fronts[e["name"]].append(read_front_csv(path).F)

    comp = compare_fronts(fronts, seeds=entries[0]["seeds"])
    with open(out / "indicators.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, ["algorithm", "seed", "hv", "spread", "n_solutions"], lineterminator="\n")
        w.writeheader()
        for row in comparison_table(comp):
            w.writerow({k: fmt(v) if isinstance(v, float) else v for k, v in row.items()})
    with open(out / "summary.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, ["indicator", "algorithm", "max", "min", "ave"], lineterminator="\n")
        w.writeheader()
        for row in comp.summary_rows():
            w.writerow({k: fmt(v) if isinstance(v, float) else v for k, v in row.items()})
            print(f"{row['indicator']:>6} {row['algorithm']:>10}  max {row['max']:.4f}  min {row['min']:.4f}  ave {row['ave']:.4f}")
    _write_json(out / "wilcoxon.json", {"normalization": {"ideal": _vec(comp.ideal), "nadir": _vec(comp.nadir),
                                                          "reference_point": [1.1, 1.1, 1.1]},
                                        "tests": comp.wilcoxon})
    for rec in comp.wilcoxon:
        ps = ["undefined" if rec[k]["p_value"] is None else f"{rec[k]['p_value']:.3g}" for k in ("hv", "spread")]
        print(f"{rec['a']} vs {rec['b']}: p(HV greater) {ps[0]}  p(spread less) {ps[1]}")
    return EXIT_OK


# ---------------------------------------------------------------- oracle


def cmd_oracle(args) -> int:
    scenario = _scenario(args.scenario, args)
    if scenario.n_periods != 1:
        raise UsageError(f"oracle needs a single-period scenario; {args.scenario} has {scenario.n_periods}")
    front = brute_force_front(scenario, args.resolution)
    out = output_dir(args.out)
    write_front_csv(out / "oracle_front.csv", front.X, front.F)
    print(f"{len(front)} oracle solutions at resolution {args.resolution} -> {out / 'oracle_front.csv'}")
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cchp-moo", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def scenario_opts(p, positional=True):
        if positional:
            p.add_argument("scenario", help="scenario JSON path or bundled name (e.g. residential)")
        p.add_argument("--case", choices=["1", "2", "3", "full_system", "pgu_off", "boiler_off"])
        p.add_argument("--interpretation", choices=[m.value for m in Interpretation])
        p.add_argument("--out", help=f"output directory (default ${OUTPUT_ENV} or ./results)")

    p = sub.add_parser("solve", help="solve one scenario and write front.csv, bcs.json, telemetry.json")
    p.add_argument("scenario", nargs="?")
    scenario_opts(p, positional=False)
    p.add_argument("--manifest")
    p.add_argument("--algorithm", choices=ALGORITHMS, default="bcs-gde")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--pop-size", type=int)
    p.add_argument("--max-iters", type=int)
    p.add_argument("--f", type=float)
    p.add_argument("--cr", type=float)
    p.add_argument("--bcs-mode", choices=[m.value for m in BcsMode])
    p.add_argument("--threads", type=int, help="evaluation threads inside one run")
    p.add_argument("--workers", type=int, default=1, help="parallel runs across manifest seeds")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("reference", help="reference-system objectives and improvement of a front's BCS")
    scenario_opts(p)
    p.add_argument("--front", help="front.csv whose best compromise is compared")
    p.add_argument("--bcs-mode", choices=[m.value for m in BcsMode])
    p.set_defaults(func=cmd_reference)

    p = sub.add_parser("compare", help="multi-seed HV/spread comparison with Wilcoxon tests")
    p.add_argument("scenario", nargs="?")
    scenario_opts(p, positional=False)
    p.add_argument("--manifest", action="append")
    p.add_argument("--algorithms", default="bcs-gde,nsga2")
    p.add_argument("--external", action="append", help="NAME=PATTERN with {seed} placeholder")
    p.add_argument("--seeds", type=int, default=20)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("oracle", help="grid brute-force front of a single-period scenario")
    scenario_opts(p)
    p.add_argument("--resolution", type=int, default=64)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.command == "solve" and not (args.scenario or args.manifest):
        parser.error("solve needs a scenario or --manifest")
    try:
        return args.func(args)
    except (ScenarioError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
