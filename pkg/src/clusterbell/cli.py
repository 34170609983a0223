"""``clusterbell`` command line.

Exit codes: 0 success, 2 invalid input or configuration, 1 runtime failure.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import re
import sys
from pathlib import Path

from . import __version__
from . import expsim, nonlocality, pauli, photonics, qstate

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_VALIDATION = 2


class ValidationError(ValueError):
    pass


def manifest(subcommand: str, config: dict, seed=None) -> dict:
    return {
        "subcommand": subcommand,
        "config": config,
        "seed": seed,
        "version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }


def named_state(name: str) -> qstate.QuantumState:
    if name in ("target", "cluster4"):
        return qstate.target_cluster()
    if name == "w3":
        return qstate.w3()
    m = re.fullmatch(r"(cluster-linear|ghz|plus)-(\d)", name)
    if m:
        kind, n = m.group(1), int(m.group(2))
        return {"cluster-linear": qstate.linear_cluster, "ghz": qstate.ghz, "plus": qstate.plus_state}[kind](n)
    raise ValidationError(
        f"unknown state {name!r}; use target, cluster4, cluster-linear-N, ghz-N, plus-N or w3"
    )


def load_state(path: str) -> qstate.QuantumState:
    with open(path) as fh:
        obj = json.load(fh)
    return qstate.QuantumState.from_json(obj.get("state", obj))


def _emit(obj, out: str | None = None) -> None:
    text = json.dumps(obj, indent=2)
    if out:
        Path(out).write_text(text + "\n")
    print(text)


def _read_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def cmd_state(args) -> int:
    s = named_state(args.name)
    dump = {"manifest": manifest("state", {"name": args.name}), "state": s.to_json()}
    if args.out:
        Path(args.out).write_text(json.dumps(dump, indent=2) + "\n")
    print(f"{args.name}: {s.n} qubits")
    for idx, a in enumerate(s.vector):
        if abs(a) > 1e-12:
            label = format(idx, f"0{s.n}b")
            pol = label.replace("0", "H").replace("1", "V")
            print(f"  |{label}> |{pol}>  {a.real:+.6f}{a.imag:+.6f}j")
    return EXIT_OK


def cmd_stabilizers(args) -> int:
    s = named_state(args.name) if not args.file else load_state(args.file)
    stabs = pauli.enumerate_stabilizers(s)
    flagged = {p for p, _ in nonlocality.PRIMED_QUADRUPLE} | {p for p, _ in nonlocality.TARGET_QUADRUPLE}
    rows = [{"pauli": str(p), "sign": sgn, "ghz_quadruple": str(p) in flagged} for p, sgn in stabs]
    if args.json:
        _emit({"state": args.name, "count": len(rows), "stabilizers": rows})
    else:
        print(f"{len(rows)} nontrivial stabilizers")
        for r in rows:
            mark = "  *" if r["ghz_quadruple"] else ""
            print(f"  {r['sign']:+d} {r['pauli']}{mark}")
    return EXIT_OK


def cmd_bell(args) -> int:
    s = load_state(args.file) if args.file else named_state(args.name)
    if args.visibility is not None:
        s = qstate.apply_white_noise(s, args.visibility)
    values = {str(t.pauli): pauli.expectation(s, t.pauli) for t in nonlocality.SC_TERMS}
    s_c = nonlocality.bell_parameter_of_state(s)
    _emit(
        {
            "manifest": manifest("bell", {"name": args.name, "file": args.file, "visibility": args.visibility}),
            "correlations": values,
            "s_c": s_c,
            "lhv_bound": nonlocality.LHV_BOUND,
            "violates": s_c > nonlocality.LHV_BOUND + 1e-12,
        }
    )
    return EXIT_OK


def cmd_lhv(args) -> int:
    if args.file:
        try:
            terms = nonlocality.parse_inequality(_read_json(args.file))
        except ValueError as exc:
            raise ValidationError(f"{args.file}: {exc}") from exc
    else:
        terms = list(nonlocality.SC_TERMS)
    best, strat = nonlocality.lhv_maximum(terms)
    _emit(
        {
            "manifest": manifest("lhv", {"file": args.file}),
            "terms": [t.to_json() for t in terms],
            "lhv_maximum": best,
            "witness": strat.to_json(),
        }
    )
    return EXIT_OK


def cmd_ghz_argument(args) -> int:
    sets = {"primed": nonlocality.PRIMED_QUADRUPLE, "target": nonlocality.TARGET_QUADRUPLE}
    if args.file:
        raw = _read_json(args.file)
        sets = {"custom": [(c["pauli"], int(c["sign"])) for c in raw]}
    report = {}
    for name, cons in sets.items():
        res = nonlocality.ghz_argument_check(cons)
        report[name] = {
            "constraints": [{"pauli": str(p), "sign": s} for p, s in cons],
            "satisfiable": res.satisfiable,
            "strategies_checked": res.strategies_checked,
            "witnesses": [w.to_json() for w in res.witnesses[:4]],
        }
    _emit({"manifest": manifest("ghz-argument", {"file": args.file}), "results": report})
    return EXIT_OK


def _source_config(args) -> photonics.SourceConfig:
    base = photonics.SourceConfig.load(args.config) if args.config else photonics.SourceConfig()
    overrides = {}
    if args.hwp_angle is not None:
        overrides["hwp_a_angle"] = args.hwp_angle
    if args.indistinguishability is not None:
        overrides["indistinguishability"] = args.indistinguishability
    return base.replace(**overrides) if overrides else base


def cmd_source(args) -> int:
    cfg = _source_config(args)
    res = photonics.simulate_source(cfg, fix=not args.no_fix)
    target = qstate.target_cluster()
    report = {
        "manifest": manifest("source", cfg.to_json()),
        "fixed": res.fixed,
        "postselection_probability": res.probability,
        "fidelity_with_target": qstate.fidelity(target, res.state),
        "state": res.state.to_json(),
    }
    if res.state.is_pure:
        report["overlap_with_target"] = qstate.overlap(target, res.state)
    _emit(report, args.out)
    return EXIT_OK


def _experiment_config(args) -> expsim.ExperimentConfig:
    cfg = expsim.ExperimentConfig().to_json()
    if args.config:
        file_cfg = _read_json(args.config)
        unknown = set(file_cfg) - set(cfg)
        if unknown:
            raise ValidationError(f"{args.config}: unknown fields {sorted(unknown)}")
        cfg.update(file_cfg)
    for flag, key in (("visibility", "visibility"), ("mean_counts", "mean_counts"),
                      ("seed", "seed"), ("duration", "duration")):
        v = getattr(args, flag)
        if v is not None:
            cfg[key] = v
    cfg["efficiencies"] = tuple(cfg["efficiencies"])
    return expsim.ExperimentConfig(**cfg)


def cmd_experiment(args) -> int:
    cfg = _experiment_config(args)
    source = photonics.SourceConfig.load(args.source_config) if args.source_config else None
    runs = expsim.run_many(source, cfg, args.runs, workers=args.workers)
    summary = expsim.summarize(runs)
    if args.runs == 1:
        summary.update(runs[0].summary())
    out = {"manifest": manifest("experiment", cfg.to_json(), cfg.seed), **summary}
    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        for i, t in enumerate(runs[0].tables):
            (outdir / f"counts_{t.setting.label}.csv").write_text(
                f"# {json.dumps(out['manifest'])}\n" + expsim.tables_csv(runs, i)
            )
        (outdir / "summary.json").write_text(json.dumps(out, indent=2) + "\n")
    _emit(out)
    return EXIT_OK


def cmd_calibrate(args) -> int:
    res = expsim.calibrate_mean_counts(
        visibility=args.visibility, target_sc_err=args.target_sc_err, runs=args.runs, seed=args.seed
    )
    _emit({"manifest": manifest("calibrate-counts", vars_clean(args), args.seed), **res})
    return EXIT_OK


def vars_clean(args) -> dict:
    return {k: v for k, v in vars(args).items() if k != "func"}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="clusterbell", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("state", help="print and dump a named state")
    sp.add_argument("name")
    sp.add_argument("--out", help="write the JSON state dump here")
    sp.set_defaults(func=cmd_state)

    sp = sub.add_parser("stabilizers", help="list nontrivial stabilizers")
    sp.add_argument("name", nargs="?", default="target")
    sp.add_argument("--file", help="read a JSON state dump instead")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_stabilizers)

    sp = sub.add_parser("bell", help="evaluate S_C on a state")
    sp.add_argument("name", nargs="?", default="target")
    sp.add_argument("--file", help="read a JSON state dump instead")
    sp.add_argument("--visibility", type=float)
    sp.set_defaults(func=cmd_bell)

    sp = sub.add_parser("lhv", help="local-realist maximum of an inequality")
    sp.add_argument("file", nargs="?", help="inequality JSON; defaults to S_C")
    sp.set_defaults(func=cmd_lhv)

    sp = sub.add_parser("ghz-argument", help="check GHZ-type sign constraints")
    sp.add_argument("--file", help="JSON list of {pauli, sign}")
    sp.set_defaults(func=cmd_ghz_argument)

    sp = sub.add_parser("source", help="simulate the optical source and post-selection")
    sp.add_argument("--config", help="SourceConfig JSON")
    sp.add_argument("--hwp-angle", type=float)
    sp.add_argument("--indistinguishability", type=float)
    sp.add_argument("--no-fix", action="store_true", help="skip the mode-a rotation")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_source)

    sp = sub.add_parser("experiment", help="Monte Carlo of the counting experiment")
    sp.add_argument("--config", help="ExperimentConfig JSON")
    sp.add_argument("--source-config", help="measure the simulated source instead of the ideal state")
    sp.add_argument("--visibility", type=float)
    sp.add_argument("--mean-counts", type=float)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--runs", type=int, default=1)
    sp.add_argument("--duration", type=float)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--out", help="directory for CSV tables and summary.json")
    sp.set_defaults(func=cmd_experiment)

    sp = sub.add_parser("calibrate-counts", help="find mean counts matching a target S_C error")
    sp.add_argument("--visibility", type=float, default=expsim.REFERENCE_VISIBILITY)
    sp.add_argument("--target-sc-err", type=float, default=0.08)
    sp.add_argument("--runs", type=int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_calibrate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_VALIDATION if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (ValueError, IndexError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
