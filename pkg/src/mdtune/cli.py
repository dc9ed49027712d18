"""Command-line entry point.

Subcommands: plan, sweep, parse-log, analyze-costs, scaling, recommend,
multi-plan. All output is deterministic for identical inputs; advisories
never change the exit code (0 means no errors).

Set MDTUNE_LOG=debug for verbose progress on stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from pathlib import Path

from . import report
from .balance import SyntheticNodeProfile, load_profile
from .econ import EconParams, HardwareRow, PowerReading
from .errors import MdtuneError
from .launch import (
    enumerate_plan,
    plan_from_json,
    plan_multi_sim,
    plan_to_json,
    plan_to_script,
)
from .logparse import metrics_to_csv, metrics_to_json, parse_metrics
from .manifest import load_manifest
from .sweep import (
    ShellExecutor,
    SyntheticExecutor,
    result_to_csv,
    result_to_json,
    result_to_table,
    run_sweep,
)

log = logging.getLogger("mdtune")


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)
        log.info("wrote %s", path)


def _cmd_plan(args) -> int:
    manifest = load_manifest(args.manifest)
    configs = enumerate_plan(manifest.node, manifest.sweep, nodes=manifest.node_count)
    if args.dry_run:
        sys.stdout.write(plan_to_script(configs, manifest.engine))
        return 0
    _write(args.out, plan_to_json(configs))
    if args.script:
        _write(args.script, plan_to_script(configs, manifest.engine))
    return 0


def _cmd_sweep(args) -> int:
    manifest = load_manifest(args.manifest)
    if args.plan:
        configs = plan_from_json(Path(args.plan).read_text())
    else:
        configs = enumerate_plan(manifest.node, manifest.sweep, nodes=manifest.node_count)
    if args.dry_run:
        sys.stdout.write(plan_to_script(configs, manifest.engine))
        return 0
    if args.executor == "synthetic":
        profile = load_profile(args.profile) if args.profile else SyntheticNodeProfile()
        executor = SyntheticExecutor(manifest.node, profile)
    else:
        executor = ShellExecutor(Path(args.workdir), manifest.engine)
    repeats = args.repeats if args.repeats else manifest.repeats
    result = run_sweep(configs, executor, manifest.workload, repeats=repeats)
    if args.out:
        _write(args.out, result_to_json(result))
    if args.format == "json":
        text = result_to_json(result)
    elif args.format == "csv":
        text = result_to_csv(result)
    elif args.format == "md":
        text = report.sweep_report(
            result,
            node_cost_eur=manifest.node.node_price_eur or None,
            fmt="md",
        )
    else:
        text = result_to_table(result)
    if not args.out or args.format != "json":
        sys.stdout.write(text)
    log.info("%d rows, %d failures", len(result.rows), len(result.failures))
    return 0


def _cmd_parse_log(args) -> int:
    all_metrics = []
    for path in args.logs:
        text = Path(path).read_text()
        all_metrics.append(parse_metrics(text))
    if args.format == "csv":
        sys.stdout.write(metrics_to_csv(all_metrics))
    else:
        docs = [metrics_to_json(m) for m in all_metrics]
        sys.stdout.write(json.dumps(docs if len(docs) > 1 else docs[0],
                                    indent=2, sort_keys=True) + "\n")
    return 0


def _econ_params(doc: dict) -> EconParams:
    e = doc.get("econ", {})
    return EconParams(
        lifetime_years=e.get("lifetime_years", 5.0),
        energy_price_eur_per_kwh=e.get("energy_price_eur_per_kwh", 0.2),
        per_node_network_cost_eur=e.get("per_node_network_cost_eur", 0.0),
    )


def _econ_inputs(doc: dict) -> list[report.EconInput]:
    inputs = []
    for row in doc["rows"]:
        power = None
        if "power" in row:
            p = row["power"]
            power = PowerReading(
                kind=p["kind"],
                value=p["value"],
                gpus_installed=p.get("gpus_installed", 0),
                gpus_active=p.get("gpus_active", 0),
                idle_gpu_power_w=p.get("idle_gpu_power_w"),
            )
        inputs.append(
            report.EconInput(
                label=row["label"],
                performance=row["performance_ns_day"],
                node_cost_eur=row["node_cost_eur"],
                power=power,
                power_w=row.get("power_w"),
                rack_units=row.get("rack_units"),
            )
        )
    return inputs


def _cmd_analyze_costs(args) -> int:
    doc = json.loads(Path(args.rows).read_text())
    params = _econ_params(doc)
    inputs = _econ_inputs(doc)
    yield_unit = report.YIELD_US if args.yield_unit == "us" else report.YIELD_NS
    if args.format == "json":
        rows = report.full_precision_rows(inputs, params)
        out = [dataclasses.asdict(r) | {"label": i.label} for r, i in zip(rows, inputs)]
        sys.stdout.write(json.dumps(out, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(report.econ_report(inputs, params, yield_unit, fmt=args.format))
    return 0


def _cmd_scaling(args) -> int:
    doc = json.loads(Path(args.rows).read_text())
    series = [
        report.ScalingSeries(
            label=s["label"],
            points=tuple((p["nodes"], p["performance_ns_day"]) for p in s["points"]),
        )
        for s in doc["series"]
    ]
    fmt = "csv" if args.format == "csv" else "md"
    sys.stdout.write(report.scaling_report(series, fmt=fmt))
    return 0


def _parse_weights(text: str) -> dict[str, float]:
    weights = {}
    for part in text.split(","):
        if not part:
            continue
        name, _, value = part.partition("=")
        weights[name.strip()] = float(value) if value else 1.0
    return weights


def _cmd_recommend(args) -> int:
    doc = json.loads(Path(args.rows).read_text())
    params = _econ_params(doc)
    inputs = _econ_inputs(doc)
    econ_rows = report.full_precision_rows(inputs, params)
    hardware = []
    for inp, econ, raw in zip(inputs, econ_rows, doc["rows"]):
        hardware.append(
            HardwareRow(
                label=inp.label,
                econ=econ,
                perf_per_price=raw.get("perf_per_price"),
                performance=inp.performance,
                parallel_performance=raw.get("parallel_performance_ns_day"),
                rack_units=inp.rack_units,
            )
        )
    weights = _parse_weights(args.weights) if args.weights else None
    fmt = "csv" if args.format == "csv" else "md"
    sys.stdout.write(report.recommend_report(hardware, weights, fmt=fmt))
    return 0


def _cmd_multi_plan(args) -> int:
    manifest = load_manifest(args.manifest)
    plan = plan_multi_sim(
        manifest.node,
        replicas=args.replicas,
        nodes=args.nodes,
        placement=args.placement,
    )
    doc = dataclasses.asdict(plan)
    sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    if plan.leftover_threads:
        print(
            f"note: {plan.leftover_threads} hardware thread(s) stay idle "
            f"({plan.replicas} replicas do not divide the thread budget)",
            file=sys.stderr,
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mdtune",
        description="Launch-configuration tuning and cost analysis for offload-style MD engines",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="enumerate launch candidates from a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", default="-", help="plan JSON destination (default stdout)")
    p.add_argument("--script", help="also write a shell script, one command per line")
    p.add_argument("--dry-run", action="store_true", help="print commands only")
    p.set_defaults(func=_cmd_plan)

    p = sub.add_parser("sweep", help="run a plan through an executor")
    p.add_argument("--manifest", required=True)
    p.add_argument("--plan", help="plan JSON (default: enumerate from the manifest)")
    p.add_argument("--executor", choices=["shell", "synthetic"], default="synthetic")
    p.add_argument("--repeats", type=int, default=0, help="override manifest repeats")
    p.add_argument("--out", help="write the result JSON here")
    p.add_argument("--format", choices=["json", "csv", "md", "table"], default="table")
    p.add_argument("--profile", help="synthetic node profile JSON")
    p.add_argument("--workdir", default="runs", help="shell executor working directory")
    p.add_argument("--dry-run", action="store_true", help="print commands only")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("parse-log", help="extract metrics from engine logs")
    p.add_argument("logs", nargs="+")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=_cmd_parse_log)

    p = sub.add_parser("analyze-costs", help="lifetime trajectory cost table")
    p.add_argument("--rows", required=True, help="JSON file with benchmark rows")
    p.add_argument("--format", choices=["csv", "md", "json"], default="md")
    p.add_argument("--yield-unit", choices=["ns", "us"], default="ns")
    p.set_defaults(func=_cmd_analyze_costs)

    p = sub.add_parser("scaling", help="parallel efficiency table")
    p.add_argument("--rows", required=True, help="JSON file with performance series")
    p.add_argument("--format", choices=["csv", "md"], default="md")
    p.set_defaults(func=_cmd_scaling)

    p = sub.add_parser("recommend", help="rank hardware by weighted criteria")
    p.add_argument("--rows", required=True, help="JSON file with benchmark rows")
    p.add_argument("--weights", help="e.g. C1=1 or C1=0.5,C4=0.5 (default C4)")
    p.add_argument("--format", choices=["csv", "md"], default="md")
    p.set_defaults(func=_cmd_recommend)

    p = sub.add_parser("multi-plan", help="plan a multi-replica run")
    p.add_argument("--manifest", required=True)
    p.add_argument("--replicas", "-M", type=int, required=True)
    p.add_argument("--nodes", type=int, default=1)
    p.add_argument("--placement", choices=["dense", "interleaved"], default="interleaved")
    p.set_defaults(func=_cmd_multi_plan)

    return parser


def main(argv=None) -> int:
    level = os.environ.get("MDTUNE_LOG", "warning").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="mdtune: %(message)s",
        stream=sys.stderr,
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MdtuneError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
