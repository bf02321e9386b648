"""Command-line entry point: demo trainer, trace analysis, trace inspection.

Exit codes: 0 on success, 1 on trace errors (missing or malformed trace),
2 on bad flags. Diagnostics go to stderr; data (inspect output) to stdout.
"""
from __future__ import annotations

import argparse
import datetime
import json
import sys
from importlib import resources
from typing import List, Optional

from .action_analyzer import ActionAnalyzer, DEFAULT_SPIKE_MAD_MULT
from .agent_analyzer import (
    AgentAnalyzer,
    EG_THRESHOLD,
    VG_FRACTION,
    VG_THRESHOLD,
    VG_WINDOW,
)
from .analyzer_core import Registry, run as run_analyzers
from .data_handler import TraceError, TraceReader, open_writer
from .demo_trainer import TrainerConfig, parse_fault, train
from .loss_analyzer import LossAnalyzer
from .report_generator import build_report, export_json, render
from .reward_analyzer import DEFAULT_EMA_BETA, RewardAnalyzer
from .state_analyzer import DEFAULT_BINS, DEFAULT_MDS_MAX_POINTS, StateAnalyzer

MODULE_NAMES = ("state", "action", "agent", "reward", "loss")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rlinspect", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    demo = sub.add_parser("demo", help="run the built-in seeded cart-pole trainer")
    demo.add_argument("--seed", type=int, default=0)
    demo.add_argument("--episodes", type=int, default=300)
    demo.add_argument("--eps-decay", type=float, default=0.995)
    demo.add_argument("--eps-start", type=float, default=1.0)
    demo.add_argument("--eps-min", type=float, default=0.01)
    demo.add_argument("--alpha", type=float, default=1e-3, help="learning rate")
    demo.add_argument("--gamma", type=float, default=0.99)
    demo.add_argument("--hidden", type=int, default=32)
    demo.add_argument("--snapshot-every", type=int, default=10)
    demo.add_argument("--probe-k", type=int, default=32)
    demo.add_argument("--out", required=True, help="trace output path (JSONL)")
    demo.add_argument("--fault", default=None, help="vanishing:LO..HI or qjump:UPDATE")

    analyze = sub.add_parser("analyze", help="analyze a trace and write the HTML report")
    analyze.add_argument("--trace", required=True)
    analyze.add_argument("--out", default="report.html")
    analyze.add_argument("--json-out", default=None)
    analyze.add_argument("--modules", default=",".join(MODULE_NAMES))
    analyze.add_argument("--embedding", choices=("ipca", "mds"), default="ipca")
    analyze.add_argument("--bins", type=int, default=DEFAULT_BINS)
    analyze.add_argument("--mds-max-points", type=int, default=DEFAULT_MDS_MAX_POINTS)
    analyze.add_argument("--seed", type=int, default=0)
    analyze.add_argument("--rrr", choices=("cv", "mad"), default="cv")
    analyze.add_argument("--ema-beta", type=float, default=DEFAULT_EMA_BETA)
    analyze.add_argument("--no-outlier-filter", action="store_true")
    analyze.add_argument("--vg-threshold", type=float, default=VG_THRESHOLD)
    analyze.add_argument("--vg-frac", type=float, default=VG_FRACTION)
    analyze.add_argument("--vg-window", type=int, default=VG_WINDOW)
    analyze.add_argument("--eg-threshold", type=float, default=EG_THRESHOLD)
    analyze.add_argument("--spike-mad-mult", type=float, default=DEFAULT_SPIKE_MAD_MULT)
    analyze.add_argument("--timestamp", default=None, help="freeze report timestamp (for golden tests)")

    inspect = sub.add_parser("inspect", help="print a plain-text or JSON trace summary")
    inspect.add_argument("--trace", required=True)
    inspect.add_argument("--format", choices=("text", "json"), default="text")
    return parser


def _build_registry(args: argparse.Namespace, modules: List[str]) -> Registry:
    factories = {
        "state": lambda: StateAnalyzer(
            embedding=args.embedding,
            bins=args.bins,
            mds_max_points=args.mds_max_points,
            seed=args.seed,
        ),
        "action": lambda: ActionAnalyzer(spike_mad_mult=args.spike_mad_mult),
        "agent": lambda: AgentAnalyzer(
            vg_threshold=args.vg_threshold,
            vg_frac=args.vg_frac,
            vg_window=args.vg_window,
            eg_threshold=args.eg_threshold,
        ),
        "reward": lambda: RewardAnalyzer(
            rrr=args.rrr, ema_beta=args.ema_beta, outlier_filter=not args.no_outlier_filter
        ),
        "loss": lambda: LossAnalyzer(ema_beta=args.ema_beta),
    }
    registry = Registry()
    for name in MODULE_NAMES:
        if name in modules:
            registry.register(factories[name]())
    return registry


def _config_echo(args: argparse.Namespace) -> dict:
    skip = {"command", "trace", "out", "json_out"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _viewer_bundle() -> bytes:
    try:
        ref = resources.files("rlinspect").joinpath("assets/viewer.js")
        return ref.read_bytes()
    except (FileNotFoundError, ModuleNotFoundError):
        return b""


def _cmd_demo(args: argparse.Namespace) -> int:
    config = TrainerConfig(
        learning_rate=args.alpha,
        gamma=args.gamma,
        eps_start=args.eps_start,
        eps_min=args.eps_min,
        eps_decay=args.eps_decay,
        hidden=args.hidden,
        episodes=args.episodes,
        seed=args.seed,
        snapshot_every=args.snapshot_every,
        probe_k=args.probe_k,
    )
    fault = parse_fault(args.fault) if args.fault else None
    with open_writer(args.out, config.header()) as writer:
        summary = train(config, writer, fault=fault)
    print(
        f"wrote {args.out}: {summary.episodes} episodes, {summary.updates} updates, "
        f"{summary.explore_visits} explore / {summary.exploit_visits} exploit visits",
        file=sys.stderr,
    )
    return 0


def _cmd_analyze(args: argparse.Namespace) -> int:
    modules = [m.strip() for m in args.modules.split(",") if m.strip()]
    reader = TraceReader(args.trace)
    registry = _build_registry(args, modules)
    sections = run_analyzers(registry, reader)
    generated_at = (
        str(args.timestamp)
        if args.timestamp is not None
        else datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    )
    report = build_report(
        sections, run_id=reader.header.run_id, generated_at=generated_at, config=_config_echo(args)
    )
    html_bytes = render(report, viewer_bundle=_viewer_bundle())
    with open(args.out, "wb") as fh:
        fh.write(html_bytes)
    if args.json_out:
        with open(args.json_out, "wb") as fh:
            fh.write(export_json(report))
    print(f"wrote {args.out}", file=sys.stderr)
    return 0


def _cmd_inspect(args: argparse.Namespace) -> int:
    reader = TraceReader(args.trace)
    counts = {
        "state_visit": 0,
        "action_probe": 0,
        "step_reward": 0,
        "layer_snapshot": 0,
        "loss": 0,
    }
    episodes = set()
    updates = set()
    type_names = {
        "StateVisit": "state_visit",
        "ActionProbe": "action_probe",
        "StepReward": "step_reward",
        "LayerSnapshot": "layer_snapshot",
        "LossPoint": "loss",
    }
    agent = AgentAnalyzer()
    action = ActionAnalyzer()
    agent.reset()
    action.reset()
    agent.consume(reader.header)
    action.consume(reader.header)
    for event in reader.stream():
        counts[type_names[type(event).__name__]] += 1
        if hasattr(event, "episode"):
            episodes.add(event.episode)
        if hasattr(event, "update"):
            updates.add(event.update)
        agent.consume(event)
        action.consume(event)
    flag_counts = {"vanishing_gradient": 0, "exploding_gradient": 0, "divergence_spike": 0}
    for result in agent.analyse():
        if result.metric in ("vanishing_gradient", "exploding_gradient"):
            flag_counts[result.metric] += len(result.flags)
    for result in action.analyse():
        if result.metric == "policy_divergence":
            flag_counts["divergence_spike"] += len(result.flags)
    summary = {
        "run_id": reader.header.run_id,
        "events": counts,
        "episode_count": len(episodes),
        "update_count": len(updates),
        "flags": flag_counts,
    }
    if args.format == "json":
        print(json.dumps(summary, separators=(",", ":")))
    else:
        print(f"run_id: {summary['run_id']}")
        print("events:")
        for name, count in counts.items():
            print(f"  {name}: {count}")
        print(f"episodes: {summary['episode_count']}")
        print(f"updates: {summary['update_count']}")
        print("flags:")
        for name, count in flag_counts.items():
            print(f"  {name}: {count}")
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "analyze":
        modules = [m.strip() for m in args.modules.split(",") if m.strip()]
        unknown = [m for m in modules if m not in MODULE_NAMES]
        if unknown or not modules:
            parser.error(
                f"--modules must name a non-empty subset of {','.join(MODULE_NAMES)}; "
                f"got {args.modules!r}"
            )  # prints usage and exits 2
    try:
        if args.command == "demo":
            return _cmd_demo(args)
        if args.command == "analyze":
            return _cmd_analyze(args)
        return _cmd_inspect(args)
    except TraceError as exc:
        print(f"rlinspect: trace error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"rlinspect: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"rlinspect: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
