"""Command-line entry point: check, gen, simulate, oracle, audit.

Exit codes: 0 solvable / checks passed, 2 unsolvable / violations found,
3 necessary condition holds (inconclusive), 64 usage or parse error,
65 resource budget exceeded.  The ``OMLAB_BUDGET`` environment variable
overrides the default state-space caps.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import bundled, dot
from .budget import Budget, BudgetExceededError
from .equivalence import beta_partition
from .events import (
    EventFamily,
    InitialConfig,
    family_from_json_dict,
    family_to_json_dict,
)
from .graphs import (
    Digraph,
    complete_digraph,
    cycle_digraph,
    digraph_from_json_dict,
    hypercube_digraph,
    mask_nodes,
    path_digraph,
)
from .oracle import equal_rounds_audit, min_consensus_rounds
from .scenarios import Scenario, crash_scheme_prefixes, random_scenario
from .simulator import (
    CheckReport,
    ProtocolSpec,
    broadcast_consensus,
    check_scenarios,
    event_detection_consensus,
    exhaustive_check,
    flooding,
    run,
)
from .solvability import (
    Answer,
    Verdict,
    check_broadcastable,
    check_consensus,
    connectivity_threshold_check,
    verdict_to_json_dict,
)

EXIT_OK = 0
EXIT_NEGATIVE = 2
EXIT_CONDITION = 3
EXIT_PARSE = 64
EXIT_BUDGET = 65

RULE_TEXT = {
    "common-source": "some node is a source of every event",
    "no-source-event": "an event has no source node",
    "source-incompatible": "events with sources but no common source",
    "convex-broadcast-equivalence":
        "family closed under arc additions: consensus coincides with broadcast",
    "broadcast-reduction":
        "broadcast is solvable; flooding the common source's value decides consensus",
    "indistinguishable-class-unbroadcastable":
        "an indistinguishability class has no common source",
    "necessary-condition-only":
        "every indistinguishability class is broadcastable; "
        "sufficiency of this condition is open",
}


class CliError(Exception):
    """Usage or input error; maps to exit code 64."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise CliError(message)


@dataclass(frozen=True)
class RunConfig:
    """Validated command-line invocation."""

    command: str
    args: argparse.Namespace
    budget: Budget


# ---- input resolution ---------------------------------------------------------

def _add_graph_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--graph", metavar="FILE", help="digraph JSON file")
    group.add_argument("--hypercube", type=int, metavar="N",
                       help="hypercube of dimension N")
    group.add_argument("--complete", type=int, metavar="N",
                       help="complete graph on N nodes")
    group.add_argument("--cycle", type=int, metavar="N", help="cycle on N nodes")
    group.add_argument("--path", type=int, metavar="N", help="path on N nodes")


def _add_family_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--family", metavar="FILE", help="event family JSON file")
    parser.add_argument("--bundled", metavar="NAME",
                        help="bundled example: " + ", ".join(bundled.bundled_names()))
    _add_graph_flags(parser)
    parser.add_argument("--bounded", type=int, metavar="F",
                        help="generate events with at most F omissions")
    parser.add_argument("--metric", choices=("global", "send", "recv"),
                        default="global", help="how omissions are counted")


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise CliError(f"file not found: {path}")
    except json.JSONDecodeError as exc:
        raise CliError(f"cannot parse {path}: {exc}")


def _resolve_graph(args: argparse.Namespace) -> Digraph:
    if args.graph:
        try:
            return digraph_from_json_dict(_load_json(args.graph))
        except ValueError as exc:
            raise CliError(str(exc))
    if args.hypercube is not None:
        return hypercube_digraph(args.hypercube)
    if args.complete is not None:
        return complete_digraph(args.complete)
    if args.cycle is not None:
        return cycle_digraph(args.cycle)
    if args.path is not None:
        return path_digraph(args.path)
    raise CliError("no graph given (use --graph/--hypercube/--complete/--cycle/--path)")


def _resolve_family(args: argparse.Namespace, allow_non_mobile: bool = False) -> EventFamily:
    chosen = [
        bool(args.family), bool(args.bundled),
        any(getattr(args, k) is not None for k in
            ("hypercube", "complete", "cycle", "path")) or bool(args.graph),
    ]
    if sum(chosen) != 1:
        raise CliError("give exactly one of --family, --bundled, or a graph + --bounded")
    if args.family:
        try:
            return family_from_json_dict(_load_json(args.family))
        except ValueError as exc:
            raise CliError(str(exc))
    if args.bundled:
        try:
            family = bundled.load_family(args.bundled)
        except KeyError as exc:
            raise CliError(str(exc.args[0]))
        if not bundled.is_mobile(args.bundled) and not allow_non_mobile:
            raise CliError(
                f"{args.bundled} is not a mobile scheme; solvability analysis "
                "does not apply (use `simulate --crash-horizon`)"
            )
        return family
    if args.bounded is None:
        raise CliError("generated families need --bounded F")
    g = _resolve_graph(args)
    from .events import generate_bounded_omissions

    return generate_bounded_omissions(g, args.bounded, args.metric)


def _write_output(text: str, args: argparse.Namespace) -> None:
    if getattr(args, "output", None):
        Path(args.output).write_text(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


# ---- check --------------------------------------------------------------------

def _verdict_text(verdict: Verdict, family: EventFamily) -> str:
    lines = [f"{verdict.problem}: {verdict.answer.value}"]
    lines.append(f"rule: {verdict.rule} ({RULE_TEXT.get(verdict.rule, '')})")
    payload = verdict_to_json_dict(verdict, family)["witness"]
    if payload is not None:
        lines.append("witness: " + json.dumps(payload))
    return "\n".join(lines)


def cmd_check(config: RunConfig) -> int:
    args = config.args
    family = _resolve_family(args)
    if args.problem == "broadcast":
        verdict = check_broadcastable(family)
    else:
        verdict = check_consensus(family)
    if args.format == "json":
        payload = verdict_to_json_dict(verdict, family)
        if args.beta or verdict.rule.startswith("indistinguishable"):
            payload["beta"] = beta_partition(family).to_json_dict()
        _write_output(json.dumps(payload, indent=2), args)
    elif args.format == "dot":
        _write_output(dot.verdict_dot(verdict, family), args)
    else:
        _write_output(_verdict_text(verdict, family), args)
    if args.emit_dot:
        Path(args.emit_dot).write_text(dot.verdict_dot(verdict, family) + "\n")
    return verdict.exit_code


# ---- gen ----------------------------------------------------------------------

def cmd_gen(config: RunConfig) -> int:
    args = config.args
    if args.bounded is None:
        raise CliError("gen needs --bounded F")
    g = _resolve_graph(args)
    from .events import generate_bounded_omissions

    family = generate_bounded_omissions(g, args.bounded, args.metric)
    if args.format == "dot":
        _write_output(dot.family_dot(family), args)
    else:
        _write_output(json.dumps(family_to_json_dict(family), indent=2), args)
    print(f"generated {len(family)} events", file=sys.stderr)
    return EXIT_OK


# ---- simulate -------------------------------------------------------------------

def _build_protocol(args: argparse.Namespace, family: EventFamily) -> ProtocolSpec:
    name = args.protocol
    if name == "h-one-round":
        return bundled.h_one_round()
    if name in ("flooding", "broadcast-consensus"):
        if args.origin is None or args.rounds is None:
            raise CliError(f"{name} needs --origin NODE and --rounds R")
        try:
            origin = family.base.node(args.origin)
        except KeyError as exc:
            raise CliError(str(exc.args[0]))
        factory = flooding if name == "flooding" else broadcast_consensus
        return factory(origin, args.rounds)
    if name == "event-detection":
        if not args.decide_map:
            raise CliError('event-detection needs --decide-map "H1=c,H2=d"')
        mapping = {}
        for part in args.decide_map.split(","):
            event_name, sep, node_label = part.partition("=")
            if not sep:
                raise CliError(f"cannot parse --decide-map entry {part!r}")
            try:
                mapping[family.name_index[event_name.strip()]] = (
                    family.base.node(node_label.strip())
                )
            except KeyError as exc:
                raise CliError(f"unknown name in --decide-map: {exc.args[0]}")
        try:
            return event_detection_consensus(family, mapping)
        except ValueError as exc:
            raise CliError(str(exc))
    raise CliError(
        f"unknown protocol {name!r} "
        "(known: h-one-round, flooding, broadcast-consensus, event-detection)"
    )


def _parse_scenario(spec: str, family: EventFamily) -> Scenario:
    word = []
    for token in spec.split(","):
        token = token.strip()
        if token in family.name_index:
            word.append(family.name_index[token])
        elif token.isdigit() and int(token) < len(family):
            word.append(int(token))
        else:
            raise CliError(f"unknown event {token!r} in --scenario")
    return Scenario(tuple(word))


def _parse_init(spec: str, family: EventFamily) -> InitialConfig:
    mapping = {}
    for part in spec.split(","):
        label, sep, value = part.partition("=")
        if not sep or value.strip() not in ("0", "1"):
            raise CliError(f"cannot parse --init entry {part!r}")
        mapping[label.strip()] = int(value)
    try:
        return InitialConfig.from_mapping(family.base, mapping)
    except (KeyError, ValueError) as exc:
        raise CliError(str(exc.args[0]))


def _trace_json(protocol, family, scenario, init) -> dict:
    trace = run(protocol, family, scenario, init)
    g = family.base
    return {
        "protocol": protocol.name,
        "scenario": list(scenario.names(family)),
        "init": {g.label(u): v for u, v in enumerate(init.values)},
        "rounds": [
            {
                "round": r + 1,
                "event": family.name(scenario.word[r]),
                "delivered": [[g.label(t), g.label(h)] for t, h in trace.deliveries[r]],
                "states": {g.label(u): repr(s) for u, s in enumerate(trace.states[r + 1])},
            }
            for r in range(trace.rounds)
        ],
        "decisions": {
            g.label(u): None if d is None else {"value": d[0], "round": d[1]}
            for u, d in enumerate(trace.decisions)
        },
    }


def _report_text(report: CheckReport, family: EventFamily) -> str:
    lines = [
        f"protocol {report.protocol}: "
        f"{'PASS' if report.passed else 'FAIL'} ({report.runs} runs)"
    ]
    for v in report.violations[:20]:
        scenario = ",".join(family.name(i) for i in v.word)
        lines.append(f"  {v.kind}: scenario [{scenario}] init {list(v.init)}: {v.detail}")
    if len(report.violations) > 20:
        lines.append(f"  ... and {len(report.violations) - 20} more violations")
    return "\n".join(lines)


def cmd_simulate(config: RunConfig) -> int:
    args = config.args
    family = _resolve_family(args, allow_non_mobile=args.crash_horizon is not None)
    if args.crash_horizon is not None:
        family, scenarios = crash_scheme_prefixes(family.base, args.crash_horizon)
        protocol = _build_protocol(args, family)
        report = check_scenarios(
            protocol, family, sorted(scenarios, key=lambda s: s.word),
            args.crash_horizon, config.budget,
        )
        return _emit_report(report, family, args)
    protocol = _build_protocol(args, family)
    if args.all_scenarios is not None:
        report = exhaustive_check(protocol, family, args.all_scenarios, config.budget)
        return _emit_report(report, family, args)
    if args.random_scenarios is not None:
        if args.length is None:
            raise CliError("--random-scenarios needs --length L")
        scenarios = [
            random_scenario(range(len(family)), args.length, args.seed + i)
            for i in range(args.random_scenarios)
        ]
        report = check_scenarios(protocol, family, scenarios, args.length, config.budget)
        return _emit_report(report, family, args)
    if args.scenario is None or args.init is None:
        raise CliError(
            "give --scenario and --init for a single run, or --all-scenarios / "
            "--random-scenarios / --crash-horizon for a sweep"
        )
    scenario = _parse_scenario(args.scenario, family)
    init = _parse_init(args.init, family)
    _write_output(json.dumps(_trace_json(protocol, family, scenario, init), indent=2), args)
    return EXIT_OK


def _emit_report(report: CheckReport, family: EventFamily, args) -> int:
    if args.format == "json":
        _write_output(json.dumps(report.to_json_dict(family), indent=2), args)
    else:
        _write_output(_report_text(report, family), args)
    return EXIT_OK if report.passed else EXIT_NEGATIVE


# ---- oracle ---------------------------------------------------------------------

def cmd_oracle(config: RunConfig) -> int:
    args = config.args
    family = _resolve_family(args)
    result = min_consensus_rounds(family, args.max_horizon, config.budget)
    if args.format == "json":
        _write_output(json.dumps(result.to_json_dict(family), indent=2), args)
    else:
        lines = [
            f"consensus solvable in {result.rounds} round(s)"
            if result.solvable
            else f"no consensus protocol with horizon <= {result.max_horizon}"
        ]
        for r, ok in result.horizon_table:
            lines.append(f"  r={r}: {'solvable' if ok else 'not solvable'}")
        _write_output("\n".join(lines), args)
    return EXIT_OK if result.solvable else EXIT_NEGATIVE


# ---- audit ----------------------------------------------------------------------

def cmd_audit(config: RunConfig) -> int:
    args = config.args
    if args.audit_kind == "connectivity":
        g = _resolve_graph(args)
        if args.f_max is None:
            raise CliError("audit connectivity needs --f-max")
        rows = connectivity_threshold_check(g, args.f_max)
        payload = [
            {
                "f": row.f,
                "answer": row.answer.value,
                "expected_solvable": row.expected_solvable,
                "agrees": row.agrees,
            }
            for row in rows
        ]
        if args.format == "json":
            _write_output(json.dumps(payload, indent=2), args)
        else:
            lines = [
                f"f={r['f']}: {r['answer']} "
                f"(expected {'solvable' if r['expected_solvable'] else 'unsolvable'})"
                + ("" if r["agrees"] else "  << MISMATCH")
                for r in payload
            ]
            _write_output("\n".join(lines), args)
        return EXIT_OK if all(row.agrees for row in rows) else EXIT_NEGATIVE
    family = _resolve_family(args)
    try:
        report = equal_rounds_audit(family, config.budget)
    except ValueError as exc:
        raise CliError(str(exc))
    if args.format == "json":
        _write_output(json.dumps(report.to_json_dict(family), indent=2), args)
    else:
        _write_output(
            f"broadcast rounds: {report.broadcast_rounds}\n"
            f"consensus rounds: {report.consensus_rounds}\n"
            f"equal: {report.equal}",
            args,
        )
    return EXIT_OK if report.equal else EXIT_NEGATIVE


# ---- parser ---------------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(
        prog="omlab",
        description="Broadcast/consensus solvability under mobile omission faults.",
        epilog="Set OMLAB_BUDGET to override state-space caps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="solvability verdict for a family")
    _add_family_flags(check)
    check.add_argument("--problem", choices=("consensus", "broadcast"),
                       default="consensus")
    check.add_argument("--beta", action="store_true",
                       help="include the class partition in JSON output")
    check.add_argument("--emit-dot", metavar="FILE",
                       help="also write the witness as DOT")

    gen = sub.add_parser("gen", help="generate a bounded-omission family")
    _add_graph_flags(gen)
    gen.add_argument("--bounded", type=int, metavar="F", required=True)
    gen.add_argument("--metric", choices=("global", "send", "recv"), default="global")

    sim = sub.add_parser("simulate", help="run a protocol against scenarios")
    _add_family_flags(sim)
    sim.add_argument("--protocol", required=True,
                     help="h-one-round | flooding | broadcast-consensus | event-detection")
    sim.add_argument("--origin", metavar="NODE", help="originator label")
    sim.add_argument("--rounds", type=int, help="protocol round parameter")
    sim.add_argument("--decide-map", metavar="MAP", help='e.g. "H1=c,H2=d"')
    sim.add_argument("--scenario", metavar="WORD", help='e.g. "H1,H2,H1"')
    sim.add_argument("--init", metavar="VALUES", help='e.g. "a=0,b=1"')
    sim.add_argument("--all-scenarios", type=int, metavar="H",
                     help="check all words of length H against all inputs")
    sim.add_argument("--random-scenarios", type=int, metavar="N",
                     help="check N seeded random words")
    sim.add_argument("--length", type=int, help="word length for --random-scenarios")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--crash-horizon", type=int, metavar="H",
                     help="check all single-crash prefixes of length H (2-node)")

    oracle = sub.add_parser("oracle", help="brute-force consensus search")
    _add_family_flags(oracle)
    oracle.add_argument("--max-horizon", type=int, default=3)

    audit = sub.add_parser("audit", help="cross-check theory against searches")
    audit_sub = audit.add_subparsers(dest="audit_kind", required=True)
    conn = audit_sub.add_parser(
        "connectivity", help="omission bound sweep vs graph connectivity")
    _add_graph_flags(conn)
    conn.add_argument("--f-max", type=int, required=True)
    eq = audit_sub.add_parser(
        "equal-rounds", help="broadcast rounds vs oracle consensus rounds")
    _add_family_flags(eq)

    for p in (check, gen, sim, oracle, conn, eq):
        p.add_argument("--format", choices=("text", "json", "dot"), default="text")
        p.add_argument("-o", "--output", metavar="FILE")
    return parser


COMMANDS = {
    "check": cmd_check,
    "gen": cmd_gen,
    "simulate": cmd_simulate,
    "oracle": cmd_oracle,
    "audit": cmd_audit,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = RunConfig(args.command, args, Budget.from_env())
        return COMMANDS[args.command](config)
    except CliError as exc:
        print(f"omlab: error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except BudgetExceededError as exc:
        print(f"omlab: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    raise SystemExit(main())
