"""Command-line front door: parse, gen, attack, resilience, serve.

Outputs are byte-stable for identical inputs; nothing here writes
timestamps into artifacts. Exit codes: 0 success, 1 validation or I/O
failure, 2 usage error (argparse's convention).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .attack_studio import build_attack, parse_cpa, render_cpa
from .cyber_topology import (
    derive_baseline_topology,
    to_logical_graph,
    topology_from_json_dict,
)
from .errors import ToolError, ValidationFailed
from .inp_model import format_control, parse_inp
from .resilience import (
    DEFAULT_LAMBDAS,
    DiversityParams,
    format_report_table,
    report_to_json_dict,
    resilience_report,
)


def _parse_lambdas(raw: str) -> tuple[float, ...]:
    try:
        values = tuple(float(part) for part in raw.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad lambda list {raw!r}")
    if not values:
        raise argparse.ArgumentTypeError("lambda list is empty")
    return values


def cmd_parse(args: argparse.Namespace) -> int:
    model = parse_inp(Path(args.path).read_text(), source_name=Path(args.path).name)
    if args.format == "json":
        from .attack_studio import control_rule_to_json_dict

        counts: dict[str, int] = {}
        for element in model.elements:
            counts[element.kind] = counts.get(element.kind, 0) + 1
        print(
            json.dumps(
                {
                    "title": model.title,
                    "elements": counts,
                    "controls": [
                        control_rule_to_json_dict(r) for r in model.controls
                    ],
                },
                indent=2,
            )
        )
        return 0
    print(f"{model.title or Path(args.path).name}: "
          f"{len(model.elements)} elements, {len(model.controls)} control rules")
    for rule in model.controls:
        print(f"  #{rule.index} {format_control(rule)}")
    return 0


def cmd_gen(args: argparse.Namespace) -> int:
    source = Path(args.path)
    model = parse_inp(source.read_text(), source_name=source.name)
    topology = derive_baseline_topology(model.controls, model)
    Path(args.output).write_text(render_cpa(topology))
    return 0


def cmd_attack(args: argparse.Namespace) -> int:
    path = Path(args.path)
    document = parse_cpa(path.read_text())
    params = {
        "target": args.target,
        "start": args.start,
        "end": args.end,
        "value": args.value,
        "offset": args.offset,
        "state": args.state,
        "rule": args.rule,
    }
    attack = build_attack(
        args.kind, params, document.topology, existing=document.attacks
    )
    text = render_cpa(
        document.topology,
        document.attacks + (attack,),
        dict(document.options),
    )
    Path(args.output or args.path).write_text(text)
    print(attack.id)
    return 0


def cmd_resilience(args: argparse.Namespace) -> int:
    # Accepts either a topology snapshot (JSON) or a full scenario (.cpa).
    text = Path(args.path).read_text()
    if text.lstrip().startswith("{"):
        try:
            topology = topology_from_json_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            print(f"error: {args.path}: not valid JSON: {exc}", file=sys.stderr)
            return 1
    else:
        topology = parse_cpa(text).topology
    params = DiversityParams(
        t_ksd=args.t_ksd, mode=args.mode, k_paths=args.k_paths, lambdas=args.lambdas
    )
    report = resilience_report(
        to_logical_graph(topology), lambdas=args.lambdas, params=params
    )
    if args.format == "json":
        print(json.dumps(report_to_json_dict(report), indent=2))
    else:
        print(format_report_table(report, include_pairs=args.pairs))
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .session_service import SessionStore, create_app

    store = SessionStore(snapshot_dir=args.state_dir)
    uvicorn.run(create_app(store), host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cpaforge",
        description="Turn water-network models into cyber-physical attack "
        "scenarios and score their topology's path diversity.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="summarize the control rules of an .inp file")
    p.add_argument("path", help=".inp network file")
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("gen", help="generate the baseline .cpa scenario")
    p.add_argument("path", help=".inp network file")
    p.add_argument("-o", "--output", required=True, help="where to write the .cpa")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("attack", help="append one attack to a .cpa scenario")
    p.add_argument("path", help=".cpa scenario file (rewritten in place)")
    p.add_argument(
        "--kind",
        required=True,
        choices=("communication", "control", "sensor", "actuator"),
    )
    p.add_argument(
        "--target",
        required=True,
        help="ELEM.QTY (sensor), SRC->DST (communication), "
        "element id (actuator), RULE<n> (control)",
    )
    p.add_argument("--start", default="0", help="TIME <h>, ELEM.QTY ABOVE|BELOW <v>, or a bare hour")
    p.add_argument("--end", default="END", help="like --start; END leaves the window open")
    p.add_argument("--value", help="injected absolute reading (sensor/communication)")
    p.add_argument("--offset", help="injected reading offset (sensor/communication)")
    p.add_argument("--state", help="OPEN, CLOSED or a numeric setting (actuator)")
    p.add_argument("--rule", help="replacement control statement (control)")
    p.add_argument("-o", "--output", help="write here instead of rewriting in place")
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("resilience", help="score a topology snapshot or scenario")
    p.add_argument("path", help="topology snapshot (JSON) or scenario (.cpa)")
    p.add_argument(
        "--lambda",
        dest="lambdas",
        type=_parse_lambdas,
        default=DEFAULT_LAMBDAS,
        help="comma-separated lambda sweep (default 0.2,1,5)",
    )
    p.add_argument(
        "--mode",
        choices=("max", "cumulative"),
        default="max",
        help="k_sd aggregation: best single alternate, or greedy cumulative",
    )
    p.add_argument("--t-ksd", type=float, default=0.0, help="diversity threshold")
    p.add_argument("--k-paths", type=int, default=3, help="path budget (cumulative mode)")
    p.add_argument("--pairs", action="store_true", help="include the per-pair table")
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.set_defaults(func=cmd_resilience)

    p = sub.add_parser("serve", help="run the HTTP session service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--state-dir", help="directory for session snapshots (optional)")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    source = getattr(args, "path", None)
    try:
        return args.func(args)
    except ValidationFailed as exc:
        for diagnostic in exc.diagnostics:
            print(f"error: {source}: {diagnostic}", file=sys.stderr)
        if not exc.diagnostics:
            print(f"error: {source}: {exc.message}", file=sys.stderr)
        return 1
    except ToolError as exc:
        where = f"{source}: " if source else ""
        line = f"line {exc.line}: " if exc.line is not None else ""
        print(f"error: {where}{line}{exc.message}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
