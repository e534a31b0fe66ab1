"""Command-line front end: generate instances, solve any model, and emit
bound reports, as plain tables or JSON.

Exit codes: 0 success, 1 bad arguments or unparsable input, 2 resource
limit exceeded (scenario/path/cut caps), 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from .game import (
    DEFAULT_CUT_LIMIT,
    DEFAULT_SCENARIO_LIMIT,
    CutLimitExceeded,
    ScenarioLimitExceeded,
)
from .graph import PathLimitExceeded
from .instances import (
    FAMILIES,
    GeneratorSpec,
    ParseError,
    SpecInvalid,
    generate,
    parse,
    serialize,
)
from .linopt import NumericalFailure
from .lomodel import approx_report, solve_lo
from .solvers import (
    DEFAULT_LP_SCENARIO_LIMIT,
    DEFAULT_PATH_LIMIT,
    GammaMismatch,
    certify,
    certify_gamma1,
    gamma1_strategy,
    solve_ni,
    solve_rni,
    solve_rni_gamma1,
    solve_rni_path,
)

MODELS = ("ni", "rni", "rni-path", "lo", "gamma1")
PROB_PRINT_FLOOR = 1e-9


@dataclass
class CliConfig:
    scenario_limit: int = DEFAULT_SCENARIO_LIMIT
    lp_scenario_limit: int = DEFAULT_LP_SCENARIO_LIMIT
    path_limit: int = DEFAULT_PATH_LIMIT
    cut_limit: int = DEFAULT_CUT_LIMIT
    tolerance: float = 1e-6
    output: str = "table"
    seed: int = 0

    def __post_init__(self):
        for name in ("scenario_limit", "lp_scenario_limit", "path_limit", "cut_limit"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if not 0 < self.tolerance < 1:
            raise ValueError("tolerance must lie in (0, 1)")


def _env_int(name, default):
    raw = os.environ.get(name)
    return int(raw) if raw else default


def config_from(args) -> CliConfig:
    """Precedence: command-line flag, then INTERDICT_* env var, then default."""
    return CliConfig(
        scenario_limit=getattr(args, "scenario_limit", None)
        or _env_int("INTERDICT_SCENARIO_LIMIT", DEFAULT_SCENARIO_LIMIT),
        lp_scenario_limit=getattr(args, "lp_scenario_limit", None)
        or _env_int("INTERDICT_LP_SCENARIO_LIMIT", DEFAULT_LP_SCENARIO_LIMIT),
        path_limit=getattr(args, "path_limit", None)
        or _env_int("INTERDICT_PATH_LIMIT", DEFAULT_PATH_LIMIT),
        cut_limit=getattr(args, "cut_limit", None)
        or _env_int("INTERDICT_CUT_LIMIT", DEFAULT_CUT_LIMIT),
        tolerance=getattr(args, "tolerance", None)
        or float(os.environ.get("INTERDICT_TOLERANCE") or 1e-6),
        output="json" if getattr(args, "json", False) else "table",
        seed=getattr(args, "seed", None) or _env_int("INTERDICT_SEED", 0),
    )


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # bad args exit 1, not argparse's default 2
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="interdict", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write an instance file")
    gen.add_argument("--family", required=True, choices=FAMILIES)
    gen.add_argument("--k", type=int)
    gen.add_argument("--gamma", type=int, required=True)
    gen.add_argument("--seed", type=int)
    gen.add_argument("--nodes", type=int)
    gen.add_argument("--arcs", type=int)
    gen.add_argument("--cap-max", type=int, dest="cap_max")
    gen.add_argument("--fig2b-prose", action="store_true", dest="fig2b_prose")
    gen.add_argument("--out")

    def add_common(p):
        p.add_argument("file", help="instance file, or - for stdin")
        p.add_argument("--json", action="store_true")
        p.add_argument("--scenario-limit", type=int, dest="scenario_limit")
        p.add_argument("--lp-scenario-limit", type=int, dest="lp_scenario_limit")
        p.add_argument("--path-limit", type=int, dest="path_limit")
        p.add_argument("--cut-limit", type=int, dest="cut_limit")
        p.add_argument("--tolerance", type=float)

    slv = sub.add_parser("solve", help="solve one model")
    slv.add_argument("--model", required=True, choices=MODELS)
    add_common(slv)

    rep = sub.add_parser("report", help="full value/bound report")
    add_common(rep)
    return parser


def _read_instance(path):
    if path == "-":
        return parse(sys.stdin.read()), "<stdin>"
    with open(path, "r", encoding="utf-8") as handle:
        return parse(handle.read()), path


def _instance_summary(instance, name):
    return {
        "file": name,
        "nodes": instance.node_count,
        "arcs": instance.arc_count,
        "gamma": instance.gamma,
    }


def _strategy_json(strategy):
    if strategy is None:
        return []
    return [
        {"arcs": list(s.removed), "prob": float(p)} for s, p in strategy.support
    ]


def _certificate_json(cert):
    if cert is None:
        return None
    return {
        "flow_gap": cert.flow_gap,
        "adversary_gap": cert.adversary_gap,
        "pass": cert.passed,
    }


def _bounds_json(bounds):
    return [
        {
            "name": bc.name,
            "lhs": bc.lhs,
            "rhs": bc.rhs,
            "verdict": bc.verdict,
            "tight": bc.tight,
        }
        for bc in bounds
    ]


def _print_strategy(strategy):
    print("strategy:")
    for scenario, prob in strategy.support:
        if prob < PROB_PRINT_FLOOR:
            continue
        arcs = ", ".join(str(a) for a in scenario.removed)
        print(f"  remove {{{arcs}}}  p={prob:.6f}")


def _print_flow(flow):
    print("flow witness:")
    if hasattr(flow, "entries"):
        for path, amount in flow.entries:
            arcs = "->".join(str(a) for a in path)
            print(f"  path {arcs}  amount={float(amount):.6f}")
    else:
        for aid, value in sorted(flow.values.items()):
            print(f"  arc {aid}: {float(value):.6f}")


def _print_certificate(cert):
    verdict = "PASS" if cert.passed else "FAIL"
    print(
        f"certificate: flow_gap={cert.flow_gap:.3e} "
        f"adversary_gap={cert.adversary_gap:.3e} {verdict}"
    )


def cmd_generate(args) -> int:
    spec = GeneratorSpec(
        family=args.family,
        gamma=args.gamma,
        k=args.k,
        seed=args.seed,
        nodes=args.nodes,
        arcs=args.arcs,
        cap_max=args.cap_max,
        fig2b_prose=args.fig2b_prose,
    )
    instance = generate(spec)
    text = serialize(instance)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
        print(f"nodes={instance.node_count} arcs={instance.arc_count}")
    else:
        sys.stdout.write(text)
        print(
            f"nodes={instance.node_count} arcs={instance.arc_count}",
            file=sys.stderr,
        )
    return 0


def cmd_solve(args) -> int:
    config = config_from(args)
    instance, name = _read_instance(args.file)
    model = args.model
    value = None
    strategy = None
    certificate = None
    extra = {}
    if model == "ni":
        sol = solve_ni(
            instance,
            scenario_limit=config.scenario_limit,
            cut_limit=config.cut_limit,
        )
        value = float(sol.value)
        flow = sol.witness_flow
        extra["witness_removal"] = list(sol.witness_scenario.removed)
    elif model == "rni":
        sol = solve_rni(
            instance,
            lp_scenario_limit=config.lp_scenario_limit,
            cut_limit=config.cut_limit,
        )
        value = sol.value
        strategy = sol.strategy
        flow = sol.flow_witness
        certificate = certify(
            instance,
            sol,
            kind="arc",
            tolerance=config.tolerance,
            scenario_limit=config.scenario_limit,
            cut_limit=config.cut_limit,
        )
    elif model == "rni-path":
        sol = solve_rni_path(
            instance,
            path_limit=config.path_limit,
            lp_scenario_limit=config.lp_scenario_limit,
        )
        value = sol.value
        strategy = sol.strategy
        flow = sol.flow_witness
        certificate = certify(
            instance,
            sol,
            kind="path",
            tolerance=config.tolerance,
            scenario_limit=config.scenario_limit,
            path_limit=config.path_limit,
        )
    elif model == "lo":
        sol = solve_lo(instance)
        value = float(sol.value)
        flow = sol.flow
        extra["theta_star"] = float(sol.theta_star)
        extra["flow_value"] = float(sol.flow_value)
    else:  # gamma1
        if instance.gamma != 1:
            raise GammaMismatch("gamma1 requires gamma = 1")
        sol = solve_rni_gamma1(instance)
        value = sol.value
        strategy = gamma1_strategy(sol)
        flow = None
        certificate = certify_gamma1(instance, sol, tolerance=config.tolerance)

    if config.output == "json":
        payload = {
            "instance": _instance_summary(instance, name),
            "model": model,
            "value": value,
            "strategy": _strategy_json(strategy),
            "certificate": _certificate_json(certificate),
            "bounds": [],
            **extra,
        }
        print(json.dumps(payload, indent=2))
        return 0
    label = {
        "ni": "Z_NI",
        "rni": "Z_RNI",
        "rni-path": "Z_RNI^Path",
        "lo": "Z_LO",
        "gamma1": "Z_RNI",
    }[model]
    print(f"{label} = {value:.6g}")
    for key, val in extra.items():
        if isinstance(val, float):
            print(f"{key} = {val:.6g}")
        else:
            print(f"{key} = {val}")
    if strategy is not None:
        _print_strategy(strategy)
    if flow is not None:
        _print_flow(flow)
    if certificate is not None:
        _print_certificate(certificate)
    return 0


def cmd_report(args) -> int:
    config = config_from(args)
    instance, name = _read_instance(args.file)
    report = approx_report(
        instance,
        tolerance=config.tolerance,
        scenario_limit=config.scenario_limit,
        lp_scenario_limit=config.lp_scenario_limit,
        path_limit=config.path_limit,
        cut_limit=config.cut_limit,
    )
    if config.output == "json":
        payload = {
            "instance": _instance_summary(instance, name),
            "model": "report",
            "value": report.z_lo,
            "strategy": [],
            "certificate": None,
            "bounds": _bounds_json(report.bounds),
            "values": {
                "nominal_max_flow": report.nominal_max_flow,
                "z_ni": report.z_ni,
                "z_rni": report.z_rni,
                "z_rni_path": report.z_rni_path,
                "z_lo": report.z_lo,
                "theta_star": report.theta_star,
                "flow_value": report.flow_value,
            },
            "cuts": {
                "s_prime": sorted(report.s_prime.s_side),
                "s_dblprime": sorted(report.s_dblprime.s_side),
                "a": report.a,
                "b": report.b,
                "big_l": report.big_l,
            },
            "partial": report.partial,
            "skipped": list(report.skipped),
        }
        print(json.dumps(payload, indent=2))
        return 0

    def show(label, v):
        print(f"{label} = {v:.6g}" if v is not None else f"{label} = n/a")

    show("nominal max flow", report.nominal_max_flow)
    show("Z_NI", report.z_ni)
    show("Z_RNI", report.z_rni)
    show("Z_RNI^Path", report.z_rni_path)
    show("Z_LO", report.z_lo)
    show("theta*", report.theta_star)
    show("Val(x*)", report.flow_value)
    print(f"cuts: |A(S',theta*)|={report.a} |B(S'',theta*)|={report.b} L={report.big_l:.6g}")
    if report.partial:
        print(f"partial result: skipped {', '.join(report.skipped)} (limits)")
    print("bounds:")
    for bc in report.bounds:
        verdict = bc.verdict + ("(tight)" if bc.verdict == "PASS" and bc.tight else "")
        lhs = "n/a" if bc.lhs is None else f"{bc.lhs:.4f}"
        rhs = "n/a" if bc.rhs is None else f"{bc.rhs:.4f}".rstrip("0").rstrip(".")
        print(f"  {bc.name} = {lhs} <= {rhs} {verdict}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    as_json = getattr(args, "json", False)

    def fail(code, kind, exc):
        if as_json:
            print(json.dumps({"error": {"kind": kind, "message": str(exc)}}))
        else:
            print(f"error ({kind}): {exc}", file=sys.stderr)
        return code

    try:
        if args.command == "generate":
            return cmd_generate(args)
        if args.command == "solve":
            return cmd_solve(args)
        return cmd_report(args)
    except (ParseError, SpecInvalid, GammaMismatch, ValueError, OSError) as exc:
        return fail(1, "input", exc)
    except (ScenarioLimitExceeded, PathLimitExceeded, CutLimitExceeded) as exc:
        return fail(2, "limit", exc)
    except NumericalFailure as exc:
        return fail(3, "numerical", exc)


if __name__ == "__main__":
    sys.exit(main())
