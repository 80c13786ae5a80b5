"""``ppeval`` command line.

Results go to stdout, diagnostics to stderr.  Exit codes: 0 success / threshold
met / plan found, 1 threshold missed / search exhausted without a plan,
2 usage, parse or validation error, 3 a cap was hit before an answer.
"""

from __future__ import annotations

import argparse
import sys
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

from .core import CircuitBackend, parse_rational, validate_domain
from .dsl import (
    compile_pso_to_circuit,
    load_domain,
    load_plan,
    parse_dimacs,
    print_plan,
    write_domain,
)
from .errors import EnumerationCapError, PPEvalError, SolverCapError
from .evaluation import (
    DIVERGENT,
    Interpretation,
    eval_truncated,
    evaluate,
    expected_action_count,
    format_value,
    meets_threshold,
    simulate,
)
from .formula import TRUE, parse_formula
from .plans import PartialOrderPlan, extension_orders, validate_plan
from .reductions import majsat_to_instance, parse_tm, tm_to_instance, write_instance
from .search import SearchBudget, exists_acyclic, exists_looping, exists_total_order

EXIT_OK, EXIT_NO, EXIT_ERROR, EXIT_CAP = 0, 1, 2, 3
DEFAULT_DOMAIN = "sandcastle.ppd"


class _Usage(Exception):
    pass


def bundled(name: str) -> Path:
    return Path(str(resources.files("ppeval") / "data" / name))


def _resolve(path: str) -> Path:
    """Use ``path`` as given, falling back to a bundled asset of that name."""
    p = Path(path)
    if p.exists():
        return p
    fallback = bundled(p.name)
    if fallback.exists():
        return fallback
    raise _Usage(f"no such file: {path}")


def _threshold(text: Optional[str]):
    if text is None:
        return None
    try:
        theta = parse_rational(text)
    except ValueError as exc:
        raise _Usage(str(exc)) from None
    if not 0 <= theta <= 1:
        raise _Usage(f"threshold {text} outside [0, 1]")
    return theta


def _domain(args):
    return load_domain(_resolve(args.domain))


def cmd_validate(args, out, err) -> int:
    domain = _domain(args)
    report = validate_domain(domain)
    print(f"domain {domain.name}: {report}", file=out)
    ok = report.ok
    if args.plan:
        preport = validate_plan(load_plan(_resolve(args.plan)), domain)
        print(f"plan {args.plan}: {preport}", file=out)
        ok = ok and preport.ok
    return EXIT_OK if ok else EXIT_ERROR


def cmd_eval(args, out, err) -> int:
    domain = _domain(args)
    plan = load_plan(_resolve(args.plan))
    theta = _threshold(args.threshold)
    report = validate_plan(plan, domain)
    if not report.ok:
        print(f"invalid plan: {report}", file=err)
        return EXIT_ERROR
    if args.horizon is not None:
        if isinstance(plan, PartialOrderPlan):
            raise _Usage("--horizon does not apply to partial-order plans")
        value = eval_truncated(domain, plan, args.horizon)
    else:
        value = evaluate(domain, plan, Interpretation(args.interpretation)).value
    print(format_value(value), file=out)
    for action in args.count or ():
        if isinstance(plan, PartialOrderPlan):
            raise _Usage("--count does not apply to partial-order plans")
        n = expected_action_count(domain, plan, action)
        print(f"expected {action}: {n if n == DIVERGENT else format_value(n)}", file=out)
    if args.simulate:
        wins = simulate(domain, plan, args.simulate, seed=args.seed)
        print(f"simulated {wins}/{args.simulate} (seed {args.seed})", file=out)
    if theta is None:
        return EXIT_OK
    return EXIT_OK if meets_threshold(value, theta) else EXIT_NO


def _observations(specs: Sequence[str]):
    obs = []
    for spec in specs:
        cond, arrow, label = spec.rpartition("->")
        if not arrow or not label.strip():
            raise _Usage(f"--obs expects 'FORMULA -> LABEL', got {spec!r}")
        obs.append((parse_formula(cond), label.strip()))
    if not obs:
        obs = [(TRUE, "any")]
    if obs[-1][0] != TRUE:
        raise _Usage("the last --obs condition must be 'true'")
    labels = tuple(dict.fromkeys(lab for _, lab in obs))
    return labels, tuple(obs)


def cmd_exists(args, out, err) -> int:
    domain = _domain(args)
    theta = _threshold(args.threshold)
    budget = SearchBudget(args.horizon, theta, args.node_cap, args.time_cap)
    if args.cls in ("total", "partial-order"):
        outcome = exists_total_order(domain, budget, prune=not args.no_prune)
    else:
        labels, obs = _observations(args.obs or ())
        search = exists_acyclic if args.cls == "acyclic" else exists_looping
        outcome = search(domain, budget, labels, obs)
    print(f"nodes expanded: {outcome.nodes}", file=err)
    if outcome.found:
        print(f"# value {outcome.value}", file=out)
        out.write(print_plan(outcome.witness))
        return EXIT_OK
    if not outcome.exhausted:
        print(f"capped: best {outcome.value}", file=out)
        return EXIT_CAP
    if outcome.value is None:
        print("exhausted: no candidate can meet the threshold", file=out)
    else:
        print(f"exhausted: max {outcome.value}", file=out)
    return EXIT_NO


def cmd_gen(args, out, err) -> int:
    if args.kind == "majsat":
        formula = parse_dimacs(_resolve(args.cnf).read_text())
        instance = majsat_to_instance(formula)
    else:
        machine = parse_tm(_resolve(args.tm).read_text())
        instance = tm_to_instance(machine, args.input)
    for path in write_instance(instance, args.out, args.stem or args.kind):
        print(path, file=out)
    return EXIT_OK


def cmd_convert(args, out, err) -> int:
    domain = _domain(args)
    if isinstance(domain.backend, CircuitBackend):
        raise _Usage(f"domain {domain.name!r} already uses circuits")
    for path in write_domain(compile_pso_to_circuit(domain), args.out, args.stem):
        print(path, file=out)
    return EXIT_OK


def cmd_extensions(args, out, err) -> int:
    plan = load_plan(_resolve(args.plan))
    if not isinstance(plan, PartialOrderPlan):
        raise _Usage("extensions needs a partial-order plan")
    report = validate_plan(plan)
    if not report.ok:
        print(f"invalid plan: {report}", file=err)
        return EXIT_ERROR
    act = plan.action_of
    for order in extension_orders(plan):
        print(" ".join(act[n] for n in order), file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ppeval", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def with_domain(p):
        p.add_argument("--domain", default=DEFAULT_DOMAIN, help="domain file (default: bundled sand-castle)")

    p = sub.add_parser("validate", help="check a domain (and optionally a plan)")
    with_domain(p)
    p.add_argument("--plan")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("eval", help="exact success probability of a plan")
    with_domain(p)
    p.add_argument("--plan", required=True)
    p.add_argument("--threshold", help="exit 1 if the value is below this rational")
    p.add_argument("--interpretation", choices=[i.value for i in Interpretation], default="average",
                   help="how to value a partial-order plan")
    p.add_argument("--horizon", type=int, help="only count goals reached within this many steps")
    p.add_argument("--count", action="append", metavar="ACTION", help="also print expected executions of ACTION")
    p.add_argument("--simulate", type=int, metavar="RUNS", help="also run seeded Monte Carlo rollouts")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("exists", help="search for a plan meeting a threshold")
    with_domain(p)
    p.add_argument("--class", dest="cls", choices=["total", "acyclic", "looping", "partial-order"], default="total")
    p.add_argument("--horizon", type=int, required=True, help="sequence length or controller step bound")
    p.add_argument("--threshold", required=True)
    p.add_argument("--obs", action="append", metavar="'FORMULA -> LABEL'",
                   help="observation rule for controller search, first match wins (default: 'true -> any')")
    p.add_argument("--node-cap", type=int, default=10 ** 7)
    p.add_argument("--time-cap", type=float, help="seconds")
    p.add_argument("--no-prune", action="store_true", help="disable value-bound pruning (total order only)")
    p.set_defaults(func=cmd_exists)

    p = sub.add_parser("gen", help="generate a reduction instance")
    p.add_argument("kind", choices=["majsat", "tm"])
    p.add_argument("--cnf", default="demo.cnf")
    p.add_argument("--tm", default="parity.tm")
    p.add_argument("--input", default="", help="TM input string")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--stem")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("convert", help="compile PSO actions to transition circuits")
    with_domain(p)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--stem")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("extensions", help="list linear extensions of a partial-order plan")
    p.add_argument("--plan", required=True)
    p.set_defaults(func=cmd_extensions)
    return parser


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    try:
        return args.func(args, out, err)
    except (SolverCapError, EnumerationCapError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_CAP
    except (_Usage, PPEvalError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
