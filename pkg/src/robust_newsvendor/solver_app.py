#!/usr/bin/env python3
"""
鲁棒报童模型命令行入口

Exit codes: 0 ok, 1 usage or solver error, 2 unreadable instance,
3 schema error, 4 infeasible moments.
"""

import argparse
import json
import math
import os
import sys
import tempfile
from pathlib import Path
from typing import List, Optional

import pandas as pd

from robust_newsvendor.config import config
from robust_newsvendor.core.knapsack import (
    knapsack_allocate,
    lower_bound_policy,
    piece_reached,
    upper_coefficients,
)
from robust_newsvendor.errors import (
    InfeasibleMomentsError,
    InstanceFileError,
    MissingParameterError,
    NewsvendorError,
    UsageError,
)
from robust_newsvendor.evaluation.sweep import (
    MARKUPS,
    ExperimentConfig,
    complete_moments,
    evaluate_budget,
    sweep_instance,
    unconstrained_budget,
)
from robust_newsvendor.extensions.cvar import cvar_robust_policy
from robust_newsvendor.extensions.multi_constraint import multi_constraint_policy
from robust_newsvendor.extensions.supply_yield import yield_robust_policy
from robust_newsvendor.instance_file import LoadedInstance, dump_instance, load_instance
from robust_newsvendor.lp.simplex import LE
from robust_newsvendor.logger import logger


USAGE_ERROR = 1


class SolverArgumentParser(argparse.ArgumentParser):
    """argparse exits with 2 on bad flags; usage errors here map to exit code 1"""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _num(x: Optional[float]) -> Optional[float]:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return None
    return float(f"{x:.{config.OUTPUT_DIGITS}g}")


def _emit(payload: dict) -> None:
    print(json.dumps(payload, ensure_ascii=False, indent=2))


def _write_csv(df: pd.DataFrame, out: Optional[str]) -> None:
    """写 CSV：先写临时文件再原子替换"""
    float_format = f"%.{config.OUTPUT_DIGITS}g"
    if not out:
        df.to_csv(sys.stdout, index=False, float_format=float_format)
        return
    target = Path(out)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            df.to_csv(f, index=False, float_format=float_format)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    logger.info(f"wrote {len(df)} rows to {target}")


def _budget(args, loaded: LoadedInstance) -> float:
    budget = args.budget if args.budget is not None else loaded.record.budget
    if budget is None:
        raise InstanceFileError("budget required (use --budget or the instance 'budget' field)", InstanceFileError.SCHEMA)
    if budget < 0:
        raise InstanceFileError("budget must be nonnegative", InstanceFileError.SCHEMA)
    return float(budget)


def _policy_payload(policy, pwls=None) -> dict:
    items = []
    for i, q in enumerate(policy.q):
        entry = {"item": i, "q": _num(q)}
        if pwls is not None:
            entry["piece"] = piece_reached(pwls[i], q)
        items.append(entry)
    return {
        "policy": policy.provenance,
        "objective": _num(policy.objective),
        "spent": _num(policy.spent),
        "items": items,
    }


def cmd_validate(args) -> int:
    loaded = load_instance(args.instance)
    if args.echo:
        print(dump_instance(loaded.record))
    else:
        _emit({"ok": True, "items": loaded.instance.n, "notes": loaded.notes})
    return 0


def cmd_solve(args) -> int:
    loaded = load_instance(args.instance, require_beta=args.lower)
    instance = loaded.instance.with_budget(_budget(args, loaded))
    logger.info(f"solving {instance.n} items at budget {instance.budget:g}")
    upper = knapsack_allocate(instance)
    payload = {"budget": _num(instance.budget)}
    payload.update(_policy_payload(upper, upper_coefficients(instance)))
    if args.lower:
        lower = lower_bound_policy(instance)
        payload["lower"] = _policy_payload(lower)
        payload["interval"] = [_num(lower.objective), _num(upper.objective)]
    _emit(payload)
    return 0


def _experiment(args) -> ExperimentConfig:
    return ExperimentConfig(
        case=args.case if args.case is not None else 1,
        margin=args.margin,
        n=args.n,
        grid_points=args.grid or config.GRID_POINTS,
        seed=args.seed if args.seed is not None else config.SEED,
    )


def _sweep_inputs(args):
    """Instance and ground truths from a file, or from a built-in experiment"""
    if args.instance:
        loaded = load_instance(args.instance)
        if not loaded.has_ground_truths:
            raise InstanceFileError("every item needs a ground_truth for sweep/evaluate", InstanceFileError.SCHEMA)
        return loaded, loaded.instance, loaded.ground_truths
    instance, dists = _experiment(args).build()
    return None, instance, dists


def cmd_sweep(args) -> int:
    loaded, instance, dists = _sweep_inputs(args)
    budgets = None
    grid = args.grid
    if loaded is not None:
        budgets = loaded.record.budget_grid if args.grid is None else None
        grid = grid or loaded.record.options.grid_points
    df = sweep_instance(instance, dists, grid_points=grid or config.GRID_POINTS, budgets=budgets)
    _write_csv(df, args.out)
    return 0


def cmd_evaluate(args) -> int:
    loaded, instance, dists = _sweep_inputs(args)
    instance = complete_moments(instance, dists)
    if args.budget is not None:
        budget = args.budget
    elif loaded is not None and loaded.record.budget is not None:
        budget = loaded.record.budget
    else:
        budget = unconstrained_budget(instance, dists)
    rows = pd.DataFrame(evaluate_budget(instance, dists, float(budget)))
    policies = []
    for tag, group in rows.groupby("policy", sort=False):
        first = group.iloc[0]
        policies.append(
            {
                "policy": tag,
                "q": [_num(q) for q in group["q"]],
                "cost_upper": _num(first["cost_upper"]),
                "cost_lower": _num(first["cost_lower"]),
                "cost_true": _num(first["cost_true"]),
                "evai": _num(first["evai"]),
            }
        )
    _emit({"budget": _num(float(budget)), "policies": policies})
    return 0


def cmd_ext_multi(args) -> int:
    loaded = load_instance(args.instance)
    items = loaded.instance.items
    weights, budgets = [], []
    budget = args.budget if args.budget is not None else loaded.record.budget
    if budget is not None:
        weights.append([item.econ.c for item in items])
        budgets.append(float(budget))
    for con in loaded.record.options.extra_constraints or []:
        weights.append(con.weights)
        budgets.append(con.budget)
    if not budgets:
        raise InstanceFileError("ext-multi needs a budget or options.extra_constraints", InstanceFileError.SCHEMA)
    result = multi_constraint_policy(items, list(zip(*weights)), budgets)
    payload = {"status": result.status, "senses": [LE] * len(budgets), "budgets": [_num(b) for b in budgets]}
    if result.policy is not None:
        payload.update(_policy_payload(result.policy))
        payload["shadow_prices"] = [_num(float(p)) for p in result.shadow_prices]
    _emit(payload)
    return 0


def cmd_ext_yield(args) -> int:
    loaded = load_instance(args.instance)
    if loaded.yields is None:
        raise InstanceFileError("ext-yield needs options.yields", InstanceFileError.SCHEMA)
    budget = _budget(args, loaded)
    policy = yield_robust_policy(loaded.instance.items, loaded.yields, budget)
    payload = {"budget": _num(budget), "status": policy.extra.get("status")}
    payload.update(_policy_payload(policy))
    _emit(payload)
    return 0


def cmd_ext_cvar(args) -> int:
    loaded = load_instance(args.instance)
    budget = _budget(args, loaded)
    gamma = args.gamma if args.gamma is not None else (loaded.record.options.gamma or 0.0)
    result = cvar_robust_policy(loaded.instance.items, budget, gamma)
    payload = {"budget": _num(budget), "gamma": gamma, "status": result.status, "scenarios": result.scenarios}
    payload.update(_policy_payload(result.policy))
    payload["theta"] = _num(result.theta)
    _emit(payload)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = SolverArgumentParser(prog="robust-nv", description="Robust multi-item newsvendor solver")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="校验实例文件")
    p.add_argument("instance")
    p.add_argument("--echo", action="store_true", help="print the normalized instance JSON")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("solve", help="鲁棒订货策略")
    p.add_argument("instance")
    p.add_argument("--budget", type=float)
    p.add_argument("--lower", action="store_true", help="also solve the best-case model and report the interval")
    p.set_defaults(func=cmd_solve)

    for name, func, help_text in (
        ("sweep", cmd_sweep, "预算扫描，输出 CSV"),
        ("evaluate", cmd_evaluate, "EVAI of every policy at one budget"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("instance", nargs="?", help="instance with ground truths; omit to run a built-in case")
        p.add_argument("--case", type=int, choices=range(0, 10))
        p.add_argument("--margin", choices=sorted(MARKUPS), default="low")
        p.add_argument("--n", type=int, default=25)
        p.add_argument("--grid", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--budget", type=float)
        p.add_argument("--out")
        p.set_defaults(func=func)

    p = sub.add_parser("ext-multi", help="multiple resource constraints")
    p.add_argument("instance")
    p.add_argument("--budget", type=float)
    p.set_defaults(func=cmd_ext_multi)

    p = sub.add_parser("ext-yield", help="multiplicative supply yield")
    p.add_argument("instance")
    p.add_argument("--budget", type=float)
    p.set_defaults(func=cmd_ext_yield)

    p = sub.add_parser("ext-cvar", help="worst-case CVaR")
    p.add_argument("instance")
    p.add_argument("--budget", type=float)
    p.add_argument("--gamma", type=float)
    p.set_defaults(func=cmd_ext_cvar)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(str(e), file=sys.stderr)
        return USAGE_ERROR
    except SystemExit as e:
        return int(e.code or 0)

    try:
        return args.func(args)
    except InstanceFileError as e:
        logger.error(str(e))
        print(str(e), file=sys.stderr)
        return e.exit_code
    except (NewsvendorError, ValueError) as e:
        logger.error(str(e))
        print(str(e), file=sys.stderr)
        if isinstance(e, MissingParameterError):
            return InstanceFileError.SCHEMA
        if isinstance(e, InfeasibleMomentsError):
            return InstanceFileError.MOMENTS
        return USAGE_ERROR
    except Exception as e:
        logger.error(f"robust-nv {args.command} failed: {e}", exc_info=True)
        raise


if __name__ == "__main__":
    sys.exit(main())
