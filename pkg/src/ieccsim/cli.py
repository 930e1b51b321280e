"""Command-line harness: run sessions, sweep budgets, generate attacks,
manage codebooks.

Exit status: 0 success, 2 configuration error, 3 attack-generator error,
4 codebook construction failure.  Rational quantities are written as p/q so
thresholds stay exact end to end.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace as dc_replace
from fractions import Fraction

import numpy as np

from . import adversaries as adv
from .channel import (
    InvalidConfig,
    SessionConfig,
    describe_result,
    make_schedule,
    enumerate_inputs,
    run_session,
    write_trace,
)
from .codebook import (
    ConstructionFailed,
    build_codebook,
    read_codebook,
    save_codebook,
    verify_distance,
)
from .rationals import fraction_str, parse_fraction
from .words import bits_str, constant_word, parse_bits

DEFAULTS = {
    "611": {"n": 3, "epsilon": Fraction(1, 2), "m": 64},
    "35": {"n": 2, "epsilon": Fraction(1, 2), "m": 32},
}


def _read_config_file(path: str) -> dict:
    values = {}
    with open(path, encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            values[key.strip()] = value.strip()
    return values


def _merged(args: argparse.Namespace, key: str, file_values: dict, default=None):
    """Flag value if given, else config-file value, else default."""
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    if key in file_values:
        return file_values[key]
    return default


def _session_config(args, file_values) -> SessionConfig:
    protocol = str(_merged(args, "protocol", file_values))
    if protocol not in DEFAULTS:
        raise InvalidConfig(f"unknown protocol {protocol!r}")
    base = DEFAULTS[protocol]
    n = int(_merged(args, "n", file_values, base["n"]))
    eps = _merged(args, "epsilon", file_values, base["epsilon"])
    if isinstance(eps, str):
        eps = parse_fraction(eps)
    m = int(_merged(args, "m", file_values, base["m"]))
    seed = int(_merged(args, "seed", file_values, 0))
    code_eps = _merged(args, "code_epsilon", file_values, Fraction(1, 8))
    if isinstance(code_eps, str):
        code_eps = parse_fraction(code_eps)
    cb_seed = int(_merged(args, "codebook_seed", file_values, 7))
    return SessionConfig(
        protocol=protocol, n=n, epsilon=eps, M=m, input_x=bytes(n),
        seed=seed, code_epsilon=code_eps, codebook_seed=cb_seed,
    )


def _inputs_for(args, file_values, cfg: SessionConfig) -> list[bytes]:
    x = _merged(args, "x", file_values)
    mode = _merged(args, "inputs", file_values)
    if x is not None:
        word = parse_bits(x)
        if len(word) != cfg.n:
            raise InvalidConfig("--x length must equal n")
        return [word]
    if mode is None or mode == "all":
        return enumerate_inputs(cfg.n)
    if mode.startswith("sample:"):
        count = int(mode.split(":", 1)[1])
        rng = np.random.default_rng(cfg.seed)
        pool = enumerate_inputs(cfg.n)
        idx = sorted(rng.choice(len(pool), size=min(count, len(pool)), replace=False).tolist())
        return [pool[i] for i in idx]
    raise InvalidConfig(f"unknown input mode {mode!r}")


def _adversary_for(args, file_values, cfg):
    name = _merged(args, "adversary", file_values, "null")
    if name == "null":
        return adv.strategy_null()
    if name == "random":
        budget = _merged(args, "budget", file_values, "0")
        if isinstance(budget, str):
            budget = parse_fraction(budget)
        return adv.strategy_random(budget, cfg.seed)
    if name.startswith("plan:"):
        with open(name[5:], encoding="ascii") as fh:
            return adv.AttackPlan.from_jsonl(fh.read()).adversary()
    raise InvalidConfig(f"unknown adversary {name!r}")


def _trace_path(args, file_values) -> str | None:
    path = _merged(args, "trace", file_values)
    if path is None:
        return None
    trace_dir = os.environ.get("IECC_TRACE_DIR")
    if trace_dir and not os.path.isabs(path):
        return os.path.join(trace_dir, path)
    return path


def cmd_run(args) -> int:
    file_values = _read_config_file(args.config) if args.config else {}
    cfg = _session_config(args, file_values)
    inputs = _inputs_for(args, file_values, cfg)
    trace_path = _trace_path(args, file_values)
    all_ok = True
    for k, x in enumerate(inputs):
        session_cfg = dc_replace(cfg, input_x=x)
        adversary = _adversary_for(args, file_values, session_cfg)
        result = run_session(session_cfg, adversary)
        print(f"x={bits_str(x)} {describe_result(result)}")
        if trace_path:
            path = trace_path if len(inputs) == 1 else f"{trace_path}.{k}"
            write_trace(result.trace, path)
        if not result.success or result.invariant_violations:
            all_ok = False
    return 0 if all_ok else 1


def _parse_grid(spec: str) -> list[Fraction]:
    parts = spec.split(":")
    if len(parts) == 1:
        return [parse_fraction(parts[0])]
    start, stop, step = (parse_fraction(p) for p in parts)
    if step <= 0:
        raise InvalidConfig("step must be positive")
    grid = []
    value = start
    while value <= stop:
        grid.append(value)
        value += step
    if not grid:
        raise InvalidConfig("empty budget grid")
    return grid


def cmd_sweep(args) -> int:
    file_values = _read_config_file(args.config) if args.config else {}
    cfg = _session_config(args, file_values)
    inputs = _inputs_for(args, file_values, cfg)
    grid = _parse_grid(_merged(args, "budgets", file_values, "0"))
    reps = int(_merged(args, "reps", file_values, 1))
    schedule = make_schedule(cfg)
    menu = adv.search_menu(cfg)
    lines = ["budget,runs,failures,violations,mean_fraction"]
    for budget in grid:
        runs = failures = violations = 0
        fractions_sum = Fraction(0)
        for rep in range(reps):
            for k, x in enumerate(inputs):
                session_cfg = dc_replace(cfg, input_x=x)
                random_adv = adv.strategy_random(budget, cfg.seed + 1000 * rep + k)
                rng = np.random.default_rng([cfg.seed, rep, k])
                # Attack a chunk with probability equal to the budget point,
                # so the action adversary's aggression scales with the grid.
                actions = []
                for _ in range(schedule.chunk_count):
                    attack = rng.integers(0, budget.denominator) < budget.numerator
                    if attack:
                        actions.append(menu[int(rng.integers(0, len(menu) - 1))])
                    else:
                        actions.append(adv.ChunkAction("pass"))
                for adversary in (random_adv, adv.apply_chunk_actions(actions)):
                    result = run_session(session_cfg, adversary, want_trace=False)
                    runs += 1
                    failures += 0 if result.success else 1
                    violations += len(result.invariant_violations)
                    fractions_sum += result.total_erasure_fraction
        mean = fractions_sum / runs if runs else Fraction(0)
        lines.append(
            f"{fraction_str(budget)},{runs},{failures},{violations},{fraction_str(mean)}"
        )
    text = "\n".join(lines) + "\n"
    out = _merged(args, "out", file_values)
    if out:
        with open(out, "w", encoding="ascii") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_attack(args) -> int:
    file_values = _read_config_file(args.config) if args.config else {}
    if args.kind == "confusion":
        cfg = _session_config(args, file_values)
        plan, verdict = adv.erasure_confusion_attack(cfg)
        if args.out:
            with open(args.out, "w", encoding="ascii") as fh:
                fh.write(plan.to_jsonl())
        print(
            f"confusion pair=({verdict.pair[0]},{verdict.pair[1]}) "
            f"views_identical={verdict.views_identical} "
            f"cost={fraction_str(verdict.cost_fraction)} "
            f"bound={fraction_str(verdict.bound)} "
            f"within_bound={verdict.within_bound} fooled={verdict.fooled}"
        )
        return 0
    if args.kind == "bitflip":
        n = int(_merged(args, "n", file_values, 3))
        proto = adv.strawman_bitflip_protocol(n)
        inputs = enumerate_inputs(n)[: args.count] if args.count else enumerate_inputs(n)
        result = adv.bitflip_attack_generate(proto, inputs)
        bound = result.bound_rounds
        within = min(result.cost_i, result.cost_j) <= bound + result.odd_split_slack
        print(
            f"bitflip pair={result.pair} cost_i={result.cost_i} cost_j={result.cost_j} "
            f"bound={fraction_str(bound)} slack={result.odd_split_slack} "
            f"views_identical={result.views_identical} within_bound={within}"
        )
        return 0
    if args.kind == "search":
        cfg = _session_config(args, file_values)
        budget = parse_fraction(_merged(args, "budget", file_values, "0"))
        method = _merged(args, "method", file_values, "exhaustive")
        plan = adv.attack_search(
            cfg, budget, method=method, beam_width=args.width, seed=cfg.seed
        )
        if plan is None:
            print(f"search budget={fraction_str(budget)} fooling_plan=none "
                  "(evidence only, not a proof of resilience)")
        else:
            if args.out:
                with open(args.out, "w", encoding="ascii") as fh:
                    fh.write(plan.to_jsonl())
            print(f"search budget={fraction_str(budget)} fooling_plan=found "
                  f"cost={plan.total_cost} description={plan.description!r}")
        return 0
    raise InvalidConfig(f"unknown attack kind {args.kind!r}")


def cmd_codebook(args) -> int:
    if args.action == "build":
        forbidden = ()
        if args.forbid_constants:
            forbidden = (constant_word(0, args.length), constant_word(1, args.length))
        cb = build_codebook(
            args.count, args.length, parse_fraction(args.epsilon),
            forbidden=forbidden, seed=args.seed,
        )
        save_codebook(cb, args.file)
        print(f"built count={cb.count} length={cb.length} "
              f"epsilon={fraction_str(cb.epsilon)} seed={cb.seed}")
        return 0
    cb = read_codebook(args.file)
    if args.action == "verify":
        mode = args.triple or "auto"
        report = verify_distance(cb, mode, args.samples, args.sample_seed)
        print(
            f"min_pairwise={report.min_pairwise} min_forbidden={report.min_forbidden} "
            f"max_triple_overlap={report.max_triple_overlap} "
            f"triple_samples={report.triple_samples} certified={report.certified}"
        )
        return 0
    if args.action == "show":
        for w in cb.words:
            print(bits_str(w))
        return 0
    raise InvalidConfig(f"unknown codebook action {args.action!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ieccsim")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_session_flags(p):
        p.add_argument("--protocol", choices=("611", "35"))
        p.add_argument("--n", type=int)
        p.add_argument("--epsilon", type=parse_fraction)
        p.add_argument("--m", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--code-epsilon", dest="code_epsilon", type=parse_fraction)
        p.add_argument("--codebook-seed", dest="codebook_seed", type=int)
        p.add_argument("--config")

    p_run = sub.add_parser("run", help="run sessions and print verdicts")
    add_session_flags(p_run)
    p_run.add_argument("--x")
    p_run.add_argument("--inputs")
    p_run.add_argument("--adversary")
    p_run.add_argument("--budget")
    p_run.add_argument("--trace")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="budget sweep, CSV summary")
    add_session_flags(p_sweep)
    p_sweep.add_argument("--x")
    p_sweep.add_argument("--inputs")
    p_sweep.add_argument("--budgets")
    p_sweep.add_argument("--reps")
    p_sweep.add_argument("--out")
    p_sweep.set_defaults(func=cmd_sweep)

    p_attack = sub.add_parser("attack", help="attack generators")
    p_attack.add_argument("kind", choices=("confusion", "bitflip", "search"))
    add_session_flags(p_attack)
    p_attack.add_argument("--budget")
    p_attack.add_argument("--method")
    p_attack.add_argument("--width", type=int, default=16)
    p_attack.add_argument("--count", type=int)
    p_attack.add_argument("--out")
    p_attack.set_defaults(func=cmd_attack)

    p_cb = sub.add_parser("codebook", help="build/verify/show codebook files")
    p_cb.add_argument("action", choices=("build", "verify", "show"))
    p_cb.add_argument("file")
    p_cb.add_argument("--count", type=int, default=32)
    p_cb.add_argument("--length", type=int, default=256)
    p_cb.add_argument("--epsilon", default="1/5")
    p_cb.add_argument("--seed", type=int, default=7)
    p_cb.add_argument("--forbid-constants", action="store_true")
    p_cb.add_argument("--triple", choices=("auto", "exhaustive", "sampled"))
    p_cb.add_argument("--samples", type=int, default=20000)
    p_cb.add_argument("--sample-seed", type=int, default=0)
    p_cb.set_defaults(func=cmd_codebook)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (adv.SearchSpaceTooLarge, adv.NonDeterministicMachine) as exc:
        print(f"attack generator error: {exc}", file=sys.stderr)
        return 3
    except ConstructionFailed as exc:
        print(f"codebook construction failed: {exc}", file=sys.stderr)
        return 4
    except (InvalidConfig, ValueError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
