"""Command-line front end.

Exit status: 0 success, 2 usage error (bad flags, malformed files,
out-of-range values), 3 budget/limit errors (monomial budget,
enumeration budget).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from . import agreement, circuit as circuit_mod, sensitivity as sens_mod, solver as solver_mod
from . import threefish as tf
from .anf import MonomialBudgetError
from .circuit import CircuitError
from .solver import BudgetExceededError
from .words import Word, carry_array, trunc_carry_array

USAGE_ERROR = 2
BUDGET_ERROR = 3


class UsageError(Exception):
    pass


def _word(s: str) -> int:
    try:
        return int(s, 16) if s.lower().startswith("0x") else int(s, 10)
    except ValueError:
        raise UsageError(f"bad numeric value {s!r}") from None


def _words(s: str, count: int | None, what: str) -> tuple[int, ...]:
    vals = tuple(_word(t) for t in s.split(",") if t.strip() != "")
    if count is not None and len(vals) != count:
        raise UsageError(f"{what} needs {count} comma-separated words, got {len(vals)}")
    return vals


def _m_range(s: str) -> list[int]:
    if ":" in s:
        lo, _, hi = s.partition(":")
        return list(range(_word(lo), _word(hi) + 1))
    return [_word(t) for t in s.split(",")]


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _load_circuit(path: str):
    return circuit_mod.parse_circuit(_read(path))


def _opt_m(args) -> int | None:
    return args.m


# -- subcommand handlers -------------------------------------------------------


def _cmd_prob_table(args) -> int:
    print(agreement.table1(args.lo, args.hi).render(args.digits))
    return 0


def _cmd_prob_pi(args) -> int:
    p = agreement.pi(args.m, args.n)
    if args.exact:
        print(p)
    else:
        print(p.percent_str(args.digits))
    return 0


def _cmd_prob_expected(args) -> int:
    base = args.rounded_pi
    if base == "auto":  # bare --rounded-pi: round the exact base to 5 decimals
        base = round(float(agreement.pi(args.m, args.n)), 5)
    elif base is not None:
        base = float(base)
    print(repr(agreement.expected_match(args.m, args.n, args.adds, rounded_pi=base)))
    return 0


def _cmd_trunc_add(args) -> int:
    n, m = args.n, args.m
    x = Word(_word(args.x), n)
    y = Word(_word(args.y), n)
    result = int(x) ^ int(y) ^ trunc_carry_array(x, y, m).value
    full = (int(x) + int(y)) & ((1 << n) - 1)
    ct = list(reversed(trunc_carry_array(x, y, m).bits))
    cf = list(reversed(carry_array(x, y).bits))
    print(f"x {int(x):#x}")
    print(f"y {int(y):#x}")
    print(f"result {result:#x}")
    print(f"full {full:#x}")
    print(f"carry_trunc {ct}")
    print(f"carry_full {cf}")
    print(f"agree {'true' if result == full else 'false'}")
    return 0


def _cmd_circuit_eval(args) -> int:
    c = _load_circuit(args.file)
    inputs = _words(args.inputs, len(c.inputs), "--inputs") if args.inputs else ()
    if len(inputs) != len(c.inputs):
        raise UsageError(f"circuit takes {len(c.inputs)} input words (use --inputs)")
    outputs, adds = circuit_mod.eval_concrete(c, inputs, _opt_m(args))
    print("outputs " + " ".join(f"{w:#x}" for w in outputs))
    print(f"add_count {adds}")
    return 0


def _cmd_circuit_degree(args) -> int:
    c = _load_circuit(args.file)
    print(f"degree {circuit_mod.circuit_degree(c, _opt_m(args))}")
    return 0


def _cmd_circuit_encode(args) -> int:
    c = _load_circuit(args.file)
    polys = circuit_mod.eval_symbolic(c, _opt_m(args))
    system = circuit_mod.PolySystem(
        c.input_bits, tuple(polys), "encoding", c.digest()
    )
    Path(args.out).write_text(circuit_mod.export_system(system))
    print(f"wrote {args.out}")
    return 0


def _cmd_system(args) -> int:
    c = _load_circuit(args.file)
    if args.kind == "collision":
        system = circuit_mod.build_collision_system(c, _opt_m(args))
    else:
        if not args.target:
            raise UsageError("preimage systems need --target")
        target = _words(args.target, len(c.outputs), "--target")
        system = circuit_mod.build_preimage_system(c, target, _opt_m(args))
    Path(args.out).write_text(circuit_mod.export_system(system))
    print(f"wrote {args.out}")
    return 0


def _cmd_solve(args) -> int:
    system = circuit_mod.parse_system(_read(args.system))
    budget = solver_mod.SolveBudget(
        max_vars=args.budget,
        time_limit=args.time_limit,
        max_solutions=args.max_solutions,
    )
    res = solver_mod.solve(system, budget, args.mode, args.nontrivial)
    for a in res.solutions:
        print(f"{a:#x}")
    print(f"count {res.count}")
    print(f"complete {'true' if res.complete else 'false'}")
    return 0


def _params(args) -> tf.ThreefishParams:
    return tf.ThreefishParams(args.n, args.rounds, args.m, args.scope)


def _cmd_tf_encrypt(args) -> int:
    params = _params(args)
    key = _words(args.key, 4, "--key")
    tweak = _words(args.tweak, 2, "--tweak")
    block = _words(args.block, 4, "--block")
    ct, adds = tf.threefish_encrypt(key, tweak, block, params)
    print("ciphertext " + " ".join(f"{w:#x}" for w in ct))
    print(f"add_count {adds}")
    return 0


def _cmd_tf_circuit(args) -> int:
    params = _params(args)
    key = _words(args.key, 4, "--key")
    tweak = _words(args.tweak, 2, "--tweak")
    c = tf.build_threefish_circuit(
        params, include_schedule=args.include_schedule, key=key, tweak=tweak
    )
    Path(args.out).write_text(circuit_mod.render_circuit(c))
    print(f"wrote {args.out}")
    return 0


def _cmd_tf_ideal(args) -> int:
    params = _params(args)
    need = tf.n_subkeys(args.rounds)
    if args.subkey:
        if len(args.subkey) != need:
            raise UsageError(f"{args.rounds} rounds need {need} --subkey flags")
        subkeys = [_words(s, 4, "--subkey") for s in args.subkey]
    else:
        key = _words(args.key, 4, "--key")
        tweak = _words(args.tweak, 2, "--tweak")
        subkeys = list(tf.key_schedule(key, tweak, tf.ThreefishParams(
            args.n, args.rounds, args.m, args.scope)).subkeys)
    target = _words(args.target, 4, "--target") if args.target else None
    system = tf.skein_ideal(args.kind, params, args.rounds, subkeys, target)
    Path(args.out).write_text(circuit_mod.export_system(system))
    print(f"wrote {args.out}")
    return 0


def _cmd_sensitivity(args) -> int:
    if args.algo == "skein256":
        h = sens_mod.SkeinCompression()
    elif args.algo.startswith("circuit:"):
        path = args.algo.split(":", 1)[1]
        h = sens_mod.CircuitHash(_load_circuit(path), label=Path(path).name)
    else:
        raise UsageError(f"unknown --algo {args.algo!r} (skein256 or circuit:<file>)")
    m_range = _m_range(args.m_range) if args.m_range else None
    report = sens_mod.sensitivity_report(
        h,
        threshold=args.threshold,
        trials=args.trials,
        seed=args.seed,
        m_range=m_range,
        workers=args.workers,
        exhaustive=args.exhaustive,
    )
    sys.stdout.write(report.render())
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="truncarx",
        description="Carry-truncated addition toolkit for ARX ciphers and hashes",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    prob = sub.add_parser("prob", help="exact agreement probabilities")
    prob_sub = prob.add_subparsers(dest="prob_command", required=True)
    p = prob_sub.add_parser("table", help="agreement table for N=32/64")
    p.add_argument("--lo", type=int, default=4)
    p.add_argument("--hi", type=int, default=16)
    p.add_argument("--digits", type=int, default=5)
    p.set_defaults(func=_cmd_prob_table)
    p = prob_sub.add_parser("pi", help="single agreement probability")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--digits", type=int, default=5)
    p.add_argument("--exact", action="store_true", help="print num/2^exp instead")
    p.set_defaults(func=_cmd_prob_pi)
    p = prob_sub.add_parser("expected", help="independence-predicted match rate")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--adds", type=int, required=True)
    p.add_argument("--rounded-pi", nargs="?", const="auto", default=None,
                   metavar="BASE",
                   help="use BASE as the probability (bare flag: exact base "
                        "rounded to 5 decimals)")
    p.set_defaults(func=_cmd_prob_expected)

    p = sub.add_parser("trunc-add", help="one truncated addition with carry arrays")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("x")
    p.add_argument("y")
    p.set_defaults(func=_cmd_trunc_add)

    circ = sub.add_parser("circuit", help="evaluate/inspect circuit files")
    circ_sub = circ.add_subparsers(dest="circuit_command", required=True)
    p = circ_sub.add_parser("eval", help="concrete evaluation")
    p.add_argument("--file", required=True)
    p.add_argument("--m", type=int, default=None, help="override every ADD's m")
    p.add_argument("--inputs", default="", help="comma-separated input words")
    p.set_defaults(func=_cmd_circuit_eval)
    p = circ_sub.add_parser("degree", help="max degree of the encoding polynomials")
    p.add_argument("--file", required=True)
    p.add_argument("--m", type=int, default=None)
    p.set_defaults(func=_cmd_circuit_degree)
    p = circ_sub.add_parser("encode", help="export output-bit ANF polynomials")
    p.add_argument("--file", required=True)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_circuit_encode)

    p = sub.add_parser("system", help="build collision/preimage systems")
    p.add_argument("kind", choices=("collision", "preimage"))
    p.add_argument("--file", required=True)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--target", default="", help="target words (preimage)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_system)

    p = sub.add_parser("solve", help="brute-force an exported system")
    p.add_argument("--system", required=True)
    p.add_argument("--mode", choices=("all", "first", "count"), default="all")
    p.add_argument("--budget", type=int, default=28, help="max enumerable variables")
    p.add_argument("--max-solutions", type=int, default=None)
    p.add_argument("--time-limit", type=float, default=None)
    p.add_argument("--nontrivial", action="store_true",
                   help="exclude the diagonal of a collision system")
    p.set_defaults(func=_cmd_solve)

    tfp = sub.add_parser("threefish", help="Threefish-256 with truncated addition")
    tf_sub = tfp.add_subparsers(dest="threefish_command", required=True)

    def tf_common(p):
        p.add_argument("--n", type=int, default=64)
        p.add_argument("--rounds", type=int, default=72)
        p.add_argument("--m", type=int, default=None)
        p.add_argument("--scope", choices=("all", "mix"), default="all")

    p = tf_sub.add_parser("encrypt", help="encrypt one block")
    tf_common(p)
    p.add_argument("--key", default="0,0,0,0")
    p.add_argument("--tweak", default="0,0")
    p.add_argument("--block", default="0,0,0,0")
    p.set_defaults(func=_cmd_tf_encrypt)
    p = tf_sub.add_parser("circuit", help="emit the cipher as a circuit file")
    tf_common(p)
    p.add_argument("--key", default="0,0,0,0")
    p.add_argument("--tweak", default="0,0")
    p.add_argument("--include-schedule", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_tf_circuit)
    p = tf_sub.add_parser("ideal", help="collision/preimage polynomial system")
    p.add_argument("kind", choices=("collision", "preimage"))
    tf_common(p)
    p.add_argument("--subkey", action="append", default=[],
                   help="explicit subkey (4 words); repeat per injection")
    p.add_argument("--key", default="0,0,0,0")
    p.add_argument("--tweak", default="0,0")
    p.add_argument("--target", default="", help="target words (preimage)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_tf_ideal)

    p = sub.add_parser("sensitivity", help="match-rate table and sensitivity")
    p.add_argument("--algo", required=True, help="skein256 or circuit:<file>")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--m-range", default="", help="lo:hi inclusive, or m1,m2,...")
    p.add_argument("--threshold", type=float, default=0.001)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--exhaustive", action="store_true",
                   help="enumerate every message (small circuit hashes)")
    p.set_defaults(func=_cmd_sensitivity)

    return ap


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else USAGE_ERROR
    try:
        return args.func(args)
    except (MonomialBudgetError, BudgetExceededError) as e:
        print(f"error: {e}", file=sys.stderr)
        return BUDGET_ERROR
    except (UsageError, CircuitError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
