"""Command-line front end: build systems, measure speed, run the constructions."""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from typing import Callable, Sequence

from .core import Alphabet, FactorMap, Pattern, SftDef, SftError, dumps_sft, loads_sft, scale_speed_down, scale_speed_up
from .lang import ORACLES, EffectiveOracle, FullShiftOracle, GoldenMeanOracle, TruncatedListOracle, check_follower_bound, follower_sets, get_oracle
from .speed import NotARealization, measure_phi, profile
from .strip import BudgetExceeded, language_at
from .tm import FIXTURES, EnumerationBudgetExceeded, TmSpec, loads_tm, measure_enum_complexity

EXIT_OK, EXIT_ERROR, EXIT_BUDGET = 0, 1, 2

BINARY = Alphabet(("0", "1"))


def _fullshift():
    return SftDef(2, BINARY, ()), FactorMap.identity(BINARY), FullShiftOracle(BINARY)


def _golden():
    # no two horizontally adjacent 1s; rows are independent
    one = BINARY.index("1")
    sft = SftDef(2, BINARY, (Pattern.from_mapping({(0, 0): one, (1, 0): one}),))
    return sft, FactorMap.identity(BINARY), GoldenMeanOracle(BINARY)


def _example(name: str) -> Callable:
    def build():
        from .constructions import examples

        return getattr(examples, name)()

    return build


# name -> () -> (sft, factor, default oracle)
SYSTEMS: dict[str, Callable] = {
    "example21": _example("build_example_21"),
    "counter": _example("build_counter_tileset"),
    "palindrome": _example("build_palindrome_tileset"),
    "fullshift": _fullshift,
    "golden": _golden,
}


@dataclass
class ExperimentSpec:
    system: str | None = None
    sft_path: str | None = None
    oracle: str | None = None
    k_min: int = 1
    k_max: int = 1
    n_budget: int = 8
    out: str | None = None
    threads: int = 1
    truncation: int | None = None

    def validate(self) -> None:
        if self.system is not None and self.sft_path is not None:
            raise SftError("give either --system or --sft, not both")
        if self.system is not None and self.system not in SYSTEMS:
            raise SftError(f"unknown system {self.system!r}; choose from {', '.join(sorted(SYSTEMS))}")
        if self.sft_path is not None and not os.path.isfile(self.sft_path):
            raise SftError(f"{self.sft_path}: no such file")
        for flag, v in (("--k", self.k_min), ("--kmax", self.k_max), ("--n-budget", self.n_budget), ("--threads", self.threads)):
            if v < 1 and not (flag == "--n-budget" and v == 0):
                raise SftError(f"{flag} must be positive, got {v}")
        if self.k_min > self.k_max:
            raise SftError("--k must not exceed --kmax")
        if self.truncation is not None and self.truncation < 1:
            raise SftError("--truncation-K must be positive")

    def realization(self) -> tuple[SftDef, FactorMap, EffectiveOracle | None]:
        if self.system is not None:
            return SYSTEMS[self.system]()
        if self.sft_path is None:
            raise SftError("one of --system or --sft is required")
        sft, factor = _read_sft(self.sft_path)
        return sft, factor, None

    def resolve_oracle(self, default: EffectiveOracle | None, alphabet: Alphabet | None) -> EffectiveOracle | None:
        if self.oracle is None:
            return default
        return load_oracle(self.oracle, alphabet, self.truncation)


def _read_sft(path: str) -> tuple[SftDef, FactorMap]:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return loads_sft(text)
    except (SftError, KeyError, TypeError) as exc:
        raise SftError(f"{path}: {_message(exc)}") from None


def load_oracle(name: str, alphabet: Alphabet | None = None, truncation: int | None = None) -> EffectiveOracle:
    """A registered oracle, or a forbidden-word file (one word per line)."""
    if name in ORACLES:
        o = get_oracle(name)
        if alphabet is not None and o.alphabet != alphabet:
            try:
                o = type(o)(alphabet)
            except (KeyError, TypeError):
                raise SftError(f"oracle {name!r} does not fit the alphabet {list(alphabet.letters)}") from None
        return o
    if not os.path.isfile(name):
        raise SftError(f"unknown oracle {name!r}; choose from {', '.join(sorted(ORACLES))} or give a word-list file")
    with open(name, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if truncation is not None:
        lines = lines[:truncation]
    if alphabet is None:
        alphabet = Alphabet(tuple(sorted({ch for ln in lines for ch in ln})))
    try:
        words = [alphabet.parse(ln) for ln in lines]
    except KeyError as exc:
        raise SftError(f"{name}: {_message(exc)}") from None
    return TruncatedListOracle(alphabet, words, truncation if truncation is not None else len(words))


def _message(exc: BaseException) -> str:
    return exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _dump(doc) -> str:
    return json.dumps(doc, indent=1, sort_keys=True, ensure_ascii=False) + "\n"


def _spec(args: argparse.Namespace) -> ExperimentSpec:
    spec = ExperimentSpec(
        system=getattr(args, "system", None),
        sft_path=getattr(args, "sft", None),
        oracle=getattr(args, "oracle", None),
        k_min=getattr(args, "k", None) or 1,
        k_max=getattr(args, "kmax", None) or getattr(args, "k", None) or 1,
        n_budget=getattr(args, "n_budget", 8),
        out=getattr(args, "out", None),
        threads=getattr(args, "threads", 1),
        truncation=getattr(args, "truncation_K", None),
    )
    spec.validate()
    return spec


def _load_machine(ref: str) -> TmSpec:
    if ref in FIXTURES:
        return FIXTURES[ref]()
    if not os.path.isfile(ref):
        raise SftError(f"{ref}: no such machine file or fixture ({', '.join(sorted(FIXTURES))})")
    with open(ref, encoding="utf-8") as fh:
        return loads_tm(fh.read(), ref)


# ---------------------------------------------------------------------------
# commands


def cmd_build(args: argparse.Namespace) -> int:
    spec = _spec(args)
    sft, factor, _ = spec.realization()
    if args.scale_up:
        sft, factor = scale_speed_up(sft, factor, args.scale_up)
    if args.scale_down:
        sft, factor = scale_speed_down(sft, factor, args.scale_down)
    _write(dumps_sft(sft, factor), spec.out)
    return EXIT_OK


def cmd_phi(args: argparse.Namespace) -> int:
    spec = _spec(args)
    sft, factor, default = spec.realization()
    oracle = spec.resolve_oracle(default, factor.target)
    prof = profile(sft, factor, oracle, spec.k_max, spec.n_budget, k_min=spec.k_min, threads=spec.threads)
    _write(prof.to_csv(timings=args.timings), spec.out)
    if prof.budget_exceeded_at is not None:
        ex = prof.entries[-1].exceeded
        if ex is not None and ex.witness:
            note = f"{ex.reason}, {ex.witness_text!r} survives at n={ex.n_budget}"
        else:
            note = ex.reason if ex is not None else "budget"
        print(f"budget exceeded at k={prof.budget_exceeded_at}: {note}", file=sys.stderr)
        return EXIT_BUDGET
    return EXIT_OK


def cmd_lang(args: argparse.Namespace) -> int:
    spec = _spec(args)
    sft, factor, _ = spec.realization()
    lang = language_at(sft, factor, args.n, args.k)
    _write(lang.to_text(), spec.out)
    return EXIT_OK


def cmd_followers(args: argparse.Namespace) -> int:
    spec = _spec(args)
    sft = factor = None
    default = None
    if spec.system is not None or spec.sft_path is not None:
        sft, factor, default = spec.realization()
    oracle = spec.resolve_oracle(default, factor.target if factor is not None else None)
    if oracle is None:
        raise SftError("--oracle is required without a system")
    table = follower_sets(oracle, args.k1, args.k2)
    doc = {"oracle": oracle.metadata, "table": table.to_dict()}
    phi_value = args.phi
    if phi_value is None and sft is not None:
        got = measure_phi(sft, factor, oracle, args.k1 + args.k2, spec.n_budget)
        if not isinstance(got, int):
            raise BudgetExceeded("phi needed for the bound is not reached", spec.n_budget + 1, spec.n_budget)
        phi_value = got
    if phi_value is not None:
        doc["bound"] = check_follower_bound(table, phi_value, args.d, args.M).to_dict()
    _write(_dump(doc), spec.out)
    return EXIT_OK


def cmd_tm_enum(args: argparse.Namespace) -> int:
    m = _load_machine(args.tm)
    oracle = load_oracle(args.oracle)
    dtime, dspace = measure_enum_complexity(m, oracle, args.k, args.budget)
    _write(_dump({"machine": m.name, "oracle": oracle.name, "k": args.k, "dtime": dtime, "dspace": dspace}), args.out)
    return EXIT_OK


def cmd_compile_tm(args: argparse.Namespace) -> int:
    from .constructions.compiler import compile_quick_realization, quick_fixture

    m = _load_machine(args.tm)
    real = compile_quick_realization(m, args.w, fold=args.fold, max_letters=args.max_letters)
    sizes = real.sizes()
    if args.out:
        _write(_dump(real.to_dict()), args.out)
    lines = [f"machine {sizes['machine']}, periodic word {sizes['w']!r}"]
    lines += [f"layer {name}: {n} letters" for name, n in sizes["layers"].items()]
    lines.append(f"product alphabet: {sizes['product']} letters")
    lines += [f"family {name}: {n} forbidden patterns" for name, n in sizes["families"].items()]
    if args.fixture_row:
        cfg = quick_fixture(real, args.fixture_row)
        bad = real.check(cfg)
        lines.append(f"fixture: {len(bad)} violations")
    print("\n".join(lines))
    return EXIT_OK


def cmd_grid_check(args: argparse.Namespace) -> int:
    from .constructions.grid import check_grid_doubling

    height = args.height or 2 * args.runs + 1
    report = check_grid_doubling(height, args.runs)
    _write(report.render() + "\n", args.out)
    return EXIT_OK if report.ok else EXIT_ERROR


def cmd_hilbert(args: argparse.Namespace) -> int:
    from .constructions.hilbert import TILES, check_hilbert_path

    tile = None
    if args.tile:
        names = {t.name: t for t in TILES}
        if args.tile not in names:
            raise SftError(f"unknown tile {args.tile!r}; choose from {', '.join(names)}")
        tile = names[args.tile]
    report = check_hilbert_path(args.n, tile)
    _write(report.render() + "\n", args.out)
    return EXIT_OK if report.ok else EXIT_ERROR


# ---------------------------------------------------------------------------
# parser


def _source_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--system", help=f"built-in system ({', '.join(SYSTEMS)})")
    g.add_argument("--sft", metavar="PATH", help="SFT JSON file")


def _oracle_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--oracle", help=f"target oracle ({', '.join(ORACLES)}) or a forbidden-word file")
    p.add_argument("--truncation-K", dest="truncation_K", type=int, help="keep the first K words of a word-list oracle")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="subshift-speed", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="write a system as SFT JSON")
    _source_flags(p)
    p.add_argument("--scale-up", type=int, metavar="M", help="multiply the speed by M")
    p.add_argument("--scale-down", type=int, metavar="M", help="divide the speed by about M")
    p.add_argument("--out")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("phi", help="speed profile as CSV")
    _source_flags(p)
    _oracle_flags(p)
    p.add_argument("--k", type=int, default=1, help="first word length")
    p.add_argument("--kmax", type=int, required=True)
    p.add_argument("--n-budget", type=int, default=8)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--timings", action="store_true", help="fill wall_ms (output is then not reproducible)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_phi)

    p = sub.add_parser("lang", help="projected language of a strip")
    _source_flags(p)
    p.add_argument("--n", type=int, required=True, help="strip half-width")
    p.add_argument("--k", type=int, required=True, help="word length")
    p.add_argument("--out")
    p.set_defaults(func=cmd_lang)

    p = sub.add_parser("followers", help="follower classes and the class-count bound")
    _source_flags(p)
    _oracle_flags(p)
    p.add_argument("--k1", type=int, required=True)
    p.add_argument("--k2", type=int, required=True)
    p.add_argument("--phi", type=int, help="speed at k1+k2 (measured from the system if omitted)")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--M", type=int)
    p.add_argument("--n-budget", type=int, default=8)
    p.add_argument("--out")
    p.set_defaults(func=cmd_followers)

    p = sub.add_parser("tm-enum", help="time and space to enumerate the forbidden words")
    p.add_argument("--tm", required=True, help=f"machine JSON file or fixture ({', '.join(FIXTURES)})")
    p.add_argument("--oracle", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--budget", type=int, default=100_000, help="step budget")
    p.add_argument("--out")
    p.set_defaults(func=cmd_tm_enum)

    p = sub.add_parser("compile-tm", help="layered rules for a single-tape enumerator")
    p.add_argument("--tm", required=True)
    p.add_argument("--w", required=True, help="periodic word on the marked row")
    p.add_argument("--fold", action="store_true", help="fold the tape to the right half first")
    p.add_argument("--max-letters", type=int, default=100_000)
    p.add_argument("--fixture-row", help="also check a 20x20 fixture seeded with this row word")
    p.add_argument("--out", help="layered rules as JSON")
    p.set_defaults(func=cmd_compile_tm)

    p = sub.add_parser("grid-check", help="zone doubling on a seeded strip")
    p.add_argument("--runs", type=int, required=True)
    p.add_argument("--height", type=int, help="odd strip height (default 2*runs+1)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_grid_check)

    p = sub.add_parser("hilbert", help="Hamiltonian path of an order-n super-tile")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--tile", help="starting tile name, e.g. line0 or bend_in90m")
    p.add_argument("--out")
    p.set_defaults(func=cmd_hilbert)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (BudgetExceeded, EnumerationBudgetExceeded) as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (SftError, NotARealization, ValueError, KeyError, OSError) as exc:
        print(f"error: {_message(exc)}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
