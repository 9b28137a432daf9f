"""Command line interface: ``hcitm {generate,select,curve,trace-hci,bench}``."""

from __future__ import annotations

import argparse
import sys
from dataclasses import fields
from pathlib import Path

import yaml

from .errors import HypergraphError
from .gen import GeneratorSpec
from .harness import BENCH_ONLY, ExperimentSpec, cmd_bench, cmd_curve, cmd_generate, cmd_select, cmd_trace_hci
from .seedsel import SELECTORS, SelectionConfig


def _csv_list(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def _int_list(text: str) -> list[int]:
    return [int(float(x)) for x in _csv_list(text)]


def _add_generator_args(p: argparse.ArgumentParser, required: bool = False) -> None:
    g = p.add_argument_group("generator")
    g.add_argument("--kind", choices=["ER", "SF", "KUF"], type=str.upper, required=required)
    g.add_argument("--n", type=int, dest="N", help="number of nodes")
    g.add_argument("--m", type=int, dest="M", help="number of hyperedges (default: 0.3N for ER, 0.5N otherwise)")
    g.add_argument("--param", type=float, help="<k> for ER, exponent for SF, K for KUF")
    g.add_argument("--threshold", type=float, help="uniform hyperedge threshold (default 0.5)")


def _add_selection_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="YAML/JSON file with the same keys as the flags")
    p.add_argument("--input", help="hyperedge-list file (instead of generator flags)")
    _add_generator_args(p)
    p.add_argument("--a-r", type=float, dest="a_r")
    p.add_argument("--order", type=int, dest="hci_order", help="HCI order n (default 2)")
    p.add_argument("--seed", type=int, dest="master_seed", help="master rng seed")
    p.add_argument("--giant", choices=["auto", "on", "off"])


def _merged(args, config_keys) -> dict:
    """Flags override the optional config file."""
    merged = {}
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            merged.update(yaml.safe_load(fh) or {})
    for key in config_keys:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    return merged


_SEL_KEYS = ["input", "kind", "N", "M", "param", "threshold", "a_r", "hci_order", "master_seed", "giant",
             "algorithms", "repetitions", "out_dir", "jobs"]


def _generator_from(opts: dict, seed: int = 0) -> GeneratorSpec:
    missing = [k for k in ("kind", "N", "param") if opts.get(k) is None]
    if missing:
        raise ValueError(f"generator input needs --kind, --n and --param (missing {missing})")
    return GeneratorSpec(
        kind=opts["kind"], N=int(opts["N"]), param=float(opts["param"]), M=opts.get("M"),
        threshold=float(opts.get("threshold") or 0.5), rng_seed=seed,
    )


def _experiment(args, parser) -> ExperimentSpec:
    opts = _merged(args, _SEL_KEYS)
    cfg_fields = {f.name for f in fields(SelectionConfig)}
    cfg = SelectionConfig(**{k: opts[k] for k in cfg_fields if k in opts and k != "rng_seed"})
    source = opts.get("input") or _generator_from(opts)
    algorithms = opts.get("algorithms") or ["hcitm"]
    if isinstance(algorithms, str):
        algorithms = _csv_list(algorithms)
    for a in algorithms:
        if a not in SELECTORS:
            parser.error(f"unknown algorithm {a!r}; choose from {', '.join(sorted(SELECTORS))}")
    return ExperimentSpec(
        input=source,
        algorithms=algorithms,
        config=cfg,
        repetitions=int(opts.get("repetitions", 1)),
        out_dir=str(opts.get("out_dir", ".")),
        master_seed=int(opts.get("master_seed", 0)),
        giant=opts.get("giant", "auto"),
        jobs=int(opts.get("jobs", 1)),
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hcitm", description="Threshold-model influence maximization on hypergraphs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic hypergraph and its JSON sidecar")
    _add_generator_args(p, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", type=Path, required=True)

    p = sub.add_parser("select", help="run seed selectors and write JSON/CSV records")
    _add_selection_args(p)
    p.add_argument("--algorithms", type=_csv_list)
    p.add_argument("--reps", type=int, dest="repetitions")
    p.add_argument("--jobs", type=int)
    p.add_argument("-o", "--out", dest="out_dir")

    p = sub.add_parser("curve", help="emit the Q(q) curve of one selector")
    _add_selection_args(p)
    p.add_argument("--algorithm", default="hcitm")
    p.add_argument("-o", "--output", type=Path)

    p = sub.add_parser("trace-hci", help="emit HCI values of seeds at selection time")
    _add_selection_args(p)
    p.add_argument("--orders", type=_int_list, default=[1, 2])
    p.add_argument("-o", "--output", type=Path)

    p = sub.add_parser("bench", help="time selectors over growing generated hypergraphs")
    _add_generator_args(p, required=True)
    p.add_argument("--sizes", type=_int_list, required=True)
    p.add_argument("--algorithms", type=_csv_list, default=["hci2tm"])
    p.add_argument("--a-r", type=float, dest="a_r", default=0.9)
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", type=Path, required=True)
    return parser


def _open_out(path: Path | None):
    return open(path, "w", encoding="utf-8", newline="") if path else sys.stdout


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "generate":
            gspec = _generator_from(vars(args), args.seed)
            meta = cmd_generate(gspec, args.output)
            print(f"wrote {args.output} (N={meta['realized_N']}, M={meta['realized_M']})", file=sys.stderr)
        elif args.command == "select":
            spec = _experiment(args, parser)
            records = cmd_select(spec)
            for rec in records:
                r = rec["result"]
                print(f"{rec['algorithm']}\trep={rec['repetition']}\tseeds={len(r['seeds'])}\tq={r['q']:.4f}\tQ={r['Q']:.4f}")
        elif args.command == "curve":
            if args.algorithm not in SELECTORS:
                parser.error(f"unknown algorithm {args.algorithm!r}")
            spec = _experiment(args, parser)
            with _open_out(args.output) as fh:
                cmd_curve(spec, fh, args.algorithm)
        elif args.command == "trace-hci":
            spec = _experiment(args, parser)
            with _open_out(args.output) as fh:
                cmd_trace_hci(spec, fh, tuple(args.orders))
        elif args.command == "bench":
            for a in args.algorithms:
                if a not in SELECTORS and a not in BENCH_ONLY:
                    parser.error(f"unknown algorithm {a!r}")
            opts = dict(vars(args))
            if opts.get("N") is None:
                opts["N"] = args.sizes[0]
            gspec = _generator_from(opts)
            slope_path = args.output.with_name(args.output.stem + "_slopes.csv")
            with open(args.output, "w", encoding="utf-8", newline="") as fh, \
                    open(slope_path, "w", encoding="utf-8", newline="") as sfh:
                slopes = cmd_bench(gspec, args.sizes, args.algorithms, fh, SelectionConfig(a_r=args.a_r),
                                   args.reps, args.seed, sfh)
            for alg, s in slopes.items():
                print(f"{alg}\tslope={s:.3f}")
    except (HypergraphError, ValueError, OSError) as exc:
        print(f"hcitm: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
