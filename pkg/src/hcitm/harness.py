"""Experiment orchestration behind the ``hcitm`` CLI.

Reproducibility rules:

* one master seed per experiment; the per-repetition graph and selector
  seeds come from :func:`derive_seed`, nothing else draws randomness;
* every output file carries the experiment spec and master seed (JSON
  files under ``"spec"``, CSV files as a leading ``# spec:`` comment line);
* wall-clock measurements are kept out of the main outputs (they go to
  ``timing.json`` or to explicitly named timing columns), so reruns are
  byte-identical everywhere else.
"""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import TextIO

import numpy as np

from .gen import GeneratorSpec, generate, write_generated
from .hypergraph import Hypergraph, giant_component, load_hyperedge_list
from .seedsel import SELECTORS, SelectionConfig, SelectionResult, hci_tm_select, result_to_dict

__all__ = [
    "ExperimentSpec",
    "derive_seed",
    "load_input",
    "fit_slope",
    "cmd_generate",
    "cmd_select",
    "cmd_curve",
    "cmd_trace_hci",
    "cmd_bench",
    "BENCH_ONLY",
]

GRAPH_STREAM, SELECTOR_STREAM = 0, 1


def derive_seed(master: int, repetition: int, stream: int) -> int:
    """Per-run seed: first 63 bits of ``SeedSequence([master, repetition, stream])``."""
    state = np.random.SeedSequence([master, repetition, stream]).generate_state(1, np.uint64)
    return int(state[0] >> np.uint64(1))


@dataclass
class ExperimentSpec:
    input: str | GeneratorSpec
    algorithms: list[str] = field(default_factory=lambda: ["hcitm"])
    config: SelectionConfig = SelectionConfig()
    repetitions: int = 1
    out_dir: str = "."
    master_seed: int = 0
    # "auto": giant component for generated inputs, whole file otherwise
    giant: str = "auto"
    jobs: int = 1

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be at least 1")
        unknown = [a for a in self.algorithms if a not in SELECTORS and a not in BENCH_ONLY]
        if unknown:
            raise ValueError(f"unknown algorithm(s) {unknown}; choose from {sorted(SELECTORS)}")
        if self.giant not in ("auto", "on", "off"):
            raise ValueError("giant must be auto, on or off")

    def echo(self) -> dict:
        out = asdict(self)
        out.pop("out_dir")
        out.pop("jobs")
        if isinstance(self.input, GeneratorSpec):
            out["input"] = {"generator": asdict(self.input)}
        else:
            out["input"] = {"file": str(self.input)}
        return out


def load_input(spec: ExperimentSpec, repetition: int) -> tuple[Hypergraph, dict]:
    """Hypergraph for one repetition plus provenance metadata."""
    if isinstance(spec.input, GeneratorSpec):
        gspec = replace(spec.input, rng_seed=derive_seed(spec.master_seed, repetition, GRAPH_STREAM))
        H, meta = generate(gspec)
        use_giant = spec.giant != "off"
    else:
        with open(spec.input, encoding="utf-8") as fh:
            H = load_hyperedge_list(fh)
        meta = {"file": str(spec.input), "realized_N": H.N, "realized_M": H.M}
        use_giant = spec.giant == "on"
    if use_giant:
        H = giant_component(H)
    meta = dict(meta, giant_component=use_giant, N=H.N, M=H.M)
    return H, meta


def _run_one(args) -> tuple[dict, float]:
    spec, algorithm, repetition = args
    H, meta = load_input(spec, repetition)
    cfg = replace(spec.config, rng_seed=derive_seed(spec.master_seed, repetition, SELECTOR_STREAM))
    res = SELECTORS[algorithm](H, cfg)
    record = {
        "algorithm": algorithm,
        "repetition": repetition,
        "input": meta,
        "result": result_to_dict(H, res, timing=False),
    }
    return record, res.elapsed


def _spec_line(spec: dict) -> str:
    return "# spec: " + json.dumps(spec, sort_keys=True) + "\n"


def _write_json(path: Path, payload) -> None:
    with path.open("w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_generate(gspec: GeneratorSpec, path: str | Path) -> dict:
    """Write the hypergraph file and its ``.json`` sidecar."""
    _, meta = write_generated(gspec, path)
    return meta


def cmd_select(spec: ExperimentSpec) -> list[dict]:
    """Run every algorithm on every repetition; write JSON and CSV outputs.

    Files in ``out_dir``: ``select.json`` (all records), ``select.csv``
    (one summary row per record), ``history.csv`` (Q(q) rows of every run)
    and ``timing.json`` (wall-clock only).
    """
    out = Path(spec.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    jobs = [(spec, a, r) for a in spec.algorithms for r in range(spec.repetitions)]
    started = time.time()
    if spec.jobs > 1:
        with ProcessPoolExecutor(spec.jobs) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]
    records = [rec for rec, _ in results]
    echo = spec.echo()
    _write_json(out / "select.json", {"spec": echo, "master_seed": spec.master_seed, "records": records})
    with (out / "select.csv").open("w", encoding="utf-8", newline="") as fh:
        fh.write(_spec_line(echo))
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["algorithm", "repetition", "rng_seed", "N", "M", "seed_count", "q", "Q", "exhausted"])
        for rec in records:
            r = rec["result"]
            w.writerow([rec["algorithm"], rec["repetition"], r["rng_seed"], r["N"], r["M"],
                        len(r["seeds"]), repr(r["q"]), repr(r["Q"]), int(r["exhausted"])])
    with (out / "history.csv").open("w", encoding="utf-8", newline="") as fh:
        fh.write(_spec_line(echo))
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["algorithm", "repetition", "seed_count", "q", "Q"])
        for rec in records:
            for count, q, Q in rec["result"]["Q_history"]:
                w.writerow([rec["algorithm"], rec["repetition"], count, repr(q), repr(Q)])
    _write_json(out / "timing.json", {
        "started_unix": started,
        "runs": [{"algorithm": rec["algorithm"], "repetition": rec["repetition"], "elapsed_ms": t * 1000.0}
                 for rec, t in results],
    })
    return records


def _single(spec: ExperimentSpec) -> tuple[Hypergraph, SelectionConfig]:
    H, _ = load_input(spec, 0)
    cfg = replace(spec.config, rng_seed=derive_seed(spec.master_seed, 0, SELECTOR_STREAM))
    return H, cfg


def cmd_curve(spec: ExperimentSpec, stream: TextIO, algorithm: str | None = None) -> SelectionResult:
    """Q(q) activation curve, one row per added seed."""
    algorithm = algorithm or spec.algorithms[0]
    H, cfg = _single(spec)
    res = SELECTORS[algorithm](H, cfg)
    stream.write(_spec_line(dict(spec.echo(), algorithm=algorithm)))
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["seed_count", "q", "Q"])
    for count, q, Q in res.Q_history:
        w.writerow([count, repr(q), repr(Q)])
    return res


def cmd_trace_hci(spec: ExperimentSpec, stream: TextIO, orders=(1, 2)) -> dict[int, SelectionResult]:
    """HCI of every seed at selection time, for HCI_n-TM runs with n in ``orders``.

    Columns: ``order`` (the n driving the run), ``index`` (1-based selection
    order), ``node`` (external label), ``hci_n`` (the driving score) and the
    ``hci0``/``hci1``/``hci2`` values of that node in the same state.
    """
    H, cfg = _single(spec)
    stream.write(_spec_line(dict(spec.echo(), orders=list(orders))))
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["order", "index", "node", "hci_n", "hci0", "hci1", "hci2", "Q"])
    runs = {}
    for n in orders:
        res = hci_tm_select(H, replace(cfg, hci_order=n), trace=True)
        runs[n] = res
        for k, (i, score, row, hist) in enumerate(
            zip(res.seeds, res.picked_scores, res.hci_trace, res.Q_history), start=1
        ):
            w.writerow([n, k, H.labels[i], score, *row, repr(hist[2])])
    return runs


def _constant_work(H: Hypergraph, cfg: SelectionConfig) -> SelectionResult:
    """Timing calibration: a fixed amount of work regardless of H."""
    t0 = time.perf_counter()
    acc = 0
    for k in range(300_000):
        acc += k * k
    return SelectionResult("const", [], 0.0, [], time.perf_counter() - t0, True, cfg)


BENCH_ONLY = {"const": _constant_work}


def fit_slope(x, y) -> float:
    """Least-squares slope of y against x."""
    return float(np.polyfit(np.asarray(x, float), np.asarray(y, float), 1)[0])


def cmd_bench(
    gspec: GeneratorSpec,
    sizes: list[int],
    algorithms: list[str],
    stream: TextIO,
    config: SelectionConfig = SelectionConfig(),
    repetitions: int = 1,
    master_seed: int = 0,
    slope_stream: TextIO | None = None,
) -> dict[str, float]:
    """Time each selector on generated hypergraphs of growing size.

    Each (size, repetition) graph is its giant component; the reported time
    is the median selection-loop time over repetitions. Writes one row per
    (algorithm, size) to ``stream`` and ``algorithm,slope`` rows to
    ``slope_stream``; returns the slopes of log10(T) against log10(N).
    """
    if len(sizes) < 3:
        raise ValueError("need at least three sizes for a slope")
    unknown = [a for a in algorithms if a not in SELECTORS and a not in BENCH_ONLY]
    if unknown:
        raise ValueError(f"unknown algorithm(s) {unknown}")
    echo = {"generator": asdict(gspec), "sizes": list(sizes), "algorithms": list(algorithms),
            "config": asdict(config), "repetitions": repetitions, "master_seed": master_seed}
    stream.write(_spec_line(echo))
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["algorithm", "N_spec", "N", "M", "seed_count", "log10_N", "seconds", "log10_T"])
    graphs = {}
    for s_idx, size in enumerate(sizes):
        for rep in range(repetitions):
            spec = replace(gspec, N=size, M=None, rng_seed=derive_seed(master_seed, s_idx * 1000 + rep, GRAPH_STREAM))
            graphs[size, rep] = giant_component(generate(spec)[0])
    slopes = {}
    for alg in algorithms:
        fn = SELECTORS.get(alg) or BENCH_ONLY[alg]
        xs, ys = [], []
        for size in sizes:
            times, counts = [], []
            for rep in range(repetitions):
                H = graphs[size, rep]
                cfg = replace(config, rng_seed=derive_seed(master_seed, rep, SELECTOR_STREAM))
                res = fn(H, cfg)
                times.append(res.elapsed)
                counts.append(len(res.seeds))
            H0 = graphs[size, 0]
            t = float(np.median(times))
            x, y = math.log10(H0.N), math.log10(t)
            xs.append(x)
            ys.append(y)
            w.writerow([alg, size, H0.N, H0.M, counts[0], f"{x:.6f}", f"{t:.6f}", f"{y:.6f}"])
        slopes[alg] = fit_slope(xs, ys)
    if slope_stream is not None:
        slope_stream.write(_spec_line(echo))
        sw = csv.writer(slope_stream, lineterminator="\n")
        sw.writerow(["algorithm", "slope"])
        for alg in algorithms:
            sw.writerow([alg, f"{slopes[alg]:.4f}"])
    return slopes
