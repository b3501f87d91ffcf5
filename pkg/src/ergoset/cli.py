"""Command-line pipeline driver with deterministic, machine-readable outputs.

Exit codes: 0 success, 1 usage, 2 parse/input, 3 numerical or contract failure.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import dynamics
from .compress import SITE_PROB_MODELS, compress_step1
from .detection import partition, partition_to_json
from .errors import ContractViolation, NumericalError, ParseError, StatisticsError
from .experiments import (ErSweepConfig, compare_statistics, correlate, er_sweep,
                          laplacian_spectrum, rewire_core, spectral_csv)
from .graph import DiGraph, fmt17, ingest_edge_list
from .mixing import MixingMatrix, full_report, mixing_matrix, svd_compress, transition_matrix

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_NUMERICAL = 3

ENV_SEED = "ERGOSET_SEED"


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; the contract here is 1
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(_usage_error(message))


def _usage_error(message: str) -> int:
    sys.stderr.write(f"error: {message}\n")
    return EXIT_USAGE


def _default_seed() -> int:
    raw = os.environ.get(ENV_SEED)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(_usage_error(f"{ENV_SEED} must be an integer, got {raw!r}"))


def _read_graph(path: str, delimiter: str | None) -> DiGraph:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror or exc}") from exc
    return ingest_edge_list(text, delimiter=delimiter)


def _write(out_dir: Path | None, name: str, text: str) -> None:
    if out_dir is None:
        sys.stdout.write(text)
    else:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / name).write_text(text)


def _json_text(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _matrix_csv(header: list[str], row_labels: list[str], values: np.ndarray) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for lab, row in zip(row_labels, values):
        buf.write(lab + "," + ",".join(fmt17(x) for x in row) + "\n")
    return buf.getvalue()


def _b_csv(b: MixingMatrix) -> str:
    return _matrix_csv(["source"] + list(b.sink_labels), list(b.source_labels), b.values)


def cmd_detect(args) -> int:
    g = _read_graph(args.input, args.delimiter)
    payload = partition_to_json(g, partition(g))
    _write(args.out, "partition.json", _json_text(payload))
    return EXIT_OK


def cmd_compress(args) -> int:
    g = _read_graph(args.input, args.delimiter)
    part = partition(g)
    cg, report = compress_step1(g, part, site_prob=args.site_prob,
                                weighted=args.weighted_site_prob)
    out: Path | None = args.out
    _write(out, "partition.json", _json_text(partition_to_json(g, part)))
    _write(out, "compressed.edges", cg.graph.to_edge_list())
    _write(out, "meta_map.json", _json_text(cg.meta_map))
    if args.step == 1:
        _write(out, "report.json", _json_text(report.as_dict()))
        return EXIT_OK
    b = mixing_matrix(cg)
    factors = svd_compress(b, rank_tol=args.rank_tol, rank_k=args.rank_k)
    full = full_report(g, part, cg, factors)
    if full.n2 != len(cg.backward_meta_labels) + factors.k + len(cg.forward_meta_labels):
        raise NumericalError("internal error: N2 identity broken")  # pragma: no cover
    _write(out, "B.csv", _b_csv(b))
    dims = [f"c{j + 1}" for j in range(factors.k)]
    _write(out, "M_bw.csv", _matrix_csv(["source"] + dims, list(b.source_labels), factors.m_bw))
    _write(out, "C.csv", _matrix_csv(["component", "singular_value"], dims,
                                     factors.singular_values[:, None]))
    _write(out, "M_fw.csv", _matrix_csv(["component"] + list(b.sink_labels), dims, factors.m_fw))
    _write(out, "report.json", _json_text(full.as_dict()))
    return EXIT_OK


def _max_abs(x) -> float:
    arr = np.asarray(x)
    return float(np.abs(arr).max()) if arr.size else 0.0


def _pmap(fn, items, jobs: int) -> list:
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def cmd_verify(args) -> int:
    g = _read_graph(args.input, args.delimiter)
    part = partition(g)
    cg, _ = compress_step1(g, part, site_prob=args.site_prob,
                           weighted=args.weighted_site_prob)
    b = mixing_matrix(cg)
    tol = 1e-10
    result: dict = {"input": args.input, "tolerance": tol}

    rng = np.random.default_rng(args.seed)
    tm_c = transition_matrix(cg)
    n_src = len(b.source_labels)
    src_rows = list(range(n_src)) if n_src <= args.sample else \
        sorted(rng.choice(n_src, size=args.sample, replace=False).tolist())

    def check_source(i: int) -> float:
        start = dynamics.delta_start(tm_c, b.source_labels[i])
        absorbed = dynamics.absorb(tm_c, start, eps=args.eps, max_steps=args.max_steps)
        oracle_row = np.asarray([absorbed[cg.graph.index_of(lab)] for lab in b.sink_labels])
        return _max_abs(b.values[i] - oracle_row)

    b_dev = max(_pmap(check_source, src_rows, args.jobs), default=0.0)
    result["sources_checked"] = len(src_rows)
    result["max_b_deviation"] = b_dev
    row_dev = _max_abs(b.values.sum(axis=1) - 1.0) if b.values.size else 0.0
    result["max_row_sum_deviation"] = row_dev

    # forward-collapse exactness: mass entering each sink set from a core node
    # must equal the collapsed graph's absorption at the matching meta-node
    fw_sets = [s for i, s in enumerate(part.forward_sets)
               if i not in part.both_forward_indices()]
    fw_nodes = np.concatenate(fw_sets) if fw_sets else np.empty(0, dtype=np.int64)
    tm_g = transition_matrix(g, absorbing=fw_nodes)
    core = part.transient_core
    core_nodes = core.tolist() if core.size <= args.sample else \
        sorted(rng.choice(core, size=args.sample, replace=False).tolist())

    def check_core(w: int) -> float:
        absorbed = dynamics.absorb(tm_g, dynamics.delta_start(tm_g, int(w)),
                                   eps=args.eps, max_steps=args.max_steps)
        absorbed_c = dynamics.absorb(tm_c, dynamics.delta_start(tm_c, g.labels[int(w)]),
                                     eps=args.eps, max_steps=args.max_steps)
        worst = 0.0
        for k, nodes in enumerate(fw_sets):
            meta = cg.forward_meta_labels[k]
            worst = max(worst, abs(float(absorbed[nodes].sum())
                                   - float(absorbed_c[cg.graph.index_of(meta)])))
        return worst

    fwc_dev = max(_pmap(check_core, core_nodes, args.jobs), default=0.0)
    result["core_nodes_checked"] = len(core_nodes)
    result["max_forward_collapse_deviation"] = fwc_dev

    ok = b_dev <= tol and row_dev <= tol and fwc_dev <= tol

    if args.artifacts is not None:
        art = _verify_artifacts(Path(args.artifacts), cg)
        result["artifact_check"] = art
        ok = ok and art["pass"]

    result["pass"] = bool(ok)
    sys.stdout.write(_json_text(result))
    return EXIT_OK if ok else EXIT_NUMERICAL


def _verify_artifacts(art_dir: Path, cg) -> dict:
    """Compare a stored compressed graph against the recomputed one."""
    stored = ingest_edge_list((art_dir / "compressed.edges").read_text())
    want = cg.graph.edge_dict()
    got = stored.edge_dict()
    worst = None
    worst_dev = 0.0
    for key in set(want) | set(got):
        dev = abs(want.get(key, 0.0) - got.get(key, 0.0))
        if dev > worst_dev:
            worst_dev = dev
            worst = key
    node_mismatch = sorted(set(cg.graph.labels) ^ set(stored.labels))
    out = {
        "pass": worst_dev == 0.0 and not node_mismatch,
        "max_edge_weight_deviation": worst_dev,
    }
    if worst is not None:
        out["located"] = f"{worst[0]} -> {worst[1]}"
        out["stored"] = got.get(worst, 0.0)
        out["recomputed"] = want.get(worst, 0.0)
    if node_mismatch:
        out["node_mismatch"] = node_mismatch
    return out


def _parse_floats(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def cmd_experiment_er(args) -> int:
    sizes = tuple(int(tok) for tok in args.n.split(",") if tok.strip())
    if args.p_linspace is not None:
        lo, hi, count = args.p_linspace
        probs = tuple(np.linspace(float(lo), float(hi), int(count)).tolist())
    elif args.p is not None:
        probs = tuple(_parse_floats(args.p))
    else:
        raise SystemExit(_usage_error("er needs --p or --p-linspace"))
    cfg = ErSweepConfig(sizes=sizes, probabilities=probs, replicates=args.reps,
                        seed=args.seed, jobs=args.jobs)
    result = er_sweep(cfg)
    if args.out is None:
        sys.stdout.write(result.to_csv())
    else:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "er_sweep.csv").write_text(result.to_csv())
    return EXIT_OK


def cmd_experiment_rewire(args) -> int:
    rng = np.random.default_rng(args.seed)
    summaries = []
    records = []
    for path in args.inputs:
        g = _read_graph(path, args.delimiter)
        name = Path(path).stem
        part = partition(g)
        cg, _ = compress_step1(g, part)
        b = mixing_matrix(cg)
        factors = svd_compress(b)
        report = full_report(g, part, cg, factors)
        before = laplacian_spectrum(b, graph_id=name, rewired=False)
        rw = rewire_core(g, part, swaps_per_edge=args.swaps_per_edge, rng=rng)
        if not rw.changed:
            sys.stderr.write(f"{name}: core unchanged "
                             f"({rw.core_edge_count} core edges, {rw.accepted} swaps)\n")
        part_rw = partition(rw.graph)
        cg_rw, _ = compress_step1(rw.graph, part_rw)
        after = laplacian_spectrum(mixing_matrix(cg_rw), graph_id=name, rewired=True)
        summaries.extend([before, after])
        records.append((name, before.zero_count, after.zero_count, report.c2))
    csv_text = spectral_csv(summaries)
    stats_text = None
    if len(records) >= 2:
        zero_before = [r[1] for r in records]
        zero_after = [r[2] for r in records]
        payload = compare_statistics(zero_before, zero_after, equal_var=args.equal_var).as_dict()
        try:
            payload["zero_drop_vs_c2_correlation"] = correlate(
                [b - a for _, b, a, _ in records], [c2 for *_, c2 in records])
        except StatisticsError:
            payload["zero_drop_vs_c2_correlation"] = None
        stats_text = _json_text(payload)
    if args.out is None:
        sys.stdout.write(csv_text)
        if stats_text:
            sys.stdout.write(stats_text)
    else:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "spectra.csv").write_text(csv_text)
        if stats_text:
            (args.out / "stats.json").write_text(stats_text)
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="ergoset",
                     description="Detect source/sink node sets in directed networks and "
                                 "compress the network while preserving random-walk flows. "
                                 "Set ERGOSET_BACKEND=numpy to disable the numba kernels.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--delimiter", default=None,
                       help="field separator (default: any whitespace)")

    p_detect = sub.add_parser("detect", help="write the source/sink/core partition")
    p_detect.add_argument("input")
    p_detect.add_argument("-o", "--out", type=Path, default=None,
                          help="output directory (default: stdout)")
    common(p_detect)
    p_detect.set_defaults(func=cmd_detect)

    p_comp = sub.add_parser("compress", help="collapse sources/sinks; optionally factor the core")
    p_comp.add_argument("input")
    p_comp.add_argument("--step", type=int, choices=(1, 2), default=2)
    p_comp.add_argument("-o", "--out", type=Path, default=None,
                        help="output directory (default: stdout, concatenated)")
    p_comp.add_argument("--site-prob", choices=SITE_PROB_MODELS, default="indegree")
    p_comp.add_argument("--weighted-site-prob", action="store_true")
    p_comp.add_argument("--rank-tol", type=float, default=None,
                        help="absolute singular-value cutoff")
    p_comp.add_argument("--rank-k", type=int, default=None,
                        help="fixed rank for lossy factorization")
    common(p_comp)
    p_comp.set_defaults(func=cmd_compress)

    p_ver = sub.add_parser("verify", help="cross-check the solver against walk iteration")
    p_ver.add_argument("input")
    p_ver.add_argument("--artifacts", default=None,
                       help="directory with stored compress outputs to re-check")
    p_ver.add_argument("--eps", type=float, default=dynamics.DEFAULT_EPS)
    p_ver.add_argument("--max-steps", type=int, default=dynamics.DEFAULT_MAX_STEPS)
    p_ver.add_argument("--sample", type=int, default=200,
                       help="max sources / core nodes to iterate (seeded subsample beyond)")
    p_ver.add_argument("--jobs", type=int, default=1)
    p_ver.add_argument("--seed", type=int, default=_default_seed())
    p_ver.add_argument("--site-prob", choices=SITE_PROB_MODELS, default="indegree")
    p_ver.add_argument("--weighted-site-prob", action="store_true")
    common(p_ver)
    p_ver.set_defaults(func=cmd_verify)

    p_exp = sub.add_parser("experiment", help="random-graph sweep or core rewiring study")
    exp_sub = p_exp.add_subparsers(dest="experiment", required=True)

    p_er = exp_sub.add_parser("er", help="random directed graph percolation sweep")
    p_er.add_argument("--n", required=True, help="comma-separated node counts")
    p_er.add_argument("--p", default=None, help="comma-separated edge probabilities")
    p_er.add_argument("--p-linspace", nargs=3, metavar=("LO", "HI", "COUNT"), default=None)
    p_er.add_argument("--reps", type=int, default=1000)
    p_er.add_argument("--seed", type=int, default=_default_seed())
    p_er.add_argument("--jobs", type=int, default=1)
    p_er.add_argument("-o", "--out", type=Path, default=None)
    p_er.set_defaults(func=cmd_experiment_er)

    p_rw = exp_sub.add_parser("rewire", help="core rewiring spectral comparison")
    p_rw.add_argument("inputs", nargs="+")
    p_rw.add_argument("--swaps-per-edge", type=int, default=10)
    p_rw.add_argument("--seed", type=int, default=_default_seed())
    p_rw.add_argument("--equal-var", action="store_true",
                      help="pooled-variance t test instead of Welch")
    p_rw.add_argument("-o", "--out", type=Path, default=None)
    common(p_rw)
    p_rw.set_defaults(func=cmd_experiment_rewire)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except SystemExit as exc:  # late usage errors
        return int(exc.code or 0)
    except ParseError as exc:
        sys.stderr.write(f"parse error: {exc}\n")
        return EXIT_PARSE
    except (ContractViolation, NumericalError, StatisticsError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_NUMERICAL


def entry_point() -> None:  # console-script shim
    sys.exit(main())
