"""Command-line front end.

Every subcommand emits one report.  JSON reports have the fields
``command, input, params, results, verdicts, witnesses, timing_ms, version``;
exact numbers are ``"p/q"`` strings.  Exit codes: 0 success, 1 an NC
violation was witnessed, 2 input error, 3 size limit.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from multiprocessing import Pool
from pathlib import Path

from . import __version__
from .correlation import (
    HOLDS,
    VIOLATED,
    kn_closed_forms,
    nc_all,
    nc_pair,
    nc_sets,
    second_coeff,
)
from .electrical import effective_resistance, kirchhoff_residuals, tree_count, unit_current_flow
from .errors import (
    ArborealError,
    GraphFormatError,
    ModeError,
    SizeLimitError,
    TooDenseError,
)
from .exact import BetaPolynomial, as_fraction, fmt
from .forest import EventSpec, forest_marginals, mu
from .graph import (
    Multigraph,
    complete,
    enumerate_small_graphs,
    is_isomorphic,
    ladder,
    parse_generator,
    read_graph,
    write_graph,
)
from .reduction import reduce_pipeline
from .sampling import arboreal_rejection, ust_counts

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_SIZE = 0, 1, 2, 3
WORKERS_ENV = "ARBOREAL_WORKERS"
COMMANDS = ("gen", "nc-pair", "nc-all", "nc-sets", "poly", "trees", "resistance",
            "flow", "reduce", "kn", "sample", "scan")


@dataclass
class RunConfig:
    command: str
    graph: str | None = None
    gen: str | None = None
    beta: str | None = None
    format: str = "json"
    seed: int = 0
    workers: int = 1
    cache_size: int = 200_000
    n_max: int | None = None
    extra: dict = field(default_factory=dict)

    @property
    def symbolic(self) -> bool:
        return self.beta == "symbolic"

    def input_echo(self) -> dict:
        return {"graph": self.graph} if self.graph else {"gen": self.gen}


# -- serialization --------------------------------------------------------


def encode(x):
    if x is None or isinstance(x, (bool, str, int, float)):
        return x
    if isinstance(x, Fraction):
        return fmt(x)
    if isinstance(x, BetaPolynomial):
        return {"coefficients": x.to_strings(), "text": repr(x)}
    if isinstance(x, dict):
        return {str(k): encode(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = sorted(x) if isinstance(x, (set, frozenset)) else x
        return [encode(v) for v in items]
    raise TypeError(f"cannot encode {type(x).__name__}")


def edge_echo(g: Multigraph, eid: int) -> dict:
    e = g.edge(eid)
    return {"id": eid, "u": e.u, "v": e.v, "beta": fmt(e.weight)}


def _csv(results: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    rows = results.get("rows")
    if isinstance(rows, list):
        keys = list(rows[0]) if rows else []
        w.writerow(keys)
        for r in rows:
            w.writerow([r[k] for k in keys])
        return buf.getvalue()
    w.writerow(["key", "value"])
    for k, v in results.items():
        if isinstance(v, list) and not any(isinstance(x, (dict, list)) for x in v):
            v = ";".join(map(str, v))
        elif isinstance(v, (dict, list)):
            raise ValueError("csv output supports scalar reports only; use --format json")
        w.writerow([k, v])
    return buf.getvalue()


def _text(report: dict) -> str:
    if "text" in report["results"]:
        return report["results"]["text"]
    lines = []
    for k, v in report["results"].items():
        lines.append(f"{k}: {json.dumps(v) if isinstance(v, (dict, list)) else v}")
    for k, v in report["verdicts"].items():
        lines.append(f"verdict {k}: {v}")
    return "\n".join(lines) + "\n"


def render(report: dict, fmt_name: str) -> str:
    if fmt_name == "json":
        return json.dumps(report, indent=2) + "\n"
    if fmt_name == "csv":
        return _csv(report["results"])
    return _text(report)


# -- graph input --------------------------------------------------------------


def load_graph(cfg: RunConfig) -> Multigraph:
    if (cfg.graph is None) == (cfg.gen is None):
        raise ValueError("give exactly one of --graph or --gen")
    if cfg.graph:
        g = read_graph(Path(cfg.graph).read_text())
    else:
        g = parse_generator(cfg.gen)
    if cfg.beta and not cfg.symbolic and "," not in cfg.beta:
        g = g.with_weights(as_fraction(cfg.beta))
    if cfg.symbolic and not g.is_uniform():
        raise ModeError("--beta symbolic excludes per-edge weights")
    return g


def _ids(text: str | None) -> list[int]:
    if not text:
        return []
    return [int(x) for x in text.split(",") if x.strip()]


def _need(cfg: RunConfig, *names):
    for n in names:
        if cfg.extra.get(n) is None:
            raise ValueError(f"--{n.replace('_', '-')} is required for {cfg.command}")


def _rational(cfg: RunConfig):
    if cfg.symbolic:
        raise ModeError(f"{cfg.command} needs a rational --beta")


# -- subcommands ----------------------------------------------------------


def cmd_gen(cfg, g):
    return {"graph": write_graph(g), "vertices": g.n, "edges": [edge_echo(g, e) for e in g.edge_ids]}, {}, {}


def _pair_results(g, r, e1, e2, symbolic):
    out = {
        "e1": edge_echo(g, e1),
        "e2": edge_echo(g, e2),
        "margin": r.margin,
        "prob_margin": r.prob_margin,
        "mu": r.witnesses,
    }
    if symbolic:
        out["leading_degree"] = 2 * g.n - 2
        out["leading_coefficient"] = r.coefficient(2 * g.n - 2)
        out["second_coefficient"] = r.coefficient(2 * g.n - 3)
    else:
        z = r.witnesses["mu_1"]
        out["p_e1"] = r.witnesses["mu_e1"] * g.weight(e1) / z
        out["p_e2"] = r.witnesses["mu_e2"] * g.weight(e2) / z
        out["p_e1e2"] = r.witnesses["mu_e1e2"] * g.weight(e1) * g.weight(e2) / z
        out["covariance_gap"] = out["p_e1"] * out["p_e2"] - out["p_e1e2"]
    return out


def cmd_nc_pair(cfg, g):
    _need(cfg, "e1", "e2")
    e1, e2 = cfg.extra["e1"], cfg.extra["e2"]
    r = nc_pair(g, e1, e2, cfg.symbolic)
    res = _pair_results(g, r, e1, e2, cfg.symbolic)
    wit = {} if r.verdict != VIOLATED else {"pair": [e1, e2], "graph": write_graph(g)}
    return res, {"nc": r.verdict}, wit


def cmd_nc_all(cfg, g):
    table = nc_all(g, cfg.symbolic)
    rows, verdicts, bad = [], {}, []
    for (a, b), r in table.items():
        row = {"e1": a, "e2": b, "verdict": r.verdict}
        row["margin"] = r.margin if cfg.symbolic else fmt(r.margin)
        rows.append(row)
        if r.verdict == VIOLATED:
            bad.append([a, b])
    verdicts["nc"] = VIOLATED if bad else HOLDS
    res = {"pairs": len(rows), "rows": rows}
    if not cfg.symbolic and rows:
        res["min_margin"] = min(r.margin for r in table.values())
    return res, verdicts, ({"pairs": bad, "graph": write_graph(g)} if bad else {})


def cmd_nc_sets(cfg, g):
    _rational(cfg)
    s1, s2 = _ids(cfg.extra.get("s1")), _ids(cfg.extra.get("s2"))
    if not s1 or not s2:
        raise ValueError("--s1 and --s2 are required for nc-sets")
    r = nc_sets(g, s1, s2)
    res = {"s1": s1, "s2": s2, "margin": r.margin, **r.witnesses}
    wit = {"s1": s1, "s2": s2, "graph": write_graph(g)} if r.verdict == VIOLATED else {}
    return res, {"nc": r.verdict}, wit


def _event(cfg) -> EventSpec:
    return EventSpec(_ids(cfg.extra.get("require")), _ids(cfg.extra.get("forbid")))


def cmd_poly(cfg, g):
    ev = _event(cfg)
    symbolic = cfg.beta is None or cfg.symbolic
    h = g.with_weights(1) if symbolic and cfg.beta is None else g
    val = mu(h, ev, symbolic, cfg.cache_size)
    return {"require": sorted(ev.require), "forbid": sorted(ev.forbid), "mu": val}, {}, {}


def cmd_trees(cfg, g):
    ev = _event(cfg)
    c = None if cfg.beta is None else g.weights()
    val = tree_count(g, c, ev.require, ev.forbid)
    return {"require": sorted(ev.require), "forbid": sorted(ev.forbid), "trees": val}, {}, {}


def cmd_resistance(cfg, g):
    _rational(cfg)
    _need(cfg, "source", "sink")
    u, v = cfg.extra["source"], cfg.extra["sink"]
    return {"source": u, "sink": v, "resistance": effective_resistance(g, u, v)}, {}, {}


def cmd_flow(cfg, g):
    _rational(cfg)
    _need(cfg, "source", "sink")
    u, v = cfg.extra["source"], cfg.extra["sink"]
    flow = unit_current_flow(g, u, v)
    resid = kirchhoff_residuals(flow, g)
    res = {
        "source": u,
        "sink": v,
        "resistance": flow.resistance,
        "potential": dict(sorted(flow.potential.items())),
        "current": dict(sorted(flow.current.items())),
        "residuals": resid,
    }
    ok = all(x == 0 for x in resid.values())
    return res, {"kirchhoff": "exact" if ok else "violated"}, {}


def _ladder_match(h: Multigraph):
    for d in range(1, 9):
        lad = ladder(d)
        if lad.n == h.n and lad.m == h.m and is_isomorphic(lad, h):
            return f"ladder:{d}"
    return None


def cmd_reduce(cfg, g):
    comps, trace = reduce_pipeline(g, fixpoint=cfg.extra.get("fixpoint", False))
    res = {
        "steps": [s.line() for s in trace.steps],
        "constant_C": trace.constant_C,
        "bridge_factor": trace.bridge_factor,
        "image": {e: trace.image(e) for e in g.edge_ids},
        "components": [write_graph(c) for c in comps],
    }
    match = _ladder_match(trace.result) if trace.result.m else None
    if match:
        res["isomorphic_to"] = match
    if cfg.extra.get("explain"):
        text = trace.text()
        if match:
            text += f"isomorphic_to {match}\n"
        res["text"] = text
    return res, {}, {}


def cmd_kn(cfg, g_unused):
    _need(cfg, "n")
    n = cfg.extra["n"]
    k = kn_closed_forms(n)
    res = {
        "n": n,
        "T_1": k.t1,
        "T_e": k.te,
        "T_ee": k.tee,
        "a": k.a,
        "I": k.I,
        "sum_I": k.sum_I,
        "second_coeff_literal_sum": k.second_coeff_literal,
        "second_coeff_closed_form": k.second_coeff_from_cases,
    }
    verdicts = {"cases_consistent": k.cases_consistent, "sum_I_below_one": k.sum_I_below_one}
    if n <= cfg.extra.get("direct_limit", 7):
        kn = complete(n)
        direct = second_coeff(kn, 0, kn.m - 1)
        res["second_coeff_direct"] = direct
        verdicts["closed_form_matches_direct"] = direct == k.second_coeff_from_cases
        verdicts["literal_sum_matches_direct"] = direct == k.second_coeff_literal
    return res, verdicts, {}


def cmd_sample(cfg, g):
    _rational(cfg)
    n = cfg.extra.get("samples") or 10_000
    if cfg.extra.get("sampler") == "wilson":
        counts = ust_counts(g, n, cfg.seed)
        rows = [{"tree": ",".join(map(str, sorted(t))), "count": c} for t, c in sorted(counts.items(), key=lambda kv: sorted(kv[0]))]
        return {"samples": n, "seed": cfg.seed, "distinct_trees": len(counts), "rows": rows}, {}, {}
    beta = cfg.beta or "1"
    rep = arboreal_rejection(g, beta, cfg.seed, n)
    res = {
        "samples": rep.n_samples,
        "seed": cfg.seed,
        "trials": rep.trials,
        "acceptance_rate": rep.acceptance_rate,
        "edge_frequency": {e: c / rep.n_samples for e, c in rep.edge_counts.items()},
    }
    return res, {}, {}


# -- scan -----------------------------------------------------------------


def _scan_task(task):
    text, beta = task
    g = read_graph(text).with_weights(as_fraction(beta))
    fm = forest_marginals(g)
    z2 = fm.Z * fm.Z
    margins = {}
    for a, b in combinations(g.edge_ids, 2):
        margins[a, b] = fm.nc_margin(a, b) / z2
    return text, beta, margins


def _summary(values: list[Fraction]) -> dict:
    values = sorted(values)
    pos = [v for v in values if v > 0]
    hist: dict = {}
    for v in pos:
        b = math.floor(math.log10(v.numerator) - math.log10(v.denominator))
        hist[b] = hist.get(b, 0) + 1
    out = {
        "count": len(values),
        "negative": sum(1 for v in values if v < 0),
        "zero": sum(1 for v in values if v == 0),
        "positive": len(pos),
        "log10_histogram": {str(k): hist[k] for k in sorted(hist)},
    }
    if values:
        out["min"] = fmt(values[0])
        out["median"] = fmt(values[len(values) // 2])
        out["max"] = fmt(values[-1])
    if pos:
        out["min_positive"] = fmt(pos[0])
    return out


def replay_witness(path: Path) -> bool:
    """True if the witness's exact margin is negative when recomputed from scratch."""
    data = json.loads(path.read_text())
    g = read_graph(data["graph"]).with_weights(as_fraction(data["beta"]))
    a, b = data["pair"]
    return nc_pair(g, a, b).margin < 0


def scan(n_max: int, betas: list[str], workers: int = 1, out_dir: Path | None = None) -> tuple[dict, dict, dict]:
    graphs = [write_graph(g) for g in enumerate_small_graphs(n_max)]
    tasks = [(t, b) for t in graphs for b in betas]
    if workers > 1:
        with Pool(workers) as pool:
            outs = pool.map(_scan_task, tasks, chunksize=4)
    else:
        outs = [_scan_task(t) for t in tasks]
    per_beta: dict = {b: [] for b in betas}
    per_graph_min = []
    violations = []
    for text, beta, margins in outs:
        per_beta[beta].extend(margins.values())
        if margins:
            per_graph_min.append(min(margins.values()))
        for pair, m in margins.items():
            if m < 0:
                violations.append({"graph": text, "beta": beta, "pair": list(pair), "margin": fmt(m)})
    confirmed = 0
    files = []
    if violations:
        out_dir = Path(out_dir or "scan_witnesses")
        out_dir.mkdir(parents=True, exist_ok=True)
        for i, v in enumerate(violations):
            p = out_dir / f"witness_{i:04d}.json"
            p.write_text(json.dumps(v, indent=2) + "\n")
            files.append(str(p))
            confirmed += replay_witness(p)
    everything = [m for ms in per_beta.values() for m in ms]
    res = {
        "n_max": n_max,
        "betas": betas,
        "graphs": len(graphs),
        "tasks": len(tasks),
        "pairs_checked": len(everything),
        "violations": len(violations),
        "confirmed_violations": confirmed,
        "summary": _summary(everything),
        "summary_by_beta": {b: _summary(v) for b, v in per_beta.items()},
        "per_graph_min": _summary(per_graph_min),
    }
    verdicts = {"nc": VIOLATED if confirmed else HOLDS}
    return res, verdicts, ({"files": files, "violations": violations} if violations else {})


def cmd_scan(cfg, g_unused):
    n_max = cfg.n_max or 4
    betas = [fmt(as_fraction(b)) for b in (cfg.beta or "1").split(",")]
    return scan(n_max, betas, cfg.workers, cfg.extra.get("out_dir"))


HANDLERS = {
    "gen": cmd_gen,
    "nc-pair": cmd_nc_pair,
    "nc-all": cmd_nc_all,
    "nc-sets": cmd_nc_sets,
    "poly": cmd_poly,
    "trees": cmd_trees,
    "resistance": cmd_resistance,
    "flow": cmd_flow,
    "reduce": cmd_reduce,
    "kn": cmd_kn,
    "sample": cmd_sample,
    "scan": cmd_scan,
}
NO_GRAPH = {"kn", "scan"}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="arboreal", description="Exact arboreal gas computations")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--graph", help="graph file ('vertices n' then 'u v p/q' lines)")
    p.add_argument("--gen", help="generator spec, e.g. complete:4, ladder:3, complete_bipartite:2,3")
    p.add_argument("--beta", help="p/q, 'symbolic', or a comma list (scan)")
    p.add_argument("--format", choices=("json", "csv", "text"), default="json")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None, help=f"default from ${WORKERS_ENV} or 1")
    p.add_argument("--cache-size", type=int, default=200_000)
    p.add_argument("--output", help="write the report here instead of stdout")
    p.add_argument("--e1", type=int)
    p.add_argument("--e2", type=int)
    p.add_argument("--s1")
    p.add_argument("--s2")
    p.add_argument("--require")
    p.add_argument("--forbid")
    p.add_argument("--source", type=int)
    p.add_argument("--sink", type=int)
    p.add_argument("--n", type=int, help="K_n size for kn")
    p.add_argument("--n-max", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--sampler", choices=("rejection", "wilson"))
    p.add_argument("--explain", action="store_true")
    p.add_argument("--fixpoint", action="store_true")
    p.add_argument("--out-dir", help="where scan writes witness files")
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    workers = ns.workers
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1"))
    extra = {k: getattr(ns, k) for k in (
        "e1", "e2", "s1", "s2", "require", "forbid", "source", "sink", "n",
        "samples", "sampler", "explain", "fixpoint", "out_dir")}
    return RunConfig(
        command=ns.command,
        graph=ns.graph,
        gen=ns.gen,
        beta=ns.beta,
        format=ns.format,
        seed=ns.seed,
        workers=max(1, workers),
        cache_size=ns.cache_size,
        n_max=ns.n_max,
        extra=extra,
    )


def execute(cfg: RunConfig) -> tuple[dict, int]:
    t0 = time.perf_counter()
    g = None if cfg.command in NO_GRAPH else load_graph(cfg)
    results, verdicts, witnesses = HANDLERS[cfg.command](cfg, g)
    code = EXIT_VIOLATION if VIOLATED in verdicts.values() else EXIT_OK
    params = {k: v for k, v in {
        "beta": cfg.beta, "seed": cfg.seed, "workers": cfg.workers,
        "cache_size": cfg.cache_size, "n_max": cfg.n_max, **cfg.extra,
    }.items() if v is not None and v is not False}
    report = {
        "command": cfg.command,
        "input": cfg.input_echo() if g is not None else {},
        "params": params,
        "results": encode(results),
        "verdicts": encode(verdicts),
        "witnesses": encode(witnesses),
        "timing_ms": round((time.perf_counter() - t0) * 1000, 3),
        "version": __version__,
    }
    return report, code


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    cfg = config_from_args(ns)
    try:
        report, code = execute(cfg)
        out = render(report, cfg.format)
    except GraphFormatError as exc:
        print(f"arboreal: graph format error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SizeLimitError, TooDenseError) as exc:
        print(f"arboreal: size limit: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except (ArborealError, ValueError, KeyError, OSError) as exc:
        print(f"arboreal: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if ns.output:
        Path(ns.output).write_text(out)
    else:
        stdout.write(out)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
