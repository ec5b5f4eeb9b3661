"""Seeded Monte Carlo campaigns behind the command line.

Every command maps ``(n, trial)`` pairs to one CSV row each.  Trial ``t``
at size ``n`` uses the graph ``sample_graph(n, dist, trial_seed(seed, t))``
so rows never depend on execution order or on the worker count.  Runtime
is only written when ``timing`` is on, which keeps the default CSV
byte-for-byte reproducible.
"""

from __future__ import annotations

import csv
import io
import json
import math
import subprocess
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .distributions import parse_distribution
from .errors import InvalidParameter
from .graphs import make_start_graph, sample_graph
from .kruskal import (
    connectivity_probability_bound,
    critical_p,
    gnp_connected,
    kruskal_trace,
    mst_edges,
    snapshot,
)
from .oracle import exact_cost, threshold_cost
from .search import heavy_edge_floor
from .seeds import trial_seed
from .starpath import (
    Labeling,
    USequence,
    default_parameters,
    full_pipeline,
    run_index,
    run_index_tail_check,
    u_sequence,
    u_sequence_wdiams,
)
from .trees import TreeView, wdiam

ZETA3 = 1.2020569031595942854

COMMANDS = (
    "zeta3", "upper", "lower", "wdiam-scan", "coupling", "appendix",
    "run-index", "good-sets", "oracle", "pipeline",
)

# streams keep the start-graph randomness apart from the edge weights
_START_STREAM = 1


@dataclass
class ExperimentConfig:
    command: str = "zeta3"
    n: list[int] = field(default_factory=lambda: [100])
    trials: int = 10
    seed: int = 0
    dist: str = "uniform"
    epsilon: float = 0.2
    start: str = "path"
    p: float | None = None
    W: float | None = None
    L: int | None = None
    out: str | None = None
    summary: str | None = None
    workers: int = 1
    timing: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InvalidParameter(f"unknown command {self.command!r}")
        if isinstance(self.n, int):
            self.n = [self.n]
        self.n = [int(x) for x in self.n]
        if not self.n or min(self.n) < 2:
            raise InvalidParameter("every n must be at least 2")
        if self.trials < 1:
            raise InvalidParameter("trials must be positive")
        if self.workers < 1:
            raise InvalidParameter("workers must be positive")
        parse_distribution(self.dist)  # fail early on a bad spec

    # -- flat key=value file form ------------------------------------------

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None:
                continue
            if f.name == "n":
                v = ",".join(str(x) for x in v)
            elif isinstance(v, bool):
                v = "true" if v else "false"
            elif isinstance(v, float):
                v = repr(v)
            lines.append(f"{f.name}={v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def parse_items(cls, text: str) -> dict:
        items = {}
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise InvalidParameter(f"config line without '=': {raw!r}")
            key, value = key.strip(), value.strip()
            if key not in _CONVERTERS:
                raise InvalidParameter(f"unknown config key {key!r}")
            items[key] = _CONVERTERS[key](value)
        return items

    @classmethod
    def from_text(cls, text: str, **overrides) -> "ExperimentConfig":
        items = cls.parse_items(text)
        items.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**items)

    @classmethod
    def load(cls, path, **overrides) -> "ExperimentConfig":
        return cls.from_text(Path(path).read_text(), **overrides)

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())


def _parse_bool(s: str) -> bool:
    if s.lower() in ("1", "true", "yes", "on"):
        return True
    if s.lower() in ("0", "false", "no", "off"):
        return False
    raise InvalidParameter(f"not a boolean: {s!r}")


_CONVERTERS = {
    "command": str,
    "n": lambda s: [int(x) for x in s.split(",") if x.strip()],
    "trials": int,
    "seed": int,
    "dist": str,
    "epsilon": float,
    "start": str,
    "p": float,
    "W": float,
    "L": int,
    "out": str,
    "summary": str,
    "workers": int,
    "timing": _parse_bool,
}


# -- per-trial rows -------------------------------------------------------------
#
# Each function returns a dict with the command's columns in order.


def _graph(cfg: ExperimentConfig, n: int, t: int):
    s = trial_seed(cfg.seed, t)
    return s, sample_graph(n, parse_distribution(cfg.dist), s)


def _mst_weight(g) -> float:
    return float(g.weights[mst_edges(g)].sum())


def _row_zeta3(cfg, n, t):
    s, g = _graph(cfg, n, t)
    return {"trial": t, "seed": s, "n": n, "mst_weight": _mst_weight(g)}


def _row_upper(cfg, n, t):
    s, g = _graph(cfg, n, t)
    H = make_start_graph(cfg.start, n, trial_seed(cfg.seed, t, _START_STREAM))
    tr = full_pipeline(g, H, record_sets=False, W=cfg.W, L=cfg.L)
    a = tr.audit
    return {
        "trial": t, "seed": s, "n": n, "start": cfg.start,
        "witness": a["witness_kind"], "witness_size": a["witness_size"],
        "I": -1 if a.get("I") is None else a["I"],
        "fallback": int(bool(a.get("fallback", False))),
        "steps": tr.m,
        "wt_seed": tr.phase_wt("seed"), "wt_grow": tr.phase_wt("grow"),
        "wt_cycles": tr.phase_wt("cycles"), "wt_eat": tr.phase_wt("eat"),
        "wt_max": tr.wt_max,
        "reached_mst": int(tr.reached_mst),
        "success": int(tr.wt_max <= g.rho_star + cfg.epsilon),
    }


def delta(epsilon: float) -> float:
    """``(1 - epsilon) epsilon / (4 zeta(3))``."""
    return (1.0 - epsilon) * epsilon / (4.0 * ZETA3)


def _row_lower(cfg, n, t):
    s, g = _graph(cfg, n, t)
    H = make_start_graph(cfg.start, n, trial_seed(cfg.seed, t, _START_STREAM))
    rep = heavy_edge_floor(g, H, cfg.epsilon)
    w_mst = _mst_weight(g)
    ratio = rep.weight_floor / (n * w_mst)
    event = rep.count >= cfg.epsilon * n / 2
    audited = event and w_mst <= 2 * ZETA3
    return {
        "trial": t, "seed": s, "n": n, "heavy_count": rep.count,
        "weight_floor": rep.weight_floor, "mst_weight": w_mst, "ratio": ratio,
        "count_event": int(event), "audited": int(audited),
        "ratio_ok": int((not audited) or ratio >= delta(cfg.epsilon)),
    }


def wdiam_tail_bound(n: int) -> float:
    """``7 log^4 n / n^(1/10)``."""
    return 7.0 * math.log(n) ** 4 / n**0.1


def _row_wdiam(cfg, n, t):
    s, g = _graph(cfg, n, t)
    tree = mst_edges(g)
    wd = wdiam(TreeView(g, tree.tolist()))
    p = critical_p(n) if cfg.p is None else cfg.p
    snap = snapshot(g, p, tree)
    rhs = snap.mst_upper_bound()
    return {
        "trial": t, "seed": s, "n": n, "mst_weight": float(g.weights[tree].sum()),
        "wdiam": wd, "p": p, "t_max": len(snap.t_max), "W_n": snap.W_n, "L_np": snap.L_np,
        "mst_upper": rhs, "mst_upper_ok": int(wd <= rhs),
        "tail_bound": wdiam_tail_bound(n), "below_tail_bound": int(wd <= wdiam_tail_bound(n)),
    }


def _row_coupling(cfg, n, t):
    s, g = _graph(cfg, n, t)
    tr = kruskal_trace(g)
    problems = tr.check()
    return {"trial": t, "seed": s, "n": n, "steps": tr.N, "violations": len(problems)}


def _row_appendix(cfg, n, t):
    s, g = _graph(cfg, n, t)
    tree = mst_edges(g)
    p = critical_p(n) if cfg.p is None else cfg.p
    snap = snapshot(g, p, tree)
    wd = wdiam(TreeView(g, tree.tolist()))
    cut = 3.0 * math.log(n) ** 2 / n
    return {
        "trial": t, "seed": s, "n": n, "p": p, "W_n": snap.W_n,
        "W_n_exceeds": int(snap.W_n > cut), "t_max": len(snap.t_max),
        "runner_up": snap.runner_up_size, "L_np": snap.L_np, "wdiam": wd,
        "mst_upper": snap.mst_upper_bound(), "mst_upper_ok": int(wd <= snap.mst_upper_bound()),
        # G(n, p) from the same uniforms is exactly the threshold graph of the trial
        "gnp_connected": int(gnp_connected(n, p, s)),
    }


def _good_sets_sequence(g, lab, W, L):
    run = run_index(g, lab, W, L)
    if run.found:
        return run, u_sequence(run, lab)
    I = run.I
    sets = [lab.V(I, lab.k)] + [lab.V(i, lab.k) for i in range(I - 1, 0, -1)]
    return run, USequence(sets, [x[0] for x in sets[1:]], 1, 0, I - 1)


def _row_good_sets(cfg, n, t):
    s, g = _graph(cfg, n, t)
    dW, dL = default_parameters(n)
    W = dW if cfg.W is None else cfg.W
    L = dL if cfg.L is None else cfg.L
    run, U = _good_sets_sequence(g, Labeling("path", tuple(range(1, n + 1))), W, L)
    m = float(u_sequence_wdiams(g, U).max())
    return {
        "trial": t, "seed": s, "n": n, "W": W, "L": L, "I": run.I,
        "max_wdiam": m, "bad": int(m > cfg.epsilon),
    }


def _row_oracle(cfg, n, t):
    s, g = _graph(cfg, n, t)
    H = make_start_graph(cfg.start, n, trial_seed(cfg.seed, t, _START_STREAM))
    c = exact_cost(g, H)
    c2 = threshold_cost(g, H)
    tr = full_pipeline(g, H, record_sets=False)
    return {
        "trial": t, "seed": s, "n": n, "start": cfg.start,
        "exact_cost": c, "threshold_cost": c2, "wt_max": tr.wt_max,
        "agree": int(c == c2), "upper_ok": int(c <= tr.wt_max),
        "reached_mst": int(tr.reached_mst),
    }


_ROWS = {
    "zeta3": _row_zeta3,
    "upper": _row_upper,
    "lower": _row_lower,
    "wdiam-scan": _row_wdiam,
    "coupling": _row_coupling,
    "appendix": _row_appendix,
    "good-sets": _row_good_sets,
    "oracle": _row_oracle,
}


def _timed_row(args):
    cfg, n, t = args
    start = time.perf_counter()
    row = _ROWS[cfg.command](cfg, n, t)
    if cfg.timing:
        row["runtime"] = time.perf_counter() - start
    return row


def _trial_rows(cfg: ExperimentConfig) -> list[dict]:
    jobs = [(cfg, n, t) for n in cfg.n for t in range(cfg.trials)]
    if cfg.workers == 1:
        return [_timed_row(j) for j in jobs]
    with ProcessPoolExecutor(cfg.workers) as pool:
        # map preserves submission order, so rows stay keyed by (n, trial)
        return list(pool.map(_timed_row, jobs, chunksize=max(1, len(jobs) // (8 * cfg.workers))))


# -- table-style commands -----------------------------------------------------


def _rows_run_index(cfg):
    rows = []
    for n in cfg.n:
        dW, dL = default_parameters(n)
        W = dW if cfg.W is None else cfg.W
        L = dL if cfg.L is None else cfg.L
        start = time.perf_counter()
        rep = run_index_tail_check(n, W, L, cfg.trials, cfg.seed)
        elapsed = time.perf_counter() - start
        for k, e, b, s in zip(rep.grid, rep.empirical, rep.bound, rep.sigma):
            row = {
                "n": n, "W": W, "L": L, "trials": cfg.trials, "k": k,
                "empirical": e, "bound": b, "sigma": s, "ok": int(k not in rep.violations),
            }
            if cfg.timing:
                row["runtime"] = elapsed
            rows.append(row)
    return rows


def _rows_pipeline(cfg):
    rows = []
    for n in cfg.n:
        s, g = _graph(cfg, n, 0)
        H = make_start_graph(cfg.start, n, trial_seed(cfg.seed, 0, _START_STREAM))
        tr = full_pipeline(g, H, record_sets=True, W=cfg.W, L=cfg.L)
        phase_of = {}
        for name, a, b in tr.phases:
            for i in range(a, b):
                phase_of[i] = name
        for i, (S, w, noop) in enumerate(zip(tr.sets, tr.step_weights.tolist(), tr.noop.tolist())):
            rows.append({
                "n": n, "seed": s, "step": i + 1, "phase": phase_of.get(i, ""),
                "size": len(S), "weight": w, "noop": int(noop),
            })
    return rows


# -- aggregation --------------------------------------------------------------


def _binomial(k: int, m: int) -> dict:
    f = k / m if m else 0.0
    return {"count": k, "trials": m, "fraction": f, "sigma": math.sqrt(f * (1 - f) / m) if m else 0.0}


def _by_n(rows):
    out: dict[int, list[dict]] = {}
    for r in rows:
        out.setdefault(r["n"], []).append(r)
    return out


def _nondecreasing(fracs, sigmas, k=2.0) -> bool:
    return all(b >= a - k * math.hypot(sa, sb) for a, b, sa, sb in zip(fracs, fracs[1:], sigmas, sigmas[1:]))


def summarize(cfg: ExperimentConfig, rows: list[dict]) -> dict:
    """Aggregates computed from the rows alone, keyed by ``n``."""
    groups = _by_n(rows)
    out: dict = {"rows": len(rows), "per_n": {}}
    c = cfg.command
    for n, rs in groups.items():
        d: dict = {}
        if c == "zeta3":
            x = np.array([r["mst_weight"] for r in rs])
            f0 = parse_distribution(cfg.dist).density_at_zero
            d = {
                "mean": float(x.mean()), "std": float(x.std(ddof=1)) if len(x) > 1 else 0.0,
                "limit": ZETA3 / f0, "abs_error": abs(float(x.mean()) - ZETA3 / f0),
            }
        elif c == "upper":
            d = _binomial(sum(r["success"] for r in rs), len(rs))
            w = np.array([r["wt_max"] for r in rs])
            d.update(median_wt_max=float(np.median(w)), max_wt_max=float(w.max()),
                     reached_mst=sum(r["reached_mst"] for r in rs), fallbacks=sum(r["fallback"] for r in rs))
        elif c == "lower":
            d = _binomial(sum(r["count_event"] for r in rs), len(rs))
            d.update(audited=sum(r["audited"] for r in rs), ratio_failures=sum(1 - r["ratio_ok"] for r in rs),
                     delta=delta(cfg.epsilon), threshold=cfg.epsilon * n / 2)
        elif c in ("wdiam-scan", "appendix"):
            w = np.array([r["wdiam"] for r in rs])
            d = {"median_wdiam": float(np.median(w)), "p95_wdiam": float(np.percentile(w, 95)),
                 "mst_upper_violations": sum(1 - r["mst_upper_ok"] for r in rs)}
            if c == "wdiam-scan":
                d["tail_bound"] = wdiam_tail_bound(n)
                d["above_tail_bound"] = sum(1 - r["below_tail_bound"] for r in rs)
            else:
                d["W_n_exceeds"] = _binomial(sum(r["W_n_exceeds"] for r in rs), len(rs))
                p = rs[0]["p"]
                d["disconnected"] = _binomial(sum(1 - r["gnp_connected"] for r in rs), len(rs))
                d["connectivity_bound"] = connectivity_probability_bound(n, p)
        elif c == "coupling":
            d = {"steps": sum(r["steps"] for r in rs), "violations": sum(r["violations"] for r in rs)}
        elif c == "good-sets":
            d = _binomial(sum(r["bad"] for r in rs), len(rs))
        elif c == "oracle":
            d = {"disagreements": sum(1 - r["agree"] for r in rs),
                 "upper_violations": sum(1 - r["upper_ok"] for r in rs),
                 "reached_mst": sum(r["reached_mst"] for r in rs)}
        elif c == "run-index":
            d = {"violations": [r["k"] for r in rs if not r["ok"]], "grid_points": len(rs)}
        elif c == "pipeline":
            w = np.array([r["weight"] for r in rs])
            d = {"steps": len(rs), "wt_max": float(w.max()) if len(w) else 0.0}
        out["per_n"][str(n)] = d
    ns = sorted(groups)
    if c == "upper" and len(ns) > 1:
        per = [out["per_n"][str(n)] for n in ns]
        out["nondecreasing_2sigma"] = _nondecreasing([x["fraction"] for x in per], [x["sigma"] for x in per])
    if c in ("wdiam-scan",) and len(ns) > 1:
        med = [out["per_n"][str(n)]["median_wdiam"] for n in ns]
        out["median_strictly_decreasing"] = all(b < a for a, b in zip(med, med[1:]))
    if c == "good-sets" and len(ns) > 1:
        per = [out["per_n"][str(n)] for n in ns]
        fr = [-x["fraction"] for x in per]
        out["nonincreasing_2sigma"] = _nondecreasing(fr, [x["sigma"] for x in per])
    return out


def _git_describe() -> str:
    try:
        res = subprocess.run(
            ["git", "describe", "--always", "--dirty"], cwd=Path(__file__).resolve().parent,
            capture_output=True, text=True, timeout=10,
        )
    except (OSError, subprocess.SubprocessError):
        return "unknown"
    return res.stdout.strip() or "unknown"


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    rows: list[dict]
    summary: dict

    @property
    def columns(self) -> list[str]:
        return list(self.rows[0]) if self.rows else []

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_fmt(v) for v in r.values()])
        return buf.getvalue()


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    start = time.perf_counter()
    if cfg.command == "run-index":
        rows = _rows_run_index(cfg)
    elif cfg.command == "pipeline":
        rows = _rows_pipeline(cfg)
    else:
        rows = _trial_rows(cfg)
    for r in rows:
        for k, v in r.items():
            if isinstance(v, float) and not math.isfinite(v):
                raise ValueError(f"non-finite {k} in row {r}")
    summary = {
        "command": cfg.command,
        "config": {f.name: getattr(cfg, f.name) for f in fields(cfg)},
        "build": _git_describe(),
        "wall_clock_seconds": time.perf_counter() - start,
        "zeta3": ZETA3,
    }
    summary.update(summarize(cfg, rows))
    return ExperimentResult(cfg, rows, summary)


def write_outputs(result: ExperimentResult) -> None:
    cfg = result.config
    if cfg.out:
        Path(cfg.out).write_text(result.csv_text())
    if cfg.summary:
        Path(cfg.summary).write_text(json.dumps(result.summary, indent=2, default=float) + "\n")


# public names matching the command list
def cmd_zeta3(n, trials, seed, dist="uniform", **kw) -> ExperimentResult:
    return run_experiment(ExperimentConfig("zeta3", n, trials, seed, dist, **kw))


def cmd_upper(n, trials, seed, start="path", epsilon=0.2, **kw) -> ExperimentResult:
    return run_experiment(ExperimentConfig("upper", n, trials, seed, start=start, epsilon=epsilon, **kw))


def cmd_lower(n, trials, seed, epsilon=0.2, **kw) -> ExperimentResult:
    return run_experiment(ExperimentConfig("lower", n, trials, seed, epsilon=epsilon, **kw))


def cmd_wdiam_scan(n, trials, seed, **kw) -> ExperimentResult:
    return run_experiment(ExperimentConfig("wdiam-scan", n, trials, seed, **kw))


def cmd_coupling_check(n, trials, seed, **kw) -> ExperimentResult:
    return run_experiment(ExperimentConfig("coupling", n, trials, seed, **kw))


def cmd_appendix(n, p, trials, seed, **kw) -> ExperimentResult:
    return run_experiment(ExperimentConfig("appendix", n, trials, seed, p=p, **kw))
