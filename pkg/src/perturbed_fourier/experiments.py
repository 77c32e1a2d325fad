"""Batch experiments behind the command-line interface.

Every experiment is described by an :class:`Experiment`: documented default
parameters, a task list and a per-task worker. Workers are top-level
functions of one picklable argument, so tasks can fan out to a process pool;
the rows are sorted by the experiment's key columns before they are written,
which keeps the CSV independent of scheduling.

A row may carry a ``passed`` flag (True/False for asserted inequalities,
None when no bound applies). A run succeeds exactly when no row has
``passed`` False.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import bounds
from .functions import get_function
from .grid import make_alternating, make_random, make_uniform
from .mz import MZ_COLUMNS, frame_constants_exact, frame_decay_experiment
from .nudft import DENSE_CAP, NudftOperator, extreme_singular_values, kadec_check
from .oversample import OVERSAMPLE_COLUMNS, nonneg_oversampling_experiment, oversample_sweep
from .quadrature import (central_weight_scan, compute_weights, exactness_check, integrate,
                         lemma_a_check, stability_measures)
from .trigpoly import interpolate, sup_distance, truncated_fourier

__all__ = ["Experiment", "EXPERIMENTS", "run_experiment", "fit_log_slope", "make_grid"]


@dataclass
class Experiment:
    name: str
    description: str
    defaults: dict
    columns: tuple
    key: tuple
    tasks: Callable
    worker: Callable
    summarize: Callable | None = None
    docs: dict = field(default_factory=dict)


def make_grid(kind: str, N: int, alpha: float, seed: int | None):
    if kind == "random":
        return make_random(N, alpha, seed) if alpha > 0 else make_uniform(N)
    if kind == "alternating":
        return make_alternating(N, alpha) if alpha > 0 else make_uniform(N)
    if kind == "uniform":
        return make_uniform(N)
    raise ValueError(f"unknown grid kind {kind!r}")


def fit_log_slope(N, err, floor=1e-12) -> float | None:
    """Least-squares slope of ``log(err)`` against ``N`` over errors above ``floor``."""
    N = np.asarray(N, dtype=float)
    err = np.asarray(err, dtype=float)
    keep = err > floor
    if np.count_nonzero(keep) < 2:
        return None
    return float(np.polyfit(N[keep], np.log(err[keep]), 1)[0])


def _seeds(p):
    return [p["seed"] + t for t in range(p["trials"])]


def _sweep_tasks(p):
    return [(a, N, s) for a in p["alpha"] for N in p["N"] for s in _seeds(p)]


# -- kadec-sweep / conditioning-sweep / weights-sweep -------------------------

def _dense_op(grid):
    return NudftOperator(grid, dense=grid.size <= DENSE_CAP)


def _kadec_worker(task):
    alpha, N, seed = task
    grid = make_grid("random", N, alpha, seed)
    rep = kadec_check(grid, _dense_op(grid))
    ok = rep.passed
    return {
        "alpha": alpha, "N": N, "seed": seed,
        "diff_ratio": rep["diff_ratio"].measured, "phi": rep["diff_ratio"].bound,
        "sigma_min_ratio": rep["sigma_min_ratio"].measured,
        "sigma_max_ratio": rep["sigma_max_ratio"].measured,
        "passed": None if ok is None else bool(
            rep["diff_ratio"].passed and rep["sigma_min_ratio"].passed
            and rep["sigma_max_ratio"].passed),
    }


def _conditioning_worker(task):
    alpha, N, seed = task
    grid = make_grid("random", N, alpha, seed)
    smin, smax = extreme_singular_values(_dense_op(grid))
    scale = math.sqrt(grid.size)
    kappa, leb = smax / smin, scale / smin
    if alpha < 0.25:
        kb, lb = bounds.kadec_condition_bound(alpha), 1.0 / (1.0 - bounds.phi(alpha))
        ok = kappa <= kb + 1e-6 and leb <= lb + 1e-6
    else:
        kb = lb = ok = None
    return {"alpha": alpha, "N": N, "seed": seed, "kappa": kappa, "kappa_bound": kb,
            "lebesgue": leb, "lebesgue_bound": lb, "passed": ok}


def _weights_worker(task):
    alpha, N, seed = task
    grid = make_grid("random", N, alpha, seed)
    rule = compute_weights(grid)
    st = stability_measures(rule)
    res = exactness_check(rule)
    sum_err = abs(float(np.sum(rule.weights)) - 2 * math.pi) / (2 * math.pi)
    ok = res <= 1e-8 and sum_err <= 1e-9
    bound = None
    if alpha < 0.25:
        bound = bounds.weight_abs_sum_bound(alpha)
        ok = ok and st.abs_sum <= bound + 1e-7
    return {"alpha": alpha, "N": N, "min_weight": st.min_weight, "abs_sum": st.abs_sum,
            "exactness_residual": res, "seed": seed, "sum_rel_error": sum_err,
            "abs_sum_bound": bound, "passed": bool(ok)}


# -- neg-weight-search ---------------------------------------------------------

def _neg_tasks(p):
    return [(a, p["Nmax"], p["tol"], p["skip_certified"]) for a in p["alpha"]]


def _neg_worker(task):
    alpha, Nmax, tol, skip = task
    lower = bounds.neg_weight_lower_bound(alpha)
    threshold = -10.0 * tol * 2 * math.pi
    rows = []
    for N, w0 in central_weight_scan(alpha, Nmax, tol=tol, skip_certified=skip):
        neg = w0 < threshold
        rows.append({"alpha": alpha, "N": N, "w0": w0, "negative": neg,
                     "lower_bound_N": lower,
                     # a hit at or below the certified bound would falsify it
                     "passed": (N > lower) if neg else True})
    return rows


def _neg_summary(p, rows):
    out = {}
    for a in p["alpha"]:
        hits = [r["N"] for r in rows if r["alpha"] == a and r["negative"]]
        out[f"first_negative_N[{a:g}]"] = min(hits) if hits else None
    return out


# -- interp-convergence / quad-convergence -------------------------------------

def _conv_tasks(p):
    return [(p["alpha"], N, p["seed"], p["kind"], p["function"], p.get("points"))
            for N in p["N"]]


def _interp_worker(task):
    alpha, N, seed, kind, fname, points = task
    f = get_function(fname)
    grid = make_grid(kind, N, alpha, seed)
    q = interpolate(grid, f(grid.nodes))
    err = sup_distance(f, q, points)
    best = sup_distance(f, truncated_fourier(f, N), points)
    if alpha < 0.25:
        factor = bounds.interp_bound_factor(alpha, N)
        ok = err <= factor * best
    else:
        factor = ok = None
    return {"alpha": alpha, "N": N, "seed": seed, "kind": kind, "function": fname,
            "interp_error": err, "best_error": best, "bound_factor": factor,
            "bound": None if factor is None else factor * best, "passed": ok}


def _quad_worker(task):
    alpha, N, seed, kind, fname, _ = task
    f = get_function(fname)
    grid = make_grid(kind, N, alpha, seed)
    rule = compute_weights(grid)
    err = abs(integrate(rule, f(grid.nodes)) - f.exact_integral)
    sm = f.smoothness
    bound = ok = None
    if hasattr(sm, "sigma") and alpha < 0.25:
        c = math.cos(math.pi * alpha) - math.sin(math.pi * alpha)
        bound = 8 * sm.V * math.pi / (c * sm.sigma) * N ** (-sm.sigma)
        ok = err <= bound
    return {"alpha": alpha, "N": N, "seed": seed, "kind": kind, "function": fname,
            "error": err, "bound": bound, "passed": ok}


def _slope_summary(col):
    # analytic functions: slope of log(error) in N, predicted -rho0;
    # sigma-smooth ones: slope of log(error) in log(N), bounded by -sigma
    def summarize(p, rows):
        f = get_function(p["function"])
        N = [r["N"] for r in rows]
        err = [r[col] for r in rows]
        sm = f.smoothness
        if hasattr(sm, "sigma"):
            return {"fitted_loglog_slope": fit_log_slope(np.log(N), err),
                    "bound_loglog_slope": -sm.sigma}
        rho = sm.rho0
        return {"fitted_slope": fit_log_slope(N, err),
                "predicted_slope": -rho if math.isfinite(rho) else None}
    return summarize


# -- mz-decay ------------------------------------------------------------------

def _mz_tasks(p):
    return [(a, N, p["random"], p["seed"]) for a in p["alpha"] for N in p["N"]]


def _mz_worker(task):
    alpha, N, n_random, seed = task
    row = frame_decay_experiment(alpha, [N], n_random=n_random, seed0=seed)[0]
    if row["lower_bound_phi"] is None:
        row["passed"] = None
    else:
        row["passed"] = bool(row["lower"] >= row["lower_bound_phi"] - 1e-10
                             and row["upper"] <= row["upper_bound_phi"] + 1e-10)
    return row


def _mz_summary(p, rows):
    out = {}
    for a in p["alpha"]:
        lows = [r["lower"] for r in sorted(rows, key=lambda r: r["N"]) if r["alpha"] == a]
        out[f"lower_strictly_decreasing[{a:g}]"] = all(x > y for x, y in zip(lows, lows[1:]))
    return out


# -- oversample-sweep ------------------------------------------------------------

def _over_tasks(p):
    return [(p["mode"], p["alpha"], p["epsilon"], N, s)
            for N in p["N"] for s in (p["seeds"] if p["mode"] == "random" else [None])]


def _over_worker(task):
    mode, alpha, eps, N, seed = task
    if mode == "nonneg":
        rows = nonneg_oversampling_experiment(alpha, [N])
        for r in rows:
            r["seed"] = None
            r["passed"] = None
        return rows
    row = oversample_sweep(alpha, eps, [N], seeds=[seed])[0]
    row["passed"] = None
    return row


def _over_finalize(p, rows):
    # boundedness: every kappa within a factor of its value at the reference N
    if p["mode"] != "random":
        return
    for s in p["seeds"]:
        ref = [r["kappa"] for r in rows if r["seed"] == s and r["N"] == p["reference_N"]]
        if not ref:
            continue
        for r in rows:
            if r["seed"] == s:
                ratio = r["kappa"] / ref[0]
                r["passed"] = bool(1 / p["factor"] <= ratio <= p["factor"])


# -- bounds-table / lemma-a-check ------------------------------------------------

def _bounds_worker(alpha):
    row = {"alpha": alpha, "phi": bounds.phi(alpha)}
    if alpha < 0.25:
        lo, up = bounds.mz_frame_bounds(alpha)
        row.update(kappa_bound=bounds.kadec_condition_bound(alpha),
                   weight_bound=bounds.weight_abs_sum_bound(alpha),
                   frame_lower=lo, frame_upper=up)
    if alpha > 0:
        row.update(neg_lower_N=bounds.neg_weight_lower_bound(alpha),
                   neg_upper_N=bounds.neg_weight_upper_threshold(alpha))
        if alpha < 0.15:
            row["neg_lower_N_corollary"] = bounds.neg_weight_lower_bound_corollary(alpha)
    return row


def _lemma_tasks(p):
    start = p["N_min"] + p["N_min"] % 2
    return [(a, N) for a in p["alpha"] for N in range(max(2, start), p["N_max"] + 1, 2)]


def _lemma_worker(task):
    alpha, N = task
    rep = lemma_a_check(N, alpha)
    return {"alpha": alpha, "N": N, "max_value": rep.max_value,
            "min_margin": rep.min_margin, "passed": rep.passed}


_SWEEP_DEFAULTS = {"alpha": [0.1], "N": [32, 128, 512], "trials": 100, "seed": 0}
_SWEEP_DOCS = {"alpha": "perturbation budgets", "N": "half-widths",
               "trials": "random grids per (alpha, N), seeds seed..seed+trials-1",
               "seed": "first Philox seed"}
_CONV_DOCS = {"alpha": "perturbation budget", "N": "half-widths", "kind": "random or alternating",
              "seed": "grid seed (random kind)", "function": "test function name",
              "points": "equispaced points for sup errors"}

EXPERIMENTS = {e.name: e for e in [
    Experiment(
        "kadec-sweep", "||F - F~|| / sqrt(2N+1) and singular values against phi(alpha)",
        dict(_SWEEP_DEFAULTS),
        ("alpha", "N", "seed", "diff_ratio", "phi", "sigma_min_ratio", "sigma_max_ratio", "passed"),
        ("alpha", "N", "seed"), _sweep_tasks, _kadec_worker, docs=_SWEEP_DOCS),
    Experiment(
        "conditioning-sweep", "condition number and 2-norm Lebesgue constant",
        dict(_SWEEP_DEFAULTS),
        ("alpha", "N", "seed", "kappa", "kappa_bound", "lebesgue", "lebesgue_bound", "passed"),
        ("alpha", "N", "seed"), _sweep_tasks, _conditioning_worker, docs=_SWEEP_DOCS),
    Experiment(
        "weights-sweep", "exactness, sum and absolute sum of quadrature weights",
        dict(_SWEEP_DEFAULTS),
        ("alpha", "N", "min_weight", "abs_sum", "exactness_residual", "seed",
         "sum_rel_error", "abs_sum_bound", "passed"),
        ("alpha", "N", "seed"), _sweep_tasks, _weights_worker, docs=_SWEEP_DOCS),
    Experiment(
        "neg-weight-search", "first even N with a negative central weight (alternating grid)",
        {"alpha": [0.2], "Nmax": 100, "tol": 1e-12, "skip_certified": True},
        ("alpha", "N", "w0", "negative", "lower_bound_N", "passed"),
        ("alpha", "N"), _neg_tasks, _neg_worker, _neg_summary,
        docs={"alpha": "perturbation budgets", "Nmax": "largest N scanned",
              "tol": "solver tolerance; detection threshold is -10*tol*2*pi",
              "skip_certified": "start above the certified nonnegativity bound"}),
    Experiment(
        "interp-convergence", "interpolation error against the best-approximation bound",
        {"alpha": 0.2, "N": list(range(8, 41, 2)), "kind": "random", "seed": 0,
         "function": "runge_trig", "points": 4000},
        ("alpha", "N", "seed", "kind", "function", "interp_error", "best_error",
         "bound_factor", "bound", "passed"),
        ("alpha", "N"), _conv_tasks, _interp_worker, _slope_summary("interp_error"),
        docs=_CONV_DOCS),
    Experiment(
        "quad-convergence", "quadrature error against the smoothness-class bound",
        {"alpha": 0.2, "N": [16, 32, 64, 128, 256], "kind": "random", "seed": 0,
         "function": "sigma_smooth_1"},
        ("alpha", "N", "seed", "kind", "function", "error", "bound", "passed"),
        ("alpha", "N"), _conv_tasks, _quad_worker, _slope_summary("error"),
        docs={k: v for k, v in _CONV_DOCS.items() if k != "points"}),
    Experiment(
        "mz-decay", "worst r=2 frame constants over alternating and random grids",
        {"alpha": [0.4], "N": [16, 64, 256], "random": 20, "seed": 0},
        MZ_COLUMNS + ("passed",), ("alpha", "N"), _mz_tasks, _mz_worker, _mz_summary,
        docs={"alpha": "perturbation budgets", "N": "half-widths",
              "random": "random grids per N besides the alternating one",
              "seed": "first Philox seed"}),
    Experiment(
        "oversample-sweep", "rectangular conditioning, least squares and min-norm weights",
        {"mode": "random", "alpha": 0.3, "epsilon": 0.1, "N": [32, 64, 128, 256, 512],
         "seeds": [0], "reference_N": 128, "factor": 1.5},
        OVERSAMPLE_COLUMNS + ("seed", "passed"), ("alpha", "N", "seed", "n"),
        _over_tasks, _over_worker,
        docs={"mode": "random (random grids, n=floor((1-epsilon)N)) or nonneg "
                      "(alternating grids, n=floor(N/pi) and floor(0.95N))",
              "alpha": "perturbation budget", "epsilon": "oversampling rate (random mode)",
              "N": "half-widths", "seeds": "grid seeds (random mode)",
              "reference_N": "N whose kappa anchors the boundedness check",
              "factor": "allowed kappa ratio to the reference"}),
    Experiment(
        "bounds-table", "closed-form bounds per alpha",
        {"alpha": [0.0, 0.1, 0.2, 0.24]},
        ("alpha", "phi", "kappa_bound", "weight_bound", "frame_lower", "frame_upper",
         "neg_lower_N", "neg_lower_N_corollary", "neg_upper_N"),
        ("alpha",), lambda p: list(p["alpha"]), _bounds_worker,
        docs={"alpha": "perturbation budgets"}),
    Experiment(
        "lemma-a-check", "sign and size of the central Lagrange function (even N)",
        {"alpha": [0.1, 0.3, 0.45], "N_min": 2, "N_max": 200},
        ("alpha", "N", "max_value", "min_margin", "passed"), ("alpha", "N"),
        _lemma_tasks, _lemma_worker,
        docs={"alpha": "perturbation budgets", "N_min": "smallest N (rounded up to even)",
              "N_max": "largest N"}),
]}


def _sort_key(key):
    def k(row):
        return tuple((row.get(c) is None, row.get(c) if row.get(c) is not None else 0)
                     for c in key)
    return k


def run_experiment(name: str, params: dict, threads: int = 1):
    """Run one experiment; returns ``(rows, summary)`` with rows sorted by key."""
    exp = EXPERIMENTS[name]
    tasks = exp.tasks(params)
    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(exp.worker, tasks))
    else:
        results = [exp.worker(t) for t in tasks]
    rows = []
    for r in results:
        rows.extend(r if isinstance(r, list) else [r])
    rows.sort(key=_sort_key(exp.key))
    if name == "oversample-sweep":
        _over_finalize(params, rows)
    summary = exp.summarize(params, rows) if exp.summarize else {}
    return rows, summary
