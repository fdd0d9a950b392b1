"""Command-line experiment runner with cached profiles and CSV output.

Experiments are configured by a flat text file of ``key = value`` lines,
run deterministically given (config, seed), and write plain CSV (UTF-8,
LF, shortest-representation floats) plus a run manifest recording the
configuration echo, library versions, wall time, cache usage, and any
warnings raised during the run.

Solved extremal profiles are cached under the directory named by the
``FRACLAB_CACHE_DIR`` environment variable (defaulting to
``~/.cache/fraclab``), keyed by (N, s, t, r_min, r_max, n, tol).
"""

import argparse
import csv
import os
import sys
import time
import warnings
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .bubble import dilate, dump_bubble, load_bubble, solve_bubble
from .cutoff import DEFAULT_RATIO_SWEEP, cutoff_sweep, kpv_ratio, paper_kpv_instance
from .errors import FracLabError
from .grid import (DEFAULT_N_NODES, DEFAULT_R_MAX, DEFAULT_R_MIN, RadialFn,
                   make_log_grid)
from .interaction import DEFAULT_Q_SWEEP, interaction_sweep
from .params import Params
from .spectrum import linearized_eigs, report_text
from .stability import (DEFAULT_KAPPAS, BubbleFamily, project_multibubble,
                        stability_sweep)

EXPERIMENTS = ("solve-bubble", "spectrum", "interaction-sweep",
               "cutoff-sweep", "kpv-sweep", "stability-sweep", "project")

CACHE_ENV = "FRACLAB_CACHE_DIR"


def _fmt(value) -> str:
    """Shortest-representation text for CSV cells."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def parse_config(path: Path) -> dict:
    """Parse a flat key = value configuration file."""
    cfg = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(),
                                 start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FracLabError(
                f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        cfg[key.strip()] = value.strip()
    return cfg


def _get_float(cfg, key, default=None):
    if key in cfg:
        return float(cfg[key])
    if default is None:
        raise FracLabError(f"config is missing required key {key!r}")
    return default


def _get_int(cfg, key, default=None):
    if key in cfg:
        return int(cfg[key])
    if default is None:
        raise FracLabError(f"config is missing required key {key!r}")
    return default


def _get_list(cfg, key, default):
    if key not in cfg:
        return list(default)
    return [float(x) for x in cfg[key].replace(",", " ").split()]


def _params_and_grid(cfg):
    params = Params(_get_int(cfg, "N"), _get_float(cfg, "s"),
                    _get_float(cfg, "t"))
    grid = make_log_grid(_get_float(cfg, "r_min", DEFAULT_R_MIN),
                         _get_float(cfg, "r_max", DEFAULT_R_MAX),
                         _get_int(cfg, "n", DEFAULT_N_NODES))
    return params, grid


def cache_dir() -> Path:
    root = os.environ.get(CACHE_ENV)
    if root:
        return Path(root)
    return Path.home() / ".cache" / "fraclab"


def cache_bubble(params: Params, grid, tol: float = 1e-10):
    """Solve the extremal profile, reusing the on-disk cache when valid."""
    key = (f"bubble_N{params.N}_s{params.s!r}_t{params.t!r}"
           f"_{grid.r_min!r}_{grid.r_max!r}_{grid.n}_{tol!r}.txt")
    path = cache_dir() / key
    if path.exists():
        try:
            return load_bubble(path.read_text(encoding="utf-8")), True
        except (FracLabError, ValueError, KeyError, OSError) as exc:
            warnings.warn(f"cache file {path} unreadable ({exc}); recomputing",
                          RuntimeWarning)
    bubble = solve_bubble(params, grid, tol=tol)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_bubble(bubble), encoding="utf-8")
    return bubble, False


def write_csv(path: Path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _run_solve_bubble(cfg, params, grid, out, rng):
    tol = _get_float(cfg, "tol", 1e-10)
    bubble, hit = cache_bubble(params, grid, tol)
    (out / "bubble.txt").write_text(dump_bubble(bubble), encoding="utf-8")
    return {"residual": bubble.residual, "mu": bubble.mu,
            "cache_hit": hit}


def _run_spectrum(cfg, params, grid, out, rng):
    tol = _get_float(cfg, "tol", 1e-10)
    bubble, hit = cache_bubble(params, grid, tol)
    k = _get_int(cfg, "k", 5)
    scale = _get_float(cfg, "scale", 1.0)
    report = linearized_eigs(bubble, k=k, scale=scale)
    (out / "spectrum.txt").write_text(report_text(report), encoding="utf-8")
    header = (["N", "s", "t", "lambda", "k"]
              + [f"mu_{i + 1}" for i in range(k)]
              + ["gap_margin", "trimmed_nodes"])
    row = ([params.N, params.s, params.t, scale, k]
           + [float(v) for v in report.eigenvalues]
           + [report.gap_margin, report.trimmed_nodes])
    write_csv(out / "spectrum.csv", header, [row])
    return {"eigenvalues": list(map(float, report.eigenvalues)),
            "cache_hit": hit}


def _run_interaction(cfg, params, grid, out, rng):
    tol = _get_float(cfg, "tol", 1e-10)
    bubble, hit = cache_bubble(params, grid, tol)
    alpha = _get_float(cfg, "alpha", params.p)
    beta = _get_float(cfg, "beta", 1.0)
    q_values = _get_list(cfg, "q_values", DEFAULT_Q_SWEEP)
    sweep = interaction_sweep(bubble, alpha, beta, q_values)
    rows = [
        [params.N, params.s, params.t, alpha, beta, q, integral,
         sweep["predicted_exponent"], sweep["fit"]["exponent"],
         sweep["fit"]["residual"]]
        for q, integral in zip(sweep["q"], sweep["integrals"])
    ]
    write_csv(out / "interaction.csv",
              ["N", "s", "t", "alpha", "beta", "Q", "integral",
               "predicted_exponent", "fitted_exponent", "residual"], rows)
    return {"fit": sweep["fit"], "cache_hit": hit}


def _run_cutoff(cfg, params, grid, out, rng):
    ratios = _get_list(cfg, "ratios", DEFAULT_RATIO_SWEEP)
    r = float(cfg["r"]) if "r" in cfg else None
    sweep = cutoff_sweep(params, grid, r=r, ratios=ratios)
    rows = [
        [params.N, params.s, params.t, row["r"], row["R"], row["ratio"],
         row["norm"], row["fitted_slope"]]
        for row in sweep["rows"]
    ]
    write_csv(out / "cutoff.csv",
              ["N", "s", "t", "r", "R", "ratio", "norm", "fitted_slope"],
              rows)
    return {"fitted_slope": sweep["fitted_slope"],
            "predicted_slope": sweep["predicted_slope"]}


def _run_kpv(cfg, params, grid, out, rng):
    tol = _get_float(cfg, "tol", 1e-10)
    bubble, hit = cache_bubble(params, grid, tol)
    inst = paper_kpv_instance(params)
    scales = _get_list(cfg, "scales", (1e-2, 1.0, 1e2))
    rows = []
    for lam in scales:
        f = dilate(bubble, lam, params)
        g = RadialFn(grid, np.exp(-(grid.nodes * lam) ** 2 / 2.0))
        ratio = kpv_ratio(f, g, inst["alpha"], inst["alpha1"], inst["alpha2"],
                          inst["p_exp"], inst["p1"], inst["p2"], inst["a"],
                          inst["a1"], inst["a2"], params)
        rows.append([inst["alpha1"], inst["alpha2"], inst["p1"], inst["p2"],
                     inst["a1"], inst["a2"], ratio])
    write_csv(out / "kpv.csv",
              ["alpha1", "alpha2", "p1", "p2", "a1", "a2", "ratio"], rows)
    return {"ratios": [row[-1] for row in rows], "cache_hit": hit}


def _run_stability(cfg, params, grid, out, rng):
    tol = _get_float(cfg, "tol", 1e-10)
    bubble, hit = cache_bubble(params, grid, tol)
    kappas = _get_list(cfg, "kappas", DEFAULT_KAPPAS)
    nu = _get_int(cfg, "nu", 2)
    sweep = stability_sweep(bubble, kappas=kappas, nu=nu)
    rows = [
        [params.N, params.s, params.t, row["nu"], row["kappa"], row["gamma"],
         row["distance"], row["ratio"], sweep["slope_gamma"],
         sweep["slope_distance"], row["max_ortho_residual"], row["min_Q"],
         row["energy"], row["energy_window_ok"]]
        for row in sweep["rows"]
    ]
    write_csv(out / "stability.csv",
              ["N", "s", "t", "nu", "kappa", "gamma", "distance", "ratio",
               "slope_gamma", "slope_distance", "max_ortho_residual",
               "min_Q", "energy", "energy_window_ok"], rows)
    return {"slope_gamma": sweep["slope_gamma"],
            "slope_distance": sweep["slope_distance"],
            "ratio_spread": sweep["ratio_spread"], "cache_hit": hit}


def _run_project(cfg, params, grid, out, rng):
    tol = _get_float(cfg, "tol", 1e-10)
    bubble, hit = cache_bubble(params, grid, tol)
    scales = _get_list(cfg, "scales", (1e-2, 1.0, 1e2))
    weights = _get_list(cfg, "weights", [1.0] * len(scales))
    vals = np.zeros(grid.n)
    for w, lam in zip(weights, scales):
        vals += w * dilate(bubble, lam, params).values
    u = RadialFn(grid, vals)
    init = BubbleFamily(np.asarray(weights), np.asarray(scales))
    report = project_multibubble(u, len(scales), bubble, init=init)
    rows = [[params.N, params.s, params.t, len(scales), report.gamma,
             report.distance, float(np.max(report.ortho_residuals)),
             report.energy, report.energy_window_ok]]
    write_csv(out / "project.csv",
              ["N", "s", "t", "nu", "gamma", "distance",
               "max_ortho_residual", "energy", "energy_window_ok"], rows)
    return {"distance": report.distance, "cache_hit": hit}


_RUNNERS = {
    "solve-bubble": _run_solve_bubble,
    "spectrum": _run_spectrum,
    "interaction-sweep": _run_interaction,
    "cutoff-sweep": _run_cutoff,
    "kpv-sweep": _run_kpv,
    "stability-sweep": _run_stability,
    "project": _run_project,
}


def write_manifest(out: Path, experiment, cfg, seed, threads, elapsed,
                   caught, summary):
    lines = [f"experiment = {experiment}"]
    for key in sorted(cfg):
        lines.append(f"config.{key} = {cfg[key]}")
    lines.append(f"seed = {seed}")
    lines.append(f"threads = {threads}")
    lines.append(f"python = {sys.version.split()[0]}")
    lines.append(f"numpy = {np.__version__}")
    lines.append(f"scipy = {scipy.__version__}")
    lines.append(f"fraclab = {__version__}")
    lines.append(f"wall_time_s = {elapsed:.3f}")
    for key in sorted(summary):
        lines.append(f"result.{key} = {summary[key]}")
    for w in caught:
        lines.append(f"warning = {w.message}")
    (out / "manifest.txt").write_text("\n".join(lines) + "\n",
                                      encoding="utf-8")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fraclab",
        description="Numerical experiments for fractional Hardy-Sobolev "
                    "extremals and their stability.")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", type=Path, default=None,
                        help="key = value configuration file")
        sp.add_argument("--out", type=Path, default=Path("."),
                        help="output directory")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--threads", type=int, default=1)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = parse_config(args.config) if args.config else {}
        params, grid = _params_and_grid(cfg)
    except (FracLabError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    rng = np.random.default_rng(args.seed)
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            summary = _RUNNERS[args.experiment](cfg, params, grid, out, rng)
    except FracLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    elapsed = time.perf_counter() - start
    write_manifest(out, args.experiment, cfg, args.seed, args.threads,
                   elapsed, caught, summary)
    return 0


if __name__ == "__main__":
    sys.exit(main())
