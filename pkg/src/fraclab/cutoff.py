"""Logarithmic cutoffs, fractional commutators, and weighted product bounds.

The log-linear cutoff phi_{r,R} equals 1 inside radius r, 0 outside R, and
interpolates linearly in log |x| between.  Its fractional seminorm in the
critically weighted Lebesgue space decays like a negative power of
log(R/r), which is the mechanism that localizes energy estimates at
negligible cost.  The fractional Leibniz commutator

    C[f, g] = (-Delta)^alpha (fg) - g (-Delta)^alpha f - f (-Delta)^alpha g

is measured against products of fractional norms in power-weighted
Lebesgue spaces; the admissible power weights are exactly |x|^a with
-N < a < N (p - 1).
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .grid import RadialFn, RadialGrid, weighted_lp_norm
from .params import Params
from .transform import frac_power

#: default sweep of cutoff aspect ratios R/r
DEFAULT_RATIO_SWEEP = (1e2, 1e3, 1e4, 1e5)


@dataclass(frozen=True)
class CutoffSpec:
    """Inner and outer radii of a logarithmic cutoff."""
    r: float
    R: float

    def __post_init__(self):
        if not (0.0 < self.r < self.R):
            raise InvalidArgumentError(
                f"need 0 < r < R, got r={self.r!r}, R={self.R!r}")

    @property
    def ratio(self) -> float:
        return self.R / self.r


def log_cutoff(spec: CutoffSpec, grid: RadialGrid) -> RadialFn:
    """Sample the three-branch log-linear cutoff at the grid nodes."""
    if spec.r < grid.r_min * 10.0 or spec.R > grid.r_max / 10.0:
        raise InvalidArgumentError(
            f"cutoff radii ({spec.r!r}, {spec.R!r}) need one decade of "
            f"margin inside the grid [{grid.r_min!r}, {grid.r_max!r}]")
    x = grid.nodes
    mid = np.log(spec.R / x) / np.log(spec.R / spec.r)
    vals = np.where(x < spec.r, 1.0, np.where(x > spec.R, 0.0, mid))
    return RadialFn(grid, vals)


def cutoff_weighted_norm(spec: CutoffSpec, params: Params,
                         grid: RadialGrid) -> float:
    """Critically weighted L^q norm of the fractional gradient of the cutoff.

    Computes || |x|^{t/crit} (-Delta)^{s/2} phi ||_{L^q} with
    q = 2 crit / (crit - 2); the weight exponent satisfies
    q t / crit = s q - N, which makes the norm invariant under joint
    rescaling of (r, R).
    """
    phi = log_cutoff(spec, grid)
    g = frac_power(phi, params.s, params)
    g = RadialFn(grid, np.abs(g.values))
    return weighted_lp_norm(g, params.q, params.q * params.t / params.crit,
                            params)


def cutoff_sweep(params: Params, grid: RadialGrid, r: float = None,
                 ratios=DEFAULT_RATIO_SWEEP) -> dict:
    """Cutoff norms over an aspect-ratio sweep and the fitted decay slope.

    Fits log(norm) against log(log(R/r)); the predicted slope is -1/crit.
    """
    ratios = [float(x) for x in ratios]
    if len(ratios) < 2:
        raise InvalidArgumentError("need at least two aspect ratios")
    if r is None:
        # center the widest cutoff in the grid
        r = float(np.sqrt(grid.r_min * grid.r_max / max(ratios)))
    rows = []
    for ratio in ratios:
        spec = CutoffSpec(r, r * ratio)
        norm = cutoff_weighted_norm(spec, params, grid)
        rows.append({"r": r, "R": r * ratio, "ratio": ratio, "norm": norm})
    x = np.log(np.log(ratios))
    y = np.log([row["norm"] for row in rows])
    slope = float(np.polyfit(x, y, 1)[0])
    for row in rows:
        row["fitted_slope"] = slope
    return {"rows": rows, "fitted_slope": slope,
            "predicted_slope": -1.0 / params.crit}


def commutator(f: RadialFn, g: RadialFn, alpha: float,
               params: Params) -> RadialFn:
    """Fractional Leibniz defect of the pair (f, g) at order alpha."""
    if not (0.0 < alpha < 0.5):
        raise InvalidArgumentError(
            f"commutator order must lie in (0, 1/2), got {alpha!r}")
    fg = RadialFn(f.grid, f.values * g.values)
    lead = frac_power(fg, 2.0 * alpha, params)
    left = frac_power(f, 2.0 * alpha, params)
    right = frac_power(g, 2.0 * alpha, params)
    vals = lead.values - g.values * left.values - f.values * right.values
    return RadialFn(f.grid, vals)


def ap_power_weight_check(a: float, p_exp: float, N: int) -> bool:
    """Whether the power weight |x|^a is admissible for exponent p."""
    if p_exp <= 1.0:
        raise InvalidArgumentError(f"need p > 1, got {p_exp!r}")
    return -N < a < N * (p_exp - 1.0)


def _frac_or_identity(f: RadialFn, beta: float, params: Params) -> RadialFn:
    if beta == 0.0:
        return f
    return frac_power(f, beta, params)


def kpv_ratio(f: RadialFn, g: RadialFn, alpha: float, alpha1: float,
              alpha2: float, p_exp: float, p1: float, p2: float,
              a: float, a1: float, a2: float, params: Params) -> float:
    """Observed constant of the weighted fractional product estimate.

    Returns ||C[f,g]||_{L^p, |x|^a} divided by the product of
    ||(-Delta)^{alpha_i} . ||_{L^{p_i}, |x|^{a_i}} norms of f and g, under
    the splitting relations alpha1 + alpha2 = alpha, 1/p = 1/p1 + 1/p2,
    a/p = a1/p1 + a2/p2, with both weights admissible.
    """
    if abs(alpha1 + alpha2 - alpha) > 1e-12:
        raise InvalidArgumentError("orders must satisfy alpha1+alpha2=alpha")
    if min(alpha1, alpha2) < 0.0:
        raise InvalidArgumentError("component orders must be nonnegative")
    if abs(1.0 / p1 + 1.0 / p2 - 1.0 / p_exp) > 1e-12:
        raise InvalidArgumentError("exponents must satisfy 1/p=1/p1+1/p2")
    if abs(a1 / p1 + a2 / p2 - a / p_exp) > 1e-12:
        raise InvalidArgumentError("weights must satisfy a/p=a1/p1+a2/p2")
    for ai, pi in ((a1, p1), (a2, p2)):
        if not ap_power_weight_check(ai, pi, params.N):
            raise InvalidArgumentError(
                f"weight exponent {ai!r} fails the power-weight test "
                f"for p={pi!r}")
    comm = commutator(f, g, alpha, params)
    comm = RadialFn(comm.grid, np.abs(comm.values))
    num = weighted_lp_norm(comm, p_exp, a, params)
    nf = weighted_lp_norm(
        _frac_or_identity(f, 2.0 * alpha1, params).__abs__(), p1, a1, params)
    ng = weighted_lp_norm(
        _frac_or_identity(g, 2.0 * alpha2, params).__abs__(), p2, a2, params)
    return num / (nf * ng)


def paper_kpv_instance(params: Params) -> dict:
    """The exponent/weight choice used by the localized energy estimate."""
    crit, q, s, t = params.crit, params.q, params.s, params.t
    p_exp = 1.0 / (1.0 / crit + 1.0 / q)
    a1 = -t
    a2 = q * t / crit
    a = p_exp * (a1 / crit + a2 / q)
    return {"alpha": s / 2.0, "alpha1": 0.0, "alpha2": s / 2.0,
            "p_exp": p_exp, "p1": crit, "p2": q, "a": a, "a1": a1, "a2": a2}
