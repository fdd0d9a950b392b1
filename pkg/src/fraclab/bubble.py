"""Extremal profile solver, dilation map, scale derivative, and serialization.

The profile V solves (-Delta)^s V = V^p / |x|^t.  It is computed by the
damped fixed-point iteration

    w_{k+1} = normalize( (-Delta)^{-s} [ w_k^p |x|^{-t} ] ),

with the L^crit weighted norm held at 1, run entirely on the padded
internal grid so every identity downstream is evaluated in the same
discrete calculus.  The converged normalized profile U is rescaled to
V = mu^{1/(p-1)} U with mu read off the iteration's Rayleigh quotient.
"""

import io

import numpy as np
from scipy.interpolate import make_interp_spline

from .errors import (
    InvalidArgumentError,
    NumericalInstabilityError,
    SolverFailureError,
)
from .grid import RadialFn, RadialGrid, integrate_radial
from .params import Params
from .transform import Engine, get_engine


class Bubble:
    """A solved extremal profile with its constant and residual certificate."""

    __slots__ = ("profile", "mu", "residual", "params")

    def __init__(self, profile: RadialFn, mu: float, residual: float,
                 params: Params):
        self.profile = profile
        self.mu = float(mu)
        self.residual = float(residual)
        self.params = params

    @property
    def grid(self) -> RadialGrid:
        return self.profile.grid

    @property
    def values(self) -> np.ndarray:
        return self.profile.values


def _lcrit_padded(eng: Engine, params: Params, padded: np.ndarray) -> float:
    integrand = np.abs(padded) ** params.crit * eng.r ** (params.N - params.t)
    return float((eng.omega * np.trapezoid(integrand, dx=eng.dln))
                 ** (1.0 / params.crit))


def _recenter_padded(eng: Engine, params: Params, v: np.ndarray):
    """Shift the profile so its weighted-mass centroid sits at log r = 0."""
    decay = params.N - 2.0 * params.s
    dens = np.abs(v) ** params.crit * eng.r ** (params.N - params.t)
    m_log = float(np.sum(eng.lw * dens) / np.sum(dens))
    k = int(np.round(m_log / eng.dln))
    frac = m_log - k * eng.dln
    out = np.roll(v, -k)
    n = eng.m
    if k > 0:
        out[n - k:] = v[n - 1] * np.exp(
            -decay * (eng.lw[n - k:] + k * eng.dln - eng.lw[n - 1])
        )
    elif k < 0:
        out[:-k] = v[0]
    if abs(frac) > 1e-15:
        spline = make_interp_spline(eng.lw, np.log(np.abs(out)), k=5)
        out = np.exp(spline(np.clip(eng.lw + frac, eng.lw[0], eng.lw[-1])))
    return out, m_log


def solve_bubble(params: Params, grid: RadialGrid, tol: float = 1e-10,
                 max_iter: int = 400) -> Bubble:
    """Solve for the normalized extremal profile on the given grid."""
    if tol < 1e-12:
        raise InvalidArgumentError(f"tolerance below solver floor: {tol!r}")
    eng = get_engine(grid, params.N)
    theta = 0.5
    u = (1.0 + eng.r**2) ** (-(params.N - 2.0 * params.s) / 2.0)
    u = u / _lcrit_padded(eng, params, u)
    eta = np.nan
    window = eng.window
    history = []
    best = np.inf
    stall = 0
    for iteration in range(max_iter):
        g = np.abs(u) ** (params.p - 1.0) * u * eng.r ** (-params.t)
        w = eng.frac_inverse_padded(g, 2.0 * params.s)
        if np.any(w[window] <= 0.0):
            raise NumericalInstabilityError(
                f"iterate lost positivity at step {iteration}"
            )
        norm_w = _lcrit_padded(eng, params, w)
        eta = 1.0 / norm_w
        v = w / norm_w
        v, _ = _recenter_padded(eng, params, v)
        v = v / _lcrit_padded(eng, params, v)
        diff = float(np.max(np.abs((v - u)[window])))
        history.append(diff)
        u = (1.0 - theta) * u + theta * v
        u = u / _lcrit_padded(eng, params, u)
        if diff < tol:
            break
        if diff < 0.5 * best:
            best, stall = diff, 0
        else:
            stall += 1
            if stall > 25:
                break  # converged to the round-off floor of the iteration
    mu = float(eta)
    scale = mu ** (1.0 / (params.p - 1.0))
    v_padded = scale * u
    # Residual certificate: the dual norm of the Euler-Lagrange residual
    # equals the Hs norm of V - (-Delta)^{-s}[V^p |x|^{-t}].
    g = v_padded ** params.p * eng.r ** (-params.t)
    gap = v_padded - eng.frac_inverse_padded(g, 2.0 * params.s)
    hs_v = eng.sobolev_form_padded(v_padded, v_padded, 2.0 * params.s)
    residual = float(
        np.sqrt(max(eng.sobolev_form_padded(gap, gap, 2.0 * params.s), 0.0))
        / np.sqrt(hs_v)
    )
    if residual > tol * 10.0 and history and history[-1] > tol:
        raise SolverFailureError(
            f"no convergence in {max_iter} iterations "
            f"(last step {history[-1]:.3e}, residual {residual:.3e})",
            history=history,
        )
    profile = RadialFn(grid, v_padded[window])
    values = profile.values
    # monotonicity up to last-bit ties: near the origin the profile is
    # flat to double precision (its variation scales like a power of r)
    slack = 16.0 * np.finfo(float).eps * values[:-1]
    if not (np.all(values > 0.0) and np.all(np.diff(values) <= slack)):
        raise NumericalInstabilityError("profile not positive decreasing")
    return Bubble(profile, mu, residual, params)


def dilate(f, lam: float, params: Params, decay: float | None = None) -> RadialFn:
    """Scale action lam^{(N-2s)/2} f(lam r), exact when lam is a node-ratio power."""
    if lam <= 0.0:
        raise InvalidArgumentError(f"dilation scale must be positive, got {lam!r}")
    profile = f.profile if isinstance(f, Bubble) else f
    if decay is None:
        decay = params.N - 2.0 * params.s
    grid = profile.grid
    eng = get_engine(grid, params.N)
    padded = eng.lift(profile.values, decay=decay)
    shift = np.log(lam) / eng.dln
    k = int(np.round(shift))
    n = eng.m
    out = np.empty(n)
    if abs(shift - k) < 1e-9:
        if k >= 0:
            out[: n - k] = padded[k:]
            out[n - k:] = padded[-1] * np.exp(
                -decay * (eng.lw[n - k:] + k * eng.dln - eng.lw[-1])
            )
        else:
            out[-k:] = padded[: n + k]
            out[:-k] = padded[0]
    else:
        positive = np.all(padded > 0.0)
        x = eng.lw + np.log(lam)
        inside = (x >= eng.lw[0]) & (x <= eng.lw[-1])
        out = np.zeros(n)
        if positive:
            spline = make_interp_spline(eng.lw, np.log(padded), k=5)
            out[inside] = np.exp(spline(x[inside]))
            out[x < eng.lw[0]] = padded[0]
            high = x > eng.lw[-1]
            out[high] = padded[-1] * np.exp(-decay * (x[high] - eng.lw[-1]))
        else:
            spline = make_interp_spline(eng.lw, padded, k=3)
            out[inside] = spline(x[inside])
    scale = lam ** ((params.N - 2.0 * params.s) / 2.0)
    return RadialFn(grid, scale * out[eng.window])


def bubble_derivative(V: Bubble, lam: float = 1.0) -> RadialFn:
    """Scale derivative d/d lam [lam^{(N-2s)/2} V(lam r)] at the given lam."""
    params = V.params
    vl = dilate(V, lam, params)
    # centered differences in log-radius give r * dV/dr
    radial = np.gradient(vl.values, vl.grid.dln)
    out = ((params.N - 2.0 * params.s) / 2.0 * vl.values + radial) / lam
    return RadialFn(vl.grid, out)


def mu_constant(V: Bubble, tol: float = 1e-4) -> float:
    """Recover mu from the profile's weighted L^{p+1} mass, cross-checked."""
    from .errors import ConsistencyFailureError

    params = V.params
    mass = integrate_radial(V.profile ** (params.p + 1.0), -params.t, params)
    mu_mass = mass ** ((params.crit - 2.0) / params.crit)
    if abs(mu_mass / V.mu - 1.0) > tol:
        raise ConsistencyFailureError(
            f"mu from mass {mu_mass} vs stored Rayleigh value {V.mu}"
        )
    return float(mu_mass)


# -- serialization -----------------------------------------------------------


def dump_bubble(V: Bubble) -> str:
    """Two-column text with a header: exact round trip via repr floats."""
    buf = io.StringIO()
    p = V.params
    buf.write(
        f"# N={p.N} s={p.s!r} t={p.t!r} mu={V.mu!r} residual={V.residual!r}\n"
    )
    for r, val in zip(V.grid.nodes, V.profile.values):
        buf.write(f"{float(r)!r} {float(val)!r}\n")
    return buf.getvalue()


def load_bubble(text: str) -> Bubble:
    lines = text.strip().splitlines()
    header = lines[0]
    if not header.startswith("# "):
        raise InvalidArgumentError("missing bubble header line")
    meta = dict(item.split("=", 1) for item in header[2:].split())
    params = Params(N=int(meta["N"]), s=float(meta["s"]), t=float(meta["t"]))
    rows = [line.split() for line in lines[1:]]
    radii = np.array([float(a) for a, _ in rows])
    vals = np.array([float(b) for _, b in rows])
    from .grid import make_log_grid

    grid = make_log_grid(float(radii[0]), float(radii[-1]), len(radii))
    profile = RadialFn(grid, vals)
    return Bubble(profile, float(meta["mu"]), float(meta["residual"]), params)
