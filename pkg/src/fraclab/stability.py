"""Deficit functional, manifold projection, and the sharpness experiments.

The deficit of a radial function u is the dual-space norm of its
Euler-Lagrange residual (-Delta)^s u - u|u|^{p-1} |x|^{-t}.  It is computed
through the equivalent identity

    Gamma(u) = || u - (-Delta)^{-s} [ u|u|^{p-1} |x|^{-t} ] ||_{Hs},

which is exact in the log-Fourier calculus and avoids the catastrophic
cancellation of forming the residual directly.

The projection onto the manifold of nu-fold superpositions of dilated
extremal profiles is a Gauss-Newton minimization in the coordinates
(weights, log scales).  All inner products against manifold tangents are
evaluated through the extremal equation as plain weighted quadratures, so
the first-order optimality conditions are satisfied to quadrature
precision rather than transform precision.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .bubble import Bubble, bubble_derivative, dilate
from .errors import (DegenerateConfigurationError, InvalidArgumentError,
                     SolverFailureError)
from .grid import RadialFn, integrate_radial
from .interaction import qij
from .params import Params
from .transform import get_engine, hs_norm

#: default perturbation sizes for the sharpness sweep
DEFAULT_KAPPAS = (1e-4, 3e-4, 1e-3, 3e-3, 1e-2)


@dataclass
class BubbleFamily:
    """A weighted family of dilates of a common extremal profile."""
    weights: np.ndarray
    scales: np.ndarray

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        self.scales = np.asarray(self.scales, dtype=float)
        if self.weights.shape != self.scales.shape or self.weights.ndim != 1:
            raise InvalidArgumentError("weights and scales must be matching "
                                       "1-d arrays")
        if np.any(self.scales <= 0.0):
            raise InvalidArgumentError("scales must be positive")

    @property
    def nu(self) -> int:
        return len(self.scales)


@dataclass
class StabilityReport:
    gamma: float
    distance: float
    family: BubbleFamily
    ortho_residuals: np.ndarray
    interactions: np.ndarray
    energy: float
    energy_window_ok: bool
    converged: bool = True
    trace: list = field(default_factory=list, repr=False)


def deficit(u: RadialFn, params: Params) -> float:
    """Dual norm of the Euler-Lagrange residual of u."""
    eng = get_engine(u.grid, params.N)
    pu = eng.lift(u.values)
    g = eng.lift(np.abs(u.values) ** (params.p - 1.0) * u.values)
    g = g * eng.r ** (-params.t)
    inv = eng.frac_inverse_padded(g, 2.0 * params.s)
    diff = pu - inv
    # the pads carry extension artifacts, not data; the residual of record
    # is supported on the grid window
    windowed = np.zeros_like(diff)
    windowed[eng.window] = diff[eng.window]
    diff = windowed
    return float(np.sqrt(max(eng.sobolev_form_padded(diff, diff,
                                                     2.0 * params.s), 0.0)))


def _weighted(fn: RadialFn, params: Params) -> float:
    return integrate_radial(fn, -params.t, params)


def _tangent_data(V: Bubble, family: BubbleFamily):
    """Dilates and scale derivatives of the profile at the family's scales."""
    params = V.params
    Vs = [dilate(V, lam, params) for lam in family.scales]
    Vds = [bubble_derivative(V, lam) for lam in family.scales]
    return Vs, Vds


def _superposition(family: BubbleFamily, Vs) -> np.ndarray:
    out = np.zeros_like(Vs[0].values)
    for a, v in zip(family.weights, Vs):
        out += a * v.values
    return out


def _gram_and_gradient(params: Params, family: BubbleFamily, Vs, Vds,
                       rho: RadialFn):
    """Gauss-Newton system from equation-route inner products.

    Tangent directions are V_i (weight) and a_i lam_i Vdot_i (log scale);
    every Sobolev pairing against them reduces to a weighted quadrature via
    (-Delta)^s V_lam = V_lam^p |x|^{-t} and its scale derivative.
    """
    nu = family.nu
    p = params.p
    n_par = 2 * nu
    gram = np.zeros((n_par, n_par))
    grad = np.zeros(n_par)
    vp = [v**p for v in Vs]
    dv = [p * (v ** (p - 1.0) * d) for v, d in zip(Vs, Vds)]
    tang_scale = family.weights * family.scales
    for i in range(nu):
        grad[i] = _weighted(vp[i] * rho, params)
        grad[nu + i] = tang_scale[i] * _weighted(dv[i] * rho, params)
        for j in range(nu):
            gram[i, j] = _weighted(vp[i] * Vs[j], params)
            gram[i, nu + j] = tang_scale[j] * _weighted(dv[j] * Vs[i], params)
            gram[nu + i, nu + j] = (tang_scale[i] * tang_scale[j]
                                    * _weighted(dv[i] * Vds[j], params))
    gram[nu:, :nu] = gram[:nu, nu:].T
    gram = 0.5 * (gram + gram.T)
    return gram, grad


def _merge_collisions(family: BubbleFamily, dln: float) -> BubbleFamily:
    """Merge scales closer than one grid step, reducing the family size."""
    order = np.argsort(family.scales)
    w, lam = list(family.weights[order]), list(family.scales[order])
    i = 0
    while i + 1 < len(lam):
        if abs(np.log(lam[i + 1] / lam[i])) < dln:
            warnings.warn(
                f"merging colliding scales {lam[i]!r} and {lam[i + 1]!r}",
                RuntimeWarning)
            lam[i] = float(np.sqrt(lam[i] * lam[i + 1]))
            w[i] = w[i] + w[i + 1]
            del lam[i + 1], w[i + 1]
        else:
            i += 1
    return BubbleFamily(np.array(w), np.array(lam))


def _seed_scales(u: RadialFn, params: Params, nu: int) -> BubbleFamily:
    """Seed scales from local maxima of the scale-covariant detector."""
    r = u.grid.nodes
    det = r ** ((params.N - 2.0 * params.s) / 2.0) * np.abs(u.values)
    interior = (det[1:-1] >= det[:-2]) & (det[1:-1] >= det[2:])
    idx = np.where(interior)[0] + 1
    if len(idx) == 0:
        idx = np.array([np.argmax(det)])
    top = idx[np.argsort(det[idx])[::-1][:nu]]
    scales = 1.0 / r[np.sort(top)]
    if len(scales) < nu:
        scales = np.concatenate([scales,
                                 np.full(nu - len(scales), scales[-1])])
    return BubbleFamily(np.ones(nu), scales)


def project_multibubble(u: RadialFn, nu: int, V: Bubble,
                        init: BubbleFamily | None = None,
                        max_iter: int = 60, tol: float = 1e-12,
                        neighborhood: float = 1.0) -> StabilityReport:
    """Nearest weighted nu-bubble superposition to u in the Sobolev norm."""
    params = V.params
    if nu < 1:
        raise InvalidArgumentError(f"need nu >= 1, got {nu!r}")
    if init is None:
        family = _seed_scales(u, params, nu)
    else:
        family = BubbleFamily(np.array(init.weights, dtype=float),
                              np.array(init.scales, dtype=float))
        if family.nu != nu:
            raise InvalidArgumentError("init size does not match nu")
    dln = u.grid.dln
    if family.nu > 1:
        gaps = np.abs(np.diff(np.log(np.sort(family.scales))))
        if np.any(gaps < dln):
            raise DegenerateConfigurationError(
                "initial scales collide within one grid step")

    def objective(fam, Vs):
        rho = RadialFn(u.grid, u.values - _superposition(fam, Vs))
        return hs_norm(rho, params) ** 2, rho

    Vs, Vds = _tangent_data(V, family)
    f_val, rho = objective(family, Vs)
    u_scale = hs_norm(u, params)
    trace = [f_val]
    converged = False
    for _ in range(max_iter):
        gram, grad = _gram_and_gradient(params, family, Vs, Vds, rho)
        gnorm = np.max(np.abs(grad))
        # relative stationarity, with an absolute floor at roundoff level
        # of the quadratures that assemble the gradient
        gtol = tol * np.sqrt(f_val) + 1e-15 * max(u_scale, 1.0)
        if gnorm <= gtol:
            converged = True
            break
        try:
            step = np.linalg.solve(gram, grad)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(gram, grad, rcond=None)[0]
        # backtracking line search on the squared distance; once the
        # model's predicted decrease falls below the evaluation noise of
        # the objective, measured comparisons are meaningless and the full
        # step is taken on the strength of the local quadratic model
        predicted = float(grad @ step)
        noise = 1e-11 * np.sqrt(f_val) * max(u_scale, 1.0)
        if predicted <= noise:
            cand = _merge_collisions(BubbleFamily(
                family.weights + step[: family.nu],
                family.scales * np.exp(step[family.nu:])), dln)
            Vs_c = [dilate(V, lam, params) for lam in cand.scales]
            f_c, rho_c = objective(cand, Vs_c)
            if f_c > f_val + 10.0 * noise:
                converged = gnorm <= 1e-8 * np.sqrt(f_val) + 1e-13 * max(
                    u_scale, 1.0)
                break
            family, f_val, rho = cand, f_c, rho_c
            Vs = Vs_c
            Vds = [bubble_derivative(V, lam) for lam in family.scales]
            trace.append(f_val)
            continue
        accepted = False
        scale = 1.0
        for _bt in range(30):
            cand = BubbleFamily(
                family.weights + scale * step[: family.nu],
                family.scales * np.exp(scale * step[family.nu:]))
            cand = _merge_collisions(cand, dln)
            if cand.nu != family.nu:
                family = cand
                Vs, Vds = _tangent_data(V, family)
                f_val, rho = objective(family, Vs)
                trace.append(f_val)
                accepted = True
                break
            Vs_c = [dilate(V, lam, params) for lam in cand.scales]
            f_c, rho_c = objective(cand, Vs_c)
            if f_c < f_val:
                family, f_val, rho = cand, f_c, rho_c
                Vs = Vs_c
                Vds = [bubble_derivative(V, lam) for lam in family.scales]
                trace.append(f_val)
                accepted = True
                break
            scale *= 0.5
        if not accepted:
            # stationary to line-search resolution
            converged = gnorm <= 1e-8 * np.sqrt(f_val) + 1e-13 * max(
                u_scale, 1.0)
            break
    if not converged:
        gram, grad = _gram_and_gradient(params, family, Vs, Vds, rho)
        if np.max(np.abs(grad)) > 1e-8 * np.sqrt(f_val) + 1e-13 * max(
                u_scale, 1.0):
            raise SolverFailureError(
                "projection failed to reach stationarity", history=trace)
        converged = True

    _, grad = _gram_and_gradient(params, family, Vs, Vds, rho)
    distance = float(np.sqrt(max(f_val, 0.0)))
    if distance > neighborhood:
        warnings.warn(
            f"projection distance {distance!r} exceeds the configured "
            f"neighborhood {neighborhood!r}", RuntimeWarning)
    inter = np.array([
        _weighted(Vs[i] ** params.p * Vs[j], params)
        for i in range(family.nu) for j in range(i + 1, family.nu)])
    gamma = deficit(u, params)
    energy = hs_norm(u, params) ** 2
    return StabilityReport(
        gamma=gamma,
        distance=distance,
        family=family,
        ortho_residuals=np.abs(grad),
        interactions=inter,
        energy=energy,
        energy_window_ok=energy_window_check(u, nu, V),
        converged=converged,
        trace=trace,
    )


def default_bump(grid) -> RadialFn:
    """Smooth nonnegative bump supported on 1 < r < 3."""
    r = grid.nodes
    x = (r - 2.0) / 1.0
    inside = np.abs(x) < 1.0
    vals = np.zeros_like(r)
    with np.errstate(divide="ignore", over="ignore"):
        vals[inside] = np.exp(-1.0 / (1.0 - x[inside] ** 2))
    return RadialFn(grid, vals)


def sharpness_family(V: Bubble, scales, phi: RadialFn,
                     kappa: float) -> RadialFn:
    """Perturbed superposition u = sum_i dilate(V, lam_i) + kappa * phi."""
    params = V.params
    if kappa < 0.0:
        raise InvalidArgumentError(f"kappa must be nonnegative, got {kappa!r}")
    grid = V.grid
    if phi.grid != grid:
        raise InvalidArgumentError("bump must live on the profile's grid")
    if np.any(phi.values < 0.0):
        raise InvalidArgumentError("bump must be nonnegative")
    edge = max(1, grid.n // 16)
    if np.any(phi.values[:edge] != 0.0) or np.any(phi.values[-edge:] != 0.0):
        raise InvalidArgumentError("bump support overflows the grid")
    scales = np.asarray(scales, dtype=float)
    margin = 10.0
    if np.any(1.0 / scales < grid.r_min * margin) or np.any(
            1.0 / scales > grid.r_max / margin):
        raise InvalidArgumentError(
            "family cores fall outside the grid (support overflow)")
    vals = np.zeros(grid.n)
    for lam in scales:
        vals += dilate(V, float(lam), params).values
    return RadialFn(grid, vals + kappa * phi.values)


def separation_scales(params: Params, kappa: float) -> np.ndarray:
    """Symmetric two-scale family with interaction parameter kappa-matched.

    The separation delta = kappa^{2/(N-2s)} makes the pairwise interaction
    delta^{(N-2s)/2} comparable to the perturbation size kappa.
    """
    delta = kappa ** (2.0 / (params.N - 2.0 * params.s))
    return np.array([np.sqrt(delta), 1.0 / np.sqrt(delta)])


def energy_window_check(u: RadialFn, nu: int, V: Bubble) -> bool:
    """Whether the squared energy of u sits in the nu-bubble window."""
    params = V.params
    energy = hs_norm(u, params) ** 2
    unit = V.mu ** ((params.N - params.t) / (2.0 * params.s - params.t))
    return (nu - 0.5) * unit <= energy <= (nu + 0.5) * unit


def stability_sweep(V: Bubble, phi: RadialFn | None = None,
                    kappas=DEFAULT_KAPPAS, nu: int = 2,
                    scales=None) -> dict:
    """Deficit and manifold distance of the perturbed families across kappa.

    Returns per-kappa rows plus the log-log slopes of deficit and distance
    versus kappa and the spread of their ratio across the sweep.
    """
    params = V.params
    if phi is None:
        phi = default_bump(V.grid)
    kappas = [float(k) for k in kappas]
    rows = []
    for kappa in kappas:
        fam_scales = (separation_scales(params, kappa) if scales is None
                      else np.asarray(scales, dtype=float))
        u = sharpness_family(V, fam_scales, phi, kappa)
        init = BubbleFamily(np.ones(len(fam_scales)), fam_scales)
        report = project_multibubble(u, len(fam_scales), V, init=init)
        rows.append({
            "nu": nu,
            "kappa": kappa,
            "gamma": report.gamma,
            "distance": report.distance,
            "ratio": report.distance / report.gamma,
            "max_ortho_residual": float(np.max(report.ortho_residuals)),
            "min_Q": float(min(
                qij(a, b) for i, a in enumerate(report.family.scales)
                for b in report.family.scales[i + 1:])) if nu > 1 else 1.0,
            "max_interaction": float(np.max(report.interactions))
            if len(report.interactions) else 0.0,
            "energy": report.energy,
            "energy_window_ok": report.energy_window_ok,
        })
    k = np.log([row["kappa"] for row in rows])
    slope_gamma = float(np.polyfit(k, np.log([r["gamma"] for r in rows]),
                                   1)[0])
    slope_distance = float(np.polyfit(
        k, np.log([r["distance"] for r in rows]), 1)[0])
    ratios = [r["ratio"] for r in rows]
    inter_const = max(r["max_interaction"] / r["gamma"] for r in rows)
    return {
        "rows": rows,
        "slope_gamma": slope_gamma,
        "slope_distance": slope_distance,
        "ratio_spread": max(ratios) / min(ratios),
        "interaction_constant": inter_const,
    }


def check_elementary_inequalities(p_exp: float, samples: int = 100_000,
                                  nu: int = 3, seed: int = 0) -> dict:
    """Empirical constants of the pointwise power-difference inequalities.

    (A) |(a+b)|a+b|^{p-1} - a|a|^{p-1}| <= p|a|^{p-1}|b|
          + C ( [p>2] |a|^{p-2} b^2 + |b|^p )
    (B) |S|S|^{p-1} - sum_i a_i|a_i|^{p-1}| <= C sum_{i != j}
          |a_i|^{p-1} |a_j|,   S = sum_i a_i.
    Draws are signed log-uniform over six decades; returns the max observed
    ratios, which bound the constants from below and stay finite.
    """
    if p_exp <= 1.0:
        raise InvalidArgumentError(f"need p > 1, got {p_exp!r}")
    if samples < 1:
        raise InvalidArgumentError("need at least one sample")
    rng = np.random.default_rng(seed)

    def draw(size):
        mag = 10.0 ** rng.uniform(-3.0, 3.0, size)
        return mag * rng.choice([-1.0, 1.0], size)

    def odd_pow(x):
        return np.abs(x) ** (p_exp - 1.0) * x

    a, b = draw(samples), draw(samples)
    lhs = np.abs(odd_pow(a + b) - odd_pow(a))
    excess = np.maximum(lhs - p_exp * np.abs(a) ** (p_exp - 1.0) * np.abs(b),
                        0.0)
    denom = np.abs(b) ** p_exp
    if p_exp > 2.0:
        denom = denom + np.abs(a) ** (p_exp - 2.0) * b**2
    max_a = float(np.max(excess / denom))

    ai = draw((samples, nu))
    total = ai.sum(axis=1)
    lhs_b = np.abs(odd_pow(total) - odd_pow(ai).sum(axis=1))
    mag = np.abs(ai)
    denom_b = np.zeros(samples)
    for i in range(nu):
        for j in range(nu):
            if i != j:
                denom_b += mag[:, i] ** (p_exp - 1.0) * mag[:, j]
    max_b = float(np.max(lhs_b / denom_b))
    return {"max_ratio_A": max_a, "max_ratio_B": max_b}
