"""Path simulation: exit times, running extrema, sign frequencies.

Strictly stable specs step with exact Chambers-Mallows-Stuck increments;
everything else uses the Asmussen-Rosinski decomposition (compound
Poisson jumps of size >= eps, a Gaussian substitute for the small jumps,
and the matching drift compensation).  Exit detection uses post-step
positions, with two bias controls: the step size shrinks by the
refinement factor near the boundary, and for jump-decomposed specs the
position is checked after each compound-Poisson jump inside the step
(heavy-tailed specs exit predominantly by jumps).  The diffusion part is
applied at step ends only; the halving test quantifies the residual bias.

Paths are simulated in fixed blocks of 8192, each block drawing from a
substream keyed by (seed, stream tag, block index), so results do not
depend on how blocks are distributed over workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Optional

import numpy as np

from .concentration import b_r, h
from .errors import SpecError, UnsupportedSpecError
from .fluctuation import RenewalFunction, _stable_like
from .model import ProcessSpec, Stable, BrownianPlusCompoundPoisson
from .reporting import BoundReport

__all__ = [
    "SimPlan",
    "MCEstimate",
    "simulate_increments",
    "exit_time",
    "exit_time_samples",
    "extrema_samples",
    "sup_cdf",
    "inf_cdf",
    "sign_frequency",
    "pruitt_report",
    "exit_upper_report",
]

BLOCK = 8192


@dataclass(frozen=True)
class SimPlan:
    """Discretization plan for one simulation experiment."""

    dt: float = 1e-3
    eps: float = 5e-3
    n_paths: int = 20_000
    horizon: Optional[float] = None     # None: 50 / h(R) at the interval width
    seed: int = 20_240_817
    refine_factor: float = 1024.0       # max step shrinkage at the boundary
    refine_zone: float = 0.1            # refinement kicks in within zone * R

    def __post_init__(self):
        if self.dt <= 0 or self.eps <= 0 or self.n_paths < 1:
            raise SpecError("need dt > 0, eps > 0, n_paths >= 1")
        if self.refine_factor < 1 or not (0 <= self.refine_zone < 0.5):
            raise SpecError("need refine_factor >= 1 and refine_zone in [0, 0.5)")


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    std_error: float
    n_effective: int
    censored_fraction: float
    plan: SimPlan
    flags: tuple = ()

    def to_json_dict(self) -> dict:
        return {
            "mean": float(self.mean),
            "std_error": float(self.std_error),
            "n_effective": int(self.n_effective),
            "censored_fraction": float(self.censored_fraction),
            "flags": list(self.flags),
        }


def _rng_for(plan: SimPlan, tag: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([plan.seed, tag, block]))


# ---------------------------------------------------------------------------
# Increment machinery
# ---------------------------------------------------------------------------

def _cms_standard(rng, n, alpha, beta):
    """Standard strictly stable draws with cf exp(-|xi|^a (1 - i b tan(pi a/2) sgn xi))."""
    if alpha == 2.0:
        return rng.normal(0.0, math.sqrt(2.0), n)
    u = rng.uniform(-math.pi / 2, math.pi / 2, n)
    w = rng.standard_exponential(n)
    if beta == 0.0:
        return (np.sin(alpha * u) / np.cos(u) ** (1.0 / alpha)
                * (np.cos((1.0 - alpha) * u) / w) ** ((1.0 - alpha) / alpha))
    zeta = -beta * math.tan(math.pi * alpha / 2.0)
    b0 = math.atan(-zeta) / alpha
    s0 = (1.0 + zeta * zeta) ** (1.0 / (2.0 * alpha))
    return (s0 * np.sin(alpha * (u + b0)) / np.cos(u) ** (1.0 / alpha)
            * (np.cos(u - alpha * (u + b0)) / w) ** ((1.0 - alpha) / alpha))


class _TailSampler:
    """Inverse-CDF sampler for one side of nu restricted to |x| >= eps."""

    def __init__(self, tail_fn, eps: float):
        self.mass = float(tail_fn(eps))
        if self.mass <= 0:
            return
        hi = eps
        while float(tail_fn(hi * 2.0)) > 1e-12 * self.mass and hi < eps * 1e15:
            hi *= 2.0
        x = np.geomspace(eps, hi * 2.0, 800)
        cdf = 1.0 - np.asarray(tail_fn(x), dtype=float) / self.mass
        cdf[0] = 0.0
        keep = np.concatenate([[True], np.diff(cdf) > 0])
        self._cdf = np.minimum(cdf[keep], 1.0)
        self._logx = np.log(x[keep])

    def draw(self, rng, n: int) -> np.ndarray:
        u = rng.uniform(0.0, 1.0, n)
        return np.exp(np.interp(u, self._cdf, self._logx))


class _StableStepper:
    """Exact increments for strictly stable specs (no jump decomposition)."""

    has_jumps = False

    def __init__(self, spec):
        st = _stable_like(spec)
        self.alpha, _, self.scale = st
        self.beta = spec.beta if isinstance(spec, Stable) else 0.0

    def increments(self, rng, step):
        z = _cms_standard(rng, step.size, self.alpha, self.beta)
        return (self.scale * step) ** (1.0 / self.alpha) * z


class _ARStepper:
    """Asmussen-Rosinski decomposition at cutoff eps."""

    has_jumps = True

    def __init__(self, spec: ProcessSpec, eps: float):
        trip = spec.triplet()
        m = trip.measure
        self.pos = _TailSampler(m.upper_tail, eps)
        self.neg = _TailSampler(m.lower_tail, eps)
        self.intensity = self.pos.mass + self.neg.mass
        self.p_pos = self.pos.mass / self.intensity if self.intensity > 0 else 0.0
        if m.inner_x2 is not None:
            small_var = float(m.inner_x2(eps))
        else:
            from scipy import integrate
            edges = np.geomspace(eps * 1e-9, eps, 40)
            small_var = sum(
                integrate.quad(lambda u: u * u * (m.density(u) + m.density(-u)),
                               a, b, limit=100)[0]
                for a, b in zip(edges[:-1], edges[1:]))
        # sigma^2 xi^2 convention: the Gaussian part has variance 2 sigma^2 t
        self.gauss_var = 2.0 * trip.sigma ** 2 + small_var
        if m.outer_x1 is not None:
            annulus = float(m.outer_x1(eps)) - float(m.outer_x1(1.0))
        else:
            from scipy import integrate
            n = m.density
            annulus = integrate.quad(lambda u: u * (n(u) - n(-u)), eps, 1.0,
                                     limit=400)[0]
        self.drift = trip.gamma - annulus

    def jump_sizes(self, rng, n: int) -> np.ndarray:
        take_pos = rng.uniform(0.0, 1.0, n) < self.p_pos
        out = np.empty(n)
        n_pos = int(take_pos.sum())
        if n_pos:
            out[take_pos] = self.pos.draw(rng, n_pos)
        if n - n_pos:
            out[~take_pos] = -self.neg.draw(rng, n - n_pos)
        return out


@lru_cache(maxsize=64)
def _stepper(spec: ProcessSpec, eps: float):
    if _stable_like(spec) is not None:
        return _StableStepper(spec)
    trip = spec.triplet()
    if float(trip.measure.tail_mass(eps)) == 0.0 and trip.sigma == 0.0:
        raise UnsupportedSpecError("no sampler available for this spec")
    return _ARStepper(spec, eps)


def simulate_increments(spec: ProcessSpec, dt: float, n: int, plan: SimPlan):
    """n independent increments of X over dt (one block, for tests/oracles)."""
    rng = _rng_for(plan, 9, 0)
    stepper = _stepper(spec, plan.eps)
    step = np.full(n, dt)
    if not stepper.has_jumps:
        return stepper.increments(rng, step)
    counts = rng.poisson(stepper.intensity * dt, n)
    total = int(counts.sum())
    sums = np.zeros(n)
    if total:
        sizes = stepper.jump_sizes(rng, total)
        idx = np.repeat(np.arange(n), counts)
        np.add.at(sums, idx, sizes)
    gauss = rng.normal(0.0, math.sqrt(stepper.gauss_var * dt), n)
    return stepper.drift * dt + gauss + sums


# ---------------------------------------------------------------------------
# First exit from an interval
# ---------------------------------------------------------------------------

def _exit_block(spec, stepper, x0, R, plan, horizon, rng, n):
    """Exit times for one block of n paths from (0, R) started at x0."""
    pos = np.full(n, x0)
    t = np.zeros(n)
    tau = np.full(n, horizon)
    censored = np.zeros(n, dtype=bool)
    idx = np.arange(n)
    zone = plan.refine_zone * R
    while idx.size:
        # diffusive taper: step ~ (distance / zone)^2 dt, floored at
        # dt / refine_factor, so the miss probability per step stays flat
        # across scales at log cost in occupation time
        d = np.minimum(pos, R - pos)
        step = plan.dt * np.clip((d / zone) ** 2, 1.0 / plan.refine_factor, 1.0)
        step = np.minimum(step, np.maximum(horizon - t, 1e-12))
        exit_t = np.full(idx.size, np.inf)

        if stepper.has_jumps:
            counts = rng.poisson(stepper.intensity * step)
            total = int(counts.sum())
            jump_sum = np.zeros(idx.size)
            if total:
                with_j = np.nonzero(counts)[0]
                k = counts[with_j]
                offsets = np.concatenate([[0], np.cumsum(k)[:-1]])
                m = int(k.sum())
                sizes = stepper.jump_sizes(rng, m)
                u = rng.uniform(0.0, 1.0, m)
                # sort jump times within each path segment
                order = np.argsort(np.repeat(np.arange(with_j.size), k) + u, kind="stable")
                u = u[order]
                sizes_sorted = sizes[order]
                cs = np.cumsum(sizes_sorted)
                base = cs[offsets] - sizes_sorted[offsets]
                cum = cs - np.repeat(base, k)
                # positions after each jump (diffusion applied at step end)
                rep = np.repeat(with_j, k)
                pos_at = pos[rep] + stepper.drift * step[rep] * u + cum
                outside = (pos_at <= 0.0) | (pos_at >= R)
                u_exit = np.where(outside, u, np.inf)
                first = np.minimum.reduceat(u_exit, offsets)
                exit_t[with_j] = np.where(np.isfinite(first),
                                          t[with_j] + first * step[with_j], np.inf)
                jump_sum[with_j] = cum[np.cumsum(k) - 1]
            gauss = rng.normal(0.0, 1.0, idx.size) * np.sqrt(stepper.gauss_var * step)
            new_pos = pos + stepper.drift * step + gauss + jump_sum
        else:
            new_pos = pos + stepper.increments(rng, step)

        t = t + step
        end_exit = (new_pos <= 0.0) | (new_pos >= R)
        hit = np.isfinite(exit_t) | end_exit
        timeout = t >= horizon
        done = hit | timeout
        if np.any(done):
            d = np.nonzero(done)[0]
            tau[idx[d]] = np.where(np.isfinite(exit_t[d]), exit_t[d],
                                   np.where(end_exit[d], t[d], horizon))
            censored[idx[d]] = ~hit[d] & timeout[d]
            keep = ~done
            idx, pos, t = idx[keep], new_pos[keep], t[keep]
        else:
            pos = new_pos
    return tau, censored


def exit_time_samples(spec: ProcessSpec, x0: float, R: float, plan: SimPlan,
                      stream_tag: int = 1):
    """Per-path exit times from (0, R); block-deterministic under the seed."""
    if not (0.0 < x0 < R):
        raise ValueError(f"need 0 < x0 < R, got x0={x0}, R={R}")
    if plan.eps > R / 100.0:
        raise SpecError(f"plan.eps={plan.eps:g} above interval width / 100")
    horizon = plan.horizon if plan.horizon is not None else 50.0 / float(h(spec, R))
    stepper = _stepper(spec, plan.eps)
    taus, cens = [], []
    for block in range((plan.n_paths + BLOCK - 1) // BLOCK):
        n = min(BLOCK, plan.n_paths - block * BLOCK)
        rng = _rng_for(plan, stream_tag, block)
        tau, censored = _exit_block(spec, stepper, x0, R, plan, horizon, rng, n)
        taus.append(tau)
        cens.append(censored)
    return np.concatenate(taus), np.concatenate(cens)


def exit_time(spec: ProcessSpec, x0: float, R: float, plan: SimPlan) -> MCEstimate:
    """Mean exit time from (0, R) started at x0, with censoring diagnostics."""
    tau, censored = exit_time_samples(spec, x0, R, plan)
    cf = float(np.mean(censored))
    flags = ("biased-low",) if cf > 0.01 else ()
    return MCEstimate(
        mean=float(np.mean(tau)),
        std_error=float(np.std(tau, ddof=1) / math.sqrt(tau.size)),
        n_effective=int(tau.size),
        censored_fraction=cf,
        plan=plan,
        flags=flags,
    )


# ---------------------------------------------------------------------------
# Running extrema and sign frequency
# ---------------------------------------------------------------------------

def extrema_samples(spec: ProcessSpec, t_end: float, plan: SimPlan,
                    stream_tag: int = 2):
    """(sup, inf, final) samples of X over [0, t_end].

    The running extrema include post-jump positions inside each step for
    jump-decomposed specs; the Gaussian part contributes at step ends.
    """
    stepper = _stepper(spec, plan.eps)
    sups, infs, finals = [], [], []
    n_steps = max(1, int(math.ceil(t_end / plan.dt)))
    for block in range((plan.n_paths + BLOCK - 1) // BLOCK):
        n = min(BLOCK, plan.n_paths - block * BLOCK)
        rng = _rng_for(plan, stream_tag, block)
        pos = np.zeros(n)
        run_max = np.zeros(n)
        run_min = np.zeros(n)
        remaining = t_end
        for _ in range(n_steps):
            step_len = min(plan.dt, remaining)
            remaining -= step_len
            step = np.full(n, step_len)
            if stepper.has_jumps:
                counts = rng.poisson(stepper.intensity * step_len, n)
                total = int(counts.sum())
                jump_sum = np.zeros(n)
                if total:
                    with_j = np.nonzero(counts)[0]
                    k = counts[with_j]
                    offsets = np.concatenate([[0], np.cumsum(k)[:-1]])
                    m = int(k.sum())
                    sizes = stepper.jump_sizes(rng, m)
                    u = rng.uniform(0.0, 1.0, m)
                    order = np.argsort(np.repeat(np.arange(with_j.size), k) + u,
                                       kind="stable")
                    sizes_sorted = sizes[order]
                    u = u[order]
                    cs = np.cumsum(sizes_sorted)
                    base = cs[offsets] - sizes_sorted[offsets]
                    cum = cs - np.repeat(base, k)
                    rep = np.repeat(with_j, k)
                    pos_at = pos[rep] + stepper.drift * step_len * u + cum
                    np.maximum.at(run_max, rep, pos_at)
                    np.minimum.at(run_min, rep, pos_at)
                    jump_sum[with_j] = cum[np.cumsum(k) - 1]
                gauss = rng.normal(0.0, math.sqrt(stepper.gauss_var * step_len), n)
                pos = pos + stepper.drift * step_len + gauss + jump_sum
            else:
                pos = pos + stepper.increments(rng, step)
            np.maximum(run_max, pos, out=run_max)
            np.minimum(run_min, pos, out=run_min)
            if remaining <= 0:
                break
        sups.append(run_max.copy())
        infs.append(run_min.copy())
        finals.append(pos.copy())
    return np.concatenate(sups), np.concatenate(infs), np.concatenate(finals)


def _indicator_estimate(values: np.ndarray, plan: SimPlan) -> MCEstimate:
    p = float(np.mean(values))
    se = math.sqrt(max(p * (1.0 - p), 1.0 / values.size) / values.size)
    return MCEstimate(mean=p, std_error=se, n_effective=int(values.size),
                      censored_fraction=0.0, plan=plan)


def sup_cdf(spec: ProcessSpec, t: float, x: float, plan: SimPlan) -> MCEstimate:
    """P(sup_{s<=t} X_s < x) by indicator mean."""
    sup, _, _ = extrema_samples(spec, t, plan)
    return _indicator_estimate(sup < x, plan)


def inf_cdf(spec: ProcessSpec, t: float, x: float, plan: SimPlan) -> MCEstimate:
    """P(inf_{s<=t} X_s > -x) by indicator mean."""
    _, inf_, _ = extrema_samples(spec, t, plan)
    return _indicator_estimate(inf_ > -x, plan)


def sign_frequency(spec: ProcessSpec, t: float, plan: SimPlan) -> MCEstimate:
    """P(X_t >= 0) from terminal positions (cross-check for Gil-Pelaez)."""
    _, _, final = extrema_samples(spec, t, plan)
    return _indicator_estimate(final >= 0.0, plan)


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

def pruitt_report(spec: ProcessSpec, plan: SimPlan, t_grid=None, r_grid=None,
                  band_c: float = 50.0) -> BoundReport:
    """Empirical constants in the two-sided sup bounds

    P(sup |X_s| >= r) <= C t (h(r) + |b_r|/r)  and
    P(sup |X_s| <= r) <= C / (t (h(r) + |b_r|/r)).
    """
    if r_grid is None:
        r_grid = np.geomspace(0.25, 4.0, 5)
    if t_grid is None:
        t0 = 1.0 / float(h(spec, 1.0))
        t_grid = t0 * np.geomspace(0.1, 10.0, 5)
    r_grid = np.asarray(r_grid, dtype=float)
    t_grid = np.asarray(t_grid, dtype=float)
    hb = np.asarray(h(spec, r_grid), dtype=float) + \
        np.abs(np.asarray(b_r(spec, r_grid), dtype=float)) / r_grid
    rows, lhs, rhs, ratios = [], [], [], []
    for i, t in enumerate(t_grid):
        sup, inf_, _ = extrema_samples(spec, t, replace(plan, seed=plan.seed + i))
        sup_abs = np.maximum(sup, -inf_)
        for r, hbv in zip(r_grid, hb):
            p_ge = float(np.mean(sup_abs >= r))
            p_le = float(np.mean(sup_abs <= r))
            thb = t * hbv
            rows.append((t, r))
            lhs.append(p_ge)
            rhs.append(thb)
            ratios.append(max(p_ge / thb, p_le * thb))
    c3 = float(np.max(ratios))
    return BoundReport.from_band(
        "pruitt-sup-bounds", np.asarray(rows), np.asarray(lhs), np.asarray(rhs),
        np.asarray(ratios), (None, band_c), extras={"smallest_c": c3})


def exit_upper_report(spec: ProcessSpec, V: RenewalFunction, Vhat: RenewalFunction,
                      R: float = 1.0, x_fracs=(0.1, 0.3, 0.5, 0.7, 0.9),
                      plan: Optional[SimPlan] = None) -> BoundReport:
    """MC mean + 3 SE <= Vhat(x) V(R) at every grid point (any non-Poisson spec)."""
    plan = plan or SimPlan()
    xs = np.asarray(x_fracs, dtype=float) * R
    lhs, rhs, ratios = [], [], []
    for x in xs:
        est = exit_time(spec, float(x), R, plan)
        bound = float(Vhat(x)) * float(V(R))
        lhs.append(est.mean + 3.0 * est.std_error)
        rhs.append(bound)
        ratios.append(lhs[-1] / bound)
    return BoundReport.from_band("exit-upper", xs, lhs, rhs, ratios, (None, 1.0))
