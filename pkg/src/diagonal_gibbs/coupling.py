"""Couplings between the comparison processes.

Three constructions, all driven by shared randomness so the coupled pair
is a deterministic function of one stream:

  Z / YPrime   monotone coupling through a shared uniform: the reflected
               walk draws the folded-Gaussian quantile, the wall chain the
               half-line truncated quantile.  Stochastic dominance of the
               two conditional CDFs keeps the pair ordered at every step.
  Y / YPrime   shared half-line draw, used by both chains while it lands
               below 1; the first draw >= 1 decouples them (nu_c1) and Y
               redraws from its own [0,1]-truncated conditional.
  Y / W        shared Gaussian increment: the free walk always accepts it,
               the wall chain accepts only moves staying inside [0,1] and
               otherwise redraws from its truncated conditional.  The paths
               agree exactly until the free walk first exits [0,1] (nu_c2).

Ordering bookkeeping for Z/YPrime: the upper draw is computed first and
passed to the folded quantile solver as a bracket, which it is entitled to
mathematically (dominance) and which removes last-ulp ties as a source of
spurious inversions.  The dominance claim itself is still tested at every
step: the folded CDF evaluated at the upper draw must reach the shared
uniform, up to DOMINANCE_TOL.  Failures of that check, and any strict
inversion of the returned pair, count as ordering violations.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .density import (
    ModelParams,
    _folded_cdf_core,
    _folded_quantile_core,
    _trunc_quantile_core,
)
from .chains import _chunk_rng, _run_chunked

PAIR_NAMES = ("Y_YPrime", "Z_YPrime", "Y_W")

# CDF-space slack for the pointwise dominance check inside the monotone
# coupling; matches the tolerance of the grid sweep below.
DOMINANCE_TOL = 1e-12


@dataclass
class CouplingReport:
    """Outcome of a batch of coupled runs.

    decoupling_times has one entry per trajectory: the step index at which
    the pair decoupled, or None when it stayed coupled for the whole run
    (for the never-decoupling Z_YPrime pair it is all None).
    ordering_violations applies to Z_YPrime and must be 0 for a correct
    implementation.  aux carries pair-specific per-trajectory extras.
    """

    pair_name: str
    trajectories: int
    steps_per_trajectory: int
    decoupling_times: list
    ordering_violations: int
    params_used: ModelParams
    seed: int
    terminal_first: np.ndarray
    terminal_second: np.ndarray
    aux: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.pair_name not in PAIR_NAMES:
            raise ValueError(f"unknown pair {self.pair_name!r}")

    def decoupled_fraction(self) -> float:
        hits = sum(1 for t in self.decoupling_times if t is not None)
        return hits / self.trajectories if self.trajectories else 0.0

    def as_dict(self) -> dict:
        return {
            "pair": self.pair_name,
            "trajectories": self.trajectories,
            "steps_per_trajectory": self.steps_per_trajectory,
            "a": self.params_used.a,
            "delta": self.params_used.delta,
            "seed": self.seed,
            "ordering_violations": self.ordering_violations,
            "decoupled_fraction": self.decoupled_fraction(),
        }

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.as_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    def decoupling_histogram_csv(self, path) -> None:
        """Histogram of decoupling times; the final row counts non-events."""
        times = [t for t in self.decoupling_times if t is not None]
        never = len(self.decoupling_times) - len(times)
        with open(path, "w") as fh:
            fh.write("decoupling_time,count\n")
            if times:
                values, counts = np.unique(np.asarray(times, dtype=np.int64), return_counts=True)
                for val, cnt in zip(values, counts):
                    fh.write(f"{int(val)},{int(cnt)}\n")
            fh.write(f"never,{never}\n")


def _times_list(times: np.ndarray) -> list:
    return [None if math.isnan(t) else int(t) for t in times]


# ======================================================================
# monotone coupling Z <= YPrime
# ======================================================================

def _monotone_core(lower_center, upper_center, shared_uniform, sigma: float):
    """Shared step logic; returns (lower_next, upper_next, dominance_ok)."""
    upper_next = _trunc_quantile_core(upper_center, sigma, 0.0, np.inf, shared_uniform)
    # Dominance of the folded CDF over the truncated one, checked at the
    # point the upper chain actually moved to.
    dominance_ok = (
        _folded_cdf_core(lower_center, sigma, upper_next)
        >= np.asarray(shared_uniform, dtype=float) - DOMINANCE_TOL
    )
    lower_next = _folded_quantile_core(lower_center, sigma, shared_uniform, hi=upper_next)
    return lower_next, upper_next, dominance_ok


def monotone_couple_step(lower_center, upper_center, shared_uniform, params: ModelParams):
    """One coupled step of (reflected walk, wall-free chain).

    Requires lower_center <= upper_center (elementwise) and guarantees
    lower_next <= upper_next.  Marginals: folded Gaussian around the lower
    center; half-line truncated Gaussian around the upper center.
    """
    lower_center = np.asarray(lower_center, dtype=float)
    upper_center = np.asarray(upper_center, dtype=float)
    if np.any(lower_center < 0.0):
        raise ValueError("lower_center must be >= 0")
    if np.any(lower_center > upper_center):
        raise ValueError("monotone coupling requires lower_center <= upper_center")
    lower_next, upper_next, _ = _monotone_core(
        lower_center, upper_center, shared_uniform, params.sigma
    )
    if np.ndim(shared_uniform) == 0 and lower_next.ndim == 0:
        return float(lower_next), float(upper_next)
    return lower_next, upper_next


def couple_z_yprime(
    start: float,
    steps: int,
    params: ModelParams,
    seed: int,
    trajectories: int = 1,
    threads: int = 1,
) -> CouplingReport:
    """Monotone-coupled batch with Z(0) = YPrime(0) = start.

    ordering_violations counts strict inversions of the returned pair plus
    failures of the per-step dominance check.
    """
    z0 = float(start)
    if z0 < 0.0:
        raise ValueError(f"start must be >= 0, got {z0}")
    sigma = params.sigma

    def worker(chunk_index: int, width: int):
        rng = _chunk_rng(seed, chunk_index)
        z = np.full(width, z0)
        y = np.full(width, z0)
        violations = 0
        for _ in range(steps):
            u = rng.random(width)
            z_next, y_next, dominance_ok = _monotone_core(z, y, u, sigma)
            violations += int(np.count_nonzero(~dominance_ok))
            violations += int(np.count_nonzero(z_next > y_next))
            z, y = z_next, y_next
        return z, y, violations

    parts = _run_chunked(worker, trajectories, threads)
    return CouplingReport(
        pair_name="Z_YPrime",
        trajectories=trajectories,
        steps_per_trajectory=steps,
        decoupling_times=[None] * trajectories,
        ordering_violations=sum(p[2] for p in parts),
        params_used=params,
        seed=seed,
        terminal_first=np.concatenate([p[0] for p in parts]),
        terminal_second=np.concatenate([p[1] for p in parts]),
    )


def verify_dominance_inequality(grid_v: int, grid_u: int, params: ModelParams) -> float:
    """Minimum of folded_cdf(v_bar; u) - truncated_cdf(v; u) over a grid.

    The sweep covers 0 <= v_bar <= v <= 3 and u in [0, 3].  The inequality
    says the folded Gaussian around the lower center puts at least as much
    mass on [0, u] as the half-line truncated Gaussian around the higher
    center, so the true minimum is >= 0; the return value is the computed
    minimum, which should sit above a small negative roundoff floor.
    """
    if grid_v < 2 or grid_u < 2:
        raise ValueError("need at least 2 grid points per axis")
    sigma = params.sigma
    centers = np.linspace(0.0, 3.0, grid_v)
    points = np.linspace(0.0, 3.0, grid_u)
    folded = _folded_cdf_core(centers[:, None], sigma, points[None, :])
    truncated = _trunc_quantile_like_cdf(centers[:, None], sigma, points[None, :])
    # For fixed u, the worst folded value over v_bar <= v is the running
    # minimum down the center axis.
    folded_running_min = np.minimum.accumulate(folded, axis=0)
    return float(np.min(folded_running_min - truncated))


def _trunc_quantile_like_cdf(center, sigma, x):
    from .density import _trunc_cdf_core

    return _trunc_cdf_core(center, sigma, 0.0, np.inf, x)


# ======================================================================
# shared half-line draw coupling Y / YPrime
# ======================================================================

def couple_y_w(
    start: float,
    steps: int,
    params: ModelParams,
    seed: int,
    trajectories: int = 1,
    threads: int = 1,
) -> CouplingReport:
    """Shared-increment coupling of the wall chain Y and the free walk W.

    Start must lie inside the middle band.  Per step: one shared Gaussian
    increment; W always takes it, Y takes it when the move stays in [0,1]
    and otherwise redraws from the truncated conditional with a fresh
    uniform.  Paths agree exactly (bitwise) until nu_c2, the free walk's
    first exit from [0,1].
    """
    w0 = float(start)
    if not (params.middle_lo <= w0 <= params.middle_hi):
        raise ValueError(
            f"start {w0} outside the middle band [{params.middle_lo}, {params.middle_hi}]"
        )
    sigma = params.sigma

    def worker(chunk_index: int, width: int):
        rng = _chunk_rng(seed, chunk_index)
        w = np.full(width, w0)
        y = np.full(width, w0)
        nu = np.full(width, np.nan)
        for t in range(steps):
            zeta = sigma * rng.standard_normal(width)
            fresh = rng.random(width)
            w = w + zeta
            y_cand = y + zeta
            inside = (y_cand >= 0.0) & (y_cand <= 1.0)
            redraw = _trunc_quantile_core(y, sigma, 0.0, 1.0, fresh)
            y = np.where(inside, y_cand, redraw)
            exited = (w < 0.0) | (w > 1.0)
            np.putmask(nu, np.isnan(nu) & exited, float(t + 1))
        return w, y, nu

    parts = _run_chunked(worker, trajectories, threads)
    nu_c2 = np.concatenate([p[2] for p in parts])
    return CouplingReport(
        pair_name="Y_W",
        trajectories=trajectories,
        steps_per_trajectory=steps,
        decoupling_times=_times_list(nu_c2),
        ordering_violations=0,
        params_used=params,
        seed=seed,
        terminal_first=np.concatenate([p[1] for p in parts]),  # Y
        terminal_second=np.concatenate([p[0] for p in parts]),  # W
        aux={"nu_c2": nu_c2},
    )


def couple_y_yprime(
    start: float,
    steps: int,
    params: ModelParams,
    seed: int,
    trajectories: int = 1,
    threads: int = 1,
) -> CouplingReport:
    """Shared-draw coupling of the wall chain Y and the half-line chain.

    Start must lie in [0, 1/2 - delta).  While coupled, one half-line
    truncated draw serves both chains; the first draw landing at or above
    1 sets nu_c1 and Y redraws from its [0,1]-truncated conditional with a
    fresh uniform.  After decoupling each chain keeps evolving under its
    own conditional.  aux reports nu_m_tilde of the Y path (first visit at
    or above 1/2 - delta) so callers can restrict events to the approach
    phase.
    """
    y0 = float(start)
    if not (0.0 <= y0 < params.middle_lo):
        raise ValueError(f"start must lie in [0, {params.middle_lo}), got {y0}")
    sigma = params.sigma
    lo_band = params.middle_lo

    def worker(chunk_index: int, width: int):
        rng = _chunk_rng(seed, chunk_index)
        y = np.full(width, y0)
        yp = np.full(width, y0)
        nu_c1 = np.full(width, np.nan)
        nu_tilde = np.full(width, np.nan)
        coupled = np.ones(width, dtype=bool)
        _hit_mask = y >= lo_band
        np.putmask(nu_tilde, _hit_mask, 0.0)
        for t in range(steps):
            shared = rng.random(width)
            fresh = rng.random(width)
            draw = _trunc_quantile_core(yp, sigma, 0.0, np.inf, shared)
            yp = draw
            overshoot = coupled & (draw >= 1.0)
            redraw_needed = overshoot | ~coupled
            redraw = _trunc_quantile_core(y, sigma, 0.0, 1.0, np.where(coupled, fresh, shared))
            y = np.where(redraw_needed, redraw, np.where(coupled, draw, y))
            np.putmask(nu_c1, np.isnan(nu_c1) & overshoot, float(t + 1))
            coupled = coupled & ~overshoot
            np.putmask(nu_tilde, np.isnan(nu_tilde) & (y >= lo_band), float(t + 1))
        return y, yp, nu_c1, nu_tilde

    parts = _run_chunked(worker, trajectories, threads)
    nu_c1 = np.concatenate([p[2] for p in parts])
    return CouplingReport(
        pair_name="Y_YPrime",
        trajectories=trajectories,
        steps_per_trajectory=steps,
        decoupling_times=_times_list(nu_c1),
        ordering_violations=0,
        params_used=params,
        seed=seed,
        terminal_first=np.concatenate([p[0] for p in parts]),   # Y
        terminal_second=np.concatenate([p[1] for p in parts]),  # YPrime
        aux={"nu_c1": nu_c1, "nu_m_tilde": np.concatenate([p[3] for p in parts])},
    )
