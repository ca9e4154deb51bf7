"""Discretized transfer-operator machinery on the n x n cell grid.

The square is split into n^2 cells [i/n, (i+1)/n) x [j/n, (j+1)/n).  The
discretized target assigns each cell its exact integral of
exp(-a^2 (u - v)^2), computed in closed form, and the one-coordinate
update kernels are the conditionals of that discrete joint.  Deriving the
conditionals from the same matrix makes the discretized target an exact
fixed point of the random-scan operator, so stationarity checks are limited
only by floating-point roundoff rather than by quadrature error.

The random-scan step averages the two conditional updates computed from the
same input ("update u" and "update v" each with probability 1/2); it never
alternates sweeps.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .density import ModelParams, SQRT_PI
from .version import __version__

# Grid weights must stay normalized this tightly at all times.
NORMALIZATION_TOL = 1e-12

# Pairwise-distance scans are quadratic in n; keep them on small grids.
DBAR_MAX_N = 200


class GridError(ValueError):
    """Raised for malformed grid inputs (shape mismatches, bad weights)."""


class MixingNotConverged(RuntimeError):
    """Raised when the TV curve fails to cross the threshold in time.

    Carries the partial ``tv_curve`` so callers can inspect or dump it.
    """

    def __init__(self, message: str, tv_curve: np.ndarray):
        super().__init__(message)
        self.tv_curve = tv_curve


@dataclass
class GridDistribution:
    """Probability weights over the n x n (or length-n) cell grid."""

    n: int
    weights: np.ndarray

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if self.n <= 0:
            raise GridError(f"grid size must be positive, got {self.n}")
        if self.weights.shape not in ((self.n, self.n), (self.n,)):
            raise GridError(
                f"weights shape {self.weights.shape} does not match n={self.n}"
            )
        if np.any(self.weights < 0.0):
            raise GridError("negative cell weight")
        total = float(self.weights.sum())
        if not math.isfinite(total) or abs(total - 1.0) > NORMALIZATION_TOL:
            raise GridError(f"weights sum to {total!r}, expected 1 within {NORMALIZATION_TOL}")

    @property
    def ndim(self) -> int:
        return self.weights.ndim


@dataclass
class GibbsKernel1D:
    """Row-stochastic one-coordinate update kernel on n cells.

    Row j is the distribution of the next cell given current cell j; it is
    the conditional of the discrete joint, so the joint's marginal is its
    reversible stationary distribution.
    """

    n: int
    matrix: np.ndarray
    marginal: np.ndarray


@dataclass
class MixingResult:
    a: float
    n: int
    epsilon: float
    start: tuple[float, float]
    t_mix: int
    tv_curve: np.ndarray = field(repr=False)

    def as_dict(self) -> dict:
        return {
            "a": self.a,
            "n": self.n,
            "epsilon": self.epsilon,
            "start": list(self.start),
            "t_mix": self.t_mix,
            "tv_final": float(self.tv_curve[-1]),
        }

    def tv_curve_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("t,tv\n")
            for t, tv in enumerate(self.tv_curve):
                fh.write(f"{t},{float(tv)!r}\n")


# ======================================================================
# construction
# ======================================================================

def _cell_masses(a: float, n: int) -> np.ndarray:
    """Exact integral of exp(-a^2 (u-v)^2) over each diagonal offset.

    With h = 1/n the mass of cell (i, j) depends only on k = i - j and
    equals the second difference G(kh+h) - 2 G(kh) + G(kh-h) of the second
    antiderivative G of the profile.  The constant part of G is removed
    (expm1 instead of exp) so the difference stays accurate for small a,
    and the remaining terms are O(z^2), safe for large a as well.  Stray
    negatives at the underflow floor are clamped to zero.
    """
    h = 1.0 / n
    z = np.arange(n + 1, dtype=float) * h
    az = a * z
    g2 = (SQRT_PI / (2.0 * a)) * z * special.erf(az) + np.expm1(-az * az) / (2.0 * a * a)
    m = np.empty(n, dtype=float)
    m[0] = 2.0 * (g2[1] - g2[0])
    if n > 1:
        m[1:] = g2[2:] - 2.0 * g2[1:-1] + g2[:-2]
    return np.maximum(m, 0.0)


def _joint_matrix(params: ModelParams, n: int) -> np.ndarray:
    if n < 2:
        raise GridError(f"grid needs at least 2 cells per axis, got {n}")
    m = _cell_masses(params.a, n)
    idx = np.abs(np.arange(n)[:, None] - np.arange(n)[None, :])
    return m[idx]


def build_discretized_target(params: ModelParams, n: int) -> GridDistribution:
    """Cell-integral discretization of the diagonal-band target, normalized."""
    joint = _joint_matrix(params, n)
    joint /= joint.sum()
    return GridDistribution(n=n, weights=joint)


def build_kernel_1d(params: ModelParams, n: int) -> GibbsKernel1D:
    """One-coordinate Gibbs kernel: row j = conditional of cell i given j."""
    joint = _joint_matrix(params, n)
    joint /= joint.sum()
    marginal = joint.sum(axis=0)
    matrix = (joint / marginal[np.newaxis, :]).T
    return GibbsKernel1D(n=n, matrix=matrix, marginal=marginal)


def point_mass(u: float, v: float, n: int) -> GridDistribution:
    """Point mass on the cell containing (u, v)."""
    if not (0.0 <= u <= 1.0 and 0.0 <= v <= 1.0):
        raise GridError(f"start ({u}, {v}) outside the unit square")
    weights = np.zeros((n, n), dtype=float)
    i = min(int(u * n), n - 1)
    j = min(int(v * n), n - 1)
    weights[i, j] = 1.0
    return GridDistribution(n=n, weights=weights)


# ======================================================================
# evolution
# ======================================================================

class _Operator:
    """Preallocated random-scan step: p -> (C*colsum + R*rowsum)/2."""

    def __init__(self, params: ModelParams, n: int):
        joint = _joint_matrix(params, n)
        joint /= joint.sum()
        col_marg = joint.sum(axis=0)
        row_marg = joint.sum(axis=1)
        self.cond_u_given_v = joint / col_marg[np.newaxis, :]
        self.cond_v_given_u = joint / row_marg[:, np.newaxis]
        self.target = joint
        self.n = n
        self._buf_u = np.empty_like(joint)
        self._buf_v = np.empty_like(joint)

    def step(self, p: np.ndarray, renormalize: bool = True) -> np.ndarray:
        col_sum = p.sum(axis=0)
        row_sum = p.sum(axis=1)
        np.multiply(self.cond_u_given_v, col_sum[np.newaxis, :], out=self._buf_u)
        np.multiply(self.cond_v_given_u, row_sum[:, np.newaxis], out=self._buf_v)
        np.add(self._buf_u, self._buf_v, out=p)
        p *= 0.5
        if renormalize:
            p /= p.sum()
        return p

    def tv_to_target(self, p: np.ndarray, scratch: np.ndarray) -> float:
        np.subtract(p, self.target, out=scratch)
        np.abs(scratch, out=scratch)
        return 0.5 * float(scratch.sum())


def evolve_2d(
    dist: GridDistribution,
    steps: int,
    params: ModelParams,
    renormalize: bool = True,
) -> GridDistribution:
    """Apply ``steps`` random-scan operator steps to a 2-D distribution."""
    if dist.ndim != 2:
        raise GridError("evolve_2d needs a 2-D grid distribution")
    if steps < 0:
        raise GridError("steps must be >= 0")
    op = _Operator(params, dist.n)
    p = dist.weights.copy()
    for _ in range(steps):
        op.step(p, renormalize=renormalize)
    return GridDistribution(n=dist.n, weights=p)


def tv_distance(p: GridDistribution, q: GridDistribution) -> float:
    """Total variation distance, half the L1 difference of cell weights."""
    if p.weights.shape != q.weights.shape:
        raise GridError(
            f"shape mismatch {p.weights.shape} vs {q.weights.shape}"
        )
    return 0.5 * float(np.abs(p.weights - q.weights).sum())


def find_mixing_time(
    start: tuple[float, float],
    epsilon: float,
    params: ModelParams,
    n: int,
    max_steps: int,
) -> MixingResult:
    """First t with TV(law of X(t), discretized target) <= epsilon.

    Evolves the point mass on the start's cell, recording the full TV
    curve.  Raises MixingNotConverged (curve attached) when the threshold
    is not crossed within max_steps.
    """
    if not (0.0 < epsilon < 1.0):
        raise GridError(f"epsilon must lie in (0, 1), got {epsilon}")
    op = _Operator(params, n)
    p = point_mass(start[0], start[1], n).weights
    scratch = np.empty_like(p)
    curve = np.empty(max_steps + 1, dtype=float)
    curve[0] = op.tv_to_target(p, scratch)
    if curve[0] <= epsilon:
        return MixingResult(params.a, n, epsilon, tuple(start), 0, curve[:1].copy())
    for t in range(1, max_steps + 1):
        op.step(p)
        tv = op.tv_to_target(p, scratch)
        curve[t] = tv
        if tv <= epsilon:
            return MixingResult(params.a, n, epsilon, tuple(start), t, curve[: t + 1].copy())
    raise MixingNotConverged(
        f"TV still {curve[max_steps]:.6f} > {epsilon} after {max_steps} steps "
        f"(a={params.a}, n={n})",
        curve,
    )


# ======================================================================
# worst-case distances over starting cells
# ======================================================================

def _check_dbar_n(n: int) -> None:
    if n > DBAR_MAX_N:
        raise GridError(
            f"pairwise worst-case distance is restricted to n <= {DBAR_MAX_N}, got {n}"
        )


def _max_tv_to_marginal(power: np.ndarray, marginal: np.ndarray) -> float:
    return 0.5 * float(np.abs(power - marginal[np.newaxis, :]).sum(axis=1).max())


def _max_pairwise_tv(power: np.ndarray) -> float:
    worst = 0.0
    for i in range(power.shape[0] - 1):
        d = 0.5 * float(np.abs(power[i + 1 :] - power[i]).sum(axis=1).max())
        if d > worst:
            worst = d
    return worst


def worst_case_distance_d(t: int, params: ModelParams, n: int) -> float:
    """max over starting cells of TV(t-step law, stationary marginal)."""
    if t < 0:
        raise GridError("t must be >= 0")
    kernel = build_kernel_1d(params, n)
    power = np.eye(n)
    for _ in range(t):
        power = power @ kernel.matrix
    return _max_tv_to_marginal(power, kernel.marginal)


def worst_case_distance_dbar(
    s: int, t: int, params: ModelParams, n: int
) -> tuple[float, float, float]:
    """Pairwise worst-case distances (dbar(s), dbar(t), dbar(s+t)).

    Computed from one incremental sequence of kernel powers so the three
    are mutually consistent.  Restricted to n <= DBAR_MAX_N.
    """
    if s < 0 or t < 0:
        raise GridError("s and t must be >= 0")
    _check_dbar_n(n)
    kernel = build_kernel_1d(params, n)
    lo, hi = min(s, t), max(s, t)
    power = np.eye(n)
    for _ in range(lo):
        power = power @ kernel.matrix
    power_lo = power.copy()
    for _ in range(hi - lo):
        power = power @ kernel.matrix
    power_hi = power
    power_sum = power_lo @ power_hi
    dbar_lo = _max_pairwise_tv(power_lo)
    dbar_hi = _max_pairwise_tv(power_hi) if hi != lo else dbar_lo
    dbar_sum = _max_pairwise_tv(power_sum)
    if s <= t:
        return dbar_lo, dbar_hi, dbar_sum
    return dbar_hi, dbar_lo, dbar_sum


# ======================================================================
# set probabilities and image export
# ======================================================================

def _axis_coverage(lo: float, hi: float, n: int) -> np.ndarray:
    """Fraction of each cell [i/n, (i+1)/n) covered by [lo, hi]."""
    edges = np.arange(n + 1, dtype=float) / n
    left = np.maximum(edges[:-1], lo)
    right = np.minimum(edges[1:], hi)
    return np.clip((right - left) * n, 0.0, 1.0)


def set_probability(dist: GridDistribution, boxes) -> float:
    """Probability of a union of disjoint axis-aligned boxes.

    Boxes are (u_lo, u_hi, v_lo, v_hi); cells cut by a box boundary
    contribute proportionally to covered area.
    """
    if dist.ndim != 2:
        raise GridError("set_probability needs a 2-D grid distribution")
    total = 0.0
    for (u_lo, u_hi, v_lo, v_hi) in boxes:
        if not (0.0 <= u_lo <= u_hi <= 1.0 and 0.0 <= v_lo <= v_hi <= 1.0):
            raise GridError(f"box {(u_lo, u_hi, v_lo, v_hi)} not within the unit square")
        wu = _axis_coverage(u_lo, u_hi, dist.n)
        wv = _axis_coverage(v_lo, v_hi, dist.n)
        total += float(wu @ dist.weights @ wv)
    return total


CORNER_BOXES = ((0.0, 0.25, 0.0, 0.25), (0.75, 1.0, 0.75, 1.0))


def export_heatmap(dist: GridDistribution, path, params: ModelParams | None = None) -> None:
    """Write a 16-bit binary PGM (P5) image of the weights plus a sidecar.

    Per-image min-max normalization; darker pixels mean higher density.
    Array orientation: image row i is u-cell i, column j is v-cell j.
    A flat distribution maps to a constant all-white image.
    """
    if dist.ndim != 2:
        raise GridError("export_heatmap needs a 2-D grid distribution")
    w = dist.weights
    w_min, w_max = float(w.min()), float(w.max())
    if w_max > w_min:
        norm = (w - w_min) / (w_max - w_min)
    else:
        norm = np.zeros_like(w)
    pixels = np.round((1.0 - norm) * 65535.0).astype(">u2")
    path = str(path)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{dist.n} {dist.n}\n65535\n".encode("ascii"))
        fh.write(pixels.tobytes())
    sidecar = {
        "format": "PGM P5, 16-bit big-endian, min-max normalized, darker = higher",
        "n": dist.n,
        "a": None if params is None else params.a,
        "version": __version__,
    }
    with open(path + ".json", "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")
