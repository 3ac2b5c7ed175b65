"""Explicit failure of the p-Brunn-Minkowski inequality for V_k, 2 <= k <= n-1.

Take two k-cubes of side 2 spanning complementary-ish coordinate blocks:
K_0 on coordinates {n-k+1, ..., n} and K_1 on {1, ..., k} (1-based), so
V_k(K_0) = V_k(K_1) = 2^k.  For K_p = (1/2).K_0 +_p (1/2).K_1 the gauge at
a coordinate direction +-e_i is

    2^{-1/p}  if exactly one cube has support 1 there,
    1         if both do (overlap block, k > n/2),
    0         if neither (gap block, k < n/2),

and since the gauge is a coordinate-wise even, monotone function, K_p is
contained in the axis-aligned box with those half-lengths.  Comparing
V_k of the box with 2^k yields the failure threshold

    pbar_{n,k} =
      k / log2 binom(2k, k)                          if 2k <= n      (low)
      1 / log2 ( sum_{i=1}^k binom(2(n-k), i) )      if n < 2k <= 4n/3 - ...
                                                     i.e. 3k <= 2n   (middle)
      1 / log2 ( 2^{2(n-k)} - 1 )                    if 3k > 2n      (high)

below which the inequality

    V_k((1-t).K_0 +_p t.K_1)^{p/k} >= (1-t) V_k(K_0)^{p/k} + t V_k(K_1)^{p/k}

fails at t = 1/2.  The certificate implemented here compares V_k of the
enclosing box against 2^k directly; it decides every case at p = pbar/2
(checked for 3 <= n <= 30) and usually well beyond, but the box
relaxation can be inconclusive within a few percent of pbar on the high
branch with k = n - 1.  Along every branch pbar < 1: the low branch
decreases to 1/2 as k grows, the middle branch is below 1/log2(2n/3),
and the high branch is at most 1/log2(3).

In contrast, for k = 1 the reverse inequality always holds:

    V_1((1-t).K_0 +_p t.K_1)^p <= (1-t) V_1(K_0)^p + t V_1(K_1)^p,

with equality iff one body is {0} or the bodies are dilates.  V_1 is
(1/kappa_{n-1}) int h, linear in h, so integrating the combination gauge
(an upper bound for the support of the Wulff shape) bounds the left side
rigorously from above.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bodies import Body, Box, EmbeddedCube, PMeanSpec, pmean_values, wulff_support_upper
from .errors import DomainError
from .intrinsic import unit_ball_volume, vk_box
from .sphere import SphericalGrid, build_grid

#: Guard band for strict comparisons of rigorously bounded quantities.
COMPARISON_GUARD = 1e-12


def _check_nk(n: int, k: int) -> None:
    if n < 3:
        raise DomainError(f"counterexamples need n >= 3, got n={n}")
    if not 2 <= k <= n - 1:
        raise DomainError(f"order k must satisfy 2 <= k <= n-1, got k={k}")


def cube_pair(n: int, k: int) -> tuple[EmbeddedCube, EmbeddedCube]:
    """The two k-cubes: K_0 on the last k coordinates, K_1 on the first k."""
    _check_nk(n, k)
    K0 = EmbeddedCube(n, tuple(range(n - k, n)))
    K1 = EmbeddedCube(n, tuple(range(k)))
    return K0, K1


def branch(n: int, k: int) -> str:
    """Which threshold formula applies; decided by exact integer comparisons."""
    _check_nk(n, k)
    if 2 * k <= n:
        return "low"
    if 3 * k <= 2 * n:
        return "middle"
    return "high"


def threshold_pbar(n: int, k: int) -> float:
    """Failure threshold pbar_{n,k}; the inequality fails for all p < pbar."""
    b = branch(n, k)
    if b == "low":
        return k / math.log2(math.comb(2 * k, k))
    if b == "middle":
        total = sum(math.comb(2 * (n - k), i) for i in range(1, k + 1))
        return 1.0 / math.log2(total)
    return 1.0 / math.log2(2.0 ** (2 * (n - k)) - 1.0)


def enclosing_box(n: int, k: int, p: float) -> Box:
    """Axis-aligned box containing K_p = (1/2).K_0 +_p (1/2).K_1.

    Containment: the gauge of K_p is even and non-decreasing in |u_i|
    coordinate-wise, so K_p lies in the box whose half-lengths are the
    gauge values at the coordinate directions.
    """
    _check_nk(n, k)
    if not 0.0 < p <= 1.0:
        raise DomainError(f"p must lie in (0, 1], got {p}")
    half = 2.0 ** (-1.0 / p)
    a = []
    for i in range(n):
        in_K1 = i < k
        in_K0 = i >= n - k
        if in_K0 and in_K1:
            a.append(1.0)
        elif in_K0 or in_K1:
            a.append(half)
        else:
            a.append(0.0)
    return Box(tuple(a))


@dataclass(frozen=True)
class UpperBound:
    """Rigorous upper bound for V_k(K_p) via the enclosing box."""

    box_value: float        # V_k of the enclosing box (monotonicity of V_k)
    displayed_value: float  # the coarser per-branch closed form
    box: Box


def upper_bound_vk_kp(n: int, k: int, p: float) -> UpperBound:
    """Upper bound for V_k((1/2).K_0 +_p (1/2).K_1).

    ``box_value`` is V_k of the enclosing box, always valid since V_k is
    monotone under inclusion.  ``displayed_value`` is the per-branch
    closed form 2^k [ binom(2k,k) 2^{-k/p} | C_{n,k} 2^{-1/p} |
    (2^{2(n-k)} - 1) 2^{-1/p} ], an upper bound for the box value used to
    derive the threshold.
    """
    box = enclosing_box(n, k, p)
    box_value = vk_box(box.half_lengths, k).value
    b = branch(n, k)
    if b == "low":
        displayed = 2.0 ** k * math.comb(2 * k, k) * 2.0 ** (-k / p)
    elif b == "middle":
        total = sum(math.comb(2 * (n - k), i) for i in range(1, k + 1))
        displayed = 2.0 ** k * total * 2.0 ** (-1.0 / p)
    else:
        displayed = 2.0 ** k * (2.0 ** (2 * (n - k)) - 1.0) * 2.0 ** (-1.0 / p)
    return UpperBound(box_value=box_value, displayed_value=displayed, box=box)


@dataclass(frozen=True)
class Verdict:
    """Outcome of a rigorous inequality check.

    ``lhs`` and ``rhs`` are on the comparison scale stated by ``method``;
    ``margin`` = rhs - lhs is positive when the inequality under test
    fails by a certified amount.  ``conclusion`` is one of
    ``inequality-fails``, ``holds``, ``inconclusive``.
    """

    lhs: float
    rhs: float
    margin: float
    tolerance: float
    method: str
    conclusion: str
    extras: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "tolerance": self.tolerance,
            "method": self.method,
            "conclusion": self.conclusion,
            "extras": dict(self.extras),
        }


def verify_counterexample(n: int, k: int, p: float, guard: float = COMPARISON_GUARD) -> Verdict:
    """Certify failure of the p-Brunn-Minkowski inequality for V_k at t = 1/2.

    The inequality would give V_k(K_p)^{p/k} >= (1/2) V_k(K_0)^{p/k} +
    (1/2) V_k(K_1)^{p/k}, i.e. V_k(K_p) >= 2^k.  The verdict compares the
    rigorous upper bound V_k(enclosing box) with 2^k:

    - bound < 2^k - guard   -> ``inequality-fails`` with positive margin;
    - otherwise             -> ``inconclusive`` (an upper bound above the
      target proves nothing either way).
    """
    _check_nk(n, k)
    if not 0.0 < p <= 1.0:
        raise DomainError(f"p must lie in (0, 1], got {p}")
    ub = upper_bound_vk_kp(n, k, p)
    target = 2.0 ** k  # V_k(K_0) = V_k(K_1) = 2^k
    # Comparison scale of the stated inequality: V_k^{p/k}.
    lhs_scaled = ub.box_value ** (p / k)
    rhs_scaled = target ** (p / k)
    fails = ub.box_value < target - guard
    verdict = "inequality-fails" if fails else "inconclusive"
    return Verdict(
        lhs=lhs_scaled,
        rhs=rhs_scaled,
        margin=rhs_scaled - lhs_scaled,
        tolerance=guard,
        method="enclosing-box",
        conclusion=verdict,
        extras={
            "n": n, "k": k, "p": p, "t": 0.5,
            "branch": branch(n, k),
            "pbar": threshold_pbar(n, k),
            "vk_upper_bound": ub.box_value,
            "vk_displayed_bound": ub.displayed_value,
            "vk_target": target,
            "vk_margin": target - ub.box_value,
        },
    )


def threshold_table(n_min: int = 3, n_max: int = 10) -> list[dict]:
    """Rows (n, k, branch, pbar) for all valid (n, k) in the range."""
    if n_min < 3 or n_max < n_min:
        raise DomainError("need 3 <= n_min <= n_max")
    rows = []
    for n in range(n_min, n_max + 1):
        for k in range(2, n):
            rows.append({
                "n": n,
                "k": k,
                "branch": branch(n, k),
                "pbar": threshold_pbar(n, k),
            })
    return rows


def containment_check(n: int, k: int, p: float, grid: SphericalGrid,
                      tol: float = 1e-9) -> float:
    """Max violation of h_box >= (LP support bound of K_p) over grid nodes.

    A non-positive return certifies, on the sampled directions, that the
    outer approximation of K_p sits inside the enclosing box.  Constraint
    directions are the grid nodes plus all +-e_i (the box's contact
    directions, which product grids avoid).
    """
    _check_nk(n, k)
    K0, K1 = cube_pair(n, k)
    spec = PMeanSpec(p, 0.5, K0, K1)
    dirs = np.vstack([grid.nodes, np.eye(n), -np.eye(n)])
    gauge = pmean_values(spec, dirs)
    box = enclosing_box(n, k, p)
    worst = -math.inf
    for u in grid.nodes:
        val, _ = wulff_support_upper(dirs, gauge, u, tol=tol)
        h_box = float(box.support_values(u[None, :])[0])
        worst = max(worst, val - h_box)
    return worst


def exact_v1_ball(n: int, radius: float) -> float:
    """V_1 of a ball: n kappa_n R / kappa_{n-1} (e.g. 4 for the unit 3-ball)."""
    return n * unit_ball_volume(n) * radius / unit_ball_volume(n - 1)


def exact_v1(body: Body, n: int | None = None) -> float:
    """V_1 for bodies with closed-form mean width (Ball, Box, EmbeddedCube).

    A Ball carries no ambient dimension, so ``n`` is required for it.
    """
    from .bodies import Ball

    if isinstance(body, Ball):
        if n is None:
            raise DomainError("exact_v1 of a Ball needs the ambient dimension n")
        return exact_v1_ball(n, body.radius)
    if isinstance(body, EmbeddedCube):
        return 2.0 * len(body.indices)
    if isinstance(body, Box):
        return 2.0 * float(sum(body.half_lengths))
    raise DomainError(f"no closed-form V_1 for {type(body).__name__}")


def _v1_value(body: Body, n: int) -> float:
    return exact_v1(body, n)


def v1_reverse_check(body0: Body, body1: Body, p: float, t: float, n: int,
                     grid: SphericalGrid | None = None,
                     tol: float = 1e-9,
                     wulff_estimate: bool = False) -> Verdict:
    """Check the reverse inequality for the mean-width functional V_1:

        V_1((1-t).K_0 +_p t.K_1)^p <= (1-t) V_1(K_0)^p + t V_1(K_1)^p.

    The left side is bounded rigorously from above by integrating the
    combination gauge:  V_1(K[f]) = (1/kappa_{n-1}) int h_{K[f]} <=
    (1/kappa_{n-1}) int f,  because the support function of a Wulff shape
    never exceeds its gauge and V_1 is linear and monotone in h.  Two
    equality configurations short-circuit to exact values: one body {0}
    (gauge is t^{1/p} h_1, itself a support function) and dilate pairs
    (gauge pointwise proportional to a support function), so the
    acceptance-grade equality cases carry no quadrature error at all.

    ``conclusion`` is ``holds`` when the bound certifies the inequality
    within ``tol``, else ``inconclusive`` (the bound, not the inequality,
    failed; refine the grid).  The non-rigorous arithmetic-mean bound and,
    optionally, a Wulff LP estimate of the left side land in ``extras``.
    """
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"t must lie in [0, 1], got {t}")
    v0 = _v1_value(body0, n)
    v1 = _v1_value(body1, n)
    if p == 0.0:
        rhs = v0 ** (1.0 - t) * v1 ** t if v0 > 0.0 and v1 > 0.0 else 0.0
    else:
        rhs = (1.0 - t) * v0 ** p + t * v1 ** p

    if grid is None:
        smooth = getattr(body0, "is_smooth", False) and getattr(body1, "is_smooth", False)
        # Kinked gauges converge only at rate resolution^-2; compensate.
        res = {3: 14, 4: 8, 5: 7, 6: 5}[n] if smooth else {3: 400, 4: 48, 5: 20, 6: 10}[n]
        grid = build_grid(n, res, "product-angular")
    spec = PMeanSpec(p, t, body0, body1)
    gauge = pmean_values(spec, grid.nodes)
    kappa = unit_ball_volume(n - 1)
    mean_width_bound = float(np.dot(grid.weights, gauge)) / kappa

    extras = {
        "v1_body0": v0,
        "v1_body1": v1,
        "v1_gauge_bound": mean_width_bound,
        "arithmetic_mean_v1": (1.0 - t) * v0 + t * v1,
    }

    h0 = np.asarray(body0.support_values(grid.nodes), dtype=float)
    h1 = np.asarray(body1.support_values(grid.nodes), dtype=float)
    zero_body = (v0 == 0.0 or v1 == 0.0) and p > 0.0
    dilate_scale = None
    if not zero_body and v0 > 0.0 and np.all(h0 > 0.0):
        ratios = gauge / h0
        if np.max(ratios) - np.min(ratios) <= 1e-12 * np.max(ratios):
            dilate_scale = float(np.max(ratios))

    if zero_body:
        # Gauge is an exact support function of a scaled body: no Wulff gap.
        scale = ((1.0 - t) if v1 == 0.0 else t) ** (1.0 / p)
        exact = scale * (v0 if v1 == 0.0 else v1)
        lhs = exact ** p
        method = "degenerate-exact"
    elif dilate_scale is not None:
        lhs = (dilate_scale * v0) ** p if p > 0.0 else dilate_scale * v0
        method = "dilate-exact"
    else:
        lhs = mean_width_bound ** p if p > 0.0 else mean_width_bound
        method = "gauge-mean-width-bound"
    if wulff_estimate:
        vals = np.empty(grid.node_count)
        for i, u in enumerate(grid.nodes):
            vals[i], _ = wulff_support_upper(grid.nodes, gauge, u)
        est = float(np.dot(grid.weights, vals)) / kappa
        extras["v1_wulff_estimate"] = est ** p if p > 0.0 else est

    margin = rhs - lhs
    conclusion = "holds" if lhs <= rhs + tol else "inconclusive"
    return Verdict(
        lhs=lhs,
        rhs=rhs,
        margin=margin,
        tolerance=tol,
        method=method,
        conclusion=conclusion,
        extras=extras,
    )
