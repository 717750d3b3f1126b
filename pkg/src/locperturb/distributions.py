"""Discrete perturbation distributions over integer grid offsets.

Three families are constructed here, all with geometric (exp(-rho) per
step) decay and an exact analytic normalizer:

* ``query1``: single peak at the true location, full geometric decay
  toward the prior, decay suppressed by exp(-alpha * rho) away from it.
* ``query2``: twin peaks at offsets 0 and 2L for a target PoI at L,
  symmetric about L, geometric decay toward the midpoint and (suppressed)
  outward beyond the peaks. Preserves the reported distance |L - z|
  rather than the location itself.
* ``geometric``: the symmetric two-sided geometric distribution, the
  discrete analogue of Laplace noise, used as the comparison baseline.

The analytic pmf is strictly positive on every integer offset; only the
*stored* support is truncated, to a total omitted mass below
``grid.tail_mass``. Stored masses are never renormalized, so the peak
value ``p`` stays exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, ParameterError
from .params import GridSpec, PoiPrior, PrivacyParams

KIND_QUERY1 = "query1"
KIND_QUERY2 = "query2"
KIND_GEOMETRIC = "geometric"

KINDS = (KIND_QUERY1, KIND_QUERY2, KIND_GEOMETRIC)


def closed_form_p_q1(params: PrivacyParams) -> float:
    """Peak probability of the query1 distribution.

    Normalizing ``p * [1 + sum_{x>=1} e^{-x rho} (1 + e^{-alpha rho})] = 1``
    gives ``p = (1 - e^{-rho}) / (1 + e^{-(alpha+1) rho})``.
    """
    rho, alpha = params.rho, params.alpha
    return -math.expm1(-rho) / (1.0 + math.exp(-(alpha + 1.0) * rho))


def closed_form_p_q2_approx(params: PrivacyParams) -> float:
    """Large-target limit of the query2 peak probability.

    Exactly half of :func:`closed_form_p_q1`: for a far-away target the
    structure is two query1-like halves sharing the normalization.
    """
    return closed_form_p_q1(params) / 2.0


def _geometric_peak(rho: float) -> float:
    return -math.expm1(-rho) / (1.0 + math.exp(-rho))


@dataclass(frozen=True, eq=False)
class DiscretePmf:
    """A perturbation distribution over integer grid offsets.

    Attributes:
        kind: One of ``query1``, ``query2``, ``geometric``.
        params: Privacy parameters used to build it.
        grid: Grid spec (step size and truncation budget).
        target: Target PoI offset; ``None`` for the geometric baseline.
        lo: Smallest stored offset.
        hi: Largest stored offset.
        probs: Stored masses for offsets ``lo..hi`` (ascending, read-only).
        p: Exact analytic peak mass.
        stored_mass: Sum of the stored masses, >= 1 - grid.tail_mass.
    """

    kind: str
    params: PrivacyParams
    grid: GridSpec
    target: int | None
    lo: int
    hi: int
    probs: np.ndarray
    p: float
    stored_mass: float

    def __post_init__(self) -> None:
        self.probs.setflags(write=False)

    @property
    def offsets(self) -> np.ndarray:
        """Stored offsets, ascending."""
        return np.arange(self.lo, self.hi + 1)

    def mass(self, offset: int) -> float:
        """Stored mass at ``offset`` (0.0 outside the stored support)."""
        if self.lo <= offset <= self.hi:
            return float(self.probs[offset - self.lo])
        return 0.0

    def log_mass(self, offset: int) -> float:
        """Exact analytic log-mass at any integer offset (never -inf)."""
        if self.kind not in KINDS:
            raise ContractError(f"unknown pmf kind {self.kind!r}")
        rho, alpha = self.params.rho, self.params.alpha
        log_p = math.log(self.p)
        if self.kind == KIND_GEOMETRIC:
            return log_p - abs(offset) * rho
        s = 1 if self.target > 0 else -1
        u = s * offset
        if self.kind == KIND_QUERY1:
            if u >= 0:
                return log_p - u * rho
            return log_p - (-u + alpha) * rho
        span = 2 * abs(self.target)
        if 0 <= u <= span:
            return log_p - min(u, span - u) * rho
        if u < 0:
            return log_p - (-u + alpha) * rho
        return log_p - (u - span + alpha) * rho

    def analytic_mass(self, offset: int) -> float:
        """Exact analytic mass at any integer offset (strictly positive)."""
        return math.exp(self.log_mass(offset))

    def as_dict(self) -> dict[int, float]:
        """Stored support as an offset -> probability map."""
        return {int(x): float(m) for x, m in zip(self.offsets, self.probs)}


def _tail_steps(edge_mass: float, rho: float, half_budget: float) -> int:
    """Steps to keep beyond a structure edge so the omitted geometric tail
    (first omitted term = edge_mass * e^{-(k+1) rho}) stays below half_budget.
    """
    q = math.exp(-rho)
    # Tail beyond edge+k is edge_mass * q^{k+1} / (1 - q); solve for smallest k >= 1.
    bound = half_budget * -math.expm1(-rho)
    if edge_mass * q <= bound:
        return 1  # keep one exterior point regardless
    k = math.ceil(math.log(edge_mass / bound) / rho) - 1
    k = max(k, 1)
    while edge_mass * q ** (k + 1) / (1.0 - q) >= half_budget:
        k += 1
    return k


def _finish(
    kind: str,
    params: PrivacyParams,
    grid: GridSpec,
    target: int | None,
    lo: int,
    probs: np.ndarray,
    p: float,
) -> DiscretePmf:
    probs = np.asarray(probs, dtype=float)
    return DiscretePmf(
        kind=kind,
        params=params,
        grid=grid,
        target=target,
        lo=lo,
        hi=lo + len(probs) - 1,
        probs=probs,
        p=p,
        stored_mass=float(probs.sum()),
    )


def build_query1_pmf(params: PrivacyParams, grid: GridSpec, prior: PoiPrior) -> DiscretePmf:
    """Single-peak distribution biased toward the prior's target direction.

    With ``s = sign(target)`` and peak ``p = closed_form_p_q1(params)``::

        mass(0)    = p
        mass(s*x)  = p * exp(-x * rho)            x >= 1   (prior side)
        mass(-s*x) = p * exp(-(x + alpha) * rho)  x >= 1   (anti-prior side)
    """
    target = prior.require_nonzero_target()
    rho, alpha = params.rho, params.alpha
    p = closed_form_p_q1(params)
    half = grid.tail_mass / 2.0

    n_fwd = _tail_steps(p, rho, half)
    n_bwd = _tail_steps(p * math.exp(-alpha * rho), rho, half)
    # Offsets in prior-side coordinates u = s * x, from -n_bwd to n_fwd.
    u = np.arange(-n_bwd, n_fwd + 1, dtype=float)
    decay = np.where(u >= 0, u, -u + alpha)
    masses = p * np.exp(-decay * rho)

    if target > 0:
        return _finish(KIND_QUERY1, params, grid, target, -n_bwd, masses, p)
    return _finish(KIND_QUERY1, params, grid, target, -n_fwd, masses[::-1].copy(), p)


def build_query2_pmf(params: PrivacyParams, grid: GridSpec, prior: PoiPrior) -> DiscretePmf:
    """Twin-peak distribution symmetric about the target PoI.

    For a target at ``L = |target|`` steps (stated for positive target;
    negative targets mirror), with exact peak ``p``::

        mass(0) = mass(2L)      = p
        mass(x) = mass(2L - x)  = p * exp(-x * rho)            1 <= x < L
        mass(L)                 = p * exp(-L * rho)            (counted once)
        mass(-x) = mass(2L + x) = p * exp(-(x + alpha) * rho)  x >= 1

    ``p`` comes from exact normalization of this structure: finite interior
    sums plus closed-form geometric tails. A target of 0 degenerates to the
    geometric baseline.
    """
    if prior.target == 0:
        return build_geometric_pmf(params, grid)
    target = prior.target
    rho, alpha = params.rho, params.alpha
    q = math.exp(-rho)
    span = 2 * abs(target)

    # Normalizer: 2 peaks + both interior wings + midpoint + both outer tails.
    interior = q * -math.expm1(-(abs(target) - 1) * rho) / (1.0 - q)
    structure = 2.0 + 2.0 * interior + q ** abs(target) + 2.0 * math.exp(-alpha * rho) * q / (1.0 - q)
    p = 1.0 / structure

    n_out = _tail_steps(p * math.exp(-alpha * rho), rho, grid.tail_mass / 2.0)
    u = np.arange(-n_out, span + n_out + 1, dtype=float)
    decay = np.where(
        u < 0,
        -u + alpha,
        np.where(u <= span, np.minimum(u, span - u), u - span + alpha),
    )
    masses = p * np.exp(-decay * rho)

    if target > 0:
        return _finish(KIND_QUERY2, params, grid, target, -n_out, masses, p)
    return _finish(KIND_QUERY2, params, grid, target, -(span + n_out), masses[::-1].copy(), p)


def build_geometric_pmf(params: PrivacyParams, grid: GridSpec) -> DiscretePmf:
    """Symmetric two-sided geometric baseline.

    ``mass(x) = p_g * exp(-|x| * rho)`` with
    ``p_g = (1 - e^{-rho}) / (1 + e^{-rho})``.
    """
    rho = params.rho
    p = _geometric_peak(rho)
    n = _tail_steps(p, rho, grid.tail_mass / 2.0)
    x = np.arange(-n, n + 1, dtype=float)
    masses = p * np.exp(-np.abs(x) * rho)
    return _finish(KIND_GEOMETRIC, params, grid, None, -n, masses, p)


@dataclass(frozen=True, eq=False)
class AbsolutePmfView:
    """A pmf translated onto absolute physical coordinates (meters)."""

    pmf: DiscretePmf
    origin: float
    coords: np.ndarray
    probs: np.ndarray


def shift_to_absolute(pmf: DiscretePmf, input_coord: float) -> AbsolutePmfView:
    """View ``pmf`` at a physical input location.

    Offset x maps to coordinate ``input_coord + x * grid.delta``; masses
    are unchanged.
    """
    coords = input_coord + pmf.offsets * pmf.grid.delta
    return AbsolutePmfView(pmf=pmf, origin=input_coord, coords=coords, probs=pmf.probs)


def sample(pmf: DiscretePmf, seed: int | np.random.Generator, n: int) -> np.ndarray:
    """Draw ``n`` independent offsets by inverse-CDF over the stored support.

    Deterministic for a given integer seed. A draw that lands in the
    residual analytic tail (total below ``grid.tail_mass``) is clamped to
    the farthest stored offset on that side.
    """
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    # Left analytic tail sits below the first stored atom in CDF order.
    q = math.exp(-pmf.params.rho)
    left_tail = float(pmf.probs[0]) * q / (1.0 - q)
    cum = left_tail + np.cumsum(pmf.probs)
    u = rng.random(n)
    idx = np.searchsorted(cum, u, side="right")
    idx = np.clip(idx, 0, len(pmf.probs) - 1)
    return pmf.lo + idx
