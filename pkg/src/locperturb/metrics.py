"""Utility metrics for the perturbation distributions.

Sums over the infinite analytic support are split into an explicit middle
range plus closed-form geometric tails, so every value is exact up to
floating point rather than silently truncated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .distributions import KIND_QUERY1, KIND_QUERY2, DiscretePmf
from .errors import AmbiguousRankingError, ContractError, ParameterError
from .params import PoiPrior


@dataclass(frozen=True)
class ToleranceRegion:
    """Open interval around the true location preserving the PoI ranking.

    Bounds are half-way bisector points between consecutive-rank PoIs
    (infinite when unconstrained) and are always open: a point exactly on
    a bisector ties two PoIs and breaks the strict ranking.
    """

    m_minus: float
    m_plus: float
    open_minus: bool = True
    open_plus: bool = True

    def contains(self, z: float) -> bool:
        lo_ok = z > self.m_minus if self.open_minus else z >= self.m_minus
        hi_ok = z < self.m_plus if self.open_plus else z <= self.m_plus
        return lo_ok and hi_ok


def _geom_tail_sums(edge_mass: float, rho: float) -> tuple[float, float]:
    """(sum of masses, sum of k * mass) over a geometric tail.

    The tail starts one step beyond an edge with mass ``edge_mass`` and
    decays by e^{-rho} per step; k counts steps beyond the edge.
    """
    q = math.exp(-rho)
    return edge_mass * q / (1.0 - q), edge_mass * q / (1.0 - q) ** 2


def _structure_edges(pmf: DiscretePmf) -> tuple[int, int]:
    """Offsets outside of which the analytic pmf is purely geometric."""
    if pmf.kind == KIND_QUERY2:
        return min(0, 2 * pmf.target), max(0, 2 * pmf.target)
    return 0, 0


def _expected_weight(pmf: DiscretePmf, weight, left_cut: int, right_cut: int) -> float:
    """Sum of weight(z) * mass(z) where weight is linear with |slope| = 1
    outside [left_cut, right_cut]."""
    total = sum(weight(z) * pmf.analytic_mass(z) for z in range(left_cut, right_cut + 1))
    rho = pmf.params.rho
    tail_mass_r, tail_k_r = _geom_tail_sums(pmf.analytic_mass(right_cut), rho)
    total += weight(right_cut) * tail_mass_r + tail_k_r
    tail_mass_l, tail_k_l = _geom_tail_sums(pmf.analytic_mass(left_cut), rho)
    total += weight(left_cut) * tail_mass_l + tail_k_l
    return total


def expected_displacement(pmf: DiscretePmf) -> float:
    """Expected |output offset|, in grid steps."""
    left, right = _structure_edges(pmf)
    return _expected_weight(pmf, abs, min(left, pmf.lo), max(right, pmf.hi))


def expected_distance_error(pmf: DiscretePmf, L: int) -> float:
    """Expected | |L| - |L - z| |: how far the reported distance to the
    PoI at offset L drifts from the true distance, in grid steps."""
    if pmf.kind == KIND_QUERY2 and pmf.target != L:
        raise ContractError(f"L={L} does not match the pmf target {pmf.target}")
    if L == 0:
        raise ParameterError("L must be a nonzero offset")

    def err(z: int) -> float:
        return abs(abs(L) - abs(L - z))

    left, right = _structure_edges(pmf)
    # err is linear (slope 1) only beyond min(0, 2L) and max(0, 2L).
    left = min(left, 0, 2 * L)
    right = max(right, 0, 2 * L)
    return _expected_weight(pmf, err, min(left, pmf.lo), max(right, pmf.hi))


def directional_mass_ratio(pmf: DiscretePmf) -> float:
    """Mass on the prior side over mass on the anti-prior side (offset 0
    excluded); exactly e^{alpha rho} for the single-peak construction."""
    if pmf.kind != KIND_QUERY1:
        raise ContractError(f"directional mass ratio needs a query1 pmf, got {pmf.kind!r}")
    rho = pmf.params.rho
    s = 1 if pmf.target > 0 else -1
    pos = float(pmf.probs[-pmf.lo + 1 :].sum())
    neg = float(pmf.probs[: -pmf.lo].sum())
    pos += _geom_tail_sums(pmf.mass(pmf.hi), rho)[0]
    neg += _geom_tail_sums(pmf.mass(pmf.lo), rho)[0]
    return pos / neg if s > 0 else neg / pos


def compute_tolerance_limits(prior: PoiPrior) -> ToleranceRegion:
    """Maximal interval around 0 on which the distance ranking of the PoIs
    matches the ranking seen from 0.

    Every consecutive pair in the ranking contributes one bisector
    constraint: the nearer PoI must stay nearer. Two PoIs equidistant
    from 0 leave the ranking undefined and raise.
    """
    pois = prior.pois
    ranked = sorted(pois, key=abs)
    for a, b in zip(ranked[:-1], ranked[1:]):
        if abs(a) == abs(b):
            raise AmbiguousRankingError(
                f"PoIs {a} and {b} are equidistant from the true location"
            )
    m_minus, m_plus = -math.inf, math.inf
    for near, far in zip(ranked[:-1], ranked[1:]):
        bisector = (near + far) / 2.0
        if near < far:
            m_plus = min(m_plus, bisector)  # |z - near| < |z - far| iff z < bisector
        else:
            m_minus = max(m_minus, bisector)
    return ToleranceRegion(m_minus=m_minus, m_plus=m_plus)


def ranking_preservation_mass(pmf: DiscretePmf, prior: PoiPrior) -> float:
    """Total mass on grid offsets strictly inside the tolerance region."""
    region = compute_tolerance_limits(prior)
    # Smallest / largest integers strictly inside the open interval.
    lo = math.floor(region.m_minus) + 1 if math.isfinite(region.m_minus) else None
    hi = math.ceil(region.m_plus) - 1 if math.isfinite(region.m_plus) else None

    a = pmf.lo if lo is None else max(lo, pmf.lo)
    b = pmf.hi if hi is None else min(hi, pmf.hi)
    total = float(pmf.probs[a - pmf.lo : b - pmf.lo + 1].sum()) if a <= b else 0.0

    q = math.exp(-pmf.params.rho)

    def tail_inside(edge_mass: float, n_steps: int | None) -> float:
        # Geometric mass of the first n_steps beyond an edge (all if None).
        full = edge_mass * q / (1.0 - q)
        if n_steps is None:
            return full
        if n_steps <= 0:
            return 0.0
        return full * -math.expm1(n_steps * math.log(q))

    if lo is None or lo < pmf.lo:
        total += tail_inside(pmf.mass(pmf.lo), None if lo is None else pmf.lo - lo)
    if hi is None or hi > pmf.hi:
        total += tail_inside(pmf.mass(pmf.hi), None if hi is None else hi - pmf.hi)
    return total
