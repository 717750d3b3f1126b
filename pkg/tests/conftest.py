"""Shared fixtures and independent brute-force oracles.

The oracles deliberately recompute things by plain summation or grid
scanning so the tests do not depend on the code paths they check.
"""

from __future__ import annotations

import math

import pytest

from locperturb import DiscretePmf, GridSpec, PoiPrior, PrivacyParams

LN2 = math.log(2.0)


@pytest.fixture
def grid() -> GridSpec:
    return GridSpec(delta=1.0, tail_mass=1e-9)


@pytest.fixture
def params_ln2_a4() -> PrivacyParams:
    return PrivacyParams(rho=LN2, alpha=4.0)


def brute_expected_weight(pmf: DiscretePmf, weight, window: int = 4000) -> float:
    """Sum weight(z) * analytic mass(z) over a window wide enough that the
    omitted tail is far below double precision."""
    center_lo = min(pmf.lo, -window)
    center_hi = max(pmf.hi, window)
    return sum(weight(z) * pmf.analytic_mass(z) for z in range(center_lo, center_hi + 1))


def brute_total_mass(pmf: DiscretePmf, window: int = 4000) -> float:
    return brute_expected_weight(pmf, lambda z: 1.0, window)


def ranking_at(pois, z: float) -> list[int]:
    """PoIs ordered by distance from z, ties toward the smaller PoI."""
    return sorted(pois, key=lambda poi: (abs(poi - z), poi))


def brute_ranking_region(pois) -> tuple[float, float]:
    """Scan a fine grid for the interval around 0 where the distance
    ranking matches the ranking at 0. Returns (last flip below 0, first
    flip above 0), +-inf when no flip occurs inside the scan window."""
    truth = ranking_at(pois, 0.0)
    span = 10 * max(abs(p) for p in pois)
    step = 0.125
    # Offset the scan off multiples of 0.5 so it never lands on a bisector.
    eps = step / 4.0
    m_minus, m_plus = -math.inf, math.inf
    z = eps
    while z <= span:
        if ranking_at(pois, z) != truth:
            m_plus = z
            break
        z += step
    z = -eps
    while z >= -span:
        if ranking_at(pois, z) != truth:
            m_minus = z
            break
        z -= step
    return m_minus, m_plus
