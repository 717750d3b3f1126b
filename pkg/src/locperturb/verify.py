"""Checks that a built distribution delivers what its construction promises.

Every check returns a :class:`CheckResult` rather than raising, so faults
show up as report entries. :func:`measure_empirical_epsilon` measures the
privacy level a family of pmfs actually delivers: the worst log-likelihood
ratio between the output distributions of adjacent inputs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .distributions import (
    KIND_GEOMETRIC,
    KIND_QUERY1,
    KIND_QUERY2,
    KINDS,
    DiscretePmf,
    build_geometric_pmf,
    build_query1_pmf,
    build_query2_pmf,
)
from .errors import ContractError, NumericError, ParameterError, UnsupportedConfigurationError
from .params import GridSpec, PoiPrior, PrivacyParams

RATIO_RTOL = 1e-12

# Stored masses below this are treated as underflowed and skipped by ratio
# checks (the analytic value is still strictly positive).
_UNDERFLOW_FLOOR = 1e-300


@dataclass(frozen=True)
class CheckResult:
    """One verification check: name, outcome, measured value, tolerance."""

    name: str
    passed: bool
    measured: float
    tolerance: float
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "measured": self.measured,
            "tolerance": self.tolerance,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class VerificationReport:
    """All checks for one pmf plus the measured privacy level."""

    checks: list[CheckResult]
    empirical_epsilon: float
    nominal_rho: float
    notes: list[str] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> str:
        payload = {
            "checks": [c.to_dict() for c in self.checks],
            "empirical_epsilon": self.empirical_epsilon,
            "nominal_rho": self.nominal_rho,
            "all_passed": self.all_passed,
            "notes": list(self.notes),
        }
        return json.dumps(payload, sort_keys=True, indent=2)


def check_pmf_validity(pmf: DiscretePmf, tol: float = 1e-12) -> CheckResult:
    """Nonnegative masses, peak equal to p, stored mass within budget."""
    if tol <= 0:
        raise ParameterError(f"tol must be positive, got {tol}")
    bad = np.flatnonzero(pmf.probs < 0.0)
    if bad.size:
        offset = int(pmf.lo + bad[0])
        return CheckResult(
            "validity", False, float(pmf.probs[bad[0]]), 0.0,
            f"negative mass at offset {offset}",
        )
    peak = float(pmf.probs.max())
    if peak != pmf.p:
        return CheckResult(
            "validity", False, peak, 0.0,
            f"peak mass {peak!r} does not equal analytic p {pmf.p!r}",
        )
    stored = float(pmf.probs.sum())
    lo_bound = 1.0 - pmf.grid.tail_mass
    if not (lo_bound <= stored <= 1.0 + tol):
        return CheckResult(
            "validity", False, stored, tol,
            f"stored mass outside [{lo_bound!r}, 1 + tol]",
        )
    return CheckResult("validity", True, stored, tol)


def _ratio_entries(masses: np.ndarray, expected: float) -> float:
    """Worst relative deviation of consecutive-mass ratios from expected."""
    worst = 0.0
    for a, b in zip(masses[:-1], masses[1:]):
        if min(a, b) <= _UNDERFLOW_FLOOR:
            continue
        worst = max(worst, abs(float(a) / float(b) - expected) / expected)
    return worst


def check_shape(pmf: DiscretePmf) -> CheckResult:
    """Per-region monotonicity, per-step decay e^{rho}, and symmetry.

    query1: peak at 0, both sides decay by exactly e^{rho} per step and the
    anti-prior side sits a factor e^{-alpha rho} below the prior side.
    query2: mirror-symmetric about the target with twin peaks, decaying
    toward the midpoint and outward beyond the peaks.
    geometric: symmetric about 0 with e^{rho} decay.
    """
    if pmf.kind not in KINDS:
        raise ContractError(f"unknown pmf kind {pmf.kind!r}")
    rho, alpha = pmf.params.rho, pmf.params.alpha
    step = math.exp(rho)
    probs, lo = pmf.probs, pmf.lo

    def seg(a: int, b: int) -> np.ndarray:
        # masses for offsets a..b inclusive
        return probs[a - lo : b - lo + 1]

    worst = 0.0
    sym_tol = RATIO_RTOL * pmf.p
    if pmf.kind == KIND_GEOMETRIC:
        left = seg(lo, 0)[::-1]  # from 0 outward
        right = seg(0, pmf.hi)
        worst = max(_ratio_entries(right, step), _ratio_entries(left, step))
        n_both = min(len(left), len(right))
        sym = np.abs(left[:n_both] - right[:n_both])
        if sym.size and sym.max() > sym_tol:
            return CheckResult("shape", False, float(sym.max()), sym_tol, "asymmetric about 0")
    elif pmf.kind == KIND_QUERY1:
        s = 1 if pmf.target > 0 else -1
        fwd = seg(0, pmf.hi) if s > 0 else seg(lo, 0)[::-1]
        bwd = seg(lo, 0)[::-1] if s > 0 else seg(0, pmf.hi)
        # The peak-to-first-anti-prior step drops by e^{(1+alpha) rho}, so the
        # per-step e^{rho} check starts one entry in on that side.
        worst = max(_ratio_entries(fwd, step), _ratio_entries(bwd[1:], step))
        if np.any(np.diff(fwd) > 0.0) or np.any(np.diff(bwd) > 0.0):
            return CheckResult("shape", False, worst, RATIO_RTOL, "not monotone away from peak")
        # anti-prior suppression: mass(-s) = mass(s) * e^{-alpha rho}
        supp = math.exp(-alpha * rho)
        if len(fwd) > 1 and len(bwd) > 1 and min(float(fwd[1]), supp) > _UNDERFLOW_FLOOR:
            worst = max(worst, abs(float(bwd[1]) / float(fwd[1]) - supp) / supp)
    else:  # query2
        span = 2 * abs(pmf.target)
        a, b = (0, span) if pmf.target > 0 else (-span, 0)
        inner = seg(a, b)
        mirror = np.abs(inner - inner[::-1])
        if mirror.size and mirror.max() > sym_tol:
            return CheckResult(
                "shape", False, float(mirror.max()), sym_tol, "not symmetric about the target"
            )
        half = inner[: span // 2 + 1]  # peak down to midpoint
        outer_l = seg(lo, a)[::-1]
        outer_r = seg(b, pmf.hi)
        worst = max(
            _ratio_entries(half, step),
            _ratio_entries(outer_l[1:], step),
            _ratio_entries(outer_r[1:], step),
        )
        if np.any(np.diff(half) > 0.0) or np.any(np.diff(outer_l) > 0.0) or np.any(
            np.diff(outer_r) > 0.0
        ):
            return CheckResult("shape", False, worst, RATIO_RTOL, "region monotonicity violated")

    worst = float(worst)
    passed = worst <= RATIO_RTOL
    return CheckResult("shape", passed, worst, RATIO_RTOL, "" if passed else "decay ratio off")


def _family_pmf(kind: str, params: PrivacyParams, grid: GridSpec, target_offset: int) -> DiscretePmf:
    if kind == KIND_GEOMETRIC:
        return build_geometric_pmf(params, grid)
    prior = PoiPrior(pois=(target_offset,))
    if kind == KIND_QUERY1:
        return build_query1_pmf(params, grid, prior)
    if kind == KIND_QUERY2:
        return build_query2_pmf(params, grid, prior)
    raise ContractError(f"unknown pmf kind {kind!r}")


def measure_empirical_epsilon(
    kind: str,
    params: PrivacyParams,
    grid: GridSpec,
    absolute_target: int,
    input_range: tuple[int, int],
) -> float:
    """Worst adjacent-input log-likelihood ratio, in nats.

    Rebuilds the mechanism for every input i in ``input_range`` (the PoI
    stays fixed at ``absolute_target``), compares each pmf with its
    neighbor's at every output, and returns the largest |log ratio|.
    Absent offsets are evaluated from the analytic tail formula, never as
    zero. Inputs must stay strictly on one side of the target: crossing it
    flips the construction's direction discontinuously and is rejected.
    """
    lo, hi = int(input_range[0]), int(input_range[1])
    if hi <= lo:
        raise ParameterError(f"input_range must contain at least two inputs, got {input_range}")
    if kind != KIND_GEOMETRIC and not (hi < absolute_target or lo > absolute_target):
        raise UnsupportedConfigurationError(
            f"input range [{lo}, {hi}] must stay strictly on one side of the "
            f"target {absolute_target}"
        )

    def pmf_at(i: int) -> DiscretePmf:
        return _family_pmf(kind, params, grid, absolute_target - i)

    worst = 0.0
    prev = pmf_at(lo)
    for i in range(lo, hi):
        cur, nxt = prev, pmf_at(i + 1)
        z_lo = min(i + cur.lo, i + 1 + nxt.lo) - 2
        z_hi = max(i + cur.hi, i + 1 + nxt.hi) + 2
        for z in range(z_lo, z_hi + 1):
            diff = abs(cur.log_mass(z - i) - nxt.log_mass(z - (i + 1)))
            worst = max(worst, diff)
        prev = nxt
    return worst


def _structure_sum(kind: str, rho: float, alpha: float, target: int, cutoff: float = 1e-16) -> float:
    """Total mass divided by p, by direct term-by-term summation.

    Deliberately independent of the closed forms: walks each geometric
    tail until the increment drops below ``cutoff``.
    """
    def tail(first_decay: float) -> float:
        total, x = 0.0, 0
        while True:
            term = math.exp(-(first_decay + x) * rho)
            total += term
            if term < cutoff:
                return total
            x += 1
            if x > 10_000_000:
                raise NumericError("tail summation did not converge")

    if kind == KIND_GEOMETRIC:
        return 1.0 + 2.0 * tail(1.0)
    if kind == KIND_QUERY1:
        return 1.0 + tail(1.0) + tail(1.0 + alpha)
    if kind == KIND_QUERY2:
        span_half = abs(target)
        interior = sum(math.exp(-x * rho) for x in range(1, span_half))
        return 2.0 + 2.0 * interior + math.exp(-span_half * rho) + 2.0 * tail(1.0 + alpha)
    raise ContractError(f"unknown pmf kind {kind!r}")


def oracle_normalizer(kind: str, params: PrivacyParams, target: int = 1) -> float:
    """Peak probability found by bisection on "total analytic mass = 1".

    Uses direct high-precision summation of the structure, independent of
    the closed-form code paths, so it can cross-check them.
    """
    structure = _structure_sum(kind, params.rho, params.alpha, target)
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid * structure > 1.0:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-14:
            return 0.5 * (lo + hi)
    raise NumericError("bisection on the normalizer did not converge")


def verify_pmf(
    pmf: DiscretePmf,
    tol: float = 1e-12,
    input_range: tuple[int, int] | None = None,
) -> VerificationReport:
    """Run validity, shape, and normalizer checks and measure epsilon."""
    checks = [check_pmf_validity(pmf, tol), check_shape(pmf)]

    oracle_p = oracle_normalizer(pmf.kind, pmf.params, pmf.target or 1)
    gap = abs(oracle_p - pmf.p)
    checks.append(
        CheckResult(
            "normalizer", gap < 1e-10, gap, 1e-10,
            "" if gap < 1e-10 else "analytic peak disagrees with summation oracle",
        )
    )

    target = pmf.target or 10
    if input_range is None:
        input_range = (target - 6, target - 1) if target > 0 else (target + 1, target + 6)
    eps = measure_empirical_epsilon(pmf.kind, pmf.params, pmf.grid, target, input_range)

    notes = []
    if pmf.params.rho0 != 0.0:
        notes.append("rho0 is carried in configuration but unused by the construction")
    return VerificationReport(
        checks=checks,
        empirical_epsilon=eps,
        nominal_rho=pmf.params.rho,
        notes=notes,
    )
