"""End-to-end scenario simulation against a model location-based service.

A scenario fixes a user location, a set of absolute PoI coordinates, a
query type, privacy parameters, and a seed. Running it perturbs the
location many times, feeds each perturbed point to an exact
nearest-neighbor LBS, and measures how often the service's answers
survive the perturbation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .distributions import (
    KIND_GEOMETRIC,
    DiscretePmf,
    build_geometric_pmf,
    build_query1_pmf,
    build_query2_pmf,
    sample,
)
from .errors import ContractError, DegeneratePriorError, ParameterError
from .params import GridSpec, PoiPrior, PrivacyParams
from .verify import measure_empirical_epsilon

QUERY_KINDS = {"q1": "query1", "q2": "query2"}


@dataclass(frozen=True)
class Scenario:
    """One simulation configuration."""

    user_coord: float
    pois_abs: tuple[float, ...]
    query: str
    params: PrivacyParams
    grid: GridSpec
    n_samples: int
    seed: int

    def __post_init__(self) -> None:
        if self.query not in QUERY_KINDS:
            raise ParameterError(f"query must be one of {sorted(QUERY_KINDS)}, got {self.query!r}")
        if self.n_samples < 1:
            raise ParameterError(f"n_samples must be >= 1, got {self.n_samples}")
        if not self.pois_abs:
            raise ParameterError("scenario needs at least one PoI")
        object.__setattr__(self, "pois_abs", tuple(float(p) for p in self.pois_abs))

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        params = PrivacyParams(
            rho=data["params"]["rho"],
            alpha=data["params"].get("alpha", 0.0),
            r=data["params"].get("r", 1.0),
            rho0=data["params"].get("rho0", 0.0),
        )
        grid = GridSpec(
            delta=data["grid"].get("delta", 1.0),
            tail_mass=data["grid"].get("tail_mass", 1e-9),
        )
        return cls(
            user_coord=float(data["user_coord"]),
            pois_abs=tuple(data["pois_abs"]),
            query=data["query"],
            params=params,
            grid=grid,
            n_samples=int(data["n_samples"]),
            seed=int(data["seed"]),
        )

    def to_dict(self) -> dict:
        return {
            "user_coord": self.user_coord,
            "pois_abs": list(self.pois_abs),
            "query": self.query,
            "params": {
                "rho": self.params.rho,
                "alpha": self.params.alpha,
                "r": self.params.r,
                "rho0": self.params.rho0,
            },
            "grid": {"delta": self.grid.delta, "tail_mass": self.grid.tail_mass},
            "n_samples": self.n_samples,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class SimulationReport:
    """Measured utility and privacy of one mechanism under one scenario.

    Distances are in meters. ``nearest_poi_preservation_rate`` counts
    samples whose nearest PoI is unchanged;
    ``ranking_preservation_rate`` counts samples where the full distance
    ranking of all PoIs is unchanged (strictly, so ties fail).
    """

    kind: str
    nearest_poi_preservation_rate: float
    ranking_preservation_rate: float
    mean_abs_distance_error: float
    mean_displacement: float
    empirical_epsilon: float
    sample_count: int
    seed: int
    max_poi_snap_error: float

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "nearest_poi_preservation_rate": self.nearest_poi_preservation_rate,
            "ranking_preservation_rate": self.ranking_preservation_rate,
            "mean_abs_distance_error": self.mean_abs_distance_error,
            "mean_displacement": self.mean_displacement,
            "empirical_epsilon": self.empirical_epsilon,
            "sample_count": self.sample_count,
            "seed": self.seed,
            "max_poi_snap_error": self.max_poi_snap_error,
        }


def lbs_oracle(point: float, pois_abs) -> tuple[float, float]:
    """Nearest PoI to ``point`` and the distance to it.

    Ties resolve toward the smaller coordinate.
    """
    pois = sorted(pois_abs)
    if not pois:
        raise ContractError("LBS oracle needs at least one PoI")
    best = min(pois, key=lambda poi: (abs(poi - point), poi))
    return best, abs(best - point)


def _build_pmf(kind: str, params: PrivacyParams, grid: GridSpec, prior: PoiPrior) -> DiscretePmf:
    if kind == KIND_GEOMETRIC:
        return build_geometric_pmf(params, grid)
    if kind == "query1":
        return build_query1_pmf(params, grid, prior)
    if kind == "query2":
        return build_query2_pmf(params, grid, prior)
    raise ContractError(f"unknown mechanism kind {kind!r}")


def _epsilon_input_range(target: int) -> tuple[int, int]:
    # Adjacent inputs around the user, strictly on one side of the target.
    return (-5, 0) if target > 0 else (0, 5)


def run_scenario(scenario: Scenario, kind: str | None = None) -> SimulationReport:
    """Simulate one mechanism under ``scenario``; deterministic given seed.

    ``kind`` overrides the scenario's query mechanism (used to run the
    geometric baseline on the same scenario).
    """
    s = scenario
    kind = kind or QUERY_KINDS[s.query]
    prior = PoiPrior.from_absolute(s.user_coord, list(s.pois_abs), s.grid.delta)
    if kind != KIND_GEOMETRIC and prior.target == 0:
        raise DegeneratePriorError(
            "target PoI snaps onto the user location; queries q1/q2 are undefined there"
        )
    pmf = _build_pmf(kind, s.params, s.grid, prior)

    offsets = sample(pmf, s.seed, s.n_samples)
    z_abs = s.user_coord + offsets * s.grid.delta

    pois = np.array(sorted(s.pois_abs), dtype=float)
    true_nearest, true_dist = lbs_oracle(s.user_coord, pois)

    dists = np.abs(pois[None, :] - z_abs[:, None])
    nearest_idx = np.argmin(dists, axis=1)  # first minimum = smaller coordinate
    nearest_rate = float(np.mean(pois[nearest_idx] == true_nearest))
    reported_dist = dists[np.arange(len(z_abs)), nearest_idx]
    mean_err = float(np.mean(np.abs(reported_dist - true_dist)))

    # Full-ranking preservation: distances in the true ranking order must
    # be strictly increasing (ties break the strict ranking).
    order = sorted(range(len(pois)), key=lambda k: (abs(pois[k] - s.user_coord), pois[k]))
    ranked_dists = dists[:, order]
    if ranked_dists.shape[1] > 1:
        ranking_rate = float(np.mean(np.all(ranked_dists[:, :-1] < ranked_dists[:, 1:], axis=1)))
    else:
        ranking_rate = 1.0

    target_for_eps = prior.target if prior.target != 0 else 1
    eps = measure_empirical_epsilon(
        kind, s.params, s.grid, target_for_eps, _epsilon_input_range(target_for_eps)
    )

    return SimulationReport(
        kind=kind,
        nearest_poi_preservation_rate=nearest_rate,
        ranking_preservation_rate=ranking_rate,
        mean_abs_distance_error=mean_err,
        mean_displacement=float(np.mean(np.abs(offsets))) * s.grid.delta,
        empirical_epsilon=eps,
        sample_count=s.n_samples,
        seed=s.seed,
        max_poi_snap_error=prior.snap_error,
    )


def compare_mechanisms(scenario: Scenario) -> dict:
    """Run the scenario's mechanism and the geometric baseline with the
    same seed; report both plus per-metric deltas and a winner summary.

    Deltas are (mechanism - baseline); for the preservation rates higher
    is better, for every other metric lower is better.
    """
    mech = run_scenario(scenario)
    base = run_scenario(scenario, kind=KIND_GEOMETRIC)

    higher_better = {"nearest_poi_preservation_rate", "ranking_preservation_rate"}
    metrics = [
        "nearest_poi_preservation_rate",
        "ranking_preservation_rate",
        "mean_abs_distance_error",
        "mean_displacement",
        "empirical_epsilon",
    ]
    deltas, winner = {}, {}
    for name in metrics:
        m, b = getattr(mech, name), getattr(base, name)
        deltas[name] = m - b
        if math.isclose(m, b, rel_tol=1e-12, abs_tol=1e-12):
            winner[name] = "tie"
        elif (m > b) == (name in higher_better):
            winner[name] = mech.kind
        else:
            winner[name] = base.kind
    return {
        "scenario": scenario.to_dict(),
        "mechanism": mech.to_dict(),
        "baseline": base.to_dict(),
        "deltas": deltas,
        "winner": winner,
    }


def report_to_json(payload: dict) -> str:
    """Serialize a report dict deterministically (sorted keys)."""
    return json.dumps(payload, sort_keys=True, indent=2)
