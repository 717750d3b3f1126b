import math

import pytest

from locperturb import (
    DegeneratePriorError,
    GridSpec,
    ParameterError,
    PoiPrior,
    PrivacyParams,
    Scenario,
    build_query1_pmf,
    compare_mechanisms,
    lbs_oracle,
    ranking_preservation_mass,
    run_scenario,
)
from conftest import LN2


def make_scenario(**overrides):
    base = dict(
        user_coord=0.0,
        pois_abs=(3.0, 10.0, -5.0),
        query="q1",
        params=PrivacyParams(rho=LN2, alpha=4.0),
        grid=GridSpec(delta=1.0, tail_mass=1e-9),
        n_samples=20_000,
        seed=99,
    )
    base.update(overrides)
    return Scenario(**base)


class TestLbsOracle:
    def test_nearest(self):
        assert lbs_oracle(0.0, [3.0, 10.0, -5.0]) == (3.0, 3.0)

    def test_at_a_poi(self):
        assert lbs_oracle(10.0, [3.0, 10.0, -5.0]) == (10.0, 0.0)

    def test_tie_toward_smaller_coordinate(self):
        assert lbs_oracle(4.0, [3.0, 5.0]) == (3.0, 1.0)

    def test_empty_rejected(self):
        with pytest.raises(Exception):
            lbs_oracle(0.0, [])


class TestRunScenario:
    def test_deterministic(self):
        s = make_scenario()
        assert run_scenario(s) == run_scenario(s)

    def test_preservation_rate_matches_analytic_mass(self):
        s = make_scenario(n_samples=200_000)
        report = run_scenario(s)
        prior = PoiPrior(pois=(3, 10, -5))
        pmf = build_query1_pmf(s.params, s.grid, prior)
        expected = ranking_preservation_mass(pmf, prior)
        sigma = math.sqrt(expected * (1 - expected) / s.n_samples)
        assert abs(report.ranking_preservation_rate - expected) < 3 * sigma

    def test_no_perturbation_limit(self):
        s = make_scenario(params=PrivacyParams(rho=50.0, alpha=4.0), n_samples=1_000)
        report = run_scenario(s)
        assert report.nearest_poi_preservation_rate == 1.0
        assert report.ranking_preservation_rate == 1.0
        assert report.mean_abs_distance_error == 0.0
        assert report.mean_displacement == 0.0

    def test_nearest_rate_at_least_ranking_rate(self):
        report = run_scenario(make_scenario())
        assert report.nearest_poi_preservation_rate >= report.ranking_preservation_rate

    def test_epsilon_reported(self):
        report = run_scenario(make_scenario(n_samples=1_000))
        assert report.empirical_epsilon == pytest.approx(5 * LN2, abs=1e-9)

    def test_user_on_target_rejected(self):
        with pytest.raises(DegeneratePriorError):
            run_scenario(make_scenario(pois_abs=(0.2, 10.0), n_samples=10))

    def test_snap_error_recorded(self):
        report = run_scenario(make_scenario(pois_abs=(3.4, 10.0, -5.0), n_samples=10))
        assert report.max_poi_snap_error == pytest.approx(0.4, abs=1e-12)

    def test_q2_scenario_runs(self):
        report = run_scenario(make_scenario(query="q2", pois_abs=(10.0,), n_samples=5_000))
        assert report.kind == "query2"
        assert 0.0 <= report.ranking_preservation_rate <= 1.0

    def test_validation(self):
        with pytest.raises(ParameterError):
            make_scenario(n_samples=0)
        with pytest.raises(ParameterError):
            make_scenario(query="q3")
        with pytest.raises(ParameterError):
            make_scenario(pois_abs=())


class TestCompareMechanisms:
    def test_same_seed_both_sides(self):
        payload = compare_mechanisms(make_scenario(n_samples=2_000))
        assert payload["mechanism"]["seed"] == payload["baseline"]["seed"]
        assert payload["mechanism"]["kind"] == "query1"
        assert payload["baseline"]["kind"] == "geometric"

    def test_displacement_delta_near_analytic(self):
        payload = compare_mechanisms(make_scenario(n_samples=400_000))
        # analytic expectations: 34/33 vs 4/3
        assert payload["deltas"]["mean_displacement"] == pytest.approx(
            34 / 33 - 4 / 3, abs=0.02
        )

    def test_baseline_wins_epsilon_mechanism_wins_distance(self):
        s = make_scenario(query="q2", pois_abs=(10.0,), n_samples=400_000)
        payload = compare_mechanisms(s)
        assert payload["winner"]["empirical_epsilon"] == "geometric"
        assert payload["winner"]["mean_abs_distance_error"] == "query2"

    def test_alpha_zero_deltas_vanish(self):
        s = make_scenario(
            params=PrivacyParams(rho=LN2, alpha=0.0), query="q1", n_samples=50_000
        )
        payload = compare_mechanisms(s)
        assert abs(payload["deltas"]["mean_displacement"]) < 0.02
        assert payload["deltas"]["empirical_epsilon"] == pytest.approx(0.0, abs=1e-9)


class TestScenarioSerialization:
    def test_round_trip(self):
        s = make_scenario()
        assert Scenario.from_dict(s.to_dict()) == s

    def test_from_dict_defaults(self):
        s = Scenario.from_dict(
            {
                "user_coord": 1.0,
                "pois_abs": [4.0],
                "query": "q2",
                "params": {"rho": 0.5},
                "grid": {},
                "n_samples": 10,
                "seed": 1,
            }
        )
        assert s.params.alpha == 0.0
        assert s.grid.delta == 1.0
