import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import Pipeline

from locperturb import (
    DegeneratePriorError,
    GeometricMechanism,
    Query1Mechanism,
    Query2Mechanism,
)
from conftest import LN2


class TestEstimatorApi:
    def test_get_params_round_trip(self):
        mech = Query1Mechanism(rho=0.5, alpha=2.0, random_state=3)
        params = mech.get_params()
        assert params["rho"] == 0.5 and params["alpha"] == 2.0
        cloned = clone(mech)
        assert cloned.get_params() == params

    def test_set_params(self):
        mech = Query2Mechanism().set_params(rho=1.25)
        assert mech.rho == 1.25

    def test_requires_fit(self):
        with pytest.raises(NotFittedError):
            Query1Mechanism().transform([0.0])

    def test_fit_returns_self(self):
        mech = Query1Mechanism()
        assert mech.fit([10.0]) is mech

    def test_pipeline_compose(self):
        pipe = Pipeline([("perturb", GeometricMechanism(rho=LN2, random_state=0))])
        out = pipe.fit_transform([[100.0], [200.0]])
        assert out.shape == (2,)


class TestTransform:
    def test_deterministic_with_random_state(self):
        mech = Query1Mechanism(rho=LN2, alpha=4.0, random_state=42).fit([10.0])
        x = np.zeros(1000)
        a = mech.transform(x)
        b = mech.transform(x)
        assert np.array_equal(a, b)

    def test_outputs_on_grid(self):
        mech = Query1Mechanism(rho=LN2, alpha=4.0, delta=0.5, random_state=1).fit([10.0])
        out = mech.transform(np.full(200, 3.0))
        steps = (out - 3.0) / 0.5
        assert np.allclose(steps, np.round(steps))

    def test_bias_toward_target(self):
        mech = Query1Mechanism(rho=LN2, alpha=4.0, random_state=7).fit([50.0])
        out = mech.transform(np.zeros(20_000))
        # mass toward the PoI outweighs mass away from it by e^{alpha rho} = 16
        toward = np.sum(out > 0)
        away = np.sum(out < 0)
        assert toward > 8 * away

    def test_mixed_directions(self):
        mech = Query1Mechanism(rho=LN2, alpha=4.0, random_state=5).fit([50.0])
        out = mech.transform(np.array([0.0, 100.0]))
        assert out.shape == (2,)

    def test_user_on_poi_raises_for_query1(self):
        mech = Query1Mechanism(rho=LN2, alpha=4.0, random_state=5).fit([10.0])
        with pytest.raises(DegeneratePriorError):
            mech.transform([10.0])

    def test_user_on_poi_degenerates_for_query2(self):
        mech = Query2Mechanism(rho=LN2, alpha=4.0, random_state=5).fit([10.0])
        out = mech.transform([10.0])
        assert out.shape == (1,)

    def test_geometric_ignores_pois(self):
        mech = GeometricMechanism(rho=LN2, random_state=11).fit()
        out = mech.transform(np.zeros(10_000))
        assert abs(np.mean(out)) < 0.1


class TestPmfFor:
    def test_query2_pmf_depends_on_distance(self):
        mech = Query2Mechanism(rho=LN2, alpha=4.0).fit([10.0])
        near = mech.pmf_for(7.0)   # L = 3
        far = mech.pmf_for(0.0)    # L = 10
        assert near.target == 3 and far.target == 10
        assert near.p != far.p

    def test_query1_pmf_only_depends_on_direction(self):
        mech = Query1Mechanism(rho=LN2, alpha=4.0).fit([10.0])
        assert mech.pmf_for(0.0) is mech.pmf_for(5.0)

    def test_sample_offsets_deterministic(self):
        mech = Query1Mechanism(rho=LN2, alpha=4.0).fit([10.0])
        a = mech.sample_offsets(0.0, n=100, seed=3)
        b = mech.sample_offsets(0.0, n=100, seed=3)
        assert np.array_equal(a, b)
