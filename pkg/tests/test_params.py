import pytest

from locperturb import GridSpec, ParameterError, PoiPrior, PrivacyParams


class TestPrivacyParams:
    def test_epsilon_derived_exactly(self):
        params = PrivacyParams(rho=1.5, r=3.0)
        assert params.epsilon == 1.5 / 3.0

    def test_from_epsilon(self):
        params = PrivacyParams.from_epsilon(epsilon=0.25, r=4.0, alpha=2.0)
        assert params.rho == 1.0
        assert params.alpha == 2.0

    def test_rho0_carried(self):
        assert PrivacyParams(rho=1.0, rho0=0.5).rho0 == 0.5
        with pytest.raises(ParameterError):
            PrivacyParams(rho=1.0, rho0=-0.1)


class TestGridSpec:
    def test_validation(self):
        with pytest.raises(ParameterError):
            GridSpec(delta=0.0)
        with pytest.raises(ParameterError):
            GridSpec(tail_mass=0.0)
        with pytest.raises(ParameterError):
            GridSpec(tail_mass=1e-3)  # above the allowed budget
        assert GridSpec(delta=0.5, tail_mass=1e-7).delta == 0.5


class TestPoiPrior:
    def test_sorted_and_deduped(self):
        prior = PoiPrior(pois=(10, -5, 3))
        assert prior.pois == (-5, 3, 10)
        with pytest.raises(ParameterError):
            PoiPrior(pois=(3, 3))
        with pytest.raises(ParameterError):
            PoiPrior(pois=())

    def test_default_target_min_abs(self):
        assert PoiPrior(pois=(10, -5, 3)).target == 3

    def test_default_target_tie_toward_positive(self):
        assert PoiPrior(pois=(-3, 3)).target == 3

    def test_explicit_target_must_be_a_poi(self):
        assert PoiPrior(pois=(3, 10), target=10).target == 10
        with pytest.raises(ParameterError):
            PoiPrior(pois=(3, 10), target=7)

    def test_from_absolute_snaps_and_records_error(self):
        prior = PoiPrior.from_absolute(user_coord=100.0, pois_abs=[103.4, 110.0], delta=1.0)
        assert prior.pois == (3, 10)
        assert prior.snap_error == pytest.approx(0.4)

    def test_from_absolute_half_meter_grid(self):
        prior = PoiPrior.from_absolute(user_coord=0.0, pois_abs=[1.6], delta=0.5)
        assert prior.pois == (3,)  # 1.6 m is 3.2 steps, snaps to 3

    def test_from_absolute_collision_rejected(self):
        with pytest.raises(ParameterError):
            PoiPrior.from_absolute(user_coord=0.0, pois_abs=[3.1, 3.2], delta=1.0)
