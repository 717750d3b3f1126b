"""Scikit-learn style wrappers around the perturbation distributions.

Each mechanism is an estimator: configure it with hyperparameters, ``fit``
it to the absolute PoI coordinates the service knows about, then
``transform`` true locations into perturbed ones. ``get_params`` /
``set_params`` come from :class:`sklearn.base.BaseEstimator`, so the
mechanisms drop into pipelines and grid searches like any transformer.
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import distributions as dist
from .errors import ParameterError
from .params import GridSpec, PoiPrior, PrivacyParams


def _check_coords(X) -> np.ndarray:
    """Validate a 1D array of coordinates (accepts an (n, 1) column)."""
    arr = check_array(X, ensure_2d=False, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise ParameterError(f"coordinates must be 1D, got shape {arr.shape}")
    return arr


class BasePerturbationMechanism(TransformerMixin, BaseEstimator):
    """Shared fit/transform plumbing for the location mechanisms."""

    _kind: str = ""

    def __init__(self, rho=math.log(2), alpha=0.0, r=1.0, rho0=0.0,
                 delta=1.0, tail_mass=1e-9, random_state=None):
        self.rho = rho
        self.alpha = alpha
        self.r = r
        self.rho0 = rho0
        self.delta = delta
        self.tail_mass = tail_mass
        self.random_state = random_state

    def _params(self) -> PrivacyParams:
        return PrivacyParams(rho=self.rho, alpha=self.alpha, r=self.r, rho0=self.rho0)

    def _grid(self) -> GridSpec:
        return GridSpec(delta=self.delta, tail_mass=self.tail_mass)

    def fit(self, X, y=None):
        """Record the PoI coordinates (meters) the mechanism biases toward.

        Args:
            X: array-like of absolute PoI coordinates, shape (n_pois,) or
                (n_pois, 1). The geometric baseline ignores them but
                accepts the same signature.
        """
        pois = _check_coords(X) if X is not None else np.array([])
        self.params_ = self._params()
        self.grid_ = self._grid()
        self.pois_ = np.sort(pois)
        self._pmf_cache: dict[int, dist.DiscretePmf] = {}
        return self

    def _pmf_for_target(self, target: int) -> dist.DiscretePmf:
        if target not in self._pmf_cache:
            prior = PoiPrior(pois=(target,))
            self._pmf_cache[target] = self._build(prior)
        return self._pmf_cache[target]

    def _build(self, prior: PoiPrior) -> dist.DiscretePmf:
        raise NotImplementedError

    def _cache_key(self, target: int) -> int:
        return target

    def pmf_for(self, location: float) -> dist.DiscretePmf:
        """The offset distribution this mechanism uses at ``location``."""
        check_is_fitted(self, "pois_")
        prior = PoiPrior.from_absolute(float(location), list(self.pois_), self.delta)
        return self._pmf_for_target(self._cache_key(prior.target))

    def transform(self, X) -> np.ndarray:
        """Perturb each coordinate in X (meters), one draw per row.

        Deterministic for a fixed ``random_state``: a fresh generator is
        created per call, so repeated calls on the same input coincide.
        """
        check_is_fitted(self, "pois_")
        coords = _check_coords(X)
        rng = np.random.default_rng(self.random_state)
        targets = np.array(
            [self._cache_key(PoiPrior.from_absolute(c, list(self.pois_), self.delta).target)
             for c in coords],
            dtype=int,
        )
        out = np.empty_like(coords)
        for target in np.unique(targets):
            mask = targets == target
            pmf = self._pmf_for_target(int(target))
            offsets = dist.sample(pmf, rng, int(mask.sum()))
            out[mask] = coords[mask] + offsets * self.delta
        return out

    def sample_offsets(self, location: float, n: int, seed: int) -> np.ndarray:
        """Draw n grid offsets for one location with an explicit seed."""
        return dist.sample(self.pmf_for(location), seed, n)


class Query1Mechanism(BasePerturbationMechanism):
    """Single-peak mechanism for services that navigate the user.

    Keeps outputs tight around the true location while biasing them
    toward the nearest PoI; outputs away from it are suppressed by
    exp(-alpha * rho) on top of the geometric decay.
    """

    _kind = dist.KIND_QUERY1

    def __init__(self, rho=math.log(2), alpha=4.0, r=1.0, rho0=0.0,
                 delta=1.0, tail_mass=1e-9, random_state=None):
        super().__init__(rho, alpha, r, rho0, delta, tail_mass, random_state)

    def _build(self, prior: PoiPrior) -> dist.DiscretePmf:
        return dist.build_query1_pmf(self.params_, self.grid_, prior)

    def _cache_key(self, target: int) -> int:
        # The shape only depends on the prior's direction.
        return 1 if target > 0 else (-1 if target < 0 else 0)


class Query2Mechanism(BasePerturbationMechanism):
    """Twin-peak mechanism for services that only report a distance.

    Any output with the same distance to the PoI serves equally well, so
    mass mirrors about the PoI; the reported |PoI - z| stays close to the
    true distance even when the location moves a lot.
    """

    _kind = dist.KIND_QUERY2

    def __init__(self, rho=math.log(2), alpha=4.0, r=1.0, rho0=0.0,
                 delta=1.0, tail_mass=1e-9, random_state=None):
        super().__init__(rho, alpha, r, rho0, delta, tail_mass, random_state)

    def _build(self, prior: PoiPrior) -> dist.DiscretePmf:
        return dist.build_query2_pmf(self.params_, self.grid_, prior)


class GeometricMechanism(BasePerturbationMechanism):
    """Symmetric two-sided geometric noise: the prior-free baseline."""

    _kind = dist.KIND_GEOMETRIC

    def fit(self, X=None, y=None):
        return super().fit(X, y)

    def _build(self, prior: PoiPrior) -> dist.DiscretePmf:
        return dist.build_geometric_pmf(self.params_, self.grid_)

    def _cache_key(self, target: int) -> int:
        return 0

    def pmf_for(self, location: float = 0.0) -> dist.DiscretePmf:
        check_is_fitted(self, "pois_")
        return self._pmf_for_target(0)

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "pois_")
        coords = _check_coords(X)
        rng = np.random.default_rng(self.random_state)
        offsets = dist.sample(self._pmf_for_target(0), rng, len(coords))
        return coords + offsets * self.delta
