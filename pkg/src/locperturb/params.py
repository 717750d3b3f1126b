"""Parameter and prior types shared by every mechanism.

All mechanisms work on a 1D axis discretized into steps of ``delta`` meters.
Privacy is expressed per grid step by ``rho`` (nats); the radius-based
parameter is recovered as ``epsilon = rho / r``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DegeneratePriorError, ParameterError

#: Largest truncation budget a grid may carry.
MAX_TAIL_MASS = 1e-6


@dataclass(frozen=True)
class PrivacyParams:
    """Privacy level of a perturbation mechanism.

    Attributes:
        rho: Privacy level in nats per grid step. Must be > 0.
        alpha: Suppression knob for outputs away from the prior. Each
            anti-prior offset carries an extra factor exp(-alpha * rho).
            Must be >= 0.
        r: Privacy radius in grid steps. Must be > 0.
        rho0: Privacy level outside the radius. Accepted for configuration
            fidelity but unused by the constructions; reports flag it.
        epsilon: Derived, always exactly rho / r.
    """

    rho: float
    alpha: float = 0.0
    r: float = 1.0
    rho0: float = 0.0
    epsilon: float = field(init=False)

    def __post_init__(self) -> None:
        if not (self.rho > 0.0 and math.isfinite(self.rho)):
            raise ParameterError(f"rho must be a finite positive number, got {self.rho}")
        if not (self.alpha >= 0.0 and math.isfinite(self.alpha)):
            raise ParameterError(f"alpha must be finite and >= 0, got {self.alpha}")
        if not (self.r > 0.0 and math.isfinite(self.r)):
            raise ParameterError(f"r must be a finite positive number, got {self.r}")
        if not (self.rho0 >= 0.0 and math.isfinite(self.rho0)):
            raise ParameterError(f"rho0 must be finite and >= 0, got {self.rho0}")
        object.__setattr__(self, "epsilon", self.rho / self.r)

    @classmethod
    def from_epsilon(
        cls, epsilon: float, r: float, alpha: float = 0.0, rho0: float = 0.0
    ) -> "PrivacyParams":
        """Build params from the radius-based pair (epsilon, r), rho = epsilon * r."""
        if not (epsilon > 0.0 and math.isfinite(epsilon)):
            raise ParameterError(f"epsilon must be a finite positive number, got {epsilon}")
        if not (r > 0.0 and math.isfinite(r)):
            raise ParameterError(f"r must be a finite positive number, got {r}")
        return cls(rho=epsilon * r, alpha=alpha, r=r, rho0=rho0)


@dataclass(frozen=True)
class GridSpec:
    """Discretization of the 1D axis.

    Attributes:
        delta: Meters per grid step. Offsets x index physical coordinates
            x * delta.
        tail_mass: Truncation budget: the analytic mass omitted from the
            stored support stays below this. Must lie in (0, 1e-6].
    """

    delta: float = 1.0
    tail_mass: float = 1e-9

    def __post_init__(self) -> None:
        if not (self.delta > 0.0 and math.isfinite(self.delta)):
            raise ParameterError(f"delta must be a finite positive number, got {self.delta}")
        if not (0.0 < self.tail_mass <= MAX_TAIL_MASS):
            raise ParameterError(
                f"tail_mass must lie in (0, {MAX_TAIL_MASS:g}], got {self.tail_mass}"
            )


def _snap_to_step(value: float) -> int:
    # Nearest integer, half-steps toward +inf.
    return int(math.floor(value + 0.5))


@dataclass(frozen=True)
class PoiPrior:
    """Points of interest as integer grid offsets from the true location 0.

    Attributes:
        pois: Sorted, duplicate-free offsets. Nonempty.
        target: The offset the mechanisms bias toward. Defaults to the PoI
            of minimum absolute offset, ties broken toward positive.
        snap_error: Largest |meters moved| when the prior was snapped from
            absolute coordinates; 0.0 for offsets given directly.
    """

    pois: tuple[int, ...]
    target: int | None = None
    snap_error: float = 0.0

    def __post_init__(self) -> None:
        pois = tuple(int(x) for x in self.pois)
        if not pois:
            raise ParameterError("prior needs at least one point of interest")
        if len(set(pois)) != len(pois):
            raise ParameterError(f"duplicate PoI offsets in {pois}")
        object.__setattr__(self, "pois", tuple(sorted(pois)))
        if self.target is None:
            object.__setattr__(self, "target", self._default_target())
        else:
            object.__setattr__(self, "target", int(self.target))
            if self.target not in self.pois:
                raise ParameterError(f"target {self.target} is not one of the PoIs {self.pois}")

    def _default_target(self) -> int:
        # Min |offset|; a tie between -k and +k resolves to +k.
        return min(self.pois, key=lambda x: (abs(x), -x))

    @classmethod
    def from_absolute(
        cls, user_coord: float, pois_abs: list[float], delta: float
    ) -> "PoiPrior":
        """Snap absolute PoI coordinates (meters) onto the grid around the user.

        Offsets are rounded to the nearest step; the largest snapping
        distance is recorded on the returned prior. Raises if snapping
        collapses two PoIs onto the same step.
        """
        if delta <= 0.0:
            raise ParameterError(f"delta must be positive, got {delta}")
        offsets = [_snap_to_step((poi - user_coord) / delta) for poi in pois_abs]
        snap_error = max(
            (abs(poi - (user_coord + off * delta)) for poi, off in zip(pois_abs, offsets)),
            default=0.0,
        )
        return cls(pois=tuple(offsets), snap_error=snap_error)

    def require_nonzero_target(self) -> int:
        """Return the target offset, rejecting a prior sitting on the user."""
        if self.target == 0:
            raise DegeneratePriorError(
                "target PoI coincides with the true location (offset 0)"
            )
        return self.target
