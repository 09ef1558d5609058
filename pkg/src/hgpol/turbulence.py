"""Turbulence strength along horizontal and slant atmospheric paths.

The altitude profile of the refractive-index structure constant is the
Hufnagel-Valley form

    Cn2(h) = 0.00594 (v/27)^2 (1e-5 h)^10 exp(-h/1000)
             + 2.7e-16 exp(-h/1500) + Cn2(0) exp(-h/100)

with v the rms wind speed in m/s and h the altitude in m.  Horizontal links
see a constant Cn2 and are characterized by the spherical-wave coherence
length rho0; slant links collapse the altitude-weighted integrals of Cn2(h)
into three quadratic-structure coefficients, of which only the source-plane
one enters the intensity at coincident observation points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable

from scipy import integrate

from .errors import NumericFailure

# Hufnagel-Valley profile constants.
HV_WIND_COEFF = 0.00594
HV_WIND_NORM = 27.0
HV_ALTITUDE_SCALE = 1.0e-5
HV_BACKGROUND = 2.7e-16

# Spherical-wave coherence and slant-path structure normalizations.
RHO0_COEFF = 0.545
SLANT_COEFF = 3.2796

QUAD_REL_TOL = 1.0e-10
QUAD_LIMIT = 50


class PathKind(Enum):
    FREE_SPACE = "free_space"
    HORIZONTAL = "horizontal"
    SLANT_UP = "slant_up"
    SLANT_DOWN = "slant_down"


SLANT_KINDS = (PathKind.SLANT_UP, PathKind.SLANT_DOWN)


@dataclass(frozen=True)
class TurbulenceProfile:
    """Ground-level turbulence parameters.

    cn2_ground   Cn2 at h = 0, m^(-2/3)
    wind_rms     rms wind speed v, m/s
    inner_scale  inner scale l0, m (calibrated default, see README)
    ground_altitude  lower altitude limit h0 of slant integrals, m
    """

    cn2_ground: float
    wind_rms: float
    inner_scale: float = 0.01
    ground_altitude: float = 0.0

    def __post_init__(self):
        if self.cn2_ground < 0:
            raise ValueError(f"cn2_ground must be >= 0, got {self.cn2_ground}")
        if self.wind_rms < 0:
            raise ValueError(f"wind_rms must be >= 0, got {self.wind_rms}")
        if self.inner_scale <= 0:
            raise ValueError(f"inner_scale must be > 0, got {self.inner_scale}")
        if self.ground_altitude < 0:
            raise ValueError(
                f"ground_altitude must be >= 0, got {self.ground_altitude}"
            )


@dataclass(frozen=True)
class PathSpec:
    """Propagation path geometry plus its turbulence profile.

    ``zenith`` (rad) is only meaningful for the slant kinds; ``profile`` is
    ignored for free space.
    """

    kind: PathKind
    distance: float
    zenith: float = 0.0
    profile: TurbulenceProfile | None = None

    def __post_init__(self):
        if self.distance <= 0:
            raise ValueError(f"distance must be > 0, got {self.distance}")
        if self.kind in SLANT_KINDS:
            if not 0.0 <= self.zenith < math.pi / 2:
                raise ValueError(
                    f"zenith must lie in [0, pi/2) for slant paths, got {self.zenith}"
                )
        if self.kind is not PathKind.FREE_SPACE and self.profile is None:
            raise ValueError(f"{self.kind.value} path requires a TurbulenceProfile")

    def at_distance(self, z: float) -> "PathSpec":
        """Copy of this path with the propagation distance replaced."""
        return replace(self, distance=z)

    @property
    def altitude_span(self) -> float:
        """Altitude H = z cos(zenith) covered by a slant link, m."""
        return self.distance * math.cos(self.zenith)


def cn2_at_altitude(profile: TurbulenceProfile, h: float) -> float:
    """Hufnagel-Valley structure constant Cn2(h) in m^(-2/3)."""
    if h < 0:
        raise ValueError(f"altitude must be >= 0, got {h}")
    wind_term = (
        HV_WIND_COEFF
        * (profile.wind_rms / HV_WIND_NORM) ** 2
        * (HV_ALTITUDE_SCALE * h) ** 10
        * math.exp(-h / 1000.0)
    )
    background = HV_BACKGROUND * math.exp(-h / 1500.0)
    ground = profile.cn2_ground * math.exp(-h / 100.0)
    return wind_term + background + ground


def rho0_horizontal(k: float, z: float, cn2: float) -> float:
    """Spherical-wave coherence length rho0 = (0.545 Cn2 k^2 z)^(-3/5), m.

    Returns +inf for cn2 = 0 (free-space limit, no decoherence).
    """
    if k <= 0:
        raise ValueError(f"wavenumber must be > 0, got {k}")
    if z <= 0:
        raise ValueError(f"distance must be > 0, got {z}")
    if cn2 < 0:
        raise ValueError(f"cn2 must be >= 0, got {cn2}")
    if cn2 == 0.0:
        return math.inf
    return (RHO0_COEFF * cn2 * k * k * z) ** -0.6


def _quad(fn: Callable[[float], float], lo: float, hi: float) -> float:
    value, abserr, info, *rest = integrate.quad(
        fn, lo, hi, epsabs=1e-280, epsrel=QUAD_REL_TOL, limit=QUAD_LIMIT,
        full_output=1,
    )
    if rest:  # QUADPACK appended an explanation: the tolerance was not met
        raise NumericFailure(
            f"altitude integral did not converge: {rest[0]}", estimate=abserr
        )
    return value


def slant_coefficients(
    path: PathSpec,
    k: float,
    cn2: Callable[[float], float] | None = None,
) -> tuple[float, float, float]:
    """Quadratic-structure coefficients (A1, A2, A3) of a slant link, m^-2.

    A_i = 3.2796 k^2 l0^(-1/3) sec(zenith) * integral of Cn2(h) w_i(h) dh
    from h0 to H = z cos(zenith), with weights (1-eta)^2, 2 eta (1-eta) and
    eta^2.  eta = 1 - h/H on slant-up links and eta = h/H on slant-down
    links.  ``cn2`` overrides the profile lookup (test hook).
    """
    if path.kind not in SLANT_KINDS:
        raise ValueError(f"slant coefficients need a slant path, got {path.kind}")
    profile = path.profile
    span = path.altitude_span
    h0 = profile.ground_altitude
    if span <= h0:
        raise ValueError(
            f"altitude span {span} m does not exceed ground altitude {h0} m"
        )
    if cn2 is None:
        cn2 = lambda h: cn2_at_altitude(profile, h)

    if path.kind is PathKind.SLANT_UP:
        eta = lambda h: 1.0 - h / span
    else:
        eta = lambda h: h / span

    prefactor = (
        SLANT_COEFF
        * k * k
        * profile.inner_scale ** (-1.0 / 3.0)
        / math.cos(path.zenith)
    )
    a1 = prefactor * _quad(lambda h: cn2(h) * (1.0 - eta(h)) ** 2, h0, span)
    a2 = prefactor * _quad(lambda h: cn2(h) * 2.0 * eta(h) * (1.0 - eta(h)), h0, span)
    a3 = prefactor * _quad(lambda h: cn2(h) * eta(h) ** 2, h0, span)
    return a1, a2, a3


def effective_inverse_rho2(path: PathSpec, k: float) -> float:
    """Turbulence contribution 1/rho^2 at coincident observation points, m^-2.

    Free space gives 0, a horizontal link gives 1/rho0^2, and a slant link
    gives A3/2.  The cross-term and receiver-plane coefficients drop out
    identically when both observation points coincide.
    """
    if path.kind is PathKind.FREE_SPACE:
        return 0.0
    if path.kind is PathKind.HORIZONTAL:
        rho0 = rho0_horizontal(k, path.distance, path.profile.cn2_ground)
        if math.isinf(rho0):
            return 0.0
        return rho0**-2
    _, _, a3 = slant_coefficients(path, k)
    return 0.5 * a3
