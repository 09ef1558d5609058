"""Source fields and the closed-form propagated intensity.

A partially coherent Hermite-Gaussian source is the deterministic mode

    U(rho) = H_m(sqrt(2) rho_x / w0) H_n(sqrt(2) rho_y / w0)
             exp(-(rho_x^2 + rho_y^2) / w0^2)

carrying a Gaussian degree of coherence with correlation length sigma0.
After propagation to distance z (extended Huygens-Fresnel, quadratic
approximation of the turbulence phase structure) the intensity separates
into per-axis series S that depend on the constants

    a = k^2 w0^2 / (8 z^2) + 1/eps^2      1/eps^2 = 1/(2 w0^2) + 1/(2 sigma0^2) + 1/rho^2
    b = i k rho' / (2 z)                  d = k^2 w0^2 / (4 z^2) + 1/w0^2

where 1/rho^2 is the path's turbulence term.  The series is summed in log
magnitude with sign tracking so that the alternating factorial-weighted
terms cannot silently overflow or cancel.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import NumericFailure, UnsupportedOrderError
from .special_math import binomial, hermite, log_factorial
from .turbulence import PathSpec, effective_inverse_rho2

MAX_MODE_ORDER = 20

_LOG2 = math.log(2.0)
_LOG4 = math.log(4.0)
_IMAG_RESIDUE_TOL = 1.0e-10


@dataclass(frozen=True)
class BeamParams:
    """Wavelength, waist and the (m, n) mode orders of the source."""

    wavelength: float
    waist: float
    order_x: int
    order_y: int

    def __post_init__(self):
        if self.wavelength <= 0:
            raise ValueError(f"wavelength must be > 0, got {self.wavelength}")
        if self.waist <= 0:
            raise ValueError(f"waist must be > 0, got {self.waist}")
        for name, order in (("order_x", self.order_x), ("order_y", self.order_y)):
            if order < 0:
                raise ValueError(f"{name} must be >= 0, got {order}")
            if order > MAX_MODE_ORDER:
                raise UnsupportedOrderError(
                    f"{name}={order} above stability-tested cap {MAX_MODE_ORDER}"
                )

    @property
    def wavenumber(self) -> float:
        return 2.0 * math.pi / self.wavelength


@dataclass(frozen=True)
class CoherenceSpec:
    """Scalar spatial correlation length of the source, m."""

    sigma0: float

    def __post_init__(self):
        if self.sigma0 <= 0:
            raise ValueError(f"sigma0 must be > 0, got {self.sigma0}")


@dataclass(frozen=True)
class Observation:
    """Transverse observation point (rho_x, rho_y) in the plane z > 0."""

    rho_x: float
    rho_y: float
    z: float

    def __post_init__(self):
        if self.z <= 0:
            raise ValueError(
                f"propagated quantities need z > 0, got z={self.z}"
            )


@dataclass(frozen=True)
class PropagationConstants:
    """Per-point constants of the closed-form intensity (SI units)."""

    a: float
    b_x: complex
    b_y: complex
    d: float
    eps_inv2: float


def source_field(beam: BeamParams, rho_x: float, rho_y: float) -> float:
    """Deterministic Hermite-Gaussian mode amplitude in the source plane."""
    s = math.sqrt(2.0) / beam.waist
    return (
        hermite(beam.order_x, s * rho_x)
        * hermite(beam.order_y, s * rho_y)
        * math.exp(-(rho_x**2 + rho_y**2) / beam.waist**2)
    )


def coherence_degree(spec: CoherenceSpec, dx: float, dy: float) -> float:
    """Gaussian degree of coherence between points separated by (dx, dy)."""
    return math.exp(-(dx**2 + dy**2) / (2.0 * spec.sigma0**2))


def source_csd(
    beam: BeamParams,
    spec: CoherenceSpec,
    rho1: tuple[float, float],
    rho2: tuple[float, float],
) -> float:
    """Cross-spectral density of the source between two transverse points."""
    return (
        source_field(beam, *rho1)
        * source_field(beam, *rho2)
        * coherence_degree(spec, rho1[0] - rho2[0], rho1[1] - rho2[1])
    )


def coherence_eps_inv2(beam: BeamParams, sigma0: float, inv_rho2: float) -> float:
    """Combined source/coherence/turbulence width term 1/eps^2, m^-2."""
    return 0.5 / beam.waist**2 + 0.5 / sigma0**2 + inv_rho2


def propagation_constants(
    beam: BeamParams,
    spec: CoherenceSpec,
    path: PathSpec,
    obs: Observation,
) -> PropagationConstants:
    """Closed-form constants for one observation point.

    The observation plane must sit at the path's propagation distance; build
    per-distance paths with ``PathSpec.at_distance`` when sweeping z.
    """
    if not math.isclose(path.distance, obs.z, rel_tol=1e-12, abs_tol=0.0):
        raise ValueError(
            f"observation plane z={obs.z} does not match path distance "
            f"{path.distance}"
        )
    k = beam.wavenumber
    inv_rho2 = effective_inverse_rho2(path, k)
    eps_inv2 = coherence_eps_inv2(beam, spec.sigma0, inv_rho2)
    return _constants_from_eps(beam, eps_inv2, obs)


def _constants_from_eps(
    beam: BeamParams, eps_inv2: float, obs: Observation
) -> PropagationConstants:
    k = beam.wavenumber
    z = obs.z
    fresnel = k * k * beam.waist**2 / (8.0 * z * z)
    return PropagationConstants(
        a=fresnel + eps_inv2,
        b_x=1j * k * obs.rho_x / (2.0 * z),
        b_y=1j * k * obs.rho_y / (2.0 * z),
        d=2.0 * fresnel + 1.0 / beam.waist**2,
        eps_inv2=eps_inv2,
    )


def series_s(order: int, a: float, b: complex, d: float) -> float:
    """Per-axis factor S of the propagated intensity.

    S = 2^order order! exp(b^2/a) * sum over 0 <= k <= l <= order of

        (-1)^l C(order, l) (d^l / l!) (2l)! / ((2l-2k)! k!)
        * b^(2(l-k)) 4^(-k) a^(k-2l)

    regrouped so that b = 0 (on axis) needs no division; only the k = l
    terms survive there.  b is purely imaginary for physical observation
    points, so b^2 is real and S is real; a residual imaginary part above
    the tolerance signals inconsistent constants and raises.
    """
    if order < 0:
        raise ValueError(f"order must be >= 0, got {order}")
    if order > MAX_MODE_ORDER:
        raise UnsupportedOrderError(
            f"series order {order} above stability-tested cap {MAX_MODE_ORDER}"
        )
    if a <= 0:
        raise ValueError(f"series needs a > 0, got a={a}")
    if d <= 0:
        raise ValueError(f"series needs d > 0, got d={d}")

    b = complex(b)
    b2 = b * b
    mag_b2 = abs(b2)
    unit_b2 = b2 / mag_b2 if mag_b2 > 0.0 else 0.0j
    log_b2 = math.log(mag_b2) if mag_b2 > 0.0 else -math.inf
    log_a = math.log(a)
    log_d = math.log(d)

    logs: list[float] = []
    phases: list[complex] = []
    for l in range(order + 1):
        log_common = (
            binomial(order, l).log_magnitude
            + l * log_d
            - log_factorial(l)
            + log_factorial(2 * l)
        )
        sign_l = -1.0 if l % 2 else 1.0
        for k in range(l + 1):
            j = l - k
            if j > 0 and mag_b2 == 0.0:
                continue
            logs.append(
                log_common
                - log_factorial(2 * j)
                - log_factorial(k)
                + (j * log_b2 if j else 0.0)
                - k * _LOG4
                + (k - 2 * l) * log_a
            )
            phases.append(sign_l * unit_b2**j)

    top = max(logs)
    re = math.fsum(math.exp(lg - top) * ph.real for lg, ph in zip(logs, phases))
    im = math.fsum(math.exp(lg - top) * ph.imag for lg, ph in zip(logs, phases))

    log_scale = top + order * _LOG2 + log_factorial(order) + (b2 / a).real
    rotation = cmath.exp(1j * (b2 / a).imag)
    total = complex(re, im) * rotation * math.exp(log_scale)

    scale = abs(total)
    if scale > 0.0 and abs(total.imag) > _IMAG_RESIDUE_TOL * scale:
        raise NumericFailure(
            f"series came back complex (residue {abs(total.imag) / scale:.3e}); "
            "b must be purely imaginary",
            estimate=abs(total.imag),
        )
    return total.real


def intensity(
    beam: BeamParams,
    spec: CoherenceSpec,
    path: PathSpec,
    obs: Observation,
) -> float:
    """Propagated intensity at one observation point (arbitrary units).

    The absolute normalization is not meaningful; only profile ratios and
    the degree of polarization are exposed to users.
    """
    c = propagation_constants(beam, spec, path, obs)
    k = beam.wavenumber
    prefactor = (k / (2.0 * obs.z)) ** 2 * beam.waist**2 / (2.0 * c.a)
    return (
        prefactor
        * series_s(beam.order_x, c.a, c.b_x, c.d)
        * series_s(beam.order_y, c.a, c.b_y, c.d)
    )
