"""2x2 coherence matrix and degree of polarization of the propagated beam.

Each matrix element propagates like the scalar intensity but with its own
correlation length sigma0_ij and cross-correlation weight gamma_ij; the
upper triangle is stored and w_yx is the conjugate of w_xy by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateMatrixError, RealizabilityError
from .propagation import (
    BeamParams,
    Observation,
    _constants_from_eps,
    coherence_eps_inv2,
    series_s,
)
from .turbulence import PathSpec, effective_inverse_rho2

_DET_CLAMP = 1.0e-12


@dataclass(frozen=True)
class PolarizationSource:
    """Per-component correlations of the electromagnetic source.

    gamma_xx / gamma_yy weight the diagonal elements, gamma_xy the complex
    cross element (gamma_yx is its conjugate and is not stored).  The
    sigma0_ij are the per-element correlation lengths in m.
    """

    gamma_xx: float
    gamma_yy: float
    gamma_xy: complex
    sigma0_xx: float
    sigma0_yy: float
    sigma0_xy: float

    def __post_init__(self):
        if self.gamma_xx < 0 or self.gamma_yy < 0:
            raise ValueError(
                f"diagonal gammas must be >= 0, got "
                f"({self.gamma_xx}, {self.gamma_yy})"
            )
        if abs(self.gamma_xy) ** 2 > self.gamma_xx * self.gamma_yy * (1 + 1e-12):
            raise RealizabilityError(
                f"|gamma_xy|^2 = {abs(self.gamma_xy)**2:.6g} exceeds "
                f"gamma_xx*gamma_yy = {self.gamma_xx * self.gamma_yy:.6g}"
            )
        for name, s in (
            ("sigma0_xx", self.sigma0_xx),
            ("sigma0_yy", self.sigma0_yy),
            ("sigma0_xy", self.sigma0_xy),
        ):
            if s <= 0:
                raise ValueError(f"{name} must be > 0, got {s}")

    def gamma(self, ij: str) -> complex:
        return {"xx": complex(self.gamma_xx), "yy": complex(self.gamma_yy),
                "xy": complex(self.gamma_xy)}[ij]

    def sigma0(self, ij: str) -> float:
        return {"xx": self.sigma0_xx, "yy": self.sigma0_yy,
                "xy": self.sigma0_xy}[ij]


@dataclass(frozen=True)
class CoherenceMatrix2:
    """Hermitian 2x2 coherence matrix at one observation point."""

    w_xx: float
    w_yy: float
    w_xy: complex

    @property
    def w_yx(self) -> complex:
        return self.w_xy.conjugate()

    @property
    def trace(self) -> float:
        return self.w_xx + self.w_yy

    @property
    def det(self) -> float:
        return self.w_xx * self.w_yy - abs(self.w_xy) ** 2


@dataclass(frozen=True)
class PolarizationResult:
    """Evaluated point: matrix, degree of polarization, normalized intensity."""

    observation: Observation
    matrix: CoherenceMatrix2
    dop: float
    normalized_intensity: float = 1.0


def _element(
    beam: BeamParams,
    source: PolarizationSource,
    ij: str,
    inv_rho2: float,
    obs: Observation,
) -> complex:
    gamma = source.gamma(ij)
    if gamma == 0:
        return 0.0j
    eps_inv2 = coherence_eps_inv2(beam, source.sigma0(ij), inv_rho2)
    c = _constants_from_eps(beam, eps_inv2, obs)
    k = beam.wavenumber
    prefactor = (k / (2.0 * obs.z)) ** 2 * beam.waist**2 / (2.0 * c.a)
    return (
        gamma
        * prefactor
        * series_s(beam.order_x, c.a, c.b_x, c.d)
        * series_s(beam.order_y, c.a, c.b_y, c.d)
    )


def csd_element(
    ij: str,
    beam: BeamParams,
    source: PolarizationSource,
    path: PathSpec,
    obs: Observation,
) -> complex:
    """One propagated coherence-matrix element W_ij at coincident points."""
    if ij == "yx":
        return csd_element("xy", beam, source, path, obs).conjugate()
    if ij not in ("xx", "yy", "xy"):
        raise ValueError(f"unknown element {ij!r}; use xx, yy, xy or yx")
    inv_rho2 = effective_inverse_rho2(path.at_distance(obs.z), beam.wavenumber)
    return _element(beam, source, ij, inv_rho2, obs)


def coherence_matrix(
    beam: BeamParams,
    source: PolarizationSource,
    path: PathSpec,
    obs: Observation,
) -> CoherenceMatrix2:
    """Assemble the Hermitian coherence matrix at one observation point."""
    inv_rho2 = effective_inverse_rho2(path.at_distance(obs.z), beam.wavenumber)
    return coherence_matrix_from_inverse_rho2(beam, source, inv_rho2, obs)


def coherence_matrix_from_inverse_rho2(
    beam: BeamParams,
    source: PolarizationSource,
    inv_rho2: float,
    obs: Observation,
) -> CoherenceMatrix2:
    """Matrix assembly with the turbulence term supplied by the caller.

    Lets sweep drivers compute 1/rho^2 once per point instead of once per
    element.
    """
    w_xx = _element(beam, source, "xx", inv_rho2, obs)
    w_yy = _element(beam, source, "yy", inv_rho2, obs)
    w_xy = _element(beam, source, "xy", inv_rho2, obs)
    return CoherenceMatrix2(w_xx=w_xx.real, w_yy=w_yy.real, w_xy=w_xy)


def degree_of_polarization(matrix: CoherenceMatrix2) -> float:
    """P = sqrt(1 - 4 det(W) / trace(W)^2), clamped against roundoff.

    A determinant more negative than the roundoff tolerance means the
    source correlations were not realizable and raises instead of clamping.
    """
    tr = matrix.trace
    if tr <= 0:
        raise DegenerateMatrixError(f"matrix trace must be > 0, got {tr}")
    det = matrix.det
    if det < -_DET_CLAMP * tr * tr:
        raise RealizabilityError(
            f"determinant {det:.6g} below roundoff floor; "
            "inconsistent gamma/sigma inputs"
        )
    det = max(det, 0.0)
    radicand = 1.0 - 4.0 * det / (tr * tr)
    return math.sqrt(min(max(radicand, 0.0), 1.0))


def source_dop(source: PolarizationSource) -> float:
    """Degree of polarization in the source plane.

    At z = 0 the shared mode profile cancels from the matrix, leaving the
    gamma weights alone; the result is independent of mode orders and of
    the sigma0 values.
    """
    tr = source.gamma_xx + source.gamma_yy
    if tr <= 0:
        raise DegenerateMatrixError(
            f"gamma_xx + gamma_yy must be > 0, got {tr}"
        )
    det = source.gamma_xx * source.gamma_yy - abs(source.gamma_xy) ** 2
    det = max(det, 0.0)
    radicand = 1.0 - 4.0 * det / (tr * tr)
    return math.sqrt(min(max(radicand, 0.0), 1.0))


def evaluate_polarization(
    beam: BeamParams,
    source: PolarizationSource,
    path: PathSpec,
    obs: Observation,
) -> PolarizationResult:
    """Matrix plus degree of polarization at one observation point."""
    matrix = coherence_matrix(beam, source, path, obs)
    return PolarizationResult(
        observation=obs, matrix=matrix, dop=degree_of_polarization(matrix)
    )
