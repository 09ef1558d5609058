import math

import pytest

from hgpol import (
    BeamParams,
    CoherenceSpec,
    PathKind,
    PathSpec,
    PolarizationSource,
    TurbulenceProfile,
)

# Reference parameter set shared by most tests (matches the shipped config).
WAVELENGTH = 800e-9
WAIST = 0.03
SIGMA0 = 0.01
ZENITH = math.pi / 3
WAVENUMBER = 2.0 * math.pi / WAVELENGTH


@pytest.fixture
def profile():
    return TurbulenceProfile(cn2_ground=1e-14, wind_rms=2.1, inner_scale=0.01)


@pytest.fixture
def source():
    return PolarizationSource(
        gamma_xx=0.5, gamma_yy=0.5, gamma_xy=0.1,
        sigma0_xx=0.01, sigma0_yy=0.01, sigma0_xy=0.02,
    )


@pytest.fixture
def make_beam():
    def _make(m=2, n=2):
        return BeamParams(wavelength=WAVELENGTH, waist=WAIST, order_x=m, order_y=n)

    return _make


@pytest.fixture
def make_path(profile):
    def _make(kind, z, zenith=ZENITH):
        return PathSpec(kind=kind, distance=z, zenith=zenith, profile=profile)

    return _make


@pytest.fixture
def coherence():
    return CoherenceSpec(sigma0=SIGMA0)


def path_kinds():
    return list(PathKind)
