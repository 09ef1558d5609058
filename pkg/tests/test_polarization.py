import math
from dataclasses import replace

import pytest

from hgpol.errors import DegenerateMatrixError, RealizabilityError
from hgpol.polarization import (
    CoherenceMatrix2,
    PolarizationSource,
    coherence_matrix,
    csd_element,
    degree_of_polarization,
    evaluate_polarization,
    source_dop,
)
from hgpol.propagation import CoherenceSpec, Observation, intensity
from hgpol.turbulence import PathKind, PathSpec, TurbulenceProfile

from conftest import ZENITH


class TestSourceValidation:
    def test_realizability_enforced(self):
        with pytest.raises(RealizabilityError):
            PolarizationSource(0.5, 0.5, 0.6, 0.01, 0.01, 0.02)

    def test_negative_gamma_rejected(self):
        with pytest.raises(ValueError):
            PolarizationSource(-0.1, 0.5, 0.0, 0.01, 0.01, 0.02)

    def test_sigma_positive(self):
        with pytest.raises(ValueError):
            PolarizationSource(0.5, 0.5, 0.1, 0.0, 0.01, 0.02)


class TestCsdElement:
    def test_zero_gamma_kills_element(self, make_beam, profile):
        src = PolarizationSource(0.5, 0.5, 0.0, 0.01, 0.01, 0.02)
        beam = make_beam()
        path = PathSpec(PathKind.HORIZONTAL, 1e4, profile=profile)
        obs = Observation(0.0, 0.0, 1e4)
        assert csd_element("xy", beam, src, path, obs) == 0.0

    def test_yx_is_conjugate(self, make_beam, source, profile):
        beam = make_beam()
        src = replace(source, gamma_xy=0.1 + 0.05j)
        path = PathSpec(PathKind.HORIZONTAL, 1e4, profile=profile)
        obs = Observation(0.002, 0.001, 1e4)
        w_xy = csd_element("xy", beam, src, path, obs)
        w_yx = csd_element("yx", beam, src, path, obs)
        assert w_yx == w_xy.conjugate()
        assert w_xy.imag != 0.0

    def test_diagonal_matches_scalar_intensity(self, make_beam, source, profile):
        # trace identity: w_ii equals gamma_ii times the scalar intensity
        # with the matching correlation length
        beam = make_beam(2, 2)
        path = PathSpec(PathKind.HORIZONTAL, 1e4, profile=profile)
        obs = Observation(0.01, 0.0, 1e4)
        w_xx = csd_element("xx", beam, source, path, obs)
        scalar = intensity(beam, CoherenceSpec(source.sigma0_xx), path, obs)
        assert w_xx.real == pytest.approx(0.5 * scalar, rel=1e-12)
        assert w_xx.imag == 0.0

    def test_unknown_element_rejected(self, make_beam, source, profile):
        beam = make_beam()
        path = PathSpec(PathKind.HORIZONTAL, 1e4, profile=profile)
        with pytest.raises(ValueError):
            csd_element("zz", beam, source, path, Observation(0, 0, 1e4))


class TestCoherenceMatrix:
    def test_symmetric_source_is_unpolarized(self, make_beam, profile):
        src = PolarizationSource(0.5, 0.5, 0.0, 0.01, 0.01, 0.02)
        beam = make_beam()
        path = PathSpec(PathKind.SLANT_DOWN, 1e4, ZENITH, profile)
        matrix = coherence_matrix(beam, src, path, Observation(0.0, 0.0, 1e4))
        assert matrix.w_xx == pytest.approx(matrix.w_yy, rel=1e-14)
        assert matrix.w_xy == 0.0
        assert degree_of_polarization(matrix) == 0.0

    def test_reference_matrix_stays_realizable(self, make_beam, source, profile):
        beam = make_beam()
        path = PathSpec(PathKind.HORIZONTAL, 1e4, profile=profile)
        for rho in (0.0, 0.01, 0.03):
            matrix = coherence_matrix(
                beam, source, path, Observation(rho, -rho, 1e4)
            )
            assert matrix.det > 0.0
            assert matrix.trace > 0.0

    def test_trace_is_weighted_intensity_sum(self, make_beam, source, profile):
        beam = make_beam(1, 3)
        path = PathSpec(PathKind.HORIZONTAL, 5e3, profile=profile)
        obs = Observation(0.004, 0.009, 5e3)
        matrix = coherence_matrix(beam, source, path, obs)
        expected = 0.5 * intensity(
            beam, CoherenceSpec(source.sigma0_xx), path, obs
        ) + 0.5 * intensity(beam, CoherenceSpec(source.sigma0_yy), path, obs)
        assert matrix.trace == pytest.approx(expected, rel=1e-12)

    def test_hermiticity_by_construction(self, make_beam, source, profile):
        beam = make_beam()
        src = replace(source, gamma_xy=0.08 - 0.03j)
        path = PathSpec(PathKind.SLANT_UP, 1e4, ZENITH, profile)
        matrix = coherence_matrix(beam, src, path, Observation(0.01, 0.02, 1e4))
        assert matrix.w_yx == matrix.w_xy.conjugate()


class TestDegreeOfPolarization:
    def test_unpolarized(self):
        assert degree_of_polarization(CoherenceMatrix2(0.5, 0.5, 0.0)) == 0.0

    def test_fully_polarized(self):
        assert degree_of_polarization(CoherenceMatrix2(0.7, 0.0, 0.0)) == 1.0

    def test_reference_two_by_two(self):
        # [[0.5, 0.1], [0.1, 0.5]]: P = sqrt(1 - 4*0.24) = 0.2
        matrix = CoherenceMatrix2(0.5, 0.5, 0.1)
        assert degree_of_polarization(matrix) == pytest.approx(0.2, abs=1e-15)

    def test_roundoff_determinant_clamped(self):
        matrix = CoherenceMatrix2(0.5, 0.5, 0.5 * (1 + 1e-14))
        assert degree_of_polarization(matrix) == 1.0

    def test_degenerate_trace_raises(self):
        with pytest.raises(DegenerateMatrixError):
            degree_of_polarization(CoherenceMatrix2(0.0, 0.0, 0.0))

    def test_unrealizable_matrix_raises(self):
        with pytest.raises(RealizabilityError):
            degree_of_polarization(CoherenceMatrix2(0.1, 0.1, 0.5))


class TestSourceDop:
    def test_unpolarized_symmetric(self):
        src = PolarizationSource(0.4, 0.4, 0.0, 0.01, 0.01, 0.02)
        assert source_dop(src) == 0.0

    def test_reference_value(self, source):
        assert source_dop(source) == pytest.approx(0.2, abs=1e-14)

    def test_rank_one_is_fully_polarized(self):
        src = PolarizationSource(0.5, 0.5, 0.5, 0.01, 0.01, 0.02)
        assert source_dop(src) == pytest.approx(1.0, abs=1e-14)

    def test_degenerate_raises(self):
        src = PolarizationSource(0.0, 0.0, 0.0, 0.01, 0.01, 0.02)
        with pytest.raises(DegenerateMatrixError):
            source_dop(src)


class TestPolarizationProperties:
    def test_dop_in_unit_interval_across_paths(self, make_beam, source, profile):
        beam = make_beam()
        for kind in PathKind:
            for z in (1e2, 1e3, 1e4, 5e4):
                path = PathSpec(kind, z, ZENITH, profile)
                result = evaluate_polarization(
                    beam, source, path, Observation(0.0, 0.0, z)
                )
                assert 0.0 <= result.dop <= 1.0
                assert result.dop == pytest.approx(
                    degree_of_polarization(result.matrix), abs=1e-12
                )

    def test_gamma_scale_invariance(self, make_beam, source, profile):
        beam = make_beam()
        path = PathSpec(PathKind.HORIZONTAL, 1e4, profile=profile)
        obs = Observation(0.005, 0.0, 1e4)
        reference = degree_of_polarization(
            coherence_matrix(beam, source, path, obs)
        )
        for c in (0.25, 0.5, 1.0):
            scaled = PolarizationSource(
                source.gamma_xx * c, source.gamma_yy * c, source.gamma_xy * c,
                source.sigma0_xx, source.sigma0_yy, source.sigma0_xy,
            )
            got = degree_of_polarization(
                coherence_matrix(beam, scaled, path, obs)
            )
            assert got == pytest.approx(reference, abs=1e-13)

    def test_short_distance_continuity(self, make_beam, source, profile):
        # P approaches the source value monotonically as z shrinks
        beam = make_beam()
        target = source_dop(source)
        gaps = []
        for z in (1.0, 3.0, 10.0, 30.0):
            path = PathSpec(PathKind.HORIZONTAL, z, profile=profile)
            p = degree_of_polarization(
                coherence_matrix(beam, source, path, Observation(0, 0, z))
            )
            gaps.append(abs(p - target))
        assert gaps == sorted(gaps)
        assert gaps[0] < 0.02

    def test_free_space_equals_calm_horizontal(self, make_beam, source):
        beam = make_beam()
        calm = TurbulenceProfile(cn2_ground=0.0, wind_rms=2.1)
        for z in (1e3, 1e4):
            free = PathSpec(PathKind.FREE_SPACE, z)
            horizontal = PathSpec(PathKind.HORIZONTAL, z, profile=calm)
            for rho in (0.0, 0.01):
                obs = Observation(rho, rho / 2, z)
                p_free = degree_of_polarization(
                    coherence_matrix(beam, source, free, obs)
                )
                p_horiz = degree_of_polarization(
                    coherence_matrix(beam, source, horizontal, obs)
                )
                assert p_free == pytest.approx(p_horiz, abs=1e-12)
