"""Target-builder tests: families, grids, images, random ensembles."""

import numpy as np
import pytest

from mpsenc import fidelity, mps_from_statevector, truncate
from mpsenc.errors import FormatError, InvalidInputError, ShapeError
from mpsenc.targets import (
    TargetSpec,
    bundled_phantom_path,
    chebyshev_family,
    discretise,
    grid_points,
    image_vector,
    ingest_image,
    make_family,
    random_mps,
    synthetic_phantom,
    target_mps,
    write_pgm,
)

from helpers import dense_from_mps, dense_truncate, state_fidelity


class TestFamilies:
    def test_heaviside_grid_values(self):
        spec = TargetSpec.function("heaviside", 4)
        vec = discretise(spec)
        assert np.allclose(vec[:8], 0.0)
        assert np.allclose(vec[8:], 1.0 / np.sqrt(8))

    def test_linear_analytic_values(self):
        spec = TargetSpec.function("linear", 3)
        vec = discretise(spec)
        expected = np.array([-1, -5 / 7, -3 / 7, -1 / 7, 1 / 7, 3 / 7, 5 / 7, 1.0])
        expected = expected / np.linalg.norm(expected)
        assert np.allclose(vec, expected, atol=1e-14)

    def test_log_shifted_epsilon_default(self):
        family = make_family("log-shifted")
        assert family.params["eps"] == 1e-6
        assert np.isfinite(family(np.array([-1.0])))[0]

    def test_seeded_families_reproducible(self):
        for name, kwargs in [
            ("uniform-roots-poly", {"degree": 6, "seed": 9}),
            ("cubic-spline", {"knots": 7, "seed": 9}),
            ("piecewise-poly", {"intervals": 5, "degree": 3, "seed": 9}),
            ("piecewise-chebyshev", {"intervals": 5, "degree": 3, "seed": 9}),
        ]:
            f1 = make_family(name, **kwargs)
            f2 = make_family(name, **kwargs)
            x = np.linspace(-1, 1, 257)
            assert np.array_equal(f1(x), f2(x)), name

    def test_continuous_piecewise_joins(self):
        family = make_family("piecewise-poly", intervals=4, degree=3,
                             seed=3, discontinuous=False)
        edges = np.linspace(-1, 1, 5)[1:-1]
        for e in edges:
            below = family(np.array([e - 1e-9]))[0]
            above = family(np.array([e + 1e-9]))[0]
            assert abs(below - above) < 1e-6

    def test_unknown_family_rejected(self):
        with pytest.raises(InvalidInputError):
            make_family("fourier-wavelet")

    def test_unused_parameter_rejected(self):
        with pytest.raises(InvalidInputError):
            make_family("linear", sigma=0.5)

    def test_hockey_stick_default_strike(self):
        family = make_family("hockey-stick")
        assert family(np.array([-0.5, 0.5])).tolist() == [0.0, 0.5]


class TestDiscretise:
    def test_grid_endpoints_shared_across_sizes(self):
        for n in (3, 4, 5):
            spec = TargetSpec.function("exp", n)
            x = grid_points(spec)
            assert x[0] == -1.0 and x[-1] == 1.0

    def test_zero_norm_target_rejected(self):
        spec = TargetSpec.function("polynomial", 4, coeffs=(0.0,))
        with pytest.raises(InvalidInputError):
            discretise(spec)

    def test_dense_cap_enforced(self):
        spec = TargetSpec.function("exp", 25)
        with pytest.raises(InvalidInputError):
            discretise(spec)

    def test_gaussian_truncation_curve_monotone(self):
        spec = TargetSpec.function("gaussian", 12, sigma=0.3)
        mps = target_mps(spec)
        last = 1.0
        for chi in (1, 2, 3, 4, 6, 8):
            truncated, _ = truncate(mps, chi)
            infid = 1.0 - fidelity(truncated, mps)
            assert infid <= last + 1e-12
            last = infid


class TestTargetMps:
    def test_sine_exact_chi2(self):
        for n in (6, 12, 18):
            spec = TargetSpec.function("sine", n, k=1)
            mps = target_mps(spec)
            assert mps.max_bond == 2
            capped = target_mps(spec, chi_max=2)
            assert fidelity(capped, mps) == pytest.approx(1.0, abs=1e-12)

    def test_root_chi2_fidelity_reference(self):
        """f = sqrt(x+1) on 16 qubits has a 0.99998-grade rank-2 core."""
        spec = TargetSpec.function("root", 16)
        exact = target_mps(spec)
        capped, _ = truncate(exact, 2)
        assert fidelity(capped, exact) == pytest.approx(0.99998, abs=2e-4)

    def test_image_row_major_flattening(self):
        pixels = np.array([[0.0, 1.0], [1.0, 0.0]])
        spec = TargetSpec.image(pixels)
        mps = target_mps(spec)
        vec = dense_from_mps(mps)
        expected = np.array([0, 1, 1, 0]) / np.sqrt(2)
        phase = np.exp(-1j * np.angle(np.vdot(expected, vec)))
        assert np.allclose(vec * phase, expected, atol=1e-12)

    def test_image_round_trip(self):
        img = synthetic_phantom(16)
        spec = TargetSpec.image(img)
        mps = target_mps(spec)
        vec = np.real(dense_from_mps(mps))
        expected = image_vector(img)
        sign = np.sign(np.dot(vec, expected))
        assert np.max(np.abs(vec * sign - expected.reshape(-1))) < 1e-9


class TestRandomMps:
    def test_chi_one_is_product(self):
        from mpsenc import schmidt_spectrum

        mps = random_mps(8, 1, 0)
        for bond in range(1, 8):
            assert schmidt_spectrum(mps, bond).entropy < 1e-12

    def test_deterministic(self):
        a = random_mps(10, 5, 42)
        b = random_mps(10, 5, 42)
        for x, y in zip(a.cores, b.cores):
            assert np.array_equal(x, y)

    def test_left_canonical_and_normalized(self):
        mps = random_mps(9, 4, 7)
        assert abs(mps.norm() - 1.0) < 1e-12
        for core in mps.cores[:-1]:
            alpha_l, _, alpha_r = core.shape
            mat = core.reshape(alpha_l * 2, alpha_r)
            assert np.max(np.abs(mat.conj().T @ mat - np.eye(alpha_r))) < 1e-12

    def test_truncation_statistic_window(self):
        """Mean chi=5 -> chi=2 fidelity sits in the reference band."""
        fids = []
        for seed in range(10):
            mps = random_mps(12, 5, seed)
            truncated, _ = truncate(mps, 2)
            fids.append(fidelity(truncated, mps))
        fids = np.array(fids)
        assert 0.20 <= fids.mean() <= 0.55
        assert 0.04 <= fids.std(ddof=1) <= 0.25


class TestImageIngestion:
    def test_pgm_round_trip(self, tmp_path):
        img = synthetic_phantom(16)
        path = tmp_path / "img.pgm"
        write_pgm(img, path)
        spec = ingest_image(path)
        assert spec.pixels.shape == (16, 16)
        assert np.max(np.abs(spec.pixels - img)) <= 0.5 / 255 + 1e-12

    def test_tiny_pgm_values(self, tmp_path):
        path = tmp_path / "tiny.pgm"
        path.write_bytes(b"P5\n2 2\n255\n" + bytes([0, 255, 255, 0]))
        spec = ingest_image(path)
        vec = image_vector(spec.pixels)
        assert np.allclose(vec, np.array([0, 1, 1, 0]) / np.sqrt(2))

    def test_csv_single_bright_pixel(self, tmp_path):
        img = np.zeros((8, 8))
        img[3, 5] = 1.0
        path = tmp_path / "img.csv"
        np.savetxt(path, img, delimiter=",")
        spec = ingest_image(path)
        mps = target_mps(spec)
        assert mps.max_bond == 1  # basis state

    def test_csv_8bit_scaling(self, tmp_path):
        path = tmp_path / "img.csv"
        np.savetxt(path, np.full((4, 4), 255.0), delimiter=",")
        spec = ingest_image(path)
        assert np.allclose(spec.pixels, 1.0)

    def test_raw_u8(self, tmp_path):
        path = tmp_path / "img.raw"
        path.write_bytes(bytes(range(16)))
        spec = ingest_image(path, "raw")
        assert spec.pixels.shape == (4, 4)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "bad.pgm"
        path.write_bytes(b"P2\n2 2\n255\n0 0 0 0")
        with pytest.raises(FormatError):
            ingest_image(path)

    def test_non_power_of_two_guidance(self, tmp_path):
        path = tmp_path / "odd.pgm"
        path.write_bytes(b"P5\n3 3\n255\n" + bytes(9))
        with pytest.raises(ShapeError, match="pad or crop"):
            ingest_image(path)

    def test_bundled_phantom_loads(self):
        spec = ingest_image(bundled_phantom_path())
        assert spec.pixels.shape == (128, 128)
        assert spec.n_qubits == 14


class TestTargetSpecValidation:
    def test_domain_ordering(self):
        with pytest.raises(InvalidInputError):
            TargetSpec.function("exp", 4, domain=(1.0, -1.0))

    def test_rectangular_image_rejected(self):
        with pytest.raises(ShapeError):
            TargetSpec.image(np.zeros((4, 8)))

    def test_pixel_range_enforced(self):
        with pytest.raises(InvalidInputError):
            TargetSpec.image(np.full((4, 4), 2.0))

    def test_random_chi_validated(self):
        with pytest.raises(InvalidInputError):
            TargetSpec.random(6, 0, 1)
