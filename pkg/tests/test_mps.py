"""Tensor-core tests: construction, canonical forms, truncation, gates."""

import numpy as np
import pytest

from mpsenc import (
    MPS,
    apply_single_qubit_gate,
    apply_two_qubit_gate,
    canonicalize,
    fidelity,
    inner_product,
    load_mps,
    mps_from_statevector,
    save_mps,
    schmidt_spectrum,
    truncate,
    zero_state,
)
from mpsenc.errors import InvalidInputError, ShapeError, UnitarityError
from mpsenc.mps import entanglement_entropy

from helpers import (
    apply_gate_dense,
    crandn,
    dense_from_mps,
    dense_entropy,
    dense_schmidt,
    dense_truncate,
    random_state,
    state_fidelity,
)

CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
                dtype=np.complex128)


def left_isometry_residual(core):
    alpha_l, _, alpha_r = core.shape
    mat = core.reshape(alpha_l * 2, alpha_r)
    return np.max(np.abs(mat.conj().T @ mat - np.eye(alpha_r)))


def right_isometry_residual(core):
    alpha_l, _, alpha_r = core.shape
    mat = core.reshape(alpha_l, 2 * alpha_r)
    return np.max(np.abs(mat @ mat.conj().T - np.eye(alpha_l)))


class TestFromStatevector:
    def test_basis_state_is_product(self):
        vec = np.zeros(16)
        vec[0] = 1.0
        mps = mps_from_statevector(vec)
        assert mps.max_bond == 1
        for core in mps.cores:
            assert np.allclose(core.reshape(2), [1.0, 0.0])

    def test_uniform_state_is_product(self):
        mps = mps_from_statevector(np.full(16, 0.25))
        assert mps.max_bond == 1

    def test_heaviside_bond_dimension_one(self):
        """A step at the grid midpoint factorizes across every cut."""
        x = np.linspace(-1, 1, 2 ** 16)
        vec = (x >= 0).astype(float)
        mps = mps_from_statevector(vec / np.linalg.norm(vec))
        assert mps.max_bond == 1

    @pytest.mark.parametrize("n", [2, 4, 6, 8, 10])
    def test_round_trip(self, n, rng):
        vec = random_state(n, rng)
        mps = mps_from_statevector(vec)
        out = mps.to_statevector()
        phase = np.exp(-1j * np.angle(np.vdot(vec, out)))
        assert np.max(np.abs(out * phase - vec)) < 1e-10

    def test_left_canonical_on_construction(self, rng):
        mps = mps_from_statevector(random_state(6, rng))
        assert mps.canonical == "left"
        for core in mps.cores[:-1]:
            assert left_isometry_residual(core) < 1e-12

    def test_zero_norm_rejected(self):
        with pytest.raises(InvalidInputError):
            mps_from_statevector(np.zeros(8))

    def test_non_power_of_two_rejected(self):
        with pytest.raises(ShapeError):
            mps_from_statevector(np.ones(6))

    def test_truncating_construction_caps_bonds(self, rng):
        mps = mps_from_statevector(random_state(8, rng), chi_max=3)
        assert mps.max_bond <= 3


class TestCanonicalize:
    def test_left_form_preserves_state(self, rng):
        cores = [crandn((1, 2, 3), rng), crandn((3, 2, 4), rng),
                 crandn((4, 2, 2), rng), crandn((2, 2, 1), rng)]
        raw = MPS(cores=tuple(cores))
        left = canonicalize(raw, "left")
        overlap = inner_product(left, raw)
        norm_l, norm_r = left.norm(), raw.norm()
        assert abs(abs(overlap) / (norm_l * norm_r) - 1.0) < 1e-10
        for core in left.cores[:-1]:
            assert left_isometry_residual(core) < 1e-12

    def test_mixed_form_isometries(self, rng):
        mps = mps_from_statevector(random_state(6, rng))
        mixed = canonicalize(mps, "mixed", center=3)
        for k in range(3):
            assert left_isometry_residual(mixed.cores[k]) < 1e-12
        for k in range(4, 6):
            assert right_isometry_residual(mixed.cores[k]) < 1e-12
        assert fidelity(mixed, mps) == pytest.approx(1.0, abs=1e-12)

    def test_already_canonical_is_stable(self, rng):
        mps = mps_from_statevector(random_state(6, rng))
        again = canonicalize(mps, "left")
        assert fidelity(again, mps) == pytest.approx(1.0, abs=1e-12)


class TestTruncate:
    def test_product_state_unchanged(self):
        mps = zero_state(6)
        out, err = truncate(mps, 4)
        assert err == 0.0
        assert fidelity(out, mps) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("chi", [1, 2, 3, 5])
    def test_matches_dense_oracle(self, chi, rng):
        """Sweep truncation must agree with the dense bipartition SVDs."""
        vec = random_state(8, rng)
        mps = mps_from_statevector(vec)
        out, err = truncate(mps, chi)
        dense_vec, dense_err = dense_truncate(vec, chi)
        assert abs(err - dense_err) < 1e-9
        assert abs(fidelity(out, mps) - state_fidelity(dense_vec, vec)) < 1e-9
        assert out.max_bond <= chi

    def test_gaussian_infidelity_monotone(self):
        x = np.linspace(-1, 1, 2 ** 8)
        vec = np.exp(-x ** 2 / (2 * 0.3 ** 2))
        mps = mps_from_statevector(vec / np.linalg.norm(vec))
        infids = []
        for chi in (1, 2, 3, 4, 5, 6):
            out, _ = truncate(mps, chi)
            infids.append(1.0 - fidelity(out, mps))
        assert all(a >= b - 1e-12 for a, b in zip(infids, infids[1:]))

    def test_error_matches_lost_weight(self, rng):
        vec = random_state(10, rng)
        mps = mps_from_statevector(vec)
        out, err = truncate(mps, 2)
        # Frobenius error approximates the lost fidelity for small cuts
        assert 1.0 - fidelity(out, mps) == pytest.approx(err ** 2, rel=0.05)

    def test_invalid_chi(self, rng):
        mps = mps_from_statevector(random_state(4, rng))
        with pytest.raises(InvalidInputError):
            truncate(mps, 0)


class TestInnerProduct:
    def test_self_overlap_is_one(self, rng):
        mps = mps_from_statevector(random_state(6, rng))
        assert abs(inner_product(mps, mps) - 1.0) < 1e-12

    def test_zero_against_plus_states(self):
        plus = np.full(16, 0.25)
        overlap = inner_product(zero_state(4), mps_from_statevector(plus))
        assert overlap == pytest.approx(0.25, abs=1e-12)

    def test_matches_dense_dot(self, rng):
        u, v = random_state(6, rng), random_state(6, rng)
        overlap = inner_product(mps_from_statevector(u), mps_from_statevector(v))
        assert abs(overlap - np.vdot(u, v)) < 1e-10

    def test_conjugate_symmetry(self, rng):
        a = mps_from_statevector(random_state(5, rng))
        b = mps_from_statevector(random_state(5, rng))
        assert abs(inner_product(a, b) - np.conj(inner_product(b, a))) < 1e-12

    def test_site_mismatch(self, rng):
        with pytest.raises(ShapeError):
            inner_product(zero_state(3), zero_state(4))


class TestGateApplication:
    def test_identity_gate_no_op(self, rng):
        mps = mps_from_statevector(random_state(5, rng))
        out = apply_two_qubit_gate(mps, np.eye(4), 2)
        assert fidelity(out, mps) == pytest.approx(1.0, abs=1e-12)

    def test_cnot_makes_bell_pair(self):
        plus0 = np.array([1, 0, 1, 0], dtype=complex) / np.sqrt(2)
        out = apply_two_qubit_gate(mps_from_statevector(plus0), CNOT, 0)
        spectrum = schmidt_spectrum(out, 1)
        assert np.allclose(spectrum.singular_values,
                           [1 / np.sqrt(2)] * 2, atol=1e-12)
        assert spectrum.entropy == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("site", [0, 1, 2, 3])
    def test_matches_dense_application(self, site, rng):
        from scipy.stats import unitary_group

        vec = random_state(5, rng)
        gate = unitary_group.rvs(4, random_state=np.random.default_rng(7))
        out = apply_two_qubit_gate(mps_from_statevector(vec), gate, site)
        expected = apply_gate_dense(vec, gate, [site, site + 1], 5)
        got = out.to_statevector()
        phase = np.exp(-1j * np.angle(np.vdot(expected, got)))
        assert np.max(np.abs(got * phase - expected)) < 1e-10

    def test_norm_preserved_without_truncation(self, rng):
        from scipy.stats import unitary_group

        mps = mps_from_statevector(random_state(6, rng))
        for site in (0, 2, 4):
            gate = unitary_group.rvs(4, random_state=np.random.default_rng(site))
            mps = apply_two_qubit_gate(mps, gate, site)
        assert abs(mps.norm() - 1.0) < 1e-10

    def test_single_qubit_gate_matches_dense(self, rng):
        from scipy.stats import unitary_group

        vec = random_state(4, rng)
        gate = unitary_group.rvs(2, random_state=np.random.default_rng(3))
        out = apply_single_qubit_gate(mps_from_statevector(vec), gate, 2)
        expected = apply_gate_dense(vec, gate, [2], 4)
        got = out.to_statevector()
        phase = np.exp(-1j * np.angle(np.vdot(expected, got)))
        assert np.max(np.abs(got * phase - expected)) < 1e-10

    def test_non_unitary_rejected(self, rng):
        mps = mps_from_statevector(random_state(4, rng))
        with pytest.raises(UnitarityError):
            apply_two_qubit_gate(mps, np.ones((4, 4)), 0)

    def test_site_out_of_range(self, rng):
        mps = mps_from_statevector(random_state(4, rng))
        with pytest.raises(ShapeError):
            apply_two_qubit_gate(mps, np.eye(4), 3)


class TestSchmidtSpectrum:
    def test_product_state(self):
        spectrum = schmidt_spectrum(zero_state(5), 2)
        assert np.allclose(spectrum.singular_values, [1.0])
        assert spectrum.entropy == 0.0

    def test_matches_dense_svd(self, rng):
        x = np.linspace(-1, 1, 2 ** 8)
        vec = np.exp(-x ** 2 / (2 * 0.3 ** 2))
        vec = vec / np.linalg.norm(vec)
        mps = mps_from_statevector(vec)
        spectrum = schmidt_spectrum(mps, 4)
        expected = dense_schmidt(vec, 4, 8)
        k = len(spectrum.singular_values)
        assert np.allclose(spectrum.singular_values, expected[:k], atol=1e-10)
        assert abs(spectrum.entropy - dense_entropy(expected)) < 1e-8

    def test_weights_sum_to_one(self, rng):
        mps = mps_from_statevector(random_state(8, rng))
        for bond in (1, 3, 5, 7):
            spectrum = schmidt_spectrum(mps, bond)
            assert np.sum(spectrum.singular_values ** 2) == pytest.approx(
                1.0, abs=1e-10
            )

    def test_entropy_bounded_by_log_chi(self, rng):
        mps = mps_from_statevector(random_state(8, rng), chi_max=3)
        for bond in range(1, 8):
            spectrum = schmidt_spectrum(mps, bond)
            assert spectrum.entropy <= np.log2(3) + 1e-10

    def test_bond_out_of_range(self):
        with pytest.raises(ShapeError):
            schmidt_spectrum(zero_state(4), 4)


class TestSerialization:
    def test_round_trip_bit_exact(self, rng, tmp_path):
        mps = mps_from_statevector(random_state(7, rng), chi_max=5)
        path = tmp_path / "state.mps"
        save_mps(mps, path)
        loaded = load_mps(path)
        assert loaded.n_sites == mps.n_sites
        for a, b in zip(mps.cores, loaded.cores):
            assert np.array_equal(a, b)
        save_mps(loaded, tmp_path / "again.mps")
        assert (tmp_path / "state.mps").read_bytes() == \
            (tmp_path / "again.mps").read_bytes()

    def test_bad_magic(self, tmp_path):
        from mpsenc.errors import FormatError

        path = tmp_path / "junk.mps"
        path.write_bytes(b"NOPE" + b"\x00" * 64)
        with pytest.raises(FormatError):
            load_mps(path)


def test_entropy_helper_rejects_zero_weight():
    with pytest.raises(InvalidInputError):
        entanglement_entropy(np.zeros(3))


def test_mps_shape_validation():
    good = np.zeros((1, 2, 1), dtype=complex)
    good[0, 0, 0] = 1.0
    with pytest.raises(ShapeError):
        MPS(cores=(good, np.zeros((2, 2, 1), dtype=complex)))
