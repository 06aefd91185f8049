"""Input validation helpers used at API boundaries.

These keep the shape/unitarity checks out of the numerical kernels and
produce consistent error types for the estimator and CLI layers.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError, ShapeError, UnitarityError


def check_statevector(amplitudes, *, name: str = "amplitudes") -> np.ndarray:
    """Validate and coerce a dense state vector.

    The vector must be one-dimensional with a power-of-two length of at
    least 2, finite entries and nonzero norm. Returns a complex128 copy.
    """
    vec = np.asarray(amplitudes)
    if vec.ndim != 1:
        raise ShapeError(f"{name} must be one-dimensional, got shape {vec.shape}")
    size = vec.shape[0]
    if size < 2 or size & (size - 1) != 0:
        raise ShapeError(f"{name} length must be a power of two >= 2, got {size}")
    vec = np.ascontiguousarray(vec, dtype=np.complex128)
    if not np.all(np.isfinite(vec.view(np.float64))):
        raise InvalidInputError(f"{name} contains non-finite entries")
    if np.linalg.norm(vec) == 0.0:
        raise InvalidInputError(f"{name} has zero norm")
    return vec


def check_unitary(matrix, *, dim: int | None = None, atol: float = 1e-10,
                  name: str = "gate") -> np.ndarray:
    """Validate a square unitary matrix, returning a complex128 copy."""
    mat = np.asarray(matrix, dtype=np.complex128)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ShapeError(f"{name} must be square, got shape {mat.shape}")
    if dim is not None and mat.shape[0] != dim:
        raise ShapeError(f"{name} must be {dim}x{dim}, got shape {mat.shape}")
    defect = np.max(np.abs(mat.conj().T @ mat - np.eye(mat.shape[0])))
    if defect > atol:
        raise UnitarityError(f"{name} is not unitary (max deviation {defect:.3e})")
    return mat


def check_site(site: int, n_sites: int, *, span: int = 1, name: str = "site") -> int:
    """Validate a site index so that sites [site, site + span) exist."""
    site = int(site)
    if not 0 <= site <= n_sites - span:
        raise ShapeError(
            f"{name} {site} out of range for {n_sites} sites (span {span})"
        )
    return site


def check_chi(chi, *, name: str = "chi_max") -> int | None:
    """Validate an optional positive bond-dimension cap."""
    if chi is None:
        return None
    chi = int(chi)
    if chi < 1:
        raise InvalidInputError(f"{name} must be >= 1, got {chi}")
    return chi


def check_threshold(value: float, *, name: str = "svd_threshold") -> float:
    """Validate a non-negative truncation threshold."""
    value = float(value)
    if not value >= 0.0:
        raise InvalidInputError(f"{name} must be non-negative, got {value}")
    return value


def num_qubits_of(length: int) -> int:
    """Number of qubits for a dense vector length (assumed power of two)."""
    return int(length).bit_length() - 1
