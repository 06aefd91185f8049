"""Matrix product state kernels.

An MPS factorises an n-qubit state vector into a chain of three-index
cores ``A[k]`` of shape ``(alpha_{k-1}, 2, alpha_k)`` with trivial
boundary dimensions ``alpha_0 = alpha_n = 1``. Site 0 corresponds to the
most significant bit of the dense basis index.

All operations are functional: they return new ``MPS`` values and never
mutate their inputs. Core arrays may be shared between values, so callers
must treat them as read-only.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import CapacityError, FormatError, InvalidInputError, ShapeError
from .validation import (
    check_chi,
    check_site,
    check_statevector,
    check_threshold,
    check_unitary,
)

DEFAULT_SVD_THRESHOLD = 1e-10
DENSE_QUBIT_CAP = 24

_MAGIC = b"MPS1"


@dataclass(frozen=True)
class MPS:
    """Chain of three-index cores with canonical-form bookkeeping.

    Attributes:
        cores: tuple of complex arrays, core k shaped (alpha_{k-1}, 2, alpha_k).
        canonical: one of "none", "left", "right", "mixed".
        center: orthogonality-centre site when canonical == "mixed".
        chi_max: declared cap on virtual dimensions, or None if unbounded.
    """

    cores: tuple[np.ndarray, ...]
    canonical: str = "none"
    center: int | None = None
    chi_max: int | None = None

    def __post_init__(self):
        if not self.cores:
            raise ShapeError("an MPS needs at least one core")
        if self.cores[0].shape[0] != 1 or self.cores[-1].shape[2] != 1:
            raise ShapeError("boundary virtual dimensions must be 1")
        for k, core in enumerate(self.cores):
            if core.ndim != 3 or core.shape[1] != 2:
                raise ShapeError(f"core {k} must have shape (left, 2, right)")
            if k and core.shape[0] != self.cores[k - 1].shape[2]:
                raise ShapeError(f"virtual dimension mismatch at bond {k}")

    @property
    def n_sites(self) -> int:
        return len(self.cores)

    @property
    def bond_dims(self) -> tuple[int, ...]:
        """Virtual dimensions alpha_0 .. alpha_n (boundaries included)."""
        return (1,) + tuple(core.shape[2] for core in self.cores)

    @property
    def max_bond(self) -> int:
        return max(self.bond_dims)

    def norm(self) -> float:
        return float(np.sqrt(abs(inner_product(self, self))))

    def normalized(self) -> "MPS":
        nrm = self.norm()
        if nrm == 0.0:
            raise InvalidInputError("cannot normalize a zero-norm MPS")
        cores = list(self.cores)
        cores[-1] = cores[-1] / nrm
        return replace(self, cores=tuple(cores))

    def to_statevector(self, max_qubits: int = DENSE_QUBIT_CAP) -> np.ndarray:
        """Contract all cores into the dense 2^n vector."""
        n = self.n_sites
        if n > max_qubits:
            raise CapacityError(f"dense contraction capped at {max_qubits} qubits")
        vec = self.cores[0].reshape(2, -1)
        for core in self.cores[1:]:
            vec = np.tensordot(vec, core, axes=([vec.ndim - 1], [0]))
            vec = vec.reshape(-1, core.shape[2])
        return np.ascontiguousarray(vec[:, 0])

    def overlap_with_zero(self) -> complex:
        """Amplitude <0...0|psi>, contracted in O(n chi^2)."""
        env = np.ones((1,), dtype=np.complex128)
        for core in self.cores:
            env = env @ core[:, 0, :]
        return complex(env[0])


def _as_cores(arrays) -> tuple[np.ndarray, ...]:
    return tuple(np.ascontiguousarray(a, dtype=np.complex128) for a in arrays)


def zero_state(n: int) -> MPS:
    """Product state |0...0> as a bond-dimension-1 MPS."""
    core = np.zeros((1, 2, 1), dtype=np.complex128)
    core[0, 0, 0] = 1.0
    return MPS(cores=(core,) * n, canonical="left", chi_max=1)


def product_state(single_site_states) -> MPS:
    """Product state from a list of per-site 2-vectors."""
    cores = []
    for vec in single_site_states:
        vec = np.asarray(vec, dtype=np.complex128).reshape(2)
        cores.append(vec.reshape(1, 2, 1))
    return MPS(cores=_as_cores(cores), canonical="none")


def mps_from_statevector(
    amplitudes,
    chi_max: int | None = None,
    svd_threshold: float = DEFAULT_SVD_THRESHOLD,
) -> MPS:
    """Factorise a dense state vector into a left-canonical MPS.

    Sweeps left to right, splitting off one site at a time with an SVD.
    At each split at most ``chi_max`` singular values are kept and values
    below ``svd_threshold`` are discarded (always keeping at least one).
    The input is normalized first, so the returned MPS has unit norm up
    to the discarded weight.
    """
    vec = check_statevector(amplitudes)
    chi_max = check_chi(chi_max)
    svd_threshold = check_threshold(svd_threshold)
    vec = vec / np.linalg.norm(vec)
    n = vec.shape[0].bit_length() - 1

    cores = []
    remainder = vec.reshape(1, -1)
    for _ in range(n - 1):
        alpha_l = remainder.shape[0]
        mat = remainder.reshape(alpha_l * 2, -1)
        u, s, vh = np.linalg.svd(mat, full_matrices=False)
        keep = _kept_rank(s, chi_max, svd_threshold)
        cores.append(u[:, :keep].reshape(alpha_l, 2, keep))
        remainder = s[:keep, None] * vh[:keep]
    cores.append(remainder.reshape(-1, 2, 1))
    mps = MPS(cores=_as_cores(cores), canonical="left", chi_max=chi_max)
    # Renormalize in case truncation removed weight.
    return mps.normalized()


def _kept_rank(s: np.ndarray, chi_max: int | None, svd_threshold: float) -> int:
    keep = int(np.count_nonzero(s >= svd_threshold)) if svd_threshold > 0 else len(s)
    keep = max(keep, 1)  # never produce a zero-dimensional bond
    if chi_max is not None:
        keep = min(keep, chi_max)
    return min(keep, len(s))


def canonicalize(mps: MPS, form: str = "left", center: int | None = None) -> MPS:
    """Gauge an MPS into left, right, or mixed canonical form.

    The state is unchanged (same norm, same amplitudes). For "mixed",
    cores left of ``center`` become left isometries and cores right of it
    become right isometries.
    """
    n = mps.n_sites
    if form == "left":
        center = n - 1
    elif form == "right":
        center = 0
    elif form == "mixed":
        if center is None:
            raise InvalidInputError("mixed canonical form needs a center site")
        center = check_site(center, n, name="center")
    else:
        raise InvalidInputError(f"unknown canonical form {form!r}")

    cores = list(mps.cores)
    lo, hi = 0, n - 1
    if mps.canonical == "left":
        lo = n - 1
    elif mps.canonical == "right":
        hi = 0
    elif mps.canonical == "mixed" and mps.center is not None:
        lo = hi = mps.center

    # Left QR sweep: establish left isometries on sites [0, center).
    start = min(lo, center)
    for k in range(start, center):
        alpha_l, _, alpha_r = cores[k].shape
        q, r = np.linalg.qr(cores[k].reshape(alpha_l * 2, alpha_r))
        cores[k] = q.reshape(alpha_l, 2, -1)
        cores[k + 1] = np.tensordot(r, cores[k + 1], axes=([1], [0]))
    # Right QR sweep: establish right isometries on sites (center, n).
    stop = max(hi, center)
    for k in range(stop, center, -1):
        alpha_l, _, alpha_r = cores[k].shape
        q, r = np.linalg.qr(cores[k].reshape(alpha_l, 2 * alpha_r).conj().T)
        cores[k] = q.conj().T.reshape(-1, 2, alpha_r)
        cores[k - 1] = np.tensordot(cores[k - 1], r.conj().T, axes=([2], [0]))

    out_form = {n - 1: "left", 0: "right"}.get(center, "mixed")
    if form == "mixed":
        out_form = "mixed"
    return MPS(
        cores=_as_cores(cores),
        canonical=out_form,
        center=center if out_form == "mixed" else None,
        chi_max=mps.chi_max,
    )


def truncate(
    mps: MPS,
    chi_max: int | None,
    svd_threshold: float = DEFAULT_SVD_THRESHOLD,
) -> tuple[MPS, float]:
    """Compress an MPS to bond dimensions at most ``chi_max``.

    Returns the truncated, unit-norm, left-canonical MPS together with
    the accumulated truncation error: the root sum of squares of every
    singular value discarded across the sweep (Frobenius convention).
    """
    chi_max = check_chi(chi_max)
    svd_threshold = check_threshold(svd_threshold)
    work = canonicalize(mps, "right")
    nrm = np.linalg.norm(work.cores[0])
    if nrm == 0.0:
        raise InvalidInputError("cannot truncate a zero-norm MPS")
    cores = list(work.cores)
    cores[0] = cores[0] / nrm

    discarded_sq = 0.0
    for k in range(len(cores) - 1):
        alpha_l, _, alpha_r = cores[k].shape
        u, s, vh = np.linalg.svd(
            cores[k].reshape(alpha_l * 2, alpha_r), full_matrices=False
        )
        keep = _kept_rank(s, chi_max, svd_threshold)
        discarded_sq += float(np.sum(s[keep:] ** 2))
        cores[k] = u[:, :keep].reshape(alpha_l, 2, keep)
        carry = s[:keep, None] * vh[:keep]
        cores[k + 1] = np.tensordot(carry, cores[k + 1], axes=([1], [0]))

    out = MPS(cores=_as_cores(cores), canonical="left", chi_max=chi_max)
    return out.normalized(), float(np.sqrt(discarded_sq))


def inner_product(a: MPS, b: MPS) -> complex:
    """Overlap <a|b> by left-to-right transfer contraction, O(n chi^3)."""
    if a.n_sites != b.n_sites:
        raise ShapeError(
            f"site count mismatch: {a.n_sites} vs {b.n_sites}"
        )
    env = np.ones((1, 1), dtype=np.complex128)
    for ca, cb in zip(a.cores, b.cores):
        tmp = np.tensordot(env, cb, axes=([1], [0]))          # (chi_a, 2, beta_r)
        env = np.tensordot(ca.conj(), tmp, axes=([0, 1], [0, 1]))
    return complex(env[0, 0])


def fidelity(a: MPS, b: MPS) -> float:
    """Squared overlap |<a|b>|^2 of two normalized states."""
    return float(abs(inner_product(a, b)) ** 2)


def apply_single_qubit_gate(mps: MPS, gate, site: int) -> MPS:
    """Apply a 2x2 unitary on one site. Preserves canonical form."""
    gate = check_unitary(gate, dim=2)
    site = check_site(site, mps.n_sites)
    cores = list(mps.cores)
    cores[site] = np.einsum("ij,ljr->lir", gate, cores[site])
    return replace(mps, cores=_as_cores(cores))


def apply_two_qubit_gate(
    mps: MPS,
    gate,
    site: int,
    chi_max: int | None = None,
    svd_threshold: float = DEFAULT_SVD_THRESHOLD,
    absorb: str = "left",
) -> MPS:
    """Apply a 4x4 unitary on sites (site, site+1) with an SVD re-split.

    The orthogonality centre is moved onto the pair first so the
    truncation is locally optimal. ``absorb`` chooses which side keeps
    the singular values; the result is mixed-canonical with the centre on
    that side.
    """
    gate = check_unitary(gate, dim=4)
    site = check_site(site, mps.n_sites, span=2)
    chi_max = check_chi(chi_max)
    svd_threshold = check_threshold(svd_threshold)
    if mps.canonical == "mixed" and mps.center in (site, site + 1):
        work = mps
    else:
        work = canonicalize(mps, "mixed", center=site)

    cores = list(work.cores)
    theta = np.tensordot(cores[site], cores[site + 1], axes=([2], [0]))
    g4 = gate.reshape(2, 2, 2, 2)
    theta = np.einsum("abij,lijr->labr", g4, theta)

    alpha_l, _, _, alpha_r = theta.shape
    u, s, vh = np.linalg.svd(
        theta.reshape(alpha_l * 2, 2 * alpha_r), full_matrices=False
    )
    keep = _kept_rank(s, chi_max, svd_threshold)
    u, s, vh = u[:, :keep], s[:keep], vh[:keep]
    if absorb == "left":
        cores[site] = (u * s).reshape(alpha_l, 2, keep)
        cores[site + 1] = vh.reshape(keep, 2, alpha_r)
        center = site
    elif absorb == "right":
        cores[site] = u.reshape(alpha_l, 2, keep)
        cores[site + 1] = (s[:, None] * vh).reshape(keep, 2, alpha_r)
        center = site + 1
    else:
        raise InvalidInputError(f"absorb must be 'left' or 'right', got {absorb!r}")
    return MPS(
        cores=_as_cores(cores),
        canonical="mixed",
        center=center,
        chi_max=chi_max if chi_max is not None else mps.chi_max,
    )


@dataclass(frozen=True)
class SchmidtSpectrum:
    """Singular values and entanglement entropy of one bipartition."""

    bond_index: int
    singular_values: np.ndarray = field(repr=False)
    entropy: float

    def __post_init__(self):
        vals = np.asarray(self.singular_values, dtype=np.float64)
        if np.any(vals < -1e-14) or np.any(np.diff(vals) > 1e-14):
            raise InvalidInputError("singular values must be descending and >= 0")


def schmidt_spectrum(mps: MPS, bond_index: int) -> SchmidtSpectrum:
    """Schmidt coefficients across the cut left of site ``bond_index``.

    ``bond_index`` ranges over 1..n-1; the entropy is the von Neumann
    entropy in bits, -sum sigma^2 log2 sigma^2 over nonzero values.
    """
    n = mps.n_sites
    if not 1 <= bond_index <= n - 1:
        raise ShapeError(f"bond_index must be in [1, {n - 1}], got {bond_index}")
    work = canonicalize(mps, "mixed", center=bond_index)
    core = work.cores[bond_index]
    alpha_l = core.shape[0]
    s = np.linalg.svd(core.reshape(alpha_l, -1), compute_uv=False)
    return SchmidtSpectrum(
        bond_index=bond_index,
        singular_values=s,
        entropy=entanglement_entropy(s),
    )


def entanglement_entropy(singular_values) -> float:
    """Von Neumann entropy in bits of a Schmidt spectrum."""
    p = np.asarray(singular_values, dtype=np.float64) ** 2
    total = p.sum()
    if total <= 0.0:
        raise InvalidInputError("spectrum has zero weight")
    p = p / total
    p = p[p > 1e-300]
    return float(-np.sum(p * np.log2(p)))


def save_mps(mps: MPS, path) -> None:
    """Write the self-describing binary container.

    Layout: magic "MPS1", u32 n, u32 bond dims alpha_0..alpha_n, then the
    cores in chain order as row-major little-endian (real, imag) float64
    pairs. The round trip is bit-exact.
    """
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", mps.n_sites))
        fh.write(struct.pack(f"<{mps.n_sites + 1}I", *mps.bond_dims))
        for core in mps.cores:
            fh.write(np.ascontiguousarray(core, dtype="<c16").tobytes())


def load_mps(path) -> MPS:
    """Read an MPS written by :func:`save_mps`."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _MAGIC:
            raise FormatError(f"bad magic {magic!r}, expected {_MAGIC!r}")
        (n,) = struct.unpack("<I", fh.read(4))
        dims = struct.unpack(f"<{n + 1}I", fh.read(4 * (n + 1)))
        cores = []
        for k in range(n):
            count = dims[k] * 2 * dims[k + 1]
            buf = fh.read(16 * count)
            if len(buf) != 16 * count:
                raise FormatError("truncated core data")
            core = np.frombuffer(buf, dtype="<c16").astype(np.complex128)
            cores.append(core.reshape(dims[k], 2, dims[k + 1]))
    return MPS(cores=_as_cores(cores), canonical="none")
