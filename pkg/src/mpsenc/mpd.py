"""Disentangler extraction and the exact sequential baseline.

A staircase is an ordered list of n-1 two-qubit unitaries; entry j acts
on sites (n-2-j, n-1-j), so application runs from the bottom of the
chain upward. Applied to |0...0> a staircase prepares a bond-dimension-2
state exactly. Iterating the construction on the progressively
disentangled state yields the multi-layer stack; applying the stored
layers in order L..1 to |0...0> is the preparation direction.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, InvalidInputError, ShapeError, SynthesisError
from .mps import (
    MPS,
    apply_two_qubit_gate,
    canonicalize,
    truncate,
)
from .validation import check_chi, check_threshold

_COMPLETION_SEED = 0x5EED
_MAX_BLOCK_QUBITS = 12


def staircase_sites(n: int) -> list[tuple[int, int]]:
    """Site pairs touched by staircase entry j, in application order."""
    return [(n - 2 - j, n - 1 - j) for j in range(n - 1)]


def complete_to_unitary(isometry: np.ndarray) -> np.ndarray:
    """Extend orthonormal columns to a full unitary.

    The kernel columns are filled by modified Gram-Schmidt against a
    deterministic candidate basis (identity columns first, then a
    fixed-seed random backstop), so the completion is reproducible.
    """
    dim, k = isometry.shape
    if k > dim:
        raise ShapeError("isometry has more columns than rows")
    cols = [np.ascontiguousarray(isometry[:, j], dtype=np.complex128)
            for j in range(k)]
    rng = np.random.default_rng(_COMPLETION_SEED)

    def candidates():
        for j in range(dim):
            e = np.zeros(dim, dtype=np.complex128)
            e[j] = 1.0
            yield e
        while True:
            yield rng.standard_normal(dim) + 1j * rng.standard_normal(dim)

    for cand in candidates():
        if len(cols) == dim:
            break
        vec = cand.astype(np.complex128)
        for _ in range(2):  # re-orthogonalize for numerical safety
            for c in cols:
                vec = vec - np.vdot(c, vec) * c
        norm = np.linalg.norm(vec)
        if norm > 1e-6:
            cols.append(vec / norm)

    unitary = np.column_stack(cols)
    defect = np.max(np.abs(unitary.conj().T @ unitary - np.eye(dim)))
    if defect > 1e-10:
        raise SynthesisError(f"unitary completion failed (defect {defect:.3e})")
    return unitary


def _embedded_gate(core: np.ndarray) -> np.ndarray:
    """4x4 unitary whose first columns hold one chi<=2 core.

    Column alpha_k maps |0, alpha_k> on sites (k-1, k) to
    sum_{a,i} core[a, i, alpha_k] |a, i>.
    """
    alpha_l, _, alpha_r = core.shape
    if alpha_l > 2 or alpha_r > 2:
        raise ShapeError("chi=2 embedding needs bond dimensions <= 2")
    iso = np.zeros((4, alpha_r), dtype=np.complex128)
    for a in range(alpha_l):
        iso[2 * a:2 * a + 2, :] = core[a]
    return complete_to_unitary(iso)


def staircase_from_chi2(psi2: MPS) -> list[np.ndarray]:
    """Exact single-layer staircase preparing a chi<=2 left-canonical state.

    The top-of-chain single-qubit factor from the first core is folded
    into the staircase gate on sites (0, 1), keeping exactly n-1 gates.
    """
    n = psi2.n_sites
    if n < 2:
        raise ShapeError("staircase construction needs at least 2 sites")
    if psi2.canonical != "left":
        psi2 = canonicalize(psi2, "left")
    gates = [_embedded_gate(psi2.cores[k]) for k in range(n - 1, 0, -1)]

    first = psi2.cores[0]
    iso = first.reshape(2, first.shape[2])
    top = complete_to_unitary(iso)
    gates[-1] = np.kron(top, np.eye(2)) @ gates[-1]
    return gates


def apply_staircase(psi: MPS, gates: list[np.ndarray],
                    chi_max: int | None = None,
                    svd_threshold: float = 1e-10,
                    inverse: bool = False) -> MPS:
    """Apply a staircase (or its inverse) gate by gate with truncation."""
    n = psi.n_sites
    if len(gates) != n - 1:
        raise ShapeError(f"expected {n - 1} staircase gates, got {len(gates)}")
    seq = [(low, gate) for (low, _), gate in zip(staircase_sites(n), gates)]
    absorb = "left"
    if inverse:
        seq = [(low, gate.conj().T) for low, gate in reversed(seq)]
        absorb = "right"
    for low, gate in seq:
        psi = apply_two_qubit_gate(psi, gate, low, chi_max=chi_max,
                                   svd_threshold=svd_threshold, absorb=absorb)
    return psi


def chi2_disentangler(psi: MPS, svd_threshold: float = 1e-10) -> list[np.ndarray]:
    """Staircase preparing the chi=2 truncation of ``psi`` from |0...0>.

    The inverse of the returned staircase is the disentangler: it maps
    the truncated state (approximately ``psi`` itself when the state is
    weakly entangled) back to the all-zeros product state.
    """
    psi2, err = truncate(psi, 2, svd_threshold)
    if err > 0.999:
        warnings.warn(
            "chi=2 truncation is numerically degenerate; "
            "falling back to the bond-dimension-1 embedding",
            RuntimeWarning,
        )
    return staircase_from_chi2(psi2)


@dataclass(frozen=True)
class LayerStack:
    """Ordered disentangler layers plus per-layer bookkeeping.

    ``layers[k]`` holds the staircase extracted at iteration k+1. The
    preparation direction applies layers L-1, ..., 0 to |0...0>.
    """

    n: int
    layers: tuple = ()
    chi_max_used: int | None = None
    per_layer_fidelity: tuple = ()

    @property
    def n_layers(self) -> int:
        return len(self.layers)

    def validate(self, atol: float = 1e-10) -> None:
        """Check the structural invariants (gate unitarity, monotonicity)."""
        for layer in self.layers:
            if len(layer) != self.n - 1:
                raise ShapeError("staircase length must be n - 1")
            for gate in layer:
                defect = np.max(np.abs(gate.conj().T @ gate - np.eye(4)))
                if defect > atol:
                    raise SynthesisError(f"stored gate not unitary ({defect:.2e})")
        fids = np.asarray(self.per_layer_fidelity)
        if fids.size and np.any(np.diff(fids) < -1e-9):
            raise InvalidInputError("per-layer fidelity decreased beyond slack")

    def to_json(self) -> str:
        payload = {
            "n": self.n,
            "L": self.n_layers,
            "chi_max": self.chi_max_used,
            "per_layer_fidelity": [float(f) for f in self.per_layer_fidelity],
            "layers": [
                [_matrix_to_pairs(gate) for gate in layer]
                for layer in self.layers
            ],
        }
        return json.dumps(payload, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "LayerStack":
        payload = json.loads(text)
        layers = tuple(
            tuple(_pairs_to_matrix(gate) for gate in layer)
            for layer in payload["layers"]
        )
        return cls(
            n=int(payload["n"]),
            layers=layers,
            chi_max_used=payload.get("chi_max"),
            per_layer_fidelity=tuple(payload.get("per_layer_fidelity", ())),
        )


def _matrix_to_pairs(mat: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(mat)]


def _pairs_to_matrix(rows) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows],
                    dtype=np.complex128)


def mpd_extract(target: MPS, n_layers: int, chi_max: int | None = None,
                svd_threshold: float = 1e-10) -> LayerStack:
    """Extract up to ``n_layers`` disentangler staircases from a target.

    Iteration k truncates the current state to bond dimension 2, builds
    the staircase preparing that truncation, and applies the staircase
    inverse to peel the layer off, capping bonds at ``chi_max`` after
    every gate. The recorded fidelity |<state_k|0...0>|^2 equals the
    preparation fidelity of the stack so far whenever ``chi_max`` is not
    binding. Extraction stops early once the fidelity reaches
    1 - svd_threshold.
    """
    if n_layers < 1:
        raise InvalidInputError(f"n_layers must be >= 1, got {n_layers}")
    chi_max = check_chi(chi_max)
    svd_threshold = check_threshold(svd_threshold)
    if target.n_sites < 2:
        raise ShapeError("disentangling needs at least 2 sites")

    psi = canonicalize(target, "left").normalized()
    if chi_max is not None and psi.max_bond > chi_max:
        psi, _ = truncate(psi, chi_max, svd_threshold)

    layers = []
    fids = []
    for _ in range(n_layers):
        gates = chi2_disentangler(psi, svd_threshold)
        layers.append(tuple(gates))
        psi = apply_staircase(psi, gates, chi_max=chi_max,
                              svd_threshold=svd_threshold, inverse=True)
        psi = psi.normalized()
        fids.append(float(abs(psi.overlap_with_zero()) ** 2))
        if fids[-1] >= 1.0 - svd_threshold:
            break

    return LayerStack(
        n=target.n_sites,
        layers=tuple(layers),
        chi_max_used=chi_max,
        per_layer_fidelity=tuple(fids),
    )


def prepare_state(stack: LayerStack, chi_max: int | None = None,
                  svd_threshold: float = 1e-10) -> MPS:
    """Apply the stored layers in preparation order to |0...0>."""
    from .mps import zero_state

    psi = zero_state(stack.n)
    for layer in reversed(stack.layers):
        psi = apply_staircase(psi, list(layer), chi_max=chi_max,
                              svd_threshold=svd_threshold)
    return psi


# ---------------------------------------------------------------------------
# Exact single-layer sequential decomposition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExactSequentialProgram:
    """Single sequential layer of multi-qubit blocks preparing an MPS.

    ``blocks`` is a list of (qubits, matrix) in application order, where
    qubits are contiguous ascending site indices and the matrix dimension
    is 2^len(qubits). Bond dimensions that are not powers of two are
    padded into the enclosing block.
    """

    n: int
    blocks: tuple = field(repr=False, default=())

    @property
    def max_block_qubits(self) -> int:
        return max((len(q) for q, _ in self.blocks), default=0)

    def block_qubit_counts(self) -> list[int]:
        return [len(q) for q, _ in self.blocks]


def _ceil_pow2(k: int) -> int:
    return 1 << max(0, (k - 1).bit_length())


def exact_sequential(target: MPS) -> ExactSequentialProgram:
    """Compile an MPS into one layer of (log2 chi + 1)-qubit unitaries.

    Block k embeds core k as the leading columns of a unitary on qubits
    (k - q + 1, ..., k) with q = log2(padded left bond) + 1; blocks are
    applied from the last site upward, mirroring the staircase. The
    single-qubit factor from the first core is merged into the following
    block when that block reaches qubit 0.
    """
    n = target.n_sites
    # left-canonicalize and trim numerically-zero bond directions
    psi, _ = truncate(target.normalized(), None, 1e-14)
    dims = psi.bond_dims

    blocks = []
    for k in range(n - 1, 0, -1):
        alpha_l, alpha_r = dims[k], dims[k + 1]
        padded = _ceil_pow2(alpha_l)
        q = padded.bit_length()  # log2(padded) + 1 qubits
        if q > _MAX_BLOCK_QUBITS:
            raise CapacityError(
                f"block on {q} qubits exceeds the {_MAX_BLOCK_QUBITS}-qubit guard"
            )
        dim = 2 * padded
        iso = np.zeros((dim, alpha_r), dtype=np.complex128)
        core = psi.cores[k]
        for a in range(alpha_l):
            iso[2 * a:2 * a + 2, :] = core[a]
        unitary = complete_to_unitary(iso)
        qubits = tuple(range(k - q + 1, k + 1))
        blocks.append((qubits, unitary))

    first = psi.cores[0]
    top = complete_to_unitary(first.reshape(2, first.shape[2]))
    if blocks and blocks[-1][0][0] == 0:
        qubits, mat = blocks[-1]
        pad = np.eye(2 ** (len(qubits) - 1))
        blocks[-1] = (qubits, np.kron(top, pad) @ mat)
    else:
        blocks.append(((0,), top))

    return ExactSequentialProgram(n=n, blocks=tuple(blocks))
