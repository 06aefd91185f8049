"""Independent dense-array oracles used to cross-check the MPS kernels.

Everything here works on full 2^n vectors with plain reshapes, SVDs and
einsums, deliberately avoiding the package's tensor-network code paths.
"""

import numpy as np


def crandn(shape, rng):
    """Standard complex Gaussian samples."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_state(n, rng):
    vec = crandn(2 ** n, rng)
    return vec / np.linalg.norm(vec)


def dense_from_mps(mps):
    """Contract MPS cores into the dense vector by explicit folding."""
    vec = np.ones((1, 1), dtype=np.complex128)
    for core in mps.cores:
        vec = np.einsum("xa,aib->xib", vec, core)
        vec = vec.reshape(-1, core.shape[2])
    return vec[:, 0]


def dense_truncate(vec, chi, svd_threshold=0.0):
    """Sequential bipartition truncation of a dense state, left to right.

    Returns the truncated, renormalized vector and the root sum of
    squares of all discarded singular values.
    """
    n = int(np.log2(len(vec)))
    vec = vec / np.linalg.norm(vec)
    work = vec.copy()
    discarded_sq = 0.0
    for k in range(1, n):
        mat = work.reshape(2 ** k, -1)
        u, s, vh = np.linalg.svd(mat, full_matrices=False)
        keep = max(1, int(np.count_nonzero(s >= svd_threshold))) \
            if svd_threshold > 0 else len(s)
        keep = min(keep, chi)
        discarded_sq += float(np.sum(s[keep:] ** 2))
        work = (u[:, :keep] * s[:keep]) @ vh[:keep]
        work = work.reshape(-1)
    return work / np.linalg.norm(work), float(np.sqrt(discarded_sq))


def dense_schmidt(vec, bond, n):
    """Singular values across the cut left of site ``bond``."""
    return np.linalg.svd(vec.reshape(2 ** bond, -1), compute_uv=False)


def dense_entropy(sigmas):
    p = np.asarray(sigmas, dtype=np.float64) ** 2
    p = p[p > 1e-300]
    p = p / p.sum()
    return float(-np.sum(p * np.log2(p)))


def apply_gate_dense(vec, gate, qubits, n):
    """Apply a 2^q x 2^q unitary to the given qubits of a dense state."""
    q = len(qubits)
    tensor = vec.reshape((2,) * n)
    g = np.asarray(gate, dtype=np.complex128).reshape((2,) * (2 * q))
    out_axes = list(range(n, n + q))
    in_map = [out_axes[qubits.index(ax)] if ax in qubits else ax
              for ax in range(n)]
    tensor = np.einsum(g, out_axes + list(qubits), tensor, list(range(n)),
                       in_map)
    return np.ascontiguousarray(tensor).reshape(-1)


_U3_CACHE = {}


def u3_dense(theta, phi, lam):
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array(
        [[c, -np.exp(1j * lam) * s],
         [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c]],
        dtype=np.complex128,
    )


def simulate_circuit_dense(circuit):
    """Run a Circuit on |0...0> using only this module's primitives."""
    n = circuit.n
    vec = np.zeros(2 ** n, dtype=np.complex128)
    vec[0] = 1.0
    cnot = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
                    dtype=np.complex128)
    for gate in circuit.gates:
        if gate.kind == "u3":
            mat = u3_dense(*gate.params)
            vec = apply_gate_dense(vec, mat, list(gate.wires), n)
        elif gate.kind == "rx":
            t = gate.params[0]
            mat = np.array([[np.cos(t / 2), -1j * np.sin(t / 2)],
                            [-1j * np.sin(t / 2), np.cos(t / 2)]])
            vec = apply_gate_dense(vec, mat, list(gate.wires), n)
        elif gate.kind == "ry":
            t = gate.params[0]
            mat = np.array([[np.cos(t / 2), -np.sin(t / 2)],
                            [np.sin(t / 2), np.cos(t / 2)]])
            vec = apply_gate_dense(vec, mat, list(gate.wires), n)
        elif gate.kind == "rz":
            t = gate.params[0]
            mat = np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)])
            vec = apply_gate_dense(vec, mat, list(gate.wires), n)
        elif gate.kind == "cnot":
            vec = apply_gate_dense(vec, cnot, list(gate.wires), n)
        else:
            vec = apply_gate_dense(vec, gate.matrix, list(gate.wires), n)
    return vec


def central_difference(fun, x, h=1e-5):
    """Two-point central finite-difference gradient of a scalar function."""
    x = np.asarray(x, dtype=np.float64)
    grad = np.zeros_like(x)
    for i in range(len(x)):
        xp, xm = x.copy(), x.copy()
        xp[i] += h
        xm[i] -= h
        grad[i] = (fun(xp) - fun(xm)) / (2 * h)
    return grad


def state_fidelity(u, v):
    return float(abs(np.vdot(u, v)) ** 2)


def grid(n, a=-1.0, b=1.0):
    count = 2 ** n
    return a + (b - a) * np.arange(count, dtype=np.float64) / (count - 1)
