"""Elementary circuit representation, metrics, simulation, serialization.

Gates are applied in list order to |0...0>. Wire 0 is the most
significant bit of the basis index, matching the MPS site convention.
Single-qubit rotations are emitted as U3(theta, phi, lam) with

    U3 = [[cos(t/2),            -e^{i lam} sin(t/2)],
          [e^{i phi} sin(t/2),  e^{i(phi+lam)} cos(t/2)]]

which is the qelib1 u3 convention.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, InvalidInputError, ShapeError
from .mps import (
    MPS,
    apply_single_qubit_gate,
    apply_two_qubit_gate,
    zero_state,
)
from .validation import check_unitary

CNOT01 = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
    dtype=np.complex128,
)
CNOT10 = np.array(
    [[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]],
    dtype=np.complex128,
)

_ROTATIONS = ("rx", "ry", "rz")
_PARAM_SLOTS = {"u3": 3, "rx": 1, "ry": 1, "rz": 1, "cnot": 0,
                "opaque2q": 0, "opaquekq": 0}

DENSE_SIM_CAP = 14


@dataclass(frozen=True)
class Gate:
    """One circuit element.

    kind: "u3", "rx", "ry", "rz", "cnot", "opaque2q" or "opaquekq".
    wires: the sites acted on; for cnot, (control, target).
    params: rotation angles in radians.
    matrix: stored unitary for opaque kinds, in ascending-wire basis.
    modeled_cost: elementary-gate estimate carried by opaquekq blocks.
    """

    kind: str
    wires: tuple
    params: tuple = ()
    matrix: np.ndarray | None = field(default=None, repr=False)
    modeled_cost: int | None = None

    def __post_init__(self):
        if self.kind not in _PARAM_SLOTS:
            raise InvalidInputError(f"unknown gate kind {self.kind!r}")
        if len(set(self.wires)) != len(self.wires):
            raise ShapeError(f"gate wires must be distinct, got {self.wires}")
        if len(self.params) != _PARAM_SLOTS[self.kind]:
            raise ShapeError(
                f"{self.kind} expects {_PARAM_SLOTS[self.kind]} params, "
                f"got {len(self.params)}"
            )
        if not all(np.isfinite(p) for p in self.params):
            raise InvalidInputError(f"non-finite angle in {self.kind} gate")
        if self.kind.startswith("opaque"):
            check_unitary(self.matrix, dim=2 ** len(self.wires), name=self.kind)

    @property
    def n_params(self) -> int:
        return _PARAM_SLOTS[self.kind]

    def with_params(self, params) -> "Gate":
        return Gate(kind=self.kind, wires=self.wires, params=tuple(params),
                    matrix=self.matrix, modeled_cost=self.modeled_cost)


def u3(theta: float, phi: float, lam: float, wire: int) -> Gate:
    return Gate(kind="u3", wires=(int(wire),),
                params=(float(theta), float(phi), float(lam)))


def rx(theta: float, wire: int) -> Gate:
    return Gate(kind="rx", wires=(int(wire),), params=(float(theta),))


def ry(theta: float, wire: int) -> Gate:
    return Gate(kind="ry", wires=(int(wire),), params=(float(theta),))


def rz(theta: float, wire: int) -> Gate:
    return Gate(kind="rz", wires=(int(wire),), params=(float(theta),))


def cnot(control: int, target: int) -> Gate:
    return Gate(kind="cnot", wires=(int(control), int(target)))


def opaque2q(matrix, wires) -> Gate:
    wires = tuple(int(w) for w in wires)
    if len(wires) != 2:
        raise ShapeError("opaque2q needs exactly two wires")
    matrix = np.asarray(matrix, dtype=np.complex128)
    if wires[0] > wires[1]:  # store in ascending-wire basis
        swap = _SWAP_MAT
        matrix = swap @ matrix @ swap
        wires = (wires[1], wires[0])
    return Gate(kind="opaque2q", wires=wires, matrix=matrix)


def opaque_kq(matrix, wires, modeled_cost: int) -> Gate:
    wires = tuple(int(w) for w in wires)
    if any(b <= a for a, b in zip(wires, wires[1:])):
        raise ShapeError("opaque block wires must be strictly ascending")
    return Gate(kind="opaquekq", wires=wires,
                matrix=np.asarray(matrix, dtype=np.complex128),
                modeled_cost=int(modeled_cost))


def u3_matrix(theta: float, phi: float, lam: float) -> np.ndarray:
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return np.array(
        [[c, -np.exp(1j * lam) * s],
         [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c]],
        dtype=np.complex128,
    )


def rotation_matrix(kind: str, theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    if kind == "rx":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)
    if kind == "ry":
        return np.array([[c, -s], [s, c]], dtype=np.complex128)
    if kind == "rz":
        return np.array(
            [[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]],
            dtype=np.complex128,
        )
    raise InvalidInputError(f"not a rotation kind: {kind!r}")


def gate_matrix(gate: Gate) -> np.ndarray:
    """Dense matrix of a gate in the basis of its ascending wires."""
    if gate.kind == "u3":
        return u3_matrix(*gate.params)
    if gate.kind in _ROTATIONS:
        return rotation_matrix(gate.kind, gate.params[0])
    if gate.kind == "cnot":
        control, target = gate.wires
        return CNOT01 if control < target else CNOT10
    return gate.matrix


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list over n wires."""

    n: int
    gates: tuple = ()
    provenance: str = ""
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        for gate in self.gates:
            for w in gate.wires:
                if not 0 <= w < self.n:
                    raise ShapeError(
                        f"gate wire {w} out of range for {self.n} wires"
                    )

    @property
    def n_gates(self) -> int:
        return len(self.gates)

    def is_elementary(self) -> bool:
        return all(not g.kind.startswith("opaque") for g in self.gates)

    def parameters(self) -> np.ndarray:
        return np.array(
            [p for g in self.gates for p in g.params], dtype=np.float64
        )

    def with_parameters(self, values) -> "Circuit":
        values = np.asarray(values, dtype=np.float64)
        expected = sum(g.n_params for g in self.gates)
        if values.shape != (expected,):
            raise ShapeError(
                f"expected {expected} parameters, got {values.shape}"
            )
        gates = []
        pos = 0
        for gate in self.gates:
            k = gate.n_params
            gates.append(gate.with_params(values[pos:pos + k]) if k else gate)
            pos += k
        return Circuit(n=self.n, gates=tuple(gates),
                       provenance=self.provenance, metadata=dict(self.metadata))


@dataclass(frozen=True)
class CircuitMetrics:
    """Gate counts and dependency depth of a circuit.

    For circuits containing opaque multi-qubit blocks the totals include
    each block's modeled elementary cost and ``modeled`` is set; exact
    and modeled counts are never silently mixed.
    """

    cnot_count: int
    single_qubit_count: int
    total_gates: int
    depth: int
    parameter_count: int
    modeled: bool = False


def metrics(circuit: Circuit) -> CircuitMetrics:
    """Count gates and compute the longest wire-dependency chain."""
    cnots = singles = total = params = 0
    modeled = False
    clock = np.zeros(circuit.n, dtype=np.int64)
    for gate in circuit.gates:
        if gate.kind == "cnot":
            cnots += 1
            weight = 1
        elif gate.kind in ("u3",) + _ROTATIONS:
            singles += 1
            weight = 1
        elif gate.kind == "opaque2q":
            weight = 1
        else:
            modeled = True
            weight = gate.modeled_cost if gate.modeled_cost else 1
        total += weight
        params += gate.n_params
        start = max(clock[w] for w in gate.wires)
        for w in gate.wires:
            clock[w] = start + weight
    return CircuitMetrics(
        cnot_count=cnots,
        single_qubit_count=singles,
        total_gates=total,
        depth=int(clock.max()) if circuit.n else 0,
        parameter_count=params,
        modeled=modeled,
    )


def qsd_block_cost(n_qubits: int) -> int:
    """Modeled elementary-gate count of one n-qubit block.

    Uses the Shannon-decomposition convention in which the leading-order
    CNOT count (23/48) 4^q is accompanied by three single-qubit rotations
    per CNOT, i.e. (23/12) 4^q elementary gates in total.
    """
    return int(np.ceil((23.0 / 12.0) * 4 ** n_qubits))


# ---------------------------------------------------------------------------
# Conversion from disentangler layers and sequential programs
# ---------------------------------------------------------------------------

def layers_to_circuit(stack) -> Circuit:
    """Decompose a layer stack into an elementary CNOT + U3 circuit.

    Layers are emitted in preparation order (last extracted first), each
    staircase gate synthesized at its site pair. The accumulated global
    phase is recorded in the circuit metadata.
    """
    from .kak import kak_decompose_with_phase
    from .mpd import staircase_sites

    n = stack.n
    sites = staircase_sites(n)
    gates = []
    phase = 0.0
    for layer in reversed(stack.layers):
        for (low, _high), block in zip(sites, layer):
            block_gates, block_phase = kak_decompose_with_phase(block)
            phase += block_phase
            for g in block_gates:
                gates.append(_shift_gate(g, low))
    return Circuit(
        n=n,
        gates=tuple(gates),
        provenance="MPD",
        metadata={"global_phase": float(phase), "layers": stack.n_layers},
    )


def program_to_circuit(program) -> Circuit:
    """Lower an exact sequential program to circuit form.

    One- and two-qubit blocks are synthesized exactly; larger blocks are
    kept opaque and carry a modeled elementary cost of 4^q.
    """
    from .kak import kak_decompose_with_phase, su2_to_u3_angles

    gates = []
    phase = 0.0
    for qubits, mat in program.blocks:
        q = len(qubits)
        if q == 1:
            theta, phi, lam, ph = su2_to_u3_angles(mat)
            phase += ph
            if abs(theta) > 1e-12 or abs((phi + lam + np.pi) % (2 * np.pi) - np.pi) > 1e-12:
                gates.append(u3(theta, phi, lam, qubits[0]))
        elif q == 2:
            block_gates, block_phase = kak_decompose_with_phase(mat)
            phase += block_phase
            for g in block_gates:
                gates.append(_shift_gate(g, qubits[0]))
        else:
            gates.append(opaque_kq(mat, qubits, modeled_cost=4 ** q))
    return Circuit(
        n=program.n,
        gates=tuple(gates),
        provenance="ExactSequential",
        metadata={"global_phase": float(phase)},
    )


def _shift_gate(gate: Gate, offset: int) -> Gate:
    wires = tuple(w + offset for w in gate.wires)
    return Gate(kind=gate.kind, wires=wires, params=gate.params,
                matrix=gate.matrix, modeled_cost=gate.modeled_cost)


# ---------------------------------------------------------------------------
# Simulation
# ---------------------------------------------------------------------------

def simulate(circuit: Circuit, chi_max: int | None = None,
             svd_threshold: float = 1e-10,
             allow_swap_routing: bool = False) -> MPS:
    """Run a 1- and 2-local circuit on |0...0> as an MPS.

    Two-qubit gates must act on nearest neighbours; non-adjacent gates
    are rejected unless ``allow_swap_routing`` is set, in which case the
    control is moved next to its target with explicit SWAPs. Opaque
    multi-qubit blocks are not supported here (use
    :func:`simulate_dense`).
    """
    psi = zero_state(circuit.n)
    for gate in circuit.gates:
        if gate.kind == "opaquekq":
            raise InvalidInputError(
                "opaque multi-qubit blocks require dense simulation"
            )
        if len(gate.wires) == 1:
            psi = apply_single_qubit_gate(psi, gate_matrix(gate), gate.wires[0])
            continue
        a, b = gate.wires
        if abs(a - b) != 1:
            if not allow_swap_routing:
                raise ShapeError(
                    f"gate on non-adjacent wires {gate.wires}; enable "
                    "allow_swap_routing to insert SWAPs"
                )
            psi = _apply_routed(psi, gate, chi_max, svd_threshold)
            continue
        low = min(a, b)
        psi = apply_two_qubit_gate(psi, gate_matrix(gate), low,
                                   chi_max=chi_max,
                                   svd_threshold=svd_threshold)
    return psi


_SWAP_MAT = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]],
    dtype=np.complex128,
)


def _apply_routed(psi: MPS, gate: Gate, chi_max, svd_threshold) -> MPS:
    a, b = gate.wires
    low, high = min(a, b), max(a, b)
    # bubble the lower wire up next to the higher one
    for k in range(low, high - 1):
        psi = apply_two_qubit_gate(psi, _SWAP_MAT, k, chi_max=chi_max,
                                   svd_threshold=svd_threshold)
    moved = Gate(kind=gate.kind,
                 wires=tuple(high - 1 if w == low else w for w in gate.wires),
                 params=gate.params, matrix=gate.matrix)
    psi = apply_two_qubit_gate(psi, gate_matrix(moved), high - 1,
                               chi_max=chi_max, svd_threshold=svd_threshold)
    for k in range(high - 2, low - 1, -1):
        psi = apply_two_qubit_gate(psi, _SWAP_MAT, k, chi_max=chi_max,
                                   svd_threshold=svd_threshold)
    return psi


def simulate_dense(circuit: Circuit) -> np.ndarray:
    """Dense state-vector simulation, including opaque blocks (n <= 14)."""
    n = circuit.n
    if n > DENSE_SIM_CAP:
        raise CapacityError(f"dense simulation capped at {DENSE_SIM_CAP} qubits")
    vec = np.zeros(2 ** n, dtype=np.complex128)
    vec[0] = 1.0
    for gate in circuit.gates:
        wires = gate.wires
        mat = gate_matrix(gate)
        if gate.kind == "cnot" and wires[0] > wires[1]:
            wires = (wires[1], wires[0])
        q = len(wires)
        tensor = vec.reshape((2,) * n)
        g = mat.reshape((2,) * (2 * q))
        out_axes = list(range(n, n + q))
        in_map = [out_axes[wires.index(ax)] if ax in wires else ax
                  for ax in range(n)]
        tensor = np.einsum(g, out_axes + list(wires), tensor, list(range(n)),
                           in_map)
        vec = np.ascontiguousarray(tensor).reshape(-1)
    return vec


def gates_to_matrix(gates, n_wires: int) -> np.ndarray:
    """Dense unitary of a short gate list (used by synthesis checks)."""
    dim = 2 ** n_wires
    out = np.eye(dim, dtype=np.complex128)
    for gate in gates:
        wires = gate.wires
        mat = gate_matrix(gate)
        if gate.kind == "cnot" and wires[0] > wires[1]:
            wires = (wires[1], wires[0])
        full = _embed(mat, wires, n_wires)
        out = full @ out
    return out


def _embed(mat: np.ndarray, wires, n_wires: int) -> np.ndarray:
    q = len(wires)
    g = mat.reshape((2,) * (2 * q))
    eye = np.eye(2 ** n_wires, dtype=np.complex128)
    tensor = eye.reshape((2,) * (2 * n_wires))
    out_axes = list(range(2 * n_wires, 2 * n_wires + q))
    in_map = [out_axes[wires.index(ax)] if ax in wires else ax
              for ax in range(n_wires)]
    result = np.einsum(
        g, out_axes + list(wires),
        tensor, list(range(2 * n_wires)),
        in_map + list(range(n_wires, 2 * n_wires)),
    )
    return result.reshape(2 ** n_wires, 2 ** n_wires)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

_QASM_HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'


def decompose_opaque(circuit: Circuit) -> Circuit:
    """Synthesize any opaque two-qubit blocks into CNOT + U3 gates.

    Opaque blocks on more than two wires have no elementary form here
    and raise.
    """
    from .kak import kak_decompose

    gates = []
    for gate in circuit.gates:
        if gate.kind == "opaque2q":
            for g in kak_decompose(gate.matrix):
                gates.append(_shift_gate(g, gate.wires[0]))
        elif gate.kind == "opaquekq":
            raise InvalidInputError(
                "opaque blocks beyond two qubits have no elementary form"
            )
        else:
            gates.append(gate)
    return Circuit(n=circuit.n, gates=tuple(gates),
                   provenance=circuit.provenance,
                   metadata=dict(circuit.metadata))


def to_qasm(circuit: Circuit) -> str:
    """OpenQASM 2.0 text using only u3 and cx, 12 significant digits."""
    if any(g.kind == "opaque2q" for g in circuit.gates):
        circuit = decompose_opaque(circuit)
    if not circuit.is_elementary():
        raise InvalidInputError("opaque blocks cannot be exported to OpenQASM")
    lines = [_QASM_HEADER + f"qreg q[{circuit.n}];"]
    for gate in circuit.gates:
        if gate.kind == "cnot":
            lines.append(f"cx q[{gate.wires[0]}],q[{gate.wires[1]}];")
            continue
        if gate.kind == "u3":
            theta, phi, lam = gate.params
        elif gate.kind == "rx":
            theta, phi, lam = gate.params[0], -np.pi / 2.0, np.pi / 2.0
        elif gate.kind == "ry":
            theta, phi, lam = gate.params[0], 0.0, 0.0
        else:  # rz
            theta, phi, lam = 0.0, 0.0, gate.params[0]
        angle_txt = ",".join(_fmt_angle(a) for a in (theta, phi, lam))
        lines.append(f"u3({angle_txt}) q[{gate.wires[0]}];")
    return "\n".join(lines) + "\n"


def _fmt_angle(a: float) -> str:
    return f"{float(a):.12g}"


_QASM_U3 = re.compile(
    r"u3\(([^,]+),([^,]+),([^)]+)\)\s*q\[(\d+)\];"
)
_QASM_CX = re.compile(r"cx\s*q\[(\d+)\],\s*q\[(\d+)\];")
_QASM_QREG = re.compile(r"qreg\s+q\[(\d+)\];")


def from_qasm(text: str) -> Circuit:
    """Parse the u3/cx OpenQASM subset produced by :func:`to_qasm`."""
    n = None
    gates = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith(("OPENQASM", "include", "//")):
            continue
        m = _QASM_QREG.match(line)
        if m:
            n = int(m.group(1))
            continue
        m = _QASM_U3.match(line)
        if m:
            theta, phi, lam = (float(m.group(i)) for i in (1, 2, 3))
            gates.append(u3(theta, phi, lam, int(m.group(4))))
            continue
        m = _QASM_CX.match(line)
        if m:
            gates.append(cnot(int(m.group(1)), int(m.group(2))))
            continue
        raise InvalidInputError(f"unsupported OpenQASM line: {line!r}")
    if n is None:
        raise InvalidInputError("missing qreg declaration")
    return Circuit(n=n, gates=tuple(gates))


def to_json(circuit: Circuit) -> str:
    """JSON mirror of the gate list."""
    payload = {
        "n": circuit.n,
        "provenance": circuit.provenance,
        "metadata": {k: v for k, v in circuit.metadata.items()
                     if isinstance(v, (int, float, str, bool))},
        "gates": [_gate_to_json(g) for g in circuit.gates],
    }
    return json.dumps(payload, indent=1)


def _gate_to_json(gate: Gate) -> dict:
    entry = {"kind": gate.kind, "wires": list(gate.wires)}
    if gate.params:
        entry["params"] = [float(p) for p in gate.params]
    if gate.matrix is not None:
        entry["matrix"] = [
            [[float(z.real), float(z.imag)] for z in row] for row in gate.matrix
        ]
    if gate.modeled_cost is not None:
        entry["modeled_cost"] = gate.modeled_cost
    return entry


def from_json(text: str) -> Circuit:
    payload = json.loads(text)
    gates = []
    for entry in payload["gates"]:
        matrix = None
        if "matrix" in entry:
            matrix = np.array(
                [[complex(re_, im) for re_, im in row] for row in entry["matrix"]],
                dtype=np.complex128,
            )
        gates.append(Gate(
            kind=entry["kind"],
            wires=tuple(entry["wires"]),
            params=tuple(entry.get("params", ())),
            matrix=matrix,
            modeled_cost=entry.get("modeled_cost"),
        ))
    return Circuit(
        n=int(payload["n"]),
        gates=tuple(gates),
        provenance=payload.get("provenance", ""),
        metadata=payload.get("metadata", {}),
    )
