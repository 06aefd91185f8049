"""mpsenc: compile structured classical data into shallow quantum circuits.

The pipeline is target -> MPS -> disentangler layers -> elementary
circuit, with optional gradient refinement of the rotation angles against
the target MPS.
"""

from .mps import (
    MPS,
    SchmidtSpectrum,
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

__all__ = [
    "MPS",
    "SchmidtSpectrum",
    "apply_single_qubit_gate",
    "apply_two_qubit_gate",
    "canonicalize",
    "fidelity",
    "inner_product",
    "load_mps",
    "mps_from_statevector",
    "save_mps",
    "schmidt_spectrum",
    "truncate",
    "zero_state",
]

__version__ = "0.1.0"
