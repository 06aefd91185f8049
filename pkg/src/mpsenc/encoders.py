"""Estimator-style interfaces to the circuit compilers.

Each encoder follows the scikit-learn convention: hyperparameters are
constructor arguments handled by ``get_params``/``set_params``, ``fit``
learns the circuit for one target state, and fitted artifacts live in
trailing-underscore attributes. Targets may be dense amplitude vectors,
prebuilt MPS values, or declarative :class:`~mpsenc.targets.TargetSpec`
instances.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .circuit import (
    layers_to_circuit,
    metrics,
    program_to_circuit,
    simulate,
    simulate_dense,
    to_qasm,
)
from .mps import MPS, fidelity, inner_product
from .mpd import exact_sequential, mpd_extract
from .targets import TargetSpec, target_mps
from .tno import optimize
from .validation import check_statevector

DENSE_SCORE_CAP = 14


def _resolve_target(X, chi_max, svd_threshold) -> MPS:
    if isinstance(X, MPS):
        return X.normalized()
    if isinstance(X, TargetSpec):
        return target_mps(X, chi_max=chi_max, svd_threshold=svd_threshold)
    vec = check_statevector(X, name="target")
    from .mps import mps_from_statevector

    return mps_from_statevector(vec, chi_max=chi_max,
                                svd_threshold=svd_threshold)


class _CircuitEncoder(BaseEstimator):
    """Shared fitted-state handling for the concrete encoders."""

    def _check_fitted(self):
        if not hasattr(self, "circuit_"):
            raise NotFittedError(
                f"{type(self).__name__} must be fitted before use"
            )

    def score(self, X=None, y=None) -> float:
        """Preparation fidelity of the fitted circuit.

        Scored against the fitted target by default, or against ``X``
        (vector, MPS, or TargetSpec) if given.
        """
        self._check_fitted()
        if X is None:
            target = self.target_mps_
        else:
            target = _resolve_target(X, None, 1e-10)
        psi = self._prepared_state()
        return fidelity(target, psi)

    def _prepared_state(self) -> MPS:
        sim_chi = getattr(self, "sim_chi_max_", None)
        return simulate(self.circuit_, chi_max=sim_chi)

    def reconstruction(self) -> np.ndarray:
        """Dense amplitudes prepared by the fitted circuit (small n only)."""
        self._check_fitted()
        if self.circuit_.n <= DENSE_SCORE_CAP and self.circuit_.is_elementary():
            return simulate_dense(self.circuit_)
        return self._prepared_state().to_statevector()

    def to_qasm(self) -> str:
        self._check_fitted()
        return to_qasm(self.circuit_)

    @property
    def metrics_(self):
        self._check_fitted()
        return metrics(self.circuit_)


class MpdEncoder(_CircuitEncoder):
    """Analytic staircase compiler.

    Extracts ``n_layers`` disentangler layers from the target MPS and
    lowers them to a CNOT + U3 circuit.

    Parameters
    ----------
    n_layers : int
        Number of staircase layers to extract.
    chi_max : int or None
        Bond-dimension cap for the target and the intermediate states;
        None keeps every singular value above ``svd_threshold``.
    svd_threshold : float
        Singular values below this are discarded during truncations.

    Attributes
    ----------
    target_mps_ : MPS
        The (possibly capped) target the circuit was fitted to.
    layer_stack_ : LayerStack
        Extracted staircases with per-layer fidelity bookkeeping.
    circuit_ : Circuit
        The compiled elementary circuit.
    fidelity_ : float
        Preparation fidelity of the compiled circuit against the target.
    """

    def __init__(self, n_layers: int = 1, chi_max: int | None = None,
                 svd_threshold: float = 1e-10):
        self.n_layers = n_layers
        self.chi_max = chi_max
        self.svd_threshold = svd_threshold

    def fit(self, X, y=None):
        target = _resolve_target(X, self.chi_max, self.svd_threshold)
        self.n_qubits_ = target.n_sites
        self.target_mps_ = target
        self.layer_stack_ = mpd_extract(
            target, self.n_layers, chi_max=self.chi_max,
            svd_threshold=self.svd_threshold,
        )
        self.circuit_ = layers_to_circuit(self.layer_stack_)
        self.sim_chi_max_ = self._simulation_chi()
        self.fidelity_ = self.score()
        return self

    def _simulation_chi(self) -> int | None:
        return self.chi_max


class MpdTnoEncoder(MpdEncoder):
    """Staircase compiler with gradient refinement of the angles.

    Runs the analytic extraction first, then L-BFGS on every rotation
    angle against the target MPS. The CNOT skeleton is kept fixed.

    Parameters
    ----------
    n_layers, chi_max, svd_threshold : see :class:`MpdEncoder`.
    max_iters : int
        Iteration budget for the optimizer.
    tol : float
        Gradient max-norm at which optimization stops.

    Attributes
    ----------
    optimization_report_ : OptimizationReport
        Convergence record; ``fidelity_`` reflects the refined angles.
    """

    def __init__(self, n_layers: int = 1, chi_max: int | None = None,
                 svd_threshold: float = 1e-10, max_iters: int = 500,
                 tol: float = 1e-10):
        super().__init__(n_layers=n_layers, chi_max=chi_max,
                         svd_threshold=svd_threshold)
        self.max_iters = max_iters
        self.tol = tol

    def fit(self, X, y=None):
        super().fit(X, y)
        params, report = optimize(
            self.circuit_, self.target_mps_, max_iters=self.max_iters,
            tol=self.tol, chi_max=self.sim_chi_max_,
            svd_threshold=self.svd_threshold,
        )
        self.params_ = params
        self.optimization_report_ = report
        self.circuit_ = params.bound(self.circuit_)
        self.fidelity_ = self.score()
        return self


class ExactSequentialEncoder(_CircuitEncoder):
    """Single-layer exact compiler into multi-qubit blocks.

    Blocks beyond two qubits stay opaque and carry modeled elementary
    costs; one- and two-qubit blocks are synthesized exactly, so low-chi
    targets produce fully elementary circuits.

    Parameters
    ----------
    chi_max : int or None
        Bond cap applied to the target before compilation.
    svd_threshold : float
        Truncation threshold for the target build.
    """

    def __init__(self, chi_max: int | None = None,
                 svd_threshold: float = 1e-10):
        self.chi_max = chi_max
        self.svd_threshold = svd_threshold

    def fit(self, X, y=None):
        target = _resolve_target(X, self.chi_max, self.svd_threshold)
        self.n_qubits_ = target.n_sites
        self.target_mps_ = target
        self.program_ = exact_sequential(target)
        self.circuit_ = program_to_circuit(self.program_)
        self.sim_chi_max_ = None
        self.fidelity_ = self.score()
        return self

    def _prepared_state(self) -> MPS:
        if self.circuit_.is_elementary():
            return simulate(self.circuit_)
        # opaque blocks need the dense path; rebuild an MPS from it
        from .mps import mps_from_statevector

        vec = simulate_dense(self.circuit_)
        return mps_from_statevector(vec)
