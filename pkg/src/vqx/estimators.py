"""Scikit-learn style solvers: ``VQE(...).fit(problem).energies_``.

Both solvers take a :class:`~vqx.integrals.MolecularProblem` (or an
already-encoded Hermitian :class:`~vqx.pauli.PauliSum`) and a list of
target states.  :class:`VQE` solves the states one after another, each
deflated against the ones before; :class:`SSVQE` solves consecutive groups
with one shared circuit per group.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .ansatz import AnsatzSpec, uccsd_generators
from .cases import TargetState
from .encoding import build_observables, encode_occupation, qubit_hamiltonian
from .integrals import MolecularProblem
from .objectives import (ObjectiveContext, ObjectiveSpec, SmoothDeflation, evaluate, resolve_targets)
from .optimizer import OptimizerConfig, Trace, powell_minimize
from .simulator import StateVector, basis_state, expectation
from .validation import check_encoding, check_is_fitted, check_occupation, check_problem

logger = logging.getLogger(__name__)


@dataclass
class StageResult:
    """One optimization: a single VQE state or one SSVQE group."""

    indices: tuple[int, ...]
    params: np.ndarray
    objective: float
    trace: Trace
    update_energies: np.ndarray
    ansatz: AnsatzSpec
    max_overlap: float = 0.0


def _as_target(state, n_modes: int) -> TargetState:
    if isinstance(state, TargetState):
        check_occupation(state.occupation, n_modes)
        return state
    return TargetState(str(state), check_occupation(str(state), n_modes))


def hartree_fock_occupation(n_modes: int, n_electrons: int) -> str:
    return "1" * n_electrons + "0" * (n_modes - n_electrons)


class _VariationalSolver(BaseEstimator):
    mode = "vqe"

    def __init__(self, states=None, encoding="bk", depth=2, constraints=False, tabu=False,
                 tabu_targets=(), tabu_width=100.0, tabu_amplitude=100.0,
                 deflation_coefficient=1.0, deflation_shift=True, smooth_deflation=None,
                 group_size=2, weights=None, max_updates=2000, value_tolerance=1e-8,
                 line_search_tolerance=1e-8, initial_step=0.1, init_noise=0.01, random_state=0):
        self.states = states
        self.encoding = encoding
        self.depth = depth
        self.constraints = constraints
        self.tabu = tabu
        self.tabu_targets = tabu_targets
        self.tabu_width = tabu_width
        self.tabu_amplitude = tabu_amplitude
        self.deflation_coefficient = deflation_coefficient
        self.deflation_shift = deflation_shift
        self.smooth_deflation = smooth_deflation
        self.group_size = group_size
        self.weights = weights
        self.max_updates = max_updates
        self.value_tolerance = value_tolerance
        self.line_search_tolerance = line_search_tolerance
        self.initial_step = initial_step
        self.init_noise = init_noise
        self.random_state = random_state

    # -- helpers ---------------------------------------------------------------
    def optimizer_config(self) -> OptimizerConfig:
        return OptimizerConfig(max_updates=self.max_updates, value_tolerance=self.value_tolerance,
                               line_search_tolerance=self.line_search_tolerance,
                               initial_step=self.initial_step, seed=int(self.random_state or 0),
                               init_noise=self.init_noise)

    def _stages(self, n_states: int) -> list[tuple[int, ...]]:
        raise NotImplementedError

    def _objective_spec(self, size: int) -> ObjectiveSpec:
        smooth = self.smooth_deflation
        if isinstance(smooth, dict):
            smooth = SmoothDeflation(**smooth)
        return ObjectiveSpec(mode=self.mode, group_size=size,
                             weights=self.weights if self.mode == "ssvqe" else None,
                             deflation_coefficient=self.deflation_coefficient,
                             deflation_shift=self.deflation_shift,
                             tabu_width=self.tabu_width, tabu_amplitude=self.tabu_amplitude,
                             smooth_deflation=smooth)

    # -- estimator API -------------------------------------------------------
    def fit(self, X, y=None):
        """Solve every target state of ``X``.

        Args:
            X: molecular problem or encoded Hamiltonian.
            y: ignored.

        Returns:
            self
        """
        X = check_problem(X)
        encoding = check_encoding(self.encoding)
        if isinstance(X, MolecularProblem):
            H = qubit_hamiltonian(X, encoding)
            n_electrons = X.n_electrons
        else:
            H = X
            n_electrons = None
        n = H.n_qubits
        states = self.states
        if states is None:
            if n_electrons is None:
                raise ValueError("states are required when fitting a bare Hamiltonian")
            states = [hartree_fock_occupation(n, n_electrons)]
        targets = [_as_target(s, n) for s in states]
        observables = build_observables(n // 2, encoding)
        cfg = self.optimizer_config()
        tabu = resolve_targets(self.tabu_targets, observables) if self.tabu else []

        out_states: list[StateVector | None] = [None] * len(targets)
        energies = np.full(len(targets), np.nan)
        stages = []
        for s_idx, idx in enumerate(self._stages(len(targets))):
            group = [targets[i] for i in idx]
            ansatz = uccsd_generators(n, [t.occupation for t in group], encoding, self.depth)
            inits = [basis_state(encode_occupation(t.occupation, encoding)) for t in group]
            cons = [resolve_targets(t.constraints, observables) if self.constraints else [] for t in group]
            prev = [out_states[i] for i in range(len(targets)) if out_states[i] is not None]
            prev_e = [float(energies[i]) for i in range(len(targets)) if out_states[i] is not None]
            ctx = ObjectiveContext(H, ansatz, inits, self._objective_spec(len(idx)), prev, prev_e,
                                   cons, [tabu] * len(idx), track_orthogonality=self.mode == "ssvqe")
            theta0 = cfg.initial_point(ansatz.parameter_count, seed=[int(self.random_state or 0), s_idx])
            update_energies = []
            result = powell_minimize(lambda th: evaluate(th, ctx), theta0, cfg,
                                     callback=lambda x, fx: update_energies.append(ctx.energies(x)))
            for i, st in zip(idx, ctx.output_states(result.x)):
                out_states[i] = st
                energies[i] = expectation(st, H)
            logger.debug("stage %s: objective %.10f after %d updates", idx, result.fun, result.trace.updates_used)
            stages.append(StageResult(tuple(idx), result.x, result.fun, result.trace,
                                      np.array(update_energies).reshape(-1, len(idx)), ansatz, ctx.max_overlap))
        self.hamiltonian_ = H
        self.observables_ = observables
        self.targets_ = targets
        self.states_ = out_states
        self.energies_ = energies
        self.stages_ = stages
        self.n_updates_ = [st.trace.updates_used for st in stages]
        return self

    def stage_of(self, i: int) -> StageResult:
        check_is_fitted(self)
        return next(st for st in self.stages_ if i in st.indices)

    def transform(self, X):
        """Expectation values of observables ``X`` in each fitted state, shape ``(n_states, n_obs)``."""
        check_is_fitted(self)
        if not isinstance(X, (list, tuple)):
            X = [X]
        return np.array([[expectation(s, o) for o in X] for s in self.states_])

    def predict(self, X=None):
        """Fitted energies; ``X`` is accepted for API symmetry and ignored."""
        check_is_fitted(self)
        return self.energies_.copy()


class VQE(_VariationalSolver):
    """Sequential VQE: state ``i`` is deflated against states ``0..i-1``."""

    mode = "vqe"

    def _stages(self, n_states):
        return [(i,) for i in range(n_states)]


class SSVQE(_VariationalSolver):
    """Subspace-search VQE over consecutive groups of ``group_size`` states.

    Every group shares one parameter vector; later groups are deflated
    against the converged states of earlier ones.
    """

    mode = "ssvqe"

    def _stages(self, n_states):
        g = int(self.group_size)
        if g < 1:
            raise ValueError("group_size must be >= 1")
        return [tuple(range(s, min(s + g, n_states))) for s in range(0, n_states, g)]

    def _objective_spec(self, size):
        spec = super()._objective_spec(size) if self.weights is None or len(self.weights) == size else None
        if spec is None:
            # trailing partial group
            w = tuple(self.weights[:size])
            spec = ObjectiveSpec(mode="ssvqe", group_size=size, weights=w,
                                 deflation_coefficient=self.deflation_coefficient,
                                 deflation_shift=self.deflation_shift,
                                 tabu_width=self.tabu_width, tabu_amplitude=self.tabu_amplitude)
        return spec
