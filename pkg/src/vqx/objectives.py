"""Evaluation functions for VQE and SSVQE with deflation, constraint and tabu terms.

All penalty terms are in Hartree and non-negative (the smooth deflation
variant excepted, see :func:`smooth_deflation_term`).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .ansatz import AnsatzSpec
from .encoding import Observables
from .pauli import PauliSum
from .simulator import StateVector, expectation, overlap

MODES = ("vqe", "ssvqe")


@dataclass
class SmoothDeflation:
    """Parameters of the logistic-gated deflation variant (off by default)."""

    r: float
    r_d: float
    a: float = 1.0
    b: float = 0.0
    alpha: float = 100.0


@dataclass
class ObjectiveSpec:
    """Knobs shared by every state of a run.

    ``constraint_targets`` and ``tabu_targets`` hold ``(observable, value)``
    pairs, the observable being a :class:`PauliSum` or one of ``"N"``,
    ``"Sz"``, ``"S2"``.  With ``deflation_shift`` the weight on a previous
    state ``j`` becomes ``A + (E_ceiling - E_j)``, where ``E_ceiling`` bounds
    the spectrum from above, so the penalized level always clears every
    gap.
    """

    mode: str = "vqe"
    group_size: int = 1
    weights: tuple[float, ...] | None = None
    deflation_coefficient: float = 1.0
    deflation_shift: bool = True
    constraint_targets: list = field(default_factory=list)
    tabu_targets: list = field(default_factory=list)
    tabu_width: float = 100.0
    tabu_amplitude: float = 100.0
    smooth_deflation: SmoothDeflation | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.group_size < 1:
            raise ValueError("group_size must be >= 1")
        if self.weights is None:
            self.weights = tuple(float(self.group_size - j) for j in range(self.group_size))
        self.weights = tuple(float(w) for w in self.weights)
        if len(self.weights) != self.group_size:
            raise ValueError("need one weight per state in the group")
        if any(w <= 0 for w in self.weights):
            raise ValueError("weights must be positive")
        if any(b >= a for a, b in zip(self.weights, self.weights[1:])):
            raise ValueError("weights must be strictly decreasing")
        if self.tabu_width <= 0:
            raise ValueError("tabu width must be > 0")
        if self.tabu_amplitude < 0 or self.deflation_coefficient < 0:
            raise ValueError("tabu amplitude and deflation coefficient must be >= 0")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["weights"] = list(self.weights)
        d["constraint_targets"] = [[_name(o), v] for o, v in self.constraint_targets]
        d["tabu_targets"] = [[_name(o), v] for o, v in self.tabu_targets]
        return d

    @classmethod
    def from_dict(cls, data: Mapping) -> "ObjectiveSpec":
        data = dict(data)
        smooth = data.pop("smooth_deflation", None)
        if smooth is not None:
            data["smooth_deflation"] = SmoothDeflation(**smooth)
        for key in ("constraint_targets", "tabu_targets"):
            if key in data:
                data[key] = [tuple(x) for x in data[key]]
        if data.get("weights") is not None:
            data["weights"] = tuple(data["weights"])
        return cls(**data)


def _name(obs) -> str:
    if isinstance(obs, str):
        return obs
    raise TypeError("only named observables serialize; use 'N', 'Sz' or 'S2'")


def resolve_targets(targets, observables: Observables | None) -> list[tuple[PauliSum, float]]:
    out = []
    named = observables.as_dict() if observables is not None else {}
    for obs, value in targets:
        if isinstance(obs, str):
            if obs not in named:
                raise KeyError(f"unknown observable {obs!r}")
            obs = named[obs]
        if not obs.is_hermitian:
            raise ValueError("penalty observables must be Hermitian")
        out.append((obs, float(value)))
    return out


def constraint_penalty(state: StateVector, targets: Sequence[tuple[PauliSum, float]]) -> float:
    """Sum over targets of ``|<U> - target|``."""
    return float(sum(abs(expectation(state, obs) - t) for obs, t in targets))


def tabu_penalty(state: StateVector, targets: Sequence[tuple[PauliSum, float]],
                 width: float = 100.0, amplitude: float = 100.0) -> float:
    """Sum over targets of ``amplitude * exp(-width * (<U> - avoided)**2)``."""
    return float(sum(amplitude * math.exp(-width * (expectation(state, obs) - t) ** 2) for obs, t in targets))


def deflation_term(state: StateVector, previous_states: Sequence[StateVector], A=1.0) -> float:
    """``sum_j A_j |<prev_j|state>|**2``; ``A`` may be a scalar or one weight per previous state."""
    weights = np.broadcast_to(np.asarray(A, dtype=float), (len(previous_states),))
    return float(sum(w * abs(overlap(p, state)) ** 2 for w, p in zip(weights, previous_states)))


def overlap_polynomial(ov2: float, r: float, r_d: float, e_p: float) -> float:
    """Quartic/quadratic function of the squared overlap used by smooth deflation."""
    k = 2.0 * (math.sqrt(5.0) + 1.0)
    scale = r**4 / r_d**4 * e_p / 4.0
    return (1.0 + k) * scale * ov2**2 + k * scale * ov2


def smooth_deflation_term(state: StateVector, previous_states: Sequence[StateVector], r: float, r_d: float,
                          e_p: float, a: float = 1.0, b: float = 0.0, alpha: float = 100.0) -> float:
    """Logistic-gated deflation, grouped as printed.

    ``(a f + b (1 - f)) * sum_j [g |ov_j|^2 + (1 - g) poly(|ov_j|^2)]`` with
    ``f = 1 / (exp(alpha (r - r_d)) + 1)`` and ``g = 1 / (exp(r - r_d / 4) + 1)``.
    ``e_p`` is the energy of the level just below; since it is usually
    negative the polynomial branch can push the value below zero.
    """
    if r <= 0 or r_d <= 0:
        raise ValueError("r and r_d must be positive")
    f = _logistic(alpha * (r - r_d))
    gate = _logistic(r - 0.25 * r_d)
    total = 0.0
    for p in previous_states:
        ov2 = abs(overlap(p, state)) ** 2
        total += gate * ov2 + (1.0 - gate) * overlap_polynomial(ov2, r, r_d, e_p)
    return (a * f + b * (1.0 - f)) * total


def _logistic(x: float) -> float:
    # 1 / (exp(x) + 1) without overflow
    if x > 0:
        e = math.exp(-x)
        return e / (1.0 + e)
    return 1.0 / (math.exp(x) + 1.0)


def spectral_ceiling(H: PauliSum) -> float:
    """Upper bound on the largest eigenvalue: identity coefficient plus sum of |c|."""
    ident = "I" * H.n_qubits
    return float(H.identity_coefficient().real + sum(abs(t.coeff) for t in H if t.axes != ident))


@dataclass
class ObjectiveContext:
    """Everything an evaluation needs besides ``theta``.

    ``constraints`` and ``tabu`` carry one list of resolved ``(PauliSum,
    value)`` pairs per initial state; when omitted, the spec's targets apply
    to every state (named observables resolve against ``observables``).
    """

    hamiltonian: PauliSum
    ansatz: AnsatzSpec
    initial_states: list[StateVector]
    spec: ObjectiveSpec
    previous_states: list[StateVector] = field(default_factory=list)
    previous_energies: list[float] = field(default_factory=list)
    constraints: list[list] | None = None
    tabu: list[list] | None = None
    track_orthogonality: bool = False
    observables: Observables | None = None

    def __post_init__(self):
        self.max_overlap = 0.0
        k = len(self.initial_states)
        if k == 0:
            raise ValueError("need at least one initial state")
        if self.spec.mode == "vqe" and k != 1:
            raise ValueError("VQE evaluates exactly one state")
        if self.spec.mode == "ssvqe" and k != self.spec.group_size:
            raise ValueError(f"SSVQE group needs {self.spec.group_size} initial states, got {k}")
        gram = np.array([[overlap(a, b) for b in self.initial_states] for a in self.initial_states])
        if np.max(np.abs(gram - np.eye(k))) > 1e-10:
            raise ValueError("initial states must be mutually orthogonal")
        if self.previous_energies and len(self.previous_energies) != len(self.previous_states):
            raise ValueError("one energy per previous state")
        if self.constraints is None:
            self.constraints = [resolve_targets(self.spec.constraint_targets, self.observables)] * k
        if self.tabu is None:
            self.tabu = [resolve_targets(self.spec.tabu_targets, self.observables)] * k
        if len(self.constraints) != k or len(self.tabu) != k:
            raise ValueError("need one constraint list and one tabu list per initial state")
        self._H = self.hamiltonian.matrix()
        self._cons = [[(o.matrix(), t) for o, t in c] for c in self.constraints]
        self._tabu = [[(o.matrix(), t) for o, t in c] for c in self.tabu]
        dim = 2 ** self.hamiltonian.n_qubits
        self._prev = np.array([p.amplitudes for p in self.previous_states], dtype=complex).reshape(-1, dim)
        self._defl = self.deflation_weights()

    def deflation_weights(self) -> np.ndarray:
        A = self.spec.deflation_coefficient
        w = np.full(len(self.previous_states), A, dtype=float)
        if self.spec.deflation_shift and self.previous_states:
            if len(self.previous_energies) != len(self.previous_states):
                raise ValueError("deflation shift needs the energies of the previous states")
            top = spectral_ceiling(self.hamiltonian)
            w = w + np.maximum(0.0, top - np.asarray(self.previous_energies))
        return w

    def output_amplitudes(self, theta) -> list[np.ndarray]:
        return [self.ansatz.apply_amplitudes(s.amplitudes, theta) for s in self.initial_states]

    def output_states(self, theta) -> list[StateVector]:
        return [StateVector(a, s.n_qubits, normalize=True) for a, s in zip(self.output_amplitudes(theta), self.initial_states)]

    def energies(self, theta) -> list[float]:
        return [_expect(a, self._H) for a in self.output_amplitudes(theta)]

    def _state_terms(self, amps: np.ndarray, j: int) -> tuple[float, float]:
        """(energy, penalty) of output state ``j``."""
        energy = _expect(amps, self._H)
        pen = 0.0
        spec = self.spec
        if len(self._prev):
            ov2 = np.abs(self._prev.conj() @ amps) ** 2
            if spec.smooth_deflation is None:
                pen += float(self._defl @ ov2)
            else:
                sd = spec.smooth_deflation
                e_p = self.previous_energies[-1] if self.previous_energies else 0.0
                f = _logistic(sd.alpha * (sd.r - sd.r_d))
                gate = _logistic(sd.r - 0.25 * sd.r_d)
                s = sum(gate * x + (1 - gate) * overlap_polynomial(x, sd.r, sd.r_d, e_p) for x in ov2)
                pen += (sd.a * f + sd.b * (1 - f)) * s
        for M, t in self._cons[j]:
            pen += abs(_expect(amps, M) - t)
        for M, t in self._tabu[j]:
            pen += spec.tabu_amplitude * math.exp(-spec.tabu_width * (_expect(amps, M) - t) ** 2)
        return energy, pen

    def state_values(self, theta) -> list[tuple[float, float]]:
        amps = self.output_amplitudes(theta)
        if self.track_orthogonality and len(amps) > 1:
            A = np.array(amps)
            gram = np.abs(A.conj() @ A.T)
            np.fill_diagonal(gram, 0.0)
            self.max_overlap = max(self.max_overlap, float(gram.max()))
        return [self._state_terms(a, j) for j, a in enumerate(amps)]


def _expect(amps: np.ndarray, M: np.ndarray) -> float:
    return float(np.vdot(amps, M @ amps).real)


def evaluate_vqe(theta, context: ObjectiveContext) -> float:
    """Energy of ``U(theta)|init>`` plus the enabled deflation, constraint and tabu terms."""
    (energy, pen), = context.state_values(theta)
    return energy + pen


def evaluate_ssvqe(theta, context: ObjectiveContext) -> float:
    """Weighted energy sum over the group plus each state's penalty terms."""
    total = 0.0
    for w, (energy, pen) in zip(context.spec.weights, context.state_values(theta)):
        total += w * energy + pen
    return total


def evaluate(theta, context: ObjectiveContext) -> float:
    if context.spec.mode == "vqe":
        return evaluate_vqe(theta, context)
    return evaluate_ssvqe(theta, context)
