"""Trotterized UCCSD ansatz."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from .encoding import FermionOperator, encode
from .pauli import PauliSum
from .simulator import PauliRotation, StateVector, pauli_exponential_inplace


@dataclass(frozen=True)
class Excitation:
    """Occupied -> virtual spin-orbital excitation; ``len(occupied)`` is 1 or 2."""

    occupied: tuple[int, ...]
    virtual: tuple[int, ...]

    def fermion_generator(self, n_modes: int) -> FermionOperator:
        """``T - T+`` for this excitation."""
        ops = tuple((v, True) for v in self.virtual) + tuple((o, False) for o in reversed(self.occupied))
        t = FermionOperator({ops: 1.0}, n_modes)
        return t + t.adjoint() * -1.0

    def __str__(self):
        return f"{','.join(map(str, self.occupied))}->{','.join(map(str, self.virtual))}"


@dataclass
class AnsatzSpec:
    """Ordered anti-Hermitian generators and the Trotter depth.

    Each parameter ``theta_k`` multiplies one generator ``G_k``; a Trotter
    step applies ``exp(theta_k / depth * c P)`` for every term ``c P`` of
    every generator, and the step repeats ``depth`` times.
    """

    generators: list[PauliSum]
    depth: int = 2
    excitations: list[Excitation] = field(default_factory=list)

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        for g in self.generators:
            if not g.is_antihermitian:
                raise ValueError("generators must be anti-Hermitian")
        self._compiled = [[(PauliRotation(t), t.coeff.imag) for t in g] for g in self.generators]

    @property
    def parameter_count(self) -> int:
        return len(self.generators)

    @property
    def n_qubits(self) -> int:
        return self.generators[0].n_qubits if self.generators else 0

    def with_depth(self, depth: int) -> "AnsatzSpec":
        return AnsatzSpec(self.generators, depth, self.excitations)

    def _check(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float).ravel()
        if theta.size != self.parameter_count:
            raise ValueError(f"expected {self.parameter_count} parameters, got {theta.size}")
        return theta

    def apply_amplitudes(self, amps: np.ndarray, theta) -> np.ndarray:
        """Fast path on raw amplitudes, algebraically identical to the gate ladder."""
        theta = self._check(theta)
        step = theta / self.depth
        for _ in range(self.depth):
            for k, terms in enumerate(self._compiled):
                for rot, b in terms:
                    # exp(theta * i b P) = exp(-i (-theta b) P)
                    amps = rot.apply(amps, -step[k] * b)
        return amps


def spin_conserving_excitations(occupied: Sequence[int], virtual: Sequence[int]) -> list[Excitation]:
    """Singles then doubles; interleaved spin orbitals, spin = index % 2."""
    singles = [Excitation((o,), (v,)) for o in occupied for v in virtual if o % 2 == v % 2]
    doubles = []
    for occ in combinations(occupied, 2):
        for vir in combinations(virtual, 2):
            if sorted(o % 2 for o in occ) == sorted(v % 2 for v in vir):
                doubles.append(Excitation(occ, vir))
    return singles + doubles


def uccsd_generators(n_spin_orbitals: int, reference_occupation: str | Sequence[str],
                     encoding: str = "bk", depth: int = 2) -> AnsatzSpec:
    """UCCSD generators relative to an occupation-number string such as ``"1100"``.

    Several references give the de-duplicated union of their excitations,
    which is how a shared SSVQE circuit reaches every state of its group.
    """
    refs = [reference_occupation] if isinstance(reference_occupation, str) else list(reference_occupation)
    excitations: list[Excitation] = []
    seen = set()
    for ref in refs:
        if len(ref) != n_spin_orbitals or set(ref) - {"0", "1"}:
            raise ValueError(f"bad reference occupation {ref!r}")
        occ = [i for i, c in enumerate(ref) if c == "1"]
        vir = [i for i, c in enumerate(ref) if c == "0"]
        if not occ or not vir:
            raise ValueError("UCCSD needs both occupied and virtual orbitals")
        for ex in spin_conserving_excitations(occ, vir):
            key = frozenset((frozenset(ex.occupied), frozenset(ex.virtual)))
            rev = frozenset((frozenset(ex.virtual), frozenset(ex.occupied)))
            if key in seen or rev in seen:
                continue
            seen.add(key)
            excitations.append(ex)
    if not excitations:
        raise ValueError("no spin-conserving excitations for this reference")
    gens = [encode(ex.fermion_generator(n_spin_orbitals), n_spin_orbitals, encoding) for ex in excitations]
    return AnsatzSpec(gens, depth, excitations)


def apply_ansatz(state: StateVector, spec: AnsatzSpec, theta, method: str = "fast") -> StateVector:
    """``U(theta)|state>``; ``method="ladder"`` runs the explicit gate circuit."""
    out = state.copy()
    if method == "fast":
        out.amplitudes = spec.apply_amplitudes(out.amplitudes, theta)
        return out
    if method != "ladder":
        raise ValueError(f"unknown method {method!r}")
    theta = spec._check(theta)
    for _ in range(spec.depth):
        for k, g in enumerate(spec.generators):
            for t in g:
                # exp(theta c P), c = i b  ->  ladder angle -theta b on the bare string
                pauli_exponential_inplace(out, type(t)(t.axes, 1.0), -theta[k] / spec.depth * t.coeff.imag)
    return out
