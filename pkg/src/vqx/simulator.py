"""Dense statevector simulation.

Basis index convention: qubit 0 is the most significant bit, so the ket
label ``"1000"`` is index 8.  Gates mutate a :class:`StateVector` in place;
the module-level helpers copy first.
"""

from __future__ import annotations

import numpy as np

from .pauli import PauliSum, PauliTerm, as_pauli_sum, pauli_action

NORM_TOL = 1e-10


class StateVector:
    """Normalized amplitudes over ``2**n`` basis states."""

    __slots__ = ("amplitudes", "n_qubits")

    def __init__(self, amplitudes, n_qubits: int | None = None, normalize: bool = False):
        amps = np.array(amplitudes, dtype=complex).ravel()
        if n_qubits is None:
            n_qubits = int(round(np.log2(amps.size)))
        if amps.size != 1 << n_qubits:
            raise ValueError(f"{amps.size} amplitudes do not match {n_qubits} qubits")
        norm = np.linalg.norm(amps)
        if normalize:
            amps = amps / norm
        elif abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm={norm:.12g})")
        self.amplitudes = amps
        self.n_qubits = n_qubits

    def copy(self) -> "StateVector":
        out = StateVector.__new__(StateVector)
        out.amplitudes = self.amplitudes.copy()
        out.n_qubits = self.n_qubits
        return out

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def __repr__(self):
        return f"StateVector(n_qubits={self.n_qubits})"

    # -- gates ---------------------------------------------------------------
    def _apply_1q(self, gate: np.ndarray, q: int):
        psi = self.amplitudes.reshape((2,) * self.n_qubits)
        psi = np.moveaxis(np.tensordot(gate, psi, axes=([1], [q])), 0, q)
        self.amplitudes = psi.reshape(-1)
        return self

    def h(self, q: int):
        return self._apply_1q(np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2), q)

    def rx(self, q: int, angle: float):
        c, s = np.cos(angle / 2), np.sin(angle / 2)
        return self._apply_1q(np.array([[c, -1j * s], [-1j * s, c]]), q)

    def ry(self, q: int, angle: float):
        c, s = np.cos(angle / 2), np.sin(angle / 2)
        return self._apply_1q(np.array([[c, -s], [s, c]], dtype=complex), q)

    def rz(self, q: int, angle: float):
        return self._apply_1q(np.diag([np.exp(-0.5j * angle), np.exp(0.5j * angle)]), q)

    def cnot(self, control: int, target: int):
        if control == target:
            raise ValueError("control and target coincide")
        n = self.n_qubits
        idx = np.arange(1 << n)
        cbit = (idx >> (n - 1 - control)) & 1
        src = np.where(cbit == 1, idx ^ (1 << (n - 1 - target)), idx)
        self.amplitudes = self.amplitudes[src]
        return self


def basis_state(label: str) -> StateVector:
    """Computational basis ket; the leftmost character is qubit 0."""
    if not label or any(c not in "01" for c in label):
        raise ValueError(f"bad basis label {label!r}")
    amps = np.zeros(1 << len(label), dtype=complex)
    amps[int(label, 2)] = 1.0
    return StateVector(amps, len(label))


def _check_pair(a: StateVector, b: StateVector):
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"register sizes differ: {a.n_qubits} vs {b.n_qubits}")


def overlap(s1: StateVector, s2: StateVector) -> complex:
    """``<s1|s2>`` straight from the amplitudes."""
    _check_pair(s1, s2)
    return complex(np.vdot(s1.amplitudes, s2.amplitudes))


def _rotation_angle(term: PauliTerm, theta: float) -> float:
    if abs(term.coeff.imag) > 1e-12:
        raise ValueError("Pauli exponential needs a real coefficient")
    return float(theta) * term.coeff.real


def pauli_exponential_inplace(s: StateVector, term: PauliTerm, theta: float) -> StateVector:
    """Gate ladder for ``exp(-i theta c P)`` with real coefficient ``c``.

    Basis change (H for X, Rx(pi/2) for Y) on every active qubit, a CNOT
    chain between consecutive active qubits, Rz(2 theta c) on the last one,
    then everything undone in reverse.  The all-identity string is a global
    phase ``exp(-i theta c)``.
    """
    if term.n_qubits != s.n_qubits:
        raise ValueError("term and state registers differ")
    angle = _rotation_angle(term, theta)
    if not np.isfinite(angle):
        raise ValueError("rotation angle must be finite")
    active = term.support
    if not active:
        s.amplitudes = s.amplitudes * np.exp(-1j * angle)
        return s
    for q in active:
        a = term.axes[q]
        if a == "X":
            s.h(q)
        elif a == "Y":
            s.rx(q, np.pi / 2)
    for c, t in zip(active, active[1:]):
        s.cnot(c, t)
    s.rz(active[-1], 2.0 * angle)
    for c, t in reversed(list(zip(active, active[1:]))):
        s.cnot(c, t)
    for q in active:
        a = term.axes[q]
        if a == "X":
            s.h(q)
        elif a == "Y":
            s.rx(q, -np.pi / 2)
    return s


def apply_pauli_exponential(s: StateVector, term: PauliTerm, theta: float) -> StateVector:
    """Return ``exp(-i theta P)|s>`` built from the gate ladder; ``s`` is untouched."""
    return pauli_exponential_inplace(s.copy(), term, theta)


class PauliRotation:
    """Precomputed ``exp(-i phi P)`` for fast repeated application.

    Uses ``cos(phi) psi - i sin(phi) P psi`` with ``P`` stored as a
    bit-flip mask and a phase vector; equal to the gate ladder up to
    rounding.
    """

    __slots__ = ("mask", "phase", "weight", "index")

    def __init__(self, term: PauliTerm):
        self.mask, self.phase = pauli_action(term.axes)
        self.weight = term.coeff
        self.index = np.arange(self.phase.size) ^ self.mask

    def apply(self, amps: np.ndarray, phi: float) -> np.ndarray:
        p_psi = (self.phase * amps)[self.index]
        return np.cos(phi) * amps - 1j * np.sin(phi) * p_psi


def expectation(s: StateVector, obs: PauliSum | PauliTerm) -> float:
    """``<s|obs|s>`` for a Hermitian observable."""
    obs = as_pauli_sum(obs)
    if not obs.is_hermitian:
        raise ValueError("expectation needs a Hermitian observable")
    if obs.n_qubits != s.n_qubits:
        raise ValueError("observable and state registers differ")
    return expectation_dense(s.amplitudes, obs.matrix())


def expectation_dense(amps: np.ndarray, matrix: np.ndarray) -> float:
    val = np.vdot(amps, matrix @ amps)
    if abs(val.imag) > 1e-10:
        raise ValueError(f"expectation has imaginary part {val.imag:.3e}")
    return float(val.real)
