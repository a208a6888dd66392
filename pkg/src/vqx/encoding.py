"""Fermion-to-qubit encodings (Jordan-Wigner, Bravyi-Kitaev) and spin observables.

Both encodings are linear: qubit ``i`` stores the parity of a subset of
mode occupations, ``q = B n (mod 2)``.  Jordan-Wigner is ``B = I``;
Bravyi-Kitaev uses the Fenwick-tree matrix, where qubit ``j`` holds the
parity of modes ``(j & (j + 1)) .. j``.  The ladder-operator images are
derived from ``B`` directly: a creation operator projects mode ``j`` onto
empty, flips every qubit whose parity includes ``j`` and picks up the sign
of the parity of all lower modes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np

from .integrals import MolecularProblem
from .pauli import PauliSum, PauliTerm

ENCODINGS = ("jw", "bk")


class FermionOperator:
    """Sum of products of ladder operators.

    A term is a tuple of ``(mode, is_creation)`` pairs applied right to left,
    e.g. ``((0, True), (1, False))`` is ``a+_0 a_1``.
    """

    def __init__(self, terms=None, n_modes: int | None = None):
        self.terms: dict[tuple, complex] = {}
        self.n_modes = n_modes
        for ops, coeff in (terms or {}).items() if isinstance(terms, dict) else (terms or ()):
            self.add(ops, coeff)

    def add(self, ops: Iterable[tuple[int, bool]], coeff: complex = 1.0):
        ops = tuple((int(p), bool(d)) for p, d in ops)
        if self.n_modes is not None:
            for p, _ in ops:
                if not 0 <= p < self.n_modes:
                    raise IndexError(f"mode {p} out of range for {self.n_modes} modes")
        self.terms[ops] = self.terms.get(ops, 0j) + complex(coeff)
        return self

    @classmethod
    def identity(cls, coeff: complex = 1.0, n_modes: int | None = None):
        return cls({(): coeff}, n_modes)

    def __add__(self, other: "FermionOperator"):
        out = FermionOperator(dict(self.terms), self.n_modes)
        for ops, c in other.terms.items():
            out.add(ops, c)
        return out

    def __mul__(self, other):
        if isinstance(other, FermionOperator):
            out = FermionOperator(n_modes=self.n_modes)
            for a, ca in self.terms.items():
                for b, cb in other.terms.items():
                    out.add(a + b, ca * cb)
            return out
        return FermionOperator({k: v * other for k, v in self.terms.items()}, self.n_modes)

    __rmul__ = __mul__

    def adjoint(self) -> "FermionOperator":
        out = FermionOperator(n_modes=self.n_modes)
        for ops, c in self.terms.items():
            out.add(tuple((p, not d) for p, d in reversed(ops)), np.conj(c))
        return out

    def max_mode(self) -> int:
        return max((p for ops in self.terms for p, _ in ops), default=-1)


def ladder(p: int, dagger: bool) -> FermionOperator:
    return FermionOperator({((p, dagger),): 1.0})


def number_op(p: int) -> FermionOperator:
    return FermionOperator({((p, True), (p, False)): 1.0})


def encoding_matrix(n: int, encoding: str) -> np.ndarray:
    """Binary matrix ``B`` with ``qubits = B @ occupations (mod 2)``."""
    if encoding == "jw":
        return np.eye(n, dtype=np.int64)
    if encoding == "bk":
        if n & (n - 1):
            raise ValueError(f"Bravyi-Kitaev here needs a power-of-two register, got {n}")
        B = np.zeros((n, n), dtype=np.int64)
        for j in range(n):
            B[j, j & (j + 1): j + 1] = 1
        return B
    raise ValueError(f"unknown encoding {encoding!r}; choose from {ENCODINGS}")


def _gf2_inverse(B: np.ndarray) -> np.ndarray:
    n = B.shape[0]
    M = np.concatenate([B % 2, np.eye(n, dtype=np.int64)], axis=1)
    for col in range(n):
        pivot = next(r for r in range(col, n) if M[r, col])
        M[[col, pivot]] = M[[pivot, col]]
        for r in range(n):
            if r != col and M[r, col]:
                M[r] ^= M[col]
    return M[:, n:]


def encode_occupation(occupation: str, encoding: str) -> str:
    """Qubit ket label of an occupation-number string, e.g. ``1100`` -> ``1000`` under BK."""
    n = np.array([int(c) for c in occupation])
    q = encoding_matrix(len(n), encoding) @ n % 2
    return "".join(str(int(b)) for b in q)


def decode_occupation(ket: str, encoding: str) -> str:
    """Inverse of :func:`encode_occupation`."""
    q = np.array([int(c) for c in ket])
    n = _gf2_inverse(encoding_matrix(len(q), encoding)) @ q % 2
    return "".join(str(int(b)) for b in n)


def _z_string(n: int, qubits) -> PauliSum:
    return PauliSum.from_term(PauliTerm.from_sparse(n, {int(q): "Z" for q in qubits}))


@lru_cache(maxsize=None)
def _creation_images(n: int, encoding: str) -> tuple[PauliSum, ...]:
    B = encoding_matrix(n, encoding)
    Binv = _gf2_inverse(B)
    out = []
    for j in range(n):
        update = np.flatnonzero(B[:, j])
        occ = np.flatnonzero(Binv[j])
        lower = Binv[:j].sum(axis=0) % 2
        parity = np.flatnonzero(lower)
        flip = PauliSum.from_term(PauliTerm.from_sparse(n, {int(q): "X" for q in update}))
        empty = (PauliSum.identity(n) + _z_string(n, occ)) * 0.5
        out.append(flip * empty * _z_string(n, parity))
    return tuple(out)


def ladder_images(n: int, encoding: str) -> tuple[tuple[PauliSum, ...], tuple[PauliSum, ...]]:
    """Encoded ``(a+_j for j), (a_j for j)``."""
    up = _creation_images(n, encoding)
    return up, tuple(a.adjoint() for a in up)


def encode(f: FermionOperator, n: int, encoding: str = "bk") -> PauliSum:
    """Map a fermion operator onto ``n`` qubits."""
    if f.max_mode() >= n:
        raise IndexError(f"mode {f.max_mode()} out of range for {n} qubits")
    up, down = ladder_images(n, encoding)
    total: dict[str, complex] = {}
    for ops, coeff in f.terms.items():
        acc = PauliSum.identity(n, coeff)
        for p, dag in ops:
            acc = acc * (up[p] if dag else down[p])
        for t in acc:
            total[t.axes] = total.get(t.axes, 0j) + t.coeff
    return PauliSum(total, n)


def jordan_wigner(f: FermionOperator, n: int) -> PauliSum:
    return encode(f, n, "jw")


def bravyi_kitaev(f: FermionOperator, n: int) -> PauliSum:
    return encode(f, n, "bk")


def molecular_fermion_operator(problem: MolecularProblem, tol: float = 1e-14) -> FermionOperator:
    n = problem.n_spin_orbitals
    f = FermionOperator.identity(problem.e_nuc, n)
    for p, q in zip(*np.nonzero(np.abs(problem.h) > tol)):
        f.add(((p, True), (q, False)), problem.h[p, q])
    for p, q, r, s in zip(*np.nonzero(np.abs(problem.g) > tol)):
        f.add(((p, True), (q, True), (s, False), (r, False)), 0.25 * problem.g[p, q, r, s])
    return f


def qubit_hamiltonian(problem: MolecularProblem, encoding: str = "bk") -> PauliSum:
    """Encoded molecular Hamiltonian with real coefficients."""
    H = encode(molecular_fermion_operator(problem), problem.n_spin_orbitals, encoding)
    if not H.is_hermitian:
        raise ValueError("encoded Hamiltonian is not Hermitian")
    return H.real()


@dataclass(frozen=True)
class Observables:
    number: PauliSum
    sz: PauliSum
    s2: PauliSum

    def as_dict(self) -> dict[str, PauliSum]:
        return {"N": self.number, "Sz": self.sz, "S2": self.s2}


def spin_fermion_operators(n_spatial: int) -> tuple[FermionOperator, FermionOperator, FermionOperator]:
    n = 2 * n_spatial
    N = FermionOperator(n_modes=n)
    Sz = FermionOperator(n_modes=n)
    Splus = FermionOperator(n_modes=n)
    for k in range(n_spatial):
        a, b = 2 * k, 2 * k + 1
        N = N + number_op(a) + number_op(b)
        Sz = Sz + number_op(a) * 0.5 + number_op(b) * -0.5
        Splus.add(((a, True), (b, False)))
    # S^2 = S- S+ + Sz (Sz + 1)
    S2 = Splus.adjoint() * Splus + Sz * Sz + Sz
    return N, Sz, S2


def build_observables(n_spatial: int, encoding: str = "bk") -> Observables:
    """Particle number, S_z and S^2 under the same encoding as the Hamiltonian."""
    n = 2 * n_spatial
    N, Sz, S2 = spin_fermion_operators(n_spatial)
    return Observables(*(encode(op, n, encoding).real() for op in (N, Sz, S2)))
