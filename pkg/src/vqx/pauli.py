"""Pauli strings and coefficient-weighted sums of them.

Qubit 0 is the leftmost character of an axes string and the leftmost
Kronecker factor of a dense matrix, i.e. the most significant bit of a
basis-state index.  ``|1000>`` on four qubits is index 8.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

PRUNE_TOL = 1e-12
MAX_DENSE_QUBITS = 12

_AXES = "IXYZ"

# (a, b) -> (phase, axis) for single-qubit products a*b
_PRODUCT = {
    ("I", "I"): (1, "I"), ("I", "X"): (1, "X"), ("I", "Y"): (1, "Y"), ("I", "Z"): (1, "Z"),
    ("X", "I"): (1, "X"), ("X", "X"): (1, "I"), ("X", "Y"): (1j, "Z"), ("X", "Z"): (-1j, "Y"),
    ("Y", "I"): (1, "Y"), ("Y", "X"): (-1j, "Z"), ("Y", "Y"): (1, "I"), ("Y", "Z"): (1j, "X"),
    ("Z", "I"): (1, "Z"), ("Z", "X"): (1j, "Y"), ("Z", "Y"): (-1j, "X"), ("Z", "Z"): (1, "I"),
}

_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class RegisterMismatchError(ValueError):
    """Operands act on registers of different size."""


@dataclass(frozen=True)
class PauliTerm:
    """A single Pauli string with a complex coefficient.

    Attributes:
        axes: one character from ``IXYZ`` per qubit.
        coeff: complex prefactor.
    """

    axes: str
    coeff: complex = 1.0

    def __post_init__(self):
        axes = self.axes.upper()
        if any(a not in _AXES for a in axes):
            raise ValueError(f"invalid Pauli axes {self.axes!r}")
        if not axes:
            raise ValueError("a Pauli term needs at least one qubit")
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "coeff", complex(self.coeff))

    @classmethod
    def from_sparse(cls, n: int, ops: Mapping[int, str] | str = (), coeff: complex = 1.0) -> "PauliTerm":
        """Build a term from ``{qubit: axis}`` or a spec like ``"X0 Z2"``."""
        if isinstance(ops, str):
            ops = _parse_sparse(ops)
        axes = ["I"] * n
        for q, a in dict(ops).items():
            if not 0 <= q < n:
                raise ValueError(f"qubit {q} outside register of size {n}")
            axes[q] = a
        return cls("".join(axes), coeff)

    @property
    def n_qubits(self) -> int:
        return len(self.axes)

    @property
    def is_identity(self) -> bool:
        return set(self.axes) == {"I"}

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(q for q, a in enumerate(self.axes) if a != "I")

    def label(self) -> str:
        """Sparse label such as ``X0 Z2``; empty for the identity."""
        return " ".join(f"{a}{q}" for q, a in enumerate(self.axes) if a != "I")

    def __mul__(self, other):
        if isinstance(other, PauliTerm):
            return multiply(self, other)
        return PauliTerm(self.axes, self.coeff * complex(other))

    __rmul__ = __mul__

    def __neg__(self):
        return PauliTerm(self.axes, -self.coeff)


def _parse_sparse(spec: str) -> dict[int, str]:
    ops = {}
    for tok in spec.split():
        m = re.fullmatch(r"([IXYZ])(\d+)", tok.upper())
        if m is None:
            raise ValueError(f"bad Pauli token {tok!r}")
        ops[int(m.group(2))] = m.group(1)
    return ops


def multiply(p: PauliTerm, q: PauliTerm) -> PauliTerm:
    """Operator product ``p q`` as a single term; the phase lands in the coefficient."""
    if p.n_qubits != q.n_qubits:
        raise RegisterMismatchError(f"register sizes differ: {p.n_qubits} vs {q.n_qubits}")
    phase = 1 + 0j
    axes = []
    for a, b in zip(p.axes, q.axes):
        ph, c = _PRODUCT[a, b]
        phase *= ph
        axes.append(c)
    return PauliTerm("".join(axes), p.coeff * q.coeff * phase)


class PauliSum:
    """Immutable sum of Pauli terms on a fixed register.

    Terms are keyed by their axes string, so construction merges duplicates
    and drops coefficients below ``PRUNE_TOL``.
    """

    __slots__ = ("n_qubits", "_terms", "_matrix")

    def __init__(self, terms: Iterable[PauliTerm] | Mapping[str, complex] = (), n_qubits: int | None = None):
        merged: dict[str, complex] = {}
        items = terms.items() if isinstance(terms, Mapping) else ((t.axes, t.coeff) for t in terms)
        for axes, c in items:
            if n_qubits is None:
                n_qubits = len(axes)
            elif len(axes) != n_qubits:
                raise RegisterMismatchError(f"term {axes!r} does not fit a {n_qubits}-qubit register")
            merged[axes] = merged.get(axes, 0j) + complex(c)
        if n_qubits is None:
            raise ValueError("n_qubits is required for an empty PauliSum")
        self.n_qubits = n_qubits
        self._terms = {a: c for a, c in sorted(merged.items()) if abs(c) > PRUNE_TOL}
        self._matrix = None

    @classmethod
    def identity(cls, n: int, coeff: complex = 1.0) -> "PauliSum":
        return cls({"I" * n: coeff}, n)

    @classmethod
    def zero(cls, n: int) -> "PauliSum":
        return cls((), n)

    @classmethod
    def from_term(cls, term: PauliTerm) -> "PauliSum":
        return cls([term])

    # -- container protocol ------------------------------------------------
    @property
    def terms(self) -> list[PauliTerm]:
        return [PauliTerm(a, c) for a, c in self._terms.items()]

    def coefficient(self, axes: str) -> complex:
        return self._terms.get(axes.upper(), 0j)

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(self.terms)

    def __contains__(self, axes: str):
        return axes in self._terms

    def __eq__(self, other):
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self.n_qubits == other.n_qubits and self._terms == other._terms

    def __hash__(self):
        return hash((self.n_qubits, tuple(self._terms.items())))

    def __repr__(self):
        body = " + ".join(f"({c:.6g})*{a}" for a, c in self._terms.items()) or "0"
        return f"PauliSum[{self.n_qubits}]({body})"

    # -- algebra -----------------------------------------------------------
    def _check(self, other: "PauliSum"):
        if self.n_qubits != other.n_qubits:
            raise RegisterMismatchError(f"register sizes differ: {self.n_qubits} vs {other.n_qubits}")

    def __add__(self, other):
        if isinstance(other, PauliTerm):
            other = PauliSum.from_term(other)
        if not isinstance(other, PauliSum):
            other = PauliSum.identity(self.n_qubits, other)
        self._check(other)
        merged = dict(self._terms)
        for a, c in other._terms.items():
            merged[a] = merged.get(a, 0j) + c
        return PauliSum(merged, self.n_qubits)

    __radd__ = __add__

    def __neg__(self):
        return PauliSum({a: -c for a, c in self._terms.items()}, self.n_qubits)

    def __sub__(self, other):
        return self + (-other if isinstance(other, (PauliSum, PauliTerm)) else -complex(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, PauliTerm):
            other = PauliSum.from_term(other)
        if isinstance(other, PauliSum):
            self._check(other)
            out: dict[str, complex] = {}
            for pa, pc in self._terms.items():
                for qa, qc in other._terms.items():
                    t = multiply(PauliTerm(pa, pc), PauliTerm(qa, qc))
                    out[t.axes] = out.get(t.axes, 0j) + t.coeff
            return PauliSum(out, self.n_qubits)
        s = complex(other)
        return PauliSum({a: c * s for a, c in self._terms.items()}, self.n_qubits)

    def __rmul__(self, other):
        if isinstance(other, PauliTerm):
            return PauliSum.from_term(other) * self
        return self * other

    def __truediv__(self, other):
        return self * (1.0 / complex(other))

    def adjoint(self) -> "PauliSum":
        return PauliSum({a: c.conjugate() for a, c in self._terms.items()}, self.n_qubits)

    def simplify(self) -> "PauliSum":
        """Return an equivalent sum; construction already merges and prunes."""
        return PauliSum(self._terms, self.n_qubits)

    @property
    def is_hermitian(self) -> bool:
        return all(abs(c.imag) <= PRUNE_TOL for c in self._terms.values())

    @property
    def is_antihermitian(self) -> bool:
        return all(abs(c.real) <= PRUNE_TOL for c in self._terms.values())

    def real(self) -> "PauliSum":
        """Drop imaginary parts of the coefficients."""
        return PauliSum({a: c.real for a, c in self._terms.items()}, self.n_qubits)

    def identity_coefficient(self) -> complex:
        return self._terms.get("I" * self.n_qubits, 0j)

    def matrix(self) -> np.ndarray:
        """Cached dense matrix; see :func:`to_matrix`."""
        if self._matrix is None:
            m = to_matrix(self)
            m.setflags(write=False)
            self._matrix = m
        return self._matrix

    # -- text form -----------------------------------------------------------
    def to_text(self) -> str:
        lines = []
        for a, c in self._terms.items():
            coeff = f"{c.real:+.16e}"
            if c.imag != 0.0:
                coeff += f"{c.imag:+.16e}j"
            label = PauliTerm(a).label()
            lines.append(f"{coeff} {label}".rstrip())
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, text: str, n_qubits: int) -> "PauliSum":
        terms = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            head, *ops = line.split()
            m = re.fullmatch(r"([+-][0-9.]+e[+-]\d+)(?:([+-][0-9.]+e[+-]\d+)j)?", head)
            if m is None:
                raise ValueError(f"line {lineno}: bad coefficient {head!r}")
            coeff = complex(float(m.group(1)), float(m.group(2)) if m.group(2) else 0.0)
            try:
                terms.append(PauliTerm.from_sparse(n_qubits, " ".join(ops), coeff))
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
        return cls(terms, n_qubits)


def as_pauli_sum(op) -> PauliSum:
    if isinstance(op, PauliSum):
        return op
    if isinstance(op, PauliTerm):
        return PauliSum.from_term(op)
    raise TypeError(f"expected PauliSum or PauliTerm, got {type(op).__name__}")


def commutator(a: PauliSum, b: PauliSum) -> PauliSum:
    a, b = as_pauli_sum(a), as_pauli_sum(b)
    return a * b - b * a


def commutator_norm(a: PauliSum, b: PauliSum) -> float:
    """Sum of absolute coefficients of ``ab - ba``; zero iff the operators commute."""
    return float(sum(abs(t.coeff) for t in commutator(a, b)))


def term_matrix(term: PauliTerm) -> np.ndarray:
    out = np.array([[term.coeff]], dtype=complex)
    for a in term.axes:
        out = np.kron(out, _SINGLE[a])
    return out


def to_matrix(s: PauliSum | PauliTerm) -> np.ndarray:
    """Dense ``2**n x 2**n`` matrix with qubit 0 as the leftmost Kronecker factor."""
    s = as_pauli_sum(s)
    n = s.n_qubits
    if n > MAX_DENSE_QUBITS:
        raise ValueError(f"refusing to build a dense matrix for {n} > {MAX_DENSE_QUBITS} qubits")
    dim = 1 << n
    out = np.zeros((dim, dim), dtype=complex)
    idx = np.arange(dim)
    for term in s:
        flip, phase = pauli_action(term.axes)
        # P|x> = phase[x] |x ^ flip>
        out[idx ^ flip, idx] += term.coeff * phase
    return out


def pauli_action(axes: str) -> tuple[int, np.ndarray]:
    """Bit-flip mask and per-basis-state phase of a bare Pauli string.

    For every computational basis index ``x``: ``P|x> = phase[x] |x ^ mask>``.
    """
    n = len(axes)
    idx = np.arange(1 << n)
    mask = 0
    phase = np.ones(1 << n, dtype=complex)
    for q, a in enumerate(axes):
        bit = n - 1 - q
        b = (idx >> bit) & 1
        if a in "XY":
            mask |= 1 << bit
        if a == "Z":
            phase *= 1 - 2 * b
        elif a == "Y":
            # Y|0> = i|1>, Y|1> = -i|0>
            phase *= 1j * (1 - 2 * b)
    return mask, phase
