"""Input checks shared by the estimators."""

from __future__ import annotations

import numpy as np
from sklearn.exceptions import NotFittedError as _SkNotFitted

from .encoding import ENCODINGS
from .integrals import MolecularProblem
from .pauli import PauliSum
from .simulator import StateVector


class NotFittedError(_SkNotFitted):
    """Raised when a solver is used before ``fit``."""


def check_is_fitted(estimator, attributes=("energies_",)):
    if not all(hasattr(estimator, a) for a in attributes):
        raise NotFittedError(f"{type(estimator).__name__} is not fitted yet; call fit first")


def check_encoding(encoding: str) -> str:
    if encoding not in ENCODINGS:
        raise ValueError(f"encoding must be one of {ENCODINGS}, got {encoding!r}")
    return encoding


def check_hamiltonian(H) -> PauliSum:
    if not isinstance(H, PauliSum):
        raise TypeError(f"expected a PauliSum Hamiltonian, got {type(H).__name__}")
    if not H.is_hermitian:
        raise ValueError("Hamiltonian must be Hermitian")
    return H


def check_problem(X):
    """Accept a :class:`MolecularProblem` or a Hermitian :class:`PauliSum`."""
    if isinstance(X, MolecularProblem):
        if X.n_spin_orbitals % 2:
            raise ValueError("spin-orbital count must be even")
        return X
    return check_hamiltonian(X)


def check_occupation(occ: str, n: int) -> str:
    if len(occ) != n or set(occ) - {"0", "1"}:
        raise ValueError(f"occupation {occ!r} is not a {n}-mode bit string")
    return occ


def check_parameters(theta, k: int) -> np.ndarray:
    theta = np.asarray(theta, dtype=float).ravel()
    if theta.size != k:
        raise ValueError(f"expected {k} parameters, got {theta.size}")
    if not np.all(np.isfinite(theta)):
        raise ValueError("parameters must be finite")
    return theta


def check_state(s, n: int | None = None) -> StateVector:
    if not isinstance(s, StateVector):
        s = StateVector(s)
    if n is not None and s.n_qubits != n:
        raise ValueError(f"state has {s.n_qubits} qubits, expected {n}")
    return s
