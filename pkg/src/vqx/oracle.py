"""Exact diagonalization with (N, S_z, S^2) labels on every eigenvector."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .encoding import Observables
from .pauli import PauliSum

DEGENERACY_TOL = 1e-9
LABEL_TOL = 1e-4
ACCURACY_FLOOR = -12.0


class EmptySectorError(LookupError):
    pass


@dataclass
class SectorSpectrum:
    """Ascending eigenvalues with per-eigenvector quantum-number labels."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    number: np.ndarray
    sz: np.ndarray
    s2: np.ndarray

    def __len__(self):
        return self.eigenvalues.size

    def rows(self):
        for k in range(len(self)):
            yield k, self.eigenvalues[k], self.number[k], self.sz[k], self.s2[k]

    def select(self, n=None, sz=None, s2=None, tol: float = LABEL_TOL) -> np.ndarray:
        mask = np.ones(len(self), dtype=bool)
        for values, want in ((self.number, n), (self.sz, sz), (self.s2, s2)):
            if want is not None:
                mask &= np.abs(values - want) <= tol
        return np.flatnonzero(mask)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["index", "energy", "N", "Sz", "S2"])
            for k, e, n, sz, s2 in self.rows():
                w.writerow([k, f"{e:.12f}", f"{n:.6f}", f"{sz:.6f}", f"{s2:.6f}"])


def _split_by_values(V: np.ndarray, op: np.ndarray):
    """Rotate the columns of ``V`` to diagonalize ``op`` inside their span; group equal values."""
    sub = V.conj().T @ op @ V
    vals, W = np.linalg.eigh((sub + sub.conj().T) / 2)
    V = V @ W
    groups, start = [], 0
    for k in range(1, vals.size + 1):
        if k == vals.size or vals[k] - vals[k - 1] > 1e-8:
            groups.append(V[:, start:k])
            start = k
    return groups


def fci_spectrum(H: PauliSum, observables: Observables) -> SectorSpectrum:
    """Full eigendecomposition; degenerate levels are resolved by N, S_z and S^2."""
    if not H.is_hermitian:
        raise ValueError("fci_spectrum needs a Hermitian Hamiltonian")
    M = H.matrix()
    evals, evecs = np.linalg.eigh(M)
    ops = [observables.number.matrix(), observables.sz.matrix(), observables.s2.matrix()]
    blocks = []
    start = 0
    for k in range(1, evals.size + 1):
        if k == evals.size or evals[k] - evals[k - 1] > DEGENERACY_TOL:
            V = evecs[:, start:k]
            groups = [V]
            for op in ops:
                groups = [g for G in groups for g in _split_by_values(G, op)]
            e = float(np.mean(evals[start:k]))
            for G in groups:
                for c in range(G.shape[1]):
                    blocks.append((e, G[:, c]))
            start = k
    vecs = np.stack([v for _, v in blocks], axis=1)
    energies = np.array([e for e, _ in blocks])
    labels = [np.real(np.einsum("ik,ij,jk->k", vecs.conj(), op, vecs)) for op in ops]
    number, sz, s2 = labels
    order = np.lexsort((np.round(sz, 6), np.round(s2, 6), energies))
    return SectorSpectrum(energies[order], vecs[:, order], number[order], sz[order], s2[order])


def target_level(spectrum: SectorSpectrum, n=None, sz=None, s2=None, rank: int = 0) -> float:
    """``rank``-th lowest eigenvalue whose labels match the given quantum numbers."""
    idx = spectrum.select(n, sz, s2)
    if idx.size <= rank:
        raise EmptySectorError(f"no level of rank {rank} with N={n}, Sz={sz}, S2={s2}")
    return float(spectrum.eigenvalues[idx[rank]])


def accuracy(energy: float, reference: float) -> float:
    """``log10 |E - E_ref|`` clamped below at -12."""
    diff = abs(energy - reference)
    if diff <= 10.0**ACCURACY_FLOOR:
        return ACCURACY_FLOOR
    return max(ACCURACY_FLOOR, math.log10(diff))


def export_spectrum(spectrum: SectorSpectrum, path) -> Path:
    path = Path(path)
    spectrum.to_csv(path)
    return path
