"""Molecule presets, target states and the numbered experiment cases.

Target states are given as occupation-number kets over interleaved spin
orbitals (0a, 0b, 1a, 1b) and encoded on demand.  Under Bravyi-Kitaev the
H2 kets ``1100, 0110, 1001, 0011`` become ``1000, 0110, 1100, 0010``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .integrals import Geometry


@dataclass(frozen=True)
class TargetState:
    """One state to solve for.

    Attributes:
        label: legend name.
        occupation: reference occupation ket.
        constraints: ``(observable, target)`` pairs used when constraints are on.
        sector: ``(N, S_z, S^2, rank)`` locating the exact reference level;
            ``None`` entries are wildcards.
    """

    label: str
    occupation: str
    constraints: tuple = ()
    sector: tuple = (None, None, None, 0)

    @property
    def n_electrons(self) -> int:
        return self.occupation.count("1")

    @property
    def sz(self) -> float:
        return 0.5 * sum(1 if i % 2 == 0 else -1 for i, c in enumerate(self.occupation) if c == "1")


@dataclass(frozen=True)
class MoleculePreset:
    name: str
    atoms: tuple[str, str]
    charge: int
    states: tuple[TargetState, ...]
    tabu: tuple
    grid: tuple[float, float, float]
    groups: tuple[tuple[int, ...], ...] = ((0, 1), (2, 3))

    def geometry(self, r_angstrom: float) -> Geometry:
        return Geometry.diatomic(*self.atoms, r_angstrom, charge=self.charge)

    def default_bond_lengths(self) -> list[float]:
        lo, hi, step = self.grid
        return bond_length_grid(lo, hi, step)


def bond_length_grid(r_min: float, r_max: float, step: float) -> list[float]:
    if step <= 0 or r_max < r_min:
        raise ValueError("need r_min <= r_max and step > 0")
    n = int(np.floor((r_max - r_min) / step + 1e-9)) + 1
    return [round(r_min + k * step, 10) for k in range(n)]


H2 = MoleculePreset(
    name="H2",
    atoms=("H", "H"),
    charge=0,
    states=(
        TargetState("ground", "1100", (("S2", 0.0), ("Sz", 0.0), ("N", 2.0)), (2, 0.0, 0.0, 0)),
        TargetState("triplet", "0110", (("S2", 2.0), ("Sz", 0.0), ("N", 2.0)), (2, 0.0, 2.0, 0)),
        TargetState("singlet", "1001", (("S2", 0.0), ("Sz", 0.0), ("N", 2.0)), (2, 0.0, 0.0, 1)),
        TargetState("doubly", "0011", (("S2", 0.0), ("Sz", 0.0), ("N", 2.0)), (2, 0.0, 0.0, 2)),
    ),
    tabu=(("S2", 0.75), ("Sz", 10000.0), ("N", 10000.0)),
    grid=(0.3, 2.0, 0.1),
)

HEH = MoleculePreset(
    name="HeH",
    atoms=("He", "H"),
    charge=0,
    states=(
        TargetState("ground 1", "1110", (("N", 3.0), ("Sz", 0.5)), (3, 0.5, None, 0)),
        TargetState("ground 2", "1101", (("N", 3.0), ("Sz", -0.5)), (3, -0.5, None, 0)),
        TargetState("excited 1", "1011", (("N", 3.0), ("Sz", 0.5)), (3, 0.5, None, 1)),
        TargetState("excited 2", "0111", (("N", 3.0), ("Sz", -0.5)), (3, -0.5, None, 1)),
    ),
    tabu=(("N", 10000.0),),
    grid=(0.5, 2.0, 0.1),
)

MOLECULES = {"H2": H2, "HeH": HEH}


def get_molecule(name: str) -> MoleculePreset:
    try:
        return MOLECULES[name]
    except KeyError:
        raise ValueError(f"unknown molecule {name!r}; choose from {sorted(MOLECULES)}") from None


@dataclass(frozen=True)
class Case:
    case_id: int
    molecule: str
    method: str
    constraints: bool
    tabu: bool

    @property
    def title(self) -> str:
        parts = ["constrained " if self.constraints else "", self.method.upper()]
        if self.tabu:
            parts.append(" with tabu")
        return f"({self.case_id}) {self.molecule} {''.join(parts)}"


_VARIANTS = ((False, False), (True, False), (True, True))

CASES: dict[int, Case] = {}
for _m, _mol in enumerate(("H2", "HeH")):
    for _k, _method in enumerate(("vqe", "ssvqe")):
        for _v, (_c, _t) in enumerate(_VARIANTS):
            _id = 6 * _m + 3 * _k + _v + 1
            CASES[_id] = Case(_id, _mol, _method, _c, _t)


def case_id(molecule: str, method: str, constraints: bool, tabu: bool) -> int:
    for c in CASES.values():
        if (c.molecule, c.method, c.constraints, c.tabu) == (molecule, method, bool(constraints), bool(tabu)):
            return c.case_id
    raise ValueError(f"no numbered case for {molecule}/{method} constraints={constraints} tabu={tabu}")


def get_case(cid: int) -> Case:
    try:
        return CASES[int(cid)]
    except KeyError:
        raise ValueError(f"case id must be 1..12, got {cid}") from None
