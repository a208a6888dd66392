"""STO-3G integrals for two-atom H/He systems and the spin-orbital Hamiltonian data.

Everything here is in atomic units (Bohr, Hartree) except
:meth:`Geometry.diatomic`, which takes the bond length in Angstrom.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import erf

logger = logging.getLogger(__name__)

ANGSTROM_TO_BOHR = 1.8897259886
ATOMIC_NUMBER = {"H": 1, "He": 2}

# Contracted 1s STO-3G: exponents already scaled by zeta**2 (zeta_H = 1.24,
# zeta_He = 2.0925); coefficients refer to normalized primitives.
_STO3G_COEFFS = (0.15432897, 0.53532814, 0.44463454)
_STO3G_EXPONENTS = {
    "H": (3.42525091, 0.62391373, 0.16885540),
    "He": (6.36242139, 1.15892300, 0.31364979),
}


class SCFConvergenceError(RuntimeError):
    pass


class FCIDumpError(ValueError):
    pass


@dataclass(frozen=True)
class Geometry:
    """Two atoms with positions in Bohr.

    Attributes:
        atoms: ``(element, (x, y, z))`` pairs.
        charge: net molecular charge.
        multiplicity: 2S+1, informational only.
    """

    atoms: tuple
    charge: int = 0
    multiplicity: int = 1

    def __post_init__(self):
        atoms = tuple((el, tuple(float(x) for x in pos)) for el, pos in self.atoms)
        if len(atoms) != 2:
            raise ValueError(f"expected exactly 2 atoms, got {len(atoms)}")
        for el, pos in atoms:
            if el not in ATOMIC_NUMBER:
                raise ValueError(f"unsupported element {el!r}; only H and He")
            if len(pos) != 3:
                raise ValueError("positions must be 3-vectors")
        object.__setattr__(self, "atoms", atoms)
        if self.n_electrons < 1:
            raise ValueError("geometry has no electrons")

    @classmethod
    def diatomic(cls, a: str, b: str, r_angstrom: float, charge: int = 0, multiplicity: int | None = None):
        """Place ``a`` at the origin and ``b`` on the z axis, ``r_angstrom`` away."""
        if r_angstrom <= 0:
            raise ValueError("bond length must be positive")
        for el in (a, b):
            if el not in ATOMIC_NUMBER:
                raise ValueError(f"unsupported element {el!r}; only H and He")
        r = r_angstrom * ANGSTROM_TO_BOHR
        n_el = ATOMIC_NUMBER[a] + ATOMIC_NUMBER[b] - charge
        if multiplicity is None:
            multiplicity = 1 + n_el % 2
        return cls(((a, (0.0, 0.0, 0.0)), (b, (0.0, 0.0, r))), charge, multiplicity)

    @classmethod
    def from_json(cls, source) -> "Geometry":
        """Parse ``{"atoms": [["H", [x, y, z]], ...], "charge": 0, "multiplicity": 2}`` (Bohr)."""
        data = json.loads(Path(source).read_text()) if not isinstance(source, dict) else source
        atoms = []
        for item in data["atoms"]:
            if isinstance(item, dict):
                atoms.append((item["element"], item["position"]))
            else:
                atoms.append((item[0], item[1]))
        return cls(tuple(atoms), int(data.get("charge", 0)), int(data.get("multiplicity", 1)))

    @property
    def n_electrons(self) -> int:
        return sum(ATOMIC_NUMBER[el] for el, _ in self.atoms) - self.charge

    @property
    def positions(self) -> np.ndarray:
        return np.array([pos for _, pos in self.atoms])

    @property
    def charges(self) -> np.ndarray:
        return np.array([ATOMIC_NUMBER[el] for el, _ in self.atoms], dtype=float)

    def translated(self, shift) -> "Geometry":
        shift = np.asarray(shift, dtype=float)
        atoms = tuple((el, tuple(np.asarray(pos) + shift)) for el, pos in self.atoms)
        return Geometry(atoms, self.charge, self.multiplicity)


def sto3g_basis(element: str) -> list[tuple[float, float]]:
    """(exponent, coefficient) pairs of the contracted 1s function.

    Coefficients multiply *normalized* primitives; the contraction is
    renormalized so the self-overlap is exactly one.
    """
    if element not in _STO3G_EXPONENTS:
        raise ValueError(f"no STO-3G data for {element!r}")
    alphas = np.array(_STO3G_EXPONENTS[element])
    coeffs = np.array(_STO3G_COEFFS)
    s = 0.0
    for a, ca in zip(alphas, coeffs):
        for b, cb in zip(alphas, coeffs):
            s += ca * cb * _prim_norm(a) * _prim_norm(b) * (np.pi / (a + b)) ** 1.5
    coeffs = coeffs / np.sqrt(s)
    return [(float(a), float(c)) for a, c in zip(alphas, coeffs)]


def _prim_norm(alpha: float) -> float:
    return (2.0 * alpha / np.pi) ** 0.75


def boys0(x):
    """Zeroth Boys function F0(x) = 1/2 sqrt(pi/x) erf(sqrt(x)), F0(0) = 1."""
    x = np.asarray(x, dtype=float)
    small = x < 1e-8
    safe = np.where(small, 1.0, x)
    big = 0.5 * np.sqrt(np.pi / safe) * erf(np.sqrt(safe))
    out = np.where(small, 1.0 - x / 3.0, big)
    return out if out.ndim else float(out)


@dataclass
class AOIntegrals:
    """Integrals over the two contracted 1s functions.

    ``eri`` is in chemists' notation ``(ij|kl)``.
    """

    S: np.ndarray
    T: np.ndarray
    V: np.ndarray
    eri: np.ndarray
    e_nuc: float

    @property
    def hcore(self) -> np.ndarray:
        return self.T + self.V

    def __iter__(self):
        return iter((self.S, self.T, self.V, self.eri, self.e_nuc))


def _shells(g: Geometry):
    return [(np.asarray(pos), sto3g_basis(el)) for el, pos in g.atoms]


def nuclear_repulsion(g: Geometry) -> float:
    (za, zb), (ra, rb) = g.charges, g.positions
    return float(za * zb / np.linalg.norm(ra - rb))


def ao_integrals(g: Geometry) -> AOIntegrals:
    """Closed-form s-Gaussian integrals (Boys F0 for the Coulomb terms)."""
    shells = _shells(g)
    nuclei = list(zip(g.charges, g.positions))
    n = len(shells)
    S = np.zeros((n, n))
    T = np.zeros((n, n))
    V = np.zeros((n, n))
    for i, (A, pa) in enumerate(shells):
        for j, (B, pb) in enumerate(shells):
            ab2 = float(np.dot(A - B, A - B))
            for a, ca in pa:
                for b, cb in pb:
                    c = ca * cb * _prim_norm(a) * _prim_norm(b)
                    p = a + b
                    mu = a * b / p
                    P = (a * A + b * B) / p
                    s = (np.pi / p) ** 1.5 * np.exp(-mu * ab2)
                    S[i, j] += c * s
                    T[i, j] += c * mu * (3.0 - 2.0 * mu * ab2) * s
                    for Z, C in nuclei:
                        pc2 = float(np.dot(P - C, P - C))
                        V[i, j] += -c * Z * 2.0 * np.pi / p * np.exp(-mu * ab2) * boys0(p * pc2)
    eri = np.zeros((n, n, n, n))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    eri[i, j, k, l] = _eri_contracted(shells[i], shells[j], shells[k], shells[l])
    return AOIntegrals(S, T, V, eri, nuclear_repulsion(g))


def _eri_contracted(sa, sb, sc, sd) -> float:
    (A, pa), (B, pb), (C, pc), (D, pd) = sa, sb, sc, sd
    ab2 = float(np.dot(A - B, A - B))
    cd2 = float(np.dot(C - D, C - D))
    total = 0.0
    for a, ca in pa:
        for b, cb in pb:
            p = a + b
            P = (a * A + b * B) / p
            kab = np.exp(-a * b / p * ab2)
            for c, cc in pc:
                for d, cd in pd:
                    q = c + d
                    Q = (c * C + d * D) / q
                    kcd = np.exp(-c * d / q * cd2)
                    pq2 = float(np.dot(P - Q, P - Q))
                    norm = ca * cb * cc * cd * _prim_norm(a) * _prim_norm(b) * _prim_norm(c) * _prim_norm(d)
                    val = 2.0 * np.pi**2.5 / (p * q * np.sqrt(p + q)) * kab * kcd * boys0(p * q / (p + q) * pq2)
                    total += norm * val
    return total


@dataclass
class SCFResult:
    C: np.ndarray
    orbital_energies: np.ndarray
    energy: float | None = None
    history: list = field(default_factory=list)


def _fix_signs(C: np.ndarray) -> np.ndarray:
    C = C.copy()
    for k in range(C.shape[1]):
        j = np.argmax(np.abs(C[:, k]))
        if C[j, k] < 0:
            C[:, k] *= -1
    return C


def rhf(ints: AOIntegrals, n_electrons: int, max_iter: int = 200, tol: float = 1e-10) -> SCFResult:
    """Restricted Hartree-Fock by plain Roothaan iteration from the core guess."""
    if n_electrons % 2:
        raise ValueError("RHF needs an even electron count")
    S, h, eri = ints.S, ints.hcore, ints.eri
    s_val, s_vec = np.linalg.eigh(S)
    X = s_vec @ np.diag(s_val**-0.5) @ s_vec.T
    nocc = n_electrons // 2
    D = np.zeros_like(S)
    history = []
    for it in range(max_iter):
        J = np.einsum("ijkl,kl->ij", eri, D)
        K = np.einsum("ikjl,kl->ij", eri, D)
        F = h + 2.0 * J - K
        e_elec = float(np.sum(D * (h + F)))
        history.append(e_elec + ints.e_nuc)
        eps, Cp = np.linalg.eigh(X.T @ F @ X)
        C = X @ Cp
        D_new = C[:, :nocc] @ C[:, :nocc].T
        delta = np.max(np.abs(D_new - D))
        D = D_new
        logger.debug("SCF iter %d: E=%.12f dD=%.3e", it, history[-1], delta)
        if delta < tol and it > 0:
            break
    else:
        raise SCFConvergenceError(f"SCF did not converge in {max_iter} iterations")
    J = np.einsum("ijkl,kl->ij", eri, D)
    K = np.einsum("ikjl,kl->ij", eri, D)
    F = h + 2.0 * J - K
    energy = float(np.sum(D * (h + F))) + ints.e_nuc
    return SCFResult(_fix_signs(C), eps, energy, history)


def core_orbitals(ints: AOIntegrals) -> SCFResult:
    """Core-Hamiltonian orbitals in the Loewdin-orthogonalized AO basis."""
    s_val, s_vec = np.linalg.eigh(ints.S)
    X = s_vec @ np.diag(s_val**-0.5) @ s_vec.T
    eps, Cp = np.linalg.eigh(X @ ints.hcore @ X)
    return SCFResult(_fix_signs(X @ Cp), eps)


def reference_orbitals(g: Geometry, ints: AOIntegrals | None = None) -> SCFResult:
    """RHF orbitals for closed shells, core-Hamiltonian orbitals otherwise."""
    ints = ao_integrals(g) if ints is None else ints
    if g.n_electrons % 2 == 0:
        return rhf(ints, g.n_electrons)
    return core_orbitals(ints)


@dataclass
class MolecularProblem:
    """Second-quantized Hamiltonian data over spin orbitals.

    Spin orbitals are interleaved ``(0a, 0b, 1a, 1b, ...)``.  ``h`` holds
    the one-body integrals and ``g`` the antisymmetrized physicists'
    integrals ``<pq||rs> = <pq|rs> - <pq|sr>``, so that

        H = sum h[p,q] a+_p a_q + 1/4 sum g[p,q,r,s] a+_p a+_q a_s a_r + e_nuc.
    """

    h: np.ndarray
    g: np.ndarray
    e_nuc: float
    n_electrons: int
    ordering: str = "interleaved"
    convention: str = "physicist-antisymmetrized"
    scf_energy: float | None = None
    orbital_energies: np.ndarray | None = None

    @property
    def n_spin_orbitals(self) -> int:
        return self.h.shape[0]

    @property
    def n_spatial(self) -> int:
        return self.n_spin_orbitals // 2

    def spatial_integrals(self) -> tuple[np.ndarray, np.ndarray]:
        """Recover spatial ``h`` and chemists' ``(pq|rs)`` from the spin-orbital data."""
        n = self.n_spatial
        h = self.h[0::2, 0::2].copy()
        eri = np.zeros((n, n, n, n))
        for p in range(n):
            for q in range(n):
                for r in range(n):
                    for s in range(n):
                        # <p_a r_b || q_a s_b> = <pr|qs> = (pq|rs)
                        eri[p, q, r, s] = self.g[2 * p, 2 * r + 1, 2 * q, 2 * s + 1]
        return h, eri


def spin_orbital_coefficients(h_mo: np.ndarray, eri_mo: np.ndarray, e_nuc: float, n_electrons: int,
                              **extra) -> MolecularProblem:
    """Expand spatial MO integrals (chemists' notation) to interleaved spin orbitals."""
    n = h_mo.shape[0]
    ns = 2 * n
    spatial = np.arange(ns) // 2
    spin = np.arange(ns) % 2
    same = spin[:, None] == spin[None, :]
    h = np.where(same, h_mo[np.ix_(spatial, spatial)], 0.0)
    # <pq|rs> = (pr|qs) delta(sp, sr) delta(sq, ss)
    phys = eri_mo[np.ix_(spatial, spatial, spatial, spatial)].transpose(0, 2, 1, 3)
    phys = phys * same[:, None, :, None] * same[None, :, None, :]
    g = phys - phys.transpose(0, 1, 3, 2)
    return MolecularProblem(h, g, float(e_nuc), int(n_electrons), **extra)


def molecular_problem(g: Geometry) -> MolecularProblem:
    """Integrals, reference orbitals and spin-orbital data in one call."""
    ints = ao_integrals(g)
    orb = reference_orbitals(g, ints)
    C = orb.C
    h_mo = C.T @ ints.hcore @ C
    eri_mo = np.einsum("pi,qj,rk,sl,pqrs->ijkl", C, C, C, C, ints.eri)
    return spin_orbital_coefficients(h_mo, eri_mo, ints.e_nuc, g.n_electrons,
                                     scf_energy=orb.energy, orbital_energies=orb.orbital_energies)


_HEADER_RE = re.compile(r"&FCI(.*?)(&END|/)", re.S | re.I)


def load_fcidump(path) -> MolecularProblem:
    """Read a FCIDUMP file (1-based chemists' integrals, ``i j 0 0`` one-body, ``0 0 0 0`` core)."""
    text = Path(path).read_text()
    m = _HEADER_RE.search(text)
    if m is None:
        raise FCIDumpError("line 1: missing &FCI ... &END header")
    header = m.group(1)
    fields = dict((k.upper(), v) for k, v in re.findall(r"(\w+)\s*=\s*([^=]*?)(?=,?\s*\w+\s*=|$)", header.strip()))
    try:
        norb = int(fields["NORB"].strip(", "))
        nelec = int(fields["NELEC"].strip(", "))
    except (KeyError, ValueError):
        raise FCIDumpError("line 1: header needs NORB and NELEC") from None
    h = np.zeros((norb, norb))
    eri = np.zeros((norb, norb, norb, norb))
    e_core = 0.0
    body_start = text[: m.end()].count("\n") + 1
    for lineno, line in enumerate(text[m.end():].splitlines(), body_start):
        parts = line.split()
        if not parts:
            continue
        if len(parts) != 5:
            raise FCIDumpError(f"line {lineno}: expected 'value i j k l', got {line.strip()!r}")
        try:
            val = float(parts[0].replace("D", "E").replace("d", "e"))
            i, j, k, l = (int(x) for x in parts[1:])
        except ValueError:
            raise FCIDumpError(f"line {lineno}: cannot parse {line.strip()!r}") from None
        if max(i, j, k, l) > norb or min(i, j, k, l) < 0:
            raise FCIDumpError(f"line {lineno}: orbital index exceeds NORB={norb}")
        if i == j == k == l == 0:
            e_core = val
        elif k == l == 0:
            h[i - 1, j - 1] = h[j - 1, i - 1] = val
        elif 0 in (i, j, k, l):
            raise FCIDumpError(f"line {lineno}: malformed index pattern {i} {j} {k} {l}")
        else:
            i, j, k, l = i - 1, j - 1, k - 1, l - 1
            for a, b, c, d in ((i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k),
                               (k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i)):
                eri[a, b, c, d] = val
    return spin_orbital_coefficients(h, eri, e_core, nelec)


def write_fcidump(problem: MolecularProblem, path, tol: float = 0.0) -> None:
    h, eri = problem.spatial_integrals()
    n = h.shape[0]
    ms2 = problem.n_electrons % 2
    lines = [f"&FCI NORB={n},NELEC={problem.n_electrons},MS2={ms2},",
             "  ORBSYM=" + ",".join("1" * n) + ",", "  ISYM=1,", "&END"]
    for i in range(n):
        for j in range(i + 1):
            for k in range(n):
                for l in range(k + 1):
                    if i * (i + 1) // 2 + j < k * (k + 1) // 2 + l:
                        continue
                    v = eri[i, j, k, l]
                    if abs(v) > tol:
                        lines.append(f"{float(v)!r:>24} {i + 1} {j + 1} {k + 1} {l + 1}")
    for i in range(n):
        for j in range(i + 1):
            if abs(h[i, j]) > tol:
                lines.append(f"{float(h[i, j])!r:>24} {i + 1} {j + 1} 0 0")
    lines.append(f"{float(problem.e_nuc)!r:>24} 0 0 0 0")
    Path(path).write_text("\n".join(lines) + "\n")
