"""Independent reference implementations used only by the tests.

The integral oracle never touches the Boys function: overlap and kinetic
integrals are 1-D quadratures of separable Gaussians, and the Coulomb
integrals use ``1/r = 2/sqrt(pi) * int_0^inf exp(-t^2 r^2) dt`` with the
Gaussian spatial part done in closed form and the ``t`` integral by
quadrature.
"""

from __future__ import annotations

import itertools

import numpy as np
from scipy.integrate import quad
from scipy.linalg import eigh

STO3G = {
    "H": ([3.42525091, 0.62391373, 0.16885540], [0.15432897, 0.53532814, 0.44463454]),
    "He": ([6.36242139, 1.15892300, 0.31364979], [0.15432897, 0.53532814, 0.44463454]),
}
Z = {"H": 1.0, "He": 2.0}


def _prims(el):
    alphas, ds = STO3G[el]
    return [(a, d * (2 * a / np.pi) ** 0.75) for a, d in zip(alphas, ds)]


def _gauss_1d(a, x0):
    return lambda x: np.exp(-a * (x - x0) ** 2)


def _overlap_1d(a, A, b, B):
    lo, hi = min(A, B) - 12, max(A, B) + 12
    return quad(lambda x: _gauss_1d(a, A)(x) * _gauss_1d(b, B)(x), lo, hi, epsabs=1e-14, epsrel=1e-12)[0]


def _kinetic_1d(a, A, b, B):
    # 1/2 int g_a' g_b' dx
    lo, hi = min(A, B) - 12, max(A, B) + 12
    f = lambda x: (-2 * a * (x - A)) * np.exp(-a * (x - A) ** 2) * (-2 * b * (x - B)) * np.exp(-b * (x - B) ** 2)  # noqa: E731
    return 0.5 * quad(f, lo, hi, epsabs=1e-14, epsrel=1e-12)[0]


def _prim_overlap(a, A, b, B):
    return np.prod([_overlap_1d(a, A[k], b, B[k]) for k in range(3)])


def _prim_kinetic(a, A, b, B):
    s = [_overlap_1d(a, A[k], b, B[k]) for k in range(3)]
    t = [_kinetic_1d(a, A[k], b, B[k]) for k in range(3)]
    return t[0] * s[1] * s[2] + s[0] * t[1] * s[2] + s[0] * s[1] * t[2]


def _product(a, A, b, B):
    p = a + b
    P = (a * A + b * B) / p
    K = np.exp(-a * b / p * np.sum((A - B) ** 2))
    return p, P, K


def _prim_nuclear(a, A, b, B, C):
    p, P, K = _product(a, A, b, B)
    d2 = np.sum((P - C) ** 2)

    def f(t):
        s = p + t * t
        return (np.pi / s) ** 1.5 * np.exp(-p * t * t / s * d2)

    return -2 / np.sqrt(np.pi) * K * quad(f, 0, np.inf, epsabs=1e-14, epsrel=1e-12, limit=200)[0]


def _prim_eri(pa, pb, pc, pd):
    p, P, K1 = _product(*pa, *pb)
    q, Q, K2 = _product(*pc, *pd)
    d2 = np.sum((P - Q) ** 2)

    def f(t):
        s = p * q + (p + q) * t * t
        return (np.pi**2 / s) ** 1.5 * np.exp(-p * q * t * t / s * d2)

    return 2 / np.sqrt(np.pi) * K1 * K2 * quad(f, 0, np.inf, epsabs=1e-14, epsrel=1e-12, limit=200)[0]


def quadrature_integrals(elements, positions_bohr):
    """S, T, V, chemists' ERI and nuclear repulsion for s-only STO-3G."""
    pos = [np.asarray(p, dtype=float) for p in positions_bohr]
    basis = [[(a, c, pos[i]) for a, c in _prims(el)] for i, el in enumerate(elements)]
    # renormalize each contraction
    for mu, bf in enumerate(basis):
        s = sum(ci * cj * _prim_overlap(ai, Ai, aj, Aj) for ai, ci, Ai in bf for aj, cj, Aj in bf)
        basis[mu] = [(a, c / np.sqrt(s), A) for a, c, A in bf]
    n = len(basis)
    S, T, V = (np.zeros((n, n)) for _ in range(3))
    for i, j in itertools.product(range(n), repeat=2):
        for (a, ca, A), (b, cb, B) in itertools.product(basis[i], basis[j]):
            S[i, j] += ca * cb * _prim_overlap(a, A, b, B)
            T[i, j] += ca * cb * _prim_kinetic(a, A, b, B)
            for el, C in zip(elements, pos):
                V[i, j] += Z[el] * ca * cb * _prim_nuclear(a, A, b, B, C)
    eri = np.zeros((n,) * 4)
    for i, j, k, l in itertools.product(range(n), repeat=4):
        if eri[i, j, k, l]:
            continue
        val = sum(ca * cb * cc * cd * _prim_eri((a, A), (b, B), (c, Cc), (d, D))
                  for (a, ca, A), (b, cb, B), (c, cc, Cc), (d, cd, D)
                  in itertools.product(basis[i], basis[j], basis[k], basis[l]))
        for perm in {(i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k),
                     (k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i)}:
            eri[perm] = val
    e_nuc = Z[elements[0]] * Z[elements[1]] / np.linalg.norm(pos[0] - pos[1])
    return S, T, V, eri, e_nuc


def textbook_rhf(S, H, eri, n_occ, e_nuc, iters=500):
    """Plain Roothaan iterations from the core guess (Szabo and Ostlund procedure)."""
    _, C = eigh(H, S)
    E_old = np.inf
    for _ in range(iters):
        D = 2 * C[:, :n_occ] @ C[:, :n_occ].T
        F = H + np.einsum("ls,mnsl->mn", D, eri) - 0.5 * np.einsum("ls,mlsn->mn", D, eri)
        eps, C = eigh(F, S)
        E = 0.5 * np.sum(D * (H + F)) + e_nuc
        if abs(E - E_old) < 1e-13:
            break
        E_old = E
    return E, eps, C


def h2_two_by_two_fci(S, H, eri, e_nuc):
    """FCI for two electrons in two orbitals: the singlet 2x2 CI in the RHF orbitals."""
    E_hf, _, C = textbook_rhf(S, H, eri, 1, e_nuc)
    h = C.T @ H @ C
    g = np.einsum("pi,qj,rk,sl,pqrs->ijkl", C, C, C, C, eri)
    e11 = 2 * h[0, 0] + g[0, 0, 0, 0]
    e22 = 2 * h[1, 1] + g[1, 1, 1, 1]
    k12 = g[0, 1, 0, 1]
    ci = np.array([[e11, k12], [k12, e22]])
    return np.linalg.eigvalsh(ci)[0] + e_nuc, E_hf


def fock_space_matrix(h_so, g_so, e_nuc):
    """Dense Hamiltonian in the occupation basis via explicit creation/annihilation on bit strings.

    ``g_so`` uses the physicists' antisymmetrized convention with
    ``H = sum h a+_p a_q + 1/4 sum g_pqrs a+_p a+_q a_s a_r``.  Mode 0 is the
    most significant bit.
    """
    n = h_so.shape[0]
    dim = 1 << n

    def apply(ops, state):
        # ops applied right to left; returns (sign, new_state) or None
        sign = 1
        for mode, dag in reversed(ops):
            bit = 1 << (n - 1 - mode)
            occ = bool(state & bit)
            if occ == dag:
                return None
            # parity of occupied modes before `mode`
            before = bin(state >> (n - mode)).count("1")
            sign *= -1 if before % 2 else 1
            state ^= bit
        return sign, state

    M = np.zeros((dim, dim))
    for x in range(dim):
        M[x, x] += e_nuc
        for p, q in itertools.product(range(n), repeat=2):
            if h_so[p, q] != 0:
                r = apply([(p, True), (q, False)], x)
                if r:
                    M[r[1], x] += r[0] * h_so[p, q]
        for p, q, r_, s in itertools.product(range(n), repeat=4):
            if g_so[p, q, r_, s] != 0:
                r = apply([(p, True), (q, True), (s, False), (r_, False)], x)
                if r:
                    M[r[1], x] += 0.25 * r[0] * g_so[p, q, r_, s]
    return M
