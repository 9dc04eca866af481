"""Generate the shipped FCIDUMP fixtures (H2, H4 chain, LiH, STO-3G).

Self-contained Gaussian integral engine (McMurchie-Davidson Hermite
expansion, Boys function via 1F1) plus a small RHF with DIIS, then a
4-index MO transform and FCIDUMP emission through fastvqe.hamio.

Run from the repository root:

    python3 scripts/make_fixtures.py

Offline tooling only; the package itself never computes integrals.
"""

from __future__ import annotations

import math
import os
import sys

import numpy as np
from scipy.special import hyp1f1

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from fastvqe.hamio import MolecularIntegrals, write_fcidump  # noqa: E402

ANGSTROM = 1.8897259886  # Bohr per Angstrom

# STO-3G contractions (exponents already zeta-scaled)
H_1S = ([3.42525091, 0.62391373, 0.16885540], [0.15432897, 0.53532814, 0.44463454])
LI_1S = ([16.1195750, 2.9362007, 0.7946505], [0.15432897, 0.53532814, 0.44463454])
LI_2SP_EXP = [0.6362897, 0.1478601, 0.0480887]
LI_2S_C = [-0.09996723, 0.39951283, 0.70011547]
LI_2P_C = [0.15591627, 0.60768372, 0.39195739]


def boys(n: int, x: float) -> float:
    return hyp1f1(n + 0.5, n + 1.5, -x) / (2.0 * n + 1.0)


def hermite_e(i: int, j: int, t: int, q_dist: float, a: float, b: float) -> float:
    """Hermite expansion coefficient E_t^{ij} for a Gaussian product."""
    p = a + b
    mu = a * b / p
    if t < 0 or t > i + j:
        return 0.0
    if i == j == t == 0:
        return math.exp(-mu * q_dist * q_dist)
    if j == 0:
        return (
            hermite_e(i - 1, j, t - 1, q_dist, a, b) / (2 * p)
            - mu * q_dist / a * hermite_e(i - 1, j, t, q_dist, a, b)
            + (t + 1) * hermite_e(i - 1, j, t + 1, q_dist, a, b)
        )
    return (
        hermite_e(i, j - 1, t - 1, q_dist, a, b) / (2 * p)
        + mu * q_dist / b * hermite_e(i, j - 1, t, q_dist, a, b)
        + (t + 1) * hermite_e(i, j - 1, t + 1, q_dist, a, b)
    )


def overlap_prim(a, lmn1, ca, b, lmn2, cb) -> float:
    p = a + b
    s = 1.0
    for axis in range(3):
        s *= hermite_e(lmn1[axis], lmn2[axis], 0, ca[axis] - cb[axis], a, b)
    return s * (math.pi / p) ** 1.5


def kinetic_prim(a, lmn1, ca, b, lmn2, cb) -> float:
    l2, m2, n2 = lmn2

    def s(dl, dm, dn):
        lmn = (l2 + dl, m2 + dm, n2 + dn)
        if min(lmn) < 0:
            return 0.0
        return overlap_prim(a, lmn1, ca, b, lmn, cb)

    term0 = b * (2 * (l2 + m2 + n2) + 3) * s(0, 0, 0)
    term1 = -2.0 * b * b * (s(2, 0, 0) + s(0, 2, 0) + s(0, 0, 2))
    term2 = -0.5 * (
        l2 * (l2 - 1) * s(-2, 0, 0) + m2 * (m2 - 1) * s(0, -2, 0) + n2 * (n2 - 1) * s(0, 0, -2)
    )
    return term0 + term1 + term2


def hermite_coulomb(t, u, v, n, p, pc, r2) -> float:
    if t == u == v == 0:
        return (-2.0 * p) ** n * boys(n, p * r2)
    if t == 0 and u == 0:
        val = pc[2] * hermite_coulomb(t, u, v - 1, n + 1, p, pc, r2)
        if v > 1:
            val += (v - 1) * hermite_coulomb(t, u, v - 2, n + 1, p, pc, r2)
        return val
    if t == 0:
        val = pc[1] * hermite_coulomb(t, u - 1, v, n + 1, p, pc, r2)
        if u > 1:
            val += (u - 1) * hermite_coulomb(t, u - 2, v, n + 1, p, pc, r2)
        return val
    val = pc[0] * hermite_coulomb(t - 1, u, v, n + 1, p, pc, r2)
    if t > 1:
        val += (t - 1) * hermite_coulomb(t - 2, u, v, n + 1, p, pc, r2)
    return val


def nuclear_prim(a, lmn1, ca, b, lmn2, cb, nucleus) -> float:
    p = a + b
    cp = (a * ca + b * cb) / p
    pc = cp - nucleus
    r2 = float(pc @ pc)
    val = 0.0
    for t in range(lmn1[0] + lmn2[0] + 1):
        et = hermite_e(lmn1[0], lmn2[0], t, ca[0] - cb[0], a, b)
        for u in range(lmn1[1] + lmn2[1] + 1):
            eu = hermite_e(lmn1[1], lmn2[1], u, ca[1] - cb[1], a, b)
            for v in range(lmn1[2] + lmn2[2] + 1):
                ev = hermite_e(lmn1[2], lmn2[2], v, ca[2] - cb[2], a, b)
                val += et * eu * ev * hermite_coulomb(t, u, v, 0, p, pc, r2)
    return 2.0 * math.pi / p * val


def eri_prim(a, lmn1, ca, b, lmn2, cb, c, lmn3, cc, d, lmn4, cd) -> float:
    p = a + b
    q = c + d
    alpha = p * q / (p + q)
    cp = (a * ca + b * cb) / p
    cq = (c * cc + d * cd) / q
    pq = cp - cq
    r2 = float(pq @ pq)

    def e3(l1, l2, axis, x1, x2, aa, bb, t):
        return hermite_e(l1, l2, t, x1[axis] - x2[axis], aa, bb)

    val = 0.0
    for t in range(lmn1[0] + lmn2[0] + 1):
        for u in range(lmn1[1] + lmn2[1] + 1):
            for v in range(lmn1[2] + lmn2[2] + 1):
                e_bra = (
                    e3(lmn1[0], lmn2[0], 0, ca, cb, a, b, t)
                    * e3(lmn1[1], lmn2[1], 1, ca, cb, a, b, u)
                    * e3(lmn1[2], lmn2[2], 2, ca, cb, a, b, v)
                )
                if e_bra == 0.0:
                    continue
                for tau in range(lmn3[0] + lmn4[0] + 1):
                    for nu in range(lmn3[1] + lmn4[1] + 1):
                        for phi in range(lmn3[2] + lmn4[2] + 1):
                            e_ket = (
                                e3(lmn3[0], lmn4[0], 0, cc, cd, c, d, tau)
                                * e3(lmn3[1], lmn4[1], 1, cc, cd, c, d, nu)
                                * e3(lmn3[2], lmn4[2], 2, cc, cd, c, d, phi)
                            )
                            if e_ket == 0.0:
                                continue
                            val += (
                                e_bra
                                * e_ket
                                * (-1.0) ** (tau + nu + phi)
                                * hermite_coulomb(t + tau, u + nu, v + phi, 0, alpha, pq, r2)
                            )
    return val * 2.0 * math.pi**2.5 / (p * q * math.sqrt(p + q))


def prim_norm(a: float, lmn) -> float:
    l, m, n = lmn
    df = lambda k: math.prod(range(2 * k - 1, 0, -2)) if k else 1
    return (
        (2 * a / math.pi) ** 0.75
        * (4 * a) ** ((l + m + n) / 2)
        / math.sqrt(df(l) * df(m) * df(n))
    )


class BasisFunction:
    """Contracted Cartesian Gaussian with normalization absorbed."""

    def __init__(self, center, lmn, exps, coefs):
        self.center = np.asarray(center, dtype=float)
        self.lmn = tuple(lmn)
        self.exps = list(exps)
        raw = [c * prim_norm(a, lmn) for c, a in zip(coefs, exps)]
        self_overlap = sum(
            c1 * c2 * overlap_prim(a1, lmn, self.center, a2, lmn, self.center)
            for c1, a1 in zip(raw, exps)
            for c2, a2 in zip(raw, exps)
        )
        self.coefs = [c / math.sqrt(self_overlap) for c in raw]

    def pairs(self, other):
        for c1, a1 in zip(self.coefs, self.exps):
            for c2, a2 in zip(other.coefs, other.exps):
                yield c1 * c2, a1, a2


def contracted(fn, bf1, bf2, *extra):
    return sum(c * fn(a1, bf1.lmn, bf1.center, a2, bf2.lmn, bf2.center, *extra)
               for c, a1, a2 in bf1.pairs(bf2))


def build_molecule(atoms):
    """atoms: list of (symbol, xyz in Bohr).  Returns (basis, charges, coords)."""
    basis = []
    charges, coords = [], []
    for sym, xyz in atoms:
        xyz = np.asarray(xyz, dtype=float)
        if sym == "H":
            charges.append(1.0)
            basis.append(BasisFunction(xyz, (0, 0, 0), *H_1S))
        elif sym == "Li":
            charges.append(3.0)
            basis.append(BasisFunction(xyz, (0, 0, 0), *LI_1S))
            basis.append(BasisFunction(xyz, (0, 0, 0), LI_2SP_EXP, LI_2S_C))
            for axis in range(3):
                lmn = tuple(1 if i == axis else 0 for i in range(3))
                basis.append(BasisFunction(xyz, lmn, LI_2SP_EXP, LI_2P_C))
        else:
            raise ValueError(f"no basis for {sym}")
        coords.append(xyz)
    return basis, np.array(charges), np.array(coords)


def ao_integrals(basis, charges, coords):
    nao = len(basis)
    s = np.zeros((nao, nao))
    t = np.zeros((nao, nao))
    v = np.zeros((nao, nao))
    for i in range(nao):
        for j in range(i + 1):
            s[i, j] = s[j, i] = contracted(overlap_prim, basis[i], basis[j])
            t[i, j] = t[j, i] = contracted(kinetic_prim, basis[i], basis[j])
            att = sum(
                -z * contracted(nuclear_prim, basis[i], basis[j], pos)
                for z, pos in zip(charges, coords)
            )
            v[i, j] = v[j, i] = att

    eri = np.zeros((nao,) * 4)
    done = set()
    for i in range(nao):
        for j in range(i + 1):
            for k in range(nao):
                for l in range(k + 1):
                    if (i, j) < (k, l) or (i, j, k, l) in done:
                        continue
                    val = sum(
                        cb * ck * eri_prim(
                            a1, basis[i].lmn, basis[i].center, a2, basis[j].lmn, basis[j].center,
                            a3, basis[k].lmn, basis[k].center, a4, basis[l].lmn, basis[l].center,
                        )
                        for cb, a1, a2 in basis[i].pairs(basis[j])
                        for ck, a3, a4 in basis[k].pairs(basis[l])
                    )
                    for perm in (
                        (i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k),
                        (k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i),
                    ):
                        eri[perm] = val
                        done.add(perm)
    return s, t, v, eri


def nuclear_repulsion(charges, coords) -> float:
    e = 0.0
    for i in range(len(charges)):
        for j in range(i):
            e += charges[i] * charges[j] / np.linalg.norm(coords[i] - coords[j])
    return float(e)


def rhf(s, hcore, eri, n_elec, max_cycles=200, conv=1e-11):
    """Closed-shell SCF with DIIS on the FDS-SDF residual."""
    n_occ = n_elec // 2
    evals, evecs = np.linalg.eigh(s)
    x = evecs @ np.diag(evals**-0.5) @ evecs.T

    def solve(f):
        fp = x.T @ f @ x
        e_mo, cp = np.linalg.eigh(fp)
        c = x @ cp
        return e_mo, c

    _, c = solve(hcore)
    dm = 2.0 * c[:, :n_occ] @ c[:, :n_occ].T
    focks, errs = [], []
    e_old = 0.0
    for cycle in range(max_cycles):
        j = np.einsum("pqrs,rs->pq", eri, dm)
        k = np.einsum("prqs,rs->pq", eri, dm)
        f = hcore + j - 0.5 * k
        err = f @ dm @ s - s @ dm @ f
        focks.append(f)
        errs.append(err.ravel())
        if len(focks) > 8:
            focks.pop(0), errs.pop(0)
        if len(focks) > 1:
            m = len(focks)
            b = -np.ones((m + 1, m + 1))
            b[-1, -1] = 0.0
            for a in range(m):
                for bb in range(m):
                    b[a, bb] = errs[a] @ errs[bb]
            rhs = np.zeros(m + 1)
            rhs[-1] = -1.0
            w = np.linalg.solve(b, rhs)[:m]
            f = sum(wi * fi for wi, fi in zip(w, focks))
        _, c = solve(f)
        dm = 2.0 * c[:, :n_occ] @ c[:, :n_occ].T
        e_elec = 0.5 * np.einsum("pq,pq->", dm, hcore + (hcore + j - 0.5 * k))
        if abs(e_elec - e_old) < conv and np.max(np.abs(err)) < 1e-8:
            return float(e_elec), c
        e_old = e_elec
    raise RuntimeError("SCF failed to converge")


def mo_fcidump(atoms, n_elec, label):
    basis, charges, coords = build_molecule(atoms)
    s, t, v, eri = ao_integrals(basis, charges, coords)
    e_nuc = nuclear_repulsion(charges, coords)
    hcore = t + v
    e_elec, c = rhf(s, hcore, eri, n_elec)
    e_hf = e_elec + e_nuc
    h_mo = c.T @ hcore @ c
    g_mo = np.einsum("pqrs,pi,qj,rk,sl->ijkl", eri, c, c, c, c, optimize=True)
    mi = MolecularIntegrals(len(basis), n_elec, 0, e_nuc, h_mo, g_mo)
    geom = "; ".join(f"{sym} ({xyz[0]:.6f}, {xyz[1]:.6f}, {xyz[2]:.6f})" for sym, xyz in atoms)
    comment = (
        f"{label}\n"
        f"geometry (Bohr): {geom}\n"
        f"basis STO-3G, RHF canonical orbitals, E_HF = {e_hf:.10f} Hartree"
    )
    return mi, comment, e_hf


def main():
    out_dir = os.path.join(os.path.dirname(__file__), "..", "src", "fastvqe", "fixtures")
    os.makedirs(out_dir, exist_ok=True)

    r_h2 = 0.735 * ANGSTROM
    r_h4 = 1.5 * ANGSTROM
    r_lih = 1.5 * ANGSTROM
    systems = {
        "h2": ([("H", (0, 0, 0)), ("H", (0, 0, r_h2))], 2, "H2, R = 0.735 Angstrom"),
        "h4": (
            [("H", (0, 0, i * r_h4)) for i in range(4)],
            4,
            "H4 linear chain, 1.5 Angstrom spacing",
        ),
        "lih": ([("Li", (0, 0, 0)), ("H", (0, 0, r_lih))], 4, "LiH, R = 1.5 Angstrom"),
    }
    for name, (atoms, n_elec, label) in systems.items():
        mi, comment, e_hf = mo_fcidump(atoms, n_elec, label)

        from fastvqe.hamio import to_spin_orbitals
        from fastvqe.solver import fci_ground_energy

        e_fci = fci_ground_energy(to_spin_orbitals(mi), mi.n_elec, mi.ms2)
        comment += f"\nE_FCI = {e_fci:.10f} Hartree"
        path = os.path.join(out_dir, f"{name}.fcidump")
        with open(path, "w") as f:
            f.write(write_fcidump(mi, comment=comment))
        print(f"{name}: n_orb={mi.n_orb}  E_HF={e_hf:.10f}  E_FCI={e_fci:.10f}  -> {path}")


if __name__ == "__main__":
    main()
