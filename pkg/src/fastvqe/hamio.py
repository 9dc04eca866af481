"""Molecular integral ingestion.

Reads FCIDUMP files (or builds seeded synthetic integrals) and expands
the spatial-orbital tensors into blocked spin-orbital form ready for
Slater-Condon evaluation and the fermion-to-qubit mapping.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from importlib import resources

import numpy as np


class FcidumpFormatError(ValueError):
    """Malformed FCIDUMP text (bad header, bad record, index out of range)."""


class FcidumpConsistencyError(ValueError):
    """Duplicate FCIDUMP entries that disagree beyond 1e-12."""


@dataclass
class MolecularIntegrals:
    """Spatial-orbital integrals in chemists' notation.

    h[p,q] is the one-electron matrix, g[p,q,r,s] = (pq|rs) with full
    8-fold permutation symmetry, all in Hartree.
    """

    n_orb: int
    n_elec: int
    ms2: int
    e_core: float
    h: np.ndarray
    g: np.ndarray

    def __post_init__(self):
        if self.n_orb < 1:
            raise ValueError("need at least one orbital")
        if self.n_elec > 2 * self.n_orb:
            raise ValueError(f"{self.n_elec} electrons exceed 2*{self.n_orb} spin orbitals")
        if (self.n_elec - self.ms2) % 2 != 0:
            raise ValueError(f"MS2={self.ms2} parity incompatible with NELEC={self.n_elec}")
        self.h = np.asarray(self.h, dtype=float)
        self.g = np.asarray(self.g, dtype=float)
        if self.h.shape != (self.n_orb,) * 2 or self.g.shape != (self.n_orb,) * 4:
            raise ValueError("integral tensor shape mismatch")


@dataclass
class SpinOrbitalHamiltonian:
    """Second-quantized H over 2*n_orb blocked spin orbitals.

    Indices 0..n_orb-1 are alpha, n_orb..2n_orb-1 are beta.  v2 holds
    antisymmetrized physicists' elements <pq||rs>.
    """

    n_so: int
    e_core: float
    h1: np.ndarray
    v2: np.ndarray


_HEADER_KEY = re.compile(r"([A-Za-z0-9_]+)\s*=\s*(-?\d+)")


def parse_fcidump(text: str) -> MolecularIntegrals:
    """Parse FCIDUMP text into MolecularIntegrals.

    Accepts the usual namelist header terminated by &END or /, Fortran
    D exponents, and comment lines starting with '!'.  Index sentinels:
    (0,0,0,0) is the core energy, (i,0,0,0) the h diagonal, (i,j,0,0)
    one-electron elements, four nonzero indices a two-electron element
    expanded to all 8 permutation images.
    """
    lines = text.splitlines()

    # header runs to the &END / '/' terminator, possibly over several lines
    header_parts: list[str] = []
    body_start = None
    for ln, raw in enumerate(lines):
        s = raw.strip()
        if not s or s.startswith("!"):
            continue
        header_parts.append(s)
        if "&END" in s.upper() or s.endswith("/") or s == "/":
            body_start = ln + 1
            break
    if body_start is None:
        raise FcidumpFormatError("no namelist terminator (&END or /) found")

    header = " ".join(header_parts)
    keys = {k.upper(): int(v) for k, v in _HEADER_KEY.findall(header)}
    missing = [k for k in ("NORB", "NELEC", "MS2") if k not in keys]
    if missing:
        raise FcidumpFormatError(f"header missing {', '.join(missing)}")
    n_orb, n_elec, ms2 = keys["NORB"], keys["NELEC"], keys["MS2"]
    if n_orb < 1:
        raise FcidumpFormatError(f"NORB={n_orb} out of range")

    e_core = 0.0
    h = np.zeros((n_orb, n_orb))
    g = np.zeros((n_orb,) * 4)
    seen: dict[tuple, float] = {}  # canonical key -> value, for duplicate checks

    def _record(key: tuple, val: float, lineno: int) -> None:
        if key in seen and abs(seen[key] - val) > 1e-12:
            raise FcidumpConsistencyError(
                f"line {lineno}: entry {key} = {val!r} conflicts with earlier {seen[key]!r}"
            )
        seen[key] = val

    for ln in range(body_start, len(lines)):
        s = lines[ln].strip()
        if not s or s.startswith("!"):
            continue
        parts = s.replace("D", "E").replace("d", "e").split()
        if len(parts) != 5:
            raise FcidumpFormatError(f"line {ln + 1}: expected 'value i j k l', got {s!r}")
        try:
            val = float(parts[0])
            i, j, k, l = (int(p) for p in parts[1:])
        except ValueError:
            raise FcidumpFormatError(f"line {ln + 1}: unparseable record {s!r}") from None
        for idx in (i, j, k, l):
            if idx < 0 or idx > n_orb:
                raise FcidumpFormatError(f"line {ln + 1}: orbital index {idx} exceeds NORB={n_orb}")

        if i == j == k == l == 0:
            _record(("e",), val, ln + 1)
            e_core = val
        elif j == k == l == 0:
            _record(("h", i - 1, i - 1), val, ln + 1)
            h[i - 1, i - 1] = val
        elif k == l == 0:
            if i == 0 or j == 0:
                raise FcidumpFormatError(f"line {ln + 1}: bad index pattern {(i, j, k, l)}")
            key = ("h",) + tuple(sorted((i - 1, j - 1)))
            _record(key, val, ln + 1)
            h[i - 1, j - 1] = h[j - 1, i - 1] = val
        elif 0 in (i, j, k, l):
            raise FcidumpFormatError(f"line {ln + 1}: bad index pattern {(i, j, k, l)}")
        else:
            p, q, r, s_ = i - 1, j - 1, k - 1, l - 1
            images = _g_images(p, q, r, s_)
            _record(("g",) + min(images), val, ln + 1)
            for im in images:
                g[im] = val

    return MolecularIntegrals(n_orb, n_elec, ms2, e_core, h, g)


def _g_images(p: int, q: int, r: int, s: int) -> tuple[tuple[int, int, int, int], ...]:
    """All 8 permutation images of (pq|rs)."""
    return (
        (p, q, r, s), (q, p, r, s), (p, q, s, r), (q, p, s, r),
        (r, s, p, q), (s, r, p, q), (r, s, q, p), (s, r, q, p),
    )


def write_fcidump(mi: MolecularIntegrals, comment: str | None = None) -> str:
    """Serialize to FCIDUMP text; exact zeros are skipped.

    Values are printed with 16 significant digits so a parse round-trip
    reproduces every entry bit-for-bit.
    """
    n = mi.n_orb
    out = []
    if comment:
        out.extend(f"! {c}" for c in comment.splitlines())
    out.append(f"&FCI NORB={n},NELEC={mi.n_elec},MS2={mi.ms2},")
    out.append(" ORBSYM=" + "1," * n)
    out.append(" ISYM=1,")
    out.append("&END")

    done = set()
    for p in range(n):
        for q in range(p + 1):
            for r in range(p + 1):
                for s in range(r + 1):
                    key = min(_g_images(p, q, r, s))
                    if key in done:
                        continue
                    done.add(key)
                    v = mi.g[p, q, r, s]
                    if v != 0.0:
                        out.append(f"{v:22.16e} {p + 1:3d} {q + 1:3d} {r + 1:3d} {s + 1:3d}")
    for p in range(n):
        for q in range(p + 1):
            v = mi.h[p, q]
            if v != 0.0:
                out.append(f"{v:22.16e} {p + 1:3d} {q + 1:3d}   0   0")
    out.append(f"{mi.e_core:22.16e}   0   0   0   0")
    return "\n".join(out) + "\n"


def load_fcidump(path) -> MolecularIntegrals:
    with open(path) as f:
        return parse_fcidump(f.read())


def to_spin_orbitals(mi: MolecularIntegrals) -> SpinOrbitalHamiltonian:
    """Expand to blocked spin orbitals with antisymmetrized v2.

    <PQ||RS> = (pr|qs) d(sP,sR) d(sQ,sS) - (ps|qr) d(sP,sS) d(sQ,sR)
    where lowercase are spatial indices and s* the spin labels.
    """
    n, n_so = mi.n_orb, 2 * mi.n_orb
    h1 = np.zeros((n_so, n_so))
    h1[:n, :n] = mi.h
    h1[n:, n:] = mi.h

    # physicists' <PQ|RS> over spin orbitals, then antisymmetrize
    spat = np.arange(n_so) % n
    spin = np.arange(n_so) // n
    same = (spin[:, None] == spin[None, :]).astype(float)
    big = mi.g[np.ix_(spat, spat, spat, spat)]  # chemist (PR|QS) sans spin
    v_phys = big.transpose(0, 2, 1, 3) * same[:, None, :, None] * same[None, :, None, :]
    v2 = v_phys - v_phys.transpose(0, 1, 3, 2)
    return SpinOrbitalHamiltonian(n_so=n_so, e_core=mi.e_core, h1=h1, v2=v2)


def fixtures_dir() -> str:
    """Directory holding the shipped FCIDUMP files.

    FASTVQE_FIXTURES overrides the packaged location, e.g. to point a
    benchmark at externally generated integrals.
    """
    env = os.environ.get("FASTVQE_FIXTURES")
    if env:
        return env
    return str(resources.files("fastvqe") / "fixtures")


def resolve_system(spec: str) -> MolecularIntegrals:
    """Turn a system spec string into integrals.

    Accepted forms: "synth:SEED:NORB:NELEC" for seeded synthetic
    integrals, an FCIDUMP path, or a bare fixture name like "h4"
    (resolved against fixtures_dir, with or without the .fcidump
    suffix).
    """
    if spec.startswith("synth:"):
        parts = spec.split(":")
        if len(parts) != 4:
            raise ValueError(f"synthetic spec {spec!r} is not synth:SEED:NORB:NELEC")
        seed, n_orb, n_elec = (int(p) for p in parts[1:])
        return synth_integrals(seed, n_orb, n_elec)
    candidates = [spec]
    if not spec.endswith(".fcidump"):
        candidates.append(spec + ".fcidump")
    base = fixtures_dir()
    candidates += [os.path.join(base, os.path.basename(c)) for c in list(candidates)]
    for cand in candidates:
        if os.path.isfile(cand):
            return load_fcidump(cand)
    raise FileNotFoundError(f"no FCIDUMP found for {spec!r} (tried {', '.join(candidates)})")


def synth_integrals(seed: int, n_orb: int, n_elec: int) -> MolecularIntegrals:
    """Seeded random integrals obeying every symmetry invariant.

    Not physical, just structurally valid: values land in [-1, 1] and
    the resulting qubit operator is Hermitian.  Useful when no FCIDUMP
    fixture fits the wanted register size.
    """
    if n_orb < 1:
        raise ValueError("n_orb must be positive")
    rng = np.random.default_rng(seed)
    h = rng.uniform(-1.0, 1.0, (n_orb, n_orb))
    h = 0.5 * (h + h.T)
    g = rng.uniform(-1.0, 1.0, (n_orb,) * 4)
    acc = np.zeros_like(g)
    for perm in ((0, 1, 2, 3), (1, 0, 2, 3), (0, 1, 3, 2), (1, 0, 3, 2),
                 (2, 3, 0, 1), (3, 2, 0, 1), (2, 3, 1, 0), (3, 2, 1, 0)):
        acc += g.transpose(perm)
    g = acc / 8.0
    e_core = float(rng.uniform(-1.0, 1.0))
    return MolecularIntegrals(n_orb, n_elec, n_elec % 2, e_core, h, g)
