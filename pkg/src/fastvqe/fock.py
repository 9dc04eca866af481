"""Determinant algebra and Slater-Condon matrix elements.

Determinants are occupation bit masks over blocked spin orbitals
(alpha block first, bit p set means spin orbital p occupied).  The
maximum register width is 64 spin orbitals, one machine word.

Excitation application follows the qubit-excitation convention and
carries NO fermionic sign; antisymmetry enters only through the
Slater-Condon rules, which keep the full permutation parity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .hamio import SpinOrbitalHamiltonian

MAX_SPIN_ORBITALS = 64


@dataclass(frozen=True)
class Determinant:
    """Occupation-mask Slater determinant over n_so spin orbitals."""

    occ: int
    n_so: int

    def __post_init__(self):
        if self.n_so > MAX_SPIN_ORBITALS:
            raise ValueError(f"register width {self.n_so} exceeds {MAX_SPIN_ORBITALS}")
        if self.occ < 0 or self.occ >> self.n_so:
            raise ValueError(f"occupation mask {self.occ:#x} outside {self.n_so} orbitals")

    @property
    def n_elec(self) -> int:
        return self.occ.bit_count()

    def occupied(self) -> tuple[int, ...]:
        return tuple(_bits(self.occ))

    def spin_counts(self) -> tuple[int, int]:
        """(n_alpha, n_beta) under blocked ordering."""
        n_orb = self.n_so // 2
        alpha = self.occ & ((1 << n_orb) - 1)
        return alpha.bit_count(), (self.occ >> n_orb).bit_count()

    def __str__(self) -> str:
        # little-endian: orbital 0 leftmost
        return "|" + "".join(str(self.occ >> p & 1) for p in range(self.n_so)) + ">"


@dataclass(frozen=True)
class ExcitationOperator:
    """Spin-conserving particle-hole excitation tau (single or double).

    occ_idx are annihilated spin orbitals, virt_idx created ones, both
    strictly increasing.  n_so fixes the register so generators can be
    built without extra context.
    """

    kind: str
    occ_idx: tuple[int, ...]
    virt_idx: tuple[int, ...]
    n_so: int

    def __post_init__(self):
        want = {"single": 1, "double": 2}.get(self.kind)
        if want is None:
            raise ValueError(f"unknown excitation kind {self.kind!r}")
        if len(self.occ_idx) != want or len(self.virt_idx) != want:
            raise ValueError(f"{self.kind} excitation needs {want} index pair(s)")
        if list(self.occ_idx) != sorted(set(self.occ_idx)) or list(self.virt_idx) != sorted(
            set(self.virt_idx)
        ):
            raise ValueError("indices must be strictly increasing")
        if set(self.occ_idx) & set(self.virt_idx):
            raise ValueError("occ_idx and virt_idx overlap")
        for idx in self.occ_idx + self.virt_idx:
            if not 0 <= idx < self.n_so:
                raise ValueError(f"index {idx} outside register of {self.n_so}")
        n_orb = self.n_so // 2
        if sorted(i >= n_orb for i in self.occ_idx) != sorted(a >= n_orb for a in self.virt_idx):
            raise ValueError("excitation does not conserve spin")

    def transpose(self) -> "ExcitationOperator":
        """Swap occupied and virtual roles; inverts apply_excitation."""
        return ExcitationOperator(self.kind, self.virt_idx, self.occ_idx, self.n_so)

    def __str__(self) -> str:
        n_orb = self.n_so // 2

        def lab(p):
            return f"{p % n_orb}{'ab'[p // n_orb]}"

        return ",".join(map(lab, self.occ_idx)) + "->" + ",".join(map(lab, self.virt_idx))


@dataclass
class OperatorPool:
    """Ordered excitation pool with per-operator active flags.

    ops never changes after construction; active flags are flipped by
    the selection logic (removal and replenishment).
    """

    ops: tuple[ExcitationOperator, ...]
    active: list[bool] = field(default_factory=list)

    def __post_init__(self):
        if len(set(self.ops)) != len(self.ops):
            raise ValueError("duplicate operators in pool")
        if not self.active:
            self.active = [True] * len(self.ops)
        if len(self.active) != len(self.ops):
            raise ValueError("active flags do not match pool size")

    def __len__(self) -> int:
        return len(self.ops)

    @property
    def n_active(self) -> int:
        return sum(self.active)

    def active_indices(self) -> tuple[int, ...]:
        return tuple(i for i, a in enumerate(self.active) if a)

    def deactivate(self, idx: int) -> None:
        self.active[idx] = False

    def activate_all(self) -> None:
        self.active = [True] * len(self.ops)


def hf_determinant(n_elec: int, ms2: int, n_so: int) -> Determinant:
    """Aufbau reference: lowest alpha and beta spatial orbitals filled."""
    n_orb = n_so // 2
    n_alpha, rem = divmod(n_elec + ms2, 2)
    if rem:
        raise ValueError(f"n_elec={n_elec} and ms2={ms2} have mismatched parity")
    n_beta = n_elec - n_alpha
    if not (0 <= n_alpha <= n_orb and 0 <= n_beta <= n_orb):
        raise ValueError(
            f"cannot place {n_alpha} alpha / {n_beta} beta electrons in {n_orb} orbitals"
        )
    occ = ((1 << n_alpha) - 1) | (((1 << n_beta) - 1) << n_orb)
    return Determinant(occ, n_so)


def build_pool(ref: Determinant, n_so: int) -> OperatorPool:
    """All spin-conserving particle-hole singles and doubles.

    Deterministic order: singles first, then doubles, each block sorted
    lexicographically by (occ_idx, virt_idx).  No RNG involved, so pool
    indices are stable across runs and usable for tie-breaking.
    """
    n_orb = n_so // 2
    occ = [p for p in range(n_so) if ref.occ >> p & 1]
    virt = [p for p in range(n_so) if not ref.occ >> p & 1]
    spin = lambda p: p // n_orb

    singles = [
        ExcitationOperator("single", (i,), (a,), n_so)
        for i in occ
        for a in virt
        if spin(i) == spin(a)
    ]
    doubles = []
    for ii, i in enumerate(occ):
        for j in occ[ii + 1 :]:
            for ai, a in enumerate(virt):
                for b in virt[ai + 1 :]:
                    if sorted((spin(i), spin(j))) == sorted((spin(a), spin(b))):
                        doubles.append(ExcitationOperator("double", (i, j), (a, b), n_so))
    key = lambda op: (op.occ_idx, op.virt_idx)
    return OperatorPool(tuple(sorted(singles, key=key) + sorted(doubles, key=key)))


def apply_excitation(op: ExcitationOperator, d: Determinant) -> Determinant | None:
    """Move electrons occ_idx -> virt_idx without any fermionic sign.

    Returns None when the excitation annihilates the determinant (a
    source orbital empty or a target orbital already filled).
    """
    occ_mask = 0
    for i in op.occ_idx:
        occ_mask |= 1 << i
    virt_mask = 0
    for a in op.virt_idx:
        virt_mask |= 1 << a
    if (d.occ & occ_mask) != occ_mask or d.occ & virt_mask:
        return None
    return Determinant((d.occ & ~occ_mask) | virt_mask, d.n_so)


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _ph(mask: int, p: int) -> int:
    """(-1)**(occupied orbitals below p), the ladder-operator parity."""
    return -1 if (mask & ((1 << p) - 1)).bit_count() & 1 else 1


def slater_condon(hso: SpinOrbitalHamiltonian, di: Determinant, dj: Determinant) -> float:
    """<di|H|dj> by the Slater-Condon rules, fermionic sign included."""
    if di.n_elec != dj.n_elec:
        raise ValueError("determinants from different particle-number sectors")
    h1, v2 = hso.h1, hso.v2
    diff = di.occ ^ dj.occ
    rank = diff.bit_count()

    if rank == 0:
        occ = list(_bits(di.occ))
        e = hso.e_core + sum(h1[p, p] for p in occ)
        for a, p in enumerate(occ):
            for q in occ[a + 1 :]:
                e += v2[p, q, p, q]
        return float(e)

    if rank == 2:
        p = next(_bits(diff & di.occ))
        q = next(_bits(diff & dj.occ))
        lo, hi = (p, q) if p < q else (q, p)
        sign = -1 if (dj.occ & ((1 << hi) - 1) & ~((1 << (lo + 1)) - 1)).bit_count() & 1 else 1
        e = h1[p, q]
        for k in _bits(di.occ & dj.occ):
            e += v2[p, k, q, k]
        return float(sign * e)

    if rank == 4:
        p, q = _bits(diff & di.occ)
        r, s = _bits(diff & dj.occ)
        sign = _ph(di.occ, p) * _ph(di.occ, q) * _ph(dj.occ, r) * _ph(dj.occ, s)
        return float(sign * v2[p, q, r, s])

    return 0.0
