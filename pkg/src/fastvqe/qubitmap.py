"""Pauli-word algebra on qubit registers.

Pauli words are stored symplectically as a pair of bit masks (x, z):
bit p of x set means the word acts with X or Y on qubit p, bit p of z
means Z or Y.  Products, commutators and the Jordan-Wigner / qubit-
excitation constructions reduce to integer bit operations plus a phase
bookkeeping rule, which keeps operator algebra exact.

Conventions (shared by the whole package):
  * qubit p <-> spin orbital p, blocked ordering (alpha block first);
  * basis states are little-endian: bit p of the index is qubit p;
  * string form "XIZY" lists qubit 0 leftmost.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

COEFF_CUTOFF = 1e-14

_I4 = (1.0, 1.0j, -1.0, -1.0j)  # powers of i


@dataclass(frozen=True)
class PauliWord:
    """Tensor product of single-qubit Paulis, encoded as (x, z) masks."""

    x: int
    z: int
    n: int

    def letter(self, q: int) -> str:
        bit = 1 << q
        xb, zb = bool(self.x & bit), bool(self.z & bit)
        return "IXZY"[xb + 2 * zb] if not (xb and zb) else "Y"

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    @property
    def is_diagonal(self) -> bool:
        """True when the word contains only I and Z letters."""
        return self.x == 0

    def support(self) -> tuple[int, ...]:
        """Qubits on which the word acts non-trivially."""
        m = self.x | self.z
        return tuple(q for q in range(self.n) if m >> q & 1)

    @classmethod
    def identity(cls, n: int) -> "PauliWord":
        return cls(0, 0, n)

    @classmethod
    def from_string(cls, s: str) -> "PauliWord":
        x = z = 0
        for q, c in enumerate(s):
            if c in "XY":
                x |= 1 << q
            if c in "ZY":
                z |= 1 << q
            if c not in "IXYZ":
                raise ValueError(f"invalid Pauli letter {c!r}")
        return cls(x, z, len(s))

    def __str__(self) -> str:
        out = []
        for q in range(self.n):
            xb, zb = self.x >> q & 1, self.z >> q & 1
            out.append("IXZY"[xb + 2 * zb] if xb + 2 * zb != 3 else "Y")
        return "".join(out)


def _word_product(a: PauliWord, b: PauliWord) -> tuple[PauliWord, complex]:
    """Product a*b as (word, phase), phase in {1, i, -1, -i}."""
    x3, z3 = a.x ^ b.x, a.z ^ b.z
    # per-qubit phases accumulate as powers of i; derived from
    # sigma(x,z) = i^{xz} X^x Z^z
    e = (
        (a.x & a.z).bit_count()
        + (b.x & b.z).bit_count()
        + 2 * (a.z & b.x).bit_count()
        - (x3 & z3).bit_count()
    ) % 4
    return PauliWord(x3, z3, a.n), _I4[e]


_PAULI_MATS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class QubitOperator:
    """Weighted sum of Pauli words on a fixed-width register.

    Terms with |coefficient| below COEFF_CUTOFF are pruned on
    construction, so every algebraic result is already simplified.
    Instances are treated as immutable after construction.
    """

    __slots__ = ("terms", "n", "_hermitian", "_items")

    def __init__(self, n: int, terms: dict[PauliWord, complex] | None = None):
        self.n = n
        self.terms: dict[PauliWord, complex] = {}
        if terms:
            for w, c in terms.items():
                if abs(c) > COEFF_CUTOFF:
                    self.terms[w] = complex(c)
        self._hermitian = None
        self._items = None

    # -- constructors -------------------------------------------------
    @classmethod
    def identity(cls, n: int, coeff: complex = 1.0) -> "QubitOperator":
        return cls(n, {PauliWord.identity(n): coeff})

    @classmethod
    def from_word(cls, word: PauliWord, coeff: complex = 1.0) -> "QubitOperator":
        return cls(word.n, {word: coeff})

    @classmethod
    def zero(cls, n: int) -> "QubitOperator":
        return cls(n)

    # -- inspection ---------------------------------------------------
    def __len__(self) -> int:
        return len(self.terms)

    def items(self) -> tuple[tuple[PauliWord, complex], ...]:
        """Terms in a canonical, deterministic order."""
        if self._items is None:
            object.__setattr__ if False else None
            self._items = tuple(
                sorted(self.terms.items(), key=lambda t: (t[0].z, t[0].x))
            )
        return self._items

    @property
    def identity_coefficient(self) -> complex:
        return self.terms.get(PauliWord.identity(self.n), 0.0)

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        if self._hermitian is None:
            self._hermitian = all(abs(c.imag) <= tol for c in self.terms.values())
        return self._hermitian

    def is_zero(self) -> bool:
        return not self.terms

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    # -- algebra ------------------------------------------------------
    def __add__(self, other: "QubitOperator") -> "QubitOperator":
        self._check_width(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0.0) + c
        return QubitOperator(self.n, out)

    def __sub__(self, other: "QubitOperator") -> "QubitOperator":
        return self + (-1.0) * other

    def __neg__(self) -> "QubitOperator":
        return (-1.0) * self

    def __rmul__(self, scalar: complex) -> "QubitOperator":
        return QubitOperator(self.n, {w: scalar * c for w, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return other * self
        self._check_width(other)
        out: dict[PauliWord, complex] = {}
        for wa, ca in self.terms.items():
            for wb, cb in other.terms.items():
                w, ph = _word_product(wa, wb)
                out[w] = out.get(w, 0.0) + ca * cb * ph
        return QubitOperator(self.n, out)

    def dagger(self) -> "QubitOperator":
        return QubitOperator(self.n, {w: c.conjugate() for w, c in self.terms.items()})

    def _check_width(self, other: "QubitOperator") -> None:
        if self.n != other.n:
            raise ValueError(f"operator width mismatch: {self.n} vs {other.n}")

    # -- dense form (small registers only; used by test oracles) ------
    def to_dense(self) -> np.ndarray:
        if self.n > 10:
            raise ValueError(f"dense form limited to 10 qubits, got {self.n}")
        dim = 1 << self.n
        out = np.zeros((dim, dim), dtype=complex)
        for w, c in self.terms.items():
            m = np.eye(1, dtype=complex)
            for q in range(self.n):
                m = np.kron(_PAULI_MATS[w.letter(q)], m)
            out += c * m
        return out

    def __repr__(self) -> str:
        parts = [f"({c:.6g})*{w}" for w, c in self.items()[:6]]
        more = "" if len(self.terms) <= 6 else f" ... ({len(self.terms)} terms)"
        return " + ".join(parts) + more if parts else "0"


# ---------------------------------------------------------------------
# fermionic ladder operators (Jordan-Wigner) and qubit ladder operators
# ---------------------------------------------------------------------

def _jw_ladder(p: int, n: int, dagger: bool) -> QubitOperator:
    """a_p (or a_p^dagger) with the Z parity string on qubits < p."""
    zstring = (1 << p) - 1
    sign = -0.5j if dagger else 0.5j
    return QubitOperator(
        n,
        {
            PauliWord(1 << p, zstring, n): 0.5,
            PauliWord(1 << p, zstring | (1 << p), n): sign,
        },
    )


def _qubit_ladder(p: int, n: int, dagger: bool) -> QubitOperator:
    """Qubit-local (X -+ iY)/2, no parity string."""
    sign = -0.5j if dagger else 0.5j
    return QubitOperator(
        n,
        {
            PauliWord(1 << p, 0, n): 0.5,
            PauliWord(1 << p, 1 << p, n): sign,
        },
    )


def jordan_wigner(hso) -> QubitOperator:
    """Map a spin-orbital Hamiltonian to a qubit operator.

    Takes the one-electron integrals h1 and antisymmetrized two-electron
    integrals v2 of a SpinOrbitalHamiltonian and returns

        e_core * 1 + sum_pq h1[pq] a+_p a_q
                   + sum_{p<q, r<s} v2[pqrs] a+_p a+_q a_s a_r

    which is Hermitian with real coefficients for real integrals.
    """
    n = hso.n_so
    h1, v2 = hso.h1, hso.v2
    out: dict[PauliWord, complex] = {PauliWord.identity(n): complex(hso.e_core)}

    def _accumulate(op: QubitOperator, coeff: float) -> None:
        for w, c in op.terms.items():
            out[w] = out.get(w, 0.0) + coeff * c

    cre = [_jw_ladder(p, n, True) for p in range(n)]
    ann = [_jw_ladder(p, n, False) for p in range(n)]

    for p in range(n):
        for q in range(n):
            if abs(h1[p, q]) > COEFF_CUTOFF:
                _accumulate(cre[p] * ann[q], float(h1[p, q]))

    # v2 antisymmetry folds the 1/4 prefactor into restricted index ranges
    pair_cre: dict[tuple[int, int], QubitOperator] = {}
    pair_ann: dict[tuple[int, int], QubitOperator] = {}
    for p in range(n):
        for q in range(p + 1, n):
            for r in range(n):
                for s in range(r + 1, n):
                    coeff = float(v2[p, q, r, s])
                    if abs(coeff) <= COEFF_CUTOFF:
                        continue
                    if (p, q) not in pair_cre:
                        pair_cre[p, q] = cre[p] * cre[q]
                    if (s, r) not in pair_ann:
                        pair_ann[s, r] = ann[s] * ann[r]
                    _accumulate(pair_cre[p, q] * pair_ann[s, r], coeff)

    return QubitOperator(n, out)


def qeb_generator(op) -> QubitOperator:
    """Anti-Hermitian generator tau - tau^dagger of a qubit excitation.

    Built from qubit ladder operators without Jordan-Wigner strings, so
    the result touches only the excitation's own qubits: 2 Pauli words
    for a single, 8 for a double, all with purely imaginary weights.
    """
    n = op.n_so
    tau = QubitOperator.identity(n)
    for a in op.virt_idx:
        tau = tau * _qubit_ladder(a, n, True)
    for i in reversed(op.occ_idx):
        tau = tau * _qubit_ladder(i, n, False)
    return tau - tau.dagger()


def split_diagonal(q: QubitOperator) -> tuple[QubitOperator, QubitOperator]:
    """Partition into (diagonal, rest); diagonal words use only I and Z."""
    diag = {w: c for w, c in q.terms.items() if w.is_diagonal}
    off = {w: c for w, c in q.terms.items() if not w.is_diagonal}
    return QubitOperator(q.n, diag), QubitOperator(q.n, off)


def commutator(a: QubitOperator, b: QubitOperator) -> QubitOperator:
    """a*b - b*a with exact phase tracking."""
    a._check_width(b)
    return a * b - b * a
