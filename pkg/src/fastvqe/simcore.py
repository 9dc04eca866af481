"""Statevector engine: reference preparation, qubit-excitation
evolutions, exact and shot-noisy expectation values, computational-basis
sampling, CNOT and shot accounting.

Basis indexing is little-endian: bit p of a basis index is the
occupation of qubit p (= spin orbital p, blocked ordering).  Qubit
excitations carry no Jordan-Wigner strings, so their invariant
subspaces pair basis states b <-> b ^ (occ_mask | virt_mask) and every
evolution is a plain Givens rotation over those pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fock import Determinant, ExcitationOperator
from .qubitmap import PauliWord, QubitOperator

SINGLE_CNOTS = 2
DOUBLE_CNOTS = 13


@dataclass
class StateVector:
    """Normalized amplitudes over the full 2^n register."""

    amps: np.ndarray
    n_so: int

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def copy(self) -> "StateVector":
        return StateVector(self.amps.copy(), self.n_so)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def determinant_weights(self, cutoff: float = 1e-12) -> dict[Determinant, float]:
        """Exact |c_i|^2 per determinant, dropping negligible entries."""
        p = self.probabilities()
        return {
            Determinant(int(b), self.n_so): float(p[b]) for b in np.nonzero(p > cutoff)[0]
        }


@dataclass
class MultiSetSample:
    """Multiset of sampled determinants; counts sum to the shot total."""

    counts: dict[Determinant, int]
    total: int

    def __post_init__(self):
        if sum(self.counts.values()) != self.total:
            raise ValueError("multiset counts do not sum to the shot total")

    def items(self):
        return self.counts.items()


@dataclass
class ShotLedger:
    """Monotone shot counter, broken down by accounting phase."""

    breakdown: dict[str, int] = field(default_factory=dict)

    @property
    def cumulative_shots(self) -> int:
        return sum(self.breakdown.values())

    def charge(self, phase: str, shots: int) -> None:
        if shots < 0:
            raise ValueError("cannot charge negative shots")
        self.breakdown[phase] = self.breakdown.get(phase, 0) + shots


def prepare_reference(d: Determinant, n_so: int) -> StateVector:
    amps = np.zeros(1 << n_so, dtype=complex)
    amps[d.occ] = 1.0
    return StateVector(amps, n_so)


# pair-index cache: (occ_mask, virt_mask, n) -> (src_indices, tgt_indices)
_pairs: dict[tuple[int, int, int], tuple[np.ndarray, np.ndarray]] = {}


def _excitation_pairs(op: ExcitationOperator) -> tuple[np.ndarray, np.ndarray]:
    occ_mask = sum(1 << i for i in op.occ_idx)
    virt_mask = sum(1 << a for a in op.virt_idx)
    key = (occ_mask, virt_mask, op.n_so)
    hit = _pairs.get(key)
    if hit is None:
        b = np.arange(1 << op.n_so)
        src = b[((b & occ_mask) == occ_mask) & ((b & virt_mask) == 0)]
        hit = _pairs[key] = (src, src ^ (occ_mask | virt_mask))
    return hit


def apply_qeb_evolution(state: StateVector, op: ExcitationOperator, theta: float) -> StateVector:
    """exp(theta (tau - tau^dagger)) as a Givens rotation by theta.

    Within each invariant pair (source pattern s, target pattern t):
      |s> -> cos(theta)|s> + sin(theta)|t>
      |t> -> cos(theta)|t> - sin(theta)|s>
    Identity on everything else; norm and sector support preserved.
    """
    src, tgt = _excitation_pairs(op)
    out = state.amps.copy()
    c, s = np.cos(theta), np.sin(theta)
    a_src = out[src].copy()
    out[src] = c * a_src - s * out[tgt]
    out[tgt] = s * a_src + c * out[tgt]
    return StateVector(out, state.n_so)


def apply_qeb_generator(state: StateVector, op: ExcitationOperator) -> StateVector:
    """A = tau - tau^dagger applied once; used by analytic gradients."""
    src, tgt = _excitation_pairs(op)
    out = np.zeros_like(state.amps)
    out[tgt] = state.amps[src]
    out[src] = -state.amps[tgt]
    return StateVector(out, state.n_so)


def _word_signs(word: PauliWord, idx: np.ndarray) -> np.ndarray:
    """phase(b) for W|b> = phase(b) |b ^ x_mask>, as a vector over idx."""
    ny = (word.x & word.z).bit_count()
    signs = 1.0 - 2.0 * (np.bitwise_count(idx & word.z) & 1)
    return (1j**ny) * signs


def apply_operator(state: StateVector, q: QubitOperator) -> StateVector:
    """q|psi> summed word by word; exact, dense over the register."""
    idx = np.arange(state.amps.size)
    out = np.zeros_like(state.amps)
    for word, coeff in q.items():
        out[idx ^ word.x] += coeff * _word_signs(word, idx) * state.amps
    return StateVector(out, state.n_so)


def expectation(state: StateVector, q: QubitOperator) -> float:
    """Exact <psi|q|psi> for Hermitian q."""
    if not q.is_hermitian():
        raise ValueError("expectation of a non-Hermitian operator")
    idx = np.arange(state.amps.size)
    val = 0.0 + 0.0j
    for word, coeff in q.items():
        val += coeff * np.vdot(state.amps[idx ^ word.x], _word_signs(word, idx) * state.amps)
    if abs(val.imag) > 1e-10:
        raise AssertionError(f"imaginary expectation residue {val.imag:.3e}")
    return float(val.real)


def _word_expectation(state: StateVector, word: PauliWord) -> float:
    idx = np.arange(state.amps.size)
    v = np.vdot(state.amps[idx ^ word.x], _word_signs(word, idx) * state.amps)
    return float(v.real)


def sample_determinants(
    state: StateVector,
    shots: int,
    rng: np.random.Generator,
    ledger: ShotLedger | None = None,
) -> MultiSetSample:
    """Projective computational-basis measurement, `shots` i.i.d. draws.

    Deterministic for a fixed generator state; charges the ledger under
    the population_sampling phase.
    """
    if shots < 1:
        raise ValueError("need at least one shot")
    p = state.probabilities()
    p = p / p.sum()  # scrub float residue so multinomial accepts it
    hist = rng.multinomial(shots, p)
    counts = {
        Determinant(int(b), state.n_so): int(hist[b]) for b in np.nonzero(hist)[0]
    }
    if ledger is not None:
        ledger.charge("population_sampling", shots)
    return MultiSetSample(counts, shots)


def sampled_expectation(
    state: StateVector,
    q: QubitOperator,
    shots: int,
    rng: np.random.Generator,
    ledger: ShotLedger | None = None,
    phase: str = "selection",
) -> float:
    """Shot-noisy <q>: per-word binomial measurement model.

    Each non-identity word's exact <P> in [-1, 1] is replaced by the
    estimate 2k/shots - 1 with k ~ Binomial(shots, (1 + <P>)/2); the
    identity word contributes exactly.  The ledger is charged `shots`
    once for the whole expectation value, independent of word count
    (the accounting unit is one expectation value, noise is per word).
    """
    if not q.is_hermitian():
        raise ValueError("expectation of a non-Hermitian operator")
    if shots < 1:
        raise ValueError("need at least one shot")
    total = 0.0
    for word, coeff in q.items():  # canonical order keeps seeds reproducible
        if word.is_identity:
            total += coeff.real
            continue
        p_up = 0.5 * (1.0 + _word_expectation(state, word))
        k = rng.binomial(shots, min(max(p_up, 0.0), 1.0))
        total += coeff.real * (2.0 * k / shots - 1.0)
    if ledger is not None:
        ledger.charge(phase, shots)
    return total


def cnot_count(ansatz, single_cost: int = SINGLE_CNOTS, double_cost: int = DOUBLE_CNOTS) -> int:
    """CNOTs for the staircase QEB circuits: 2 per single, 13 per double."""
    total = 0
    for el in ansatz:
        op = getattr(el, "op", el)
        total += single_cost if op.kind == "single" else double_cost
    return total
