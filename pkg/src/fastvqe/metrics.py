"""Operator importance metrics and pool selection.

Four ways to weight a candidate excitation against the current state:

  * gradient_exact / gradient_sampled: the energy derivative dE/dtheta
    at theta=0, measured as the expectation of the Hermitian commutator
    [H, A].  This is the ADAPT selection rule; the sampled variant
    costs `shots` per operator, so a full selection round costs
    shots * |active pool|.
  * hg_alpha: double sum over a sampled determinant multiset of
    Re<K_i|H|D_j> with K_i the excited image of D_i.  Purely classical
    given the sample (Slater-Condon elements), costs no extra shots.
  * hsci_beta: Epstein-Nesbet style second-order weight
    |<K_i|H|D_j>|^2 / (E - <K_i|H|K_i>), same classical evaluation.

Ranking always compares |w|; only the ordering matters for selection.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fock import ExcitationOperator, OperatorPool, apply_excitation, slater_condon
from .hamio import SpinOrbitalHamiltonian
from .qubitmap import QubitOperator, commutator, qeb_generator
from .simcore import ShotLedger, StateVector, expectation, sampled_expectation

EPSILON_DEFAULT = 1e-6
DENOM_GUARD = 1e-8

FAST_METRICS = ("fast-hg", "fast-hsci")
METRICS = ("adapt",) + FAST_METRICS


@dataclass
class ImportanceReport:
    """Per-operator weights for one selection round."""

    metric: str
    weights: dict[int, float]  # pool index -> w(A_mu, psi)
    selected: int | None
    replenished: bool = False


def grad_operator(op: ExcitationOperator, h: QubitOperator) -> QubitOperator:
    """Hermitian [H, A] whose expectation is dE/dtheta at theta=0.

    Worth precomputing once per pool operator; commutators are the
    expensive part of ADAPT selection.
    """
    return commutator(h, qeb_generator(op))


def gradient_exact(
    state: StateVector,
    op: ExcitationOperator,
    h: QubitOperator,
    g_op: QubitOperator | None = None,
) -> float:
    """Exact <[H, A]> = dE/dtheta of appending exp(theta A) at theta=0."""
    if g_op is None:
        g_op = grad_operator(op, h)
    return expectation(state, g_op)


def gradient_sampled(
    state: StateVector,
    op: ExcitationOperator,
    h: QubitOperator,
    shots: int,
    rng: np.random.Generator,
    ledger: ShotLedger | None = None,
    g_op: QubitOperator | None = None,
) -> float:
    """Shot-noisy gradient; one expectation value, so `shots` on the ledger."""
    if g_op is None:
        g_op = grad_operator(op, h)
    return sampled_expectation(state, g_op, shots, rng, ledger, phase="selection")


def gradient_determinant_basis(state: StateVector, op: ExcitationOperator, hso) -> float:
    """dE/dtheta assembled from Slater-Condon elements over the support.

    2 sum_ij Re(c_i* c_j <D_i|H A|D_j>) with A|D_j> expanded into its
    excited and de-excited determinant images (no fermionic sign, per
    the qubit-excitation convention).  Independent of the Pauli route;
    kept as a cross-oracle for it.
    """
    amps = state.amps
    support = [int(b) for b in np.nonzero(np.abs(amps) > 1e-12)[0]]
    from .fock import Determinant

    total = 0.0
    transposed = op.transpose()
    for bj in support:
        dj = Determinant(bj, state.n_so)
        for image, sgn in ((apply_excitation(op, dj), 1.0), (apply_excitation(transposed, dj), -1.0)):
            if image is None:
                continue
            for bi in support:
                di = Determinant(bi, state.n_so)
                el = slater_condon(hso, di, image)
                if el != 0.0:
                    total += sgn * (amps[bi].conjugate() * amps[bj] * el).real
    return 2.0 * total


def _sc_cached(
    hso: SpinOrbitalHamiltonian,
    di,
    dj,
    cache: dict | None,
) -> float:
    if cache is None:
        return slater_condon(hso, di, dj)
    key = (di.occ, dj.occ)
    hit = cache.get(key)
    if hit is None:
        hit = cache[key] = slater_condon(hso, di, dj)
    return hit


def hg_alpha(
    sample,
    op: ExcitationOperator,
    hso: SpinOrbitalHamiltonian,
    cache: dict | None = None,
) -> float:
    """Heuristic-gradient weight from a determinant population.

    sum_i sum_j w_i w_j <K_i|H|D_j>, K_i = apply_excitation(op, D_i),
    annihilated terms dropped.  Weights are multiset counts (finite
    shots) or exact |c_i|^2 (statevector mode); the double sum carries
    multiplicities, so scaling all counts by m scales alpha by m^2 and
    leaves the ranking unchanged.
    """
    entries = list(sample.items())
    total = 0.0
    for di, wi in entries:
        if wi == 0.0:
            continue
        ki = apply_excitation(op, di)
        if ki is None:
            continue
        for dj, wj in entries:
            el = _sc_cached(hso, ki, dj, cache)
            if el != 0.0:
                total += wi * wj * el
    return total


def hsci_beta(
    sample,
    op: ExcitationOperator,
    hso: SpinOrbitalHamiltonian,
    e_k: float,
    cache: dict | None = None,
) -> float:
    """Selected-CI (Epstein-Nesbet) weight from a determinant population.

    sum_ij w_i w_j |<K_i|H|D_j>|^2 / (e_k - <K_i|H|K_i>); terms with an
    annihilated K_i contribute nothing, near-degenerate denominators
    (|e_k - diag| < 1e-8) are skipped rather than allowed to blow up.
    """
    entries = list(sample.items())
    total = 0.0
    for di, wi in entries:
        if wi == 0.0:
            continue
        ki = apply_excitation(op, di)
        if ki is None:
            continue
        denom = e_k - _sc_cached(hso, ki, ki, cache)
        if abs(denom) < DENOM_GUARD:
            continue
        acc = 0.0
        for dj, wj in entries:
            el = _sc_cached(hso, ki, dj, cache)
            if el != 0.0:
                acc += wj * el * el
        total += wi * acc / denom
    return total


def rank_and_select(
    weights: dict[int, float],
    pool: OperatorPool,
    epsilon: float = EPSILON_DEFAULT,
    metric: str = "adapt",
) -> ImportanceReport:
    """Pick argmax |w| over active operators, ties to the lowest index.

    FAST metrics deactivate the winner (each operator used once per
    pool cycle); when every active weight falls below epsilon the whole
    pool is reactivated and selection re-runs once.  ADAPT never
    shrinks the active set.  selected=None signals an empty pool.
    """
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}")

    def _argmax(indices) -> int | None:
        best, best_w = None, -1.0
        for i in indices:
            w = abs(weights[i])
            if w > best_w:
                best, best_w = i, w
        return best

    replenished = False
    best = _argmax(pool.active_indices())
    if best is None or abs(weights[best]) < epsilon:
        pool.activate_all()
        replenished = True
        best = _argmax(pool.active_indices())

    if best is not None and metric in FAST_METRICS:
        pool.deactivate(best)
    return ImportanceReport(metric, dict(weights), best, replenished)
