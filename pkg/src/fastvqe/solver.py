"""The adaptive loop, the inner VQE optimization, and the FCI oracle.

One iteration of the loop: obtain per-operator weights (energy
gradients for ADAPT, determinant-population metrics for the FAST
modes), select the best operator, append it with theta=0 and re-run a
statevector-exact L-BFGS-B minimization warm-started from the previous
parameters.  Finite shots enter only the selection phase; the VQE
itself always sees exact expectation values, so energies are monotone
non-increasing by construction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize
import scipy.sparse
import scipy.sparse.linalg

from .fock import (
    Determinant,
    ExcitationOperator,
    build_pool,
    hf_determinant,
    slater_condon,
)
from .hamio import SpinOrbitalHamiltonian, resolve_system, to_spin_orbitals
from .metrics import (
    EPSILON_DEFAULT,
    METRICS,
    grad_operator,
    gradient_exact,
    gradient_sampled,
    hg_alpha,
    hsci_beta,
    rank_and_select,
)
from .qubitmap import QubitOperator, jordan_wigner
from .simcore import (
    ShotLedger,
    StateVector,
    apply_operator,
    apply_qeb_evolution,
    apply_qeb_generator,
    cnot_count,
    expectation,
    prepare_reference,
    sample_determinants,
)

FCI_MAX_DIM = 100_000
FCI_DENSE_DIM = 1200
ENERGY_CUTOFF = 1e-10  # stop once |E - E_FCI| drops below this


@dataclass
class AnsatzElement:
    op: ExcitationOperator
    theta: float


@dataclass
class IterationRecord:
    """One adaptive iteration, denormalized for direct trace emission."""

    iteration: int
    method: str
    mode: str
    shots_per_eval: int
    energy_hartree: float
    error_vs_fci_hartree: float
    n_params: int
    n_cnots: int
    cumulative_shots: int
    selected_operator: str
    seed: int
    weights: dict[int, float] = field(default_factory=dict, repr=False)


@dataclass
class RunConfig:
    system: str  # FCIDUMP path, fixture name, or synth:SEED:NORB:NELEC
    method: str = "adapt"  # adapt | fast-hg | fast-hsci
    mode: str = "statevector"  # statevector | finite
    shots: int = 1000
    max_ops: int = 40
    epsilon: float = EPSILON_DEFAULT
    vqe_gtol: float = 1e-9
    vqe_maxiter: int = 500
    seed: int = 0

    def __post_init__(self):
        if self.method not in METRICS:
            raise ValueError(f"unknown method {self.method!r}, pick one of {METRICS}")
        if self.mode == "finite-shot":
            self.mode = "finite"
        if self.mode not in ("statevector", "finite"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "finite" and self.shots < 1:
            raise ValueError("finite mode needs shots >= 1")


class RunAborted(RuntimeError):
    """An iteration failed mid-run; .records holds the partial trace."""

    def __init__(self, records, cause):
        super().__init__(f"run aborted at iteration {len(records) + 1}: {cause}")
        self.records = records
        self.cause = cause


# ---------------------------------------------------------------------
# inner VQE
# ---------------------------------------------------------------------

def _evolve_all(ref: StateVector, ops, thetas) -> StateVector:
    state = ref
    for op, th in zip(ops, thetas):
        state = apply_qeb_evolution(state, op, th)
    return state


def vqe_minimize(
    ref: StateVector,
    ops: list[ExcitationOperator],
    h: QubitOperator,
    warm: np.ndarray | None = None,
    gtol: float = 1e-9,
    maxiter: int = 500,
) -> tuple[np.ndarray, float]:
    """Statevector-exact L-BFGS-B over the ansatz angles.

    warm covers the leading parameters; missing trailing entries start
    at 0, which leaves the state (and hence the energy) unchanged, so a
    freshly appended operator can only improve on the previous optimum.
    Gradients are analytic: one reverse sweep computes all of dE/dtheta
    with a single application of H.
    """
    x0 = np.zeros(len(ops))
    if warm is not None:
        x0[: len(warm)] = warm
    if not ops:
        return x0, expectation(ref, h)

    def fun(x):
        # forward pass, keeping intermediate states for the sweep back
        states = [ref]
        for op, th in zip(ops, x):
            states.append(apply_qeb_evolution(states[-1], op, th))
        psi = states[-1]
        lam = apply_operator(psi, h)
        energy = float(np.vdot(psi.amps, lam.amps).real)
        grad = np.empty_like(x)
        phi = psi
        for m in range(len(ops) - 1, -1, -1):
            a_phi = apply_qeb_generator(phi, ops[m])
            grad[m] = 2.0 * float(np.vdot(lam.amps, a_phi.amps).real)
            if m:
                phi = states[m]
                lam = apply_qeb_evolution(lam, ops[m], -x[m])
        return energy, grad

    res = scipy.optimize.minimize(
        fun,
        x0,
        jac=True,
        method="L-BFGS-B",
        options={"gtol": gtol, "maxiter": maxiter, "ftol": 1e-15},
    )
    if not np.isfinite(res.fun):
        raise RuntimeError(f"optimizer produced non-finite energy: {res.message}")
    return res.x, float(res.fun)


# ---------------------------------------------------------------------
# FCI oracle
# ---------------------------------------------------------------------

def sector_determinants(n_so: int, n_elec: int, ms2: int) -> list[Determinant]:
    """All determinants of the (N_alpha, N_beta) sector, ascending occ."""
    n_orb = n_so // 2
    n_alpha = (n_elec + ms2) // 2
    n_beta = n_elec - n_alpha
    alphas = [sum(1 << i for i in c) for c in itertools.combinations(range(n_orb), n_alpha)]
    betas = [sum(1 << (i + n_orb) for i in c) for c in itertools.combinations(range(n_orb), n_beta)]
    occs = sorted(a | b for a in alphas for b in betas)
    return [Determinant(o, n_so) for o in occs]


def _sector_hamiltonian(hso: SpinOrbitalHamiltonian, dets: list[Determinant]):
    """Sparse H over the sector, built row-wise from excitation images."""
    index = {d.occ: i for i, d in enumerate(dets)}
    n_orb = hso.n_so // 2
    spin = lambda p: p // n_orb
    rows, cols, vals = [], [], []
    for i, d in enumerate(dets):
        occ = d.occupied()
        virt = [p for p in range(hso.n_so) if not d.occ >> p & 1]
        images = {d.occ}
        for o, v in itertools.product(occ, virt):
            if spin(o) == spin(v):
                images.add(d.occ ^ (1 << o) | (1 << v))
        for (o1, o2), (v1, v2) in itertools.product(
            itertools.combinations(occ, 2), itertools.combinations(virt, 2)
        ):
            if sorted((spin(o1), spin(o2))) == sorted((spin(v1), spin(v2))):
                images.add(d.occ ^ (1 << o1) ^ (1 << o2) | (1 << v1) | (1 << v2))
        for occ2 in images:
            j = index.get(occ2)
            if j is None or j < i:
                continue
            el = slater_condon(hso, d, dets[j])
            if el != 0.0 or i == j:
                rows.append(i), cols.append(j), vals.append(el)
                if j > i:
                    rows.append(j), cols.append(i), vals.append(el)
    dim = len(dets)
    return scipy.sparse.csr_matrix((vals, (rows, cols)), shape=(dim, dim))


def fci_ground_state(
    hso: SpinOrbitalHamiltonian, n_elec: int, ms2: int
) -> tuple[float, StateVector]:
    """Exact ground energy and state of the sector (includes e_core)."""
    dets = sector_determinants(hso.n_so, n_elec, ms2)
    dim = len(dets)
    if dim > FCI_MAX_DIM:
        raise ValueError(f"sector dimension {dim} exceeds {FCI_MAX_DIM}; use a smaller system")
    mat = _sector_hamiltonian(hso, dets)
    if dim <= FCI_DENSE_DIM:
        evals, evecs = np.linalg.eigh(mat.toarray())
        e0, v0 = float(evals[0]), evecs[:, 0]
    else:
        evals, evecs = scipy.sparse.linalg.eigsh(mat, k=1, which="SA")
        e0, v0 = float(evals[0]), evecs[:, 0]
    amps = np.zeros(1 << hso.n_so, dtype=complex)
    for d, c in zip(dets, v0):
        amps[d.occ] = c
    return e0, StateVector(amps, hso.n_so)


def fci_ground_energy(hso: SpinOrbitalHamiltonian, n_elec: int, ms2: int) -> float:
    return fci_ground_state(hso, n_elec, ms2)[0]


# ---------------------------------------------------------------------
# the adaptive loop
# ---------------------------------------------------------------------

def run_adaptive(config: RunConfig, on_record=None, capture: dict | None = None) -> list[IterationRecord]:
    """Grow the ansatz per config until a stopping rule fires.

    Stops at max_ops, when selection reports an empty pool, or once the
    energy is within 1e-10 Hartree of FCI.  on_record, when given, is
    called with each IterationRecord as it is produced so sinks can
    stream partial traces.  capture, when given, receives the final
    ansatz and the FCI baseline under keys "ansatz" and "e_fci".  Any
    mid-run failure raises RunAborted carrying the records emitted so
    far.
    """
    mi = resolve_system(config.system)
    hso = to_spin_orbitals(mi)
    h = jordan_wigner(hso)
    ref_det = hf_determinant(mi.n_elec, mi.ms2, hso.n_so)
    pool = build_pool(ref_det, hso.n_so)
    e_fci = fci_ground_energy(hso, mi.n_elec, mi.ms2)

    rng = np.random.default_rng(config.seed)
    ledger = ShotLedger()
    ref = prepare_reference(ref_det, hso.n_so)
    finite = config.mode == "finite"

    g_ops = None
    if config.method == "adapt":
        g_ops = [grad_operator(op, h) for op in pool.ops]

    sc_cache: dict = {}
    ansatz: list[AnsatzElement] = []
    thetas = np.zeros(0)
    state = ref
    energy = expectation(ref, h)
    records: list[IterationRecord] = []
    if capture is not None:
        capture["ansatz"] = ansatz
        capture["e_fci"] = e_fci

    for k in range(1, config.max_ops + 1):
        try:
            weights: dict[int, float] = {}
            if config.method == "adapt":
                for idx in pool.active_indices():
                    if finite:
                        weights[idx] = gradient_sampled(
                            state, pool.ops[idx], h, config.shots, rng, ledger, g_ops[idx]
                        )
                    else:
                        weights[idx] = gradient_exact(state, pool.ops[idx], h, g_ops[idx])
            else:
                if finite:
                    population = sample_determinants(state, config.shots, rng, ledger)
                else:
                    population = state.determinant_weights()
                for idx, op in enumerate(pool.ops):
                    if config.method == "fast-hg":
                        weights[idx] = hg_alpha(population, op, hso, sc_cache)
                    else:
                        weights[idx] = hsci_beta(population, op, hso, energy, sc_cache)

            report = rank_and_select(weights, pool, config.epsilon, config.method)
            if report.selected is None:
                break
            chosen = pool.ops[report.selected]
            ansatz.append(AnsatzElement(chosen, 0.0))
            thetas, energy = vqe_minimize(
                ref,
                [el.op for el in ansatz],
                h,
                warm=thetas,
                gtol=config.vqe_gtol,
                maxiter=config.vqe_maxiter,
            )
            for el, th in zip(ansatz, thetas):
                el.theta = float(th)
            state = _evolve_all(ref, [el.op for el in ansatz], thetas)

            rec = IterationRecord(
                iteration=k,
                method=config.method,
                mode=config.mode,
                shots_per_eval=config.shots if finite else 0,
                energy_hartree=energy,
                error_vs_fci_hartree=energy - e_fci,
                n_params=len(ansatz),
                n_cnots=cnot_count(ansatz),
                cumulative_shots=ledger.cumulative_shots,
                selected_operator=str(chosen),
                seed=config.seed,
                weights=report.weights,
            )
            records.append(rec)
            if on_record is not None:
                on_record(rec)
        except Exception as exc:  # noqa: BLE001 - partial trace must survive
            raise RunAborted(records, exc) from exc
        if abs(energy - e_fci) < ENERGY_CUTOFF:
            break
    return records
