import math

import numpy as np
import pytest

from conftest import dense_sector_matrix, random_sector_state, synth_system

import fastvqe.solver as solver
from fastvqe.fock import build_pool, hf_determinant, slater_condon
from fastvqe.hamio import MolecularIntegrals, to_spin_orbitals
from fastvqe.qubitmap import jordan_wigner
from fastvqe.simcore import apply_qeb_evolution, cnot_count, expectation, prepare_reference
from fastvqe.solver import (
    ENERGY_CUTOFF,
    FCI_MAX_DIM,
    RunAborted,
    RunConfig,
    fci_ground_energy,
    fci_ground_state,
    run_adaptive,
    sector_determinants,
    vqe_minimize,
)


# ------------------------------------------------------------------ vqe

def test_vqe_empty_ansatz_returns_reference_energy(h2_hso, h2_ref, h2_h):
    ref = prepare_reference(h2_ref, h2_hso.n_so)
    thetas, energy = vqe_minimize(ref, [], h2_h)
    assert thetas.size == 0
    assert energy == slater_condon(h2_hso, h2_ref, h2_ref)


def test_vqe_single_double_reaches_fci_on_h2(h2_mi, h2_hso, h2_ref, h2_h, h2_pool):
    ref = prepare_reference(h2_ref, h2_hso.n_so)
    double = [op for op in h2_pool.ops if op.kind == "double"]
    thetas, energy = vqe_minimize(ref, double, h2_h)
    e_fci = fci_ground_energy(h2_hso, h2_mi.n_elec, h2_mi.ms2)
    assert abs(energy - e_fci) < 1e-8


def test_vqe_converges_to_stationary_point(h2_hso, h2_ref, h2_h, h2_pool):
    # central differences of the exact energy must vanish at the optimum,
    # which fails if the analytic gradients fed to L-BFGS-B are wrong
    ref = prepare_reference(h2_ref, h2_hso.n_so)
    ops = list(h2_pool.ops)
    thetas, energy = vqe_minimize(ref, ops, h2_h, gtol=1e-10)

    def e_at(x):
        state = ref
        for op, th in zip(ops, x):
            state = apply_qeb_evolution(state, op, float(th))
        return expectation(state, h2_h)

    assert e_at(thetas) == pytest.approx(energy, abs=1e-12)
    step = 1e-5
    for m in range(len(ops)):
        up, dn = thetas.copy(), thetas.copy()
        up[m] += step
        dn[m] -= step
        assert abs(e_at(up) - e_at(dn)) / (2 * step) < 1e-6


def test_vqe_warm_start_does_not_regress(h2_hso, h2_ref, h2_h, h2_pool):
    ref = prepare_reference(h2_ref, h2_hso.n_so)
    ops = []
    thetas = np.zeros(0)
    prev = math.inf
    for op in h2_pool.ops:
        ops.append(op)
        thetas, energy = vqe_minimize(ref, ops, h2_h, warm=thetas)
        assert energy <= prev + 1e-10
        prev = energy


# ------------------------------------------------------------------ fci

def test_fci_noninteracting_two_orbitals():
    h = np.array([[-0.9, 0.0], [0.0, -0.4]])
    g = np.zeros((2, 2, 2, 2))
    mi = MolecularIntegrals(2, 1, 1, 0.25, h, g)
    hso = to_spin_orbitals(mi)
    assert fci_ground_energy(hso, 1, 1) == pytest.approx(-0.9 + 0.25, abs=1e-12)


def test_sector_dimension_combinatorics():
    dets = sector_determinants(8, 4, 0)
    assert len(dets) == math.comb(4, 2) ** 2
    dets = sector_determinants(12, 4, 2)
    assert len(dets) == math.comb(6, 3) * math.comb(6, 1)
    for d in dets:
        assert d.spin_counts() == (3, 1)


def test_fci_matches_dense_jw_minimum():
    _, hso = synth_system(43, 2, 2)
    dets = sector_determinants(4, 2, 0)
    dense = dense_sector_matrix(hso, dets)
    want = np.linalg.eigvalsh(dense)[0]
    assert fci_ground_energy(hso, 2, 0) == pytest.approx(want, abs=1e-10)


def test_fci_ground_state_is_eigenvector():
    _, hso = synth_system(47, 3, 4)
    h = jordan_wigner(hso)
    energy, state = fci_ground_state(hso, 4, 0)
    assert state.norm() == pytest.approx(1.0, abs=1e-12)
    assert expectation(state, h) == pytest.approx(energy, abs=1e-10)


def test_fci_oversized_sector_rejected():
    h = np.zeros((11, 11))
    g = np.zeros((11,) * 4)
    mi = MolecularIntegrals(11, 11, 1, 0.0, h, g)
    hso = to_spin_orbitals(mi)
    dim = math.comb(11, 6) * math.comb(11, 5)
    assert dim > FCI_MAX_DIM
    with pytest.raises(ValueError, match="sector"):
        fci_ground_energy(hso, 11, 1)


# ----------------------------------------------------------- run config

def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig("synth:0:2:2", method="quantum-leap")
    with pytest.raises(ValueError):
        RunConfig("synth:0:2:2", mode="analog")
    with pytest.raises(ValueError):
        RunConfig("synth:0:2:2", mode="finite", shots=0)
    cfg = RunConfig("synth:0:2:2", mode="finite-shot", shots=10)
    assert cfg.mode == "finite"


# --------------------------------------------------------- adaptive loop

@pytest.mark.parametrize("method", ["adapt", "fast-hg", "fast-hsci"])
def test_small_system_converges_all_methods(method):
    cfg = RunConfig("synth:0:2:2", method=method, mode="statevector", max_ops=6)
    records = run_adaptive(cfg)
    assert records, "no iterations recorded"
    assert abs(records[-1].error_vs_fci_hartree) < ENERGY_CUTOFF
    assert len(records) <= 3


def test_records_are_well_formed_and_monotone():
    cfg = RunConfig("synth:0:2:2", method="fast-hg", mode="finite", shots=100, max_ops=6, seed=2)
    capture: dict = {}
    records = run_adaptive(cfg, capture=capture)
    for k, rec in enumerate(records, start=1):
        assert rec.iteration == k
        assert rec.n_params == k
        assert rec.method == "fast-hg" and rec.mode == "finite"
        assert rec.shots_per_eval == 100 and rec.seed == 2
        assert rec.energy_hartree - rec.error_vs_fci_hartree == pytest.approx(
            capture["e_fci"], abs=1e-12
        )
        assert rec.error_vs_fci_hartree > -1e-9  # variational bound
        prefix = [el.op for el in capture["ansatz"][:k]]
        assert rec.n_cnots == cnot_count(prefix)
    counters = [(r.n_params, r.n_cnots, r.cumulative_shots) for r in records]
    assert counters == sorted(counters)
    assert records[-1].cumulative_shots == len(records) * 100  # FAST: k * S


def test_statevector_energy_non_increasing():
    cfg = RunConfig("synth:3:3:2", method="adapt", mode="statevector", max_ops=10)
    records = run_adaptive(cfg)
    energies = [r.energy_hartree for r in records]
    for a, b in zip(energies, energies[1:]):
        assert b <= a + 1e-10


def test_adapt_finite_ledger_is_pool_size_times_shots():
    cfg = RunConfig("synth:0:2:2", method="adapt", mode="finite", shots=50, max_ops=3, seed=0)
    records = run_adaptive(cfg)
    pool_size = 3
    for rec in records:
        assert rec.cumulative_shots == rec.iteration * 50 * pool_size


def test_identical_configs_reproduce_bitwise():
    cfg = RunConfig("synth:5:3:2", method="fast-hsci", mode="finite", shots=200, max_ops=5, seed=9)
    a = run_adaptive(cfg)
    b = run_adaptive(RunConfig("synth:5:3:2", method="fast-hsci", mode="finite", shots=200, max_ops=5, seed=9))
    assert len(a) == len(b)
    for ra, rb in zip(a, b):
        assert ra == rb  # dataclass equality covers every float bit-for-bit


def test_on_record_streams_in_order():
    seen = []
    cfg = RunConfig("synth:0:2:2", method="fast-hg", mode="statevector", max_ops=4)
    records = run_adaptive(cfg, on_record=seen.append)
    assert seen == records


def test_max_ops_bounds_the_run():
    cfg = RunConfig("synth:7:3:4", method="adapt", mode="statevector", max_ops=2)
    records = run_adaptive(cfg)
    assert len(records) == 2


def test_run_aborted_carries_partial_records(monkeypatch):
    calls = {"n": 0}
    real = solver.vqe_minimize

    def flaky(*args, **kwargs):
        calls["n"] += 1
        if calls["n"] >= 2:
            raise RuntimeError("optimizer exploded")
        return real(*args, **kwargs)

    monkeypatch.setattr(solver, "vqe_minimize", flaky)
    cfg = RunConfig("synth:0:2:2", method="adapt", mode="statevector", max_ops=5)
    with pytest.raises(RunAborted) as err:
        run_adaptive(cfg)
    assert len(err.value.records) == 1
    assert "iteration 2" in str(err.value)
    assert isinstance(err.value.cause, RuntimeError)


def test_selected_operators_come_from_the_pool():
    cfg = RunConfig("synth:0:2:2", method="fast-hg", mode="statevector", max_ops=6)
    records = run_adaptive(cfg)
    pool = build_pool(hf_determinant(2, 0, 4), 4)
    labels = {str(op) for op in pool.ops}
    for rec in records:
        assert rec.selected_operator in labels
        assert set(rec.weights) == set(range(len(pool.ops)))
