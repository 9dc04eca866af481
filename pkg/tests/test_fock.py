"""Determinant algebra and Slater-Condon rules.

The cross-oracle here is the dense Jordan-Wigner matrix: every rank of
matrix element (diagonal, single, double, including permutation signs)
is compared entrywise against it on random integrals.
"""

import itertools

import numpy as np
import pytest

from conftest import dense_sector_matrix, synth_system

from fastvqe.fock import (
    Determinant,
    ExcitationOperator,
    MAX_SPIN_ORBITALS,
    OperatorPool,
    apply_excitation,
    build_pool,
    hf_determinant,
    slater_condon,
)
from fastvqe.qubitmap import jordan_wigner
from fastvqe.solver import sector_determinants


# ---------------------------------------------------------- determinant

def test_determinant_basics():
    d = Determinant(0b0101, 4)
    assert d.n_elec == 2
    assert d.occupied() == (0, 2)
    assert d.spin_counts() == (1, 1)
    assert str(d) == "|1010>"  # little-endian rendering, qubit 0 first


def test_determinant_width_validation():
    with pytest.raises(ValueError):
        Determinant(0b100, 2)  # bit outside register
    with pytest.raises(ValueError):
        Determinant(-1, 2)
    with pytest.raises(ValueError):
        Determinant(0, MAX_SPIN_ORBITALS + 2)


# ----------------------------------------------------------- reference

def test_hf_determinant_examples():
    assert hf_determinant(2, 0, 4).occ == 0b0101  # bits {0, 2}
    assert hf_determinant(4, 0, 8).occupied() == (0, 1, 4, 5)
    assert hf_determinant(3, 1, 8).occupied() == (0, 1, 4)


def test_hf_determinant_infeasible():
    with pytest.raises(ValueError):
        hf_determinant(3, 3, 4)  # needs 3 alpha orbitals, only 2 exist
    with pytest.raises(ValueError):
        hf_determinant(3, 0, 8)  # parity mismatch
    with pytest.raises(ValueError):
        hf_determinant(2, -4, 8)  # negative beta count... alpha here


# ---------------------------------------------------------- excitation

def test_excitation_operator_validation():
    with pytest.raises(ValueError):
        ExcitationOperator("triple", (0,), (1,), 4)
    with pytest.raises(ValueError):
        ExcitationOperator("single", (0, 1), (2,), 8)  # wrong arity
    with pytest.raises(ValueError):
        ExcitationOperator("double", (1, 0), (2, 3), 8)  # not increasing
    with pytest.raises(ValueError):
        ExcitationOperator("double", (0, 1), (1, 2), 8)  # overlap
    with pytest.raises(ValueError):
        ExcitationOperator("single", (0,), (9,), 8)  # out of range
    with pytest.raises(ValueError):
        ExcitationOperator("single", (0,), (4,), 8)  # alpha -> beta


def test_excitation_str_and_transpose():
    op = ExcitationOperator("double", (0, 4), (1, 5), 8)
    assert str(op) == "0a,0b->1a,1b"
    t = op.transpose()
    assert t.occ_idx == (1, 5) and t.virt_idx == (0, 4)


def test_apply_excitation_examples():
    hf = Determinant(0b0101, 4)
    single = ExcitationOperator("single", (0,), (1,), 4)
    assert apply_excitation(single, hf).occ == 0b0110  # {1, 2}
    assert apply_excitation(single, Determinant(0b0110, 4)) is None  # source empty
    double = ExcitationOperator("double", (0, 2), (1, 3), 4)
    assert apply_excitation(double, hf).occ == 0b1010  # {1, 3}
    # target already occupied
    assert apply_excitation(single, Determinant(0b0011, 4)) is None


def test_apply_excitation_inverted_by_transpose():
    rng = np.random.default_rng(3)
    ops = build_pool(hf_determinant(4, 0, 8), 8).ops
    dets = sector_determinants(8, 4, 0)
    for op in ops:
        for d in dets:
            image = apply_excitation(op, d)
            if image is not None:
                back = apply_excitation(op.transpose(), image)
                assert back == d
    del rng


# ---------------------------------------------------------------- pool

def test_pool_h2_scale_exact_contents():
    pool = build_pool(hf_determinant(2, 0, 4), 4)
    labels = [str(op) for op in pool.ops]
    assert labels == ["0a->1a", "0b->1b", "0a,0b->1a,1b"]


def test_pool_sizes_match_combinatorial_count():
    # independent count: spin-conserving particle-hole singles + doubles
    def brute(n_so, n_elec, ms2):
        ref = hf_determinant(n_elec, ms2, n_so)
        occ, virt = set(ref.occupied()), set(range(n_so)) - set(ref.occupied())
        n_orb = n_so // 2
        spin = lambda p: p // n_orb
        singles = sum(
            1 for i in occ for a in virt if spin(i) == spin(a)
        )
        doubles = 0
        for i, j in itertools.combinations(sorted(occ), 2):
            for a, b in itertools.combinations(sorted(virt), 2):
                if sorted((spin(i), spin(j))) == sorted((spin(a), spin(b))):
                    doubles += 1
        return singles + doubles

    for n_so, n_elec, ms2 in [(4, 2, 0), (8, 4, 0), (12, 4, 0), (14, 4, 0), (12, 5, 1)]:
        pool = build_pool(hf_determinant(n_elec, ms2, n_so), n_so)
        assert len(pool.ops) == brute(n_so, n_elec, ms2)


def test_pool_reference_sizes():
    assert len(build_pool(hf_determinant(2, 0, 4), 4)) == 3
    assert len(build_pool(hf_determinant(4, 0, 8), 8)) == 26
    assert len(build_pool(hf_determinant(4, 0, 12), 12)) == 92
    assert len(build_pool(hf_determinant(4, 0, 14), 14)) == 140


def test_pool_deterministic_order_and_invariants():
    a = build_pool(hf_determinant(4, 0, 8), 8)
    b = build_pool(hf_determinant(4, 0, 8), 8)
    assert [str(op) for op in a.ops] == [str(op) for op in b.ops]
    kinds = [op.kind for op in a.ops]
    first_double = kinds.index("double")
    assert all(k == "single" for k in kinds[:first_double])
    assert all(k == "double" for k in kinds[first_double:])
    assert len(set(a.ops)) == len(a.ops)  # no duplicates
    # lexicographic within each kind
    singles = [(op.occ_idx, op.virt_idx) for op in a.ops if op.kind == "single"]
    doubles = [(op.occ_idx, op.virt_idx) for op in a.ops if op.kind == "double"]
    assert singles == sorted(singles) and doubles == sorted(doubles)


def test_pool_active_bookkeeping():
    pool = build_pool(hf_determinant(2, 0, 4), 4)
    assert pool.n_active == 3
    pool.deactivate(1)
    assert pool.active_indices() == (0, 2)
    pool.activate_all()
    assert pool.n_active == 3
    with pytest.raises(ValueError):
        OperatorPool((pool.ops[0], pool.ops[0]))  # duplicates rejected


# ------------------------------------------------------- slater-condon

def test_slater_condon_rank_rules():
    _, hso = synth_system(0, 3, 2)
    d1 = Determinant(0b000111 | 0, 6)
    # differs in 3 spin orbitals -> 0
    d2 = Determinant(0b111000, 6)
    assert slater_condon(hso, d1, d2) == 0.0
    with pytest.raises(ValueError):
        slater_condon(hso, d1, Determinant(0b000011, 6))  # particle number mismatch


def test_slater_condon_symmetric_for_real_integrals():
    _, hso = synth_system(5, 2, 2)
    dets = sector_determinants(4, 2, 0)
    for di in dets:
        for dj in dets:
            assert slater_condon(hso, di, dj) == pytest.approx(
                slater_condon(hso, dj, di), abs=1e-14
            )


def _jw_dense_block(hso, dets):
    h = jordan_wigner(hso).to_dense()
    idx = [d.occ for d in dets]
    return h[np.ix_(idx, idx)].real


def test_slater_condon_matches_dense_jw_all_sectors():
    _, hso = synth_system(8, 2, 2)
    for n_elec in range(0, 5):
        for ms2 in range(-n_elec, n_elec + 1, 2):
            n_a = (n_elec + ms2) // 2
            n_b = (n_elec - ms2) // 2
            if not (0 <= n_a <= 2 and 0 <= n_b <= 2):
                continue
            dets = sector_determinants(4, n_elec, ms2)
            got = dense_sector_matrix(hso, dets)
            want = _jw_dense_block(hso, dets)
            np.testing.assert_allclose(got, want, atol=1e-10)


def test_slater_condon_hf_diagonal_vs_jw(h2_hso, h2_ref):
    h = jordan_wigner(h2_hso).to_dense()
    want = h[h2_ref.occ, h2_ref.occ].real
    assert slater_condon(h2_hso, h2_ref, h2_ref) == pytest.approx(want, abs=1e-12)


def test_slater_condon_single_excitation_sign_vs_jw():
    # rank-1 elements carry the parity of orbitals between p and q;
    # the dense JW matrix is the sign oracle
    _, hso = synth_system(13, 3, 2)
    dets = sector_determinants(6, 3, 1)
    got = dense_sector_matrix(hso, dets)
    want = _jw_dense_block(hso, dets)
    np.testing.assert_allclose(got, want, atol=1e-10)
