import numpy as np
import pytest

from fastvqe.fock import build_pool, hf_determinant
from fastvqe.hamio import load_fcidump, resolve_system, synth_integrals, to_spin_orbitals
from fastvqe.qubitmap import jordan_wigner
from fastvqe.solver import sector_determinants


def pytest_configure(config):
    config.addinivalue_line("markers", "lih: opt-in long-running LiH benchmark")


@pytest.fixture(scope="session")
def h2_mi():
    return resolve_system("h2")


@pytest.fixture(scope="session")
def h2_hso(h2_mi):
    return to_spin_orbitals(h2_mi)


@pytest.fixture(scope="session")
def h2_h(h2_hso):
    return jordan_wigner(h2_hso)


@pytest.fixture(scope="session")
def h2_ref(h2_mi, h2_hso):
    return hf_determinant(h2_mi.n_elec, h2_mi.ms2, h2_hso.n_so)


@pytest.fixture(scope="session")
def h2_pool(h2_ref, h2_hso):
    return build_pool(h2_ref, h2_hso.n_so)


@pytest.fixture(scope="session")
def h4_mi():
    return resolve_system("h4")


@pytest.fixture(scope="session")
def h4_hso(h4_mi):
    return to_spin_orbitals(h4_mi)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


def synth_system(seed=0, n_orb=2, n_elec=2):
    mi = synth_integrals(seed, n_orb, n_elec)
    return mi, to_spin_orbitals(mi)


def random_sector_state(n_so, n_elec, ms2, rng):
    """Normalized random state supported on one (N_alpha, N_beta) sector."""
    from fastvqe.simcore import StateVector

    dets = sector_determinants(n_so, n_elec, ms2)
    amps = np.zeros(1 << n_so, dtype=complex)
    vals = rng.normal(size=len(dets)) + 1j * rng.normal(size=len(dets))
    vals /= np.linalg.norm(vals)
    for d, v in zip(dets, vals):
        amps[d.occ] = v
    return StateVector(amps, n_so)


def dense_sector_matrix(hso, dets):
    """Slater-Condon matrix over an explicit determinant list."""
    from fastvqe.fock import slater_condon

    m = len(dets)
    out = np.zeros((m, m))
    for i, di in enumerate(dets):
        for j, dj in enumerate(dets):
            out[i, j] = slater_condon(hso, di, dj)
    return out
