import random
import warnings

import numpy as np
import pytest

from bddqsp.blockenc import (
    PAULI_Z,
    ControlledFamily,
    gram_encoding,
    gram_target,
    projector_encoding,
)
from bddqsp.diagram import amplitude
from bddqsp.families import DeltaFamilySpec, binomial_wobdd, symmetric_obdd, SymmetricSpec
from bddqsp.generate import random_wfbdd
from bddqsp.weighting import uniform_weights

from conftest import all_inputs


def psi_of(d):
    return np.array([amplitude(d, x) for x in all_inputs(d.n)], dtype=complex)


def test_projector_single(single_weighted):
    spec = projector_encoding(single_weighted)
    assert spec.alpha == 1.0
    assert np.allclose(spec.block, [[0, 0], [0, 1]], atol=1e-12)
    assert spec.epsilon < 1e-12


def test_projector_or2_uniform(or2):
    d = uniform_weights(or2).diagram
    spec = projector_encoding(d)
    expect = np.zeros((4, 4))
    expect[1:, 1:] = 1 / 3
    assert np.abs(spec.block - expect).max() < 1e-12
    assert spec.num_ancillas == d.n + d.num_internal


@pytest.mark.parametrize("seed", range(12))
def test_projector_random(seed):
    rng = random.Random(seed)
    d = random_wfbdd(rng, rng.randint(1, 3), max_internal=6)
    spec = projector_encoding(d)
    psi = psi_of(d)
    P = spec.block
    assert np.abs(P - np.outer(psi, psi.conj())).max() < 1e-9
    assert np.abs(P - P.conj().T).max() < 1e-9
    assert np.abs(P @ P - P).max() < 1e-9
    assert np.linalg.matrix_rank(P, tol=1e-8) == 1
    assert np.linalg.norm(P, 2) <= 1 + 1e-9


def test_gram_identity_family(or2):
    d = uniform_weights(or2).diagram
    spec = gram_encoding(d, ControlledFamily.identity(2))
    assert np.abs(spec.block - np.eye(4)).max() < 1e-12


def test_gram_z_family_or2():
    # Uniform over {01, 10, 11}: A = (I Z + Z I + Z Z) / 3.
    from bddqsp.diagram import from_table

    d = uniform_weights(from_table(2, [(0, 1, 1, 3), (1, 2, 2, 3)], root=0, t0=2, t1=3)).diagram
    I = np.eye(2)
    expect = (np.kron(I, PAULI_Z) + np.kron(PAULI_Z, I) + np.kron(PAULI_Z, PAULI_Z)) / 3
    assert np.abs(gram_target(d, ControlledFamily.pauli_z(2)) - expect).max() < 1e-15
    spec = gram_encoding(d, ControlledFamily.pauli_z(2))
    assert np.abs(spec.block - expect).max() < 1e-12


@pytest.mark.parametrize("seed", range(8))
def test_gram_random_family_is_weighted_sum(seed):
    rng = random.Random(seed)
    np_rng = np.random.default_rng(seed)
    d = random_wfbdd(rng, rng.randint(1, 3), max_internal=6)

    def rand_u():
        q, _ = np.linalg.qr(np_rng.normal(size=(2, 2)) + 1j * np_rng.normal(size=(2, 2)))
        return q

    fam = ControlledFamily(tuple((rand_u(), rand_u()) for _ in range(d.n)))
    psi = psi_of(d)
    expect = sum(abs(psi[k]) ** 2 * fam.matrix(x) for k, x in enumerate(all_inputs(d.n)))
    spec = gram_encoding(d, fam)
    assert np.abs(spec.block - expect).max() < 1e-9
    assert np.linalg.norm(spec.block, 2) <= 1 + 1e-9


def test_gram_hermitian_for_hermitian_family():
    d = binomial_wobdd(DeltaFamilySpec(3, 0.5))
    spec = gram_encoding(d, ControlledFamily.pauli_z(3))
    assert np.abs(spec.block - spec.block.conj().T).max() < 1e-12


def test_gram_size_mismatch(or2_weighted):
    with pytest.raises(ValueError):
        gram_encoding(or2_weighted, ControlledFamily.identity(3))


def test_family_rejects_non_unitary():
    with pytest.raises(ValueError):
        ControlledFamily.uniform(1, np.eye(2), [[1, 1], [0, 1]])


def test_verification_skipped_above_cap():
    d = uniform_weights(symmetric_obdd(SymmetricSpec(4, 2))).diagram
    with pytest.warns(UserWarning, match="verification"):
        spec = projector_encoding(d)
    assert spec.block is None and spec.epsilon is None
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        projector_encoding(d, verify=False)
