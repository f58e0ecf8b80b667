'''
    ITERACOES_MARKOV

    ||> Objetivo: testes dos núcleos finitos (medida estacionária, dual, constante C).
'''

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from script.errors import KernelInvalid, NonUniqueStationary, NotBounded, ZeroMassState
from script.markov_kernels import (
    FiniteKernel, StationaryVector, boundedness_constant, bounded_pair, driving_pair, dual_kernel,
    duality_identity_residual, duality_residual, group_walk_kernel, iid_kernel, is_reversible,
    random_positive_kernel, read_kernel_file, stationary_distribution)
from script.trajectory import trial_rng

WORKED = FiniteKernel(np.array([[0.9, 0.1], [0.2, 0.8]]))
CYCLIC = FiniteKernel(np.array([[0.1, 0.8, 0.1], [0.1, 0.1, 0.8], [0.8, 0.1, 0.1]]))

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)
sizes = st.integers(min_value=2, max_value=8)


def test_estacionaria_duplamente_estocastica_e_uniforme():
    m = stationary_distribution(FiniteKernel(np.full((2, 2), 0.5)))
    assert_allclose(m.weights, [0.5, 0.5], atol=1e-14)


def test_estacionaria_do_par_exemplo():
    m = stationary_distribution(WORKED)
    assert_allclose(m.weights, [2 / 3, 1 / 3], atol=1e-14)
    assert m.residual <= 1e-10


def test_identidade_nao_tem_estacionaria_unica():
    with pytest.raises(NonUniqueStationary) as info:
        stationary_distribution(FiniteKernel(np.eye(2)))
    assert info.value.singular_values[1] < 1e-9


def test_cadeia_periodica_tem_estacionaria_uniforme():
    flip = FiniteKernel(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert_allclose(stationary_distribution(flip).weights, [0.5, 0.5], atol=1e-14)


def test_nucleo_invalido():
    with pytest.raises(KernelInvalid):
        FiniteKernel(np.array([[0.5, 0.6], [0.5, 0.5]]))
    with pytest.raises(KernelInvalid):
        FiniteKernel(np.array([[1.5, -0.5], [0.5, 0.5]]))
    with pytest.raises(KernelInvalid):
        StationaryVector(np.array([0.7, 0.7]))


def test_dual_do_par_exemplo_e_ele_mesmo():
    m = stationary_distribution(WORKED)
    assert_allclose(dual_kernel(WORKED, m).rows, WORKED.rows, atol=1e-14)


def test_dual_de_simetrico_uniforme():
    P = FiniteKernel(np.array([[0.2, 0.5, 0.3], [0.5, 0.1, 0.4], [0.3, 0.4, 0.3]]))
    Q = dual_kernel(P, StationaryVector(np.full(3, 1 / 3)))
    assert_allclose(Q.rows, P.rows.T, atol=1e-15)
    assert duality_residual(P, Q, np.full(3, 1 / 3)) == pytest.approx(0.0, abs=1e-15)


def test_dual_com_estado_sem_massa():
    with pytest.raises(ZeroMassState) as info:
        dual_kernel(WORKED, np.array([1.0, 0.0]))
    assert info.value.states == [1]


@settings(max_examples=100, deadline=None)
@given(seed=seeds, k=sizes)
def test_dual_exato_e_involutivo(seed, k):
    P = random_positive_kernel(k, trial_rng(seed, 0))
    m = stationary_distribution(P)
    Q = dual_kernel(P, m)
    assert duality_residual(P, Q, m) <= 1e-14
    assert_allclose(dual_kernel(Q, m).rows, P.rows, atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(seed=seeds, k=st.integers(min_value=2, max_value=4))
def test_identidade_integral_da_dualidade(seed, k):
    rng = trial_rng(seed, 1)
    P = random_positive_kernel(k, rng)
    m = stationary_distribution(P)
    Q = dual_kernel(P, m)
    for _ in range(4):
        assert duality_identity_residual(P, Q, m, rng.random((k, k))) <= 1e-12


def test_cadeia_nao_reversivel_nao_e_dual_de_si_mesma():
    m = stationary_distribution(CYCLIC)
    assert_allclose(m.weights, np.full(3, 1 / 3), atol=1e-14)
    assert duality_residual(CYCLIC, CYCLIC, m) > 0.1
    assert not is_reversible(CYCLIC, m)
    kappa = np.zeros((3, 3))
    kappa[0, 1] = 1.0
    assert duality_identity_residual(CYCLIC, CYCLIC, m, kappa) > 0.1


def test_toda_cadeia_de_dois_estados_e_reversivel():
    P = FiniteKernel(np.array([[0.5, 0.5], [0.9, 0.1]]))
    assert is_reversible(P, stationary_distribution(P))


def test_dualidade_com_formas_incompativeis():
    assert duality_residual(WORKED, CYCLIC, np.array([0.5, 0.5])) == float("inf")


def test_constante_do_par_exemplo():
    pair = boundedness_constant(WORKED, stationary_distribution(WORKED))
    assert_allclose(pair.density, [[1.35, 0.3], [0.3, 2.4]], atol=1e-14)
    assert pair.constant_C == pytest.approx(0.3, abs=1e-14)


def test_constante_iid_e_um():
    pair = bounded_pair(FiniteKernel(np.full((2, 2), 0.5)))
    assert_allclose(pair.density, np.ones((2, 2)))
    assert pair.constant_C == 1.0


def test_nucleo_com_zero_nao_e_limitado():
    P = FiniteKernel(np.array([[0.0, 1.0], [0.5, 0.5]]))
    with pytest.raises(NotBounded) as info:
        boundedness_constant(P, stationary_distribution(P))
    assert info.value.zero_entries == [(0, 0)]
    assert type(driving_pair(P)).__name__ == "DrivingPair"


def test_condutor_iid():
    P = iid_kernel([0.25, 0.75])
    m = stationary_distribution(P)
    assert_allclose(m.weights, [0.25, 0.75], atol=1e-14)
    assert_allclose(dual_kernel(P, m).rows, P.rows, atol=1e-14)


def test_passeio_no_grupo_uniforme_tem_constante_um():
    P = group_walk_kernel(6)
    pair = bounded_pair(P)
    assert_allclose(pair.stationary.weights, np.full(6, 1 / 6), atol=1e-14)
    assert pair.constant_C == pytest.approx(1.0)


def test_passeio_von_mises_e_duplamente_estocastico():
    P = group_walk_kernel(8, "vonmises", concentration=2.0)
    assert_allclose(P.rows.sum(axis=0), np.ones(8), atol=1e-12)
    assert_allclose(stationary_distribution(P).weights, np.full(8, 1 / 8), atol=1e-12)
    with pytest.raises(KernelInvalid):
        group_walk_kernel(4, "cauchy")


def test_leitura_de_arquivo(tmp_path):
    path = tmp_path / "nucleo.txt"
    path.write_text("# p\n0.9 0.1\n0.2 0.8\n", encoding="utf-8")
    assert_allclose(read_kernel_file(str(path)).rows, WORKED.rows)
    with pytest.raises(FileNotFoundError):
        read_kernel_file(str(tmp_path / "ausente.txt"))
