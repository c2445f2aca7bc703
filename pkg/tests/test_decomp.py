import json

import numpy as np
import pytest

from qdequant import decomp, qqm
from qdequant.errors import CostGuardError
from qdequant.fourier import l1_norm, wht_forward

RANDOM_CASES = [(n, m, t, seed) for seed, (n, m, t) in enumerate(
    [(n, m, t) for n in (1, 2, 3, 4) for m in (1, 2) for t in (0, 1, 2, 3)] * 2
)][:50]


def single_vector_algorithm(p1_full=False):
    dim = 2
    initial = np.array([1.0, 0.0])
    p1 = np.eye(dim) if p1_full else np.diag([1.0, 0.0])
    csop = qqm.CSOP((0, 1), (np.eye(dim) - p1, p1))
    return qqm.QueryAlgorithm(1, 1, 0, initial, [np.eye(dim)], csop)


def test_t0_identity_single_component():
    d = decomp.decompose(single_vector_algorithm())
    assert d.tuples == ((),)
    np.testing.assert_allclose(d.vectors[0], [1, 0])
    d_full = decomp.decompose(single_vector_algorithm(), include_final_level=True)
    assert d_full.tuples == ((0,),)
    np.testing.assert_allclose(d_full.vectors[0], [1, 0])


def test_t0_final_level_components_sum_to_initial():
    alg = qqm.build_random_algorithm(3, 2, 0, seed=5)
    d = decomp.decompose(alg, include_final_level=True)
    np.testing.assert_allclose(d.vectors.sum(axis=0), alg.initial, atol=1e-12)


def test_dj_n2_count_is_stable():
    counts = {decomp.decompose(qqm.build_deutsch_jozsa(2)).count for _ in range(3)}
    assert counts == {2}


@pytest.mark.parametrize("n", [2, 4, 8])
def test_dj_structure(n):
    d = decomp.decompose(qqm.build_deutsch_jozsa(n))
    assert d.tuples == tuple((i,) for i in range(1, n + 1))
    metrics = decomp.summary_metrics(d)
    assert metrics.d_count == n
    assert metrics.min_norm_sq == pytest.approx(1 / n)
    assert metrics.norm_sum_sq == pytest.approx(n)
    assert decomp.l_tilde(d) == pytest.approx(1.0)
    assert decomp.grouped_l(d) == pytest.approx(1.0)


def test_reconstruct_all_zero_input():
    alg = qqm.build_random_algorithm(2, 2, 2, seed=8)
    d = decomp.decompose(alg)
    np.testing.assert_allclose(decomp.reconstruct(d, 0), d.vectors.sum(axis=0), atol=1e-14)
    np.testing.assert_allclose(decomp.reconstruct(d, 0), decomp.reconstruction_target(alg, 0), atol=1e-10)


@pytest.mark.parametrize("n, m, t, seed", RANDOM_CASES[:20])
def test_reconstruction_identity_random(n, m, t, seed):
    alg = qqm.build_random_algorithm(n, m, t, seed)
    d = decomp.decompose(alg)
    for x in range(1 << n):
        diff = decomp.reconstruct(d, x) - decomp.reconstruction_target(alg, x)
        assert np.abs(diff).max() <= 1e-8


@pytest.mark.parametrize("seed", range(4))
def test_reconstruction_identity_with_final_level(seed):
    alg = qqm.build_random_algorithm(3, 1, 2, seed)
    d = decomp.decompose(alg, include_final_level=True)
    assert d.levels == 3
    for x in range(8):
        diff = decomp.reconstruct(d, x) - decomp.reconstruction_target(alg, x, include_final_level=True)
        assert np.abs(diff).max() <= 1e-8


def test_dj_reconstruction_tight():
    alg = qqm.build_deutsch_jozsa(4)
    d = decomp.decompose(alg)
    for x in range(16):
        assert np.abs(decomp.reconstruct(d, x) - decomp.reconstruction_target(alg, x)).max() <= 1e-10


@pytest.mark.parametrize("n, m, t, seed", RANDOM_CASES)
def test_chain(n, m, t, seed):
    alg = qqm.build_random_algorithm(n, m, t, seed)
    d = decomp.decompose(alg)
    l1 = l1_norm(wht_forward(qqm.output_probability_function(alg, 1)))
    metrics = decomp.summary_metrics(d)
    chain = [l1, decomp.l_tilde(d), metrics.norm_sum_sq, metrics.d_count, metrics.inv_min_norm]
    for a, b in zip(chain, chain[1:]):
        assert a <= b + 1e-9
    assert metrics.norm_sq_total + d.discarded_mass == pytest.approx(1.0, abs=1e-9)
    assert d.count <= (n + 1) ** (t + 1)


@pytest.mark.parametrize("n, m, t, seed", RANDOM_CASES[:20])
def test_grouped_equals_spectral_l1(n, m, t, seed):
    alg = qqm.build_random_algorithm(n, m, t, seed)
    d = decomp.decompose(alg)
    spec = wht_forward(qqm.output_probability_function(alg, 1))
    coeffs = decomp.grouped_coefficients(d)
    np.testing.assert_allclose(coeffs.real, spec.coeffs, atol=1e-8)
    assert np.abs(coeffs.imag).max() <= 1e-8
    assert decomp.grouped_l(d) == pytest.approx(l1_norm(spec), abs=1e-8)


def test_grouped_t0_constant():
    alg = qqm.build_random_algorithm(2, 1, 0, seed=3)
    d = decomp.decompose(alg)
    pi = qqm.output_probability_function(alg, 1).values[0]
    assert decomp.grouped_l(d) == pytest.approx(abs(pi))
    assert decomp.l_tilde(d) == pytest.approx(abs(pi))


def test_l_tilde_single_vector_full_projector():
    d = decomp.decompose(single_vector_algorithm(p1_full=True))
    assert decomp.l_tilde(d, 1) == pytest.approx(1.0)
    with pytest.raises(KeyError):
        decomp.l_tilde(d, 5)


@pytest.mark.parametrize("seed", range(3))
def test_level_projectors_partition_identity(seed):
    alg = qqm.build_random_algorithm(3, 2, 3, seed)
    for j in range(alg.t + 1):
        total = sum(decomp.level_projectors(alg, j))
        assert np.linalg.norm(total - np.eye(alg.dim)) <= 1e-9


def test_summary_metrics_examples():
    d = decomp.decompose(single_vector_algorithm())
    m = decomp.summary_metrics(d)
    assert (m.d_count, m.norm_sum_sq, m.min_norm_sq) == (1, 1.0, 1.0)

    # two orthogonal halves of equal weight
    initial = np.array([1.0, 1.0]) / np.sqrt(2)
    csop = qqm.CSOP((0, 1), (np.diag([1.0, 0.0]), np.diag([0.0, 1.0])))
    alg = qqm.QueryAlgorithm(1, 1, 1, initial, [np.eye(2), np.eye(2)], csop)
    m = decomp.summary_metrics(decomp.decompose(alg))
    assert m.d_count == 2
    assert m.norm_sum_sq == pytest.approx(2.0)
    assert m.min_norm_sq == pytest.approx(0.5)
    assert m.norm_sum_sq <= m.d_count + 1e-12 <= m.inv_min_norm + 2e-12


def test_empty_decomposition_rejected():
    d = decomp.decompose(single_vector_algorithm())
    empty = decomp.StateDecomposition(d.n, d.m, d.t, (), np.zeros((0, 2)), np.zeros(0, dtype=np.int64),
                                      1.0, d.threshold, d.final_unitary, d.csop)
    with pytest.raises(ValueError):
        decomp.summary_metrics(empty)


def test_cost_guard():
    # 31^5 tuples exceed the 10^7 guard
    big = qqm.QueryAlgorithm(30, 1, 4, np.eye(31)[0], [np.eye(31)] * 5, qqm.build_deutsch_jozsa(30).csop)
    with pytest.raises(CostGuardError):
        decomp.decompose(big)


def test_json_roundtrip():
    alg = qqm.build_random_algorithm(2, 2, 2, seed=6)
    d = decomp.decompose(alg)
    doc = json.loads(json.dumps(d.to_json()))
    assert doc["metadata"] == {"n": 2, "m": 2, "t": 2, "threshold": 1e-12, "levels": 2,
                               "discarded_mass": d.discarded_mass}
    back = decomp.decomposition_from_json(doc, alg)
    assert back.tuples == d.tuples
    np.testing.assert_array_equal(back.vectors, d.vectors)
    assert decomp.grouped_l(back) == pytest.approx(decomp.grouped_l(d))


def test_final_level_form_has_no_measurement_metrics():
    d = decomp.decompose(qqm.build_deutsch_jozsa(2), include_final_level=True)
    with pytest.raises(ValueError):
        decomp.l_tilde(d)
