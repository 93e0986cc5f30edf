"""Smoke tests for the see_embed extension module."""

import math

import numpy as np
import pytest

import see_embed as se

LEXICON = (
    "chair\t-\tComeTogether|manage|fact;furniture|sit\n"
    "power\t-\tphysical|PhysicsPower;AnimalHuman|Power|politics;math|symbol|Quantity;"
    "country|place|politics;machine|function|Strength\n"
)


def test_kron_matches_numpy():
    assert se.kron([1, 2], [3, 4]).tolist() == [3, 4, 6, 8]
    rng = np.random.default_rng(0)
    x, y = rng.normal(size=5), rng.normal(size=3)
    assert np.array_equal(se.kron(x, y), np.kron(x, y))


def test_kron_chain_length_law_and_backward():
    factors = [np.array([1.0, 0.0]), np.array([0.0, 1.0]), np.array([1.0, 1.0])]
    chain = se.kron_chain(factors)
    assert chain.tolist() == [0, 0, 1, 1, 0, 0, 0, 0]

    upstream = np.ones(8)
    grads = se.kron_chain_backward(factors, upstream)
    assert len(grads) == 3
    # gradient of a linear map recovers the contraction of the others
    f = lambda w: float(np.dot(se.kron_chain([w, factors[1], factors[2]]), upstream))
    assert se.finite_diff_check(f, factors[0], grads[0], 1e-6) < 1e-6


def test_parameter_accounting():
    assert se.factor_dim(512, 3) == 8
    cfg = se.SeeConfig(d=512, o=3, r=5, m=18, unit_count=16326)
    assert se.param_count(cfg) == 2_350_800
    base = se.SeeConfig(d=512, o=3, r=5, m=1, unit_count=16326)
    assert se.solve_m_for_ratio(base, 46272 * 512, 10.0) == 18
    assert se.solve_m_for_ratio(base, 46272 * 512, 80.0) == 2
    assert se.lrmf_rank_for_ratio(46272, 512, 10.0) == 50
    assert se.word2ket_params(46272, 1, 2, 23) == 2_128_512
    assert se.morphte_params(10000, 2, 3, 8) == 160_000


def test_lexicon_pipeline_and_reconstruction():
    lex = se.parse_lexicon_text(LEXICON)
    assert lex.size == 2
    assert lex.morphemes_of("chair") == ["chair"]
    vocab = se.build_unit_vocab(lex)
    assert vocab.size == vocab.sememe_count + vocab.morpheme_count + 2

    table = se.compile_table(lex, ["chair", "power", "oovword"], vocab, 5, 3)
    stats = table.stats()
    assert stats["truncated_senses"] == 1
    assert stats["oov"] == 1

    cfg = se.SeeConfig(d=20, o=3, r=5, m=2, unit_count=vocab.size, seed=9)
    store = se.init_factors(cfg)
    dense = se.materialize(table, store, cfg)
    assert dense.shape == (3, 20)

    # independent numpy evaluation of the reconstruction sum
    grid = table.grid(table.word_id("chair"))
    ids = grid.ids()
    expected = np.zeros(cfg.q ** cfg.o)
    for i in range(cfg.m):
        for j in range(cfg.r):
            rows = [store.row(int(ids[j, k]), i) for k in range(cfg.o)]
            term = rows[0]
            for r in rows[1:]:
                term = np.kron(term, r)
            expected += term
    np.testing.assert_allclose(dense[0], expected[:20], rtol=0, atol=1e-12)

    zero_row = se.reconstruct_row(grid, store, cfg)
    assert np.array_equal(zero_row, dense[0])


def test_losses():
    t = np.ones((3, 4))
    assert se.embedding_mse(t, t) == 0.0
    assert se.embedding_mse(t, np.zeros((3, 4))) == 1.0
    assert se.hidden_mse(np.array([[1.0, 1.0]]), np.zeros((1, 2))) == 2.0

    assert se.kl_distill([1.0, 0.0], [0.0, 1.0], temperature=1.0) == pytest.approx(
        0.46211715726000974, abs=1e-9
    )
    grad = se.kl_distill_grad_student([1.0, 0.0], [0.0, 1.0], temperature=1.0)
    f = lambda z: se.kl_distill([1.0, 0.0], z, temperature=1.0)
    assert se.finite_diff_check(f, np.array([0.0, 1.0]), grad, 1e-6) < 1e-6

    uniform = np.full((2, 8), 1 / 8)
    onehot = np.zeros((2, 8))
    onehot[0, 3] = onehot[1, 0] = 1.0
    assert se.cross_entropy(uniform, onehot) == pytest.approx(math.log(8), abs=1e-12)

    report = se.total_loss(2.0, 3.0, 1.0, 4.0, stage="initial")
    assert report["total"] == 5.0
    assert se.total_loss(2.0, 3.0, 1.0, 4.0, stage="formal")["total"] == 10.0
    assert se.stage_of(0) == "initial"
    assert se.stage_of(2) == "formal"


def test_toy_harness_round_trip():
    cfg = se.TaskConfig(seed=3, vocab=80, num_sememes=12, num_morphemes=12,
                        seq_len=5, n_train=400, n_test=120)
    task = se.gen_task(cfg)
    assert len(task.tokens) == 80
    assert 0.15 < task.majority_baseline < 0.40

    teacher, stats = se.train_teacher(task, d=16, epochs=20, lr=0.3, seed=7)
    assert stats["test_acc"] > 0.8

    result = se.train_student_see(task, teacher, o=2, r=3, m=2, boundary=1, epochs=4, lr=0.1)
    assert result["compression_ratio"] >= 5.0
    trace = result["trace"]
    assert trace[0]["stage"] == "initial"
    assert trace[-1]["stage"] == "formal"
    assert trace[1]["embedding_mse"] < trace[0]["embedding_mse"]
    acc = se.evaluate_student(result["model"], task, "test")
    assert acc == pytest.approx(trace[-1]["test_acc"])
