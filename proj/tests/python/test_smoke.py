import math

import pytest

import sccl

CLASS_WORDS = ["平淡", "喜欢", "难过", "恶心", "愤怒", "开心"]
FILLER = ["今天", "风景", "我们", "真的", "一起", "旅行"]


def class_corpus(n=12):
    docs = []
    for i in range(n):
        label = i % 6
        docs.append((label, [FILLER[i % len(FILLER)], CLASS_WORDS[label], FILLER[(i * 5 + 1) % len(FILLER)]]))
    return sccl.Corpus(docs)


def class_lexicon():
    return sccl.Lexicon({w: s for w, s in zip(CLASS_WORDS, [1, 1, -1, -1, -1, 1])})


def small_config(epochs=3):
    cfg = sccl.ModelConfig.toy()
    cfg.epochs = epochs
    cfg.batch_size = 4
    cfg.lr = 1e-2
    return cfg


def test_corpus_round_trip(tmp_path):
    corpus = class_corpus()
    assert len(corpus) == 12
    assert list(corpus.class_counts) == [2] * 6
    path = tmp_path / "c.tsv"
    corpus.save(path)
    back = sccl.Corpus.load(path)
    assert back.docs == corpus.docs
    train, test = corpus.split(0.25, seed=1)
    assert len(train) + len(test) == 12 and len(test) == 3
    with pytest.raises(sccl.DataError):
        sccl.Corpus([(9, ["x"])])


def test_squash_and_routing():
    v = sccl.squash([3.0, 4.0])
    assert math.isclose(v[0], 15 / 26, abs_tol=1e-12)
    assert math.isclose(v[1], 20 / 26, abs_tol=1e-12)
    u_hat = [[[0.5, -0.2], [0.1, 0.3], [1.0, 1.0]], [[-0.4, 0.9], [0.2, 0.2], [0.0, -1.0]]]
    out, couplings = sccl.dynamic_routing(u_hat, 3)
    assert len(out) == 3
    for j in range(3):
        assert math.hypot(*out[j]) < 1.0
    for i in range(2):
        assert math.isclose(sum(couplings[i * 3:(i + 1) * 3]), 1.0, abs_tol=1e-12)


def test_bigru_shape():
    h = sccl.bigru([[0.1, 0.2], [0.3, -0.1], [0.0, 0.5]], hidden=4)
    assert len(h) == 3 and len(h[0]) == 8


def test_lexicon_statistics_and_expansion():
    docs = [(1, ["好", "赞"]), (1, ["美", "赞", "风景"]), (2, ["坏", "烂"]), (2, ["差", "烂"]), (0, ["风景", "天气"])]
    stats = sccl.CorpusStats(sccl.Corpus(docs))
    assert stats.n_docs == 5
    assert stats.cooc("赞", "好") == 1
    assert math.isclose(stats.pmi("赞", "好"), math.log2(5 / 2))
    pos, neg = {"好", "美"}, {"坏", "差"}
    assert stats.so_pmi("赞", pos, neg) > 0
    assert stats.so_pmi("烂", pos, neg) < 0
    lex, added_pos, added_neg = sccl.expand_lexicon(sccl.Lexicon({"满意": 1}), pos, neg, stats, 1, 1)
    assert (added_pos, added_neg) == (1, 1)
    assert len(lex) == 3
    assert lex.entries()["赞"][0] == 1
    assert lex.sentiment_sequence(["赞", "风景"]) == ["赞"]
    assert lex.sentiment_sequence(["风景"]) == ["<NULLSENT>"]


def test_metrics():
    m = sccl.metrics([0, 1, 2], [0, 1, 1])
    assert math.isclose(m["accuracy"], 2 / 3)
    with pytest.raises(sccl.DataError):
        sccl.metrics([0], [0, 1])


def test_model_train_save_load(tmp_path):
    corpus = class_corpus()
    model = sccl.Model.build(small_config(), corpus, class_lexicon())
    losses = model.train(corpus)
    assert len(losses) == 3 and all(math.isfinite(x) for x in losses)
    p = model.distribution(["风景", "开心"])
    assert len(p) == sccl.NUM_CLASSES and math.isclose(sum(p), 1.0, abs_tol=1e-12)
    path = tmp_path / "m.ckpt"
    model.save(path)
    back = sccl.Model.load(path)
    assert back.distribution(["风景", "开心"]) == p
    assert back.evaluate(corpus) == model.evaluate(corpus)
    assert model.parameter_count > 0


def test_config_and_variants():
    assert "SCCL" in sccl.ablation_variants()
    assert len(sccl.ablation_variants()) == 7
    cfg = sccl.ModelConfig.from_json(sccl.ModelConfig.toy().to_json())
    assert cfg.to_json() == sccl.ModelConfig.toy().to_json()
    with pytest.raises(sccl.ConfigError):
        sccl.ModelConfig.from_json('{"unknown": 1}')


def test_gradcheck_and_cli():
    assert sccl.gradcheck() < 1e-4
    code, out, _ = sccl.run_cli(["gradcheck"])
    assert code == 0 and out.startswith("max_rel_error")
    code, _, _ = sccl.run_cli(["no-such-command"])
    assert code == 1
