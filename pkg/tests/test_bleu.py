import json

import pytest

from simtrans.bleu import corpus_bleu, tokenize_13a
from simtrans.errors import InputMismatch

from conftest import FIXTURES


def test_identity_corpus_scores_100():
    corpus = [
        "The cat sat on the mat today.",
        "A quick brown fox jumps over the lazy dog.",
    ]
    assert corpus_bleu(corpus, corpus) == pytest.approx(100.0, abs=1e-9)


def test_no_unigram_overlap_scores_zero():
    assert corpus_bleu(["aa bb cc dd"], ["xx yy zz ww"]) == 0.0


def test_golden_fixtures_within_tolerance():
    # golden values minted once from an independent reference scorer
    cases = json.loads((FIXTURES / "bleu_cases.json").read_text())
    assert len(cases) == 3
    for case in cases:
        score = corpus_bleu(case["hyps"], case["refs"])
        assert score == pytest.approx(case["bleu"], abs=0.01), case["name"]


def test_corpus_order_invariance():
    hyps = ["the cat sat down", "dogs bark loudly at night", "rain fell all day"]
    refs = ["the cat sat down", "dogs bark loudly at midnight", "rain fell all week"]
    base = corpus_bleu(hyps, refs)
    assert corpus_bleu(hyps[::-1], refs[::-1]) == pytest.approx(base, abs=1e-12)


def test_brevity_penalty_applies():
    # identical n-gram precision, shorter hypothesis must score lower
    full = corpus_bleu(["a b c d e f"], ["a b c d e f"])
    short = corpus_bleu(["a b c d"], ["a b c d e f"])
    assert short < full


def test_length_mismatch_rejected():
    with pytest.raises(InputMismatch):
        corpus_bleu(["a"], ["a", "b"])
    with pytest.raises(InputMismatch):
        corpus_bleu([], [])


def test_13a_tokenizer_splits():
    assert tokenize_13a("Hello, world! It costs 3.5 dollars.") == [
        "Hello", ",", "world", "!", "It", "costs", "3.5", "dollars", ".",
    ]
    assert tokenize_13a("x&amp;y") == ["x", "&", "y"]
    assert tokenize_13a("1996-2000") == ["1996", "-", "2000"]
