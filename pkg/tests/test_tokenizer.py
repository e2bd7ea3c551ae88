import json

import pytest

from simtrans.errors import EmptySentence
from simtrans.tokenizer import detokenize, tokenize

from conftest import FIXTURES


def test_simple_sentence():
    assert tokenize("I like tea.").words == ["I", "like", "tea", "."]


def test_comma_split():
    assert tokenize("Ja, gut.").words == ["Ja", ",", "gut", "."]


def test_contraction_split():
    assert tokenize("don't stop").words == ["do", "n't", "stop"]


def test_contraction_sample_frozen():
    # 50 sentences double-checked against an independent treebank-style
    # regex splitter before freezing; see fixtures/contraction_sample.json.
    cases = json.loads((FIXTURES / "contraction_sample.json").read_text())
    assert len(cases) == 50
    for case in cases:
        assert tokenize(case["sentence"]).words == case["tokens"], case["sentence"]


def test_empty_sentence_raises():
    with pytest.raises(EmptySentence):
        tokenize("   \t ")


def test_decimal_and_thousands_kept():
    assert tokenize("It costs 3.5 or 1,000 now.").words == \
        ["It", "costs", "3.5", "or", "1,000", "now", "."]


def test_hyphen_kept_inside_words():
    assert tokenize("a well-known fact").words == ["a", "well-known", "fact"]


def test_negative_number():
    assert tokenize("-5 degrees").words == ["-5", "degrees"]


def test_detokenize_examples():
    assert detokenize(["I", "like", "tea", "."]) == "I like tea."
    assert detokenize([]) == ""
    assert detokenize(["Ja", ",", "gut", "."]) == "Ja, gut."


def test_detokenize_quotes_and_parens():
    assert detokenize(['"', "Hi", ",", '"', "she", "said", "."]) == '"Hi," she said.'
    assert detokenize(["(", "a", ")"]) == "(a)"


def test_no_empty_words(rng):
    for _ in range(200):
        n = int(rng.integers(1, 40))
        text = "".join(
            rng.choice(list("ab .,!?()'\"-3"), size=n)
        )
        try:
            words = tokenize(text).words
        except EmptySentence:
            continue
        assert all(w and not any(c.isspace() for c in w) for w in words)


def _natural_sentence(rng):
    """Sentence in standard orthography: the round-trip domain."""
    lexicon = ["time", "stream", "don't", "it's", "well-known", "Anna",
               "quickly", "3.5", "1,000", "word", "they're", "O'Brien"]
    n = int(rng.integers(1, 9))
    words = [lexicon[int(rng.integers(0, len(lexicon)))] for _ in range(n)]
    parts = []
    for i, w in enumerate(words):
        parts.append(w)
        if i < n - 1 and rng.random() < 0.15:
            parts[-1] += ","
        if i < n - 1 and rng.random() < 0.1:
            parts.append("—")
    if rng.random() < 0.3:
        parts[0] = "(" + parts[0]
        parts[-1] += ")"
    if rng.random() < 0.3:
        parts[0] = '"' + parts[0]
        parts[-1] += '"'
    return " ".join(parts) + "."


def test_round_trip_on_natural_corpus(rng):
    for _ in range(500):
        sentence = _natural_sentence(rng)
        words = tokenize(sentence).words
        assert detokenize(words) == sentence, sentence


def test_tokenize_detokenize_fixed_point(rng):
    # tokenizer output is a fixed point of detokenize . tokenize
    for _ in range(500):
        words = tokenize(_natural_sentence(rng)).words
        assert tokenize(detokenize(words)).words == words


def test_determinism():
    s = 'The "quick" fox doesn\'t wait — (really), 3.5 times.'
    assert tokenize(s).words == tokenize(s).words
