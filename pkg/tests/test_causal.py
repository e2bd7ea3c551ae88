import pytest

from simtrans.aligner import AlignmentLinkSet
from simtrans.causal import (
    build_corpus,
    causal_align,
    pair_from_record,
    pair_to_record,
    read_corpus,
    verify_pair,
    write_corpus,
)
from simtrans.units import FILLER_TOKEN, WAIT_TOKEN

from conftest import random_permutation_pair
from oracles import min_waits_brute_force, rescan_causality


def links_of(pairs, ls, lt):
    return AlignmentLinkSet(links=set(pairs), source_len=ls, target_len=lt)


def test_monotone_identity_needs_nothing():
    out = causal_align(["a", "b"], ["x", "y"], links_of({(0, 0), (1, 1)}, 2, 2))
    assert out.target_words == ["x", "y"]
    assert out.source_words == ["a", "b"]
    assert out.wait_count == 0 and out.filler_count == 0


def test_inverted_pair():
    out = causal_align(["a", "b"], ["x", "y"], links_of({(1, 0), (0, 1)}, 2, 2))
    assert out.target_words == [WAIT_TOKEN, "x", "y"]
    assert out.source_words == ["a", "b", FILLER_TOKEN]
    assert out.wait_count == 1 and out.filler_count == 1


def test_single_late_link():
    out = causal_align(["s0", "s1", "s2", "s3"], ["t0"], links_of({(3, 0)}, 4, 1))
    assert out.target_words == [WAIT_TOKEN, WAIT_TOKEN, WAIT_TOKEN, "t0"]
    assert out.source_words == ["s0", "s1", "s2", "s3"]
    assert out.filler_count == 0


def test_source_longer_pads_target_with_waits():
    out = causal_align(["a", "b", "c"], ["x"], links_of({(0, 0)}, 3, 1))
    assert out.source_words == ["a", "b", "c"]
    assert out.target_words == ["x", WAIT_TOKEN, WAIT_TOKEN]
    assert len(out.source_words) == len(out.target_words)


def test_round_trip_strip():
    src, tgt = ["a", "b"], ["x", "y"]
    out = causal_align(src, tgt, links_of({(1, 0), (0, 1)}, 2, 2))
    assert out.stripped_source() == src
    assert out.stripped_target() == tgt


def test_causality_fuzz_with_independent_rescan(rng):
    for _ in range(300):
        src, tgt, links = random_permutation_pair(rng, max_len=12)
        out = causal_align(src, tgt, links_of(links, len(src), len(tgt)))
        record = pair_to_record(out)
        assert rescan_causality(record), record
        assert out.stripped_source() == src
        assert out.stripped_target() == tgt
        assert len(out.source_words) == len(out.target_words)


def test_greedy_is_minimal_for_small_pairs(rng):
    # exhaustive search over wait placements confirms no smaller count works
    for _ in range(150):
        n = int(rng.integers(1, 7))
        src = [f"s{i}" for i in range(n)]
        m = int(rng.integers(1, 7))
        tgt = [f"t{j}" for j in range(m)]
        links = set()
        for j in range(m):
            if rng.random() < 0.7:
                links.add((int(rng.integers(0, n)), j))
        out = causal_align(src, tgt, links_of(links, n, m))
        constraints = {}
        for i, j in links:
            constraints[j] = max(constraints.get(j, 0), i)
        # padding waits trail the last real word; insertion waits precede one
        tw = out.target_words
        last_real = max(idx for idx, w in enumerate(tw) if w != WAIT_TOKEN)
        inserted = sum(1 for w in tw[:last_real] if w == WAIT_TOKEN)
        best = min_waits_brute_force(m, constraints, max_waits=n + 1)
        assert best is not None
        assert inserted == best, (src, tgt, sorted(links))


def test_build_corpus_stats():
    pairs = [(["a", "b"], ["x", "y"]), (["c", "d"], ["p", "q"])]

    def identity_links(idx, s, t):
        return links_of({(0, 0), (1, 1)}, 2, 2)

    built, stats = build_corpus(pairs, None, None, align_fn=identity_links)
    assert stats.pair_count == 2 and stats.wait_total == 0 and stats.filler_total == 0

    def inverted_links(idx, s, t):
        return links_of({(1, 0), (0, 1)}, 2, 2)

    built, stats = build_corpus(pairs[:1], None, None, align_fn=inverted_links)
    assert stats.wait_total == 1 and stats.filler_total == 1


def test_build_corpus_empty():
    built, stats = build_corpus([], None, None, align_fn=lambda i, s, t: None)
    assert built == [] and stats.pair_count == 0


def test_corpus_file_round_trip(tmp_path, rng):
    pairs = []
    for _ in range(20):
        src, tgt, links = random_permutation_pair(rng, max_len=8)
        pairs.append(causal_align(src, tgt, links_of(links, len(src), len(tgt))))
    path = tmp_path / "corpus.jsonl"
    write_corpus(pairs, path)
    loaded = read_corpus(path)
    assert [pair_to_record(p) for p in loaded] == [pair_to_record(p) for p in pairs]


def test_verify_pair_catches_corruption():
    out = causal_align(["a", "b"], ["x", "y"], links_of({(1, 0), (0, 1)}, 2, 2))
    record = pair_to_record(out)
    assert verify_pair(record) == []
    corrupted = dict(record)
    corrupted["target"] = [w for w in record["target"] if w != WAIT_TOKEN]
    assert verify_pair(corrupted) != []


def test_pair_from_record_rejects_garbage():
    from simtrans.errors import ParseError

    with pytest.raises(ParseError):
        pair_from_record({"source": ["a"]}, line_no=3)
