import numpy as np
import pytest

from simtrans import _kernels
from simtrans.aligner import (
    align_pair,
    export_alignments,
    import_alignments,
    parse_pharaoh_line,
    train_table,
)
from simtrans.errors import BoundsError, EmptyCorpus, InputMismatch, ParseError

from oracles import naive_em

TWO_PAIR = [(["the", "dog"], ["le", "chien"]), (["the", "cat"], ["le", "chat"])]


def test_matches_naive_em_oracle():
    table = train_table(TWO_PAIR, iterations=10)
    ref_prob, ref_hist = naive_em(TWO_PAIR, 10)
    for (e, f), p in ref_prob.items():
        assert table.prob(e, f) == pytest.approx(p, abs=1e-12), (e, f)
    assert table.log_likelihood_history == pytest.approx(ref_hist, abs=1e-9)


def test_the_aligns_to_le():
    table = train_table(TWO_PAIR, iterations=10)
    row = table.row("the")
    assert max(row, key=row.get) == "le"


def test_single_pair_single_candidate():
    table = train_table([(["a"], ["b"])], iterations=1)
    row = table.row("a")
    assert max(row, key=row.get) == "b"
    assert table.prob("a", "b") == pytest.approx(1.0)


def test_log_likelihood_non_decreasing():
    t1 = train_table(TWO_PAIR, iterations=1)
    t2 = train_table(TWO_PAIR, iterations=2)
    assert t2.log_likelihood_history[1] >= t2.log_likelihood_history[0]
    assert t2.log_likelihood_history[0] == pytest.approx(t1.log_likelihood_history[0])


def test_rows_stochastic_every_iteration():
    for iters in (1, 3, 7):
        table = train_table(TWO_PAIR, iterations=iters)
        assert np.abs(table.row_sums() - 1.0).max() < 1e-9


def test_empty_corpus():
    with pytest.raises(EmptyCorpus):
        train_table([], iterations=3)


def test_align_two_pair_corpus():
    fwd = train_table(TWO_PAIR, iterations=10)
    rev = train_table(TWO_PAIR, iterations=10, direction="reverse")
    links = align_pair(["the", "dog"], ["le", "chien"], fwd, rev)
    assert links.links == {(0, 0), (1, 1)}


def test_align_all_oov_yields_no_links():
    fwd = train_table(TWO_PAIR, iterations=5)
    rev = train_table(TWO_PAIR, iterations=5, direction="reverse")
    links = align_pair(["x", "y"], ["p", "q"], fwd, rev)
    assert links.links == set()


def test_align_one_by_one():
    corpus = [(["x"], ["y"])]
    fwd = train_table(corpus, iterations=5)
    rev = train_table(corpus, iterations=5, direction="reverse")
    assert align_pair(["x"], ["y"], fwd, rev).links == {(0, 0)}


def test_intersection_is_target_functional(rng):
    # each target index appears at most once after symmetrization
    corpus = []
    for _ in range(60):
        n = int(rng.integers(1, 9))
        words = [f"w{int(rng.integers(0, 20))}" for _ in range(n)]
        corpus.append((words, [w.upper() for w in words]))
    fwd = train_table(corpus, iterations=8)
    rev = train_table(corpus, iterations=8, direction="reverse")
    for src, tgt in corpus[:20]:
        links = align_pair(src, tgt, fwd, rev)
        targets = [j for _, j in links.links]
        assert len(targets) == len(set(targets))


def test_kernel_paths_agree(monkeypatch):
    if not _kernels.HAVE_NUMBA:
        pytest.skip("numba unavailable")
    monkeypatch.setenv("SIMTRANS_NUMBA", "0")
    t_np = train_table(TWO_PAIR, iterations=6)
    monkeypatch.setenv("SIMTRANS_NUMBA", "1")
    t_nb = train_table(TWO_PAIR, iterations=6)
    np.testing.assert_allclose(t_np.probs, t_nb.probs, rtol=0, atol=1e-13)
    assert t_np.log_likelihood_history == pytest.approx(t_nb.log_likelihood_history)


def test_pharaoh_parse():
    assert parse_pharaoh_line("0-0 1-1") == {(0, 0), (1, 1)}
    assert parse_pharaoh_line("") == set()
    with pytest.raises(ParseError):
        parse_pharaoh_line("0-0 nope", line_no=4)


def test_import_alignments(tmp_path):
    path = tmp_path / "aln.txt"
    path.write_text("0-0 1-1\n\n")
    corpus = [(["a", "b"], ["x", "y"]), (["c"], ["z"])]
    sets = import_alignments(path, corpus)
    assert sets[0].links == {(0, 0), (1, 1)}
    assert sets[1].links == set()


def test_import_bounds_error(tmp_path):
    path = tmp_path / "aln.txt"
    path.write_text("3-0\n")
    with pytest.raises(BoundsError):
        import_alignments(path, [(["a", "b"], ["x"])])


def test_import_line_count_mismatch(tmp_path):
    path = tmp_path / "aln.txt"
    path.write_text("0-0\n0-0\n")
    with pytest.raises(InputMismatch):
        import_alignments(path, [(["a"], ["x"])])


def test_export_round_trip(tmp_path):
    from simtrans.aligner import AlignmentLinkSet

    path = tmp_path / "aln.txt"
    corpus = [(["a", "b"], ["x", "y"])]
    sets = [AlignmentLinkSet(links={(1, 0), (0, 1)}, source_len=2, target_len=2)]
    export_alignments(sets, path)
    assert path.read_text() == "0-1 1-0\n"
    assert import_alignments(path, corpus)[0].links == {(1, 0), (0, 1)}
