"""Statistical word alignment: EM-trained lexical tables plus intersection.

Training follows the classic one-to-many lexical translation model: every
target word is generated by exactly one source position (a positionless NULL
source word absorbs target words with no counterpart). Tables are trained in
both directions and per-position argmax links are intersected, which keeps
only high-confidence correspondences and guarantees each target index links
at most once.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import BoundsError, EmptyCorpus, InputMismatch, ParseError

DEFAULT_ITERATIONS = 15


def _word_list(sentence) -> list[str]:
    words = getattr(sentence, "words", sentence)
    return list(words)


@dataclass
class AlignmentLinkSet:
    links: set
    source_len: int
    target_len: int

    def __post_init__(self):
        for i, j in self.links:
            if not (0 <= i < self.source_len and 0 <= j < self.target_len):
                raise BoundsError(
                    f"link ({i},{j}) outside {self.source_len}x{self.target_len}"
                )

    def sorted_links(self) -> list:
        return sorted(self.links)


@dataclass
class TranslationTable:
    """Sparse row-stochastic table p(target word | source word).

    Row 0 is the NULL source word. Rows cover only co-occurring pairs; any
    other combination has probability zero.
    """

    source_vocab: list[str]
    target_vocab: list[str]
    row_ptr: np.ndarray
    col: np.ndarray
    probs: np.ndarray
    iterations_run: int
    log_likelihood_history: list[float]
    _src_index: dict = field(repr=False, default_factory=dict)
    _tgt_index: dict = field(repr=False, default_factory=dict)

    def _row_slice(self, row: int):
        return slice(int(self.row_ptr[row]), int(self.row_ptr[row + 1]))

    def _prob_by_ids(self, e: int, f: int) -> float:
        sl = self._row_slice(e)
        cols = self.col[sl]
        k = np.searchsorted(cols, f)
        if k < cols.size and cols[k] == f:
            return float(self.probs[sl][k])
        return 0.0

    def prob(self, source_word, target_word) -> float:
        """p(target_word | source_word); source_word=None selects NULL."""
        f = self._tgt_index.get(target_word)
        if f is None:
            return 0.0
        if source_word is None:
            return self._prob_by_ids(0, f)
        e = self._src_index.get(source_word)
        if e is None:
            return 0.0
        return self._prob_by_ids(e, f)

    def row(self, source_word) -> dict:
        """Full row as {target word: probability}; None selects NULL."""
        e = 0 if source_word is None else self._src_index.get(source_word)
        if e is None:
            return {}
        sl = self._row_slice(e)
        return {
            self.target_vocab[int(f)]: float(p)
            for f, p in zip(self.col[sl], self.probs[sl])
        }

    def row_sums(self) -> np.ndarray:
        return np.add.reduceat(self.probs, self.row_ptr[:-1])


def _encode(pairs):
    src_index, tgt_index = {}, {}
    src_vocab, tgt_vocab = [], []
    encoded = []
    for src_words, tgt_words in pairs:
        e_ids = [0]
        for w in src_words:
            if w not in src_index:
                src_index[w] = len(src_vocab) + 1  # 0 reserved for NULL
                src_vocab.append(w)
            e_ids.append(src_index[w])
        f_ids = []
        for w in tgt_words:
            if w not in tgt_index:
                tgt_index[w] = len(tgt_vocab)
                tgt_vocab.append(w)
            f_ids.append(tgt_index[w])
        encoded.append((np.array(e_ids, dtype=np.int64), np.array(f_ids, dtype=np.int64)))

    n_tgt = len(tgt_vocab)
    key_chunks = []
    group_sizes = []
    ll_const = 0.0
    for e_ids, f_ids in encoded:
        # one event per (target position, source position incl. NULL),
        # target-position major so E-step groups are contiguous
        key_chunks.append(np.add.outer(f_ids, e_ids * n_tgt).ravel())
        group_sizes.extend([e_ids.size] * f_ids.size)
        ll_const += f_ids.size * math.log(e_ids.size)

    all_keys = np.concatenate(key_chunks)
    slots = np.unique(all_keys)
    event_slot = np.searchsorted(slots, all_keys)
    slot_rows = slots // n_tgt
    col = (slots % n_tgt).astype(np.int64)
    n_rows = len(src_vocab) + 1
    row_ptr = np.searchsorted(slot_rows, np.arange(n_rows + 1)).astype(np.int64)
    group_ptr = np.concatenate(
        [[0], np.cumsum(np.array(group_sizes, dtype=np.int64))]
    ).astype(np.int64)
    return (
        src_vocab,
        tgt_vocab,
        src_index,
        tgt_index,
        col,
        row_ptr,
        event_slot.astype(np.int64),
        group_ptr,
        ll_const,
    )


def train_table(corpus, iterations: int = DEFAULT_ITERATIONS, direction: str = "forward") -> TranslationTable:
    """EM-train a lexical table over (source, target) sentence pairs.

    direction="reverse" swaps the sides before training, giving the table
    needed for intersection symmetrization. The per-iteration corpus
    log-likelihood (under the table entering that iteration) is recorded and
    is non-decreasing.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    pairs = [( _word_list(s), _word_list(t)) for s, t in corpus]
    if direction == "reverse":
        pairs = [(t, s) for s, t in pairs]
    elif direction != "forward":
        raise ValueError(f"unknown direction {direction!r}")
    if not pairs:
        raise EmptyCorpus("alignment training needs at least one sentence pair")

    (src_vocab, tgt_vocab, src_index, tgt_index,
     col, row_ptr, event_slot, group_ptr, ll_const) = _encode(pairs)

    probs = np.full(col.size, 1.0 / len(tgt_vocab), dtype=np.float64)
    history = []
    for _ in range(iterations):
        probs, ll = _kernels.em_sweep(probs, event_slot, group_ptr, row_ptr, ll_const)
        history.append(ll)

    return TranslationTable(
        source_vocab=src_vocab,
        target_vocab=tgt_vocab,
        row_ptr=row_ptr,
        col=col,
        probs=probs,
        iterations_run=iterations,
        log_likelihood_history=history,
        _src_index=src_index,
        _tgt_index=tgt_index,
    )


def _argmax_links(row_words, col_words, table):
    """Per-column argmax over row positions; NULL or zero evidence drops the link.

    Returns links as (row position, column position). Ties go to the lowest
    row position; NULL must strictly beat every position to absorb the word.
    """
    links = set()
    for j, cw in enumerate(col_words):
        null_p = table.prob(None, cw)
        best_p = 0.0
        best_i = -1
        for i, rw in enumerate(row_words):
            p = table.prob(rw, cw)
            if p > best_p:
                best_p = p
                best_i = i
        if best_i >= 0 and best_p > 0.0 and best_p >= null_p:
            links.add((best_i, j))
    return links


def align_pair(src, tgt, forward: TranslationTable, reverse: TranslationTable) -> AlignmentLinkSet:
    """Intersection of forward per-target and reverse per-source argmax links."""
    src_words = _word_list(src)
    tgt_words = _word_list(tgt)
    fwd = _argmax_links(src_words, tgt_words, forward)
    rev = {(i, j) for (j, i) in _argmax_links(tgt_words, src_words, reverse)}
    return AlignmentLinkSet(links=fwd & rev, source_len=len(src_words), target_len=len(tgt_words))


def parse_pharaoh_line(line: str, line_no: int = None) -> set:
    links = set()
    for tok in line.split():
        i_s, sep, j_s = tok.partition("-")
        if sep != "-" or not i_s.isdigit() or not j_s.isdigit():
            raise ParseError(f"bad alignment token {tok!r}", line_no)
        links.add((int(i_s), int(j_s)))
    return links


def format_pharaoh_line(links) -> str:
    return " ".join(f"{i}-{j}" for i, j in sorted(links))


def import_alignments(path, corpus) -> list:
    """Read Pharaoh "i-j" lines, validating bounds against a companion corpus."""
    sizes = [(len(_word_list(s)), len(_word_list(t))) for s, t in corpus]
    out = []
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if len(lines) != len(sizes):
        raise InputMismatch(
            f"{len(lines)} alignment lines for {len(sizes)} corpus pairs"
        )
    for n, (line, (src_len, tgt_len)) in enumerate(zip(lines, sizes), start=1):
        links = parse_pharaoh_line(line, n)
        for i, j in links:
            if i >= src_len or j >= tgt_len:
                raise BoundsError(
                    f"line {n}: link ({i},{j}) outside {src_len}x{tgt_len}"
                )
        out.append(AlignmentLinkSet(links=links, source_len=src_len, target_len=tgt_len))
    return out


def export_alignments(link_sets, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ls in link_sets:
            fh.write(format_pharaoh_line(ls.links) + "\n")
