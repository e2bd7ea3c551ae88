"""Corpus-level BLEU-4 with mteval-13a tokenization.

Unsmoothed geometric mean of 1..4-gram precisions times the brevity
penalty, on the 0-100 scale. Any order with zero matches zeroes the score;
sentence-level smoothing variants are deliberately not provided.
"""

import math
import re
from collections import Counter

from .errors import InputMismatch

MAX_ORDER = 4

_PUNCT_PAT = re.compile(r"([\{-\~\[-\` -\&\(-\+\:-\@\/])")
_PERIOD_BEFORE = re.compile(r"([^0-9])([\.,])")
_PERIOD_AFTER = re.compile(r"([\.,])([^0-9])")
_DIGIT_DASH = re.compile(r"([0-9])(-)")
_WS = re.compile(r"\s+")


def tokenize_13a(line: str) -> list:
    """mteval-v13a tokenization: split symbols, keep digit-internal . and ,"""
    norm = line.replace("<skipped>", "")
    norm = norm.replace("-\n", "").replace("\n", " ")
    norm = (
        norm.replace("&quot;", '"')
        .replace("&amp;", "&")
        .replace("&lt;", "<")
        .replace("&gt;", ">")
    )
    norm = f" {norm} "
    norm = _PUNCT_PAT.sub(r" \1 ", norm)
    norm = _PERIOD_BEFORE.sub(r"\1 \2 ", norm)
    norm = _PERIOD_AFTER.sub(r" \1 \2", norm)
    norm = _DIGIT_DASH.sub(r"\1 \2 ", norm)
    return _WS.sub(" ", norm).strip().split()


def _ngram_counts(tokens, max_order=MAX_ORDER) -> Counter:
    counts = Counter()
    for n in range(1, max_order + 1):
        for i in range(len(tokens) - n + 1):
            counts[tuple(tokens[i : i + n])] += 1
    return counts


def corpus_bleu(hypotheses, references) -> float:
    """BLEU over parallel hypothesis/reference corpora (one ref per hyp)."""
    hypotheses = list(hypotheses)
    references = list(references)
    if not hypotheses or len(hypotheses) != len(references):
        raise InputMismatch(
            f"{len(hypotheses)} hypotheses vs {len(references)} references"
        )

    correct = [0] * MAX_ORDER
    total = [0] * MAX_ORDER
    sys_len = 0
    ref_len = 0
    for hyp, ref in zip(hypotheses, references):
        hyp_tokens = tokenize_13a(hyp)
        ref_tokens = tokenize_13a(ref)
        sys_len += len(hyp_tokens)
        ref_len += len(ref_tokens)
        ref_counts = _ngram_counts(ref_tokens)
        for ngram, count in _ngram_counts(hyp_tokens).items():
            n = len(ngram)
            total[n - 1] += count
            correct[n - 1] += min(count, ref_counts.get(ngram, 0))

    if sys_len == 0:
        return 0.0
    log_sum = 0.0
    for n in range(MAX_ORDER):
        if correct[n] == 0 or total[n] == 0:
            return 0.0
        log_sum += math.log(correct[n] / total[n])

    brevity = 1.0 if sys_len >= ref_len else math.exp(1.0 - ref_len / sys_len)
    return 100.0 * brevity * math.exp(log_sum / MAX_ORDER)
