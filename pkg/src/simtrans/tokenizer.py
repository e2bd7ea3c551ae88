"""Deterministic word segmentation with punctuation treated as words.

The rule table is fixed so that corpus builds are reproducible without any
external tokenizer:

* input is NFC-normalized, then split on whitespace;
* every mark in ``.,!?;:"()[]{}—–…«»“”‘’¿¡-'`` becomes its own word, except
  - ``.``/``,``/``:`` flanked by digits (decimals, thousands, clock times),
  - ``-`` flanked by alphanumerics (``well-known``, ``3-4``) or prefixing a
    digit (``-5``),
  - ``'``/``’`` preceded by a letter or digit (``O'Brien``, ``cats'``);
* English contraction suffixes ``n't 's 're 've 'll 'd 'm`` (straight or
  curly apostrophe) peel off as separate words, so ``don't`` -> ``do n't``;
* anything not in the table (``%``, ``/``, ``@`` ...) stays inside its word.

``detokenize`` inverts the table: closers attach left, openers attach right,
straight double quotes alternate, contraction suffixes re-glue. Unspaced em
dashes and spaced quotes normalize away; natural orthography round-trips.
"""

import re
import unicodedata
from dataclasses import dataclass

from .errors import EmptySentence

_APOSTROPHES = ("'", "’")

_SPLIT_CHARS = set(".,!?;:\"()[]{}—–…«»“”‘’¿¡-") | set(_APOSTROPHES)

# Tokens that must survive re-tokenization unchanged.
_CONTRACTION_SUFFIXES = {"n't", "'s", "'re", "'ve", "'ll", "'d", "'m"}

_SUFFIX_RE = re.compile(r"(?i)(?:n['’]t|['’](?:re|ve|ll|s|d|m))$")

_CLOSERS = {".", ",", "!", "?", ";", ":", ")", "]", "}", "…", "»", "”"}
_OPENERS = {"(", "[", "{", "«", "“", "‘", "¿", "¡"}


@dataclass
class TokenizedSentence:
    words: list[str]
    original: str = ""

    def __post_init__(self):
        if not self.original:
            self.original = detokenize(self.words)

    def __len__(self):
        return len(self.words)

    def __iter__(self):
        return iter(self.words)


def _normalize_suffix(tok: str) -> str:
    return tok.lower().replace("’", "'")


def _keep_inline(chunk: str, i: int) -> bool:
    ch = chunk[i]
    prev = chunk[i - 1] if i > 0 else ""
    nxt = chunk[i + 1] if i + 1 < len(chunk) else ""
    if ch in ".,:" :
        return prev.isdigit() and nxt.isdigit()
    if ch in _APOSTROPHES:
        return prev.isalnum()
    if ch == "-":
        if prev.isalnum() and nxt.isalnum():
            return True
        return nxt.isdigit() and not prev.isalnum()  # sign of a number
    return False


def _peel_contractions(word: str) -> list[str]:
    tail = []
    while len(word) > 1:
        m = _SUFFIX_RE.search(word)
        if m is None or m.start() == 0:
            break
        tail.append(word[m.start():])
        word = word[: m.start()]
    tail.reverse()
    return [word] + tail


def _split_chunk(chunk: str) -> list[str]:
    if _normalize_suffix(chunk) in _CONTRACTION_SUFFIXES:
        return [chunk]
    parts = []
    buf = []
    for i, ch in enumerate(chunk):
        if ch in _SPLIT_CHARS and not _keep_inline(chunk, i):
            if buf:
                parts.append("".join(buf))
                buf = []
            parts.append(ch)
        else:
            buf.append(ch)
    if buf:
        parts.append("".join(buf))
    out = []
    for part in parts:
        if len(part) > 1 and any(a in part for a in _APOSTROPHES):
            out.extend(_peel_contractions(part))
        else:
            out.append(part)
    return out


def tokenize(sentence: str) -> TokenizedSentence:
    """Segment a raw sentence into words, punctuation standing alone.

    Deterministic and idempotent on its own space-joined output. Raises
    EmptySentence when nothing is left after trimming.
    """
    original = sentence
    norm = unicodedata.normalize("NFC", sentence).strip()
    if not norm:
        raise EmptySentence("sentence is empty after trimming")
    words = []
    for chunk in norm.split():
        words.extend(w for w in _split_chunk(chunk) if w)
    return TokenizedSentence(words=words, original=original)


def _attach_prev(tok: str) -> bool:
    if tok in _CLOSERS:
        return True
    if tok == "’":  # bare curly close quote
        return True
    if len(tok) > 1 and tok[0] in _APOSTROPHES:
        return True  # 's, 'll, possessive remainders
    if _normalize_suffix(tok) == "n't":
        return True
    return False


def detokenize(words) -> str:
    """Join words back into surface text per the same rule table."""
    out = []
    glue_next = False
    dq_open = False
    for w in words:
        attach_prev = False
        attach_next = False
        if w == '"':
            attach_prev = dq_open
            attach_next = not dq_open
            dq_open = not dq_open
        elif w == "'":
            attach_next = True  # tokenize glues closing quotes to the word
        elif w in _OPENERS:
            attach_next = True
        elif _attach_prev(w):
            attach_prev = True
        if out and not glue_next and not attach_prev:
            out.append(" ")
        out.append(w)
        glue_next = attach_next
    return "".join(out)
