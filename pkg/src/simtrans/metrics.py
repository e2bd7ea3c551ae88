"""Latency metrics over per-word delay sequences, plus report aggregation.

All formulas consume g(t): the amount of source (words in text mode, ms of
audio in speech mode) consumed when hypothesis word t was committed.

    AP   = (1 / (|x| * |y|)) * sum_t g(t)
    AL   = (1 / tau) * sum_{t<=tau} [g(t) - (t-1)/gamma],  gamma = |y|/|x|,
           tau = first t with g(t) = |x| (|y| when never reached)
    LAAL = AL with gamma = max(|y|, |y_ref|)/|x|
    DAL  = (1 / |y|) * sum_t [g'(t) - (t-1)/gamma],
           g'(1) = g(1), g'(t) = max(g(t), g'(t-1) + 1/gamma)
    RTF  = processing time / source audio duration
"""

import csv
import io
import json
from dataclasses import dataclass, field

from .bleu import corpus_bleu
from .errors import DegenerateInput, InputMismatch


@dataclass
class DelaySequence:
    g: list
    source_len: float
    hyp_len: int = None
    ref_len: int = None

    def __post_init__(self):
        self.g = [float(v) for v in self.g]
        if self.hyp_len is None:
            self.hyp_len = len(self.g)
        prev = float("-inf")
        for v in self.g:
            if v < prev:
                raise ValueError("delays must be non-decreasing")
            prev = v
        if self.g and prev > self.source_len:
            raise ValueError("a delay exceeds the source length")


def _check(d: DelaySequence):
    if d.hyp_len < 1 or not d.g:
        raise DegenerateInput("empty hypothesis")
    if d.source_len <= 0:
        raise DegenerateInput("empty source")


def average_proportion(d: DelaySequence) -> float:
    _check(d)
    return sum(d.g) / (d.source_len * d.hyp_len)


def _lagging(d: DelaySequence, gamma: float) -> float:
    tau = next((t for t, g in enumerate(d.g, start=1) if g >= d.source_len), d.hyp_len)
    acc = 0.0
    for t in range(1, tau + 1):
        acc += d.g[t - 1] - (t - 1) / gamma
    return acc / tau


def average_lagging(d: DelaySequence) -> float:
    _check(d)
    return _lagging(d, d.hyp_len / d.source_len)


def length_adaptive_al(d: DelaySequence) -> float:
    _check(d)
    if d.ref_len is None:
        raise DegenerateInput("reference length required")
    return _lagging(d, max(d.hyp_len, d.ref_len) / d.source_len)


def differentiable_al(d: DelaySequence) -> float:
    _check(d)
    gamma = d.hyp_len / d.source_len
    acc = 0.0
    g_prev = None
    for t, g in enumerate(d.g, start=1):
        g_prime = g if g_prev is None else max(g, g_prev + 1.0 / gamma)
        acc += g_prime - (t - 1) / gamma
        g_prev = g_prime
    return acc / d.hyp_len


def is_truncated(d: DelaySequence) -> bool:
    """True when g never reaches the source length (tau fell back to |y|)."""
    return all(g < d.source_len for g in d.g)


def real_time_factor(processing_ms: float, audio_ms: float) -> float:
    if audio_ms <= 0:
        raise DegenerateInput("audio duration must be positive")
    return processing_ms / audio_ms


@dataclass
class WaitHistogram:
    counts: dict = field(default_factory=dict)
    function_count: int = 0
    content_count: int = 0

    @property
    def total(self) -> int:
        return self.function_count + self.content_count

    @property
    def function_share(self) -> float:
        return self.function_count / self.total if self.total else 0.0


def wait_histogram(traces, function_words) -> WaitHistogram:
    """Count the source word immediately preceding each wait event."""
    function_words = {w.lower() for w in function_words}
    hist = WaitHistogram()
    for trace in traces:
        last_read = None
        for event in trace.events:
            if event.kind == "read":
                last_read = event.word
            elif event.kind == "wait" and last_read is not None:
                hist.counts[last_read] = hist.counts.get(last_read, 0) + 1
                if last_read.lower() in function_words:
                    hist.function_count += 1
                else:
                    hist.content_count += 1
    return hist


@dataclass
class LatencyReport:
    bleu: float
    al: float
    laal: float
    ap: float
    dal: float
    rtf: float = None
    unit: str = "words"
    session_count: int = 0
    truncated_sessions: int = 0
    skipped_sessions: int = 0

    def to_record(self) -> dict:
        return {
            "bleu": self.bleu,
            "al": self.al,
            "laal": self.laal,
            "ap": self.ap,
            "dal": self.dal,
            "rtf": self.rtf,
            "unit": self.unit,
            "session_count": self.session_count,
            "truncated_sessions": self.truncated_sessions,
            "skipped_sessions": self.skipped_sessions,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_record(), ensure_ascii=False)


def aggregate_report(delay_seqs, hypotheses, references, unit="words", rtf=None) -> LatencyReport:
    """Corpus BLEU plus per-session latency means.

    Sessions with empty hypotheses still count for BLEU but are skipped in
    the latency means (their lag is undefined).
    """
    if not (len(delay_seqs) == len(hypotheses) == len(references)):
        raise InputMismatch("delay/hypothesis/reference counts differ")
    scored = [d for d in delay_seqs if d.hyp_len >= 1 and d.g]
    if not scored:
        raise DegenerateInput("no session produced any hypothesis words")

    def mean(values):
        return sum(values) / len(values)

    return LatencyReport(
        bleu=corpus_bleu(hypotheses, references),
        al=mean([average_lagging(d) for d in scored]),
        laal=mean([length_adaptive_al(d) for d in scored]),
        ap=mean([average_proportion(d) for d in scored]),
        dal=mean([differentiable_al(d) for d in scored]),
        rtf=rtf,
        unit=unit,
        session_count=len(delay_seqs),
        truncated_sessions=sum(1 for d in scored if is_truncated(d)),
        skipped_sessions=len(delay_seqs) - len(scored),
    )


def bootstrap_reports(delay_seqs, hypotheses, references, n_resamples, rng,
                      unit="words", rtf=None):
    """Mean and standard deviation per metric over resampled sentence sets.

    Each resample draws len(sessions) indices with replacement using the
    supplied generator; metric aggregation is rerun on each resample.
    """
    if n_resamples < 1:
        raise ValueError("need at least one resample")
    size = len(delay_seqs)
    if size == 0:
        raise DegenerateInput("nothing to resample")
    samples = []
    for _ in range(n_resamples):
        idx = rng.integers(0, size, size=size)
        report = aggregate_report(
            [delay_seqs[i] for i in idx],
            [hypotheses[i] for i in idx],
            [references[i] for i in idx],
            unit=unit,
            rtf=rtf,
        )
        samples.append(report.to_record())

    fields = ["bleu", "al", "laal", "ap", "dal"]
    out = {}
    for name in fields:
        values = [s[name] for s in samples]
        m = sum(values) / len(values)
        var = sum((v - m) ** 2 for v in values) / len(values)
        out[name] = {"mean": m, "std": var ** 0.5}
    out["resamples"] = n_resamples
    return out


def tradeoff_curve(runs) -> str:
    """CSV of (k, quality, latency) rows sorted by k, for external plotting."""
    runs = list(runs)
    if len(runs) < 2:
        raise InputMismatch("a tradeoff curve needs at least two runs")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["k", "bleu", "al", "laal", "ap", "dal", "rtf", "unit"])
    for k, report in sorted(runs, key=lambda kr: kr[0]):
        writer.writerow([
            k,
            f"{report.bleu:.4f}",
            f"{report.al:.4f}",
            f"{report.laal:.4f}",
            f"{report.ap:.6f}",
            f"{report.dal:.4f}",
            "" if report.rtf is None else f"{report.rtf:.4f}",
            report.unit,
        ])
    return buf.getvalue()
