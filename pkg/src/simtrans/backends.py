"""Translator backends: word-unit producers driven by prompt text.

A backend maps a prompt to exactly one unit per call: a word, a wait signal
or end-of-sentence. The engine passes allow_wait=False when waits are being
suppressed after source exhaustion; honoring it is best-effort for remote
backends and exact for the rule-based mocks.
"""

import hashlib
import json
import os
from dataclasses import dataclass

import requests

from .errors import (
    BackendUnavailable,
    MalformedResponse,
    ReplayMiss,
    ScriptUnderrun,
)
from .prompt import split_prompt
from .units import Signal, Unit, WAIT_TOKEN, unit_from_str, unit_to_str


class ScriptedBackend:
    """Replays a fixed unit sequence verbatim, ignoring the prompt."""

    def __init__(self, units):
        self.units = [unit_from_str(u) if isinstance(u, str) else u for u in units]
        self.pos = 0

    def next_unit(self, prompt: str, allow_wait: bool = True) -> Unit:
        if self.pos >= len(self.units):
            raise ScriptUnderrun(f"script exhausted after {self.pos} units")
        unit = self.units[self.pos]
        self.pos += 1
        return unit


class DictionaryBackend:
    """Word-for-word translation via a lookup table.

    Translates revealed source word i once i+lookahead is revealed, waits
    otherwise, and ends once every revealed word is translated and waiting
    is no longer allowed. Unknown words pass through unchanged.
    """

    def __init__(self, mapping, lookahead: int = 0):
        self.mapping = dict(mapping)
        self.lookahead = lookahead

    def next_unit(self, prompt: str, allow_wait: bool = True) -> Unit:
        source_words, target_words = split_prompt(prompt)
        idx = len(target_words)
        if idx >= len(source_words):
            return Signal.WAIT if allow_wait else Signal.EOS
        if allow_wait and idx + self.lookahead >= len(source_words):
            return Signal.WAIT
        return self.mapping.get(source_words[idx], source_words[idx])


@dataclass
class HttpBackendConfig:
    endpoint_url: str
    model_name: str = ""
    api_key_env: str = None       # name of the env var holding the bearer token
    top_p: float = 0.7
    max_unit_tokens: int = 12
    wait_literal: str = WAIT_TOKEN
    timeout_ms: float = 30000.0
    retries: int = 2

    def __post_init__(self):
        if self.retries < 0:
            raise ValueError("retries must be >= 0")
        if self.timeout_ms <= 0:
            raise ValueError("timeout_ms must be positive")


class HttpBackend:
    """Client for JSON-over-HTTP completion servers.

    Requests one unit per call using greedy decoding (temperature 0 with
    top_p passed through) and stop sequences [" ", wait literal] so the
    server returns at most one word. Responses: {"choices": [{"text": ...,
    "finish_reason": "stop"|"length"}]}; empty text with finish_reason
    "stop" means the sequence ended.
    """

    def __init__(self, cfg: HttpBackendConfig, session=None):
        self.cfg = cfg
        self.session = session or requests.Session()

    def _headers(self) -> dict:
        headers = {"Content-Type": "application/json"}
        if self.cfg.api_key_env:
            token = os.environ.get(self.cfg.api_key_env, "")
            if token:
                headers["Authorization"] = f"Bearer {token}"
        return headers

    def _request(self, prompt: str, allow_wait: bool) -> dict:
        stop = [" "]
        if allow_wait:
            stop.append(self.cfg.wait_literal)
        payload = {
            "model": self.cfg.model_name,
            "prompt": prompt,
            "max_tokens": self.cfg.max_unit_tokens,
            "temperature": 0.0,
            "top_p": self.cfg.top_p,
            "stop": stop,
        }
        last_error = None
        for _ in range(self.cfg.retries + 1):
            try:
                resp = self.session.post(
                    self.cfg.endpoint_url,
                    json=payload,
                    headers=self._headers(),
                    timeout=self.cfg.timeout_ms / 1000.0,
                )
                if resp.status_code == 200:
                    return resp.json()
                last_error = f"HTTP {resp.status_code}"
            except (requests.RequestException, ValueError) as exc:
                last_error = str(exc)
        raise BackendUnavailable(
            f"{self.cfg.endpoint_url} unavailable after "
            f"{self.cfg.retries + 1} attempts: {last_error}"
        )

    def next_unit(self, prompt: str, allow_wait: bool = True) -> Unit:
        data = self._request(prompt, allow_wait)
        try:
            choice = data["choices"][0]
            text = choice.get("text", "")
            finish = choice.get("finish_reason")
        except (KeyError, IndexError, TypeError) as exc:
            raise MalformedResponse(f"unexpected response shape: {data!r}") from exc

        stripped = text.strip()
        wait = self.cfg.wait_literal
        if not allow_wait:
            # suppression is best-effort: skip leading wait literals
            while stripped.startswith(wait):
                stripped = stripped[len(wait):].lstrip()
        if not stripped:
            if finish == "stop":
                return Signal.EOS
            raise MalformedResponse(
                f"whitespace-only completion with finish_reason={finish!r}"
            )
        if stripped.startswith(wait):
            return Signal.WAIT
        return stripped.split()[0]


class RecordingBackend:
    """Wraps another backend, appending (prompt hash, unit) pairs to a file."""

    def __init__(self, path, inner):
        self.path = path
        self.inner = inner
        self._fh = open(path, "a", encoding="utf-8")

    def next_unit(self, prompt: str, allow_wait: bool = True) -> Unit:
        unit = self.inner.next_unit(prompt, allow_wait=allow_wait)
        record = {"prompt_sha256": prompt_hash(prompt), "unit": unit_to_str(unit)}
        self._fh.write(json.dumps(record, ensure_ascii=False) + "\n")
        self._fh.flush()
        return unit

    def close(self):
        self._fh.close()


class ReplayBackend:
    """Serves units recorded by RecordingBackend; unseen prompts error.

    Repeated occurrences of the same prompt replay in recorded order, so a
    session re-run with identical inputs reproduces the original unit
    sequence exactly. Each session should use its own instance (fresh
    cursors); build them cheaply from a shared load_recording() result.
    """

    def __init__(self, recording):
        self.recording = recording
        self._cursor = {}

    def next_unit(self, prompt: str, allow_wait: bool = True) -> Unit:
        h = prompt_hash(prompt)
        units = self.recording.get(h)
        if not units:
            raise ReplayMiss(f"no recorded unit for prompt hash {h[:12]}...")
        idx = self._cursor.get(h, 0)
        if idx >= len(units):
            idx = len(units) - 1  # stationary tail: repeat the last recording
        self._cursor[h] = idx + 1
        return unit_from_str(units[idx])


def prompt_hash(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


def load_recording(path) -> dict:
    table = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            table.setdefault(rec["prompt_sha256"], []).append(rec["unit"])
    return table
