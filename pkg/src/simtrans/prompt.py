"""The instruction prompt shared by dataset emission and live inference.

The layout is fixed byte-for-byte; regression tests compare against golden
files, so any change here is a format break:

    <s>[INST]
    <<SYS>>

    {SYSTEM_MESSAGE}
    <</SYS>>
    Translate this text: {PARTIAL_SOURCE} [/INST] {PARTIAL_TARGET}

Source and target slots are space-joined word lists; with no target words
the prompt ends with "[/INST] " including the trailing space. Disabling the
system message removes the whole <<SYS>> block (the fast-inference variant).
"""

from .units import WAIT_TOKEN

DEFAULT_TARGET_LANGUAGE = "German"

_INTERPRETER_MESSAGE = (
    "You are a professional conference interpreter. Given an English text "
    "you translate it into {language} as accurately and as concisely as "
    "possible, NEVER adding comments of your own. You output translation "
    "when the information available in the source is unambiguous, otherwise "
    "you output the wait token ({wait_token}), not flanked by anything else. "
    "It's important that you get this right."
)


def interpreter_system_message(language: str = DEFAULT_TARGET_LANGUAGE,
                               wait_token: str = WAIT_TOKEN) -> str:
    """Default system message instructing interpreter behavior."""
    return _INTERPRETER_MESSAGE.format(language=language, wait_token=wait_token)


def build_prompt(partial_source, partial_target, system_message=None) -> str:
    """Collate the prompt; system_message=None omits the <<SYS>> block."""
    head = "<s>[INST]\n"
    if system_message is not None:
        head += f"<<SYS>>\n\n{system_message}\n<</SYS>>\n"
    source_text = " ".join(partial_source)
    target_text = " ".join(partial_target)
    return f"{head}Translate this text: {source_text} [/INST] {target_text}"


def split_prompt(prompt: str):
    """Recover (source words, target words) from a prompt.

    Used by rule-based mock backends, which see only the prompt text. Splits
    on the last "[/INST]" marker, so it assumes ordinary words that do not
    themselves contain the marker.
    """
    marker = " [/INST] "
    head, sep, target_text = prompt.rpartition(marker)
    if not sep:
        return [], []
    lead = "Translate this text: "
    pos = head.rfind(lead)
    source_text = head[pos + len(lead):] if pos >= 0 else ""
    return source_text.split(), target_text.split()
