"""Transcript normalization and tokenization.

One pipeline is used everywhere text is compared or exported: lowercase,
strip punctuation, collapse whitespace. Scoring tokenizes the normalized
text into words (whitespace-delimited) or characters (Unicode scalars).
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field

# Characters treated as punctuation although Unicode files them under
# symbol categories (S*), which are otherwise retained. Kept small and
# overridable via NormProfile.extra_punctuation.
_DEFAULT_EXTRA_PUNCTUATION = ("～",)  # fullwidth tilde

# One-to-one lowercase exceptions: str.lower() expands these to multiple
# scalars, but the simple Unicode mapping is a single scalar.
_SIMPLE_LOWER = {"İ": "i"}  # LATIN CAPITAL LETTER I WITH DOT ABOVE


@dataclass(frozen=True)
class NormProfile:
    """Switches for the normalization pipeline. Defaults enable everything."""

    lowercase: bool = True
    strip_punctuation: bool = True
    collapse_whitespace: bool = True
    extra_punctuation: tuple[str, ...] = _DEFAULT_EXTRA_PUNCTUATION

    def to_dict(self) -> dict:
        return {
            "lowercase": self.lowercase,
            "strip_punctuation": self.strip_punctuation,
            "collapse_whitespace": self.collapse_whitespace,
            "extra_punctuation": list(self.extra_punctuation),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "NormProfile":
        return cls(
            lowercase=bool(data.get("lowercase", True)),
            strip_punctuation=bool(data.get("strip_punctuation", True)),
            collapse_whitespace=bool(data.get("collapse_whitespace", True)),
            extra_punctuation=tuple(data.get("extra_punctuation", _DEFAULT_EXTRA_PUNCTUATION)),
        )


DEFAULT_PROFILE = NormProfile()


def _lower_scalar(ch: str) -> str:
    # Per-scalar lowering keeps the output length equal to the input length;
    # full-string str.lower() may expand (e.g. U+0130) or apply contextual
    # mappings, which would break idempotence guarantees.
    if ch in _SIMPLE_LOWER:
        return _SIMPLE_LOWER[ch]
    low = ch.lower()
    return low if len(low) == 1 else ch


def _is_punctuation(ch: str, profile: NormProfile) -> bool:
    return unicodedata.category(ch).startswith("P") or ch in profile.extra_punctuation


def normalize(text: str, profile: NormProfile = DEFAULT_PROFILE) -> str:
    """Apply the configured pipeline; total function, never raises."""
    if profile.lowercase:
        text = "".join(_lower_scalar(ch) for ch in text)
    if profile.strip_punctuation:
        text = "".join(ch for ch in text if not _is_punctuation(ch, profile))
    if profile.collapse_whitespace:
        text = " ".join(text.split())
    return text


def tokenize_words(text: str) -> list[str]:
    """Split normalized text on whitespace; never yields empty tokens."""
    return text.split()


def tokenize_chars(text: str) -> list[str]:
    """Drop whitespace, then one token per Unicode scalar value."""
    return [ch for ch in text if not ch.isspace()]
