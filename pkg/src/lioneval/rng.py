"""Deterministic 64-bit RNG for reproducible sampling.

SplitMix64 drives all randomness. Substream seeds are derived from a
master seed and a (language, dataset, stage) label so that results are
independent of the order in which streams are consumed:

    substream = splitmix64_mix(master_seed XOR fnv1a64("lang:dataset:stage"))

Stage 2 operates on the pooled per-language list and uses an empty
dataset name in the label (manifest validation rejects empty dataset
names, so the label cannot collide with a real dataset).
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1

_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def splitmix64_mix(state: int) -> int:
    """One SplitMix64 output step applied to ``state + GOLDEN``."""
    z = (state + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    return z ^ (z >> 31)


def fnv1a64(data: str) -> int:
    """FNV-1a 64-bit hash of the UTF-8 encoding of ``data``."""
    h = _FNV_OFFSET
    for byte in data.encode("utf-8"):
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


class SeededRng:
    """SplitMix64 stream; the sequence is fully determined by the seed."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return z ^ (z >> 31)

    def randbelow(self, n: int) -> int:
        """Uniform draw in [0, n) by 64-bit modulo reduction.

        The modulo bias is below n / 2**64, negligible for corpus-sized n;
        bit-exact reproducibility is what matters here.
        """
        if n <= 0:
            raise ValueError(f"randbelow requires n > 0, got {n}")
        return self.next_u64() % n


def substream_seed(master_seed: int, language: str, dataset: str, stage: str) -> int:
    """Order-independent per-(language, dataset, stage) seed derivation."""
    label = f"{language}:{dataset}:{stage}"
    return splitmix64_mix((master_seed & _MASK64) ^ fnv1a64(label))


def substream(master_seed: int, language: str, dataset: str, stage: str) -> SeededRng:
    return SeededRng(substream_seed(master_seed, language, dataset, stage))
