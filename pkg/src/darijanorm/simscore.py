"""Lexical similarity scoring for Arabizi spelling variants.

All functions operate on already-cleaned tokens (lowercase, alphabet a-z
plus the digits 3 and 7 that stand in for Arabic phonemes).
"""
from __future__ import annotations

from dataclasses import dataclass

VOWELS = frozenset("aeiou")

#: Scoring methods accepted by :func:`score`.
METHODS = ("lexim", "seqmatch", "seqmatch_skeleton", "seqmatch_soundex")

DEFAULT_THRESHOLD = 0.70

# Consonant classes for the dialect-adapted Soundex. Digraphs ch/kh/gh are
# treated as single units; consonants missing here (h, q, k, g, c, 3, 7)
# pass through unchanged, vowels are dropped.
_SOUNDEX_DIGRAPHS = ("ch", "kh", "gh")
_SOUNDEX_CLASSES = {
    "b": "1", "f": "1", "m": "1", "p": "1", "v": "1", "w": "1",
    "d": "2", "t": "2", "l": "2", "n": "2",
    "s": "3", "z": "3",
    "j": "4", "y": "4", "ch": "4",
    "r": "5", "kh": "5", "gh": "5",
}


@dataclass(frozen=True)
class ScoreMethod:
    """A scoring function name paired with its acceptance threshold."""

    kind: str
    threshold: float = DEFAULT_THRESHOLD

    def __post_init__(self) -> None:
        if self.kind not in METHODS:
            raise ValueError(f"unknown scoring method {self.kind!r}")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold {self.threshold} outside [0, 1]")


def edit_distance(s1: str, s2: str) -> int:
    """Levenshtein distance: unit-cost insertions, deletions, substitutions."""
    if s1 == s2:
        return 0
    if not s1:
        return len(s2)
    if not s2:
        return len(s1)
    prev = list(range(len(s2) + 1))
    cur = [0] * (len(s2) + 1)
    for i, c1 in enumerate(s1, start=1):
        cur[0] = i
        for j, c2 in enumerate(s2, start=1):
            cur[j] = min(
                prev[j] + 1,
                cur[j - 1] + 1,
                prev[j - 1] + (c1 != c2),
            )
        prev, cur = cur, prev
    return prev[-1]


def lcs_length(s1: str, s2: str) -> int:
    """Length of the longest common subsequence (not substring)."""
    if not s1 or not s2:
        return 0
    prev = [0] * (len(s2) + 1)
    cur = [0] * (len(s2) + 1)
    for c1 in s1:
        for j, c2 in enumerate(s2, start=1):
            if c1 == c2:
                cur[j] = prev[j - 1] + 1
            else:
                cur[j] = max(prev[j], cur[j - 1])
        prev, cur = cur, prev
    return prev[-1]


def lcsr(s1: str, s2: str) -> float:
    """Longest common subsequence ratio, LCS over the longer length."""
    if not s1 and not s2:
        raise ValueError("lcsr undefined for two empty strings")
    return lcs_length(s1, s2) / max(len(s1), len(s2))


def lexim(s1: str, s2: str) -> float:
    """LCSR divided by edit distance, guarded at distance zero.

    Equal strings have distance 0, where the score falls back to the
    ratio itself (1.0).
    """
    if not s1 and not s2:
        raise ValueError("lexim undefined for two empty strings")
    ratio = lcsr(s1, s2)
    distance = edit_distance(s1, s2)
    if distance == 0:
        return ratio
    return ratio / distance


def _longest_match(s1: str, s2: str, lo1: int, hi1: int, lo2: int, hi2: int) -> tuple[int, int, int]:
    """Longest common substring of s1[lo1:hi1] and s2[lo2:hi2].

    Returns (start1, start2, length); among maximal matches the one
    starting earliest in s1, then earliest in s2, wins. Zero length
    means no common character.
    """
    best1, best2, best_len = lo1, lo2, 0
    # lengths[j] = length of the match ending at s1[i] / s2[j]
    lengths = [0] * (hi2 - lo2 + 1)
    for i in range(lo1, hi1):
        new_lengths = [0] * (hi2 - lo2 + 1)
        c1 = s1[i]
        for j in range(lo2, hi2):
            if c1 == s2[j]:
                k = lengths[j - lo2] + 1
                new_lengths[j - lo2 + 1] = k
                if k > best_len:
                    best1, best2, best_len = i - k + 1, j - k + 1, k
        lengths = new_lengths
    return best1, best2, best_len


def _matched_chars(s1: str, s2: str, lo1: int, hi1: int, lo2: int, hi2: int) -> int:
    if lo1 >= hi1 or lo2 >= hi2:
        return 0
    i, j, k = _longest_match(s1, s2, lo1, hi1, lo2, hi2)
    if k == 0:
        return 0
    return (
        k
        + _matched_chars(s1, s2, lo1, i, lo2, j)
        + _matched_chars(s1, s2, i + k, hi1, j + k, hi2)
    )


def seq_ratio(s1: str, s2: str) -> float:
    """Gestalt sequence-matching similarity.

    Recursively locates the longest common substring and recurses on the
    unmatched left and right remainders; the score is twice the matched
    character count over the total length.
    """
    if not s1 and not s2:
        raise ValueError("seq_ratio undefined for two empty strings")
    matched = _matched_chars(s1, s2, 0, len(s1), 0, len(s2))
    return 2.0 * matched / (len(s1) + len(s2))


def skeletonize(word: str) -> str:
    """Consonant skeleton: strip vowels, then collapse repeated characters.

    This erases the two most common variation sources, vowel choice and
    gemination doubling. May return the empty string.
    """
    out: list[str] = []
    for ch in word:
        if ch in VOWELS:
            continue
        if out and out[-1] == ch:
            continue
        out.append(ch)
    return "".join(out)


def _soundex_units(word: str) -> list[str]:
    units: list[str] = []
    i = 0
    while i < len(word):
        pair = word[i : i + 2]
        if pair in _SOUNDEX_DIGRAPHS:
            units.append(pair)
            i += 2
        else:
            units.append(word[i])
            i += 1
    return units


def ma_soundex(word: str) -> str:
    """Phonetic code adapted to Moroccan Arabic consonant classes.

    The first unit is kept verbatim, later units map to their class
    digit, vowels are dropped, unclassed consonants (including 3 and 7)
    pass through, and adjacent duplicate symbols collapse. The code is
    not truncated.
    """
    units = _soundex_units(word)
    symbols: list[str] = []
    for pos, unit in enumerate(units):
        if pos == 0:
            symbols.append(unit)
            continue
        if unit in VOWELS:
            continue
        symbols.append(_SOUNDEX_CLASSES.get(unit, unit))
    code: list[str] = []
    for sym in symbols:
        if code and code[-1] == sym:
            continue
        code.append(sym)
    return "".join(code)


def score(s1: str, s2: str, method: str | ScoreMethod) -> float:
    """Similarity of two tokens under one of the supported methods.

    The skeleton method falls back to plain sequence matching whenever
    either skeleton comes out empty (all-vowel words).
    """
    kind = method.kind if isinstance(method, ScoreMethod) else method
    if not s1 or not s2:
        raise ValueError("score requires nonempty strings")
    if kind == "lexim":
        return lexim(s1, s2)
    if kind == "seqmatch":
        return seq_ratio(s1, s2)
    if kind == "seqmatch_skeleton":
        k1, k2 = skeletonize(s1), skeletonize(s2)
        if not k1 or not k2:
            return seq_ratio(s1, s2)
        return seq_ratio(k1, k2)
    if kind == "seqmatch_soundex":
        return seq_ratio(ma_soundex(s1), ma_soundex(s2))
    raise ValueError(f"unknown scoring method {kind!r}")
