"""Apply a normalization dictionary to text, token by token."""
from __future__ import annotations

from dataclasses import dataclass

from .builder import NormalizationDictionary
from .ingest import clean_tokens
from .lexicon import Lexicon

AMBIGUITY_POLICIES = ("leave-unchanged", "most-frequent-canonical")


@dataclass(frozen=True)
class NormalizePolicy:
    on_ambiguous: str = "leave-unchanged"
    preprocess: bool = True

    def __post_init__(self) -> None:
        if self.on_ambiguous not in AMBIGUITY_POLICIES:
            raise ValueError(f"unknown ambiguity policy {self.on_ambiguous!r}")


def normalize_token(
    dictionary: NormalizationDictionary,
    lexicon: Lexicon,
    token: str,
    policy: NormalizePolicy | None = None,
    corpus_counts: dict[str, int] | None = None,
) -> str:
    """One token in, one token out.

    Canonical forms pass through, unambiguous dictionary hits map to
    their canonical, ambiguous hits follow the policy, and anything
    unknown is left alone.
    """
    if not token:
        raise ValueError("token must be nonempty")
    policy = policy or NormalizePolicy()
    if token in lexicon:
        return token
    canonicals = dictionary.canonicals_for(token)
    if not canonicals:
        return token
    if len(canonicals) == 1:
        return next(iter(canonicals))
    if policy.on_ambiguous == "leave-unchanged":
        return token
    if corpus_counts is None:
        raise ValueError("most-frequent-canonical policy requires corpus counts")
    return min(canonicals, key=lambda c: (-corpus_counts.get(c, 0), c))


def normalize_text(
    dictionary: NormalizationDictionary,
    lexicon: Lexicon,
    text: str,
    policy: NormalizePolicy | None = None,
    corpus_counts: dict[str, int] | None = None,
) -> str:
    """Normalize whole text: optional cleaning, then token-wise lookup.

    The token count after cleaning is preserved exactly; only spellings
    change.
    """
    policy = policy or NormalizePolicy()
    tokens = clean_tokens(text) if policy.preprocess else text.split()
    return " ".join(
        normalize_token(dictionary, lexicon, tok, policy, corpus_counts) for tok in tokens
    )
