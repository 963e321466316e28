"""Deterministic synthetic corpus with planted spelling variants.

Generates families of made-up dialect-like words: one canonical form,
a handful of misspelled variants (vowel swaps, vowel omission,
gemination changes), one lexically distant distractor, all embedded in
templated context frames unique to the family. Digit spellings (9 for
q, 5 for kh, ...) are applied at render time so the cleaning pipeline
has real work to do. Ground-truth (variant -> canonical) pairs come
out alongside the corpus, which makes recall and precision measurable
exactly.

Runnable: python3 -m darijanorm.synthdata --out <dir>
"""
from __future__ import annotations

import argparse
import random
from dataclasses import dataclass
from pathlib import Path

from .evaluate import ReferenceDictionary, save_reference
from .ingest import TOKEN_RE, RawComment, clean_corpus
from .lexicon import Lexicon, LexiconEntry, save_lexicon
from .simscore import seq_ratio, skeletonize

# consonant inventory; 'x' is excluded because cleaning rewrites it to 'kh'
_ONSETS = (
    "b", "ch", "d", "f", "g", "gh", "h", "j", "k", "kh",
    "l", "m", "n", "q", "r", "s", "t", "w", "z", "3", "7",
)
_VOWELS = ("a", "e", "i", "o", "u", "ou")
_CODAS = ("", "b", "d", "f", "k", "l", "m", "n", "r", "s", "t")

_VOWEL_SWAPS = {"a": "e", "e": "a", "i": "e", "o": "ou", "u": "ou"}

# cleaned spelling -> digit spelling, inverse of the ingest digit rules
_DIGIT_RENDERS = (("kh", "5"), ("gh", "4"), ("gh", "8"), ("q", "9"), ("t", "6"), ("a", "2"))

_MAX_ATTEMPTS = 4000


@dataclass(frozen=True)
class SynthConfig:
    families: int = 40
    frames_per_family: int = 32
    min_variants: int = 3
    max_variants: int = 8
    canonical_count: int = 30
    distractor_count: int = 12
    context_words_per_family: int = 5
    separation: float = 0.5
    decorate_prob: float = 0.15
    seed: int = 7

    def __post_init__(self) -> None:
        if self.families < 1:
            raise ValueError("families must be >= 1")
        if not 1 <= self.min_variants <= self.max_variants:
            raise ValueError("need 1 <= min_variants <= max_variants")
        if self.frames_per_family < max(self.canonical_count, self.max_variants, self.distractor_count):
            raise ValueError("frames_per_family must cover the largest planted count")
        if not 0.0 < self.separation <= 1.0:
            raise ValueError("separation must be in (0, 1]")


@dataclass(frozen=True)
class PlantedVariant:
    surface: str
    canonical: str
    count: int


@dataclass(frozen=True)
class SyntheticCorpus:
    raw_lines: tuple[str, ...]
    canonicals: tuple[str, ...]
    variants: tuple[PlantedVariant, ...]
    distractors: tuple[str, ...]
    config: SynthConfig

    @property
    def truth_pairs(self) -> frozenset[tuple[str, str]]:
        """All planted (variant, canonical) pairs."""
        return frozenset((v.surface, v.canonical) for v in self.variants)

    @property
    def reliable_pairs(self) -> frozenset[tuple[str, str]]:
        """Pairs guaranteed to be buildable: the variant shares its
        canonical's consonant skeleton (lexical score 1.0) and was
        planted often enough to survive the trainer's minimum count."""
        return frozenset(
            (v.surface, v.canonical)
            for v in self.variants
            if v.count >= 2 and skeletonize(v.surface) == skeletonize(v.canonical)
        )

    def lexicon(self) -> Lexicon:
        return Lexicon([LexiconEntry(word, origin="sm-augmented") for word in self.canonicals])


def _make_word(rng: random.Random) -> str:
    parts = []
    for _ in range(rng.choice((2, 2, 3))):
        parts.append(rng.choice(_ONSETS))
        parts.append(rng.choice(_VOWELS))
    parts.append(rng.choice(_CODAS))
    return "".join(parts)


def _far_from(word: str, anchors: list[str], separation: float) -> bool:
    skel = skeletonize(word)
    return all(seq_ratio(skel, skeletonize(a)) < separation for a in anchors)


def _fresh_word(
    rng, anchors: list[str], taken: set[str], separation: float, min_skeleton: int = 2
) -> str:
    for _ in range(_MAX_ATTEMPTS):
        word = _make_word(rng)
        if len(word) < 4 or len(skeletonize(word)) < min_skeleton:
            continue
        if word in taken or not TOKEN_RE.match(word):
            continue
        if _far_from(word, anchors, separation):
            taken.add(word)
            return word
    raise RuntimeError("could not draw a sufficiently distinct word")


def _vowel_positions(word: str) -> list[int]:
    return [i for i, ch in enumerate(word) if ch in "aeiou"]


def _vowel_swap(word: str, rng: random.Random) -> str | None:
    spots = [i for i in _vowel_positions(word) if word[i] in _VOWEL_SWAPS]
    if not spots:
        return None
    i = rng.choice(spots)
    return word[:i] + _VOWEL_SWAPS[word[i]] + word[i + 1 :]


def _vowel_drop(word: str, rng: random.Random) -> str | None:
    spots = _vowel_positions(word)
    if len(spots) < 2:
        return None
    i = rng.choice(spots)
    return word[:i] + word[i + 1 :]


def _geminate(word: str, rng: random.Random) -> str | None:
    # double one consonant; never grow a run past two
    spots = [
        i
        for i, ch in enumerate(word)
        if ch not in "aeiou"
        and (i == 0 or word[i - 1] != ch)
        and (i + 1 >= len(word) or word[i + 1] != ch)
    ]
    if not spots:
        return None
    i = rng.choice(spots)
    return word[: i + 1] + word[i] + word[i + 1 :]


def _degeminate(word: str, rng: random.Random) -> str | None:
    spots = [i for i in range(len(word) - 1) if word[i] == word[i + 1] and word[i] not in "aeiou"]
    if not spots:
        return None
    i = rng.choice(spots)
    return word[:i] + word[i + 1 :]


_VARIANT_OPS = (_vowel_swap, _vowel_drop, _geminate, _degeminate)

_SINGLE_CONSONANTS = tuple("bdfghjklmnqrstwz37")

# lexical-score bands for sweep fixtures: variants landing here make each
# 0.05 threshold step drop at least one pair
SWEEP_BANDS = ((0.60, 0.65), (0.65, 0.70), (0.70, 0.75), (0.75, 0.80))


def _consonant_edit(word: str, rng: random.Random) -> str | None:
    spots = [i for i, ch in enumerate(word) if ch not in "aeiou"]
    if not spots:
        return None
    kind = rng.choice(("sub", "del", "ins"))
    if kind == "sub":
        i = rng.choice(spots)
        pool = [c for c in _SINGLE_CONSONANTS if c != word[i]]
        return word[:i] + rng.choice(pool) + word[i + 1 :]
    if kind == "del":
        if len(spots) < 2:
            return None
        i = rng.choice(spots)
        return word[:i] + word[i + 1 :]
    i = rng.randrange(len(word) + 1)
    return word[:i] + rng.choice(_SINGLE_CONSONANTS) + word[i:]


def _banded_variant(
    canonical: str,
    rng: random.Random,
    taken: set[str],
    band: tuple[float, float],
    other_canonicals: list[str],
    separation: float,
) -> str | None:
    """A variant whose skeleton similarity to the canonical falls inside
    the half-open band, found by stacking consonant edits."""
    lo, hi = band
    skel_c = skeletonize(canonical)
    for _ in range(_MAX_ATTEMPTS):
        variant = canonical
        for _ in range(3):
            edited = _consonant_edit(variant, rng)
            if not edited:
                break
            variant = edited
            score = seq_ratio(skeletonize(variant), skel_c)
            if score < lo:
                break
            if score >= hi:
                continue
            if (
                variant != canonical
                and variant not in taken
                and TOKEN_RE.match(variant)
                and _far_from(variant, other_canonicals, separation)
            ):
                return variant
            break
    return None


def _make_variant(canonical: str, rng: random.Random, taken: set[str]) -> str | None:
    variant = _VARIANT_OPS[rng.randrange(len(_VARIANT_OPS))](canonical, rng)
    if variant and rng.random() < 0.3:
        second = _VARIANT_OPS[rng.randrange(len(_VARIANT_OPS))](variant, rng)
        variant = second or variant
    if (
        variant
        and variant != canonical
        and variant not in taken
        and TOKEN_RE.match(variant)
        and skeletonize(variant) == skeletonize(canonical)
    ):
        return variant
    return None


def _decorate(token: str, rng: random.Random) -> str:
    """Render one phoneme of the token in its digit spelling."""
    options = [(src, dst) for src, dst in _DIGIT_RENDERS if src in token]
    if not options:
        return token
    src, dst = options[rng.randrange(len(options))]
    return token.replace(src, dst, 1)


def _make_frames(rng, context_words: list[str], count: int) -> list[tuple[str | None, ...]]:
    frames: set[tuple[str | None, ...]] = set()
    for _ in range(_MAX_ATTEMPTS):
        if len(frames) >= count:
            break
        length = rng.choice((4, 5, 6))
        slot = rng.randrange(length)
        frame = tuple(
            None if pos == slot else rng.choice(context_words) for pos in range(length)
        )
        frames.add(frame)
    if len(frames) < count:
        raise RuntimeError("could not build enough distinct frames")
    return sorted(frames, key=lambda f: (len(f), f.index(None), tuple(t or "" for t in f)))


def generate(cfg: SynthConfig | None = None) -> SyntheticCorpus:
    """Build the whole corpus; deterministic for a given config."""
    cfg = cfg or SynthConfig()
    rng = random.Random(cfg.seed)
    taken: set[str] = set()

    # skeletons of four-plus consonants leave room for similarity scores
    # anywhere in the sweep bands below
    canonicals: list[str] = []
    for _ in range(cfg.families):
        canonicals.append(_fresh_word(rng, canonicals, taken, cfg.separation, min_skeleton=4))

    # each lexical-score band is planted twice, spread over the families
    band_queue = [band for band in SWEEP_BANDS for _ in range(2)]
    band_quota = min(
        -(-len(band_queue) // cfg.families), cfg.max_variants - cfg.min_variants
    )

    variants: list[PlantedVariant] = []
    distractors: list[str] = []
    sentences: list[list[str]] = []
    for family_idx, canonical in enumerate(canonicals):
        context_words = [
            _fresh_word(rng, canonicals, taken, cfg.separation)
            for _ in range(cfg.context_words_per_family)
        ]
        frames = _make_frames(rng, context_words, cfg.frames_per_family)

        others = [c for c in canonicals if c != canonical]
        banded: list[str] = []
        queue_pos = 0
        while queue_pos < len(band_queue) and len(banded) < band_quota:
            drawn = _banded_variant(
                canonical, rng, taken, band_queue[queue_pos], others, cfg.separation
            )
            if drawn:
                band_queue.pop(queue_pos)
                taken.add(drawn)
                banded.append(drawn)
            else:
                queue_pos += 1

        room = cfg.max_variants - len(banded)
        target = rng.randint(cfg.min_variants, max(cfg.min_variants, room))
        family_variants: list[str] = []
        for _ in range(_MAX_ATTEMPTS):
            if len(family_variants) >= target:
                break
            drawn = _make_variant(canonical, rng, taken)
            if drawn:
                taken.add(drawn)
                family_variants.append(drawn)
        if len(family_variants) < cfg.min_variants:
            raise RuntimeError(f"could not derive variants for {canonical!r}")

        counts = [rng.randint(3, 8) for _ in family_variants]
        if family_idx % 5 == 0:
            counts[0] = 2
        if family_idx % 4 == 0:
            counts[-1] = 1
        for extra in banded:
            family_variants.append(extra)
            counts.append(rng.randint(4, 8))
        variants.extend(
            PlantedVariant(v, canonical, c) for v, c in zip(family_variants, counts)
        )

        distractor = _fresh_word(rng, canonicals, taken, cfg.separation)
        distractors.append(distractor)

        fills = [(canonical, cfg.canonical_count), (distractor, cfg.distractor_count)]
        fills.extend(zip(family_variants, counts))
        for filler, count in fills:
            for frame in rng.sample(frames, count):
                sentences.append([filler if tok is None else tok for tok in frame])

    if band_queue:
        raise RuntimeError(f"could not plant sweep-band variants for bands {band_queue}")
    rng.shuffle(sentences)
    lines = []
    for sentence in sentences:
        rendered = [
            _decorate(tok, rng) if rng.random() < cfg.decorate_prob else tok
            for tok in sentence
        ]
        line = " ".join(rendered)
        if rng.random() < 0.1:
            line += "!!"
        lines.append(line)

    corpus = SyntheticCorpus(
        raw_lines=tuple(lines),
        canonicals=tuple(canonicals),
        variants=tuple(variants),
        distractors=tuple(distractors),
        config=cfg,
    )
    _check_planted_counts(corpus)
    return corpus


def _check_planted_counts(corpus: SyntheticCorpus) -> None:
    """The corpus must clean back to exactly the planted token counts;
    anything else means variants collided or got deduplicated away."""
    raw = [RawComment(id=str(i), text=line) for i, line in enumerate(corpus.raw_lines)]
    cleaned, _ = clean_corpus(raw)
    counts = cleaned.vocab_counts
    mismatches = []
    for word, expected in _planted_counts(corpus).items():
        if counts.get(word, 0) != expected:
            mismatches.append((word, expected, counts.get(word, 0)))
    if mismatches:
        raise RuntimeError(f"planted counts drifted after cleaning: {mismatches[:5]}")


def _planted_counts(corpus: SyntheticCorpus) -> dict[str, int]:
    expected = {c: corpus.config.canonical_count for c in corpus.canonicals}
    expected.update({d: corpus.config.distractor_count for d in corpus.distractors})
    expected.update({v.surface: v.count for v in corpus.variants})
    return expected


def write_fixture(corpus: SyntheticCorpus, out_dir: str | Path) -> dict[str, Path]:
    """Write raw text, canonical lexicon, and ground-truth reference."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "raw": out / "raw.txt",
        "lexicon": out / "lexicon.tsv",
        "reference": out / "reference.tsv",
    }
    paths["raw"].write_text("\n".join(corpus.raw_lines) + "\n", encoding="utf-8")
    save_lexicon(corpus.lexicon(), paths["lexicon"])
    save_reference(ReferenceDictionary(corpus.truth_pairs), paths["reference"])
    return paths


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description="generate a synthetic variant corpus")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--families", type=int, default=40)
    args = parser.parse_args(argv)
    cfg = SynthConfig(families=args.families, seed=args.seed)
    corpus = generate(cfg)
    paths = write_fixture(corpus, args.out)
    print(
        f"wrote {len(corpus.raw_lines)} lines, {len(corpus.canonicals)} canonicals, "
        f"{len(corpus.variants)} variants, {len(corpus.distractors)} distractors"
    )
    for name, path in paths.items():
        print(f"  {name}: {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
