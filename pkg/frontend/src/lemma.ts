/**
 * Detects pairs whose two sides differ only by an inflection-like suffix,
 * so the card can surface the lemma policy (verbs: past tense third person
 * singular; nouns and adjectives: masculine singular). Informational only.
 */

export interface LemmaHint {
  stem: string;
  translitSuffix: string;
  canonicalSuffix: string;
}

// Common Latin-script inflection endings seen in the corpus: feminine/plural
// marks and attached pronouns. Longest first so 'ine' wins over 'e'.
const INFLECTION_SUFFIXES = ['ine', 'in', 'at', 'ou', 'a', 'e', 'i'];

const MIN_STEM = 4;

function stems(word: string): Array<{ stem: string; suffix: string }> {
  const out = [{ stem: word, suffix: '' }];
  for (const suffix of INFLECTION_SUFFIXES) {
    if (word.length - suffix.length >= MIN_STEM && word.endsWith(suffix)) {
      out.push({ stem: word.slice(0, word.length - suffix.length), suffix });
    }
  }
  return out;
}

export function lemmaHint(translit: string, canonical: string): LemmaHint | null {
  if (translit === canonical) return null;
  for (const left of stems(translit)) {
    for (const right of stems(canonical)) {
      if (left.suffix === '' && right.suffix === '') continue;
      if (left.stem === right.stem) {
        return {
          stem: left.stem,
          translitSuffix: left.suffix,
          canonicalSuffix: right.suffix,
        };
      }
    }
  }
  return null;
}

export function lemmaHintText(hint: LemmaHint): string {
  const sides: string[] = [];
  if (hint.translitSuffix) sides.push(`'-${hint.translitSuffix}'`);
  if (hint.canonicalSuffix) sides.push(`'-${hint.canonicalSuffix}'`);
  return (
    `Both sides share the stem '${hint.stem}' and differ only by ${sides.join(' vs ')}. ` +
    'Lemma policy: verbs are listed in the past tense third person singular; ' +
    'nouns and adjectives in the masculine singular.'
  );
}
