/**
 * DOM rendering. The whole view is rebuilt from state on every change; at a
 * review queue's scale that is simpler and safer than incremental updates.
 */

import { lemmaHint, lemmaHintText } from './lemma.js';
import type { AppState } from './state.js';
import type { ContextSentence, PairCard, Stats } from './types.js';

function el(tag: string, className?: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function progressText(stats: Stats | null): string {
  if (!stats) return 'loading…';
  const decided = stats.accepted + stats.rejected + stats.remapped;
  const precision = stats.running_precision === null ? '—' : stats.running_precision.toFixed(2);
  return `${decided}/${stats.total} decided, precision ${precision}`;
}

function renderHeader(state: AppState): HTMLElement {
  const header = el('header', 'topbar');
  header.appendChild(el('h1', undefined, 'Normalization review'));
  header.appendChild(el('span', 'progress', progressText(state.stats)));

  const label = el('label', 'reviewer', 'reviewer ');
  const input = el('input', 'reviewer-input') as HTMLInputElement;
  input.type = 'text';
  input.value = state.reviewer;
  input.addEventListener('change', () => state.setReviewer(input.value));
  label.appendChild(input);
  header.appendChild(label);

  const exportLink = el('a', 'export-link', 'export TSV') as HTMLAnchorElement;
  exportLink.href = `${state.config.baseUrl}/export/reference`;
  header.appendChild(exportLink);
  return header;
}

function renderBanner(state: AppState): HTMLElement {
  const banner = el('div', 'banner');
  banner.appendChild(el('span', undefined, state.banner ?? ''));
  const retry = el('button', 'retry', 'Retry') as HTMLButtonElement;
  retry.type = 'button';
  retry.addEventListener('click', () => void state.refresh());
  banner.appendChild(retry);
  return banner;
}

function renderSentence(sentence: ContextSentence): HTMLElement {
  const item = el('li', 'sentence');
  sentence.tokens.forEach((token, index) => {
    if (index > 0) item.appendChild(document.createTextNode(' '));
    if (index === sentence.highlight_index) {
      item.appendChild(el('mark', undefined, token));
    } else {
      item.appendChild(document.createTextNode(token));
    }
  });
  return item;
}

function renderContextColumn(
  side: 'left' | 'right',
  word: string,
  contexts: ContextSentence[] | null,
  limit: number,
): HTMLElement {
  const column = el('div', `context-col ${side}`);
  column.appendChild(el('h3', undefined, word));
  if (contexts === null) {
    column.appendChild(el('p', 'loading', 'loading…'));
  } else if (contexts.length === 0) {
    column.appendChild(el('p', 'empty', 'no occurrences'));
  } else {
    const list = el('ul', 'sentences');
    for (const sentence of contexts.slice(0, limit)) {
      list.appendChild(renderSentence(sentence));
    }
    column.appendChild(list);
  }
  return column;
}

function renderRemapDialog(state: AppState): HTMLElement {
  const remap = state.remap;
  const dialog = el('div', 'remap-dialog');
  if (!remap) return dialog;
  dialog.appendChild(el('h3', undefined, 'Remap to…'));
  if (remap.options.length > 0) {
    const options = el('ol', 'remap-options');
    remap.options.forEach((option, index) => {
      const item = el('li', index === remap.selected ? 'selected' : undefined, `${index + 1}. ${option}`);
      options.appendChild(item);
    });
    dialog.appendChild(options);
  }
  const search = el('input', 'remap-search') as HTMLInputElement;
  search.type = 'text';
  search.placeholder = 'or type another canonical from the lexicon';
  search.value = remap.search;
  search.addEventListener('input', () => state.setRemapSearch(search.value));
  dialog.appendChild(search);
  dialog.appendChild(el('p', 'keys', '1-9 pick a candidate · / focus search · Enter confirm · Esc cancel'));
  return dialog;
}

function renderCard(state: AppState, card: PairCard): HTMLElement {
  const section = el('section', 'card');
  section.dataset.status = card.status;

  const headline = el('div', 'headline');
  headline.appendChild(el('span', 'translit', card.translit));
  headline.appendChild(el('span', 'arrow', ' → '));
  headline.appendChild(el('span', 'canonical', card.canonical));
  headline.appendChild(el('span', 'status-chip', card.status));
  section.appendChild(headline);

  section.appendChild(
    el(
      'div',
      'scores',
      `semantic ${card.semantic_score.toFixed(3)} · lexical ${card.lexical_score.toFixed(3)}`,
    ),
  );
  section.appendChild(el('div', 'sources', `models: ${card.sources.join(', ')}`));

  if (card.conflict_set.length > 0) {
    const conflicts = el('div', 'conflicts', 'also proposed: ');
    for (const other of card.conflict_set) {
      conflicts.appendChild(el('span', 'conflict', other));
    }
    section.appendChild(conflicts);
  }

  const hint = lemmaHint(card.translit, card.canonical);
  if (hint) {
    section.appendChild(el('div', 'lemma-hint', lemmaHintText(hint)));
  }

  if (state.notice) {
    section.appendChild(el('div', 'notice', state.notice));
  }
  if (state.remap) {
    section.appendChild(renderRemapDialog(state));
  }
  return section;
}

function renderQueue(state: AppState): HTMLElement {
  const aside = el('aside', 'queue');
  aside.appendChild(el('h3', undefined, `queue (${state.pendingTotal} pending on server)`));
  const list = el('ol');
  state.queue.forEach((card, index) => {
    const row = el(
      'li',
      index === state.currentIndex ? 'queue-row current' : 'queue-row',
      `${card.translit} → ${card.canonical}`,
    );
    row.dataset.status = card.status;
    list.appendChild(row);
  });
  aside.appendChild(list);
  return aside;
}

export function render(state: AppState, root: HTMLElement): void {
  const children: HTMLElement[] = [renderHeader(state)];
  if (state.banner) {
    children.push(renderBanner(state));
  }

  const main = el('main');
  const card = state.current();
  if (card) {
    main.appendChild(renderCard(state, card));
    const contexts = el('section', 'contexts');
    contexts.appendChild(
      renderContextColumn('left', card.translit, state.translitContexts, state.config.contextLimit),
    );
    contexts.appendChild(
      renderContextColumn('right', state.rightWord, state.rightContexts, state.config.contextLimit),
    );
    main.appendChild(contexts);
  } else if (state.drained) {
    const done = el('section', 'drained');
    done.appendChild(el('p', undefined, 'All pairs decided.'));
    main.appendChild(done);
  } else {
    main.appendChild(el('section', 'loading-card', 'loading…'));
  }
  main.appendChild(renderQueue(state));
  children.push(main);

  const footer = el('footer', 'keys', 'a accept · r reject · m remap · n next');
  children.push(footer);

  root.replaceChildren(...children);
}
