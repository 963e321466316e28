/**
 * Keyboard bindings. Queue mode: a accept, r reject, m remap, n/ArrowRight
 * next. Remap mode: 1-9 pick a conflict candidate, / focuses the lexicon
 * search box, Enter confirms, Escape cancels. Keys typed into an input stay
 * there, except Enter/Escape inside the remap search.
 */

import type { AppState } from './state.js';

function isTextInput(target: EventTarget | null): target is HTMLInputElement {
  return target instanceof HTMLInputElement && (target.type === 'text' || target.type === '');
}

export function installKeyboard(state: AppState, root: Document | HTMLElement): () => void {
  const onKeydown = (event: Event): void => {
    const key = (event as KeyboardEvent).key;
    const target = event.target;

    if (state.remap) {
      if (key === 'Escape') {
        event.preventDefault();
        state.closeRemap();
        return;
      }
      if (isTextInput(target) && target.classList.contains('remap-search')) {
        if (key === 'Enter') {
          event.preventDefault();
          state.setRemapSearch(target.value);
          void state.confirmRemap();
        }
        return;
      }
      if (key >= '1' && key <= '9') {
        event.preventDefault();
        state.selectRemapCandidate(Number(key) - 1);
        return;
      }
      if (key === 'Enter') {
        event.preventDefault();
        void state.confirmRemap();
        return;
      }
      if (key === '/') {
        event.preventDefault();
        const search = (root instanceof Document ? root : root.ownerDocument)?.querySelector(
          'input.remap-search',
        );
        if (search instanceof HTMLInputElement) search.focus();
      }
      return;
    }

    if (isTextInput(target)) return;

    switch (key) {
      case 'a':
        event.preventDefault();
        void state.decide('accept');
        break;
      case 'r':
        event.preventDefault();
        void state.decide('reject');
        break;
      case 'm':
        event.preventDefault();
        state.openRemap();
        break;
      case 'n':
      case 'ArrowRight':
        event.preventDefault();
        void state.next();
        break;
    }
  };

  root.addEventListener('keydown', onKeydown);
  return () => root.removeEventListener('keydown', onKeydown);
}
