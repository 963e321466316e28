/**
 * Entry point: wires the API client, state, renderer, and keyboard handler.
 * Configuration comes from the query string: ?api=<base-url>&reviewer=<name>
 * &page=<size>&contexts=<n>. The bundle is expected to be served by the
 * review server itself, so the API base URL defaults to the same origin.
 */

import { ReviewApi, type FetchLike } from './api.js';
import { installKeyboard } from './keyboard.js';
import { render } from './render.js';
import { AppState } from './state.js';
import { DEFAULT_CONFIG, type AppConfig } from './types.js';

export function configFromQuery(query: string): AppConfig {
  const params = new URLSearchParams(query);
  const page = Number(params.get('page'));
  const contexts = Number(params.get('contexts'));
  return {
    baseUrl: params.get('api') ?? DEFAULT_CONFIG.baseUrl,
    reviewer: params.get('reviewer') ?? DEFAULT_CONFIG.reviewer,
    pageSize: Number.isInteger(page) && page > 0 ? page : DEFAULT_CONFIG.pageSize,
    contextLimit: Number.isInteger(contexts) && contexts > 0 ? contexts : DEFAULT_CONFIG.contextLimit,
  };
}

export interface App {
  state: AppState;
  dispose: () => void;
}

export function initApp(root: HTMLElement, config: AppConfig, fetchImpl?: FetchLike): App {
  const api = new ReviewApi(config.baseUrl, fetchImpl);
  const state = new AppState(api, config);
  state.onChange(() => render(state, root));
  const uninstall = installKeyboard(state, root.ownerDocument);
  render(state, root);
  void state.start();
  return { state, dispose: uninstall };
}

const mount = typeof document === 'undefined' ? null : document.getElementById('app');
if (mount) {
  initApp(mount, configFromQuery(window.location.search));
}
