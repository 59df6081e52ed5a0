/**
 * Browser entry point: create a visitor session, draw the walkable
 * floor, and keep the open panel fresh by polling every two seconds.
 *
 * Every state change goes through one documented server route; the
 * server decides walkability, reach, and ordering, and this file just
 * repaints whatever it answers.
 */

import { ApiError, GalleryApi } from './api.js';
import {
  renderArtworkPanel,
  renderDialoguePanel,
  renderGrid,
  renderGuestbookPanel,
  renderMapOverlay,
  renderNotice,
  renderSummaryPanel,
} from './render.js';
import { ClientViewState } from './state.js';
import type { ArtworkViewPayload, ExhibitionPayload, GuestbookViewPayload, InteractableKind, StepPayload, SummaryPayload } from './types.js';

export const POLL_INTERVAL_MS = 2000;

const api = new GalleryApi('');
const state = new ClientViewState();
let exhibition: ExhibitionPayload;

function byId(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing #${id} in index.html`);
  }
  return node;
}

function paint(): void {
  renderGrid(byId('grid'), exhibition, state.session, {
    onFloorClick: handleFloorClick,
    onInteractableClick: handleInteractableClick,
  });
  renderNotice(byId('notice'), state.notice);

  const panelHost = byId('panel');
  const panel = state.panel;
  if (panel === null) {
    panelHost.textContent = '';
  } else if (panel.kind === 'artwork') {
    const artwork = exhibition.artworks.find((a) => a.id === panel.view.artwork_id);
    renderArtworkPanel(panelHost, panel, artwork?.title ?? panel.view.artwork_id, formHandlers());
  } else if (panel.kind === 'guestbook') {
    renderGuestbookPanel(panelHost, panel, formHandlers());
  } else if (panel.kind === 'summary') {
    renderSummaryPanel(panelHost, panel);
  } else {
    renderDialoguePanel(panelHost, panel, handleChoice);
  }

  const overlayHost = byId('overlay');
  if (state.mapOverlay !== null) {
    renderMapOverlay(overlayHost, state.mapOverlay, () => {
      state.closeMapOverlay();
      paint();
    });
  } else {
    overlayHost.textContent = '';
  }
}

function formHandlers() {
  return {
    onToggleComments: () => {
      state.toggleComments();
      paint();
    },
    onToggleForm: () => {
      state.toggleForm();
      paint();
    },
    onSubmit: (guestName: string, body: string) => {
      void submitComment(guestName, body);
    },
  };
}

function showError(err: unknown): void {
  if (err instanceof ApiError) {
    state.showNotice(`${err.code}: ${err.message}`);
  } else {
    state.showNotice(String(err));
  }
  paint();
}

async function handleFloorClick(x: number, y: number): Promise<void> {
  if (!state.session) {
    return;
  }
  try {
    const session = await api.teleport(state.session.session_id, x, y);
    state.setSession(session);
    // walking away closes whatever was open, like the server did
    if (session.focus === null) {
      state.closePanel();
    }
    state.clearNotice();
    paint();
  } catch (err) {
    showError(err);
  }
}

async function handleInteractableClick(kind: string, artworkId?: string): Promise<void> {
  if (!state.session) {
    return;
  }
  try {
    const resp = await api.interact(state.session.session_id, kind as InteractableKind, artworkId);
    state.setSession(resp.session);
    if (resp.view_kind === 'artwork_view') {
      state.openArtwork(resp.view as ArtworkViewPayload);
    } else if (resp.view_kind === 'guestbook_view') {
      state.openGuestbook(resp.view as GuestbookViewPayload);
    } else if (resp.view_kind === 'summary') {
      state.openSummary(resp.view as SummaryPayload);
    } else {
      state.openDialogue(resp.view as StepPayload);
    }
    paint();
  } catch (err) {
    showError(err);
  }
}

async function submitComment(guestName: string, body: string): Promise<void> {
  if (!state.session) {
    return;
  }
  try {
    const resp = await api.submitForm(state.session.session_id, guestName, body);
    state.setSession(resp.session);
    if (resp.view_kind === 'artwork_view') {
      state.refreshArtwork(resp.view as ArtworkViewPayload);
    } else {
      state.refreshGuestbook(resp.view as GuestbookViewPayload);
    }
    state.clearNotice();
    paint();
  } catch (err) {
    showError(err);
  }
}

async function handleChoice(displayIndex: number): Promise<void> {
  if (!state.session) {
    return;
  }
  try {
    const result = await api.choose(state.session.session_id, displayIndex);
    state.applyChoice(result);
    paint();
  } catch (err) {
    if (err instanceof ApiError && err.code === 'InvalidChoiceIndex') {
      // stale menu: pull a fresh dialogue state from the server
      await handleInteractableClick('guide');
      return;
    }
    showError(err);
  }
}

/** Annotation freshness: re-fetch whatever read view is open. */
export async function pollTick(): Promise<void> {
  const panel = state.panel;
  try {
    if (panel?.kind === 'artwork') {
      state.refreshArtwork(await api.artworkView(panel.view.artwork_id));
    } else if (panel?.kind === 'guestbook') {
      state.refreshGuestbook(await api.guestbook());
    } else if (panel?.kind === 'summary') {
      state.refreshSummary(await api.summary());
    } else {
      return;
    }
    paint();
  } catch {
    // transient fetch problems surface on the next user action instead
  }
}

async function boot(): Promise<void> {
  exhibition = await api.exhibition();
  byId('title').textContent = exhibition.title;

  const nameInput = byId('guest-name') as HTMLInputElement;
  const session = await api.createSession(nameInput.value);
  state.setSession(session);

  paint();
  setInterval(() => void pollTick(), POLL_INTERVAL_MS);
}

if (typeof document !== 'undefined' && document.getElementById('grid')) {
  if (document.readyState === 'loading') {
    document.addEventListener('DOMContentLoaded', () => void boot());
  } else {
    void boot();
  }
}
