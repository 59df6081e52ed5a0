/**
 * Client view state: which panel is open, what the server last sent for
 * it, and which expandable sections the visitor has opened.
 *
 * Lists are stored exactly as the server ordered them. The only state
 * that is truly client-side is expansion (a fresh artwork panel starts
 * with comments and form collapsed, and polling must not re-collapse
 * what the visitor expanded) plus the inline notice line.
 */

import type {
  ArtworkViewPayload,
  ChoiceResponse,
  DialogueChoicePayload,
  DialogueLinePayload,
  GuestbookViewPayload,
  SessionPayload,
  StepPayload,
  SummaryPayload,
} from './types.js';

export interface ArtworkPanel {
  kind: 'artwork';
  view: ArtworkViewPayload;
  commentsCollapsed: boolean;
  formCollapsed: boolean;
}

export interface GuestbookPanel {
  kind: 'guestbook';
  view: GuestbookViewPayload;
  entriesCollapsed: boolean;
  formCollapsed: boolean;
}

export interface SummaryPanel {
  kind: 'summary';
  report: SummaryPayload;
}

export interface DialoguePanel {
  kind: 'dialogue';
  transcript: DialogueLinePayload[];
  choices: DialogueChoicePayload[];
  status: StepPayload['status'];
}

export type Panel = ArtworkPanel | GuestbookPanel | SummaryPanel | DialoguePanel | null;

export class ClientViewState {
  session: SessionPayload | null = null;
  panel: Panel = null;
  /** Server map text shown verbatim in the overlay; null when closed. */
  mapOverlay: string | null = null;
  notice: string | null = null;

  setSession(session: SessionPayload): void {
    this.session = session;
  }

  showNotice(message: string): void {
    this.notice = message;
  }

  clearNotice(): void {
    this.notice = null;
  }

  closePanel(): void {
    this.panel = null;
  }

  /** First open: both expandable sections start as the server flags them (collapsed). */
  openArtwork(view: ArtworkViewPayload): void {
    this.panel = {
      kind: 'artwork',
      view,
      commentsCollapsed: view.visitor_section_collapsed,
      formCollapsed: view.form_section.collapsed,
    };
    this.clearNotice();
  }

  openGuestbook(view: GuestbookViewPayload): void {
    this.panel = {
      kind: 'guestbook',
      view,
      entriesCollapsed: true,
      formCollapsed: view.form_section.collapsed,
    };
    this.clearNotice();
  }

  openSummary(report: SummaryPayload): void {
    this.panel = { kind: 'summary', report };
    this.clearNotice();
  }

  openDialogue(step: StepPayload): void {
    this.panel = {
      kind: 'dialogue',
      transcript: [...step.lines],
      choices: [...step.choices],
      status: step.status,
    };
    this.clearNotice();
    if (step.status === 'ended') {
      this.panel = null;
    }
  }

  /**
   * A poll or post brought a fresh view. The list contents are replaced
   * wholesale (server order is the display order) but the visitor's
   * expansion choices survive.
   */
  refreshArtwork(view: ArtworkViewPayload): void {
    if (this.panel?.kind !== 'artwork' || this.panel.view.artwork_id !== view.artwork_id) {
      return;
    }
    this.panel.view = view;
  }

  refreshGuestbook(view: GuestbookViewPayload): void {
    if (this.panel?.kind === 'guestbook') {
      this.panel.view = view;
    }
  }

  refreshSummary(report: SummaryPayload): void {
    if (this.panel?.kind === 'summary') {
      this.panel.report = report;
    }
  }

  toggleComments(): void {
    if (this.panel?.kind === 'artwork') {
      this.panel.commentsCollapsed = !this.panel.commentsCollapsed;
    } else if (this.panel?.kind === 'guestbook') {
      this.panel.entriesCollapsed = !this.panel.entriesCollapsed;
    }
  }

  toggleForm(): void {
    if (this.panel?.kind === 'artwork' || this.panel?.kind === 'guestbook') {
      this.panel.formCollapsed = !this.panel.formCollapsed;
    }
  }

  /** Dialogue step after a choice: lines append, choices are replaced. */
  applyChoice(result: ChoiceResponse): void {
    this.session = result.session;
    for (const effect of result.side_effects) {
      if (effect.kind === 'map_text') {
        this.mapOverlay = effect.text;
      }
    }
    if (this.panel?.kind !== 'dialogue') {
      return;
    }
    this.panel.transcript.push(...result.step.lines);
    this.panel.choices = [...result.step.choices];
    this.panel.status = result.step.status;
    if (result.step.status === 'ended') {
      this.panel = null;
    }
  }

  closeMapOverlay(): void {
    this.mapOverlay = null;
  }
}
