/**
 * State to DOM. Rendering walks the server's arrays front to back, so
 * DOM order is payload order by construction; there is no sorting,
 * grouping, or filtering in this file.
 */

import { buildGrid, cellOf, inReach } from './grid.js';
import type { ArtworkPanel, DialoguePanel, GuestbookPanel, SummaryPanel } from './state.js';
import type {
  CommentPayload,
  ExhibitionPayload,
  PositionPayload,
  SessionPayload,
} from './types.js';

export interface GridHandlers {
  onFloorClick(x: number, y: number): void;
  onInteractableClick(kind: string, artworkId?: string): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

export function renderGrid(
  container: HTMLElement,
  ex: ExhibitionPayload,
  session: SessionPayload | null,
  handlers: GridHandlers,
): void {
  container.textContent = '';
  const table = el('div', 'grid');
  const visitorCell = session ? cellOf(session.position) : null;

  for (const row of buildGrid(ex)) {
    const rowDiv = el('div', 'grid-row');
    for (const cell of row) {
      const cellDiv = el('div', `cell cell-${cell.kind === '.' ? 'floor' : 'solid'}`);
      cellDiv.dataset['x'] = String(cell.x);
      cellDiv.dataset['y'] = String(cell.y);

      if (cell.interactable) {
        const item = cell.interactable;
        cellDiv.classList.add('interactable', `kind-${item.kind}`);
        cellDiv.textContent = item.glyph;
        cellDiv.title = item.label;
        const reachable =
          session !== null && inReach(session.position, item.position, ex.interaction_radius);
        if (!reachable) {
          cellDiv.classList.add('dimmed');
        }
        cellDiv.addEventListener('click', () =>
          handlers.onInteractableClick(item.kind, item.artworkId),
        );
      } else if (cell.isEntrance) {
        cellDiv.textContent = 'E';
        cellDiv.classList.add('entrance');
      }

      if (visitorCell && cell.x === visitorCell.cx && cell.y === visitorCell.cy) {
        cellDiv.classList.add('visitor');
        cellDiv.textContent = '@';
      }
      if (!cell.interactable) {
        const center: PositionPayload = { x: cell.x + 0.5, y: cell.y + 0.5 };
        cellDiv.addEventListener('click', () => handlers.onFloorClick(center.x, center.y));
      }
      rowDiv.appendChild(cellDiv);
    }
    table.appendChild(rowDiv);
  }
  container.appendChild(table);
}

function renderCommentList(comments: CommentPayload[]): HTMLUListElement {
  const list = el('ul', 'comment-list');
  for (const comment of comments) {
    const item = el('li', 'comment');
    item.appendChild(el('span', 'comment-author', comment.guest_name));
    item.appendChild(el('span', 'comment-body', comment.body));
    item.dataset['seq'] = String(comment.seq);
    list.appendChild(item);
  }
  return list;
}

export interface FormHandlers {
  onToggleComments(): void;
  onToggleForm(): void;
  onSubmit(guestName: string, body: string): void;
}

function renderForm(collapsed: boolean, handlers: FormHandlers): HTMLElement {
  const section = el('section', `form-section${collapsed ? ' collapsed' : ''}`);
  const toggle = el('button', 'toggle', collapsed ? 'Leave a comment' : 'Hide form');
  toggle.addEventListener('click', handlers.onToggleForm);
  section.appendChild(toggle);
  if (!collapsed) {
    const name = el('input', 'form-name');
    name.placeholder = 'Your name (optional)';
    const body = el('textarea', 'form-body');
    body.placeholder = 'Your comment';
    const send = el('button', 'send', 'Post');
    send.addEventListener('click', () => handlers.onSubmit(name.value, body.value));
    section.append(name, body, send);
  }
  return section;
}

export function renderArtworkPanel(
  container: HTMLElement,
  panel: ArtworkPanel,
  title: string,
  handlers: FormHandlers,
): void {
  container.textContent = '';
  const root = el('article', 'panel artwork-panel');
  root.appendChild(el('h2', 'panel-title', title));

  const curator = el('section', 'curator-section', panel.view.curator_section);
  root.appendChild(curator);

  const comments = el(
    'section',
    `comments-section${panel.commentsCollapsed ? ' collapsed' : ''}`,
  );
  const toggle = el(
    'button',
    'toggle',
    panel.commentsCollapsed
      ? `Comments (${panel.view.visitor_section.length})`
      : 'Hide comments',
  );
  toggle.addEventListener('click', handlers.onToggleComments);
  comments.appendChild(toggle);
  if (!panel.commentsCollapsed) {
    comments.appendChild(renderCommentList(panel.view.visitor_section));
  }
  root.appendChild(comments);

  root.appendChild(renderForm(panel.formCollapsed, handlers));
  container.appendChild(root);
}

export function renderGuestbookPanel(
  container: HTMLElement,
  panel: GuestbookPanel,
  handlers: FormHandlers,
): void {
  container.textContent = '';
  const root = el('article', 'panel guestbook-panel');
  root.appendChild(el('h2', 'panel-title', 'Guestbook'));
  const entries = el(
    'section',
    `comments-section${panel.entriesCollapsed ? ' collapsed' : ''}`,
  );
  const toggle = el(
    'button',
    'toggle',
    panel.entriesCollapsed ? `Entries (${panel.view.entries.length})` : 'Hide entries',
  );
  toggle.addEventListener('click', handlers.onToggleComments);
  entries.appendChild(toggle);
  if (!panel.entriesCollapsed) {
    entries.appendChild(renderCommentList(panel.view.entries));
  }
  root.appendChild(entries);
  root.appendChild(renderForm(panel.formCollapsed, handlers));
  container.appendChild(root);
}

export function renderSummaryPanel(container: HTMLElement, panel: SummaryPanel): void {
  container.textContent = '';
  const root = el('article', 'panel summary-panel');
  root.appendChild(el('h2', 'panel-title', 'All comments'));
  for (const section of panel.report.sections) {
    const block = el('section', 'summary-section');
    block.appendChild(
      el('h3', 'summary-heading', `${section.artwork_title} (${section.comment_count})`),
    );
    block.appendChild(renderCommentList(section.comments));
    root.appendChild(block);
  }
  container.appendChild(root);
}

export function renderDialoguePanel(
  container: HTMLElement,
  panel: DialoguePanel,
  onChoice: (displayIndex: number) => void,
): void {
  container.textContent = '';
  const root = el('article', 'panel dialogue-panel');
  root.appendChild(el('h2', 'panel-title', 'Guide'));

  const log = el('div', 'dialogue-log');
  for (const line of panel.transcript) {
    log.appendChild(el('p', 'dialogue-line', line.text));
  }
  root.appendChild(log);

  const choiceBox = el('div', 'dialogue-choices');
  for (const choice of panel.choices) {
    const button = el('button', 'choice', choice.label);
    button.addEventListener('click', () => onChoice(choice.display_index));
    choiceBox.appendChild(button);
  }
  root.appendChild(choiceBox);
  container.appendChild(root);
}

/** The guide's floor plan, shown exactly as the server sent it. */
export function renderMapOverlay(
  container: HTMLElement,
  text: string,
  onClose: () => void,
): void {
  container.textContent = '';
  const backdrop = el('div', 'overlay-backdrop');
  const box = el('div', 'overlay-box');
  const pre = el('pre', 'map-text');
  pre.textContent = text;
  const close = el('button', 'close', 'Close');
  close.addEventListener('click', onClose);
  box.append(pre, close);
  backdrop.appendChild(box);
  container.appendChild(backdrop);
}

export function renderNotice(container: HTMLElement, notice: string | null): void {
  container.textContent = notice ?? '';
  container.classList.toggle('visible', notice !== null);
}
