/**
 * Pure geometry for the top-down walkthrough grid.
 *
 * The server is the authority on walkability and reach; these helpers
 * only decide what to draw (glyphs, dimming) and translate clicks into
 * the cell-center coordinates the API expects.
 */

import type { ExhibitionPayload, InteractableKind, PositionPayload } from './types.js';

export interface Interactable {
  kind: InteractableKind;
  artworkId?: string;
  label: string;
  glyph: string;
  position: PositionPayload;
}

export interface GridCell {
  x: number;
  y: number;
  kind: '.' | '#' | 'F';
  interactable?: Interactable;
  isEntrance: boolean;
}

/** Display-order glyph: 1-9 for the first nine artworks, then a, b, c... */
export function artworkGlyph(displayOrder: number): string {
  if (displayOrder < 9) {
    return String.fromCharCode('1'.charCodeAt(0) + displayOrder);
  }
  return String.fromCharCode('a'.charCodeAt(0) + displayOrder - 9);
}

export function cellOf(pos: PositionPayload): { cx: number; cy: number } {
  return { cx: Math.floor(pos.x), cy: Math.floor(pos.y) };
}

export function cellCenter(cx: number, cy: number): PositionPayload {
  return { x: cx + 0.5, y: cy + 0.5 };
}

/** Chebyshev distance between the cell centers under two positions. */
export function reachDistance(a: PositionPayload, b: PositionPayload): number {
  const ca = cellOf(a);
  const cb = cellOf(b);
  return Math.max(Math.abs(ca.cx + 0.5 - (cb.cx + 0.5)), Math.abs(ca.cy + 0.5 - (cb.cy + 0.5)));
}

export function inReach(visitor: PositionPayload, target: PositionPayload, radius: number): boolean {
  return reachDistance(visitor, target) <= radius;
}

export function interactablesOf(ex: ExhibitionPayload): Interactable[] {
  const items: Interactable[] = ex.artworks.map((a) => ({
    kind: 'artwork' as const,
    artworkId: a.id,
    label: a.title,
    glyph: artworkGlyph(a.display_order),
    position: a.position,
  }));
  items.push({ kind: 'guestbook', label: 'Guestbook', glyph: 'G', position: ex.guestbook });
  items.push({ kind: 'laptop', label: 'Summary laptop', glyph: 'L', position: ex.laptop });
  items.push({ kind: 'guide', label: 'Guide', glyph: '*', position: ex.guide_spawn });
  return items;
}

/** The full cell grid with interactables placed on their cells. */
export function buildGrid(ex: ExhibitionPayload): GridCell[][] {
  const byCell = new Map<string, Interactable>();
  for (const item of interactablesOf(ex)) {
    const { cx, cy } = cellOf(item.position);
    byCell.set(`${cx},${cy}`, item);
  }
  const entrance = cellOf(ex.entrance);

  return ex.map.map((row, y) =>
    Array.from(row, (ch, x) => {
      const cell: GridCell = {
        x,
        y,
        kind: ch === '.' ? '.' : ch === 'F' ? 'F' : '#',
        isEntrance: x === entrance.cx && y === entrance.cy,
      };
      const hit = byCell.get(`${x},${y}`);
      if (hit) {
        cell.interactable = hit;
      }
      return cell;
    }),
  );
}
