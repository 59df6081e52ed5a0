/**
 * Thin typed client over the exhibition server's HTTP routes.
 *
 * Every method is one documented route; there is no caching, retrying,
 * or reordering here. Server errors become ApiError with the server's
 * own code string so the UI can show them inline.
 */

import type {
  ArtworkViewPayload,
  ChoiceResponse,
  ExhibitionPayload,
  FormResponse,
  GuestbookViewPayload,
  InteractableKind,
  InteractResponse,
  MapResponse,
  PostCommentResponse,
  PostGuestbookResponse,
  SessionPayload,
  SummaryPayload,
} from './types.js';

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

async function request<T>(
  base: string,
  method: string,
  path: string,
  body?: unknown,
): Promise<T> {
  const init: RequestInit = { method };
  if (body !== undefined) {
    init.headers = { 'Content-Type': 'application/json' };
    init.body = JSON.stringify(body);
  }
  const resp = await fetch(base + path, init);
  if (resp.status === 204) {
    return undefined as T;
  }
  const payload = await resp.json();
  if (!resp.ok) {
    const err = payload?.error ?? {};
    throw new ApiError(resp.status, err.code ?? 'Unknown', err.message ?? resp.statusText);
  }
  return payload as T;
}

export interface SummaryQuery {
  comment_rank?: string;
  artwork_rank?: string;
  author?: string;
  keyword?: string;
  since?: number;
  until?: number;
}

export class GalleryApi {
  constructor(private base: string = '') {}

  exhibition(): Promise<ExhibitionPayload> {
    return request(this.base, 'GET', '/exhibition');
  }

  map(sessionId?: string): Promise<MapResponse> {
    const suffix = sessionId ? `?session=${encodeURIComponent(sessionId)}` : '';
    return request(this.base, 'GET', `/map${suffix}`);
  }

  artworkView(artworkId: string): Promise<ArtworkViewPayload> {
    return request(this.base, 'GET', `/artworks/${encodeURIComponent(artworkId)}/view`);
  }

  guestbook(): Promise<GuestbookViewPayload> {
    return request(this.base, 'GET', '/guestbook');
  }

  summary(query: SummaryQuery = {}): Promise<SummaryPayload> {
    const params = new URLSearchParams();
    for (const [key, value] of Object.entries(query)) {
      if (value !== undefined) {
        params.set(key, String(value));
      }
    }
    const qs = params.toString();
    return request(this.base, 'GET', qs ? `/summary?${qs}` : '/summary');
  }

  postComment(artworkId: string, guestName: string, body: string): Promise<PostCommentResponse> {
    return request(this.base, 'POST', `/artworks/${encodeURIComponent(artworkId)}/comments`, {
      guest_name: guestName,
      body,
    });
  }

  postGuestbook(guestName: string, body: string): Promise<PostGuestbookResponse> {
    return request(this.base, 'POST', '/guestbook', { guest_name: guestName, body });
  }

  createSession(guestName: string): Promise<SessionPayload> {
    return request(this.base, 'POST', '/sessions', { guest_name: guestName });
  }

  teleport(sessionId: string, x: number, y: number): Promise<SessionPayload> {
    return request(this.base, 'POST', `/sessions/${sessionId}/teleport`, { x, y });
  }

  interact(
    sessionId: string,
    kind: InteractableKind,
    artworkId?: string,
  ): Promise<InteractResponse> {
    const body: Record<string, string> = { kind };
    if (artworkId !== undefined) {
      body['artwork_id'] = artworkId;
    }
    return request(this.base, 'POST', `/sessions/${sessionId}/interact`, body);
  }

  submitForm(sessionId: string, guestName: string, body: string): Promise<FormResponse> {
    return request(this.base, 'POST', `/sessions/${sessionId}/form`, {
      guest_name: guestName,
      body,
    });
  }

  choose(sessionId: string, displayIndex: number): Promise<ChoiceResponse> {
    return request(this.base, 'POST', `/sessions/${sessionId}/dialogue/choice`, {
      display_index: displayIndex,
    });
  }

  leave(sessionId: string): Promise<void> {
    return request(this.base, 'DELETE', `/sessions/${sessionId}`);
  }
}
