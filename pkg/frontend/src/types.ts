/**
 * Payload shapes as the server sends them. Field names match the JSON
 * keys exactly; nothing here is reordered or reshaped on the client.
 */

export interface PositionPayload {
  x: number;
  y: number;
}

export interface CommentPayload {
  seq: number;
  target: string;
  guest_name: string;
  body: string;
  created_at: number;
}

export interface FormSectionPayload {
  fields: string[];
  collapsed: boolean;
}

export interface ArtworkViewPayload {
  artwork_id: string;
  curator_section: string;
  visitor_section: CommentPayload[];
  visitor_section_collapsed: boolean;
  form_section: FormSectionPayload;
}

export interface GuestbookViewPayload {
  entries: CommentPayload[];
  form_section: FormSectionPayload;
}

export interface SummarySectionPayload {
  artwork_id: string;
  artwork_title: string;
  comment_count: number;
  comments: CommentPayload[];
}

export interface SummaryPayload {
  sections: SummarySectionPayload[];
  applied_rank: { comment_rank: string; artwork_rank: string };
  applied_filter: {
    author_substring: string | null;
    keyword: string | null;
    since: number | null;
    until: number | null;
  };
}

export interface ArtworkInfoPayload {
  id: string;
  title: string;
  medium: string;
  curator_label: string;
  position: PositionPayload;
  display_order: number;
}

export interface ExhibitionPayload {
  id: string;
  title: string;
  map: string[];
  artworks: ArtworkInfoPayload[];
  entrance: PositionPayload;
  guestbook: PositionPayload;
  laptop: PositionPayload;
  guide_spawn: PositionPayload;
  interaction_radius: number;
  sub_spaces: number;
}

export interface FocusPayload {
  kind: string;
  artwork_id?: string;
}

export interface SessionPayload {
  session_id: string;
  guest_name: string;
  position: PositionPayload;
  focus: FocusPayload | null;
}

export interface DialogueLinePayload {
  text: string;
  tags: string[];
}

export interface DialogueChoicePayload {
  display_index: number;
  label: string;
}

export type DialogueStatus = 'running' | 'awaiting_choice' | 'ended';

export interface StepPayload {
  lines: DialogueLinePayload[];
  choices: DialogueChoicePayload[];
  status: DialogueStatus;
}

export interface SideEffectPayload {
  kind: 'map_text';
  text: string;
}

export interface ChoiceResponse {
  step: StepPayload;
  side_effects: SideEffectPayload[];
  session: SessionPayload;
}

export type ViewKind = 'artwork_view' | 'guestbook_view' | 'summary' | 'dialogue_step';

export interface InteractResponse {
  session: SessionPayload;
  view_kind: ViewKind;
  view: ArtworkViewPayload | GuestbookViewPayload | SummaryPayload | StepPayload;
}

export interface FormResponse {
  comment: CommentPayload;
  view_kind: 'artwork_view' | 'guestbook_view';
  view: ArtworkViewPayload | GuestbookViewPayload;
  session: SessionPayload;
}

export interface PostCommentResponse {
  comment: CommentPayload;
  view: ArtworkViewPayload;
}

export interface PostGuestbookResponse {
  comment: CommentPayload;
  view: GuestbookViewPayload;
}

export interface MapResponse {
  text: string;
}

export type InteractableKind = 'artwork' | 'guestbook' | 'laptop' | 'guide';
