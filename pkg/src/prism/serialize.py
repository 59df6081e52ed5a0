"""JSON payload shapes shared by the HTTP service and the CLI.

Everything that leaves the process goes through canonical_json, so the
same store state always serializes to the same bytes regardless of which
door it left by. Keys are sorted, UTF-8 passes through unescaped, and a
trailing newline closes the document.
"""

from __future__ import annotations

import json

from .annotations import (
    AnnotationView,
    Comment,
    FilterSpec,
    GuestbookView,
    RankKey,
    SummaryReport,
)
from .dialogue import StepOutput
from .errors import PrismError
from .exhibition import Exhibition, Position, sub_space_count
from .session import DialogueResult, VisitorSession


def canonical_json(payload) -> str:
    return json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=2) + "\n"


def position_payload(pos: Position) -> dict:
    return {"x": pos.x, "y": pos.y}


def comment_payload(comment: Comment) -> dict:
    return {
        "seq": comment.seq,
        "target": comment.target.encode(),
        "guest_name": comment.guest_name,
        "body": comment.body,
        "created_at": comment.created_at,
    }


def _form_section(collapsed: bool = True) -> dict:
    return {"fields": ["guest_name", "body"], "collapsed": collapsed}


def artwork_view_payload(view: AnnotationView) -> dict:
    return {
        "artwork_id": view.artwork_id,
        "curator_section": view.curator_section,
        "visitor_section": [comment_payload(c) for c in view.visitor_section],
        "visitor_section_collapsed": view.visitor_section_collapsed,
        "form_section": _form_section(view.form_collapsed),
    }


def guestbook_view_payload(view: GuestbookView) -> dict:
    return {
        "entries": [comment_payload(c) for c in view.entries],
        "form_section": _form_section(),
    }


def rank_payload(rank: RankKey) -> dict:
    return {
        "comment_rank": rank.comment_rank.value,
        "artwork_rank": rank.artwork_rank.value,
    }


def filter_payload(spec: FilterSpec) -> dict:
    return {
        "author_substring": spec.author_substring,
        "keyword": spec.keyword,
        "since": spec.since,
        "until": spec.until,
    }


def summary_payload(report: SummaryReport) -> dict:
    return {
        "sections": [
            {
                "artwork_id": s.artwork_id,
                "artwork_title": s.artwork_title,
                "comment_count": s.comment_count,
                "comments": [comment_payload(c) for c in s.comments],
            }
            for s in report.sections
        ],
        "applied_rank": rank_payload(report.applied_rank),
        "applied_filter": filter_payload(report.applied_filter),
    }


def step_payload(step: StepOutput) -> dict:
    return {
        "lines": [{"text": line.text, "tags": list(line.tags)} for line in step.lines],
        "choices": [
            {"display_index": c.display_index, "label": c.label} for c in step.choices
        ],
        "status": step.status.value,
    }


def dialogue_result_payload(result: DialogueResult) -> dict:
    return {
        "step": step_payload(result.step),
        "side_effects": [
            {"kind": "map_text", "text": effect.text} for effect in result.side_effects
        ],
    }


def exhibition_payload(ex: Exhibition, interaction_radius: float) -> dict:
    return {
        "id": ex.id,
        "title": ex.title,
        "map": list(ex.floor_map.rows),
        "artworks": [
            {
                "id": a.id,
                "title": a.title,
                "medium": a.medium,
                "curator_label": a.curator_label,
                "position": position_payload(a.position),
                "display_order": a.display_order,
            }
            for a in ex.artworks
        ],
        "entrance": position_payload(ex.entrance),
        "guestbook": position_payload(ex.guestbook_pos),
        "laptop": position_payload(ex.laptop_pos),
        "guide_spawn": position_payload(ex.guide_spawn),
        "interaction_radius": interaction_radius,
        "sub_spaces": sub_space_count(ex.floor_map),
    }


def session_payload(session: VisitorSession) -> dict:
    focus = None
    if session.focus is not None:
        focus = {"kind": session.focus.kind.value}
        if session.focus.artwork_id is not None:
            focus["artwork_id"] = session.focus.artwork_id
    return {
        "session_id": session.session_id,
        "guest_name": session.guest_name,
        "position": position_payload(session.position),
        "focus": focus,
    }


def error_payload(err: PrismError) -> dict:
    return {"error": {"code": err.code, "message": err.message}}
