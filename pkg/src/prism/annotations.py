"""Audience input: per-artwork comment threads, the guestbook, and summaries.

All writes funnel through a single append point that hands out the global
sequence number, so any interleaving of posts yields seq values 1..N with
no gaps. Reads copy a consistent snapshot. Comments are ordered newest
first by ``(created_at, seq)``; the sequence number breaks timestamp ties.

Persistence is an append-only journal: one JSON object per line,
``{"seq":int,"target":"guestbook"|"artwork:<id>","name":str,"body":str,"at":int}``,
lines in seq order.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from enum import Enum
from typing import IO, Iterable

from .errors import PrismError
from .exhibition import Exhibition

ANONYMOUS_NAME = "Anonymous Visitor"
MAX_NAME_LEN = 80
MAX_BODY_LEN = 2000
FORM_FIELDS = ("guest_name", "body")


@dataclass(frozen=True)
class Target:
    """What a comment is attached to: an artwork, or the guestbook when id is None."""

    artwork_id: str | None = None

    @property
    def is_guestbook(self) -> bool:
        return self.artwork_id is None

    def encode(self) -> str:
        return "guestbook" if self.is_guestbook else f"artwork:{self.artwork_id}"

    @classmethod
    def decode(cls, text: str) -> "Target":
        if text == "guestbook":
            return GUESTBOOK
        if text.startswith("artwork:") and len(text) > len("artwork:"):
            return cls(text.split(":", 1)[1])
        raise ValueError(f"bad target {text!r}")


GUESTBOOK = Target()


def artwork_target(artwork_id: str) -> Target:
    return Target(artwork_id)


@dataclass(frozen=True)
class Comment:
    seq: int
    target: Target
    guest_name: str
    body: str
    created_at: int  # milliseconds since epoch

    @property
    def order_key(self) -> tuple[int, int]:
        return (self.created_at, self.seq)


class CommentRank(Enum):
    NEWEST = "newest"
    OLDEST = "oldest"
    LONGEST = "longest"


class ArtworkRank(Enum):
    DISPLAY_ORDER = "display_order"
    MOST_COMMENTS = "most_comments"


@dataclass(frozen=True)
class RankKey:
    comment_rank: CommentRank = CommentRank.NEWEST
    artwork_rank: ArtworkRank = ArtworkRank.DISPLAY_ORDER


@dataclass(frozen=True)
class FilterSpec:
    """Comment filter; an empty spec passes everything through.

    Substring matches are case-insensitive; since/until are inclusive bounds.
    """

    author_substring: str | None = None
    keyword: str | None = None
    since: int | None = None
    until: int | None = None

    @property
    def is_identity(self) -> bool:
        return self == FilterSpec()

    def matches(self, comment: Comment) -> bool:
        if (
            self.author_substring is not None
            and self.author_substring.lower() not in comment.guest_name.lower()
        ):
            return False
        if self.keyword is not None and self.keyword.lower() not in comment.body.lower():
            return False
        if self.since is not None and comment.created_at < self.since:
            return False
        if self.until is not None and comment.created_at > self.until:
            return False
        return True


@dataclass
class AnnotationView:
    """The three-section artwork panel: curator label, visitor comments, comment form."""

    artwork_id: str
    curator_section: str
    visitor_section: list[Comment]
    visitor_section_collapsed: bool = True
    form_fields: tuple[str, ...] = FORM_FIELDS
    form_collapsed: bool = True


@dataclass
class GuestbookView:
    entries: list[Comment]
    form_fields: tuple[str, ...] = FORM_FIELDS


@dataclass(frozen=True)
class SummarySection:
    artwork_id: str
    artwork_title: str
    comment_count: int
    comments: tuple[Comment, ...]


@dataclass(frozen=True)
class SummaryReport:
    sections: tuple[SummarySection, ...]
    applied_rank: RankKey
    applied_filter: FilterSpec


class UnknownTargetError(PrismError):
    code = "UnknownTarget"
    category = "missing"


class EmptyBodyError(PrismError):
    code = "EmptyBody"
    category = "validation"


class BodyTooLongError(PrismError):
    code = "BodyTooLong"
    category = "validation"


class NameTooLongError(PrismError):
    code = "NameTooLong"
    category = "validation"


class CorruptJournalError(PrismError):
    """A journal line could not be replayed. Records before it are recovered."""

    code = "CorruptJournal"
    category = "validation"

    def __init__(self, line: int, message: str, store: "AnnotationStore"):
        self.line = line
        self.store = store
        super().__init__(f"journal line {line}: {message}")


def _newest_first(comments: Iterable[Comment]) -> list[Comment]:
    return sorted(comments, key=lambda c: c.order_key, reverse=True)


class AnnotationStore:
    """All visitor input for one exhibition, with optional journal sink.

    When a sink is attached, every accepted post is written and flushed
    before the call returns, in seq order.
    """

    def __init__(self, exhibition: Exhibition, sink: IO[str] | None = None):
        self._exhibition = exhibition
        self._sink = sink
        self._comments: list[Comment] = []
        self._next_seq = 1
        self._lock = threading.Lock()

    @property
    def exhibition(self) -> Exhibition:
        return self._exhibition

    @property
    def next_seq(self) -> int:
        with self._lock:
            return self._next_seq

    def attach_sink(self, sink: IO[str] | None) -> None:
        with self._lock:
            self._sink = sink

    def close(self) -> None:
        with self._lock:
            if self._sink is not None:
                self._sink.flush()
                self._sink.close()
                self._sink = None

    def _check_target(self, target: Target) -> None:
        if not target.is_guestbook and self._exhibition.artwork_by_id(target.artwork_id) is None:
            raise UnknownTargetError(f"no artwork {target.artwork_id!r} in this exhibition")

    def post(self, target: Target, guest_name: str | None, body: str, now: int) -> Comment:
        """Append one comment; it is visible to every subsequent read."""
        self._check_target(target)
        name = (guest_name or "").strip() or ANONYMOUS_NAME
        if len(name) > MAX_NAME_LEN:
            raise NameTooLongError(f"guest name exceeds {MAX_NAME_LEN} characters")
        text = (body or "").strip()
        if not text:
            raise EmptyBodyError("comment body is empty")
        if len(text) > MAX_BODY_LEN:
            raise BodyTooLongError(f"comment body exceeds {MAX_BODY_LEN} characters")

        with self._lock:
            comment = Comment(
                seq=self._next_seq,
                target=target,
                guest_name=name,
                body=text,
                created_at=int(now),
            )
            self._next_seq += 1
            self._comments.append(comment)
            if self._sink is not None:
                self._sink.write(_journal_line(comment) + "\n")
                self._sink.flush()
        return comment

    def comments_of(self, target: Target) -> list[Comment]:
        """All comments on a target, newest first (ties to the later seq)."""
        self._check_target(target)
        with self._lock:
            found = [c for c in self._comments if c.target == target]
        return _newest_first(found)

    def artwork_view(self, artwork_id: str) -> AnnotationView:
        art = self._exhibition.artwork_by_id(artwork_id)
        if art is None:
            raise UnknownTargetError(f"no artwork {artwork_id!r} in this exhibition")
        return AnnotationView(
            artwork_id=artwork_id,
            curator_section=art.curator_label,
            visitor_section=self.comments_of(Target(artwork_id)),
        )

    def guestbook_view(self) -> GuestbookView:
        return GuestbookView(entries=self.comments_of(GUESTBOOK))

    def summary(self, rank: RankKey = RankKey(), spec: FilterSpec = FilterSpec()) -> SummaryReport:
        """One section per artwork: filter, then order comments, then order sections.

        Guestbook entries never appear here; the guestbook collects impressions
        of the exhibition as a whole, not of any artwork.
        """
        sections = []
        for art in self._exhibition.artworks:
            comments = [c for c in self.comments_of(Target(art.id)) if spec.matches(c)]
            if rank.comment_rank is CommentRank.OLDEST:
                comments = list(reversed(comments))
            elif rank.comment_rank is CommentRank.LONGEST:
                comments.sort(key=lambda c: (-len(c.body), -c.seq))
            sections.append(
                SummarySection(
                    artwork_id=art.id,
                    artwork_title=art.title,
                    comment_count=len(comments),
                    comments=tuple(comments),
                )
            )
        if rank.artwork_rank is ArtworkRank.MOST_COMMENTS:
            sections.sort(key=lambda s: -s.comment_count)  # stable: ties keep display order
        return SummaryReport(sections=tuple(sections), applied_rank=rank, applied_filter=spec)

    def save(self) -> str:
        """Serialize the full journal, one record per line in seq order."""
        with self._lock:
            return "".join(_journal_line(c) + "\n" for c in self._comments)

    @classmethod
    def load(
        cls,
        journal_text: str,
        exhibition: Exhibition,
        sink: IO[str] | None = None,
    ) -> "AnnotationStore":
        """Rebuild a store from journal text.

        A malformed line raises CorruptJournalError carrying the line number
        and the store recovered from every record before it.
        """
        store = cls(exhibition, sink=None)

        def fail(line_no: int, message: str) -> CorruptJournalError:
            store._sink = sink
            return CorruptJournalError(line_no, message, store)

        # Records may legally contain U+0085/U+2028 inside JSON strings, so
        # split on the newline terminator alone, never on splitlines() rules.
        lines = journal_text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        last_seq = 0
        for line_no, raw in enumerate(lines, start=1):
            if not raw.strip():
                raise fail(line_no, "blank line in journal")
            try:
                record = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise fail(line_no, f"not valid JSON ({exc.msg})") from exc
            if not isinstance(record, dict):
                raise fail(line_no, "record is not an object")
            try:
                seq = record["seq"]
                target = Target.decode(record["target"])
                name = record["name"]
                body = record["body"]
                at = record["at"]
            except (KeyError, ValueError) as exc:
                raise fail(line_no, f"bad record: {exc}") from exc
            if not (isinstance(seq, int) and isinstance(at, int)) or isinstance(seq, bool):
                raise fail(line_no, "seq and at must be integers")
            if not (isinstance(name, str) and isinstance(body, str)):
                raise fail(line_no, "name and body must be strings")
            if seq <= last_seq:
                raise fail(line_no, f"seq {seq} out of order")
            if not target.is_guestbook and exhibition.artwork_by_id(target.artwork_id) is None:
                raise fail(line_no, f"unknown artwork {target.artwork_id!r}")
            store._comments.append(
                Comment(seq=seq, target=target, guest_name=name, body=body, created_at=at)
            )
            last_seq = seq
            store._next_seq = seq + 1
        store._sink = sink
        return store


def _journal_line(comment: Comment) -> str:
    record = {
        "seq": comment.seq,
        "target": comment.target.encode(),
        "name": comment.guest_name,
        "body": comment.body,
        "at": comment.created_at,
    }
    return json.dumps(record, ensure_ascii=False, separators=(",", ":"))
