"""HTTP face of the engine: one process, one exhibition, one shared store.

The route logic lives in ExhibitionService.handle(), which takes the
already-parsed request pieces and returns (status, payload). Tests drive
it directly; the socket layer is a thin http.server adapter around it.

Error mapping is uniform: bad input 400, unknown ids 404, requests that
collide with current state (out of reach, wrong focus, blocked teleport,
stale choice) 409.
"""

from __future__ import annotations

import json
import re
import sys
import threading
import time
import mimetypes
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, unquote, urlsplit

from .annotations import (
    GUESTBOOK,
    AnnotationStore,
    AnnotationView,
    ArtworkRank,
    CommentRank,
    CorruptJournalError,
    FilterSpec,
    RankKey,
    artwork_target,
)
from .errors import PrismError
from .exhibition import Exhibition, Position, demo_document, parse_exhibition, render_map
from .serialize import (
    artwork_view_payload,
    canonical_json,
    comment_payload,
    dialogue_result_payload,
    error_payload,
    exhibition_payload,
    guestbook_view_payload,
    session_payload,
    step_payload,
    summary_payload,
)
from .session import (
    DEFAULT_INTERACTION_RADIUS,
    InteractableKind,
    InteractableRef,
    VisitorSession,
    enter,
)

DEFAULT_PORT = 8765
DEFAULT_SESSION_TTL_S = 2 * 60 * 60

_STATUS_BY_CATEGORY = {"validation": 400, "missing": 404, "conflict": 409}


class RequestError(PrismError):
    """Malformed request payload or query parameter."""

    code = "InvalidField"
    category = "validation"


class NoRouteError(PrismError):
    code = "NoRoute"
    category = "missing"


class UnknownSessionError(PrismError):
    code = "UnknownSession"
    category = "missing"


@dataclass
class ServerConfig:
    port: int = DEFAULT_PORT
    host: str = "127.0.0.1"
    exhibition_path: Path | None = None  # None: the bundled demo
    journal_path: Path | None = None  # None: memory only, nothing persisted
    interaction_radius: float = DEFAULT_INTERACTION_RADIUS
    fixed_clock_ms: int | None = None  # freeze timestamps for reproducible runs
    session_ttl_s: float = DEFAULT_SESSION_TTL_S
    static_dir: Path | None = None  # optional web client to serve alongside


def load_exhibition(path: Path | None) -> Exhibition:
    document = demo_document() if path is None else path.read_text(encoding="utf-8")
    return parse_exhibition(document)


def open_store(
    exhibition: Exhibition, journal_path: Path | None, writable: bool
) -> AnnotationStore:
    """Load (or create) the journal-backed store for an exhibition.

    A corrupt journal is reported on stderr and the intact prefix is kept;
    when opening for writing, the file is compacted to that prefix first so
    subsequent appends produce a clean journal again.
    """
    if journal_path is None:
        return AnnotationStore(exhibition)
    text = journal_path.read_text(encoding="utf-8") if journal_path.exists() else ""
    try:
        store = AnnotationStore.load(text, exhibition)
    except CorruptJournalError as err:
        store = err.store
        kept = len(store.save().splitlines())
        print(
            f"warning: {journal_path}: {err.message}; keeping {kept} intact record(s)",
            file=sys.stderr,
        )
        if writable:
            journal_path.write_text(store.save(), encoding="utf-8")
    if writable:
        store.attach_sink(open(journal_path, "a", encoding="utf-8"))
    return store


@dataclass
class _SessionEntry:
    session: VisitorSession
    lock: threading.Lock = field(default_factory=threading.Lock)
    last_used: float = field(default_factory=time.monotonic)


class ExhibitionService:
    """Route table and session registry; speaks dicts, not sockets."""

    def __init__(
        self,
        exhibition: Exhibition,
        store: AnnotationStore,
        interaction_radius: float = DEFAULT_INTERACTION_RADIUS,
        clock=None,
        session_ttl_s: float = DEFAULT_SESSION_TTL_S,
    ):
        self.exhibition = exhibition
        self.store = store
        self.interaction_radius = interaction_radius
        self.session_ttl_s = session_ttl_s
        self._clock = clock or (lambda: int(time.time() * 1000))
        self._sessions: dict[str, _SessionEntry] = {}
        self._registry_lock = threading.Lock()
        self._routes = [
            ("GET", re.compile(r"^/exhibition$"), self._get_exhibition),
            ("GET", re.compile(r"^/map$"), self._get_map),
            ("GET", re.compile(r"^/artworks/([^/]+)/view$"), self._get_artwork_view),
            ("POST", re.compile(r"^/artworks/([^/]+)/comments$"), self._post_comment),
            ("GET", re.compile(r"^/guestbook$"), self._get_guestbook),
            ("POST", re.compile(r"^/guestbook$"), self._post_guestbook),
            ("GET", re.compile(r"^/summary$"), self._get_summary),
            ("POST", re.compile(r"^/sessions$"), self._post_sessions),
            ("POST", re.compile(r"^/sessions/([^/]+)/teleport$"), self._post_teleport),
            ("POST", re.compile(r"^/sessions/([^/]+)/interact$"), self._post_interact),
            ("POST", re.compile(r"^/sessions/([^/]+)/form$"), self._post_form),
            (
                "POST",
                re.compile(r"^/sessions/([^/]+)/dialogue/choice$"),
                self._post_choice,
            ),
            ("DELETE", re.compile(r"^/sessions/([^/]+)$"), self._delete_session),
        ]

    def now(self) -> int:
        return int(self._clock())

    # ------------------------------------------------------------ dispatch

    def handle(
        self, method: str, path: str, query: dict[str, str] | None = None, body=None
    ) -> tuple[int, dict | None]:
        query = query or {}
        try:
            for route_method, pattern, handler in self._routes:
                if route_method != method:
                    continue
                match = pattern.match(path)
                if match:
                    return handler(*match.groups(), query=query, body=body)
            raise NoRouteError(f"no route {method} {path}")
        except PrismError as err:
            return _STATUS_BY_CATEGORY[err.category], error_payload(err)

    # ------------------------------------------------------------ helpers

    def _body_dict(self, body) -> dict:
        if body is None:
            return {}
        if not isinstance(body, dict):
            raise RequestError("request body must be a JSON object")
        return body

    def _str_field(self, data: dict, key: str, required: bool) -> str | None:
        value = data.get(key)
        if value is None:
            if required:
                raise RequestError(f"missing field {key!r}")
            return None
        if not isinstance(value, str):
            raise RequestError(f"field {key!r} must be a string")
        return value

    def _entry(self, token: str) -> _SessionEntry:
        with self._registry_lock:
            entry = self._sessions.get(token)
            if entry is not None and (
                time.monotonic() - entry.last_used > self.session_ttl_s
            ):
                del self._sessions[token]
                entry = None
            if entry is None:
                raise UnknownSessionError("unknown or expired session")
            entry.last_used = time.monotonic()
            return entry

    def _reap_expired(self) -> None:
        cutoff = time.monotonic() - self.session_ttl_s
        with self._registry_lock:
            for token in [
                t for t, e in self._sessions.items() if e.last_used < cutoff
            ]:
                del self._sessions[token]

    # ------------------------------------------------------------ store routes

    def _get_exhibition(self, query, body):
        return 200, exhibition_payload(self.exhibition, self.interaction_radius)

    def _get_map(self, query, body):
        token = query.get("session")
        visitor = None
        if token:
            visitor = self._entry(token).session.position
        return 200, {"text": render_map(self.exhibition, visitor)}

    def _get_artwork_view(self, artwork_id, query, body):
        view = self.store.artwork_view(unquote(artwork_id))
        return 200, artwork_view_payload(view)

    def _post_comment(self, artwork_id, query, body):
        data = self._body_dict(body)
        comment = self.store.post(
            artwork_target(unquote(artwork_id)),
            self._str_field(data, "guest_name", required=False),
            self._str_field(data, "body", required=True) or "",
            self.now(),
        )
        view = self.store.artwork_view(unquote(artwork_id))
        return 201, {"comment": comment_payload(comment), "view": artwork_view_payload(view)}

    def _get_guestbook(self, query, body):
        return 200, guestbook_view_payload(self.store.guestbook_view())

    def _post_guestbook(self, query, body):
        data = self._body_dict(body)
        comment = self.store.post(
            GUESTBOOK,
            self._str_field(data, "guest_name", required=False),
            self._str_field(data, "body", required=True) or "",
            self.now(),
        )
        view = self.store.guestbook_view()
        return 201, {"comment": comment_payload(comment), "view": guestbook_view_payload(view)}

    def _get_summary(self, query, body):
        rank, spec = parse_summary_query(query)
        return 200, summary_payload(self.store.summary(rank, spec))

    # ------------------------------------------------------------ session routes

    def _post_sessions(self, query, body):
        self._reap_expired()
        data = self._body_dict(body)
        session = enter(
            self.exhibition,
            self.store,
            self._str_field(data, "guest_name", required=False),
            self.interaction_radius,
        )
        with self._registry_lock:
            self._sessions[session.session_id] = _SessionEntry(session)
        return 201, session_payload(session)

    def _post_teleport(self, token, query, body):
        data = self._body_dict(body)
        x, y = data.get("x"), data.get("y")
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in (x, y)):
            raise RequestError("teleport needs numeric fields 'x' and 'y'")
        entry = self._entry(token)
        with entry.lock:
            entry.session.teleport(Position(float(x), float(y)))
            return 200, session_payload(entry.session)

    def _post_interact(self, token, query, body):
        data = self._body_dict(body)
        kind_name = self._str_field(data, "kind", required=True)
        try:
            kind = InteractableKind(kind_name)
        except ValueError:
            raise RequestError(f"unknown interactable kind {kind_name!r}") from None
        artwork_id = self._str_field(data, "artwork_id", required=False)
        if kind is InteractableKind.ARTWORK and not artwork_id:
            raise RequestError("interacting with an artwork needs 'artwork_id'")
        entry = self._entry(token)
        with entry.lock:
            view = entry.session.interact(InteractableRef(kind, artwork_id))
            if kind is InteractableKind.ARTWORK:
                view_kind, payload = "artwork_view", artwork_view_payload(view)
            elif kind is InteractableKind.GUESTBOOK:
                view_kind, payload = "guestbook_view", guestbook_view_payload(view)
            elif kind is InteractableKind.LAPTOP:
                view_kind, payload = "summary", summary_payload(view)
            else:
                view_kind, payload = "dialogue_step", step_payload(view)
            return 200, {
                "session": session_payload(entry.session),
                "view_kind": view_kind,
                "view": payload,
            }

    def _post_form(self, token, query, body):
        data = self._body_dict(body)
        guest_name = self._str_field(data, "guest_name", required=False)
        text = self._str_field(data, "body", required=True) or ""
        entry = self._entry(token)
        with entry.lock:
            comment, view = entry.session.submit_form(guest_name, text, self.now())
            if isinstance(view, AnnotationView):
                view_kind, payload = "artwork_view", artwork_view_payload(view)
            else:
                view_kind, payload = "guestbook_view", guestbook_view_payload(view)
            return 201, {
                "comment": comment_payload(comment),
                "view_kind": view_kind,
                "view": payload,
                "session": session_payload(entry.session),
            }

    def _post_choice(self, token, query, body):
        data = self._body_dict(body)
        index = data.get("display_index")
        if not isinstance(index, int) or isinstance(index, bool):
            raise RequestError("field 'display_index' must be an integer")
        entry = self._entry(token)
        with entry.lock:
            result = entry.session.dialogue_choose(index)
            payload = dialogue_result_payload(result)
            payload["session"] = session_payload(entry.session)
            return 200, payload

    def _delete_session(self, token, query, body):
        with self._registry_lock:
            if token not in self._sessions:
                raise UnknownSessionError("unknown or expired session")
            del self._sessions[token]
        return 204, None


def parse_summary_query(query: dict[str, str]) -> tuple[RankKey, FilterSpec]:
    """Shared by GET /summary and the summary CLI so both accept the same names."""

    def enum_field(name, enum_cls, default):
        raw = query.get(name)
        if raw is None or raw == "":
            return default
        try:
            return enum_cls(raw)
        except ValueError:
            allowed = ", ".join(e.value for e in enum_cls)
            raise RequestError(f"{name} must be one of: {allowed}") from None

    def int_field(name):
        raw = query.get(name)
        if raw is None or raw == "":
            return None
        try:
            return int(raw)
        except ValueError:
            raise RequestError(f"{name} must be an integer timestamp") from None

    rank = RankKey(
        comment_rank=enum_field("comment_rank", CommentRank, CommentRank.NEWEST),
        artwork_rank=enum_field("artwork_rank", ArtworkRank, ArtworkRank.DISPLAY_ORDER),
    )
    spec = FilterSpec(
        author_substring=query.get("author") or None,
        keyword=query.get("keyword") or None,
        since=int_field("since"),
        until=int_field("until"),
    )
    return rank, spec


# ---------------------------------------------------------------- HTTP adapter

class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    service: ExhibitionService = None  # type: ignore[assignment]
    static_dir: Path | None = None

    def log_message(self, format, *args):  # noqa: A002 - stdlib signature
        pass

    def _send(self, status: int, payload: dict | None, content_type="application/json; charset=utf-8"):
        body = b""
        if payload is not None:
            body = canonical_json(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self._cors()
        self.end_headers()
        if body:
            self.wfile.write(body)

    def _cors(self):
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")

    def _read_body(self):
        length = int(self.headers.get("Content-Length") or 0)
        if length == 0:
            return None, None
        raw = self.rfile.read(length)
        try:
            return json.loads(raw.decode("utf-8")), None
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            return None, f"request body is not valid JSON: {exc}"

    def _dispatch(self, method: str):
        parts = urlsplit(self.path)
        path = unquote(parts.path)
        query = {k: v[0] for k, v in parse_qs(parts.query).items()}
        body, body_error = self._read_body()
        if body_error:
            self._send(400, {"error": {"code": "InvalidJson", "message": body_error}})
            return
        try:
            status, payload = self.service.handle(method, path, query, body)
        except Exception as exc:  # pragma: no cover - last-resort guard
            self._send(500, {"error": {"code": "Internal", "message": str(exc)}})
            return
        if (
            status == 404
            and method == "GET"
            and self.static_dir is not None
            and isinstance(payload, dict)
            and payload.get("error", {}).get("code") == "NoRoute"
        ):
            self._send_static(path)
            return
        self._send(status, payload)

    def _send_static(self, path: str):
        name = path.lstrip("/") or "index.html"
        root = self.static_dir.resolve()
        target = (root / name).resolve()
        if root not in target.parents and target != root:
            self._send(404, {"error": {"code": "NoRoute", "message": "not found"}})
            return
        if target.is_dir():
            target = target / "index.html"
        if not target.is_file():
            self._send(404, {"error": {"code": "NoRoute", "message": "not found"}})
            return
        data = target.read_bytes()
        content_type = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
        self.send_response(200)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(data)))
        self._cors()
        self.end_headers()
        self.wfile.write(data)

    def do_GET(self):
        self._dispatch("GET")

    def do_POST(self):
        self._dispatch("POST")

    def do_DELETE(self):
        self._dispatch("DELETE")

    def do_OPTIONS(self):
        self.send_response(204)
        self.send_header("Content-Length", "0")
        self._cors()
        self.end_headers()


def make_server(config: ServerConfig) -> tuple[ThreadingHTTPServer, ExhibitionService]:
    """Build the listening server without running it (port 0 picks a free port)."""
    exhibition = load_exhibition(config.exhibition_path)
    store = open_store(exhibition, config.journal_path, writable=True)
    clock = None
    if config.fixed_clock_ms is not None:
        frozen = int(config.fixed_clock_ms)
        clock = lambda: frozen  # noqa: E731
    service = ExhibitionService(
        exhibition,
        store,
        interaction_radius=config.interaction_radius,
        clock=clock,
        session_ttl_s=config.session_ttl_s,
    )

    handler = type(
        "_BoundHandler", (_Handler,), {"service": service, "static_dir": config.static_dir}
    )
    server = ThreadingHTTPServer((config.host, config.port), handler)
    return server, service


def serve(config: ServerConfig) -> int:
    """Run until interrupted; flushes and closes the journal on the way out."""
    server, service = make_server(config)
    host, port = server.server_address[:2]
    print(f"serving on http://{host}:{port}/ (exhibition: {service.exhibition.id})")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
        service.store.close()
    return 0
