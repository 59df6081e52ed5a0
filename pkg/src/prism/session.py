"""One visitor's presence: entering, teleporting, and proximity-gated interaction.

A session glues the floor map, the comment store, and the dialogue engine
together. Interaction is gated by Chebyshev distance between cell centers
(reach is square, matching the square grid), default 2.5 m, so anything
within two cells is in reach.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass
from enum import Enum

from . import dialogue
from .annotations import (
    GUESTBOOK,
    AnnotationStore,
    AnnotationView,
    Comment,
    GuestbookView,
    SummaryReport,
    artwork_target,
)
from .dialogue import DialogueSession, DialogueStatus, StepOutput
from .errors import PrismError
from .exhibition import Exhibition, Position, render_map, walkable_at

DEFAULT_INTERACTION_RADIUS = 2.5

MAP_ACTION_TAG = "action:show_map"


class NotWalkableError(PrismError):
    code = "NotWalkable"
    category = "conflict"


class OutOfRangeError(PrismError):
    code = "OutOfRange"
    category = "conflict"

    def __init__(self, distance: float, radius: float):
        self.distance = distance
        super().__init__(f"target is {distance:g} m away; reach is {radius:g} m")


class UnknownInteractableError(PrismError):
    code = "UnknownInteractable"
    category = "missing"


class WrongFocusError(PrismError):
    code = "WrongFocus"
    category = "conflict"


class FocusKind(Enum):
    ARTWORK = "artwork"
    GUESTBOOK = "guestbook"
    SUMMARY = "summary"
    GUIDE = "guide"


@dataclass(frozen=True)
class Focus:
    kind: FocusKind
    artwork_id: str | None = None


class InteractableKind(Enum):
    ARTWORK = "artwork"
    GUESTBOOK = "guestbook"
    LAPTOP = "laptop"
    GUIDE = "guide"


@dataclass(frozen=True)
class InteractableRef:
    kind: InteractableKind
    artwork_id: str | None = None


@dataclass(frozen=True)
class MapText:
    """A rendered floor plan pushed to the visitor as a dialogue side effect."""

    text: str


@dataclass
class DialogueResult:
    step: StepOutput
    side_effects: list[MapText]


def cell_distance(a: Position, b: Position) -> float:
    """Chebyshev distance between the centers of the cells holding a and b."""
    (ax, ay), (bx, by) = a.cell, b.cell
    return float(max(abs(ax - bx), abs(ay - by)))


class VisitorSession:
    """Single-owner mutable state for one visitor; create via enter()."""

    def __init__(
        self,
        exhibition: Exhibition,
        store: AnnotationStore,
        guest_name: str | None = None,
        interaction_radius: float = DEFAULT_INTERACTION_RADIUS,
    ):
        self.session_id = uuid.uuid4().hex
        self.exhibition = exhibition
        self.store = store
        self.guest_name = (guest_name or "").strip() or "Anonymous Visitor"
        self.interaction_radius = interaction_radius
        self.position: Position = exhibition.entrance
        self.focus: Focus | None = None
        self.dialogue: DialogueSession | None = None

    # ------------------------------------------------------------ movement

    def teleport(self, target: Position) -> Position:
        """Jump to any walkable floor cell; no line of sight required.

        Success drops whatever panel or conversation was open, since those
        are anchored to where the visitor was standing.
        """
        if not walkable_at(self.exhibition.floor_map, target):
            raise NotWalkableError(
                f"({target.x:g}, {target.y:g}) is not walkable floor"
            )
        self.position = target
        self.focus = None
        self.dialogue = None
        return self.position

    # ------------------------------------------------------------ interaction

    def _position_of(self, ref: InteractableRef) -> Position:
        if ref.kind is InteractableKind.ARTWORK:
            art = self.exhibition.artwork_by_id(ref.artwork_id or "")
            if art is None:
                raise UnknownInteractableError(f"no artwork {ref.artwork_id!r}")
            return art.position
        if ref.kind is InteractableKind.GUESTBOOK:
            return self.exhibition.guestbook_pos
        if ref.kind is InteractableKind.LAPTOP:
            return self.exhibition.laptop_pos
        return self.exhibition.guide_spawn

    def _check_reach(self, ref: InteractableRef) -> None:
        distance = cell_distance(self.position, self._position_of(ref))
        if distance > self.interaction_radius:
            raise OutOfRangeError(distance, self.interaction_radius)

    def interact(
        self, ref: InteractableRef
    ) -> AnnotationView | GuestbookView | SummaryReport | StepOutput:
        """Open what the visitor reached for, if it is close enough."""
        self._check_reach(ref)
        if ref.kind is InteractableKind.ARTWORK:
            view = self.store.artwork_view(ref.artwork_id or "")
            self.focus = Focus(FocusKind.ARTWORK, ref.artwork_id)
            self.dialogue = None
            return view
        if ref.kind is InteractableKind.GUESTBOOK:
            self.focus = Focus(FocusKind.GUESTBOOK)
            self.dialogue = None
            return self.store.guestbook_view()
        if ref.kind is InteractableKind.LAPTOP:
            self.focus = Focus(FocusKind.SUMMARY)
            self.dialogue = None
            return self.store.summary()
        script = dialogue.parse_script(build_guide_script(self.exhibition))
        self.dialogue, first = dialogue.start(script)
        self.focus = Focus(FocusKind.GUIDE)
        return first

    # ------------------------------------------------------------ forms

    def submit_form(
        self, guest_name: str | None, body: str, now: int
    ) -> tuple[Comment, AnnotationView | GuestbookView]:
        """Post the open form to whatever panel has focus; returns the fresh view.

        The name travels with the form payload, not the session, so a
        visitor may sign differently per comment; blank falls back to the
        store's anonymous default.
        """
        if self.focus is not None and self.focus.kind is FocusKind.ARTWORK:
            target = artwork_target(self.focus.artwork_id or "")
            comment = self.store.post(target, guest_name, body, now)
            return comment, self.store.artwork_view(self.focus.artwork_id or "")
        if self.focus is not None and self.focus.kind is FocusKind.GUESTBOOK:
            comment = self.store.post(GUESTBOOK, guest_name, body, now)
            return comment, self.store.guestbook_view()
        raise WrongFocusError("no comment form is open")

    # ------------------------------------------------------------ dialogue

    def dialogue_choose(self, display_index: int) -> DialogueResult:
        if (
            self.focus is None
            or self.focus.kind is not FocusKind.GUIDE
            or self.dialogue is None
        ):
            raise WrongFocusError("no conversation is open")
        step = self.dialogue.choose(display_index)
        effects = []
        for line in step.lines:
            for tag in line.tags:
                if tag.replace(" ", "") == MAP_ACTION_TAG:
                    effects.append(MapText(render_map(self.exhibition, self.position)))
        if step.status is DialogueStatus.ENDED:
            self.focus = None
            self.dialogue = None
        return DialogueResult(step=step, side_effects=effects)


def enter(
    exhibition: Exhibition,
    store: AnnotationStore,
    guest_name: str | None = None,
    interaction_radius: float = DEFAULT_INTERACTION_RADIUS,
) -> VisitorSession:
    """A new visitor appears at the entrance with nothing in focus."""
    return VisitorSession(exhibition, store, guest_name, interaction_radius)


# ---------------------------------------------------------------- guide script

def _clean(text: str) -> str:
    """Make free text safe to splice into a script line."""
    flat = " ".join(text.split())
    return flat.replace("//", " ").replace("#", "").strip()


def build_guide_script(ex: Exhibition) -> str:
    """Author the curator-guide conversation for an exhibition.

    The root menu always offers the background story, the highlights, help
    with moving around, the floor plan, and a goodbye. Every branch loops
    back to the menu so the options stay available for the whole visit.
    """
    title = _clean(ex.title) or "this exhibition"
    titles = [_clean(a.title) or a.id for a in ex.artworks]

    if not titles:
        background = (
            f"{title} is between installations right now, so the floor is quiet."
        )
        highlights = [
            "There are no works on display yet, so I have no highlights to point to.",
        ]
    else:
        background = (
            f"{title} brings together {len(titles)} works so that older and newer "
            "forms can answer one another across the floor."
        )
        named = titles[:3]
        if len(named) == 1:
            listing = named[0]
        else:
            listing = ", ".join(named[:-1]) + f", and {named[-1]}"
        tail = " - and that is only a start" if len(titles) > 3 else ""
        highlights = [f"Do not miss {listing}{tail}.", "Take your time with each one."]

    lines = [
        f"Welcome to {title}. #guide",
        "I am the curator here. Ask me anything below.",
        "-> menu",
        "",
        "== menu ==",
        "+ [Tell me the background story] -> background",
        "+ [What are the highlights?] -> highlights",
        "+ [How do I move around?] -> moving",
        "+ [Could I see a map?] -> map_request",
        "+ [Goodbye] -> farewell",
        "",
        "== background ==",
        background,
        "The pieces were picked for the conversations they start, not for any one period.",
        "-> menu",
        "",
        "== highlights ==",
        *highlights,
        "-> menu",
        "",
        "== moving ==",
        "Point at any spot on the floor and squeeze the grip button to teleport there.",
        "You can hop between rooms the same way; walls only stop your feet, not your aim.",
        "Step close to a work, the guestbook, or the laptop to interact with it.",
        "-> menu",
        "",
        "== map_request ==",
        "Here is the floor plan. The @ mark is you. #action: show_map",
        "-> menu",
        "",
        "== farewell ==",
        "Enjoy the rest of your visit. #guide",
        "-> END",
    ]
    return "\n".join(lines) + "\n"
