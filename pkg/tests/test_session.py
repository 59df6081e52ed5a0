"""Visitor sessions: movement, reach gating, forms, and the guide conversation."""

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prism.annotations import AnnotationStore, AnnotationView, GuestbookView, SummaryReport
from prism.dialogue import (
    DialogueStatus,
    InvalidChoiceIndexError,
    Severity,
    parse_script,
    validate_script,
)
from prism.exhibition import (
    CellKind,
    Position,
    demo_exhibition,
    parse_exhibition,
    walkable_at,
)
from prism.session import (
    DEFAULT_INTERACTION_RADIUS,
    Focus,
    FocusKind,
    InteractableKind,
    InteractableRef,
    NotWalkableError,
    OutOfRangeError,
    UnknownInteractableError,
    WrongFocusError,
    build_guide_script,
    cell_distance,
    enter,
)

EX = demo_exhibition()
GUIDE_LABELS = [
    "Tell me the background story",
    "What are the highlights?",
    "How do I move around?",
    "Could I see a map?",
    "Goodbye",
]


def fresh_session(name=None):
    return enter(EX, AnnotationStore(EX), guest_name=name)


def artwork_ref(artwork_id):
    return InteractableRef(InteractableKind.ARTWORK, artwork_id)


def near(position):
    """A walkable position one cell away from the given fixture/spot."""
    for dx in (-1, 1, 0):
        for dy in (-1, 1, 0):
            candidate = Position(position.x + dx, position.y + dy)
            if walkable_at(EX.floor_map, candidate):
                return candidate
    raise AssertionError("nothing walkable nearby")


# ---------------------------------------------------------------- entering

def test_enter_starts_at_entrance_with_no_focus():
    s = fresh_session("Ada")
    assert s.position == EX.entrance
    assert s.focus is None
    assert s.dialogue is None
    assert s.guest_name == "Ada"


def test_session_ids_are_unique():
    ids = {fresh_session().session_id for _ in range(50)}
    assert len(ids) == 50


def test_blank_name_defaults_like_the_store():
    assert fresh_session("  ").guest_name == "Anonymous Visitor"


def test_fresh_visitor_can_reach_the_guestbook():
    s = fresh_session()
    view = s.interact(InteractableRef(InteractableKind.GUESTBOOK))
    assert isinstance(view, GuestbookView)


# ---------------------------------------------------------------- teleport

def test_teleport_to_walkable_cell_moves_and_clears_focus():
    s = fresh_session()
    s.interact(InteractableRef(InteractableKind.GUESTBOOK))
    assert s.focus == Focus(FocusKind.GUESTBOOK)
    target = Position(5.5, 5.5)
    assert s.teleport(target) == target
    assert s.position == target
    assert s.focus is None


def test_teleport_into_other_sub_space_is_allowed():
    s = fresh_session()
    s.teleport(Position(5.5, 11.5))  # below the dividing wall
    assert s.position == Position(5.5, 11.5)


def test_teleport_onto_fixture_wall_or_outside_is_rejected():
    s = fresh_session()
    for bad in (EX.laptop_pos, Position(0.5, 0.5), Position(-3.0, 2.0), Position(99.0, 2.0)):
        with pytest.raises(NotWalkableError):
            s.teleport(bad)
        assert s.position == EX.entrance  # unchanged


def test_teleport_to_current_position_is_a_noop_success():
    s = fresh_session()
    assert s.teleport(EX.entrance) == EX.entrance


def test_teleport_ends_open_guide_conversation():
    s = fresh_session()
    s.teleport(near(EX.guide_spawn))
    s.interact(InteractableRef(InteractableKind.GUIDE))
    assert s.focus == Focus(FocusKind.GUIDE)
    assert s.dialogue is not None
    s.teleport(EX.entrance)
    assert s.focus is None and s.dialogue is None


# ---------------------------------------------------------------- reach

def test_interact_with_adjacent_artwork_opens_three_section_view():
    art = EX.artworks[0]
    s = fresh_session()
    s.teleport(near(art.position))
    view = s.interact(artwork_ref(art.id))
    assert isinstance(view, AnnotationView)
    assert view.curator_section == art.curator_label
    assert view.visitor_section == []
    assert s.focus == Focus(FocusKind.ARTWORK, art.id)


def test_interact_far_from_laptop_is_out_of_range():
    s = fresh_session()  # entrance is ~10 cells from the laptop
    with pytest.raises(OutOfRangeError):
        s.interact(InteractableRef(InteractableKind.LAPTOP))
    assert s.focus is None


def test_interact_with_unknown_artwork():
    s = fresh_session()
    with pytest.raises(UnknownInteractableError):
        s.interact(artwork_ref("no-such-piece"))


def test_reach_gating_is_exhaustive_over_demo_floor():
    """interact succeeds from exactly the cells within Chebyshev reach."""
    targets = [
        (artwork_ref(EX.artworks[0].id), EX.artworks[0].position),
        (InteractableRef(InteractableKind.GUESTBOOK), EX.guestbook_pos),
        (InteractableRef(InteractableKind.LAPTOP), EX.laptop_pos),
        (InteractableRef(InteractableKind.GUIDE), EX.guide_spawn),
    ]
    for ref, pos in targets:
        for cell in EX.floor_map.cells_of_kind(CellKind.WALKABLE):
            s = fresh_session()
            s.position = Position(cell[0] + 0.5, cell[1] + 0.5)
            expected = cell_distance(s.position, pos) <= DEFAULT_INTERACTION_RADIUS
            if expected:
                s.interact(ref)
            else:
                with pytest.raises(OutOfRangeError):
                    s.interact(ref)


def test_laptop_opens_identity_summary():
    s = fresh_session()
    s.teleport(near(EX.laptop_pos))
    report = s.interact(InteractableRef(InteractableKind.LAPTOP))
    assert isinstance(report, SummaryReport)
    assert [sec.artwork_id for sec in report.sections] == [a.id for a in EX.artworks]
    assert s.focus == Focus(FocusKind.SUMMARY)


# ---------------------------------------------------------------- forms

def test_submit_on_artwork_lands_at_head_of_its_thread():
    art = EX.artworks[2]
    s = fresh_session("Ada")
    s.teleport(near(art.position))
    s.interact(artwork_ref(art.id))
    comment, view = s.submit_form("Ada", "A thoughtful piece.", now=100)
    assert comment.seq == 1
    assert isinstance(view, AnnotationView)
    assert view.visitor_section[0].body == "A thoughtful piece."
    comment2, view2 = s.submit_form("Ada", "Second thought.", now=200)
    assert view2.visitor_section[0].body == "Second thought."


def test_submit_without_focus_is_wrong_focus():
    s = fresh_session()
    with pytest.raises(WrongFocusError):
        s.submit_form("Ada", "hello", now=1)


def test_submit_on_guestbook_targets_guestbook():
    s = fresh_session()
    s.interact(InteractableRef(InteractableKind.GUESTBOOK))
    comment, view = s.submit_form("", "Great show!", now=5)
    assert comment.target.is_guestbook
    assert comment.guest_name == "Anonymous Visitor"
    assert isinstance(view, GuestbookView)
    assert view.entries[0].body == "Great show!"
    assert s.store.summary().sections[0].comment_count == 0


# ---------------------------------------------------------------- guide

def guide_session():
    s = fresh_session()
    s.teleport(near(EX.guide_spawn))
    first = s.interact(InteractableRef(InteractableKind.GUIDE))
    return s, first


def test_guide_opens_with_all_five_options():
    s, first = guide_session()
    assert [c.label for c in first.choices] == GUIDE_LABELS
    assert first.status is DialogueStatus.AWAITING_CHOICE
    assert s.focus == Focus(FocusKind.GUIDE)
    assert s.dialogue is not None


def test_guide_functions_stay_available_after_use():
    s, first = guide_session()
    for index in (0, 1, 2):  # background, highlights, moving
        result = s.dialogue_choose(index)
        assert [c.label for c in result.step.choices] == GUIDE_LABELS
        assert result.step.lines  # each branch says something


def test_map_request_renders_visitor_position():
    s, first = guide_session()
    result = s.dialogue_choose(GUIDE_LABELS.index("Could I see a map?"))
    assert len(result.side_effects) == 1
    map_text = result.side_effects[0].text
    rows = map_text.splitlines()
    cx, cy = s.position.cell
    assert rows[cy][cx] == "@"
    assert [c.label for c in result.step.choices] == GUIDE_LABELS


def test_other_branches_have_no_side_effects():
    s, _ = guide_session()
    assert s.dialogue_choose(0).side_effects == []


def test_goodbye_ends_and_clears_focus():
    s, _ = guide_session()
    result = s.dialogue_choose(GUIDE_LABELS.index("Goodbye"))
    assert result.step.status is DialogueStatus.ENDED
    assert s.focus is None
    assert s.dialogue is None
    with pytest.raises(WrongFocusError):
        s.dialogue_choose(0)


def test_invalid_choice_leaves_guide_session_usable():
    s, _ = guide_session()
    with pytest.raises(InvalidChoiceIndexError):
        s.dialogue_choose(99)
    assert s.focus == Focus(FocusKind.GUIDE)
    result = s.dialogue_choose(0)
    assert result.step.lines


def test_highlights_name_at_least_three_demo_artworks():
    s, _ = guide_session()
    result = s.dialogue_choose(GUIDE_LABELS.index("What are the highlights?"))
    said = " ".join(line.text for line in result.step.lines)
    named = [a.title for a in EX.artworks if a.title in said]
    assert len(named) >= 3


# ---------------------------------------------------------------- generator

def test_guide_script_is_clean_for_the_demo():
    script = parse_script(build_guide_script(EX))
    assert validate_script(script) == []


def empty_exhibition():
    doc = {
        "id": "t",
        "title": "Test Hall",
        "map": [
            "########",
            "#.F....#",
            "#......#",
            "#..F...#",
            "#......#",
            "#......#",
            "#......#",
            "########",
        ],
        "artworks": [],
        "entrance": {"x": 1.5, "y": 1.5},
        "guestbook": {"x": 2.5, "y": 1.5},
        "laptop": {"x": 3.5, "y": 3.5},
        "guide_spawn": {"x": 4.5, "y": 5.5},
    }
    return parse_exhibition(json.dumps(doc))


def test_guide_script_handles_empty_exhibition():
    ex = empty_exhibition()
    script = parse_script(build_guide_script(ex))
    assert validate_script(script) == []
    store = AnnotationStore(ex)
    s = enter(ex, store)
    s.teleport(Position(4.5, 4.5))
    first = s.interact(InteractableRef(InteractableKind.GUIDE))
    result = s.dialogue_choose(1)  # highlights
    assert any("no" in line.text.lower() for line in result.step.lines)


def test_guide_script_survives_hostile_titles():
    doc = {
        "id": "t",
        "title": "Weird // #title\nwith newline",
        "map": [
            "######",
            "#.F..#",
            "#.FF.#",
            "#....#",
            "#....#",
            "######",
        ],
        "artworks": [
            {
                "id": "w1",
                "title": "spiky #one // -> END",
                "medium": "print",
                "curator_label": "x",
                "position": {"x": 2.5, "y": 2.5},
            }
        ],
        "entrance": {"x": 1.5, "y": 1.5},
        "guestbook": {"x": 2.5, "y": 1.5},
        "laptop": {"x": 3.5, "y": 2.5},
        "guide_spawn": {"x": 4.5, "y": 4.5},
    }
    ex = parse_exhibition(json.dumps(doc))
    script = parse_script(build_guide_script(ex))
    assert validate_script(script) == []


# ---------------------------------------------------------------- fuzzing

@settings(max_examples=200, deadline=None)
@given(
    st.lists(
        st.tuples(st.floats(-5, 20), st.floats(-5, 20)),
        max_size=30,
    )
)
def test_position_stays_walkable_under_random_teleports(attempts):
    s = fresh_session()
    for x, y in attempts:
        try:
            s.teleport(Position(x, y))
        except NotWalkableError:
            pass
        assert walkable_at(EX.floor_map, s.position)
        assert (s.dialogue is not None) == (
            s.focus is not None and s.focus.kind is FocusKind.GUIDE
        )
