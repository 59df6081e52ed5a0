"""Exhibition floor model: grid map, artworks, and fixed interactables.

The floor is a 1 m x 1 m cell grid. Positions are continuous; a position
belongs to the cell ``(floor(x), floor(y))``. The exhibition definition
document is a JSON object with keys ``id, title, map, artworks, entrance,
guestbook, laptop, guide_spawn`` where ``map`` is a list of equal-length
strings over the glyph alphabet ``#`` (wall), ``.`` (walkable floor) and
``F`` (fixture, e.g. a display case).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources

from .errors import PrismError

DEFAULT_MEDIUM = "sculpture"

Cell = tuple[int, int]


class CellKind(Enum):
    WALKABLE = "."
    WALL = "#"
    FIXTURE = "F"


_GLYPH_TO_KIND = {kind.value: kind for kind in CellKind}


@dataclass(frozen=True)
class Position:
    x: float
    y: float

    @property
    def cell(self) -> Cell:
        return (math.floor(self.x), math.floor(self.y))

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y)


@dataclass(frozen=True)
class FloorMap:
    """Rectangular cell grid stored as the glyph rows it was parsed from."""

    rows: tuple[str, ...]

    @property
    def height(self) -> int:
        return len(self.rows)

    @property
    def width(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def in_bounds(self, cell: Cell) -> bool:
        cx, cy = cell
        return 0 <= cx < self.width and 0 <= cy < self.height

    def kind_at(self, cell: Cell) -> CellKind | None:
        """Cell kind, or None when the cell lies outside the map."""
        if not self.in_bounds(cell):
            return None
        cx, cy = cell
        return _GLYPH_TO_KIND[self.rows[cy][cx]]

    def cells_of_kind(self, kind: CellKind) -> list[Cell]:
        return [
            (cx, cy)
            for cy, row in enumerate(self.rows)
            for cx, glyph in enumerate(row)
            if _GLYPH_TO_KIND[glyph] is kind
        ]


@dataclass(frozen=True)
class Artwork:
    id: str
    title: str
    curator_label: str
    position: Position
    display_order: int
    medium: str = DEFAULT_MEDIUM


@dataclass(frozen=True)
class Exhibition:
    id: str
    title: str
    floor_map: FloorMap
    artworks: tuple[Artwork, ...]
    entrance: Position
    guestbook_pos: Position
    laptop_pos: Position
    guide_spawn: Position

    def artwork_by_id(self, artwork_id: str) -> Artwork | None:
        for art in self.artworks:
            if art.id == artwork_id:
                return art
        return None


@dataclass(frozen=True)
class ParseIssue:
    """One problem found while parsing an exhibition document."""

    code: str
    message: str
    path: str | None = None
    line: int | None = None

    def __str__(self) -> str:
        where = f" at {self.path}" if self.path else ""
        where += f" (line {self.line})" if self.line is not None else ""
        return f"{self.code}{where}: {self.message}"


@dataclass(frozen=True)
class Violation:
    """A broken exhibition invariant. Violations are data, not failures."""

    code: str
    entity: str
    message: str

    def __str__(self) -> str:
        return f"{self.code} [{self.entity}]: {self.message}"


class ExhibitionFormatError(PrismError):
    """Raised by parse_exhibition with every collected problem, not just the first."""

    code = "ExhibitionFormat"
    category = "validation"

    def __init__(self, errors: list[ParseIssue]):
        self.errors = list(errors)
        super().__init__("; ".join(str(e) for e in self.errors) or "invalid exhibition document")


class VisitorOutOfBoundsError(PrismError):
    code = "VisitorOutOfBounds"
    category = "validation"


def walkable_at(floor_map: FloorMap, pos: Position) -> bool:
    """True iff pos is in bounds and its cell is walkable floor.

    Out-of-bounds and non-finite positions are simply not walkable.
    """
    if not pos.is_finite:
        return False
    return floor_map.kind_at(pos.cell) is CellKind.WALKABLE


def sub_spaces(floor_map: FloorMap) -> dict[Cell, int]:
    """Label walkable cells by 4-connected component.

    Labels are deterministic: the component holding the lexicographically
    smallest walkable cell gets 0, the next smallest unlabeled cell's
    component gets 1, and so on.
    """
    labels: dict[Cell, int] = {}
    next_label = 0
    for start in sorted(floor_map.cells_of_kind(CellKind.WALKABLE)):
        if start in labels:
            continue
        frontier = [start]
        labels[start] = next_label
        while frontier:
            cx, cy = frontier.pop()
            for neighbor in ((cx + 1, cy), (cx - 1, cy), (cx, cy + 1), (cx, cy - 1)):
                if neighbor in labels:
                    continue
                if floor_map.kind_at(neighbor) is CellKind.WALKABLE:
                    labels[neighbor] = next_label
                    frontier.append(neighbor)
        next_label += 1
    return labels


def sub_space_count(floor_map: FloorMap) -> int:
    labeling = sub_spaces(floor_map)
    return max(labeling.values()) + 1 if labeling else 0


def artwork_glyph(display_order: int) -> str:
    """Map glyph for an artwork: 1-9 for the first nine, then a, b, c, ..."""
    if display_order < 9:
        return chr(ord("1") + display_order)
    letter = display_order - 9
    if letter < 26:
        return chr(ord("a") + letter)
    return "?"


def render_map(ex: Exhibition, visitor: Position | None = None) -> str:
    """Text map of the exhibition, one row of glyphs per cell row.

    Walls and unoccupied fixtures render as ``#``, floor as ``.``, artworks
    as their display-order glyph, ``G`` guestbook, ``L`` laptop, ``E``
    entrance. The visitor ``@`` is drawn last and overrides anything under it.
    """
    if visitor is not None:
        if not visitor.is_finite or not ex.floor_map.in_bounds(visitor.cell):
            raise VisitorOutOfBoundsError(f"visitor position {visitor} is outside the map")

    grid = [
        ["." if _GLYPH_TO_KIND[g] is CellKind.WALKABLE else "#" for g in row]
        for row in ex.floor_map.rows
    ]

    def put(pos: Position, glyph: str) -> None:
        cx, cy = pos.cell
        if ex.floor_map.in_bounds((cx, cy)):
            grid[cy][cx] = glyph

    for art in ex.artworks:
        put(art.position, artwork_glyph(art.display_order))
    put(ex.guestbook_pos, "G")
    put(ex.laptop_pos, "L")
    put(ex.entrance, "E")
    if visitor is not None:
        put(visitor, "@")
    return "\n".join("".join(row) for row in grid)


def _chebyshev(a: Cell, b: Cell) -> int:
    return max(abs(a[0] - b[0]), abs(a[1] - b[1]))


def validate_exhibition(ex: Exhibition) -> list[Violation]:
    """Check every exhibition invariant; empty list means the exhibition is sound."""
    violations: list[Violation] = []
    fmap = ex.floor_map

    for cy, row in enumerate(fmap.rows):
        for cx, glyph in enumerate(row):
            on_perimeter = cx == 0 or cy == 0 or cx == fmap.width - 1 or cy == fmap.height - 1
            if on_perimeter and _GLYPH_TO_KIND[glyph] is not CellKind.WALL:
                violations.append(
                    Violation("PerimeterNotWall", "map", f"perimeter cell ({cx},{cy}) is not a wall")
                )

    walkables = fmap.cells_of_kind(CellKind.WALKABLE)
    if not walkables:
        violations.append(Violation("NoWalkableCells", "map", "map has no walkable floor"))

    for cell in fmap.cells_of_kind(CellKind.FIXTURE):
        cx, cy = cell
        neighbors = ((cx + 1, cy), (cx - 1, cy), (cx, cy + 1), (cx, cy - 1))
        if not any(fmap.kind_at(n) is CellKind.WALKABLE for n in neighbors):
            violations.append(
                Violation("FixtureUnreachable", "map", f"fixture cell {cell} has no adjacent floor")
            )

    def check_cell(pos: Position, required: CellKind, entity: str) -> None:
        kind = fmap.kind_at(pos.cell) if pos.is_finite else None
        if kind is not required:
            found = kind.name.lower() if kind else "out of bounds"
            violations.append(
                Violation(
                    "InvalidCellRef",
                    entity,
                    f"expected a {required.name.lower()} cell at ({pos.x}, {pos.y}), found {found}",
                )
            )

    check_cell(ex.entrance, CellKind.WALKABLE, "entrance")
    check_cell(ex.guide_spawn, CellKind.WALKABLE, "guide_spawn")
    check_cell(ex.guestbook_pos, CellKind.FIXTURE, "guestbook")
    check_cell(ex.laptop_pos, CellKind.FIXTURE, "laptop")

    seen_ids: set[str] = set()
    orders: list[int] = []
    occupied: dict[Cell, str] = {}
    if ex.guestbook_pos.is_finite:
        occupied[ex.guestbook_pos.cell] = "guestbook"
    if ex.laptop_pos.is_finite:
        occupied.setdefault(ex.laptop_pos.cell, "laptop")
    if ex.laptop_pos.is_finite and ex.guestbook_pos.is_finite and ex.laptop_pos.cell == ex.guestbook_pos.cell:
        violations.append(
            Violation("SharedFixtureCell", "laptop", "laptop and guestbook occupy the same cell")
        )

    for art in ex.artworks:
        entity = f"artwork:{art.id}"
        if art.id in seen_ids:
            violations.append(Violation("DuplicateArtworkId", entity, f"artwork id {art.id!r} reused"))
        seen_ids.add(art.id)
        if not art.id.strip():
            violations.append(Violation("EmptyField", entity, "artwork id is empty"))
        if not art.title.strip():
            violations.append(Violation("EmptyField", entity, "artwork title is empty"))
        if not art.curator_label.strip():
            violations.append(Violation("EmptyField", entity, "curator label is empty"))
        check_cell(art.position, CellKind.FIXTURE, entity)
        if art.position.is_finite:
            holder = occupied.setdefault(art.position.cell, entity)
            if holder != entity:
                violations.append(
                    Violation("SharedFixtureCell", entity, f"cell {art.position.cell} already holds {holder}")
                )
        orders.append(art.display_order)

    if sorted(orders) != list(range(len(ex.artworks))):
        violations.append(
            Violation(
                "DisplayOrderNotContiguous",
                "artworks",
                f"display_order values {sorted(orders)} are not 0..{len(ex.artworks) - 1}",
            )
        )

    if ex.entrance.is_finite and ex.guestbook_pos.is_finite:
        distance = _chebyshev(ex.entrance.cell, ex.guestbook_pos.cell)
        if distance > 2:
            violations.append(
                Violation(
                    "GuestbookTooFar",
                    "guestbook",
                    f"guestbook is {distance} cells from the entrance (limit 2)",
                )
            )

    return violations


class _DocReader:
    """Pulls typed fields out of the decoded JSON document, accumulating issues."""

    def __init__(self) -> None:
        self.issues: list[ParseIssue] = []

    def missing(self, path: str) -> None:
        self.issues.append(ParseIssue("MissingField", "required field is absent", path=path))

    def invalid(self, path: str, message: str) -> None:
        self.issues.append(ParseIssue("InvalidField", message, path=path))

    def str_field(self, obj: dict, key: str, path: str) -> str | None:
        if key not in obj:
            self.missing(path)
            return None
        value = obj[key]
        if not isinstance(value, str):
            self.invalid(path, f"expected a string, got {type(value).__name__}")
            return None
        return value

    def position_field(self, obj: dict, key: str, path: str) -> Position | None:
        if key not in obj:
            self.missing(path)
            return None
        value = obj[key]
        if not isinstance(value, dict):
            self.invalid(path, "expected an object with x and y")
            return None
        coords = []
        for axis in ("x", "y"):
            axis_value = value.get(axis)
            if not isinstance(axis_value, (int, float)) or isinstance(axis_value, bool):
                self.invalid(f"{path}.{axis}", "expected a number")
                return None
            coords.append(float(axis_value))
        pos = Position(coords[0], coords[1])
        if not pos.is_finite or pos.x < 0 or pos.y < 0:
            self.invalid(path, "coordinates must be finite and non-negative")
            return None
        return pos


def parse_exhibition(document: str) -> Exhibition:
    """Parse and fully validate an exhibition definition document.

    Raises ExhibitionFormatError carrying every problem found: JSON syntax
    errors, missing or mistyped fields, duplicate artwork ids, and any
    invariant violation reported by validate_exhibition.
    """
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ExhibitionFormatError(
            [ParseIssue("SyntaxError", exc.msg, line=exc.lineno)]
        ) from exc

    reader = _DocReader()
    if not isinstance(data, dict):
        raise ExhibitionFormatError(
            [ParseIssue("InvalidField", "top level must be a JSON object", path="$")]
        )

    ex_id = reader.str_field(data, "id", "id")
    title = reader.str_field(data, "title", "title")

    rows: tuple[str, ...] = ()
    if "map" not in data:
        reader.missing("map")
    else:
        raw_map = data["map"]
        if not isinstance(raw_map, list) or not raw_map or not all(isinstance(r, str) for r in raw_map):
            reader.invalid("map", "expected a non-empty list of strings")
        else:
            width = len(raw_map[0])
            ok = width > 0
            for i, row in enumerate(raw_map):
                if len(row) != width:
                    reader.invalid(f"map[{i}]", f"row length {len(row)} differs from {width}")
                    ok = False
                bad = sorted({g for g in row if g not in _GLYPH_TO_KIND})
                if bad:
                    reader.invalid(f"map[{i}]", f"unknown glyphs {bad!r}")
                    ok = False
            if ok:
                rows = tuple(raw_map)

    artworks: list[Artwork] = []
    if "artworks" not in data:
        reader.missing("artworks")
    else:
        raw_artworks = data["artworks"]
        if not isinstance(raw_artworks, list):
            reader.invalid("artworks", "expected a list")
        else:
            for i, raw in enumerate(raw_artworks):
                path = f"artworks[{i}]"
                if not isinstance(raw, dict):
                    reader.invalid(path, "expected an object")
                    continue
                art_id = reader.str_field(raw, "id", f"{path}.id")
                art_title = reader.str_field(raw, "title", f"{path}.title")
                label = reader.str_field(raw, "curator_label", f"{path}.curator_label")
                pos = reader.position_field(raw, "position", f"{path}.position")
                medium = raw.get("medium", DEFAULT_MEDIUM)
                if not isinstance(medium, str):
                    reader.invalid(f"{path}.medium", "expected a string")
                    medium = DEFAULT_MEDIUM
                order = raw.get("display_order", i)
                if not isinstance(order, int) or isinstance(order, bool):
                    reader.invalid(f"{path}.display_order", "expected an integer")
                    order = i
                if None in (art_id, art_title, label, pos):
                    continue
                artworks.append(
                    Artwork(
                        id=art_id,
                        title=art_title,
                        curator_label=label,
                        position=pos,
                        display_order=order,
                        medium=medium,
                    )
                )

    duplicate_ids = {a.id for a in artworks if sum(1 for b in artworks if b.id == a.id) > 1}
    for dup in sorted(duplicate_ids):
        reader.issues.append(
            ParseIssue("DuplicateArtworkId", f"artwork id {dup!r} is used more than once", path="artworks")
        )

    entrance = reader.position_field(data, "entrance", "entrance")
    guestbook = reader.position_field(data, "guestbook", "guestbook")
    laptop = reader.position_field(data, "laptop", "laptop")
    guide_spawn = reader.position_field(data, "guide_spawn", "guide_spawn")

    if reader.issues or not rows:
        raise ExhibitionFormatError(reader.issues)

    ex = Exhibition(
        id=ex_id,
        title=title,
        floor_map=FloorMap(rows),
        artworks=tuple(sorted(artworks, key=lambda a: a.display_order)),
        entrance=entrance,
        guestbook_pos=guestbook,
        laptop_pos=laptop,
        guide_spawn=guide_spawn,
    )

    violations = validate_exhibition(ex)
    if violations:
        raise ExhibitionFormatError(
            [ParseIssue(v.code, v.message, path=v.entity) for v in violations]
        )
    return ex


def demo_document() -> str:
    """The bundled demo exhibition document, byte for byte."""
    return resources.files("prism.data").joinpath("demo_exhibition.json").read_text("utf-8")


def demo_exhibition() -> Exhibition:
    return parse_exhibition(demo_document())
