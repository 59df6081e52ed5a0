"""Mini-Ink: the option-based dialogue language behind the virtual guide.

The subset covers text lines, `== name ==` knots, `*` once-only and `+`
sticky choices with optional `[menu label]` and trailing `-> target`,
standalone diverts, `-> END`, `//` comments, and `#tag` suffixes. Gathers,
variables, conditionals, glue, stitches, tunnels and includes are out.

Falling off the end of a block is an implicit END. A choice group whose
once-only options are all spent is skipped and flow resumes after it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from .errors import PrismError

END_TARGET = "END"
STEP_LIMIT = 10000

_IDENT_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_KNOT_RE = re.compile(r"^(={2,})(.*?)=*\s*$")
_CHOICE_RE = re.compile(r"^([*+])\s*(.*)$")
_LABEL_RE = re.compile(r"^\[([^\]]*)\]\s*(.*)$")


# ---------------------------------------------------------------- AST

@dataclass(frozen=True)
class TextLine:
    text: str
    tags: tuple[str, ...] = ()
    line: int = 0


@dataclass(frozen=True)
class ChoicePoint:
    sticky: bool
    menu_label: str | None
    spoken_text: str
    tags: tuple[str, ...]
    divert: str | None
    choice_id: int
    line: int = 0

    @property
    def label(self) -> str:
        """What the menu shows: the bracketed label when present, else the spoken text."""
        return self.menu_label if self.menu_label is not None else self.spoken_text


@dataclass(frozen=True)
class Divert:
    target: str
    line: int = 0


Stmt = TextLine | ChoicePoint | Divert


@dataclass(frozen=True)
class Knot:
    name: str
    line: int
    body: tuple[Stmt, ...]


@dataclass(frozen=True)
class Script:
    start_block: tuple[Stmt, ...]
    knots: tuple[Knot, ...]

    def knot_map(self) -> dict[str, Knot]:
        """Name lookup; on duplicates (a validate error) the first definition wins."""
        table: dict[str, Knot] = {}
        for knot in self.knots:
            table.setdefault(knot.name, knot)
        return table


# ---------------------------------------------------------------- errors

@dataclass(frozen=True)
class ParseError:
    line: int
    code: str
    message: str


class ScriptSyntaxError(PrismError):
    """Source failed to parse; .errors lists every problem found."""

    code = "ScriptSyntax"
    category = "validation"

    def __init__(self, errors: list[ParseError]):
        self.errors = list(errors)
        head = errors[0] if errors else ParseError(0, "ScriptSyntax", "unknown")
        super().__init__(f"{len(errors)} parse error(s), first at line {head.line}: {head.message}")


class InfiniteLoopError(PrismError):
    code = "InfiniteLoop"
    category = "conflict"


class InvalidChoiceIndexError(PrismError):
    code = "InvalidChoiceIndex"
    category = "conflict"


class NotAwaitingChoiceError(PrismError):
    code = "NotAwaitingChoice"
    category = "conflict"


# ---------------------------------------------------------------- parsing

def _split_tags(content: str) -> tuple[str, tuple[str, ...]]:
    """Peel `#tag` suffixes off a text or choice line. `#` starts the tag list."""
    if "#" not in content:
        return content.strip(), ()
    head, rest = content.split("#", 1)
    tags = tuple(t.strip() for t in rest.split("#") if t.strip())
    return head.strip(), tags


def parse_script(source: str) -> Script:
    """Parse Mini-Ink source, accumulating every error before raising.

    Raises ScriptSyntaxError carrying ParseError(line, code, message) items;
    line numbers refer to the original source, 1-based.
    """
    errors: list[ParseError] = []
    start_block: list[Stmt] = []
    knots: list[Knot] = []
    current: list[Stmt] = start_block
    current_knot: tuple[str, int] | None = None
    next_choice_id = 0
    statement_count = 0

    def close_knot() -> None:
        nonlocal current, current_knot
        if current_knot is not None:
            name, line = current_knot
            knots.append(Knot(name=name, line=line, body=tuple(current)))
        current_knot = None

    for line_no, raw in enumerate(source.split("\n"), start=1):
        text = raw.split("//", 1)[0].strip()
        if not text:
            continue

        if text.startswith("=="):
            close_knot()
            current = []
            m = _KNOT_RE.match(text)
            name = m.group(2).strip() if m else ""
            if not _IDENT_RE.match(name):
                errors.append(
                    ParseError(line_no, "BadKnotHeader", f"bad knot header {text!r}")
                )
                current_knot = (f"__bad_{line_no}", line_no)
            elif name == END_TARGET:
                errors.append(
                    ParseError(line_no, "BadKnotHeader", "END is reserved and cannot name a knot")
                )
                current_knot = (f"__bad_{line_no}", line_no)
            else:
                current_knot = (name, line_no)
            continue

        if text.startswith("->"):
            target = text[2:].strip()
            if not (_IDENT_RE.match(target) or target == END_TARGET):
                errors.append(
                    ParseError(line_no, "DanglingDivertSyntax", f"bad divert {text!r}")
                )
                continue
            current.append(Divert(target=target, line=line_no))
            statement_count += 1
            continue

        marker = _CHOICE_RE.match(text)
        if marker:
            body, tags = _split_tags(marker.group(2))
            menu_label: str | None = None
            labelled = _LABEL_RE.match(body)
            if labelled:
                menu_label = labelled.group(1).strip()
                body = labelled.group(2)
            divert: str | None = None
            if "->" in body:
                body, _, tail = body.partition("->")
                target = tail.strip()
                if not (_IDENT_RE.match(target) or target == END_TARGET):
                    errors.append(
                        ParseError(line_no, "DanglingDivertSyntax", f"bad divert in choice {text!r}")
                    )
                    continue
                divert = target
            current.append(
                ChoicePoint(
                    sticky=marker.group(1) == "+",
                    menu_label=menu_label,
                    spoken_text=body.strip(),
                    tags=tags,
                    divert=divert,
                    choice_id=next_choice_id,
                    line=line_no,
                )
            )
            next_choice_id += 1
            statement_count += 1
            continue

        spoken, tags = _split_tags(text)
        current.append(TextLine(text=spoken, tags=tags, line=line_no))
        statement_count += 1

    close_knot()
    if statement_count == 0:
        errors.append(ParseError(1, "EmptyScript", "script has no statements"))
    if errors:
        raise ScriptSyntaxError(errors)
    return Script(start_block=tuple(start_block), knots=tuple(knots))


# ---------------------------------------------------------------- validation

class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    code: str
    line: int
    message: str


def validate_script(script: Script) -> list[Diagnostic]:
    """Cross-reference checks after a clean parse; diagnostics are data.

    Errors (UnknownDivertTarget, DuplicateKnot) make a script unrunnable;
    warnings (UnreachableKnot, KnotFallsOffEnd) do not. Output is sorted
    errors first, then by line.
    """
    out: list[Diagnostic] = []
    known = {k.name for k in script.knots}

    seen: set[str] = set()
    duplicates: set[int] = set()
    for i, knot in enumerate(script.knots):
        if knot.name in seen:
            duplicates.add(i)
            out.append(
                Diagnostic(
                    Severity.ERROR,
                    "DuplicateKnot",
                    knot.line,
                    f"knot '{knot.name}' is already defined",
                )
            )
        seen.add(knot.name)

    def divert_targets(body: tuple[Stmt, ...]):
        for stmt in body:
            if isinstance(stmt, Divert):
                yield stmt.target, stmt.line
            elif isinstance(stmt, ChoicePoint) and stmt.divert is not None:
                yield stmt.divert, stmt.line

    blocks = [("start", None, script.start_block)] + [
        (k.name, k, k.body) for k in script.knots
    ]
    for _, _, body in blocks:
        for target, line in divert_targets(body):
            if target != END_TARGET and target not in known:
                out.append(
                    Diagnostic(
                        Severity.ERROR,
                        "UnknownDivertTarget",
                        line,
                        f"divert to undeclared knot '{target}'",
                    )
                )

    table = script.knot_map()
    reached: set[str] = set()
    frontier = [t for t, _ in divert_targets(script.start_block) if t != END_TARGET]
    while frontier:
        name = frontier.pop()
        if name in reached or name not in table:
            continue
        reached.add(name)
        frontier.extend(
            t for t, _ in divert_targets(table[name].body) if t != END_TARGET
        )
    for i, knot in enumerate(script.knots):
        if i in duplicates:
            continue
        if knot.name not in reached:
            out.append(
                Diagnostic(
                    Severity.WARNING,
                    "UnreachableKnot",
                    knot.line,
                    f"knot '{knot.name}' is never diverted to",
                )
            )

    def falls_off(body: tuple[Stmt, ...]) -> bool:
        return not body or isinstance(body[-1], TextLine)

    if falls_off(script.start_block) and (script.start_block or script.knots):
        line = script.start_block[-1].line if script.start_block else 1
        out.append(
            Diagnostic(
                Severity.WARNING,
                "KnotFallsOffEnd",
                line,
                "start block ends without a divert; treated as -> END",
            )
        )
    for i, knot in enumerate(script.knots):
        if i in duplicates:
            continue
        if falls_off(knot.body):
            line = knot.body[-1].line if knot.body else knot.line
            out.append(
                Diagnostic(
                    Severity.WARNING,
                    "KnotFallsOffEnd",
                    line,
                    f"knot '{knot.name}' ends without a divert; treated as -> END",
                )
            )

    out.sort(key=lambda d: (d.severity is not Severity.ERROR, d.line, d.code))
    return out


# ---------------------------------------------------------------- runtime

class DialogueStatus(Enum):
    RUNNING = "running"
    AWAITING_CHOICE = "awaiting_choice"
    ENDED = "ended"


@dataclass(frozen=True)
class EmittedLine:
    text: str
    tags: tuple[str, ...] = ()


@dataclass(frozen=True)
class OfferedChoice:
    display_index: int
    label: str


@dataclass
class StepOutput:
    lines: list[EmittedLine]
    choices: list[OfferedChoice]
    status: DialogueStatus


@dataclass(frozen=True)
class LineEmitted:
    text: str
    tags: tuple[str, ...] = ()


@dataclass(frozen=True)
class ChoiceTaken:
    display_index: int
    label: str


@dataclass(frozen=True)
class EndedEvent:
    pass


TranscriptEvent = LineEmitted | ChoiceTaken | EndedEvent


class DialogueSession:
    """One visitor's live conversation over an immutable Script.

    Single-owner mutable state; create with start(), advance with choose().
    """

    def __init__(self, script: Script):
        self.script = script
        self.consumed: set[int] = set()
        self.transcript: list[TranscriptEvent] = []
        self.status = DialogueStatus.RUNNING
        self._table = script.knot_map()
        self._block: tuple[Stmt, ...] = script.start_block
        self._index = 0
        self._pending: list[ChoicePoint] = []
        self._after_group: int = 0

    def _jump(self, target: str) -> bool:
        """Move the cursor to a knot; False means END was the target."""
        if target == END_TARGET:
            return False
        knot = self._table.get(target)
        if knot is None:
            # validate() rejects this before a session starts; defensive only
            raise ScriptSyntaxError(
                [ParseError(0, "UnknownDivertTarget", f"divert to '{target}'")]
            )
        self._block = knot.body
        self._index = 0
        return True

    def _end(self, lines: list[EmittedLine]) -> StepOutput:
        self.status = DialogueStatus.ENDED
        self.transcript.append(EndedEvent())
        return StepOutput(lines=lines, choices=[], status=self.status)

    def _run(self, lines: list[EmittedLine]) -> StepOutput:
        steps = 0
        while True:
            if self._index >= len(self._block):
                return self._end(lines)
            steps += 1
            if steps > STEP_LIMIT:
                raise InfiniteLoopError(
                    f"no pause within {STEP_LIMIT} statements; divert cycle likely"
                )
            stmt = self._block[self._index]
            if isinstance(stmt, TextLine):
                emitted = EmittedLine(stmt.text, stmt.tags)
                lines.append(emitted)
                self.transcript.append(LineEmitted(stmt.text, stmt.tags))
                self._index += 1
            elif isinstance(stmt, Divert):
                if not self._jump(stmt.target):
                    return self._end(lines)
            else:
                group_end = self._index
                while group_end < len(self._block) and isinstance(
                    self._block[group_end], ChoicePoint
                ):
                    group_end += 1
                offered = [
                    s
                    for s in self._block[self._index : group_end]
                    if s.sticky or s.choice_id not in self.consumed
                ]
                if not offered:
                    # every once-only option is spent: skip the group entirely
                    self._index = group_end
                    continue
                self._pending = offered
                self._after_group = group_end
                self.status = DialogueStatus.AWAITING_CHOICE
                return StepOutput(
                    lines=lines,
                    choices=[
                        OfferedChoice(i, c.label) for i, c in enumerate(offered)
                    ],
                    status=self.status,
                )

    def choose(self, display_index: int) -> StepOutput:
        """Take one of the offered choices and run to the next pause or end."""
        if self.status is not DialogueStatus.AWAITING_CHOICE:
            raise NotAwaitingChoiceError("session is not offering choices")
        if not isinstance(display_index, int) or isinstance(display_index, bool):
            raise InvalidChoiceIndexError("choice index must be an integer")
        if not 0 <= display_index < len(self._pending):
            raise InvalidChoiceIndexError(
                f"choice index {display_index} out of range 0..{len(self._pending) - 1}"
            )
        picked = self._pending[display_index]
        self.transcript.append(ChoiceTaken(display_index, picked.label))
        if not picked.sticky:
            self.consumed.add(picked.choice_id)
        self._pending = []
        self.status = DialogueStatus.RUNNING

        lines: list[EmittedLine] = []
        if picked.spoken_text:
            lines.append(EmittedLine(picked.spoken_text, picked.tags))
            self.transcript.append(LineEmitted(picked.spoken_text, picked.tags))
        if picked.divert is not None:
            if not self._jump(picked.divert):
                return self._end(lines)
        else:
            self._index = self._after_group
        return self._run(lines)


def start(script: Script) -> tuple[DialogueSession, StepOutput]:
    """Begin a session at the start block; runs to the first pause or end."""
    session = DialogueSession(script)
    return session, session._run([])


# ---------------------------------------------------------------- transcripts

def render_step(out: StepOutput) -> list[str]:
    """The line-per-event transcript form used by goldens and `dialogue run`."""
    rendered: list[str] = []
    for line in out.lines:
        rendered.append(f"say: {line.text}")
        for tag in line.tags:
            rendered.append(f"tag: {tag}")
    for choice in out.choices:
        rendered.append(f"offer {choice.display_index + 1}: {choice.label}")
    if out.status is DialogueStatus.ENDED:
        rendered.append("end")
    return rendered


def render_diagnostics(items) -> list[str]:
    """ParseErrors and Diagnostics share one `diag:` line format."""
    rendered = []
    for item in items:
        severity = item.severity.value if isinstance(item, Diagnostic) else "error"
        rendered.append(f"diag: {severity} {item.code} line {item.line}: {item.message}")
    return rendered


def run_scripted(source: str, picks: list[int]) -> str:
    """Drive a script with a fixed pick sequence; returns the full transcript.

    Picks are 1-based to match the numbered `offer N` lines. Parse and
    validation errors become `diag:` lines; a runaway script becomes a
    final `runtime: InfiniteLoop` line. The result always ends with a
    newline unless it is empty.
    """
    rendered: list[str] = []
    try:
        script = parse_script(source)
    except ScriptSyntaxError as err:
        rendered = render_diagnostics(err.errors)
        return "".join(line + "\n" for line in rendered)
    diagnostics = validate_script(script)
    if any(d.severity is Severity.ERROR for d in diagnostics):
        rendered = render_diagnostics(diagnostics)
        return "".join(line + "\n" for line in rendered)

    try:
        session, out = start(script)
        rendered.extend(render_step(out))
        for pick in picks:
            if session.status is not DialogueStatus.AWAITING_CHOICE:
                break
            rendered.append(f"pick {pick}")
            try:
                out = session.choose(pick - 1)
            except InvalidChoiceIndexError:
                rendered.pop()  # session unchanged; transcript stays at the open offer
                break
            rendered.extend(render_step(out))
    except InfiniteLoopError:
        rendered.append("runtime: InfiniteLoop")
    return "".join(line + "\n" for line in rendered)
