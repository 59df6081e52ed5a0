"""Curator command line: validate, serve, summarize, seed, and test dialogues.

Exit codes: 0 success, 1 validation or runtime failure, 2 usage error
(argparse's own convention). `--format json` turns every read command
into tooling-friendly output; the summary JSON is byte-identical to the
service's GET /summary for the same store state and parameters.
"""

from __future__ import annotations

import argparse
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

from .annotations import ArtworkRank, CommentRank, FilterSpec, RankKey
from .dialogue import (
    DialogueStatus,
    InfiniteLoopError,
    InvalidChoiceIndexError,
    ScriptSyntaxError,
    Severity,
    parse_script,
    render_step,
    run_scripted,
    start,
    validate_script,
)
from .exhibition import ExhibitionFormatError, demo_document, parse_exhibition
from .serialize import canonical_json, summary_payload
from .service import ServerConfig, load_exhibition, open_store, serve


def _env_int(name: str) -> int | None:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return None
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(2)


def _env_path(name: str) -> Path | None:
    raw = os.environ.get(name)
    return Path(raw) if raw else None


# ---------------------------------------------------------------- validate

def _exhibition_issue_lines(path: str, issues) -> list[str]:
    lines = []
    for issue in issues:
        where = f" line {issue.line}" if issue.line is not None else ""
        at = f" at {issue.path}" if issue.path else ""
        lines.append(f"{path}: error {issue.code}{where}{at}: {issue.message}")
    return lines


def cmd_validate(args) -> int:
    reports = []  # (path, ok, printable lines, json issues)
    failed = False

    try:
        text = Path(args.exhibition).read_text(encoding="utf-8")
    except OSError as err:
        print(f"{args.exhibition}: error ReadFailed: {err}", file=sys.stderr)
        return 1
    try:
        parse_exhibition(text)
        reports.append((args.exhibition, True, [], []))
    except ExhibitionFormatError as err:
        failed = True
        reports.append(
            (
                args.exhibition,
                False,
                _exhibition_issue_lines(args.exhibition, err.errors),
                [
                    {
                        "severity": "error",
                        "code": e.code,
                        "line": e.line,
                        "message": e.message,
                    }
                    for e in err.errors
                ],
            )
        )

    for script_path in args.scripts:
        try:
            source = Path(script_path).read_text(encoding="utf-8")
        except OSError as err:
            print(f"{script_path}: error ReadFailed: {err}", file=sys.stderr)
            return 1
        try:
            script = parse_script(source)
        except ScriptSyntaxError as err:
            failed = True
            reports.append(
                (
                    script_path,
                    False,
                    [
                        f"{script_path}: error {e.code} line {e.line}: {e.message}"
                        for e in err.errors
                    ],
                    [
                        {
                            "severity": "error",
                            "code": e.code,
                            "line": e.line,
                            "message": e.message,
                        }
                        for e in err.errors
                    ],
                )
            )
            continue
        diags = validate_script(script)
        if any(d.severity is Severity.ERROR for d in diags):
            failed = True
        reports.append(
            (
                script_path,
                not any(d.severity is Severity.ERROR for d in diags),
                [
                    f"{script_path}: {d.severity.value} {d.code} line {d.line}: {d.message}"
                    for d in diags
                ],
                [
                    {
                        "severity": d.severity.value,
                        "code": d.code,
                        "line": d.line,
                        "message": d.message,
                    }
                    for d in diags
                ],
            )
        )

    if args.format == "json":
        print(
            canonical_json(
                {
                    "ok": not failed,
                    "files": [
                        {"path": path, "ok": ok, "issues": issues}
                        for path, ok, _, issues in reports
                    ],
                }
            ),
            end="",
        )
    else:
        for path, ok, lines, _ in reports:
            for line in lines:
                print(line)
            if ok and not lines:
                print(f"{path}: ok")
    return 1 if failed else 0


# ---------------------------------------------------------------- serve

def cmd_serve(args) -> int:
    config = ServerConfig(
        port=args.port,
        host=args.host,
        exhibition_path=Path(args.exhibition) if args.exhibition else None,
        journal_path=Path(args.journal) if args.journal else None,
        interaction_radius=args.radius,
        fixed_clock_ms=args.fixed_clock,
        session_ttl_s=args.session_ttl,
        static_dir=Path(args.static_dir) if args.static_dir else None,
    )
    try:
        return serve(config)
    except (ExhibitionFormatError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


# ---------------------------------------------------------------- summary

def _human_time(ms: int) -> str:
    return datetime.fromtimestamp(ms / 1000, tz=timezone.utc).strftime(
        "%Y-%m-%d %H:%M:%S"
    )


def cmd_summary(args) -> int:
    journal = Path(args.journal) if args.journal else None
    if journal is None:
        print("error: no journal given (use --journal or PRISM_JOURNAL)", file=sys.stderr)
        return 2
    if not journal.exists():
        print(f"error: journal {journal} does not exist", file=sys.stderr)
        return 1
    try:
        exhibition = load_exhibition(Path(args.exhibition) if args.exhibition else None)
    except (ExhibitionFormatError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    store = open_store(exhibition, journal, writable=False)

    rank = RankKey(
        comment_rank=CommentRank(args.comment_rank),
        artwork_rank=ArtworkRank(args.artwork_rank),
    )
    spec = FilterSpec(
        author_substring=args.author or None,
        keyword=args.keyword or None,
        since=args.since,
        until=args.until,
    )
    report = store.summary(rank, spec)

    if args.format == "json":
        print(canonical_json(summary_payload(report)), end="")
        return 0

    print(exhibition.title)
    print(f"rank: comments {rank.comment_rank.value}, artworks {rank.artwork_rank.value}")
    parts = []
    if spec.author_substring:
        parts.append(f"author~{spec.author_substring!r}")
    if spec.keyword:
        parts.append(f"keyword~{spec.keyword!r}")
    if spec.since is not None:
        parts.append(f"since={spec.since}")
    if spec.until is not None:
        parts.append(f"until={spec.until}")
    print(f"filter: {' '.join(parts) if parts else '(none)'}")
    for section in report.sections:
        print()
        print(f"{section.artwork_title} ({section.artwork_id}): {section.comment_count} comment(s)")
        for c in section.comments:
            print(f"  [{c.seq}] {_human_time(c.created_at)} {c.guest_name}: {c.body}")
    return 0


# ---------------------------------------------------------------- seed-demo

def cmd_seed_demo(args) -> int:
    from .session import build_guide_script  # local import keeps startup light

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    exhibition_text = demo_document()
    exhibition = parse_exhibition(exhibition_text)

    files = {
        out / "exhibition.json": exhibition_text,
        out / "guide.mink": build_guide_script(exhibition),
        out / "journal.jsonl": "",
    }
    for path, content in files.items():
        path.write_text(content, encoding="utf-8")
        print(f"wrote {path}")
    return 0


# ---------------------------------------------------------------- dialogue

def cmd_dialogue_run(args) -> int:
    try:
        source = Path(args.script).read_text(encoding="utf-8")
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1

    try:
        script = parse_script(source)
        diags = validate_script(script)
    except ScriptSyntaxError as err:
        for e in err.errors:
            print(f"diag: error {e.code} line {e.line}: {e.message}")
        return 1
    if any(d.severity is Severity.ERROR for d in diags):
        for d in diags:
            print(f"diag: {d.severity.value} {d.code} line {d.line}: {d.message}")
        return 1

    if not sys.stdin.isatty():
        # scripted run: stdin is the pick sequence, output is the transcript
        picks = []
        for token in sys.stdin.read().split():
            try:
                picks.append(int(token))
            except ValueError:
                print(f"error: not a choice number: {token!r}", file=sys.stderr)
                return 2
        transcript = run_scripted(source, picks)
        print(transcript, end="")
        return 1 if transcript.endswith("runtime: InfiniteLoop\n") else 0

    try:
        session, out = start(script)
    except InfiniteLoopError:
        print("runtime: InfiniteLoop")
        return 1
    for line in render_step(out):
        print(line)
    while session.status is DialogueStatus.AWAITING_CHOICE:
        print("> ", end="", file=sys.stderr, flush=True)
        raw = sys.stdin.readline()
        if not raw:
            break
        raw = raw.strip()
        if not raw:
            continue
        try:
            pick = int(raw)
        except ValueError:
            print(f"(not a number: {raw})", file=sys.stderr)
            continue
        try:
            out = session.choose(pick - 1)
        except InvalidChoiceIndexError as err:
            print(f"({err.message})", file=sys.stderr)
            continue
        except InfiniteLoopError:
            print("runtime: InfiniteLoop")
            return 1
        print(f"pick {pick}")
        for line in render_step(out):
            print(line)
    return 0


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prism",
        description="Curated walkthrough exhibitions with peer comments and a scripted guide.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser(
        "validate", help="check an exhibition document and optional dialogue scripts"
    )
    p_validate.add_argument("exhibition", help="exhibition JSON file")
    p_validate.add_argument("scripts", nargs="*", help="dialogue script files")
    p_validate.add_argument("--format", choices=["text", "json"], default="text")
    p_validate.set_defaults(func=cmd_validate)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument(
        "--port", type=int, default=_env_int("PRISM_PORT") or 8765
    )
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument(
        "--exhibition",
        default=os.environ.get("PRISM_EXHIBITION") or None,
        help="exhibition JSON (default: the bundled demo)",
    )
    p_serve.add_argument(
        "--journal",
        default=os.environ.get("PRISM_JOURNAL") or None,
        help="append-only comment journal (default: keep comments in memory)",
    )
    p_serve.add_argument("--radius", type=float, default=2.5, help="interaction reach in metres")
    p_serve.add_argument(
        "--session-ttl", type=float, default=7200.0, help="idle session lifetime in seconds"
    )
    p_serve.add_argument(
        "--fixed-clock", type=int, default=None, metavar="MS",
        help="freeze server timestamps (testing)",
    )
    p_serve.add_argument(
        "--static-dir", default=None, help="also serve this directory of static files"
    )
    p_serve.set_defaults(func=cmd_serve)

    p_summary = sub.add_parser("summary", help="print the consolidated comment report")
    p_summary.add_argument(
        "--journal", default=os.environ.get("PRISM_JOURNAL") or None
    )
    p_summary.add_argument(
        "--exhibition", default=os.environ.get("PRISM_EXHIBITION") or None
    )
    p_summary.add_argument(
        "--comment-rank",
        choices=[r.value for r in CommentRank],
        default=CommentRank.NEWEST.value,
    )
    p_summary.add_argument(
        "--artwork-rank",
        choices=[r.value for r in ArtworkRank],
        default=ArtworkRank.DISPLAY_ORDER.value,
    )
    p_summary.add_argument("--author", default=None, help="author name substring filter")
    p_summary.add_argument("--keyword", default=None, help="body substring filter")
    p_summary.add_argument("--since", type=int, default=None, metavar="MS")
    p_summary.add_argument("--until", type=int, default=None, metavar="MS")
    p_summary.add_argument("--format", choices=["text", "json"], default="text")
    p_summary.set_defaults(func=cmd_summary)

    p_seed = sub.add_parser(
        "seed-demo", help="write the bundled exhibition, guide script, and empty journal"
    )
    p_seed.add_argument("--out", required=True, help="output directory")
    p_seed.set_defaults(func=cmd_seed_demo)

    p_dialogue = sub.add_parser("dialogue", help="dialogue script tools")
    dialogue_sub = p_dialogue.add_subparsers(dest="dialogue_command", required=True)
    p_run = dialogue_sub.add_parser("run", help="step through a script")
    p_run.add_argument("script", help="Mini-Ink script file")
    p_run.set_defaults(func=cmd_dialogue_run)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
