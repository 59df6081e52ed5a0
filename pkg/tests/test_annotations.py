"""Comment store: posting, ordering, views, summary ranking, journal round-trips.

The rank/filter tests check the store against a brute-force oracle that
sorts and filters plain tuples, written before the store existed.
"""

import json
import threading

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prism.annotations import (
    ANONYMOUS_NAME,
    GUESTBOOK,
    AnnotationStore,
    ArtworkRank,
    BodyTooLongError,
    Comment,
    CommentRank,
    CorruptJournalError,
    EmptyBodyError,
    FilterSpec,
    NameTooLongError,
    RankKey,
    Target,
    UnknownTargetError,
    artwork_target,
)
from prism.exhibition import demo_exhibition

EX = demo_exhibition()
ART_IDS = [a.id for a in EX.artworks]
A1, A2, A3 = ART_IDS[0], ART_IDS[1], ART_IDS[2]


def make_store():
    return AnnotationStore(EX)


# ---------------------------------------------------------------- oracles

def oracle_newest_first(rows):
    """rows: list of (seq, created_at) -> seqs in expected output order."""
    return [s for s, at in sorted(rows, key=lambda r: (r[1], r[0]), reverse=True)]


def oracle_filter(comments, author=None, keyword=None, since=None, until=None):
    out = []
    for c in comments:
        if author is not None and author.lower() not in c.guest_name.lower():
            continue
        if keyword is not None and keyword.lower() not in c.body.lower():
            continue
        if since is not None and c.created_at < since:
            continue
        if until is not None and c.created_at > until:
            continue
        out.append(c)
    return out


def oracle_rank_comments(comments, rank):
    newest = sorted(comments, key=lambda c: (c.created_at, c.seq), reverse=True)
    if rank is CommentRank.NEWEST:
        return newest
    if rank is CommentRank.OLDEST:
        return list(reversed(newest))
    return sorted(comments, key=lambda c: (-len(c.body), -c.seq))


def oracle_rank_sections(sections, rank):
    if rank is ArtworkRank.DISPLAY_ORDER:
        return list(sections)
    # stable sort keeps display order among equal counts
    return sorted(sections, key=lambda s: -s.comment_count)


# ---------------------------------------------------------------- posting

def test_first_post_gets_seq_1_and_is_listed_first():
    store = make_store()
    c = store.post(artwork_target(A1), "Ada", "Striking form.", now=1000)
    assert c.seq == 1
    assert store.comments_of(artwork_target(A1))[0] == c


def test_seq_increments_across_targets():
    store = make_store()
    a = store.post(artwork_target(A1), "x", "one", now=1)
    b = store.post(GUESTBOOK, "y", "two", now=2)
    c = store.post(artwork_target(A2), "z", "three", now=3)
    assert (a.seq, b.seq, c.seq) == (1, 2, 3)


def test_blank_name_defaults_to_anonymous():
    store = make_store()
    assert store.post(artwork_target(A1), None, "hi", now=1).guest_name == ANONYMOUS_NAME
    assert store.post(artwork_target(A1), "", "hi", now=2).guest_name == ANONYMOUS_NAME
    assert store.post(artwork_target(A1), "   ", "hi", now=3).guest_name == ANONYMOUS_NAME


def test_body_is_trimmed_and_empty_body_rejected():
    store = make_store()
    assert store.post(GUESTBOOK, "a", "  padded  ", now=1).body == "padded"
    with pytest.raises(EmptyBodyError):
        store.post(GUESTBOOK, "a", "   ", now=2)
    with pytest.raises(EmptyBodyError):
        store.post(GUESTBOOK, "a", "", now=3)


def test_length_limits():
    store = make_store()
    store.post(GUESTBOOK, "n" * 80, "b" * 2000, now=1)  # at the limits: fine
    with pytest.raises(BodyTooLongError):
        store.post(GUESTBOOK, "a", "b" * 2001, now=2)
    with pytest.raises(NameTooLongError):
        store.post(GUESTBOOK, "n" * 81, "hi", now=3)


def test_unknown_artwork_rejected_by_post_and_reads():
    store = make_store()
    with pytest.raises(UnknownTargetError):
        store.post(artwork_target("nope"), "a", "hi", now=1)
    with pytest.raises(UnknownTargetError):
        store.comments_of(artwork_target("nope"))
    with pytest.raises(UnknownTargetError):
        store.artwork_view("nope")


def test_failed_post_consumes_no_seq():
    store = make_store()
    with pytest.raises(EmptyBodyError):
        store.post(GUESTBOOK, "a", "", now=1)
    assert store.post(GUESTBOOK, "a", "ok", now=2).seq == 1


# ---------------------------------------------------------------- ordering

def test_three_posts_return_newest_first():
    store = make_store()
    store.post(artwork_target(A1), "a", "first", now=1)
    store.post(artwork_target(A1), "b", "second", now=2)
    store.post(artwork_target(A1), "c", "third", now=3)
    bodies = [c.body for c in store.comments_of(artwork_target(A1))]
    assert bodies == ["third", "second", "first"]


def test_equal_timestamps_tie_broken_by_seq():
    store = make_store()
    first = store.post(artwork_target(A1), "a", "earlier post", now=500)
    second = store.post(artwork_target(A1), "b", "later post", now=500)
    assert second.seq > first.seq
    assert store.comments_of(artwork_target(A1))[0] == second


def test_guestbook_and_artwork_threads_are_disjoint():
    store = make_store()
    store.post(GUESTBOOK, "g", "guest line", now=1)
    store.post(artwork_target(A1), "v", "artwork line", now=2)
    assert [c.body for c in store.comments_of(GUESTBOOK)] == ["guest line"]
    assert [c.body for c in store.comments_of(artwork_target(A1))] == ["artwork line"]


@given(
    st.lists(
        st.tuples(st.sampled_from([A1, A2, None]), st.integers(0, 50)),
        max_size=60,
    )
)
def test_ordering_matches_sort_oracle(posts):
    store = make_store()
    rows = {A1: [], A2: [], None: []}
    for art, at in posts:
        target = GUESTBOOK if art is None else artwork_target(art)
        c = store.post(target, "who", "text", now=at)
        rows[art].append((c.seq, at))
    for art in (A1, A2, None):
        target = GUESTBOOK if art is None else artwork_target(art)
        got = [c.seq for c in store.comments_of(target)]
        assert got == oracle_newest_first(rows[art])


@given(st.lists(st.integers(0, 20), max_size=40))
def test_seq_values_are_1_to_n(times):
    store = make_store()
    for at in times:
        store.post(GUESTBOOK, "w", "t", now=at)
    seqs = sorted(c.seq for c in store.comments_of(GUESTBOOK))
    assert seqs == list(range(1, len(times) + 1))


def test_concurrent_posts_keep_seq_gapless():
    store = make_store()

    def worker(k):
        for i in range(25):
            store.post(artwork_target(A1), f"w{k}", f"post {i}", now=7)

    threads = [threading.Thread(target=worker, args=(k,)) for k in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    seqs = sorted(c.seq for c in store.comments_of(artwork_target(A1)))
    assert seqs == list(range(1, 201))


# ---------------------------------------------------------------- views

def test_artwork_view_three_sections_collapsed():
    store = make_store()
    view = store.artwork_view(A1)
    assert view.curator_section == EX.artworks[0].curator_label
    assert view.visitor_section == []
    assert view.visitor_section_collapsed is True
    assert view.form_collapsed is True
    assert view.form_fields == ("guest_name", "body")


def test_artwork_view_read_your_write():
    store = make_store()
    store.post(artwork_target(A1), "Ada", "Striking form.", now=1)
    view = store.artwork_view(A1)
    assert view.visitor_section[0].body == "Striking form."


def test_guestbook_view_sign_then_read():
    store = make_store()
    assert store.guestbook_view().entries == []
    store.post(GUESTBOOK, "Grace", "Lovely show.", now=9)
    entries = store.guestbook_view().entries
    assert [(e.guest_name, e.body) for e in entries] == [("Grace", "Lovely show.")]


# ---------------------------------------------------------------- summary

def seeded_store():
    """3 commented artworks (counts a1:3, a2:5, a3:3), plus guestbook noise."""
    store = make_store()
    t = 0
    for art, n in ((A1, 3), (A2, 5), (A3, 3)):
        for i in range(n):
            t += 10
            store.post(artwork_target(art), f"Visitor {i}", f"note {i} on {art}", now=t)
    store.post(GUESTBOOK, "Guest", "general impression", now=t + 1)
    return store


def test_summary_has_section_per_artwork_in_display_order():
    report = seeded_store().summary()
    assert [s.artwork_id for s in report.sections] == ART_IDS
    assert [s.artwork_title for s in report.sections] == [a.title for a in EX.artworks]


def test_summary_counts_and_guestbook_exclusion():
    report = seeded_store().summary()
    counts = {s.artwork_id: s.comment_count for s in report.sections}
    assert counts[A1] == 3 and counts[A2] == 5 and counts[A3] == 3
    assert sum(counts.values()) == 11
    for s in report.sections:
        for c in s.comments:
            assert not c.target.is_guestbook


def test_identity_summary_reproduces_artwork_views():
    store = seeded_store()
    report = store.summary()
    for section in report.sections:
        assert list(section.comments) == store.artwork_view(section.artwork_id).visitor_section


def test_most_comments_ties_keep_display_order():
    report = seeded_store().summary(RankKey(artwork_rank=ArtworkRank.MOST_COMMENTS))
    ranked = [s.artwork_id for s in report.sections]
    assert ranked[:3] == [A2, A1, A3]
    assert ranked[3:] == ART_IDS[3:]  # all zero-count sections keep display order


def test_oldest_rank_reverses_each_section():
    store = seeded_store()
    newest = store.summary()
    oldest = store.summary(RankKey(comment_rank=CommentRank.OLDEST))
    for a, b in zip(newest.sections, oldest.sections):
        assert list(b.comments) == list(reversed(a.comments))


def test_longest_rank_orders_by_body_length():
    store = make_store()
    store.post(artwork_target(A1), "a", "mid length", now=1)
    store.post(artwork_target(A1), "b", "x", now=2)
    store.post(artwork_target(A1), "c", "the longest body of all", now=3)
    report = store.summary(RankKey(comment_rank=CommentRank.LONGEST))
    bodies = [c.body for c in report.sections[0].comments]
    assert bodies == ["the longest body of all", "mid length", "x"]


def test_keyword_filter_is_case_insensitive_substring():
    store = make_store()
    store.post(artwork_target(A1), "a", "A Bronze finish", now=1)
    store.post(artwork_target(A1), "b", "marble only", now=2)
    store.post(artwork_target(A2), "c", "more bronze here", now=3)
    report = store.summary(spec=FilterSpec(keyword="bronze"))
    kept = [c.body for s in report.sections for c in s.comments]
    assert sorted(kept) == ["A Bronze finish", "more bronze here"]


def test_author_filter_and_time_window_inclusive():
    store = make_store()
    store.post(artwork_target(A1), "Ada Lovelace", "one", now=100)
    store.post(artwork_target(A1), "Grace Hopper", "two", now=200)
    store.post(artwork_target(A1), "ada again", "three", now=300)
    by_author = store.summary(spec=FilterSpec(author_substring="ADA"))
    assert [c.body for c in by_author.sections[0].comments] == ["three", "one"]
    windowed = store.summary(spec=FilterSpec(since=100, until=200))
    assert [c.body for c in windowed.sections[0].comments] == ["two", "one"]


@st.composite
def random_posts(draw):
    n = draw(st.integers(0, 120))
    authors = ["Ada", "Grace", "bronze fan", "Anonymous Visitor"]
    words = ["bronze", "marble", "steel", "light", "form"]
    posts = []
    for _ in range(n):
        art = draw(st.sampled_from(ART_IDS[:4]))
        author = draw(st.sampled_from(authors))
        body = " ".join(draw(st.lists(st.sampled_from(words), min_size=1, max_size=6)))
        at = draw(st.integers(0, 40))
        posts.append((art, author, body, at))
    return posts


@settings(max_examples=60, deadline=None)
@given(
    posts=random_posts(),
    comment_rank=st.sampled_from(list(CommentRank)),
    artwork_rank=st.sampled_from(list(ArtworkRank)),
    author=st.sampled_from([None, "ada", "fan"]),
    keyword=st.sampled_from([None, "bronze", "STEEL"]),
    since=st.sampled_from([None, 10]),
    until=st.sampled_from([None, 30]),
)
def test_summary_matches_brute_force_oracle(
    posts, comment_rank, artwork_rank, author, keyword, since, until
):
    store = make_store()
    for art, who, body, at in posts:
        store.post(artwork_target(art), who, body, now=at)
    rank = RankKey(comment_rank, artwork_rank)
    spec = FilterSpec(author_substring=author, keyword=keyword, since=since, until=until)
    report = store.summary(rank, spec)

    class Row:
        def __init__(self, artwork_id, seqs):
            self.artwork_id = artwork_id
            self.seqs = seqs
            self.comment_count = len(seqs)

    rows = []
    for section in store.summary().sections:  # identity = display order, newest first
        kept = oracle_filter(list(section.comments), author, keyword, since, until)
        ranked = oracle_rank_comments(kept, comment_rank)
        rows.append(Row(section.artwork_id, [c.seq for c in ranked]))
    expected = oracle_rank_sections(rows, artwork_rank)

    assert [s.artwork_id for s in report.sections] == [r.artwork_id for r in expected]
    for section, row in zip(report.sections, expected):
        assert [c.seq for c in section.comments] == row.seqs


# ---------------------------------------------------------------- journal

def test_empty_store_round_trips():
    store = make_store()
    text = store.save()
    assert text == ""
    again = AnnotationStore.load(text, EX)
    assert again.comments_of(GUESTBOOK) == []
    assert again.next_seq == 1


def test_journal_line_shape():
    store = make_store()
    store.post(artwork_target(A1), "Ada", "hello", now=42)
    record = json.loads(store.save().splitlines()[0])
    assert record == {"seq": 1, "target": f"artwork:{A1}", "name": "Ada", "body": "hello", "at": 42}


def test_guestbook_target_encoding():
    store = make_store()
    store.post(GUESTBOOK, "g", "hi", now=1)
    assert json.loads(store.save())["target"] == "guestbook"


@settings(max_examples=50, deadline=None)
@given(
    st.lists(
        st.tuples(
            st.sampled_from(ART_IDS + [None]),
            st.text(min_size=0, max_size=20),
            st.text(min_size=1, max_size=40).filter(lambda s: s.strip()),
            st.integers(0, 10**12),
        ),
        max_size=50,
    )
)
def test_save_load_round_trip_preserves_everything(posts):
    store = make_store()
    for art, name, body, at in posts:
        target = GUESTBOOK if art is None else artwork_target(art)
        store.post(target, name, body, now=at)
    reloaded = AnnotationStore.load(store.save(), EX)
    assert reloaded.save() == store.save()
    assert reloaded.next_seq == store.next_seq
    for art in ART_IDS:
        assert reloaded.comments_of(artwork_target(art)) == store.comments_of(
            artwork_target(art)
        )
    assert reloaded.comments_of(GUESTBOOK) == store.comments_of(GUESTBOOK)


def test_truncated_final_line_recovers_prefix():
    store = make_store()
    store.post(artwork_target(A1), "a", "first", now=1)
    store.post(artwork_target(A1), "b", "second", now=2)
    store.post(GUESTBOOK, "c", "third", now=3)
    text = store.save()
    truncated = text[: text.rindex('"body"') + 9]  # chop mid-record
    with pytest.raises(CorruptJournalError) as err:
        AnnotationStore.load(truncated, EX)
    assert err.value.line == 3
    recovered = err.value.store
    assert [c.body for c in recovered.comments_of(artwork_target(A1))] == ["second", "first"]
    assert recovered.comments_of(GUESTBOOK) == []
    assert recovered.next_seq == 3


def test_corrupt_middle_line_reports_line_number():
    good = AnnotationStore(EX)
    good.post(GUESTBOOK, "a", "one", now=1)
    good.post(GUESTBOOK, "b", "two", now=2)
    lines = good.save().splitlines()
    lines.insert(1, "{not json")
    with pytest.raises(CorruptJournalError) as err:
        AnnotationStore.load("\n".join(lines) + "\n", EX)
    assert err.value.line == 2
    assert len(err.value.store.comments_of(GUESTBOOK)) == 1


def test_out_of_order_seq_is_corrupt():
    a = json.dumps({"seq": 2, "target": "guestbook", "name": "x", "body": "b", "at": 1})
    b = json.dumps({"seq": 2, "target": "guestbook", "name": "x", "body": "b", "at": 1})
    with pytest.raises(CorruptJournalError) as err:
        AnnotationStore.load(a + "\n" + b + "\n", EX)
    assert err.value.line == 2


def test_unknown_artwork_in_journal_is_corrupt():
    line = json.dumps({"seq": 1, "target": "artwork:ghost", "name": "x", "body": "b", "at": 1})
    with pytest.raises(CorruptJournalError):
        AnnotationStore.load(line + "\n", EX)


def test_sink_receives_each_post_immediately(tmp_path):
    path = tmp_path / "journal.jsonl"
    with open(path, "w", encoding="utf-8") as sink:
        store = AnnotationStore(EX, sink=sink)
        store.post(artwork_target(A1), "Ada", "hello", now=5)
        on_disk = path.read_text(encoding="utf-8")
    assert on_disk == store.save()


def test_target_decode_rejects_garbage():
    with pytest.raises(ValueError):
        Target.decode("artwork:")
    with pytest.raises(ValueError):
        Target.decode("visitor:x")
    assert Target.decode("guestbook").is_guestbook
    assert Target.decode("artwork:a1") == Target("a1")
