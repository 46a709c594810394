import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sbrbench.corpus import (
    ColumnSpec, Event, IdMap, SessionSet, encode_ids, from_sequences, load_event_log, sessionize,
)
from sbrbench.errors import ParseError

COLS = ColumnSpec(session="s", item="i", time="t")


def test_load_simple(tmp_path):
    p = tmp_path / "log.csv"
    p.write_text("s,i,t\n1,10,100\n1,11,101")
    assert load_event_log(p, COLS) == [Event(1, 10, 100), Event(1, 11, 101)]


def test_load_empty_data_section(tmp_path):
    p = tmp_path / "log.csv"
    p.write_text("s,i,t\n")
    assert load_event_log(p, COLS) == []


def test_load_bad_row_names_line(tmp_path):
    p = tmp_path / "log.csv"
    p.write_text("s,i,t\n1,abc,100\n")
    with pytest.raises(ParseError) as err:
        load_event_log(p, COLS)
    assert err.value.line == 2
    assert ":2:" in str(err.value)


def test_load_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_event_log(tmp_path / "nope.csv", COLS)


def test_load_tab_separated_without_header(tmp_path):
    p = tmp_path / "log.tsv"
    p.write_text("100\t7\t3\n101\t8\t3\n")
    cols = ColumnSpec(session=2, item=1, time=0, delimiter="\t", header=False)
    assert load_event_log(p, cols) == [Event(3, 7, 100), Event(3, 8, 101)]


def test_fractional_time_truncated_to_millis(tmp_path):
    p = tmp_path / "log.csv"
    p.write_text("s,i,t\n1,1,100.12345\n1,2,101.0\n")
    ev = load_event_log(p, COLS)
    assert ev[0].timestamp == pytest.approx(100.123, abs=1e-9)
    assert ev[1].timestamp == 101 and isinstance(ev[1].timestamp, int)


def test_column_reordering_by_header(tmp_path):
    p = tmp_path / "log.csv"
    p.write_text("t,junk,i,s\n5,x,2,9\n")
    assert load_event_log(p, COLS) == [Event(9, 2, 5)]


def test_sessionize_groups_and_sorts():
    a, b, c = 10, 11, 12
    ss = sessionize([Event(1, a, 2), Event(1, b, 1), Event(2, c, 5)])
    by_id = {s.session_id: s for s in ss}
    assert by_id[1].items == (b, a) and by_id[1].times == (1, 2)
    assert by_id[2].items == (c,)
    assert ss.vocabulary == {a, b, c}


def test_sessionize_empty():
    ss = sessionize([])
    assert len(ss) == 0 and ss.vocabulary == frozenset() and ss.span_days == 0


def test_sessionize_keeps_duplicates():
    ss = sessionize([Event(1, 5, 2), Event(1, 5, 2)])
    assert ss[0].items == (5, 5)


def test_ties_keep_input_order():
    ss = sessionize([Event(1, 7, 3), Event(1, 4, 3), Event(1, 9, 1)])
    assert ss[0].items == (9, 7, 4)


def test_sessions_ordered_by_end_time():
    ss = sessionize([Event(1, 1, 50), Event(2, 1, 10), Event(3, 1, 30), Event(2, 2, 60)])
    assert [s.session_id for s in ss] == [3, 1, 2]


def test_stats_and_span():
    ss = from_sequences([[1, 2], [2, 3, 3]])
    assert ss.stats() == {"actions": 5, "sessions": 2, "items": 3, "days": 2}


def test_encode_ids_dense_in_original_order():
    events = [Event(40, 900, 1), Event(40, 5, 2), Event(7, 900, 3)]
    out, smap, imap = encode_ids(events)
    assert imap.original == (5, 900) and smap.original == (7, 40)
    assert out == [Event(1, 1, 1), Event(1, 0, 2), Event(0, 1, 3)]


def test_id_map_written(tmp_path):
    IdMap.from_values([30, 10]).write(tmp_path / "m.csv", "item")
    assert (tmp_path / "m.csv").read_text() == "original_item,dense_item\n10,0\n30,1\n"


events_strategy = st.lists(
    st.tuples(st.integers(0, 6), st.integers(0, 20)), min_size=0, max_size=40,
)


@given(events_strategy, st.randoms(use_true_random=False))
@settings(max_examples=100, deadline=None)
def test_sessionize_permutation_invariant(pairs, rnd):
    # distinct timestamps per event: ties are resolved by input order, which a shuffle changes
    events = [Event(s, i, t) for t, (s, i) in enumerate(pairs)]
    shuffled = list(events)
    rnd.shuffle(shuffled)
    assert sessionize(events) == sessionize(shuffled)


@given(events_strategy)
@settings(max_examples=100, deadline=None)
def test_count_conservation(pairs):
    events = [Event(s, i, random.Random(n).randint(0, 5)) for n, (s, i) in enumerate(pairs)]
    ss = sessionize(events)
    assert ss.n_events == len(events)
    assert isinstance(ss, SessionSet)
