import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from recvae.data import (
    InteractionMatrix,
    RawInteractions,
    fold_in_split,
    load_ratings,
    planted_factor_data,
    preprocess,
    read_bundle,
    split_users,
    write_bundle,
    write_ratings_csv,
)
from recvae.data.bundle import decode_bundle, encode_bundle
from recvae.errors import DataError, FormatError, ParseError


def _write(path, text):
    path.write_text(text)
    return path


def test_load_ratings_reads_columns(tmp_path):
    path = _write(tmp_path / "r.csv", "userId,movieId,rating,timestamp\n1,10,4.5,100\n2,11,3.0,101\n")
    raw = load_ratings(path)
    assert list(raw.user) == ["1", "2"] and list(raw.item) == ["10", "11"]
    np.testing.assert_array_equal(raw.rating, [4.5, 3.0])


def test_load_ratings_missing_file_names_path(tmp_path):
    with pytest.raises(FileNotFoundError, match="nope.csv"):
        load_ratings(tmp_path / "nope.csv")


def test_load_ratings_reports_bad_line(tmp_path):
    path = _write(tmp_path / "r.csv", "userId,itemId,rating,timestamp\n1,10,4.5,100\n2,11,abc,101\n")
    with pytest.raises(ParseError, match=r"r\.csv:3"):
        load_ratings(path)


def test_load_ratings_rejects_bad_header(tmp_path):
    with pytest.raises(ParseError, match=":1"):
        load_ratings(_write(tmp_path / "r.csv", "user,item,rating,timestamp\n"))


def test_header_only_file_warns(tmp_path, caplog):
    raw = load_ratings(_write(tmp_path / "r.csv", "userId,itemId,rating,timestamp\n"))
    assert len(raw) == 0
    assert "no ratings" in caplog.text


def _brute_preprocess(records, threshold, min_user):
    pairs = {(u, i) for u, i, r, _ in records if r >= threshold}
    while True:
        counts = {}
        for u, _ in pairs:
            counts[u] = counts.get(u, 0) + 1
        kept = {(u, i) for u, i in pairs if counts[u] >= min_user}
        if kept == pairs:
            return pairs
        pairs = kept


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 8), st.integers(0, 6), st.sampled_from([1.0, 3.5, 4.0, 5.0]),
                          st.integers(0, 10)), min_size=1, max_size=80))
def test_preprocess_matches_brute_force(records):
    expected = _brute_preprocess(records, 4.0, 3)
    raw = RawInteractions.from_records([(str(u), str(i), r, t) for u, i, r, t in records])
    if not expected:
        with pytest.raises(DataError):
            preprocess(raw, 4.0, 3)
        return
    m = preprocess(raw, 4.0, 3)
    got = {(m.user_ids[u], m.item_ids[i]) for u in range(m.n_users) for i in m.row(u)}
    assert got == {(str(u), str(i)) for u, i in expected}
    assert all(len(m.row(u)) >= 3 for u in range(m.n_users))


def test_preprocess_is_idempotent():
    m = planted_factor_data(n_users=200, n_items=50, seed=1, mean_interactions=8)
    records = [(m.user_ids[u], m.item_ids[i], 5.0, 0) for u in range(m.n_users) for i in m.row(u)]
    once = preprocess(RawInteractions.from_records(records))
    again = preprocess(RawInteractions.from_records(
        [(once.user_ids[u], once.item_ids[i], 5.0, 0) for u in range(once.n_users) for i in once.row(u)]))
    assert once == again


def test_csv_round_trip_through_preprocess(tmp_path):
    m = planted_factor_data(n_users=120, n_items=30, seed=2, mean_interactions=8)
    write_ratings_csv(tmp_path / "r.csv", m)
    assert preprocess(load_ratings(tmp_path / "r.csv")) == m


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 60), st.integers(0, 2 ** 31))
def test_fold_in_split_partitions_row(n, seed):
    row = np.arange(0, 3 * n, 3)
    fold, hold = fold_in_split(row, 0.8, seed)
    assert len(np.intersect1d(fold, hold)) == 0
    np.testing.assert_array_equal(np.union1d(fold, hold), row)
    if n >= 2:
        assert len(hold) >= 1
        assert len(fold) == min(max(1, math.floor(0.8 * n)), n - 1)


def test_fold_in_split_examples():
    fold, hold = fold_in_split(np.arange(10), 0.8, 0)
    assert (len(fold), len(hold)) == (8, 2)
    fold, hold = fold_in_split(np.array([7]), 0.8, 0)
    assert list(fold) == [7] and len(hold) == 0
    with pytest.raises(ValueError):
        fold_in_split(np.array([], dtype=int))


def test_split_users_partitions_users():
    m = planted_factor_data(n_users=300, n_items=40, seed=4, mean_interactions=10)
    s = split_users(m, 50, seed=9)
    everyone = np.concatenate([s.train_users, s.validation.users, s.test.users])
    np.testing.assert_array_equal(np.sort(everyone), np.arange(300))
    for held in (s.validation, s.test):
        for j, u in enumerate(held.users):
            np.testing.assert_array_equal(np.union1d(held.fold_in(j), held.holdout(j)), m.row(u))
    assert split_users(m, 50, seed=9) == s


def test_split_users_rejects_too_many_heldout():
    m = planted_factor_data(n_users=20, n_items=40, seed=4, mean_interactions=10)
    with pytest.raises(DataError):
        split_users(m, 10)


def test_bundle_round_trip(tmp_path):
    m = planted_factor_data(n_users=150, n_items=40, seed=5, mean_interactions=10)
    s = split_users(m, 20, seed=5)
    write_bundle(tmp_path / "d.rvds", m, s)
    m2, s2 = read_bundle(tmp_path / "d.rvds")
    assert m2 == m and s2 == s
    assert encode_bundle(m2, s2) == (tmp_path / "d.rvds").read_bytes()


def test_bundle_format_errors():
    m = InteractionMatrix.from_rows([[0, 1], [1]], 2)
    buf = encode_bundle(m)
    assert decode_bundle(buf)[0] == m
    with pytest.raises(FormatError, match="magic"):
        decode_bundle(b"XXXX" + buf[4:])
    with pytest.raises(FormatError, match="truncated"):
        decode_bundle(buf[:-2])
    with pytest.raises(FormatError, match="trailing"):
        decode_bundle(buf + b"\0")


def test_planted_data_is_seeded():
    a = planted_factor_data(n_users=50, n_items=20, seed=1, mean_interactions=6)
    assert a == planted_factor_data(n_users=50, n_items=20, seed=1, mean_interactions=6)
    assert a != planted_factor_data(n_users=50, n_items=20, seed=2, mean_interactions=6)
    assert min(len(a.row(u)) for u in range(a.n_users)) >= 5
