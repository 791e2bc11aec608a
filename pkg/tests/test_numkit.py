from __future__ import annotations

import threading
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ech.numkit import (
    ECHError,
    Theta,
    WeightSequence,
    ceil_mul,
    floor_mul,
    format_rational,
    parse_rational,
    parse_theta,
    sequence_dominates,
    weight_sequence,
)
from oracles import weights_brute

pos_rationals = st.fractions(min_value=F(1, 12), max_value=F(20), max_denominator=12)
thetas = st.builds(Theta, st.fractions(min_value=-5, max_value=5, max_denominator=10), st.sampled_from(["exact", "plus", "minus"]))


@pytest.mark.parametrize(
    "theta, k, expected",
    [(Theta(F(1, 2), "plus"), 2, 1), (Theta(F(1, 2), "minus"), 2, 0), (Theta(F(2, 5), "plus"), 7, 2)],
)
def test_floor_mul_examples(theta, k, expected):
    assert floor_mul(theta, k) == expected


def test_ceil_mul_sides():
    assert ceil_mul(Theta(F(1, 2), "plus"), 2) == 2
    assert ceil_mul(Theta(F(1, 2), "minus"), 2) == 1
    assert ceil_mul(Theta(F(1, 2), "exact"), 2) == 1
    assert ceil_mul(Theta(F(2, 5), "minus"), 7) == 3


@pytest.mark.parametrize(
    "a, b, count, expected",
    [
        (1, 1, 6, [0, 1, 1, 2, 2, 2]),
        (1, 2, 12, [0, 1, 2, 2, 3, 3, 4, 4, 4, 5, 5, 5]),
        (2, 3, 10, [0, 2, 3, 4, 5, 6, 6, 7, 8, 8]),
    ],
)
def test_weight_sequence_examples(a, b, count, expected):
    assert weight_sequence(a, b, count) == expected


@pytest.mark.parametrize("a, b", [(0, 1), (1, 0), (-1, 2), ("-1/2", 1)])
def test_weight_sequence_rejects_nonpositive(a, b):
    with pytest.raises(ECHError, match="nonpositive axis"):
        weight_sequence(a, b, 3)


def test_sequence_dominates_examples():
    assert sequence_dominates(1, 2, 2, 2, 100)
    res = sequence_dominates(1, 2, F(19, 10), F(19, 10), 100)
    assert not res and res.fails_at == 2
    assert sequence_dominates(1, 1, 1, 1, 50).dominates


@given(pos_rationals, pos_rationals, st.integers(1, 60))
def test_weight_sequence_symmetric(a, b, count):
    assert weight_sequence(a, b, count) == weight_sequence(b, a, count)


@given(pos_rationals, pos_rationals, pos_rationals, st.integers(1, 60))
def test_weight_sequence_scales(a, b, r, count):
    assert weight_sequence(r * a, r * b, count) == [r * v for v in weight_sequence(a, b, count)]


@given(pos_rationals, pos_rationals, st.integers(1, 80))
@settings(max_examples=60, deadline=None)
def test_weight_sequence_matches_brute_force(a, b, count):
    assert weight_sequence(a, b, count) == weights_brute(a, b, count)


@given(pos_rationals, pos_rationals, st.integers(1, 80))
def test_weight_sequence_invariants(a, b, count):
    seq = weight_sequence(a, b, count)
    assert seq[0] == 0
    assert all(x <= y for x, y in zip(seq, seq[1:]))


@given(thetas, st.integers(1, 50))
def test_floor_ceil_reflection(t, k):
    assert floor_mul(t, k) + ceil_mul(t.reflect(), k) == 0


@given(thetas, st.integers(1, 50))
def test_floor_below_ceil(t, k):
    f, c = floor_mul(t, k), ceil_mul(t, k)
    exact_integer = t.side == "exact" and (k * t.base).denominator == 1
    assert c - f == (0 if exact_integer else 1)


def test_cache_growth_is_history_independent():
    a = WeightSequence(F(3, 7), F(5, 4))
    a.prefix(5)
    a.prefix(300)
    b = WeightSequence(F(3, 7), F(5, 4))
    assert a.prefix(300) == b.prefix(300)
    assert a[299] == b.prefix(300)[299]


def test_concurrent_reads_agree():
    ws = WeightSequence(2, 3)
    expected = weights_brute(2, 3, 400)
    results = []

    def work(n):
        results.append(ws.prefix(n) == expected[:n])

    threads = [threading.Thread(target=work, args=(n,)) for n in range(50, 401, 50)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(results) and len(results) == 8


@pytest.mark.parametrize("text, value", [("19/10", F(19, 10)), ("0.125", F(1, 8)), ("7", F(7)), ("-3/6", F(-1, 2))])
def test_parse_rational(text, value):
    assert parse_rational(text) == value


def test_parse_rational_rejects_floats_and_garbage():
    with pytest.raises(TypeError):
        parse_rational(0.5)
    with pytest.raises(ECHError):
        parse_rational("one half")


@given(st.fractions(max_denominator=1000))
def test_format_round_trip(q):
    text = format_rational(q)
    assert "/" in text and parse_rational(text) == q


def test_theta_parse_and_json():
    t = parse_theta("3/5+")
    assert t == Theta(F(3, 5), "plus")
    assert parse_theta("2-") == Theta(F(2), "minus")
    assert parse_theta("1/3").side == "exact"
    assert Theta.from_json(t.to_json()) == t
    assert t.to_json() == {"base": "3/5", "side": "plus"}
    assert t.invert() == Theta(F(5, 3), "minus")
    with pytest.raises(ECHError):
        Theta(1, "sideways")
