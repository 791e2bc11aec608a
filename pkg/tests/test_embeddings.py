from __future__ import annotations

import json
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ech.capacities import DisjointUnion, Ellipsoid, PointDomain, Polydisk, ToricRegion
from ech.embeddings import check_embedding, parse_domain, sharpness, staircase_sample, staircase_scan
from ech.latgeom import RationalPolygon
from ech.numkit import ECHError, weight_sequence


def test_check_embedding_examples():
    ok = check_embedding(Ellipsoid(1, 2), Ellipsoid(2, 2), 200)
    assert not ok.obstructed and ok.verdict == "no_obstruction_up_to(200)"
    a = F(11, 10)
    assert not check_embedding(Polydisk(1, 1), Ellipsoid(a, 2 * a), 200).obstructed
    bad = check_embedding(Ellipsoid(1, 2), Ellipsoid(F(19, 10), F(19, 10)), 200)
    assert (bad.obstructed_at, bad.c_source, bad.c_target) == (2, 2, F(19, 10))


def test_sharpness_annotations():
    assert sharpness(Ellipsoid(1, 2), Ellipsoid(2, 2)) == "sharp criterion, truncated"
    assert sharpness(Ellipsoid(1, 2), Polydisk(2, 2)) is not None
    balls = DisjointUnion((Ellipsoid(1, 1), Ellipsoid(2, 2)))
    assert sharpness(balls, Ellipsoid(3, 3)) is not None
    assert sharpness(Polydisk(1, 1), Ellipsoid(2, 4)) is None
    assert sharpness(Polydisk(1, 1), Polydisk(2, 2)) is None


domains = st.one_of(
    st.builds(Ellipsoid, st.integers(1, 4), st.integers(1, 4)),
    st.builds(Polydisk, st.integers(1, 4), st.integers(1, 4)),
)


@given(domains)
def test_reflexive(d):
    assert not check_embedding(d, d, 60).obstructed


@given(domains, domains, domains)
@settings(max_examples=50)
def test_transitive(a, b, c):
    k = 60
    if not check_embedding(a, b, k).obstructed and not check_embedding(b, c, k).obstructed:
        assert not check_embedding(a, c, k).obstructed


def test_reflexive_general_region():
    d = ToricRegion(RationalPolygon(((0, 0), (3, 0), (2, 2), (0, 1))))
    assert not check_embedding(d, d, 15).obstructed


def test_staircase_examples():
    assert staircase_sample(1, 50).value == 1
    s2 = staircase_sample(2, 1000)
    assert s2.value == 2 and s2.argmax_k == 2
    s9 = staircase_sample(9, 10**5)
    assert F(29, 10) <= s9.value <= 3


def test_staircase_scan_examples():
    assert [s.value for s in staircase_scan([1], 10)] == [1]
    assert [s.value for s in staircase_scan([2, 4], 1000)] == [2, 2]
    hi = staircase_scan([9, 16], 10**5)
    assert abs(float(hi[0].value) - 3) <= 0.1 and abs(float(hi[1].value) - 4) <= 0.1


@given(st.fractions(1, 10, max_denominator=8), st.integers(1, 300), st.integers(0, 300))
@settings(max_examples=40, deadline=None)
def test_staircase_monotone_and_bounding(a, k1, extra):
    s1 = staircase_sample(a, k1)
    s2 = staircase_sample(a, k1 + extra)
    assert 1 <= s1.value <= s2.value
    num = weight_sequence(1, a, k1 + 1)
    den = weight_sequence(1, 1, k1 + 1)
    assert all(num[k] <= s1.value * den[k] for k in range(1, k1 + 1))


def test_staircase_threads_agree():
    grid = [F(n, 4) for n in range(4, 20)]
    assert staircase_scan(grid, 500, threads=1) == staircase_scan(grid, 500, threads=4)


def test_staircase_rejects_small_a():
    with pytest.raises(ECHError):
        staircase_sample(F(1, 2), 10)


def test_parse_domain(tmp_path):
    assert parse_domain("E(1,2)") == Ellipsoid(1, 2)
    assert parse_domain("P( 1/2 , 3 )") == Polydisk(F(1, 2), 3)
    assert parse_domain("B(19/10)") == Ellipsoid(F(19, 10), F(19, 10))
    assert parse_domain("B(1)+B(2)") == DisjointUnion((Ellipsoid(1, 1), Ellipsoid(2, 2)))
    f = tmp_path / "omega.json"
    f.write_text(json.dumps({"vertices": [["0", "0"], ["2", "0"], ["0", "1"]]}))
    assert parse_domain(str(f)) == ToricRegion(RationalPolygon(((0, 0), (2, 0), (0, 1))))
    g = tmp_path / "point.json"
    g.write_text(json.dumps({"type": "point"}))
    assert parse_domain(str(g)) == PointDomain()
    with pytest.raises(ECHError):
        parse_domain("Q(1,2)")
    with pytest.raises(ECHError):
        parse_domain("E(1)")
