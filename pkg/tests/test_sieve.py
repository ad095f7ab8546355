import json
import math
import os

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dioph import sieve
from dioph.descent import decompose, search_small
from dioph.errors import ConfigurationError
from dioph.expected import load
from dioph.hpoly import delta4, hp_form
from dioph.numth import multiplicative_order, primes_up_to
from dioph.sieve import (
    A_SET_MODULI,
    A_SET_ORDERS,
    NamedASet,
    SieveCache,
    a_set,
    cong_class_filter,
    crt_min_nonzero,
    eliminate_prime,
    find_moduli,
    implied_p_bound,
    k0_mod3_check,
    l_set,
    mod3power_filter,
    negative_branch_check,
    sweep,
    sweep_primes,
)


def _l_oracle(p, q, w):
    # direct evaluation of the exact integer H_p, reduced afterwards
    order = multiplicative_order(q, w)
    d4 = delta4(p)
    return {s for s in range(order) if any(hp_form(q**s - d4 * v, v, p) % w == 1 % w for v in range(w))}


@pytest.mark.parametrize("p", [5, 7, 11, 13])
def test_l_set_against_oracle(p):
    for w in range(2, 70):
        if w % 3 == 0:
            continue
        assert l_set(p, 3, w).classes == _l_oracle(p, 3, w)


def test_l_set_numpy_matches_python():
    for p in (1013, 2381):
        for w in (242, 866, 1021):
            order = multiplicative_order(3, w)
            assert sieve._classes_numpy(p, 3, w, order) == sieve._classes_python(p, 3, w, order)


def test_l_set_errors():
    with pytest.raises(ValueError):
        l_set(5, 3, 9)
    with pytest.raises(ValueError):
        l_set(5, 3, 1)


def test_moduli_orders():
    for label, ws in A_SET_MODULI.items():
        for w in ws:
            assert multiplicative_order(3, w) == A_SET_ORDERS[label]
    assert set(find_moduli(3, 5, 250)) == {11, 22, 121, 242}


def test_a_set_rejects_bad_configuration(monkeypatch):
    monkeypatch.setitem(A_SET_MODULI, "A5", (242, 136))
    with pytest.raises(ConfigurationError):
        a_set(1013, 5)
    with pytest.raises(ConfigurationError):
        a_set(1013, 7)


def test_soundness_on_known_solutions():
    # every solution with q = 3, k = m and positive sign lands in L(p, 3, w)
    hits = 0
    for t in search_small(501, 50, 5000):
        if t.q != 3:
            continue
        for w_ in decompose(t):
            if w_.k != t.m or w_.sign != 1:
                continue
            for w in range(2, 400):
                if w % 3 == 0:
                    continue
                order = multiplicative_order(3, w)
                assert t.m % order in l_set(t.p, 3, w).classes
            hits += 1
    assert hits >= 1


@given(st.sampled_from([5, 7, 11, 13, 17, 1013, 2381]), st.integers(2, 400))
@settings(max_examples=80, deadline=None)
def test_l_set_depends_on_s_times_p_minus_1(p, w):
    # scaling (u, v) by 3**t shows membership depends only on s*(p-1) mod ord
    if w % 3 == 0:
        return
    ls = l_set(p, 3, w)
    for s in range(ls.order):
        for s2 in range(ls.order):
            if (s - s2) * (p - 1) % ls.order == 0:
                assert (s in ls.classes) == (s2 in ls.classes)


def test_literal_values_2381():
    # 5 | 2380, so A5 is all of Z/5 or empty; {0, 1, 4} cannot occur
    assert (2381 - 1) % 5 == 0
    assert a_set(2381, 5).classes == frozenset(range(5))
    assert a_set(2381, 27).classes == frozenset({0, 1, 4, 12})
    assert a_set(2381, 34).classes == frozenset(range(34))
    assert eliminate_prime(2381, (5, 27, 34)).r_m == 1


def test_recorded_a_sets_2381_crt():
    # the published sets themselves combine as stated
    ref = load()["a_sets_2381"]
    sets = [NamedASet(k, (), A_SET_ORDERS[k], frozenset(v)) for k, v in ref.items()]
    res = crt_min_nonzero(sets)
    assert list(res.values) == load()["crt_2381"]
    assert res.r_m == 44 and res.witnesses[44] == (4, 17, 10)


@pytest.mark.parametrize(
    "p,labels,sets,r_m,elim",
    [
        (1013, (16, 27), {"A16": [0, 4, 8, 12], "A27": [0]}, 108, False),
        (1109, (16, 22), {"A16": [0, 4, 8, 12], "A22": [0, 11]}, 44, False),
        (1571, (5, 22), {"A5": [0, 1, 2, 3, 4], "A22": [0, 11]}, 11, False),
        (2741, (16, 27), {"A16": [0, 4, 8, 12], "A27": [0]}, 108, True),
    ],
)
def test_literal_table3_spots(p, labels, sets, r_m, elim):
    rep = eliminate_prime(p, labels).as_dict()
    assert rep["sets"] == sets and rep["r_m"] == r_m and rep["eliminated"] == elim


def test_literal_table4_spots():
    rec = dict((p, s) for p, _, s in load()["table4"])
    got = {p: eliminate_prime(p, rec[p]).r_m for p in (1019, 2381, 3299, 3803)}
    assert got == {1019: 120, 2381: 1, 3299: 80, 3803: 17}


@given(
    st.lists(
        st.tuples(st.sampled_from([5, 16, 22, 27, 34, 39, 69]), st.sets(st.integers(0, 68), min_size=1, max_size=6)),
        min_size=1,
        max_size=3,
    ),
    st.randoms(use_true_random=False),
)
@settings(max_examples=60, deadline=None)
def test_crt_against_dense_scan(raw, rnd):
    sets = [NamedASet(f"S{i}", (), o, frozenset(x % o for x in s)) for i, (o, s) in enumerate(raw)]
    res = crt_min_nonzero(sets)
    L = math.lcm(*(s.order for s in sets))
    dense = tuple(x for x in range(L) if all(x % s.order in s.classes for s in sets))
    assert res.modulus == L and res.values == dense
    assert res.r_m == next((x for x in dense if x), None)
    shuffled = list(sets)
    rnd.shuffle(shuffled)
    assert crt_min_nonzero(shuffled).values == res.values


def test_crt_empty_and_zero_only():
    z = NamedASet("A16", (), 16, frozenset({0}))
    res = crt_min_nonzero([z, NamedASet("A27", (), 27, frozenset({0}))])
    assert res.values == (0,) and res.r_m is None
    with pytest.raises(ValueError):
        crt_min_nonzero([])


def test_cong_class_filter():
    for p in primes_up_to(3803):
        if p > 3:
            assert cong_class_filter(p) == (p % 24 in (1, 5, 7, 11))


def test_mod3power_filter():
    assert not [p for p in primes_up_to(3888) if p % 24 == 1 and mod3power_filter(p, 5)]
    assert mod3power_filter(3889, 5)
    assert mod3power_filter(487, 5) and not mod3power_filter(487, 6)
    assert mod3power_filter(5, 1)
    with pytest.raises(ValueError):
        mod3power_filter(3, 1)


def test_k0_and_negative_branch():
    assert all(k0_mod3_check(p) for p in primes_up_to(499) if p >= 5)
    assert all(negative_branch_check(p) for p in primes_up_to(300) if p >= 5)
    with pytest.raises(ValueError):
        negative_branch_check(3)


def test_implied_p_bound():
    assert implied_p_bound(432) == 1009
    assert implied_p_bound(176) == 1093
    assert implied_p_bound(44) == 1309
    assert implied_p_bound(11) == 3803
    assert implied_p_bound(None) == 3803


def test_sweep_primes():
    ps = sweep_primes()
    assert len(ps) == 94 and ps[0] == 1013 and ps[-1] == 3803
    recorded = {p for p, _ in load()["table3"]} | {p for p, _, _ in load()["table4"]}
    assert sorted(set(ps) - recorded) == [1373, 2621, 2939]


def test_cache_round_trip(tmp_path, monkeypatch):
    path = tmp_path / "sub" / "cache.jsonl"
    monkeypatch.setenv("DIOPH_CACHE", str(path))
    c = SieveCache()
    assert c.path == str(path)
    a = a_set(1013, 16, c)
    replaced = []
    real = os.replace
    monkeypatch.setattr(sieve.os, "replace", lambda s, d: (replaced.append((s, d)), real(s, d)))
    c.flush()
    assert replaced and replaced[0][1] == str(path)
    assert [f.name for f in path.parent.iterdir()] == ["cache.jsonl"]
    lines = path.read_text().splitlines()
    assert len(lines) == 4
    for line in lines:
        assert list(json.loads(line)) == ["classes", "order", "p", "q", "w"]
    c2 = SieveCache()
    assert len(c2) == 4 and a_set(1013, 16, c2) == a
    replaced.clear()
    c2.flush()  # nothing changed
    assert not replaced


def test_sweep_deterministic_across_workers(tmp_path):
    ps = [1013, 1109, 1373, 2381]
    rec = {1013: (16, 27), 2381: (5, 27, 34)}
    one = [r.as_dict() for r in sweep(ps, rec, workers=1)]
    three = [r.as_dict() for r in sweep(ps, rec, workers=3)]
    assert one == three and [r["p"] for r in one] == ps
    cache = SieveCache(str(tmp_path / "c.jsonl"))
    assert [r.as_dict() for r in sweep(ps, rec, workers=2, cache=cache)] == one
    warm = SieveCache(str(tmp_path / "c.jsonl"))
    assert [r.as_dict() for r in sweep(ps, rec, cache=warm)] == one
