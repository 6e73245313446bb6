import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from stmodent.algebra import builtin, make_exterior, make_steenrod_A1, make_truncated_poly, tensor_product
from stmodent.certificates import (
    TOWERS, build_a1_staircase, build_m_ladder, build_m_periodicity, builtin_pyramids, data_text,
    load_staircase, pyramid_from_staircase, regenerate, staircase_from_json, staircase_to_json,
)
from stmodent.entropy import (
    CertificationError, Credit, Pyramid, Staircase, TowerError, build_tower, certify_pyramid,
    check_periodicity, classifying_class, closed_form_bound, delta_bound, monogenic_staircase,
    nilpotence_credit, refined_delta_bound, replay, tower_to_pyramid, verify_staircase,
)
from stmodent.growth import faulhaber_ratio
from stmodent.homology import ProductError, ext_table
from stmodent.modules import (
    ModuleMap, check_exact, direct_sum, left_ideal, make_module, summand_injection, trivial_module,
)
from stmodent.report import EntropyConfig, estimate_entropy


def flip_entry(fm: ModuleMap) -> ModuleMap:
    """Copy of fm with one nonzero matrix entry removed."""
    f = fm.source.field
    cols = list(fm.columns)
    c = next(i for i, v in enumerate(cols) if v)
    k = f.lead(cols[c])
    cols[c] = f.sub(cols[c], f.scale(f.coeff(cols[c], k), f.unit(k)))
    return ModuleMap(fm.source, fm.target, fm.shift, tuple(cols))


# ------------------------------------------------------------ staircases

def test_monogenic_staircase_exterior():
    st = monogenic_staircase(make_exterior([1]))
    rep = verify_staircase(st)
    assert rep.ok, rep.summary()
    assert st.r == 2 and st.t == [2, 1] and st.height == 2
    assert [m.dim for m in st.terms()] == [1, 2, 2, 1]
    assert [r for r, _ in st.roles] == ["N", "M", "M", "N"]
    assert len(st.segments) == 2


def test_monogenic_staircase_truncated_over_f3():
    a = make_truncated_poly(2, 3)
    st = monogenic_staircase(a)
    assert verify_staircase(st).ok
    assert st.r == 6 and st.t == [6, 4]
    assert st.terms()[0].degrees == (6,)


@pytest.mark.parametrize("a", [-3, 1, 5])
def test_twisted_staircase_recertifies(a):
    st = monogenic_staircase(make_exterior([1]))
    tw = st.twisted(a)
    assert verify_staircase(tw).ok
    assert tw.r == st.r and tw.t == st.t
    assert tw.terms()[-1].degrees == (a,)


def test_monogenic_rejects_two_generators():
    with pytest.raises(CertificationError):
        monogenic_staircase(make_exterior([1, 2]))


def test_a1_staircase():
    st = build_a1_staircase()
    rep = verify_staircase(st)
    assert rep.ok, rep.summary()
    assert st.r == 12
    assert st.raw_twists() == [13, 6]
    assert st.t == [12, 6]          # normalized by ΩB0 ≅ B0(1)
    assert [m.dim for m in st.terms()] == [1, 4, 8, 8, 4, 1]
    assert st.terms()[0].degrees == (12,)
    assert st.shifts() == [0, 2, 4]


def test_a1_staircase_without_periodicity_violates_side_condition():
    st = build_a1_staircase()
    bare = Staircase(st.N, st.M, st.segments, st.roles, [], st.name)
    rep = verify_staircase(bare)
    assert not rep.ok and "side condition" in rep.summary()


def test_corrupted_witness_fails_with_named_junction():
    st = build_a1_staircase()
    segs = [list(s) for s in st.segments]
    segs[2][1] = flip_entry(segs[2][1])
    bad = Staircase(st.N, st.M, segs, st.roles, st.periodicity)
    rep = verify_staircase(bad)
    assert not rep.ok
    assert rep.problems[0].startswith("segment 2")


def test_m_sequences_and_ladder():
    for seq in build_m_periodicity():
        assert check_exact(seq).exact
    st = build_m_ladder()
    rep = verify_staircase(st)
    assert rep.ok, rep.summary()
    assert st.r == 6 and st.t == [6]
    assert [tuple(sorted(m.degrees)) for m, _, _ in st.periodicity] == [(0, 2, 3, 5), (0, 1, 3, 4)]


def test_ladder_over_commutative_control_fails_in_degree_3():
    rep = verify_staircase(build_m_ladder(make_exterior([1, 2, 3])))
    assert not rep.ok
    assert "degrees [3]" in rep.problems[0]


def test_periodicity_certificates():
    a = make_steenrod_A1()
    B0, _ = left_ideal(a, ["Sq1"])
    assert check_periodicity(B0, 1, 1)
    assert not check_periodicity(B0, 1, 2)
    assert check_periodicity(B0, 2, 2)


# ------------------------------------------------------------ shipped data

@pytest.mark.parametrize("stem", ["a1_staircase", "m_ladder"])
def test_shipped_files_match_builders(stem):
    assert data_text(stem) == regenerate(stem)
    st = load_staircase(stem)
    assert verify_staircase(st).ok


def test_json_round_trip_and_mutation():
    st = build_m_ladder()
    doc = staircase_to_json(st, "M")
    back = staircase_from_json(json.dumps(doc))
    assert back.r == st.r and back.t == st.t
    seg = doc["segments"][0][1]
    row = next(r for r in seg["matrix"] if any(r))
    row[row.index(1)] = 0
    with pytest.raises(CertificationError, match="segment 0"):
        staircase_from_json(doc)
    with pytest.raises(CertificationError, match="malformed"):
        staircase_from_json({"algebra": "M"})


# ------------------------------------------------------------ towers and pyramids

def test_one_storey_tower():
    py = tower_to_pyramid(build_tower(make_exterior([1]), ["e1"]))
    assert py.dimension == 1 and py.levels[0].dim == 1
    assert py.periodicity[0][1:] == (1, 1)
    assert py.upper_bound() == 0


def test_exterior_123_tower():
    tw = build_tower(make_exterior([1, 2, 3]), ["e1", "e2", "e3"])
    assert [s.height for s in tw.storeys] == [2, 2, 2]
    py = tower_to_pyramid(tw)
    assert [m.dim for m in py.levels] == [4, 2, 1]
    assert py.upper_bound() == 2
    assert [(s.r, s.t) for s in py.staircases] == [(4, [4, 2]), (6, [6, 3])]


@pytest.mark.parametrize("name", ["A1", "M"])
def test_naive_three_storey_towers(name):
    a = builtin(name)
    py = tower_to_pyramid(build_tower(a, TOWERS[name]))
    assert [m.dim for m in py.levels] == [4, 2, 1]
    assert py.periodicity[0][1:] == (1, 3)
    assert py.tower_storeys == 3 and py.upper_bound() == 2


def test_truncated_tower_periodicity_has_period_two():
    py = tower_to_pyramid(build_tower(make_truncated_poly(2, 3), ["x"]))
    assert py.periodicity[0][1:] == (2, 6)


def test_bad_towers():
    with pytest.raises(TowerError, match="right multiplication"):
        build_tower(make_steenrod_A1(), ["Sq1", "Sq2"])
    with pytest.raises(TowerError, match="final quotient"):
        build_tower(make_exterior([1, 1]), ["e1"])


def test_uncertified_pyramid_rejected():
    good = builtin_pyramids("ext-1-1")[0]
    wrong = Pyramid(list(reversed(good.levels)), good.staircases, good.periodicity)
    assert not certify_pyramid(wrong).ok
    with pytest.raises(CertificationError):
        delta_bound(wrong, 20)


def test_builtin_pyramids_upper_bounds():
    assert [(p.source, p.upper_bound()) for p in builtin_pyramids("A1")] == [("pyramid", 1), ("tower", 2)]
    assert [(p.source, p.upper_bound()) for p in builtin_pyramids("M")] == [("pyramid", 1), ("tower", 2)]
    for d in (1, 2, 3):
        assert builtin_pyramids("ext" + "-1" * d)[0].upper_bound() == d - 1


# ------------------------------------------------------------ complexity bounds

def test_one_level_bound_is_constant():
    cb = delta_bound(builtin_pyramids("ext-1")[0], 50)
    assert set(cb.values) == {1}
    cb = delta_bound(builtin_pyramids("trunc-3-2")[0], 50)
    assert set(cb.values) == {4}     # G = k(0) ⊕ ... ⊕ k(3)


def test_linear_and_quadratic_growth():
    b2 = delta_bound(builtin_pyramids("ext-1-1")[0], 2000).values
    b3 = delta_bound(builtin_pyramids("ext-1-1-1")[0], 2000).values
    assert abs(b2[2000] / b2[1000] - 2) < 0.01
    assert abs(b3[2000] / b3[1000] - 4) < 0.02
    # same leading behaviour as Σ_{k<=n} k, which is n²/2
    assert abs(b3[2000] / 2000 ** 2 - b3[1000] / 1000 ** 2) / (b3[2000] / 2000 ** 2) < 0.01
    assert abs(faulhaber_ratio(1, 2000) - 0.5) < 0.001


@pytest.mark.parametrize("name", ["ext-1-1", "ext-1-2-3", "A1", "M"])
def test_bound_monotone_and_recursion_exact(name):
    for py in builtin_pyramids(name):
        cb = delta_bound(py, 300)
        assert all(x <= y for x, y in zip(cb.values, cb.values[1:]))
        for lvl in range(2, py.dimension + 1):
            st = py.staircases[lvl - 2]
            for n in range(st.r, 300):
                want = sum(cb.level_value(lvl - 1, n - tj) for tj in st.t) + cb.level_value(lvl, n - st.r)
                assert cb.level_value(lvl, n) == want


def test_closed_form_majorizes():
    py = builtin_pyramids("ext-1-1-1")[0]
    step = delta_bound(py, 300)
    closed = delta_bound(py, 300, form="closed")
    assert all(c >= s for c, s in zip(closed.values, step.values))
    for n in range(0, 200, 7):
        assert closed_form_bound(step, 3, n) >= step.level_value(3, n)
    with pytest.raises(CertificationError):
        replay(closed, 10)
    with pytest.raises(ValueError):
        delta_bound(py, 10, form="other")


def test_a1_pyramid_growth_is_linear():
    py = builtin_pyramids("A1")[0]
    b = refined_delta_bound(py, [], 1000).values
    assert abs(b[1000] / b[500] - 2) < 0.02


def test_refined_bound():
    py = builtin_pyramids("ext-1-1-1")[0]
    plain = delta_bound(py, 200)
    assert refined_delta_bound(py, [], 200).values == plain.values
    everywhere = refined_delta_bound(py, [Credit(2, [0, 1]), Credit(3, [0, 3])], 200)
    assert len(set(everywhere.values)) == 1
    one = refined_delta_bound(builtin_pyramids("ext-1-1")[0], [Credit(2, [0, 1])], 200)
    assert len(set(one.values)) == 1
    with pytest.raises(CertificationError):
        refined_delta_bound(py, [Credit(5, [0])], 20)
    with pytest.raises(CertificationError):
        refined_delta_bound(py, [Credit(2, None)], 20)


def test_replay_reproduces_bound():
    cb = delta_bound(builtin_pyramids("ext-1-1")[0], 200)
    rng = random.Random(1)
    for n in [rng.randint(0, 200) for _ in range(6)] + [0, 1]:
        rep = replay(cb, n)
        assert rep.ok and rep.value == cb.values[n]
    assert replay(cb, 100).junctions > 0


def test_replay_on_three_levels():
    cb = delta_bound(builtin_pyramids("ext-1-1-1")[0], 40)
    for n in (0, 7, 40):
        assert replay(cb, n).ok


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=150))
def test_witness_counts_match_values(n):
    cb = delta_bound(builtin_pyramids("M")[0], 150)
    node = cb.witness(2, n)
    if node[0] == "base":
        assert node[3] == cb.level_value(2, n)
    else:
        assert sum(cb.level_value(l, k) for l, k in node[4]) == cb.level_value(2, n)


# ------------------------------------------------------------ nilpotence

def _h1_staircase():
    """k(2) -> E -> k over A(1) with E = k{a, b}, Sq2·a = b: class h1."""
    a = make_steenrod_A1()
    f = a.field
    i2 = a.index("Sq2")
    action = []
    for i in range(a.dim):
        if i == a.unit_index:
            action.append((f.unit(0), f.unit(1)))
        elif i == i2:
            action.append((f.unit(1), f.zero()))
        else:
            action.append((f.zero(), f.zero()))
    E = make_module(a, ["a", "b"], [0, 2], action, name="E")
    k0, k2 = trivial_module(a, 0), trivial_module(a, 2)
    first = ModuleMap(k2, E, 0, (f.unit(1),))
    last = ModuleMap(E, k0, 0, (f.unit(0), f.zero()))
    return Staircase(k0, E, [[first, last]], [("N", 2), ("M", 0), ("N", 0)], name="h1")


def _split_staircase():
    a = make_steenrod_A1()
    f = a.field
    k0, k2 = trivial_module(a, 0), trivial_module(a, 2)
    S = direct_sum([k0, k2])
    first = summand_injection(S, [k0, k2], 1)
    last = ModuleMap(S, k0, 0, tuple(f.unit(0) if d == 0 else f.zero() for d in S.degrees))
    return Staircase(k0, S, [[ModuleMap(k2, S, 0, first.columns), last]],
                     [("N", 2), ("M", 0), ("N", 0)], name="split")


def test_h1_credit_at_cube():
    st = _h1_staircase()
    assert verify_staircase(st).ok
    tab = ext_table(make_steenrod_A1(), 4, 8)
    assert classifying_class(st, tab) == (1, 2, [1])
    assert nilpotence_credit(st, tab, 2) is None
    cr = nilpotence_credit(st, tab, 3)
    assert cr.e == 3 and cr.offsets == [0, 2, 4] and cr.constant == 3


def test_zero_class_credit_at_one():
    st = _split_staircase()
    assert verify_staircase(st).ok
    tab = ext_table(make_steenrod_A1(), 3, 6)
    assert classifying_class(st, tab)[2] == [0]
    cr = nilpotence_credit(st, tab, 3)
    assert cr.e == 1 and cr.offsets == [0]


def test_exterior_staircase_is_inconclusive():
    a = make_exterior([1])
    st = monogenic_staircase(a)
    tab = ext_table(a, 6, 6)
    assert classifying_class(st, tab) == (2, 2, [1])
    assert nilpotence_credit(st, tab, 3) is None


def test_credit_beyond_product_cap():
    st = build_a1_staircase()
    tab = ext_table(make_steenrod_A1(), 6, 24)
    assert classifying_class(st, tab) == (4, 12, [1])
    with pytest.raises(ProductError):
        nilpotence_credit(st, tab, 2)


def test_m_ladder_class():
    tab = ext_table(builtin("M"), 4, 12)
    assert classifying_class(build_m_ladder(), tab) == (2, 6, [1])


# ------------------------------------------------------------ reports

def test_report_schema_and_values():
    rep = estimate_entropy(builtin("A1"), EntropyConfig(n_ext=60))
    doc = json.loads(rep.to_json())
    assert set(doc) == {"algebra", "generator", "h_cat", "h_pol_lower", "h_pol_upper", "flags"}
    assert doc["generator"] == [f"k({i})" for i in range(6)]
    assert doc["h_cat"]["slope"] < 0.02 and doc["h_cat"]["window"] == [250, 500]
    assert set(doc["h_pol_lower"]) >= {"slope", "residual", "window"}
    up = doc["h_pol_upper"]
    assert up["value"] == 1 and up["source"] == "pyramid" and up["witness_dependent"]
    assert [c["value"] for c in up["candidates"]] == [1, 2]
    assert doc["flags"] == []


def test_report_trivial_and_partial():
    rep = estimate_entropy(builtin("trivial"))
    assert rep.h_pol_lower is None and rep.flags
    a = tensor_product(make_exterior([1]), make_exterior([2]))
    rep = estimate_entropy(a, EntropyConfig(n_ext=30))
    assert rep.h_pol_upper is None and rep.h_cat is None
    assert any("upper bound unavailable" in f for f in rep.flags)
    assert abs(rep.h_pol_lower["slope"] - 1) < 0.2


def test_report_flags_discrepancy():
    py = builtin_pyramids("ext-1-1")[0]
    cfg = EntropyConfig(n_ext=40, pyramids=[py], credits={0: [Credit(2, [0, 1])]})
    rep = estimate_entropy(builtin("ext-1-1"), cfg)
    assert rep.h_pol_upper["value"] == 0
    assert any(f.startswith("discrepancy") for f in rep.flags)


def test_pyramid_from_staircase_requires_periodic_level():
    st = build_a1_staircase()
    bare = Staircase(st.N, st.M, st.segments, st.roles, [], st.name)
    with pytest.raises(CertificationError):
        pyramid_from_staircase(bare)
