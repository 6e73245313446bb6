import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from stmodent.algebra import builtin, make_exterior, make_steenrod_A1, make_truncated_poly, tensor_product, trivial_algebra
from stmodent.cobar import CapExceeded, bar_homology, cobar_cohomology, compare_tables
from stmodent.growth import (
    GrowthError, faulhaber_ratio, growth_fit, partition_count, poincare_series, weight_totals,
)
from stmodent.homology import (
    ProductError, WindowError, convolve_tables, ext_power, ext_product, ext_table, hom_into_k_dims,
    minimal_resolution, module_ext_table,
)
from stmodent.modules import left_ideal, trivial_module
from stmodent.stable import cosyzygies, socle_basis, stable_ext_table


def monomial_count(degs, s, t):
    """#{a : Σ a_i = s, Σ a_i d_i = t}, by direct enumeration."""
    count = 0
    for a in itertools.product(range(s + 1), repeat=len(degs)):
        if sum(a) == s and sum(x * d for x, d in zip(a, degs)) == t:
            count += 1
    return count


# A(1) Ext for s <= 4, t <= 12, read off the cobar complex and frozen
A1_EXT = {(0, 0): 1, (1, 1): 1, (1, 2): 1, (2, 2): 1, (2, 4): 1, (3, 3): 1, (3, 7): 1,
          (4, 4): 1, (4, 8): 1, (4, 12): 1}


def test_exterior_ext_is_polynomial():
    degs = (1, 2, 3)
    tab = ext_table(make_exterior(degs), 6, 14)
    for s in range(7):
        for t in range(15):
            assert tab.entry(s, t) == monomial_count(degs, s, t), (s, t)


def test_trivial_algebra_ext():
    tab = ext_table(trivial_algebra(), 5, 5)
    assert tab.rows() == [(0, 0, 1)]
    assert tab.to_csv() == "s,t,dim\n0,0,1\n"


def test_a1_ext_small():
    tab = ext_table(make_steenrod_A1(), 4, 12)
    assert dict(((s, t), d) for s, t, d in tab.rows()) == A1_EXT
    assert cobar_cohomology(make_steenrod_A1(), 4, 12).entries == A1_EXT


@pytest.mark.parametrize("name", ["ext-1", "ext-1-2", "A1", "M", "trunc-3-2"])
def test_oracle_equivalence(name):
    a = builtin(name)
    tab = ext_table(a, 4, 12)
    assert compare_tables(tab, cobar_cohomology(a, 4, 12), 4, 12) == []
    assert bar_homology(a, 4, 12) == {k: v for k, v in tab.entries.items()}


def test_cobar_cap():
    with pytest.raises(CapExceeded):
        cobar_cohomology(make_steenrod_A1(), 6, 20, cap=1000)


@pytest.mark.parametrize("name", ["ext-1-2", "A1", "M", "trunc-3-2", "ext-1-1-1"])
def test_resolution_is_minimal_and_exact(name):
    a = builtin(name)
    res = minimal_resolution(trivial_module(a), 4, 10)
    assert res.is_minimal()
    for s in range(5):
        assert res.composite_is_zero(s)
        for t in range(11):
            assert res.homology_dims(s, t) == 0, (s, t)
    counts = {}
    for s in range(5):
        for d in res.generator_degrees(s):
            counts[(s, d)] = counts.get((s, d), 0) + 1
    assert hom_into_k_dims(res) == counts


def test_monogenic_resolution_pattern():
    # k[x]/(x^3), |x| = 2 over F_3: differentials alternate ·x and ·x^2
    t = make_truncated_poly(2, 3)
    res = minimal_resolution(trivial_module(t), 6, 40)
    degs = [res.generator_degrees(s) for s in range(7)]
    assert degs == [[0], [2], [6], [8], [12], [14], [18]]
    x, x2 = t.element("x"), t.element("x^2")
    for s in range(1, 7):
        entry = res.differential_entry(s, 0, 0)
        assert entry == (x if s % 2 else x2) or entry == t.field.scale(-1, x if s % 2 else x2)
    e = make_exterior([3])
    res = minimal_resolution(trivial_module(e), 5, 20)
    assert [res.generator_degrees(s) for s in range(6)] == [[3 * s] for s in range(6)]


def test_resolution_of_b0_is_periodic():
    a = make_steenrod_A1()
    B0, _ = left_ideal(a, ["Sq1"])
    tab = module_ext_table(B0, 5, 20)
    assert tab.rows() == [(s, 1 + s, 1) for s in range(6)]


def test_window_errors():
    with pytest.raises(WindowError):
        minimal_resolution(trivial_module(make_exterior([1]), 5), 2, 3)
    with pytest.raises(WindowError):
        ext_table(make_exterior([1]), -1, 3)
    tab = ext_table(make_exterior([1]), 3, 3)
    with pytest.raises(WindowError):
        tab.entry(4, 0)


def test_products_exterior():
    tab = ext_table(make_exterior([1]), 6, 6)
    assert ext_product(tab, (0, 0, 0), (1, 1, 0)) == [1]
    assert ext_product(tab, (1, 1, 0), (0, 0, 0)) == [1]
    for e in range(1, 7):
        s, t, vec = ext_power(tab, (1, 1, 0), e)
        assert (s, t, vec) == (e, e, [1])


def test_products_two_generators():
    tab = ext_table(make_exterior([1, 2]), 4, 8)
    h1, h2 = (1, 1, 0), (1, 2, 0)
    assert ext_product(tab, h1, h2) == ext_product(tab, h2, h1) == [1]
    # the three monomials of degree 2 span s = 2
    prods = [ext_product(tab, x, y) for x, y in [(h1, h1), (h1, h2), (h2, h2)]]
    assert [sum(v) for v in prods] == [1, 1, 1]
    assert {len(v) for v in prods} == {1}


def test_a1_h0_h1_vanishes():
    tab = ext_table(make_steenrod_A1(), 6, 14)
    h0, h1 = (1, 1, 0), (1, 2, 0)
    # Ext^{2,3} = 0, so the product is the empty coordinate vector
    assert tab.classes(2, 3) == []
    assert ext_product(tab, h0, h1) == []
    assert ext_product(tab, h1, h0) == []
    assert ext_product(tab, h0, h0) == [1]
    assert ext_product(tab, h1, h1) == [1]
    s, t, v = ext_power(tab, h1, 3)
    assert (s, t) == (3, 6) and not any(v)
    s, t, v = ext_power(tab, h0, 6)
    assert (s, t, v) == (6, 6, [1])


def test_product_cap_and_window():
    tab = ext_table(make_exterior([1]), 8, 8)
    with pytest.raises(ProductError):
        ext_product(tab, (4, 4, 0), (3, 3, 0))
    tab = ext_table(make_exterior([1]), 4, 3)
    with pytest.raises(ProductError):
        ext_product(tab, (2, 2, 0), (2, 2, 0))


@pytest.mark.parametrize("name", ["ext-1-1", "ext-1-2", "A1", "M"])
def test_graded_commutativity(name):
    tab = ext_table(builtin(name), 4, 12)
    classes = [(s, t, i) for s in range(1, 4) for t in range(13) for i in range(len(tab.classes(s, t)))]
    for x, y in itertools.product(classes, repeat=2):
        if x[0] + y[0] <= 4 and x[1] + y[1] <= 12:
            assert ext_product(tab, x, y) == ext_product(tab, y, x), (x, y)


def test_kunneth_small():
    a, b = make_exterior([1]), make_exterior([2])
    ta, tb = ext_table(a, 8, 16), ext_table(b, 8, 16)
    tt = ext_table(tensor_product(a, b), 8, 16)
    assert tt.entries == convolve_tables(ta, tb, 8, 16)


@given(st.lists(st.integers(1, 3), min_size=1, max_size=2), st.lists(st.integers(1, 3), min_size=1, max_size=2))
@settings(max_examples=10, deadline=None)
def test_kunneth_property(da, db):
    a, b = make_exterior(da), make_exterior(db)
    ta, tb = ext_table(a, 4, 8), ext_table(b, 4, 8)
    assert ext_table(tensor_product(a, b), 4, 8).entries == convolve_tables(ta, tb, 4, 8)


def test_kunneth_a1_with_exterior():
    a, b = make_steenrod_A1(), make_exterior([1])
    ta, tb = ext_table(a, 3, 8), ext_table(b, 3, 8)
    assert ext_table(tensor_product(a, b), 3, 8).entries == convolve_tables(ta, tb, 3, 8)


# --- stable Ext ------------------------------------------------------------

def test_stable_trivial_is_zero():
    assert stable_ext_table(trivial_algebra(), 4, (-10, 10)).rows() == []


def test_stable_exterior_one_generator():
    tab = stable_ext_table(make_exterior([1]), 6, (-8, 8))
    assert tab.rows() == [(s, s, 1) for s in range(-6, 7)]


@pytest.mark.parametrize("name", ["ext-1-2", "A1", "M", "trunc-3-2", "ext-1-1"])
def test_stable_symmetry_and_agreement(name):
    a = builtin(name)
    d = a.top_degree
    tab = stable_ext_table(a, 4, (-30, 30))
    assert tab.symmetry_defects() == []
    ext = ext_table(a, 4, 30)
    for (s, t), v in ext.entries.items():
        if s >= 1:
            assert tab.entry(s, t) == v
    # every negative row sits at t <= -d
    assert all(t <= -d for s, t, _ in tab.rows() if s < 0)
    for t in range(d + 1, 31):
        for s in range(-4, 5):
            assert tab.entry(s, t) == (ext.entries.get((s, t), 0) if s >= 0 else 0)


def test_socle_and_cosyzygies():
    a = make_steenrod_A1()
    k = trivial_module(a)
    assert len(socle_basis(k)) == 1
    assert cosyzygies(k, 3) == [[-6], [-8, -7], [-10, -8]]


# --- growth ----------------------------------------------------------------

def test_weight_totals():
    tab = ext_table(make_exterior([1]), 20, 20)
    assert [weight_totals(tab, n) for n in range(21)] == [1] * 21
    tab = ext_table(make_exterior([1, 1]), 20, 20)
    assert [weight_totals(tab, n) for n in range(21)] == [n + 1 for n in range(21)]
    tab = ext_table(make_exterior([1, 1, 1]), 15, 15)
    assert [weight_totals(tab, n) for n in range(16)] == [(n + 1) * (n + 2) // 2 for n in range(16)]
    with pytest.raises(GrowthError):
        weight_totals(tab, 16)
    small = ext_table(make_exterior([1]), 3, 10)
    with pytest.raises(GrowthError):
        weight_totals(small, 8)


def test_poincare_series():
    assert poincare_series(make_exterior([1, 2, 3])) == [1, 1, 1, 2, 1, 1, 1]
    assert poincare_series(trivial_algebra()) == [1]
    assert poincare_series(make_steenrod_A1()) == [1, 1, 1, 2, 1, 1, 1]
    tab = ext_table(make_exterior([1, 1]), 5, 5)
    assert poincare_series(tab) == [1, 2, 3, 4, 5, 6]


def test_growth_fit_examples():
    fit = growth_fit([(n, n + 1) for n in range(1, 201)], (100, 200))
    assert 0.95 <= fit.slope <= 1.05
    fit = growth_fit([(n, 1) for n in range(1, 201)])
    assert -0.05 <= fit.slope <= 0.05
    fit = growth_fit([(n, (n + 1) * (n + 2) // 2) for n in range(1, 201)], (100, 200))
    assert 1.9 <= fit.slope <= 2.1
    assert fit.window == (100, 200) and fit.used == 101


def test_growth_fit_zero_handling():
    samples = [(n, 0 if n % 2 else n) for n in range(1, 41)]
    fit = growth_fit(samples)
    assert fit.zeros_excluded == 10 and fit.used == 11
    with pytest.raises(GrowthError):
        growth_fit([(n, 0) for n in range(1, 41)])
    with pytest.raises(GrowthError):
        growth_fit([(n, n) for n in range(1, 6)])


def test_growth_fit_json():
    import json
    fit = growth_fit([(n, n) for n in range(1, 21)])
    doc = json.loads(fit.to_json())
    assert set(doc) == {"n", "C", "slope", "residual", "window"}
    assert doc["window"] == [10, 20]


def test_partition_counts():
    assert all(partition_count([1], n)[0] == 1 for n in range(30))
    assert partition_count([1, 2], 4)[0] == 3
    assert partition_count([2, 4], 6) == (2, None)
    for W in ([1, 2], [1, 2, 3]):
        exact, asym = partition_count(W, 10_000)
        assert abs(exact / asym - 1) < 0.05
    exact, asym = partition_count([1, 2], 4)
    assert asym == 2.0


@given(st.sets(st.integers(1, 6), min_size=2, max_size=4), st.integers(0, 60))
@settings(max_examples=40, deadline=None)
def test_partition_recurrence(W, n):
    a = max(W)
    rest = W - {a}
    lhs = partition_count(W, n)[0]
    rhs = partition_count(rest, n)[0] + (partition_count(W, n - a)[0] if n >= a else 0)
    assert lhs == rhs


def test_faulhaber_self_test():
    for d in range(4):
        assert abs(faulhaber_ratio(d, 2000) - 1 / (d + 1)) < 1e-3
    # the fit recovers d + 1 from the partial sums themselves
    samples = [(n, sum(k ** 2 for k in range(1, n + 1))) for n in range(1, 201)]
    assert abs(growth_fit(samples).slope - 3) < 0.05
