"""Cobar and bar complexes: independent oracles for Ext and Tor of k over A.

The cobar complex of the dual coalgebra B = A^∨ has C^s_t spanned by tensors
[b_1|...|b_s] of positive-degree basis elements with total degree t, and
coboundary d = Σ_i (-1)^i (id ⊗ ... ⊗ Δ̄ ⊗ ... ⊗ id) for the reduced coproduct.
Its cohomology is Ext^{s,t}_A(k, k).  The bar complex of A, with boundary
Σ_i (-1)^i (id ⊗ ... ⊗ μ ⊗ ... ⊗ id) on [a_1|...|a_s], computes Tor^A_{s,t}(k, k).
"""

from __future__ import annotations

from .algebra import GradedAlgebra, dualize
from .homology import ExtTable, WindowError
from .linalg import Echelon

DEFAULT_CAP = 2_000_000


class CapExceeded(WindowError):
    pass


def _tensors(pos_by_deg: dict, s: int, t: int, memo: dict) -> list[tuple]:
    """All s-tuples of positive-degree basis indices of total degree t."""
    key = (s, t)
    if key in memo:
        return memo[key]
    if s == 0:
        out = [()] if t == 0 else []
    else:
        out = []
        for d in sorted(pos_by_deg):
            if d > t:
                break
            rest = _tensors(pos_by_deg, s - 1, t - d, memo)
            if not rest:
                continue
            for i in pos_by_deg[d]:
                out.extend((i,) + r for r in rest)
    memo[key] = out
    return out


def _complex_dims(a: GradedAlgebra, s_max: int, t_max: int):
    pos_by_deg = {}
    for i, d in enumerate(a.degrees):
        if d > 0:
            pos_by_deg.setdefault(d, []).append(i)
    memo: dict = {}
    return pos_by_deg, memo


def _rank(f, rows) -> int:
    ech = Echelon(f)
    for r in rows:
        if r:
            ech.add(r)
    return ech.rank


def _check_cap(memo, pos_by_deg, s_max, t_max, cap):
    for s in range(s_max + 1):
        for t in range(t_max + 1):
            n0 = len(_tensors(pos_by_deg, s, t, memo))
            n1 = len(_tensors(pos_by_deg, s + 1, t, memo))
            if n0 * n1 > cap:
                raise CapExceeded(f"coboundary C^{s}_{t} -> C^{s + 1}_{t} has {n0}x{n1} entries, "
                                  f"over the cap {cap}")


def _homology(a: GradedAlgebra, s_max: int, t_max: int, images, cap: int) -> dict:
    """dim ker d_s - rank d_{s-1} where images(tensor) gives d on a basis tensor."""
    f = a.field
    pos_by_deg, memo = _complex_dims(a, s_max, t_max)
    _check_cap(memo, pos_by_deg, s_max, t_max, cap)
    entries = {}
    for t in range(t_max + 1):
        ranks = {}
        for s in range(0, s_max + 1):
            src = _tensors(pos_by_deg, s, t, memo)
            if not src:
                ranks[s] = 0
                continue
            tgt = _tensors(pos_by_deg, s + 1, t, memo)
            index = {x: k for k, x in enumerate(tgt)}
            ranks[s] = _rank(f, [images(x, index) for x in src])
        for s in range(0, s_max + 1):
            n = len(_tensors(pos_by_deg, s, t, memo))
            h = n - ranks[s] - (ranks[s - 1] if s >= 1 else 0)
            if h:
                entries[(s, t)] = h
    return entries


def cobar_cohomology(a: GradedAlgebra, s_max: int, t_max: int, cap: int = DEFAULT_CAP) -> ExtTable:
    """Ext^{s,t}_A(k, k) from the cobar complex of the dual coalgebra."""
    b = dualize(a)
    if b.comult is None:
        raise ValueError("the dual needs a coproduct, i.e. A needs a product")
    f = b.field
    # reduced coproducts: only terms with both factors of positive degree
    red = []
    for k in range(b.dim):
        red.append([(i, j, c) for i, j, c in (b.comult[k] or ()) if b.degrees[i] > 0 and b.degrees[j] > 0])

    def images(x, index):
        out = f.zero()
        for pos, k in enumerate(x):
            sign = 1 if pos % 2 == 0 else -1
            for i, j, c in red[k]:
                y = x[:pos] + (i, j) + x[pos + 1:]
                out = f.axpy(out, sign * c, f.unit(index[y]))
        return out

    entries = _homology(b, s_max, t_max, images, cap)
    return ExtTable(entries, s_max, t_max, None, f"cobar({a.name})")


def bar_homology(a: GradedAlgebra, s_max: int, t_max: int, cap: int = DEFAULT_CAP) -> dict:
    """dim Tor^A_{s,t}(k, k) from the normalized bar complex.

    The boundary lowers s; to reuse the same rank bookkeeping the complex is
    read backwards: the map from bar degree s+1 to s, written on the basis of
    degree s+1, is transposed into rows indexed by degree-s tensors.
    """
    f = a.field
    pos_by_deg, memo = _complex_dims(a, s_max, t_max)
    _check_cap(memo, pos_by_deg, s_max, t_max, cap)
    entries = {}
    for t in range(t_max + 1):
        ranks = {}
        for s in range(1, s_max + 2):
            src = _tensors(pos_by_deg, s, t, memo)
            tgt = _tensors(pos_by_deg, s - 1, t, memo)
            if not src or not tgt:
                ranks[s] = 0
                continue
            index = {x: k for k, x in enumerate(tgt)}
            rows = []
            for x in src:
                out = f.zero()
                for pos in range(s - 1):
                    sign = 1 if pos % 2 == 0 else -1
                    prod = a.mult[x[pos]][x[pos + 1]]
                    for k, c in f.items(prod):
                        y = x[:pos] + (k,) + x[pos + 2:]
                        out = f.axpy(out, sign * c, f.unit(index[y]))
                rows.append(out)
            ranks[s] = _rank(f, rows)
        for s in range(0, s_max + 1):
            n = len(_tensors(pos_by_deg, s, t, memo))
            h = n - (ranks.get(s, 0) if s >= 1 else 0) - ranks.get(s + 1, 0)
            if h:
                entries[(s, t)] = h
    return entries


def compare_tables(x: ExtTable, y: ExtTable, s_max: int, t_max: int) -> list[tuple]:
    """Bidegrees (s, t, x, y) where the two tables disagree."""
    bad = []
    for s in range(s_max + 1):
        for t in range(t_max + 1):
            u, v = x.entries.get((s, t), 0), y.entries.get((s, t), 0)
            if u != v:
                bad.append((s, t, u, v))
    return bad
