"""Stable (Tate) Ext of k over a Frobenius algebra.

Nonnegative rows come from the minimal resolution.  Negative rows come from a
minimal injective coresolution 0 -> k -> I^0 -> I^1 -> ..., built directly:
the injective hull of a module C is ⊕ A(σ - d) over a basis of the socle of C
(σ the degree of the socle vector, d the top degree of A), embedded by
equivariant maps that are dual to the socle basis.  Row -1-j counts the free
generators of I^j by degree.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

from .algebra import GradedAlgebra, gorenstein_orientation
from .homology import ext_table
from .linalg import Echelon, kernel_of_columns
from .modules import GradedModule, ModuleMap, cokernel, free_module, hom_space, trivial_module


@dataclass
class StableExtTable:
    entries: dict
    s_band: int
    t_lo: int
    t_hi: int
    d: int
    name: str = ""

    def entry(self, s: int, t: int) -> int:
        return self.entries.get((s, t), 0)

    def rows(self):
        return sorted((s, t, v) for (s, t), v in self.entries.items() if v)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("s,t,dim\n")
        for s, t, v in self.rows():
            buf.write(f"{s},{t},{v}\n")
        return buf.getvalue()

    def symmetry_defects(self) -> list[tuple]:
        """Bidegrees where entry(s, t) != entry(-s-1, -d-t), both inside the band."""
        bad = []
        for s in range(-self.s_band, self.s_band + 1):
            s2 = -s - 1
            if not -self.s_band <= s2 <= self.s_band:
                continue
            for t in range(self.t_lo, self.t_hi + 1):
                t2 = -self.d - t
                if self.t_lo <= t2 <= self.t_hi and self.entry(s, t) != self.entry(s2, t2):
                    bad.append((s, t, self.entry(s, t), self.entry(s2, t2)))
        return bad


def socle_basis(m: GradedModule) -> list:
    """Basis of {v : I·v = 0}, as packed vectors, ordered by degree."""
    a = m.algebra
    f = m.field
    gens = a.generators()
    out = []
    for d in m.degree_set():
        lo, hi = m.block(d)
        cols = []
        for c in range(lo, hi):
            v = f.zero()
            for k, g in enumerate(gens):
                v = f.axpy(v, 1, f.shift(m.action[g][c], k * m.dim))
            cols.append(v)
        for kv in kernel_of_columns(f, cols):
            out.append(f.shift(kv, lo))
    return out


def injective_hull(m: GradedModule, d: int | None = None) -> tuple[GradedModule, ModuleMap]:
    """(free module I, injective map m -> I) with one generator per socle basis vector."""
    a = m.algebra
    f = m.field
    if d is None:
        d, _ = gorenstein_orientation(a)
    soc = socle_basis(m)
    sdeg = [_degree(m, v) for v in soc]
    I = free_module(a, [s - d for s in sdeg])
    cols = [f.zero() for _ in range(m.dim)]
    top = [i for i in range(a.dim) if a.degrees[i] == d]
    assert len(top) == 1
    top = top[0]
    for sigma in sorted(set(sdeg)):
        local = [k for k, s in enumerate(sdeg) if s == sigma]
        F = free_module(a, [sigma - d])
        fidx = F._cache["free_index"]
        top_pos = fidx[(0, top)]
        H = hom_space(m, F, 0)
        ech = Echelon(f)
        for h, fm in enumerate(H):
            row = f.zero()
            for j, k in enumerate(local):
                row = f.axpy(row, f.coeff(fm.apply(soc[k]), top_pos), f.unit(j))
            ech.add(row, f.unit(h))
        Iidx = I._cache["free_index"]
        for j, k in enumerate(local):
            combo = ech.express(f.unit(j))
            if combo is None:
                raise ValueError("socle vector cannot be detected by a map to A")
            for h, c in f.items(combo):
                fm = H[h]
                for col in range(m.dim):
                    img = fm.apply(f.unit(col))
                    for pos, x in f.items(img):
                        _, b = _free_pair(F, pos)
                        cols[col] = f.axpy(cols[col], c * x, f.unit(Iidx[(k, b)]))
    inc = ModuleMap(m, I, 0, tuple(cols))
    if inc.rank() != m.dim:
        raise AssertionError("injective hull map is not injective")
    return I, inc


def _free_pair(F: GradedModule, pos: int):
    inv = F._cache.get("free_inverse")
    if inv is None:
        inv = {k: gb for gb, k in F._cache["free_index"].items()}
        F._cache["free_inverse"] = inv
    return inv[pos]


def _degree(m: GradedModule, v):
    f = m.field
    return m.degrees[f.lead(v)]


def cosyzygies(m: GradedModule, n: int):
    """[(I^j, generator degrees)] for j < n, with the cosyzygies in between."""
    out = []
    cur = m
    d, _ = gorenstein_orientation(m.algebra)
    for _ in range(n):
        if cur.dim == 0:
            out.append([])
            continue
        soc = socle_basis(cur)
        out.append(sorted(_degree(cur, v) - d for v in soc))
        I, inc = injective_hull(cur, d)
        cur, _ = cokernel(inc)
    return out


def stable_ext_table(a: GradedAlgebra, s_band: int, t_range: tuple[int, int]) -> StableExtTable:
    """Tate cohomology dimensions for |s| <= s_band and t in t_range (inclusive)."""
    d, _ = gorenstein_orientation(a)
    lo, hi = t_range
    entries = {}
    if a.dim == 1:
        return StableExtTable({}, s_band, lo, hi, d, a.name)
    if hi >= 0:
        tab = ext_table(a, s_band, hi, keep_columns=False)
        for (s, t), v in tab.entries.items():
            if s >= 1 and lo <= t <= hi:
                entries[(s, t)] = v
    if lo <= 0 <= hi:
        entries[(0, 0)] = 1
    for j, degs in enumerate(cosyzygies(trivial_module(a, 0), s_band)):
        for t in degs:
            if lo <= t <= hi:
                entries[(-1 - j, t)] = entries.get((-1 - j, t), 0) + 1
    return StableExtTable(entries, s_band, lo, hi, d, a.name)
