"""Minimal free resolutions, Ext tables and Yoneda products.

A resolution is built stage by stage and, inside a stage, degree by degree.
Stage s is a free module P_s described by its generator degrees and, for each
generator, the image of the generator under the differential (a vector in the
previous stage at the generator's degree).  The basis of (P_s)_t lists pairs
(generator, algebra basis element) generator-major, so adding a generator in
degree t only appends basis vectors and never renumbers existing ones.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field as dc_field

from .algebra import GradedAlgebra
from .linalg import Echelon
from .modules import GradedModule, trivial_module


class WindowError(ValueError):
    pass


class _AlgData:
    """Degree blocks of the algebra and products in block-local coordinates."""

    def __init__(self, a: GradedAlgebra):
        self.a = a
        self.f = a.field
        f = self.f
        self.blocks: dict[int, list[int]] = {}
        for i, d in enumerate(a.degrees):
            self.blocks.setdefault(d, []).append(i)
        self.pos = [0] * a.dim
        for d, idx in self.blocks.items():
            for k, i in enumerate(idx):
                self.pos[i] = k
        self.size = {d: len(v) for d, v in self.blocks.items()}
        # local[b][x]: b·x packed over positions of its degree block
        self.local = []
        for b in range(a.dim):
            row = []
            for x in range(a.dim):
                v = f.zero()
                for k, c in f.items(a.mult[b][x]):
                    v = f.axpy(v, c, f.unit(self.pos[k]))
                row.append(v)
            self.local.append(row)
        self.positive = [i for i in range(a.dim) if a.degrees[i] > 0]
        self.unit = a.unit_index

    def nblock(self, d: int) -> int:
        return self.size.get(d, 0)


class _ModuleTarget:
    """The module being resolved, in degree-local coordinates."""

    def __init__(self, m: GradedModule):
        self.m = m
        self.f = m.field

    def dim(self, t: int) -> int:
        return self.m.dim_in_degree(t)

    def act(self, b: int, v, t: int):
        lo, _ = self.m.block(t)
        f = self.f
        w = self.m.act_basis(b, f.shift(v, lo))
        lo2, hi2 = self.m.block(t + self.m.algebra.degrees[b])
        return f.shift(w, -lo2) if w else f.zero()


class FreeStage:
    """A free module given by generator degrees, built in increasing degree."""

    def __init__(self, alg: _AlgData):
        self.alg = alg
        self.gens: list[int] = []
        self.dvecs: list = []
        self._layout: dict[int, tuple] = {}

    def add_generator(self, degree: int, dvec):
        if self.gens and degree < self.gens[-1]:
            raise ValueError("generators must be added in degree order")
        self.gens.append(degree)
        self.dvecs.append(dvec)
        # layouts at degrees >= degree are now stale
        for t in [t for t in self._layout if t >= degree]:
            del self._layout[t]

    def layout(self, t: int):
        """(offsets by generator, decode list of (gen, algebra index), dim) at degree t."""
        lay = self._layout.get(t)
        if lay is None:
            offs = {}
            decode = []
            for g, gd in enumerate(self.gens):
                if gd > t:
                    break
                blk = self.alg.blocks.get(t - gd)
                if not blk:
                    continue
                offs[g] = len(decode)
                decode.extend((g, x) for x in blk)
            lay = (offs, decode, len(decode))
            self._layout[t] = lay
        return lay

    def dim(self, t: int) -> int:
        return self.layout(t)[2]

    def index(self, t: int, g: int, x: int) -> int:
        return self.layout(t)[0][g] + self.alg.pos[x]

    def act(self, b: int, v, t: int):
        """b·v for v in degree t."""
        alg = self.alg
        f = alg.f
        _, decode, _ = self.layout(t)
        offs2 = self.layout(t + alg.a.degrees[b])[0]
        loc = alg.local[b]
        if f.p == 2:
            out = 0
            while v:
                low = v & -v
                g, x = decode[low.bit_length() - 1]
                w = loc[x]
                if w:
                    out ^= w << offs2[g]
                v ^= low
            return out
        out = {}
        for i, c in f.items(v):
            g, x = decode[i]
            w = loc[x]
            if w:
                out = f.axpy(out, c, f.shift(w, offs2[g]))
        return out

    def generators_in_degree(self, t: int) -> list[int]:
        return [g for g, d in enumerate(self.gens) if d == t]


def _kernel_p2(cols, width_hint=None):
    """Kernel of the map with packed columns (p=2), by tagged elimination."""
    W = len(cols)
    piv = {}
    out = []
    for i, c in enumerate(cols):
        v = (c << W) | (1 << i)
        hi = c
        while hi:
            low = hi & -hi
            p = piv.get(low)
            if p is None:
                piv[low] = v
                break
            v ^= p
            hi = v >> W
        else:
            out.append(v)
    return out


def _kernel(f, cols):
    if f.p == 2:
        return _kernel_p2(cols)
    from .linalg import kernel_of_columns
    return kernel_of_columns(f, cols)


def _echelon_add_p2(piv, v):
    while v:
        low = v & -v
        p = piv.get(low)
        if p is None:
            piv[low] = v
            return True
        v ^= p
    return False


@dataclass
class Resolution:
    """Minimal free resolution of a module, exact in internal degrees <= t_max."""

    module: GradedModule
    algebra: GradedAlgebra
    s_max: int
    t_max: int
    stages: list
    columns: dict = dc_field(repr=False)   # (s, t) -> images of basis of (P_s)_t under d_s
    target: object = dc_field(repr=False, default=None)

    @property
    def minimal(self) -> bool:
        return self.is_minimal()

    def generator_degrees(self, s: int) -> list[int]:
        return list(self.stages[s].gens)

    def stage_target(self, s: int):
        return self.target if s == 0 else self.stages[s - 1]

    def differential_entry(self, s: int, g: int, h: int):
        """Algebra element c with d(g) having component c·h (h a generator of P_{s-1})."""
        st = self.stages[s]
        f = self.algebra.field
        out = f.zero()
        if s == 0:
            raise ValueError("stage 0 maps to the module, not a free module")
        prev = self.stages[s - 1]
        _, decode, _ = prev.layout(st.gens[g])
        for i, c in f.items(st.dvecs[g]):
            gg, x = decode[i]
            if gg == h:
                out = f.axpy(out, c, f.unit(x))
        return out

    def is_minimal(self) -> bool:
        a = self.algebra
        for s in range(1, len(self.stages)):
            prev = self.stages[s - 1]
            for g, gd in enumerate(self.stages[s].gens):
                _, decode, _ = prev.layout(gd)
                for i, _ in a.field.items(self.stages[s].dvecs[g]):
                    if a.degrees[decode[i][1]] == 0:
                        return False
        return True

    def composite_is_zero(self, s: int) -> bool:
        """d_{s-1} ∘ d_s = 0 on generators of P_s."""
        if s < 1:
            return True
        tgt = self.stage_target(s - 1)
        prev = self.stages[s - 1]
        f = self.algebra.field
        for g, gd in enumerate(self.stages[s].gens):
            img = f.zero()
            _, decode, _ = prev.layout(gd)
            for i, c in f.items(self.stages[s].dvecs[g]):
                h, x = decode[i]
                img = f.axpy(img, c, tgt.act(x, prev.dvecs[h], prev.gens[h]))
            if img:
                return False
        return True

    def homology_dims(self, s: int, t: int) -> int:
        """dim of ker d_{s-1} / im d_s at (s-1, t), recomputed from scratch."""
        f = self.algebra.field
        cols_in = self._columns(s, t)
        if s == 0:
            ker = self.target.dim(t)
        else:
            ker = len(_kernel(f, self._columns(s - 1, t)))
        ech = Echelon(f)
        for c in cols_in:
            ech.add(c)
        return ker - ech.rank

    def _columns(self, s, t):
        cols = self.columns.get((s, t))
        if cols is None:
            cols = _stage_columns(self.stages[s], self.stage_target(s), t)
        return cols


def _stage_columns(stage: FreeStage, target, t: int) -> list:
    """d on the basis of (P_s)_t: column (g, x) = x · dvec[g]."""
    _, decode, _ = stage.layout(t)
    out = []
    for g, x in decode:
        out.append(target.act(x, stage.dvecs[g], stage.gens[g]))
    return out


def minimal_resolution(m: GradedModule, s_max: int, t_max: int, keep_columns: bool = True) -> Resolution:
    """Minimal resolution of m through stage s_max, exact in degrees <= t_max."""
    if s_max < 0 or t_max < 0:
        raise WindowError("window must have s_max, t_max >= 0")
    a = m.algebra
    f = a.field
    if m.dim and min(m.degrees) > t_max:
        raise WindowError("window does not reach the lowest degree of the module")
    if any(d < 0 for d in a.degrees):
        raise WindowError("algebra must be nonnegatively graded")
    alg = _AlgData(a)
    target = _ModuleTarget(m)
    stages: list[FreeStage] = []
    columns: dict = {}
    lo_deg = min(m.degrees) if m.dim else 0
    prev_cols: dict = {}   # t -> columns of d_{s-1} at degree t
    for s in range(s_max + 1):
        st = FreeStage(alg)
        tgt = target if s == 0 else stages[-1]
        cur_cols = {}
        for t in range(lo_deg + (s if alg.positive else 0), t_max + 1):
            # kernel of the previous differential at degree t
            if s == 0:
                n = target.dim(t)
                kern = [f.unit(i) for i in range(n)]
            else:
                pc = prev_cols.get(t)
                if pc is None:
                    pc = _stage_columns(stages[-1], stages[-2] if s >= 2 else target, t)
                if f.p == 2:
                    W = len(pc)
                    mask = (1 << W) - 1
                    kern = [v & mask for v in _kernel_p2(pc)]
                else:
                    kern = _kernel(f, pc)
            cols = _stage_columns(st, tgt, t)
            if kern:
                if f.p == 2:
                    piv = {}
                    for c in cols:
                        _echelon_add_p2(piv, c)
                    if len(kern) > len(piv):
                        for kv in kern:
                            if _echelon_add_p2(piv, kv):
                                st.add_generator(t, kv)
                                cols.append(kv)
                else:
                    ech = Echelon(f)
                    for c in cols:
                        ech.add(c)
                    if len(kern) > ech.rank:
                        for kv in kern:
                            if ech.add(kv):
                                st.add_generator(t, kv)
                                cols.append(kv)
            cur_cols[t] = cols
            if keep_columns:
                columns[(s, t)] = cols
        stages.append(st)
        prev_cols = cur_cols
    return Resolution(m, a, s_max, t_max, stages, columns, target)


# ------------------------------------------------------------------ Ext

@dataclass
class ExtTable:
    """dim Ext^{s,t}_A(M, k) for 0 <= s <= s_max, t <= t_max."""

    entries: dict
    s_max: int
    t_max: int
    resolution: Resolution | None = dc_field(default=None, repr=False)
    name: str = ""

    def entry(self, s: int, t: int) -> int:
        if s > self.s_max or t > self.t_max:
            raise WindowError(f"({s},{t}) outside the window s<={self.s_max}, t<={self.t_max}")
        return self.entries.get((s, t), 0)

    def rows(self):
        return sorted((s, t, d) for (s, t), d in self.entries.items() if d)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("s,t,dim\n")
        for s, t, d in self.rows():
            buf.write(f"{s},{t},{d}\n")
        return buf.getvalue()

    def total(self, t: int) -> int:
        return sum(d for (s, tt), d in self.entries.items() if tt == t)

    def classes(self, s: int, t: int) -> list[int]:
        """Generator indices of P_s in degree t; class i is dual to the i-th one."""
        if self.resolution is None:
            raise ValueError("table carries no representatives")
        return self.resolution.stages[s].generators_in_degree(t)


def _table_from_resolution(res: Resolution, name="") -> ExtTable:
    entries = {}
    for s, st in enumerate(res.stages):
        for d in st.gens:
            if d <= res.t_max:
                entries[(s, d)] = entries.get((s, d), 0) + 1
    return ExtTable(entries, res.s_max, res.t_max, res, name)


def ext_table(a: GradedAlgebra, s_max: int, t_max: int, keep_columns: bool = True) -> ExtTable:
    """Ext^{s,t}_A(k, k) as generator counts of the minimal resolution of k."""
    res = minimal_resolution(trivial_module(a, 0), s_max, t_max, keep_columns)
    return _table_from_resolution(res, a.name)


def module_ext_table(m: GradedModule, s_max: int, t_max: int) -> ExtTable:
    return _table_from_resolution(minimal_resolution(m, s_max, t_max), m.name)


def hom_into_k_dims(res: Resolution) -> dict:
    """dim Hom_A(P_s, k)_t computed from the free modules themselves:
    the rank of the map P_s -> k ⊗ P_s = P_s / I·P_s in each degree."""
    a = res.algebra
    f = a.field
    out = {}
    for s, st in enumerate(res.stages):
        for t in sorted(set(st.gens)):
            ech = Echelon(f)
            n = st.dim(t)
            _, decode, _ = st.layout(t)
            # I·P_s in degree t: images of positive algebra elements
            for x in (i for i in range(a.dim) if a.degrees[i] > 0):
                for t0 in range(t - a.degrees[x], t - a.degrees[x] + 1):
                    for j in range(st.dim(t0)):
                        ech.add(st.act(x, f.unit(j), t0))
            q = n - ech.rank
            if q:
                out[(s, t)] = q
    return out


# ------------------------------------------------------------ products

PRODUCT_CAP = 6


class ProductError(ValueError):
    pass


class _ChainLift:
    """Chain map F_j: P_{s'+j} -> P_j lifting a class of Ext^{s',t'}."""

    def __init__(self, res: Resolution, s1: int, t1: int, vec: dict):
        self.res = res
        self.s1 = s1
        self.t1 = t1
        self.vec = vec          # generator index of P_{s1} -> coefficient
        self.maps: list[dict] = []   # maps[j][g] = F_j(g) over basis of (P_j)_{deg g - t1}
        self._ech: dict = {}

    def _solver(self, j: int, t: int):
        key = (j, t)
        ech = self._ech.get(key)
        if ech is None:
            f = self.res.algebra.field
            ech = Echelon(f)
            for i, c in enumerate(self.res._columns(j, t)):
                ech.add(c, f.unit(i))
            self._ech[key] = ech
        return ech

    def image(self, j: int, g: int):
        res = self.res
        f = res.algebra.field
        while len(self.maps) <= j:
            self.maps.append({})
        cache = self.maps[j]
        if g in cache:
            return cache[g]
        src = res.stages[self.s1 + j]
        u = src.gens[g]
        t = u - self.t1
        if j == 0:
            c = self.vec.get(g, 0)
            tgt0 = res.stages[0]
            if c and tgt0.dim(t):
                # M = k: P_0 = A on one generator in degree 0
                out = f.scale(c, f.unit(tgt0.index(t, 0, res.algebra.unit_index)))
            else:
                out = f.zero()
            cache[g] = out
            return out
        # F_{j-1}(d g), then solve d_j x = that
        prev_src = res.stages[self.s1 + j - 1]
        _, decode, _ = prev_src.layout(u)
        rhs = f.zero()
        tgt_prev = res.stages[j - 1]
        for i, c in f.items(src.dvecs[g]):
            h, x = decode[i]
            img_h = self.image(j - 1, h)
            if img_h:
                rhs = f.axpy(rhs, c, tgt_prev.act(x, img_h, prev_src.gens[h] - self.t1))
        if not rhs:
            out = f.zero()
        else:
            out = self._solver(j, t).express(rhs)
            if out is None:
                raise ProductError("chain lift failed: resolution window too small")
        cache[g] = out
        return out


def _as_vector(table: ExtTable, c) -> tuple[int, int, dict]:
    s, t, x = c
    gens = table.classes(s, t)
    if isinstance(x, int):
        if not 0 <= x < len(gens):
            raise ProductError(f"no class {x} in bidegree ({s},{t})")
        return s, t, {gens[x]: 1}
    if len(x) != len(gens):
        raise ProductError("coefficient vector has the wrong length")
    return s, t, {g: c for g, c in zip(gens, x) if c}


def ext_product(table: ExtTable, c1, c2) -> list[int]:
    """Yoneda product c1·c2 in the basis of bidegree (s+s', t+t').

    Classes are (s, t, index) or (s, t, coefficient list) with respect to the
    dual basis of the stage-s generators of degree t.
    """
    res = table.resolution
    if res is None or res.module.dim != 1:
        raise ProductError("products need a resolution of k")
    s, t, xv = _as_vector(table, c1)
    s1, t1, yv = _as_vector(table, c2)
    if s + s1 > min(PRODUCT_CAP, table.s_max):
        raise ProductError(f"product lands in s={s + s1}, beyond the cap {min(PRODUCT_CAP, table.s_max)}")
    if t + t1 > table.t_max:
        raise ProductError(f"product lands in t={t + t1}, beyond t_max={table.t_max}")
    f = res.algebra.field
    lift = _lift_for(table, s1, t1, yv)
    out = []
    stage_x = res.stages[s]
    for g in table.classes(s + s1, t + t1):
        img = lift.image(s, g)
        val = 0
        for gx, cx in xv.items():
            idx = stage_x.index(t, gx, res.algebra.unit_index)
            val += cx * f.coeff(img, idx)
        out.append(val % f.p)
    return out


def _lift_for(table: ExtTable, s1, t1, yv) -> _ChainLift:
    cache = table.__dict__.setdefault("_lifts", {})
    key = (s1, t1, tuple(sorted(yv.items())))
    lift = cache.get(key)
    if lift is None:
        lift = _ChainLift(table.resolution, s1, t1, yv)
        cache[key] = lift
    return lift


def ext_power(table: ExtTable, c, e: int) -> tuple[int, int, list[int]]:
    """c^e as (s, t, coefficients); the list is empty when a lower power vanished."""
    s, t, v = _as_vector(table, c)
    cur = (s, t, [v.get(g, 0) for g in table.classes(s, t)])
    for k in range(2, e + 1):
        if not any(cur[2]):
            return k * s, k * t, []
        cur = (k * s, k * t, ext_product(table, c, cur))
    return cur


# ---------------------------------------------------------- Künneth

def convolve_tables(t1: ExtTable, t2: ExtTable, s_max: int, t_max: int) -> dict:
    out = {}
    for (s, t), d in t1.entries.items():
        for (u, v), e in t2.entries.items():
            if s + u <= s_max and t + v <= t_max:
                out[(s + u, t + v)] = out.get((s + u, t + v), 0) + d * e
    return out
