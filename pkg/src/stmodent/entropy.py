"""Staircases, towers, pyramids and complexity bounds for the twist functor.

Counts are certified upper bounds: every number produced by the DP is backed by
a witness made of exact sequences (replayable with check_exact) and, at the
bottom, homogenization filtrations whose pieces are one-dimensional modules
k(j).  Homological shifts are carried as annotations and ignored in counts.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field as dc_field

from .algebra import GradedAlgebra
from .linalg import Echelon
from .modules import (
    GradedModule, ModuleError, ModuleMap, _algebra_to_free, check_exact, factor_through, free_module,
    is_free, is_isomorphic, kernel, quotient, syzygy, trivial_module, twist,
)


class CertificationError(ValueError):
    pass


# ----------------------------------------------------------------- staircases

@dataclass
class Staircase:
    """A resolution N(r) -> M(r - t_m) -> ... -> M(r - t_1) -> N witnessed by
    exact segments spliced at shared modules.

    roles[i] describes the i-th term of the long sequence (left to right):
    ("N", twist), ("M", twist) or ("free", None).  Free terms vanish in the
    stable category; each records one step of homological shift.
    """

    N: GradedModule
    M: GradedModule
    segments: list
    roles: list
    periodicity: list = dc_field(default_factory=list)   # [(module, b, a)] certifying M, if used
    name: str = ""

    def terms(self) -> list[GradedModule]:
        out = []
        last = len(self.segments) - 1
        for i, seg in enumerate(self.segments):
            mods = [seg[0].source] + [fm.target for fm in seg]
            lo = 0 if i == 0 else 1
            hi = len(mods) if i == last else len(mods) - 1
            out.extend(mods[lo:hi])
        return out

    def long_maps(self) -> list[ModuleMap]:
        """Maps between consecutive terms, composing across splice points."""
        out = []
        pending = None
        last = len(self.segments) - 1
        for i, seg in enumerate(self.segments):
            for k, fm in enumerate(seg):
                if pending is not None:
                    fm = pending.then(fm)
                    pending = None
                if k == len(seg) - 1 and i != last:
                    pending = fm
                else:
                    out.append(fm)
        return out

    @property
    def r(self) -> int:
        return self.roles[0][1] - self.roles[-1][1]

    def raw_twists(self) -> list[int]:
        """t_i with t_1 adjacent to N, before any normalization."""
        base = self.roles[-1][1]
        ts = [self.r - (tw - base) for role, tw in self.roles if role == "M"]
        return list(reversed(ts))

    @property
    def t(self) -> list[int]:
        """t_i normalized into (0, r] using the periodicity certificates of M."""
        period = self.period()
        out = []
        for ti in self.raw_twists():
            if 0 < ti <= self.r or period is None:
                out.append(ti)
                continue
            k = math.ceil((ti - self.r) / period) if ti > self.r else -math.ceil((1 - ti) / period)
            out.append(ti - k * period)
        return out

    def period(self):
        """Common twist period a of M (from its certificates), or None."""
        if not self.periodicity:
            return None
        ratios = {(a, b) for _, b, a in self.periodicity}
        if len(ratios) != 1:
            return None
        a, b = ratios.pop()
        return a if b == 1 else None

    @property
    def height(self) -> int:
        return sum(1 for role, _ in self.roles if role == "M")

    def shifts(self) -> list[int]:
        """s_i for the M terms (t_1 first) and s for N(r): free terms to the right."""
        out = []
        free = 0
        for role, _ in reversed(self.roles):
            if role == "free":
                free += 1
            elif role == "M":
                out.append(free)
        return out + [free + self.height]

    def twisted(self, a: int) -> "Staircase":
        """The same staircase twisted by a; N and M stay, the role twists move."""
        cache: dict = {}

        def tw(m):
            key = id(m)
            if key not in cache:
                cache[key] = twist(m, a)
            return cache[key]

        segs = [[ModuleMap(tw(fm.source), tw(fm.target), fm.shift, fm.columns) for fm in seg]
                for seg in self.segments]
        roles = [(r, None if w is None else w + a) for r, w in self.roles]
        return Staircase(self.N, self.M, segs, roles, self.periodicity, self.name)


@dataclass
class StaircaseReport:
    ok: bool
    problems: list
    junctions: int

    def summary(self) -> str:
        if self.ok:
            return f"certified ({self.junctions} junctions exact)"
        return "; ".join(self.problems)


def verify_segments(st: Staircase) -> tuple[list, int]:
    problems = []
    count = 0
    for i, seg in enumerate(st.segments):
        for k, fm in enumerate(seg):
            bad = fm.problems()
            if bad:
                problems.append(f"segment {i} map {k}: {bad[0]}")
        if problems:
            continue
        try:
            rep = check_exact(seg, ends=True)
        except ModuleError as e:
            problems.append(f"segment {i}: {e}")
            continue
        count += len(rep.junctions)
        if not rep.exact:
            problems.append(f"segment {i}: {rep.summary()}")
    for i in range(len(st.segments) - 1):
        a = st.segments[i][-1].target
        b = st.segments[i + 1][0].source
        if not (a is b or a.equals(b)):
            problems.append(f"segments {i} and {i + 1} do not share their splice module")
    return problems, count


def verify_staircase(st: Staircase, seed: int = 0) -> StaircaseReport:
    problems, count = verify_segments(st)
    terms = st.terms()
    if len(terms) != len(st.roles):
        problems.append(f"{len(terms)} terms but {len(st.roles)} roles")
    else:
        if st.roles[0][0] != "N" or st.roles[-1][0] != "N":
            problems.append("the sequence must start at N(r) and end at N")
        for k, (term, (role, tw)) in enumerate(zip(terms, st.roles)):
            if role == "free":
                if not is_free(term):
                    problems.append(f"term {k} is declared free but is not")
            else:
                ref = twist(st.N if role == "N" else st.M, tw)
                if not is_isomorphic(term, ref, seed):
                    problems.append(f"term {k} is not isomorphic to {role}({tw})")
    for mod, b, a in st.periodicity:
        if not check_periodicity(mod, b, a, seed):
            problems.append(f"periodicity certificate Ω^{b} ≅ ({a}) fails for {mod.name or 'summand'}")
    if st.roles and st.roles[0][0] == "N":
        if st.r <= 0:
            problems.append(f"r = {st.r} is not positive")
        for ti in st.t:
            if not 0 < ti <= st.r:
                problems.append(f"side condition 0 < t_i <= r fails: t = {st.t}, r = {st.r}")
                break
    return StaircaseReport(not problems, problems, count)


def check_periodicity(m: GradedModule, b: int, a: int, seed: int = 0) -> bool:
    """Ω^b m ≅ m(a)."""
    if a == 0 or b < 1:
        return False
    cur = m
    for _ in range(b):
        cur = syzygy(cur)
    return is_isomorphic(cur, twist(m, a), seed)


# ----------------------------------------------------------- constructors

def _cyclic_map(source: GradedModule, gen, target: GradedModule, image) -> ModuleMap:
    """The map source -> target with gen ↦ image, for source generated by gen."""
    a = source.algebra
    f = source.field
    ech = Echelon(f)
    for i in range(a.dim):
        ech.add(source.act_basis(i, gen), f.unit(i))
    cols = []
    for c in range(source.dim):
        combo = ech.express(f.unit(c))
        if combo is None:
            raise CertificationError("source is not generated by the given vector")
        cols.append(target.act(combo, image))
    fm = ModuleMap(source, target, 0, tuple(cols))
    bad = fm.problems()
    if bad:
        raise CertificationError(f"not a module map: {bad[0]}")
    return fm


def monogenic_staircase(alg: GradedAlgebra) -> Staircase:
    """k(hn) -> A(n) -> A -> k for A = k[x]/(x^h), |x| = n, spliced at ker(A -> k)."""
    from .algebra import AlgebraError, monogenic_data
    try:
        gi, n, h = monogenic_data(alg)
    except AlgebraError as e:
        raise CertificationError(str(e)) from None
    f = alg.field
    A = free_module(alg, [0])
    A_n = free_module(alg, [n])
    k0 = trivial_module(alg, 0)
    aug = ModuleMap(A, k0, 0, tuple(f.unit(0) if d == 0 else f.zero() for d in A.degrees))
    K, kinc = kernel(aug)
    x = alg.field.unit(gi)
    index = A._cache["free_index"]
    xv = f.unit(index[(0, gi)])
    # ·x : A(n) -> A, generator ↦ x, factored through K
    mult = _cyclic_map(A_n, f.unit(A_n._cache["free_index"][(0, alg.unit_index)]), A, xv)
    to_k = factor_through(mult, kinc)
    # k(hn) -> A(n): 1 ↦ x^{h-1} on the generator
    xh1 = alg.one()
    for _ in range(h - 1):
        xh1 = alg.product(xh1, x)
    top = A_n.act(xh1, f.unit(A_n._cache["free_index"][(0, alg.unit_index)]))
    khn = trivial_module(alg, h * n)
    first = ModuleMap(khn, A_n, 0, (top,))
    segs = [[first, to_k], [kinc, aug]]
    roles = [("N", h * n), ("M", n), ("M", 0), ("N", 0)]
    return Staircase(k0, A, segs, roles, name=f"monogenic({alg.name})")


# ----------------------------------------------------------------- towers

@dataclass
class Storey:
    element: str
    degree: int
    height: int
    upper: GradedModule       # A_i
    lower: GradedModule       # A_{i+1}
    sequence: list            # [ι, ρ, q]: A_{i+1}(h|x|) -> A_i(|x|) -> A_i -> A_{i+1}


@dataclass
class Tower:
    algebra: GradedAlgebra
    storeys: list

    @property
    def length(self) -> int:
        return len(self.storeys)


class TowerError(CertificationError):
    pass


def build_tower(a: GradedAlgebra, elements: list[str]) -> Tower:
    """Quotients A_{i+1} = A / A·(x_0, ..., x_i) with their storey sequences.

    Right multiplication by x_i must be well defined on A_i (checked), and the
    last quotient must be k.
    """
    f = a.field
    A = free_module(a, [0])
    inv = _inv(A)

    def right_mult(v, x):
        out = f.zero()
        for k, c in f.items(v):
            _, b = inv[k]
            out = f.axpy(out, c, _algebra_to_free(A, a.product(f.unit(b), x)))
        return out

    ideal: list = []
    storeys = []
    upper, pi_u = quotient(A, [], name="A0")
    for i, lab in enumerate(elements):
        x = a.element(lab)
        n = a.degree_of(x)
        if n is None or n <= 0:
            raise TowerError(f"storey element {lab!r} must be homogeneous of positive degree")
        sub = Echelon(f)
        for v in ideal:
            sub.add(v)
        for v in ideal:
            if not sub.contains(right_mult(v, x)):
                raise TowerError(f"right multiplication by {lab} is not defined on A_{i}")
        h = 2
        xp = a.product(x, x)
        while xp and not sub.contains(_algebra_to_free(A, xp)):
            xp = a.product(xp, x)
            h += 1
        new_ideal = ideal + [A.act_basis(b, _algebra_to_free(A, x)) for b in range(a.dim)]
        lower, pi_l = quotient(A, new_ideal, name=f"A{i + 1}")
        xh1 = a.one()
        for _ in range(h - 1):
            xh1 = a.product(xh1, x)
        rho = _induced(pi_u, pi_u, lambda v: right_mult(v, x), twist(upper, n), upper)
        iota = _induced(pi_l, pi_u, lambda v: right_mult(v, xh1), twist(lower, h * n), twist(upper, n))
        q = _induced(pi_u, pi_l, lambda v: v, upper, lower)
        for fm in (iota, rho, q):
            bad = fm.problems()
            if bad:
                raise TowerError(f"storey {i} ({lab}): {bad[0]}")
        storeys.append(Storey(lab, n, h, upper, lower, [iota, rho, q]))
        ideal = new_ideal
        upper, pi_u = lower, pi_l
    if storeys and storeys[-1].lower.dim != 1:
        raise TowerError(f"final quotient has dimension {storeys[-1].lower.dim}, not 1")
    return Tower(a, storeys)


def _inv(A):
    inv = A._cache.get("free_inverse")
    if inv is None:
        inv = {k: gb for gb, k in A._cache["free_index"].items()}
        A._cache["free_inverse"] = inv
    return inv


def _induced(pi_src, pi_tgt, op, source, target) -> ModuleMap:
    """Map between quotients of A induced by an operation on representatives.

    Basis vector k of a quotient is the image of basis vector keep[k] of A;
    well-definedness is checked afterwards by equivariance and exactness.
    """
    f = source.field
    keep = pi_src.target._cache["quotient_keep"]
    return ModuleMap(source, target, 0, tuple(pi_tgt.apply(op(f.unit(c))) for c in keep))


def tower_staircases(tw: Tower) -> list[Staircase]:
    """Storey i as a staircase for N = A_{i+1} with M = A_i."""
    out = []
    for s in tw.storeys:
        r = s.height * s.degree
        roles = [("N", r), ("M", s.degree), ("M", 0), ("N", 0)]
        out.append(Staircase(s.lower, s.upper, [s.sequence], roles, name=f"storey {s.element}"))
    return out


def storey_periodicity(s: Storey) -> tuple[int, int]:
    """(b, a) with Ω^b A_1 ≅ A_1(a), from the first storey."""
    if s.height == 2:
        return 1, s.degree
    return 2, s.height * s.degree


# --------------------------------------------------------------- pyramids

@dataclass
class Pyramid:
    """Levels N_1, ..., N_l with staircases N_i for N_{i+1} and periodic N_1.

    periodicity lists (summand, b, a) with Ω^b summand ≅ summand(a); the
    summands must add up to N_1.
    """

    levels: list
    staircases: list
    periodicity: list
    source: str = "pyramid"
    name: str = ""
    tower_storeys: int | None = None

    @property
    def dimension(self) -> int:
        return len(self.levels)

    def upper_bound(self, credits: int = 0) -> int:
        return self.dimension - 1 - credits


@dataclass
class PyramidReport:
    ok: bool
    problems: list

    def summary(self) -> str:
        return "certified" if self.ok else "; ".join(self.problems)


def certify_pyramid(py: Pyramid, seed: int = 0) -> PyramidReport:
    from .modules import direct_sum
    problems = []
    if len(py.staircases) != len(py.levels) - 1:
        problems.append("need one staircase per consecutive pair of levels")
    for i, st in enumerate(py.staircases):
        rep = verify_staircase(st, seed)
        if not rep.ok:
            problems.append(f"staircase {i + 1}: {rep.summary()}")
        if i + 1 < len(py.levels):
            if not is_isomorphic(st.M, py.levels[i], seed):
                problems.append(f"staircase {i + 1} does not start from level {i + 1}")
            if not is_isomorphic(st.N, py.levels[i + 1], seed):
                problems.append(f"staircase {i + 1} does not resolve level {i + 2}")
    if not py.periodicity:
        problems.append("level 1 has no periodicity certificate")
    else:
        summands = [m for m, _, _ in py.periodicity]
        total = summands[0] if len(summands) == 1 else direct_sum(summands)
        if not is_isomorphic(total, py.levels[0], seed):
            problems.append("periodic summands do not add up to level 1")
        for m, b, a in py.periodicity:
            if not check_periodicity(m, b, a, seed):
                problems.append(f"level 1 summand {m.name or '?'}: Ω^{b} ≇ ({a})")
    top = py.levels[-1]
    if not is_isomorphic(top, trivial_module(top.algebra, 0), seed):
        problems.append("top level is not k(0)")
    return PyramidReport(not problems, problems)


def tower_to_pyramid(tw: Tower, seed: int = 0) -> Pyramid:
    if not tw.storeys:
        raise TowerError("empty tower")
    for i, s in enumerate(tw.storeys):
        rep = check_exact(s.sequence, ends=True)
        if not rep.exact:
            raise TowerError(f"storey {i} ({s.element}) is not exact: {rep.summary()}")
    levels = [s.lower for s in tw.storeys]
    sts = tower_staircases(tw)[1:]
    b, a = storey_periodicity(tw.storeys[0])
    py = Pyramid(levels, sts, [(levels[0], b, a)], "tower", f"tower({tw.algebra.name})", len(tw.storeys))
    rep = certify_pyramid(py, seed)
    if not rep.ok:
        raise TowerError(rep.summary())
    return py


def staircase_pyramid(st: Staircase, summands: list, seed: int = 0, name: str = "") -> Pyramid:
    """Two-level pyramid (M, N) from a staircase with periodic M."""
    py = Pyramid([st.M, st.N], [st], summands, "pyramid", name or st.name)
    rep = certify_pyramid(py, seed)
    if not rep.ok:
        raise CertificationError(rep.summary())
    return py


# ---------------------------------------------------------- complexity bounds

@dataclass
class Credit:
    """N_{level} lies in the thick subcategory of twists of N_{level-1}:
    N(n) is a retract of an iterated extension of N_{level-1}(n + o), o in offsets."""

    level: int
    offsets: list
    e: int | None = None
    source: str = "asserted"

    @property
    def constant(self) -> int:
        return len(self.offsets)


@dataclass
class ComplexityBound:
    pyramid: Pyramid
    n_max: int
    levels: list                 # levels[k][n] for level k+1
    generator: list              # twists of k making up G
    values: list                 # B_G(n), n = 0..n_max
    credits: dict
    form: str = "step"

    def level_value(self, level: int, n: int) -> int:
        arr = self.levels[level - 1]
        if n < 0 or n >= len(arr):
            return self.pyramid.levels[level - 1].dim
        return arr[n]

    def witness(self, level: int, n: int):
        """One node of the witness DAG."""
        py = self.pyramid
        dimN = py.levels[level - 1].dim
        cr = self.credits.get(level)
        if cr is not None:
            return ("credit", level, n, [(level - 1, n + o) for o in cr.offsets])
        if level == 1:
            return ("base", level, n, dimN)
        st = py.staircases[level - 2]
        r = st.r
        if n < r:
            return ("base", level, n, dimN)
        kids = [(level - 1, n - tj) for tj in st.t] + [(level, n - r)]
        return ("step", level, n, n - r, kids)

    def h_cat(self, window=None) -> tuple[float, tuple]:
        lo, hi = window or (self.n_max // 2, self.n_max)
        xs = list(range(lo, hi + 1))
        ys = [math.log(self.values[n]) for n in xs]
        slope, _ = statistics.linear_regression(xs, ys)
        return slope, (lo, hi)

    def polynomial_degree(self, window=None) -> float:
        lo, hi = window or (self.n_max // 2, self.n_max)
        xs = [math.log(n) for n in range(max(lo, 1), hi + 1)]
        ys = [math.log(self.values[n]) for n in range(max(lo, 1), hi + 1)]
        return statistics.linear_regression(xs, ys)[0]


def _generator_twists(a: GradedAlgebra) -> list[int]:
    d = a.top_degree
    return list(range(max(d, 1)))


def delta_bound(py: Pyramid, n_max: int = 500, credits: dict | None = None,
                certified: bool = True, form: str = "step") -> ComplexityBound:
    """B_l(n) on the pyramid by the one-step recursion

        B_1(n) = dim N_1,
        B_l(n) = Σ_j B_{l-1}(n - t_j) + B_l(n - r)   (n >= r),
        B_l(n) = dim N_l                              (n < r),

    and B_G(n) = Σ_{i<d} B_top(n + i) for G = ⊕ k(i).  Credited levels use
    B_l(n) = Σ_o B_{l-1}(n + o) instead.

    form="closed" replaces the step by Σ_j Σ_{k=1}^{⌊n/t_j⌋} B_{l-1}(n - k t_j)
    + max_{0<=i<r} B_l(i), a majorant of the step recursion with no
    replayable witness of its own.
    """
    if form not in ("step", "closed"):
        raise ValueError(f"unknown form {form!r}")
    credits = dict(credits or {})
    if certified:
        rep = certify_pyramid(py)
        if not rep.ok:
            raise CertificationError(f"uncertified pyramid: {rep.summary()}")
    for lvl, cr in credits.items():
        if not 2 <= lvl <= py.dimension:
            raise CertificationError(f"credit at level {lvl} outside the pyramid")
        if cr.offsets is None:
            raise CertificationError(f"credit at level {lvl} has no constant")
    a = py.levels[0].algebra
    gen = _generator_twists(a)
    L = py.dimension
    need = [0] * (L + 1)
    need[L] = n_max + max(gen)
    for lvl in range(L, 1, -1):
        cr = credits.get(lvl)
        extra = max([0] + list(cr.offsets)) if cr else 0
        need[lvl - 1] = need[lvl] + extra
    levels: list[list[int]] = []
    for lvl in range(1, L + 1):
        dimN = py.levels[lvl - 1].dim
        size = need[lvl] + 1
        arr = [0] * size
        cr = credits.get(lvl)
        prev = levels[-1] if levels else None

        def lower(n, prev=prev, lvl=lvl):
            if n < 0 or n >= len(prev):
                return py.levels[lvl - 2].dim
            return prev[n]

        if lvl == 1:
            arr = [dimN] * size
        elif cr is not None:
            for n in range(size):
                arr[n] = sum(lower(n + o) for o in cr.offsets)
        else:
            st = py.staircases[lvl - 2]
            r, ts = st.r, st.t
            for n in range(size):
                if n < r:
                    arr[n] = dimN
                elif form == "step":
                    arr[n] = sum(lower(n - tj) for tj in ts) + arr[n - r]
                else:
                    arr[n] = sum(lower(n - k * tj) for tj in ts for k in range(1, n // tj + 1)) + \
                        max(arr[:r])
        levels.append(arr)
    top = levels[-1]
    values = [sum(top[n + i] for i in gen) for n in range(n_max + 1)]
    return ComplexityBound(py, n_max, levels, gen, values, credits, form)


def refined_delta_bound(py: Pyramid, credits: list | dict, n_max: int = 500) -> ComplexityBound:
    if isinstance(credits, list):
        credits = {c.level: c for c in credits}
    return delta_bound(py, n_max, credits)


def closed_form_bound(cb: ComplexityBound, level: int, n: int) -> int:
    """Σ_j Σ_{k=1}^{⌊n/t_j⌋} B_{l-1}(n - k t_j) + max_{0<=i<r} B_l(i).

    A majorant of the one-step recursion whenever B_{l-1} is nondecreasing
    and every t_j <= r.
    """
    st = cb.pyramid.staircases[level - 2]
    total = 0
    for tj in st.t:
        for k in range(1, n // tj + 1):
            total += cb.level_value(level - 1, n - k * tj)
    return total + max(cb.level_value(level, i) for i in range(st.r))


@dataclass
class ReplayReport:
    value: int
    expected: int
    nodes: int
    junctions: int
    ok: bool


def replay(cb: ComplexityBound, n: int) -> ReplayReport:
    """Rebuild B_G(n) from the witness DAG, re-checking every exact sequence."""
    if cb.form != "step":
        raise CertificationError("only the step recursion carries a replayable witness")
    memo: dict = {}
    stats = {"nodes": 0, "junctions": 0, "ok": True}
    py = cb.pyramid
    # level 1 periodicity is part of every base witness at level 1
    for m, b, a in py.periodicity:
        if not check_periodicity(m, b, a):
            stats["ok"] = False

    def count(level, k):
        key = (level, k)
        if key in memo:
            return memo[key]
        node = cb.witness(level, k)
        stats["nodes"] += 1
        kind = node[0]
        if kind == "base":
            val = node[3]
        elif kind == "credit":
            val = sum(count(l2, k2) for l2, k2 in node[3])
        else:
            _, _, _, tw, kids = node
            st = py.staircases[level - 2].twisted(tw)
            problems, nj = verify_segments(st)
            stats["junctions"] += nj
            if problems:
                stats["ok"] = False
            val = sum(count(l2, k2) for l2, k2 in kids)
        memo[key] = val
        return val

    total = sum(count(py.dimension, n + i) for i in cb.generator)
    ok = stats["ok"] and total == cb.values[n]
    return ReplayReport(total, cb.values[n], stats["nodes"], stats["junctions"], ok)


# ---------------------------------------------------------- nilpotence credit

def classifying_class(st: Staircase, table) -> tuple[int, int, list[int]]:
    """The Yoneda class in Ext^{L, r}(k, k) of the staircase's long exact sequence
    0 -> N(r) -> X_{L-1} -> ... -> X_0 -> N -> 0, for N = k."""
    from .homology import ProductError
    if st.N.dim != 1:
        raise CertificationError("classifying classes are computed for N = k")
    res = table.resolution
    maps = st.long_maps()
    L = len(maps) - 1          # number of middle terms
    r = st.r
    terms = [fm.source for fm in maps] + [maps[-1].target]
    # X_j counted from the right: X_0 = terms[-2], ..., K = terms[0]
    X = list(reversed(terms))          # X[0] = N, X[1] = X_0, ..., X[L+1] = K
    D = list(reversed(maps))           # D[j]: X[j+1] -> X[j]
    if L > table.s_max or r > table.t_max:
        raise ProductError(f"class in ({L},{r}) is outside the table window")
    f = st.N.field
    if X[0].degrees != res.module.degrees:
        raise CertificationError("the table resolves a different module than the staircase's N")
    # F_j: P_j -> X[j+1], images of generators as vectors in X[j+1]
    F: list[list] = []
    for j in range(L + 1):
        stage = res.stages[j]
        tgt = X[j + 1]
        dmap = D[j]
        images = []
        # solver for dmap restricted to each degree
        ech_by_deg: dict = {}
        for g, u in enumerate(stage.gens):
            if u > r:
                break
            if j == 0:
                lo, _ = X[0].block(u)
                want = f.shift(stage.dvecs[g], lo)
            else:
                prev = res.stages[j - 1]
                _, decode, _ = prev.layout(u)
                want = f.zero()
                for i, c in f.items(stage.dvecs[g]):
                    h, x = decode[i]
                    want = f.axpy(want, c, X[j].act(f.unit(x), F[j - 1][h]))
            ech = ech_by_deg.get(u)
            if ech is None:
                ech = Echelon(f)
                lo, hi = tgt.block(u)
                for c in range(lo, hi):
                    ech.add(dmap.columns[c], f.unit(c))
                ech_by_deg[u] = ech
            if not want:
                images.append(f.zero())
                continue
            sol = ech.express(want)
            if sol is None:
                raise CertificationError(f"cannot lift through the sequence at stage {j}, degree {u}")
            images.append(sol)
        F.append(images)
    # class: value of F_L on generators of P_L in degree r (K = k(r) is one-dimensional)
    gens = table.classes(L, r)
    vec = [f.coeff(F[L][g], 0) if g < len(F[L]) else 0 for g in gens]
    return L, r, vec


def nilpotence_credit(st: Staircase, table, e_max: int, level: int = 2):
    """A Credit when the classifying class φ has φ^e = 0 for some e <= e_max,
    otherwise None (inconclusive; non-nilpotence is never concluded)."""
    from .homology import ProductError, ext_power, PRODUCT_CAP
    L, r, vec = classifying_class(st, table)
    m = st.height
    ts = st.t
    if not any(vec):
        e = 1
    else:
        e = None
        for k in range(2, e_max + 1):
            if k * L > min(PRODUCT_CAP, table.s_max):
                raise ProductError(f"φ^{k} lies in s={k * L}, beyond the product cap")
            _, _, pv = ext_power(table, (L, r, vec), k)
            if not any(pv):
                e = k
                break
        if e is None:
            return None
    offsets = sorted((b + 1) * st.r - ti for b in range(e) for ti in ts)
    assert len(offsets) == e * m
    return Credit(level, offsets, e, f"nilpotence of the class in Ext^({L},{r}), power {e}")
