"""Finite-dimensional graded left modules over a GradedAlgebra."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field as dc_field
from typing import Sequence

from .algebra import GradedAlgebra, builtin, from_spec as algebra_from_spec, to_spec as algebra_to_spec
from .linalg import Echelon, FMatrix, _rref_packed, kernel_basis_packed, kernel_of_columns


class ModuleError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class GradedModule:
    """Basis sorted by degree; action[i][c] is b_i applied to basis vector c
    (packed over the module basis)."""

    algebra: GradedAlgebra
    labels: tuple
    degrees: tuple
    action: tuple
    name: str = ""
    _cache: dict = dc_field(default_factory=dict, repr=False, compare=False)

    @property
    def field(self):
        return self.algebra.field

    @property
    def dim(self) -> int:
        return len(self.degrees)

    def __repr__(self):
        return f"GradedModule({self.name or '?'}, dim={self.dim}, degrees={list(self.degrees)})"

    def action_matrix(self, i: int) -> FMatrix:
        return FMatrix.from_columns(self.field, self.action[i], self.dim)

    def block(self, d: int) -> tuple[int, int]:
        """Index range of the degree-d basis vectors."""
        blocks = self._cache.get("blocks")
        if blocks is None:
            blocks = {}
            for k, x in enumerate(self.degrees):
                lo, hi = blocks.get(x, (k, k))
                blocks[x] = (lo, k + 1)
            self._cache["blocks"] = blocks
        return blocks.get(d, (0, 0))

    def degree_set(self) -> list[int]:
        return sorted(set(self.degrees))

    def dim_in_degree(self, d: int) -> int:
        lo, hi = self.block(d)
        return hi - lo

    def graded_dims(self) -> dict:
        out = {}
        for d in self.degrees:
            out[d] = out.get(d, 0) + 1
        return out

    def act(self, x, v):
        """x·v for an algebra element x and a module vector v (both packed)."""
        f = self.field
        out = f.zero()
        for i, a in f.items(x):
            cols = self.action[i]
            for c, b in f.items(v):
                out = f.axpy(out, a * b, cols[c])
        return out

    def act_basis(self, i: int, v):
        f = self.field
        cols = self.action[i]
        if f.p == 2:
            out = 0
            while v:
                low = v & -v
                out ^= cols[low.bit_length() - 1]
                v ^= low
            return out
        out = {}
        for c, b in f.items(v):
            out = f.axpy(out, b, cols[c])
        return out

    def is_zero(self) -> bool:
        return self.dim == 0

    def equals(self, other: "GradedModule") -> bool:
        return (self.algebra is other.algebra or _same_algebra(self.algebra, other.algebra)) and \
            self.degrees == other.degrees and self.action == other.action


def _same_algebra(a, b) -> bool:
    return a.p == b.p and a.degrees == b.degrees and a.mult == b.mult


def check_module(m: GradedModule) -> list[str]:
    a = m.algebra
    f = m.field
    bad = []
    if list(m.degrees) != sorted(m.degrees):
        bad.append("basis is not sorted by degree")
    if len(m.action) != a.dim or any(len(cols) != m.dim for cols in m.action):
        return bad + ["action table has the wrong shape"]
    for c in range(m.dim):
        if m.action[a.unit_index][c] != f.unit(c):
            bad.append(f"unit does not act as the identity on basis vector {c}")
            break
    for i in range(a.dim):
        for c in range(m.dim):
            for r, _ in f.items(m.action[i][c]):
                if r >= m.dim or m.degrees[r] != m.degrees[c] + a.degrees[i]:
                    bad.append(f"action of {a.labels[i]} on vector {c} leaves degree {m.degrees[c] + a.degrees[i]}")
                    break
    if bad:
        return bad
    for i in range(a.dim):
        for j in range(a.dim):
            bij = a.mult[i][j]
            for c in range(m.dim):
                lhs = m.act_basis(i, m.act_basis(j, f.unit(c)))
                rhs = m.act(bij, f.unit(c))
                if lhs != rhs:
                    bad.append(f"associativity fails: ({a.labels[i]}·{a.labels[j]}) on vector {c}")
                    break
    return bad


def make_module(a: GradedAlgebra, labels, degrees, action, name="", validate=True) -> GradedModule:
    """Build a module, reordering the basis stably by degree."""
    f = a.field
    n = len(degrees)
    order = sorted(range(n), key=lambda k: (degrees[k], k))
    if order != list(range(n)):
        newpos = {old: new for new, old in enumerate(order)}

        def remap(v):
            return _permute(f, v, newpos)

        action = tuple(tuple(remap(cols[old]) for old in order) for cols in action)
        labels = [labels[k] for k in order]
        degrees = [degrees[k] for k in order]
    m = GradedModule(a, tuple(labels), tuple(degrees), tuple(tuple(c) for c in action), name)
    if validate:
        bad = check_module(m)
        if bad:
            raise ModuleError(f"invalid module {name!r}: {bad[0]}")
    return m


def _permute(f, v, newpos):
    if f.p == 2:
        out = 0
        for i, _ in f.items(v):
            out |= 1 << newpos[i]
        return out
    return {newpos[i]: c for i, c in v.items()}


# ------------------------------------------------------------------ maps

@dataclass(frozen=True, eq=False)
class ModuleMap:
    """Homogeneous map; columns[c] is the image of source basis vector c."""

    source: GradedModule
    target: GradedModule
    shift: int
    columns: tuple

    @property
    def degree_shift(self) -> int:
        return self.shift

    @property
    def matrix(self) -> FMatrix:
        return FMatrix.from_columns(self.source.field, self.columns, self.target.dim)

    def apply(self, v):
        f = self.source.field
        if f.p == 2:
            out = 0
            while v:
                low = v & -v
                out ^= self.columns[low.bit_length() - 1]
                v ^= low
            return out
        out = {}
        for c, b in f.items(v):
            out = f.axpy(out, b, self.columns[c])
        return out

    def rank(self) -> int:
        ech = Echelon(self.source.field)
        for c in self.columns:
            ech.add(c)
        return ech.rank

    def then(self, g: "ModuleMap") -> "ModuleMap":
        """g ∘ self."""
        if not _composable(self.target, g.source):
            raise ModuleError("maps are not composable")
        return ModuleMap(self.source, g.target, self.shift + g.shift,
                         tuple(g.apply(c) for c in self.columns))

    def is_zero(self) -> bool:
        return not any(self.columns)

    def problems(self) -> list[str]:
        s, t = self.source, self.target
        f = s.field
        a = s.algebra
        out = []
        if len(self.columns) != s.dim:
            return ["matrix has the wrong number of columns"]
        for c, col in enumerate(self.columns):
            for r, _ in f.items(col):
                if r >= t.dim or t.degrees[r] != s.degrees[c] + self.shift:
                    out.append(f"not homogeneous: vector {c} (degree {s.degrees[c]}) hits degree "
                               f"{t.degrees[r] if r < t.dim else '?'} with shift {self.shift}")
                    return out
        for i in a.generators() or range(a.dim):
            for c in range(s.dim):
                if self.apply(s.act_basis(i, f.unit(c))) != t.act_basis(i, self.columns[c]):
                    out.append(f"not equivariant for {a.labels[i]} on source vector {c}")
                    return out
        return out

    def twisted(self, k: int) -> "ModuleMap":
        return ModuleMap(twist(self.source, k), twist(self.target, k), self.shift, self.columns)


def _composable(x: GradedModule, y: GradedModule) -> bool:
    return x is y or x.equals(y)


def make_map(source, target, columns, shift=0, validate=True) -> ModuleMap:
    f = ModuleMap(source, target, shift, tuple(columns))
    if validate:
        bad = f.problems()
        if bad:
            raise ModuleError(bad[0])
    return f


def identity_map(m: GradedModule) -> ModuleMap:
    f = m.field
    return ModuleMap(m, m, 0, tuple(f.unit(c) for c in range(m.dim)))


def zero_map(source, target, shift=0) -> ModuleMap:
    f = source.field
    return ModuleMap(source, target, shift, tuple(f.zero() for _ in range(source.dim)))


# ------------------------------------------------------------ constructors

def zero_module(a: GradedAlgebra) -> GradedModule:
    return GradedModule(a, (), (), tuple(() for _ in range(a.dim)), "0")


def trivial_module(a: GradedAlgebra, n: int = 0) -> GradedModule:
    f = a.field
    action = tuple((f.unit(0) if i == a.unit_index else f.zero(),) for i in range(a.dim))
    return GradedModule(a, ("1",), (n,), action, f"k({n})")


def twist(m: GradedModule, k: int) -> GradedModule:
    if k == 0:
        return m
    base = m.name
    return GradedModule(m.algebra, m.labels, tuple(d + k for d in m.degrees), m.action,
                        f"{base}({k:+d})" if base else "")


def free_module(a: GradedAlgebra, gen_degrees: Sequence[int], name="") -> GradedModule:
    f = a.field
    gens = list(gen_degrees)
    pairs = sorted(((g, b) for g in range(len(gens)) for b in range(a.dim)),
                   key=lambda gb: (gens[gb[0]] + a.degrees[gb[1]], gb))
    index = {gb: k for k, gb in enumerate(pairs)}
    if len(gens) == 1:
        labels = tuple(a.labels[b] for _, b in pairs)
    else:
        labels = tuple(f"{a.labels[b]}·g{g}" for g, b in pairs)
    degrees = tuple(gens[g] + a.degrees[b] for g, b in pairs)
    action = []
    for i in range(a.dim):
        cols = []
        for g, b in pairs:
            v = f.zero()
            for k, c in f.items(a.mult[i][b]):
                v = f.axpy(v, c, f.unit(index[(g, k)]))
            cols.append(v)
        action.append(tuple(cols))
    m = GradedModule(a, labels, degrees, tuple(action),
                     name or (a.name if gens == [0] else f"F{gens}"))
    m._cache["free_gens"] = gens
    m._cache["free_index"] = index
    return m


def free_generator(m: GradedModule, g: int):
    """Packed vector of the g-th generator of a free module."""
    index = m._cache["free_index"]
    return m.field.unit(index[(g, m.algebra.unit_index)])


def _reduced_basis_by_degree(m: GradedModule, vectors) -> list:
    """Reduced echelon basis of span(vectors), ordered by degree then pivot."""
    f = m.field
    by_deg = {}
    for v in vectors:
        if not v:
            continue
        d = _vector_degree(m, v)
        by_deg.setdefault(d, []).append(v)
    basis = []
    for d in sorted(by_deg):
        rows, piv = _rref_packed(f, by_deg[d], m.dim)
        basis.extend(rows[:len(piv)])
    return basis


def _vector_degree(m: GradedModule, v):
    f = m.field
    degs = {m.degrees[i] for i, _ in f.items(v)}
    if len(degs) != 1:
        raise ModuleError("vector is not homogeneous")
    return degs.pop()


def submodule(m: GradedModule, vectors, name="", closed=False):
    """Submodule generated by homogeneous vectors; returns (module, inclusion).

    With closed=True the span of `vectors` is assumed to be a submodule already.
    """
    a = m.algebra
    f = m.field
    vectors = [v for v in vectors if v]
    if not closed:
        vectors = [m.act_basis(i, v) for v in vectors for i in range(a.dim)]
    basis = _reduced_basis_by_degree(m, vectors)
    degrees = [_vector_degree(m, v) for v in basis]
    ech = Echelon(f)
    for k, v in enumerate(basis):
        ech.add(v, f.unit(k))
    action = []
    for i in range(a.dim):
        cols = []
        for v in basis:
            w = m.act_basis(i, v)
            x = ech.express(w)
            if x is None:
                raise ModuleError("span is not closed under the action")
            cols.append(x)
        action.append(tuple(cols))
    labels = [_format_vector(m, v) for v in basis]
    sub = GradedModule(a, tuple(labels), tuple(degrees), tuple(action), name)
    return sub, ModuleMap(sub, m, 0, tuple(basis))


def _format_vector(m: GradedModule, v) -> str:
    f = m.field
    terms = [m.labels[i] if c == 1 else f"{c}{m.labels[i]}" for i, c in f.items(v)]
    return "+".join(terms) if terms else "0"


def quotient(m: GradedModule, sub_vectors, name=""):
    """m modulo the submodule spanned by sub_vectors; returns (module, projection)."""
    a = m.algebra
    f = m.field
    rows, piv = _rref_packed(f, [v for v in sub_vectors if v], m.dim)
    rows = rows[:len(piv)]
    pivset = set(piv)
    keep = [c for c in range(m.dim) if c not in pivset]
    pos = {c: k for k, c in enumerate(keep)}
    prow = dict(zip(piv, rows))

    def project(v):
        # eliminate pivot coordinates, then read off the kept ones
        for c in piv:
            x = f.coeff(v, c)
            if x:
                v = f.axpy(v, -x, prow[c])
        out = f.zero()
        for c, x in f.items(v):
            out = f.axpy(out, x, f.unit(pos[c]))
        return out

    action = tuple(tuple(project(m.act_basis(i, f.unit(c))) for c in keep) for i in range(a.dim))
    q = GradedModule(a, tuple(m.labels[c] for c in keep), tuple(m.degrees[c] for c in keep),
                     action, name)
    q._cache["quotient_keep"] = keep
    proj = ModuleMap(m, q, 0, tuple(project(f.unit(c)) for c in range(m.dim)))
    return q, proj


def left_ideal(a: GradedAlgebra, generators, name=""):
    """Left ideal A·{g}; returns (module, inclusion into A as a free module on [0])."""
    A = free_module(a, [0])
    gens = []
    for g in generators:
        v = a.element(g)
        a.degree_of(v)  # homogeneity check
        gens.append(v)
    # in the free module on [0], vector coordinates are algebra coordinates
    # permuted to degree order
    vecs = [_algebra_to_free(A, v) for v in gens]
    return submodule(A, vecs, name=name)


def _algebra_to_free(A: GradedModule, v):
    index = A._cache["free_index"]
    f = A.field
    out = f.zero()
    for b, c in f.items(v):
        out = f.axpy(out, c, f.unit(index[(0, b)]))
    return out


def algebra_vector(A: GradedModule, x):
    """Coordinates in the free module on [0] of an algebra element."""
    return _algebra_to_free(A, A.algebra.element(x))


def kernel(fm: ModuleMap, name=""):
    """Kernel of a homogeneous map; returns (module, inclusion)."""
    s = fm.source
    f = s.field
    vecs = []
    for d in s.degree_set():
        lo, hi = s.block(d)
        cols = [fm.columns[c] for c in range(lo, hi)]
        for k in kernel_of_columns(f, cols):
            vecs.append(f.shift(k, lo))
    return submodule(s, vecs, name=name, closed=True)


def image(fm: ModuleMap, name=""):
    return submodule(fm.target, list(fm.columns), name=name, closed=True)


def cokernel(fm: ModuleMap, name=""):
    """Cokernel; returns (module, projection from the target)."""
    return quotient(fm.target, list(fm.columns), name=name)


def direct_sum(ms: Sequence[GradedModule], algebra: GradedAlgebra | None = None, name=""):
    ms = list(ms)
    if not ms:
        if algebra is None:
            raise ModuleError("empty direct sum needs the algebra")
        return zero_module(algebra)
    a = ms[0].algebra
    for m in ms[1:]:
        if not (m.algebra is a or _same_algebra(m.algebra, a)):
            raise ModuleError("direct sum of modules over different algebras")
    f = a.field
    labels, degrees, owner = [], [], []
    for k, m in enumerate(ms):
        for c in range(m.dim):
            labels.append(f"{m.labels[c]}[{k}]")
            degrees.append(m.degrees[c])
            owner.append((k, c))
    offsets = []
    off = 0
    for m in ms:
        offsets.append(off)
        off += m.dim
    action = []
    for i in range(a.dim):
        cols = []
        for k, c in owner:
            cols.append(f.shift(ms[k].action[i][c], offsets[k]))
        action.append(tuple(cols))
    out = make_module(a, labels, degrees, action, name=name, validate=False)
    return out


def summand_injection(total: GradedModule, parts: Sequence[GradedModule], k: int) -> ModuleMap:
    """Inclusion of the k-th summand into a direct_sum(parts) result."""
    f = total.field
    label_pos = {l: i for i, l in enumerate(total.labels)}
    cols = tuple(f.unit(label_pos[f"{parts[k].labels[c]}[{k}]"]) for c in range(parts[k].dim))
    return ModuleMap(parts[k], total, 0, cols)


def summand_projection(total: GradedModule, parts: Sequence[GradedModule], k: int) -> ModuleMap:
    f = total.field
    pos = {}
    for c in range(parts[k].dim):
        pos[total.labels.index(f"{parts[k].labels[c]}[{k}]")] = c
    cols = tuple(f.unit(pos[i]) if i in pos else f.zero() for i in range(total.dim))
    return ModuleMap(total, parts[k], 0, cols)


# ------------------------------------------------------- covers and syzygies

def indecomposable_basis(m: GradedModule):
    """Basis vectors of m spanning a complement of I·m, by degree."""
    a = m.algebra
    f = m.field
    ideal = a.augmentation_ideal()
    im = [m.act_basis(i, f.unit(c)) for i in ideal for c in range(m.dim)]
    rows, piv = _rref_packed(f, [v for v in im if v], m.dim)
    pivset = set(piv)
    return [c for c in range(m.dim) if c not in pivset]


def projective_cover(m: GradedModule):
    """(free module P, surjection P -> m) with generators lifting a basis of m/I·m."""
    a = m.algebra
    gens = indecomposable_basis(m)
    P = free_module(a, [m.degrees[c] for c in gens])
    f = m.field
    index = P._cache["free_index"]
    cols = [None] * P.dim
    for (g, b), k in index.items():
        cols[k] = m.act_basis(b, f.unit(gens[g]))
    return P, ModuleMap(P, m, 0, tuple(cols))


def syzygy(m: GradedModule, name=""):
    P, cover = projective_cover(m)
    return kernel(cover, name=name or (f"Ω{m.name}" if m.name else ""))[0]


def is_free(m: GradedModule) -> bool:
    return len(indecomposable_basis(m)) * m.algebra.dim == m.dim


# ----------------------------------------------------------- exactness

@dataclass
class Junction:
    position: int            # 0 = left end, len(maps) = right end
    composite_zero: bool
    homology_dim: int | None
    bad_degrees: list
    label: str = ""


@dataclass
class ExactnessReport:
    junctions: list

    @property
    def exact(self) -> bool:
        return all(j.composite_zero and j.homology_dim == 0 for j in self.junctions)

    def first_failure(self):
        for j in self.junctions:
            if not (j.composite_zero and j.homology_dim == 0):
                return j
        return None

    def summary(self) -> str:
        bad = self.first_failure()
        if bad is None:
            return f"exact ({len(self.junctions)} junctions)"
        why = "composite nonzero" if not bad.composite_zero else f"homology dimension {bad.homology_dim}"
        return f"not exact at junction {bad.position} {bad.label}: {why} (degrees {bad.bad_degrees})"


def _rank_by_degree(fm: ModuleMap) -> dict:
    """Rank of fm restricted to each source degree, keyed by target degree."""
    s = fm.source
    f = s.field
    out = {}
    for d in s.degree_set():
        lo, hi = s.block(d)
        ech = Echelon(f)
        for c in range(lo, hi):
            ech.add(fm.columns[c])
        if ech.rank:
            out[d + fm.shift] = ech.rank
    return out


def check_exact(maps: Sequence[ModuleMap], ends: bool = True) -> ExactnessReport:
    """Exactness of X_0 -> X_1 -> ... ; with ends=True also 0 -> X_0 and X_n -> 0."""
    maps = list(maps)
    if not maps:
        raise ModuleError("empty sequence")
    for k in range(len(maps) - 1):
        if not _composable(maps[k].target, maps[k + 1].source):
            raise ModuleError(f"maps {k} and {k + 1} are not composable")
    juncs = []
    ranks = [_rank_by_degree(fm) for fm in maps]

    def kernel_dims(fm, rk):
        # kernel dimension per source degree
        out = {}
        for d, n in fm.source.graded_dims().items():
            kd = n - rk.get(d + fm.shift, 0)
            if kd:
                out[d] = kd
        return out

    if ends:
        kd = kernel_dims(maps[0], ranks[0])
        juncs.append(Junction(0, True, sum(kd.values()), sorted(kd), "(left end: injectivity)"))
    for k in range(len(maps) - 1):
        fm, gm = maps[k], maps[k + 1]
        comp_zero = all(not gm.apply(c) for c in fm.columns)
        kd = kernel_dims(gm, ranks[k + 1])
        # homology in the middle module, degree by degree (degrees of gm.source)
        bad = []
        total = 0
        for d in sorted(set(kd) | set(ranks[k])):
            h = kd.get(d, 0) - ranks[k].get(d, 0)
            if h:
                bad.append(d)
                total += h
        juncs.append(Junction(k + 1, comp_zero, total if comp_zero else None, bad,
                              f"(between maps {k} and {k + 1})"))
    if ends:
        last = maps[-1]
        cd = {}
        for d, n in last.target.graded_dims().items():
            c = n - ranks[-1].get(d, 0)
            if c:
                cd[d] = c
        juncs.append(Junction(len(maps), True, sum(cd.values()), sorted(cd), "(right end: surjectivity)"))
    return ExactnessReport(juncs)


# ------------------------------------------------------------- hom spaces

def hom_space(m1: GradedModule, m2: GradedModule, shift: int = 0) -> list[ModuleMap]:
    """Basis of the equivariant maps m1 -> m2 raising degree by `shift`."""
    a = m1.algebra
    f = m1.field
    unknown = {}
    for c in range(m1.dim):
        lo, hi = m2.block(m1.degrees[c] + shift)
        for r in range(lo, hi):
            unknown[(r, c)] = len(unknown)
    U = len(unknown)
    if U == 0:
        return []
    eqs = []
    gens = a.generators()
    for i in gens:
        di = a.degrees[i]
        for c in range(m1.dim):
            lo, hi = m2.block(m1.degrees[c] + di + shift)
            if lo == hi:
                continue
            bc = m1.action[i][c]
            rows = {r: f.zero() for r in range(lo, hi)}
            # F(b·e_c)
            for cp, x in f.items(bc):
                for r in range(lo, hi):
                    rows[r] = f.axpy(rows[r], x, f.unit(unknown[(r, cp)]))
            # - b·F(e_c)
            lo2, hi2 = m2.block(m1.degrees[c] + shift)
            for rp in range(lo2, hi2):
                for r, y in f.items(m2.action[i][rp]):
                    rows[r] = f.axpy(rows[r], -y, f.unit(unknown[(rp, c)]))
            eqs.extend(v for v in rows.values() if v)
    M = FMatrix.from_packed(f, eqs, U) if eqs else FMatrix.zeros(f, 0, U)
    sols = kernel_basis_packed(M)
    inv = {k: rc for rc, k in unknown.items()}
    out = []
    for s in sols:
        cols = [f.zero() for _ in range(m1.dim)]
        for k, x in f.items(s):
            r, c = inv[k]
            cols[c] = f.axpy(cols[c], x, f.unit(r))
        out.append(ModuleMap(m1, m2, shift, tuple(cols)))
    return out


def _is_invertible(fm: ModuleMap) -> bool:
    return fm.source.dim == fm.target.dim and fm.rank() == fm.source.dim


def _combine(maps, coeffs):
    f = maps[0].source.field
    cols = [f.zero() for _ in range(maps[0].source.dim)]
    for fm, x in zip(maps, coeffs):
        if x:
            cols = [f.axpy(u, x, v) for u, v in zip(cols, fm.columns)]
    return ModuleMap(maps[0].source, maps[0].target, maps[0].shift, tuple(cols))


def _invariants(m: GradedModule):
    a = m.algebra
    out = [tuple(sorted(m.graded_dims().items()))]
    for i in a.augmentation_ideal():
        fm = ModuleMap(m, m, a.degrees[i], m.action[i])
        out.append(tuple(sorted(_rank_by_degree(fm).items())))
    return out


EXHAUSTIVE_LIMIT = 1 << 16
RANDOM_TRIES = 4096


def find_isomorphism(m1: GradedModule, m2: GradedModule, seed: int = 0):
    """An equivariant degree-0 isomorphism m1 -> m2, or None.

    Necessary invariants (graded dimensions, ranks of every basis element's
    action) are compared first.  Then the hom space is searched: exhaustively
    when it has at most 2^16 elements, otherwise by seeded random
    combinations.
    """
    if not _same_algebra(m1.algebra, m2.algebra):
        raise ModuleError("modules over different algebras")
    if m1.dim != m2.dim or _invariants(m1) != _invariants(m2):
        return None
    if m1.dim == 0:
        return ModuleMap(m1, m2, 0, ())
    H = hom_space(m1, m2, 0)
    if not H:
        return None
    p = m1.field.p
    h = len(H)
    rng = random.Random(seed)
    for fm in H:
        if _is_invertible(fm):
            return fm
    if p ** h <= EXHAUSTIVE_LIMIT:
        import itertools
        for coeffs in itertools.product(range(p), repeat=h):
            if any(coeffs):
                fm = _combine(H, coeffs)
                if _is_invertible(fm):
                    return fm
        return None
    for _ in range(RANDOM_TRIES):
        coeffs = [rng.randrange(p) for _ in range(h)]
        fm = _combine(H, coeffs)
        if _is_invertible(fm):
            return fm
    return None


def is_isomorphic(m1: GradedModule, m2: GradedModule, seed: int = 0) -> bool:
    return find_isomorphism(m1, m2, seed) is not None


# ----------------------------------------------------------------- JSON

def module_to_spec(m: GradedModule, algebra_ref=None) -> dict:
    f = m.field
    doc = {}
    doc["algebra"] = algebra_ref if algebra_ref is not None else algebra_to_spec(m.algebra)
    doc["basis"] = [{"label": l, "degree": d} for l, d in zip(m.labels, m.degrees)]
    doc["action"] = [FMatrix.from_columns(f, cols, m.dim).to_lists() for cols in m.action]
    if m.name:
        doc["name"] = m.name
    return doc


def resolve_algebra(ref) -> GradedAlgebra:
    if isinstance(ref, GradedAlgebra):
        return ref
    if isinstance(ref, str):
        return builtin(ref)
    return algebra_from_spec(ref)


def module_from_spec(doc, algebra: GradedAlgebra | None = None) -> GradedModule:
    if isinstance(doc, (str, bytes)):
        doc = json.loads(doc)
    if not isinstance(doc, dict):
        raise ModuleError("module spec must be an object")
    unknown = set(doc) - {"algebra", "basis", "action", "name"}
    if unknown:
        raise ModuleError(f"unknown fields in module spec: {sorted(unknown)}")
    a = algebra or resolve_algebra(doc.get("algebra"))
    f = a.field
    try:
        labels = [b["label"] for b in doc["basis"]]
        degrees = [b["degree"] for b in doc["basis"]]
        mats = doc["action"]
    except (KeyError, TypeError) as e:
        raise ModuleError(f"malformed module spec: {e}") from None
    n = len(labels)
    if len(mats) != a.dim:
        raise ModuleError("need one action matrix per algebra basis element")
    action = []
    for mat in mats:
        if len(mat) != n or any(len(r) != n for r in mat):
            raise ModuleError(f"action matrices must be {n}x{n}")
        action.append(tuple(FMatrix.from_rows(f, mat, n).columns()) if n else ())
    if list(degrees) != sorted(degrees):
        raise ModuleError("module basis must be sorted by degree")
    m = GradedModule(a, tuple(labels), tuple(degrees), tuple(action), doc.get("name", ""))
    bad = check_module(m)
    if bad:
        raise ModuleError(f"invalid module: {bad[0]}")
    return m


def map_to_spec(fm: ModuleMap) -> dict:
    return {"shift": fm.shift, "matrix": fm.matrix.to_lists()}


def map_from_spec(doc, source: GradedModule, target: GradedModule, validate=False) -> ModuleMap:
    mat = doc["matrix"]
    f = source.field
    if len(mat) != target.dim or any(len(r) != source.dim for r in mat):
        raise ModuleError(f"map matrix must be {target.dim}x{source.dim}")
    cols = FMatrix.from_rows(f, mat, source.dim).columns() if target.dim else [f.zero()] * source.dim
    return make_map(source, target, cols, doc.get("shift", 0), validate=validate)


# ------------------------------------------------------------- map helpers

def right_multiplication(a: GradedAlgebra, x, A: GradedModule | None = None) -> ModuleMap:
    """b -> b·x on A as a free module on [0]; the map raises degree by |x|."""
    A = A or free_module(a, [0])
    f = a.field
    xv = a.element(x) if isinstance(x, str) else x
    dx = a.degree_of(xv)
    index = A._cache["free_index"]
    cols = [None] * A.dim
    for (_, b), k in index.items():
        cols[k] = _algebra_to_free(A, a.product(f.unit(b), xv))
    return ModuleMap(A, A, dx, tuple(cols))


def factor_through(fm: ModuleMap, inclusion: ModuleMap) -> ModuleMap:
    """The map S -> Sub with inclusion ∘ result = fm."""
    f = fm.source.field
    ech = Echelon(f)
    for k, v in enumerate(inclusion.columns):
        ech.add(v, f.unit(k))
    cols = []
    for v in fm.columns:
        x = ech.express(v)
        if x is None:
            raise ModuleError("map does not factor through the submodule")
        cols.append(x)
    return ModuleMap(fm.source, inclusion.source, fm.shift - inclusion.shift, tuple(cols))


def as_degree_zero(fm: ModuleMap) -> ModuleMap:
    """Reinterpret a map of degree s as a degree-0 map into the target twisted by -s."""
    if fm.shift == 0:
        return fm
    return ModuleMap(fm.source, twist(fm.target, -fm.shift), 0, fm.columns)
