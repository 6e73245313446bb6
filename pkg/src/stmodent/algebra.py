"""Finite connected graded algebras over F_p, optionally with a coproduct."""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field as dc_field
from typing import Sequence

from .linalg import FMatrix, PrimeField, field_of, rank, solve_packed
from . import steenrod


class AlgebraError(ValueError):
    """Invalid algebra data; `violations` lists every failed check."""

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class SchemaError(AlgebraError):
    pass


@dataclass(frozen=True, eq=False)
class GradedAlgebra:
    field: PrimeField
    labels: tuple
    degrees: tuple
    unit_index: int
    mult: tuple                 # mult[i][j]: packed vector of b_i b_j
    comult: tuple | None = None  # comult[k]: tuple of (i, j, c)
    name: str = ""
    _cache: dict = dc_field(default_factory=dict, repr=False, compare=False)

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def top_degree(self) -> int:
        return max(self.degrees)

    def __len__(self):
        return self.dim

    def __repr__(self):
        return f"GradedAlgebra({self.name or '?'}, p={self.p}, dim={self.dim})"

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"no basis element {label!r}") from None

    def basis_in_degree(self, d: int) -> list[int]:
        return [i for i, x in enumerate(self.degrees) if x == d]

    def augmentation_ideal(self) -> list[int]:
        return [i for i, x in enumerate(self.degrees) if x > 0]

    @property
    def orientation(self):
        return self._cache.get("orientation")

    # -- element arithmetic on packed vectors --
    def basis_vector(self, i: int):
        return self.field.unit(i)

    def one(self):
        return self.field.unit(self.unit_index)

    def product(self, u, v):
        f = self.field
        out = f.zero()
        for i, a in f.items(u):
            row = self.mult[i]
            for j, b in f.items(v):
                out = f.axpy(out, a * b, row[j])
        return out

    def degree_of(self, v):
        """Degree of a homogeneous nonzero element (None for 0, error if mixed)."""
        degs = {self.degrees[i] for i, _ in self.field.items(v)}
        if not degs:
            return None
        if len(degs) > 1:
            raise AlgebraError(f"element is not homogeneous (degrees {sorted(degs)})")
        return degs.pop()

    def element(self, expr) -> object:
        """Parse an element: a basis index, a packed vector, or a string such
        as "Sq2Sq1 + Sq1" where each term is a product of basis labels."""
        if isinstance(expr, int) and not isinstance(expr, bool):
            if self.p == 2 and expr >= self.dim:
                raise AlgebraError("index out of range")
            return self.field.unit(expr)
        if isinstance(expr, dict):
            return dict(expr)
        if not isinstance(expr, str):
            raise TypeError(f"cannot interpret {expr!r} as an element")
        f = self.field
        out = f.zero()
        for term in expr.split("+"):
            term = term.strip()
            coeff = 1
            while term and term[0].isdigit() and term not in self.labels:
                # leading scalar such as "2x" over odd p
                k = 0
                while k < len(term) and term[k].isdigit():
                    k += 1
                coeff = int(term[:k])
                term = term[k:].strip().lstrip("*").strip()
            out = f.axpy(out, coeff, self._parse_word(term))
        return out

    def _parse_word(self, word: str):
        if word in ("", "1") and "1" in self.labels:
            return self.one()
        labels = sorted((l for l in self.labels if l), key=len, reverse=True)
        v = self.one()
        pos = 0
        while pos < len(word):
            if word[pos] in " *·":
                pos += 1
                continue
            for l in labels:
                if word.startswith(l, pos):
                    v = self.product(v, self.field.unit(self.index(l)))
                    pos += len(l)
                    break
            else:
                raise AlgebraError(f"cannot parse {word!r} at position {pos}")
        return v

    def format(self, v) -> str:
        f = self.field
        terms = []
        for i, c in f.items(v):
            terms.append(self.labels[i] if c == 1 else f"{c}{self.labels[i]}")
        return " + ".join(terms) if terms else "0"

    def left_mult_columns(self, x) -> list:
        """Columns of the matrix of left multiplication by x."""
        return [self.product(x, self.field.unit(j)) for j in range(self.dim)]

    def right_mult_columns(self, x) -> list:
        return [self.product(self.field.unit(j), x) for j in range(self.dim)]

    def generators(self) -> list[int]:
        """Basis indices spanning a complement of I^2 in I (algebra generators)."""
        if "generators" in self._cache:
            return self._cache["generators"]
        from .linalg import Echelon
        f = self.field
        ech = Echelon(f)
        ideal = self.augmentation_ideal()
        for i in ideal:
            for j in ideal:
                ech.add(self.mult[i][j])
        gens = []
        # walk by degree; an element is a generator if not in I^2 + span(previous gens)
        for i in sorted(ideal, key=lambda i: (self.degrees[i], i)):
            if ech.add(f.unit(i)):
                gens.append(i)
        self._cache["generators"] = gens
        return gens

    # -- tensor helpers (elements of A⊗A as dicts {(i, j): c}) --
    def tensor_mult(self, x: dict, y: dict) -> dict:
        f = self.field
        p = self.p
        out = {}
        for (a, b), c1 in x.items():
            for (c, d), c2 in y.items():
                sign = -1 if (p != 2 and (self.degrees[b] * self.degrees[c]) % 2) else 1
                ac = self.mult[a][c]
                bd = self.mult[b][d]
                for k, u in f.items(ac):
                    for l, w in f.items(bd):
                        key = (k, l)
                        val = (out.get(key, 0) + sign * c1 * c2 * u * w) % p
                        if val:
                            out[key] = val
                        else:
                            out.pop(key, None)
        return out

    def coproduct(self, k: int) -> dict:
        if self.comult is None:
            raise AlgebraError("algebra has no comultiplication")
        return {(i, j): c for i, j, c in self.comult[k]}


def _finish(a: GradedAlgebra, validate: bool = True) -> GradedAlgebra:
    if validate:
        bad = check_invariants(a)
        if bad:
            raise AlgebraError(f"{len(bad)} invariant violation(s): {bad[0]}", bad)
    return a


def check_invariants(a: GradedAlgebra, full: bool = True) -> list[str]:
    """Every violated algebra (and, if present, coalgebra) law, as messages."""
    f = a.field
    n = a.dim
    p = a.p
    bad = []
    if len(a.degrees) != n or len(a.mult) != n or any(len(r) != n for r in a.mult):
        return ["shape: basis, degrees and multiplication table disagree in size"]
    if len(set(a.labels)) != n:
        bad.append("labels: basis labels are not unique")
    if any(d < 0 for d in a.degrees):
        bad.append("degrees: negative degree in algebra basis")
    zero_deg = a.basis_in_degree(0)
    if zero_deg != [a.unit_index]:
        bad.append(f"connected: degree-0 basis is {zero_deg}, expected only the unit {a.unit_index}")
    for i in range(n):
        for j in range(n):
            v = a.mult[i][j]
            for k, _ in f.items(v):
                if k >= n or a.degrees[k] != a.degrees[i] + a.degrees[j]:
                    bad.append(f"degree-additivity: c[{i}][{j}] has support on {k}")
                    break
    u = a.unit_index
    for i in range(n):
        e = f.unit(i)
        if a.mult[u][i] != e or a.mult[i][u] != e:
            bad.append(f"unit law fails for basis element {i} ({a.labels[i]})")
    if bad:
        return bad
    if full:
        for i in range(n):
            for j in range(n):
                ij = a.mult[i][j]
                for k in range(n):
                    lhs = a.product(ij, f.unit(k))
                    rhs = a.product(f.unit(i), a.mult[j][k])
                    if lhs != rhs:
                        bad.append(f"associativity fails for triple ({i},{j},{k})")
                        if len(bad) > 20:
                            return bad
    if a.comult is not None:
        bad.extend(check_coalgebra(a))
    return bad


def check_coalgebra(a: GradedAlgebra) -> list[str]:
    f = a.field
    n = a.dim
    p = a.p
    u = a.unit_index
    bad = []
    if len(a.comult) != n:
        return ["comult: table length differs from dimension"]
    for k in range(n):
        dk = a.coproduct(k)
        for (i, j), c in dk.items():
            if not (0 <= i < n and 0 <= j < n) or c % p == 0:
                bad.append(f"comult: malformed entry in Δ[{k}]")
            elif a.degrees[i] + a.degrees[j] != a.degrees[k]:
                bad.append(f"comult: Δ[{k}] term ({i},{j}) has wrong degree")
        # counit: (ε⊗1)Δ = id = (1⊗ε)Δ
        left = {j: c for (i, j), c in dk.items() if i == u}
        right = {i: c for (i, j), c in dk.items() if j == u}
        if left != {k: 1} or right != {k: 1}:
            bad.append(f"counit law fails at basis element {k} ({a.labels[k]})")
        # coassociativity
        l3, r3 = {}, {}
        for (i, j), c in dk.items():
            for (x, y), d in a.coproduct(i).items():
                key = (x, y, j)
                l3[key] = (l3.get(key, 0) + c * d) % p
            for (x, y), d in a.coproduct(j).items():
                key = (i, x, y)
                r3[key] = (r3.get(key, 0) + c * d) % p
        if {k_: v for k_, v in l3.items() if v} != {k_: v for k_, v in r3.items() if v}:
            bad.append(f"coassociativity fails at basis element {k} ({a.labels[k]})")
    if bad:
        return bad
    # multiplicativity: Δ(b_i b_j) = Δ(b_i) Δ(b_j)
    for i in range(n):
        for j in range(n):
            lhs = {}
            for k, c in f.items(a.mult[i][j]):
                for key, d in a.coproduct(k).items():
                    lhs[key] = (lhs.get(key, 0) + c * d) % p
            lhs = {k_: v for k_, v in lhs.items() if v}
            rhs = a.tensor_mult(a.coproduct(i), a.coproduct(j))
            if lhs != rhs:
                bad.append(f"multiplicativity of Δ fails for ({i},{j})")
    return bad


def is_cocommutative(a: GradedAlgebra) -> bool:
    if a.comult is None:
        raise AlgebraError("algebra has no comultiplication")
    for k in range(a.dim):
        dk = a.coproduct(k)
        sw = {}
        for (i, j), c in dk.items():
            s = -1 if (a.p != 2 and a.degrees[i] * a.degrees[j] % 2) else 1
            sw[(j, i)] = (s * c) % a.p
        if sw != dk:
            return False
    return True


def is_graded_commutative(a: GradedAlgebra) -> bool:
    f = a.field
    for i in range(a.dim):
        for j in range(a.dim):
            s = -1 if (a.p != 2 and a.degrees[i] * a.degrees[j] % 2) else 1
            if a.mult[i][j] != f.scale(s, a.mult[j][i]):
                return False
    return True


def poincare_series(a: GradedAlgebra) -> list[int]:
    out = [0] * (a.top_degree + 1)
    for d in a.degrees:
        out[d] += 1
    return out


def comult_from_words(a: GradedAlgebra, words: Sequence[Sequence[int]], gen_coproducts: dict) -> tuple:
    """Coproduct table determined multiplicatively.

    words[k] lists generator basis indices whose ordered product is exactly
    basis element k; gen_coproducts maps each generator index to its
    coproduct as a dict {(i, j): c}.
    """
    u = a.unit_index
    table = []
    for w in words:
        acc = {(u, u): 1}
        for g in w:
            acc = a.tensor_mult(acc, gen_coproducts[g])
        table.append(tuple(sorted((i, j, c) for (i, j), c in acc.items())))
    return tuple(table)


def _with(a: GradedAlgebra, **kw) -> GradedAlgebra:
    args = dict(field=a.field, labels=a.labels, degrees=a.degrees, unit_index=a.unit_index,
                mult=a.mult, comult=a.comult, name=a.name)
    args.update(kw)
    return GradedAlgebra(**args)


# ---------------------------------------------------------------- built-ins

def trivial_algebra(p=2) -> GradedAlgebra:
    f = field_of(p)
    return GradedAlgebra(f, ("1",), (0,), 0, ((f.unit(0),),), ((( 0, 0, 1),),), name="trivial")


def make_exterior(gen_degrees: Sequence[int], p=2, name: str | None = None) -> GradedAlgebra:
    f = field_of(p)
    gen_degrees = list(gen_degrees)
    if any((not isinstance(d, int)) or d <= 0 for d in gen_degrees):
        raise AlgebraError("exterior generators need positive integer degrees")
    if f.p != 2 and any(d % 2 == 0 for d in gen_degrees):
        raise AlgebraError("over odd p, exterior generators must have odd degree")
    m = len(gen_degrees)
    subsets = [s for r in range(m + 1) for s in itertools.combinations(range(m), r)]
    subsets.sort(key=lambda s: (sum(gen_degrees[i] for i in s), len(s), s))
    index = {s: k for k, s in enumerate(subsets)}
    labels = tuple("".join(f"e{i + 1}" for i in s) or "1" for s in subsets)
    degrees = tuple(sum(gen_degrees[i] for i in s) for s in subsets)
    mult = []
    for s in subsets:
        row = []
        for t in subsets:
            if set(s) & set(t):
                row.append(f.zero())
                continue
            # sign of sorting the concatenation (odd generators anticommute)
            inv = sum(1 for x in s for y in t if x > y)
            c = 1 if (f.p == 2 or inv % 2 == 0) else f.p - 1
            row.append(f.scale(c, f.unit(index[tuple(sorted(s + t))])))
        mult.append(tuple(row))
    a = GradedAlgebra(f, labels, degrees, index[()], tuple(mult), None,
                      name=name or ("ext-" + "-".join(map(str, gen_degrees)) if m else "trivial"))
    u = a.unit_index
    gens = {index[(i,)]: {(index[(i,)], u): 1, (u, index[(i,)]): 1} for i in range(m)}
    words = [[index[(i,)] for i in s] for s in subsets]
    return _finish(_with(a, comult=comult_from_words(a, words, gens)))


def make_truncated_poly(gen_degree: int, p: int, name: str | None = None) -> GradedAlgebra:
    if not isinstance(gen_degree, int) or gen_degree <= 0:
        raise AlgebraError("generator degree must be a positive integer")
    f = field_of(p)
    if f.p == 2:
        return make_exterior([gen_degree], 2, name=name or f"trunc-2-{gen_degree}")
    if gen_degree % 2:
        raise AlgebraError("over odd p the truncated polynomial generator must have even degree")
    n = f.p
    labels = tuple("1" if i == 0 else ("x" if i == 1 else f"x^{i}") for i in range(n))
    degrees = tuple(i * gen_degree for i in range(n))
    mult = tuple(tuple(f.unit(i + j) if i + j < n else f.zero() for j in range(n)) for i in range(n))
    comult = []
    for k in range(n):
        from math import comb
        comult.append(tuple((i, k - i, comb(k, i) % f.p) for i in range(k + 1) if comb(k, i) % f.p))
    a = GradedAlgebra(f, labels, degrees, 0, mult, tuple(comult),
                      name=name or f"trunc-{f.p}-{gen_degree}")
    return _finish(a)


A1_WORDS = ((), (1,), (2,), (1, 2), (2, 1), (1, 2, 1), (2, 1, 2), (2, 1, 2, 1))


def _word_label(w):
    return "".join(f"Sq{x}" for x in w) or "1"


def make_steenrod_A1() -> GradedAlgebra:
    """The subalgebra of the mod 2 Steenrod algebra generated by Sq1 and Sq2.

    Products are computed in the full Steenrod algebra via the Adem relations
    and rewritten in the basis of words listed in A1_WORDS.
    """
    f = field_of(2)
    words = A1_WORDS
    monos = sorted({m for w in words for m in steenrod.reduce_word(w)})
    pos = {m: i for i, m in enumerate(monos)}

    def vec(elt):
        v = 0
        for m in elt:
            if m not in pos:
                raise AlgebraError(f"product leaves A(1): {m}")
            v |= 1 << pos[m]
        return v

    cols = [vec(steenrod.reduce_word(w)) for w in words]
    basis_mat = FMatrix.from_columns(f, cols, len(monos))
    if rank(basis_mat) != len(words):
        raise AlgebraError("A(1) basis words are dependent")
    mult = []
    for w1 in words:
        row = []
        for w2 in words:
            x = solve_packed(basis_mat, vec(steenrod.reduce_word(w1 + w2)))
            if x is None:
                raise AlgebraError(f"product {_word_label(w1)}*{_word_label(w2)} leaves A(1)")
            row.append(x)
        mult.append(tuple(row))
    labels = tuple(_word_label(w) for w in words)
    degrees = tuple(sum(w) for w in words)
    a = GradedAlgebra(f, labels, degrees, 0, tuple(mult), None, name="A1")
    s1, s2 = 1, 2
    gens = {s1: {(s1, 0): 1, (0, s1): 1},
            s2: {(s2, 0): 1, (s1, s1): 1, (0, s2): 1}}
    letter = {1: s1, 2: s2}
    comult = comult_from_words(a, [[letter[x] for x in w] for w in words], gens)
    return _finish(_with(a, comult=comult))


def change_basis(a: GradedAlgebra, vectors: Sequence, labels: Sequence[str], name=None) -> GradedAlgebra:
    """Re-express a in a new homogeneous basis given as packed vectors."""
    f = a.field
    n = a.dim
    P = FMatrix.from_columns(f, list(vectors), n)
    if rank(P) != n:
        raise AlgebraError("new basis vectors are not a basis")
    degrees = tuple(a.degree_of(v) for v in vectors)

    def coords(v):
        x = solve_packed(P, v)
        assert x is not None
        return x

    mult = tuple(tuple(coords(a.product(u, v)) for v in vectors) for u in vectors)
    unit = [i for i, v in enumerate(vectors) if v == a.one()]
    if len(unit) != 1:
        raise AlgebraError("new basis must contain the unit")
    comult = None
    if a.comult is not None:
        # Δ(new_k) in old⊗old, then convert each tensor factor to new coordinates
        old_coords = [coords(f.unit(i)) for i in range(n)]
        table = []
        for v in vectors:
            acc = {}
            for k, c in f.items(v):
                for (i, j), d in a.coproduct(k).items():
                    for x, cx in f.items(old_coords[i]):
                        for y, cy in f.items(old_coords[j]):
                            acc[(x, y)] = (acc.get((x, y), 0) + c * d * cx * cy) % f.p
            table.append(tuple(sorted((i, j, c) for (i, j), c in acc.items() if c)))
        comult = tuple(table)
    return _finish(GradedAlgebra(f, tuple(labels), degrees, unit[0], mult, comult,
                                 name=name or a.name))


def make_noncomm_M() -> GradedAlgebra:
    """The 8-dimensional noncommutative, cocommutative Hopf algebra M.

    Built as the dual of the exterior algebra on e1, e2, e3 (degrees 1, 2, 3)
    whose coproduct has Δ(e3) = 1⊗e3 + e1⊗e2 + e3⊗1, then rewritten in the
    monomial basis 1, x1, x2, x3, x1x2, x1x3, x2x3, x1x2x3 where x_i is dual
    to e_i.
    """
    ext = make_exterior([1, 2, 3], 2)
    e1, e2, e3 = ext.index("e1"), ext.index("e2"), ext.index("e3")
    u = ext.unit_index
    gens = {e1: {(e1, u): 1, (u, e1): 1},
            e2: {(e2, u): 1, (u, e2): 1},
            e3: {(e3, u): 1, (e1, e2): 1, (u, e3): 1}}
    words = [[ext.index(g) for g in re.findall(r"e\d+", lab)] for lab in ext.labels]
    dual_src = _finish(_with(ext, comult=comult_from_words(ext, words, gens)))
    d = dualize(dual_src)
    x1, x2, x3 = (d.field.unit(d.index(l)) for l in ("e1", "e2", "e3"))
    mono = [d.one(), x1, x2, x3, d.product(x1, x2), d.product(x1, x3),
            d.product(x2, x3), d.product(d.product(x1, x2), x3)]
    labels = ["1", "x1", "x2", "x3", "x1x2", "x1x3", "x2x3", "x1x2x3"]
    return change_basis(d, mono, labels, name="M")


def tensor_product(a: GradedAlgebra, b: GradedAlgebra, name=None) -> GradedAlgebra:
    if a.p != b.p:
        raise AlgebraError(f"characteristic mismatch: {a.p} vs {b.p}")
    f = a.field
    pairs = sorted(((i, j) for i in range(a.dim) for j in range(b.dim)),
                   key=lambda ij: (a.degrees[ij[0]] + b.degrees[ij[1]], ij))
    index = {ij: k for k, ij in enumerate(pairs)}
    labels = tuple(f"{a.labels[i]}⊗{b.labels[j]}" for i, j in pairs)
    degrees = tuple(a.degrees[i] + b.degrees[j] for i, j in pairs)

    def tmul(x, y):
        (i, j), (k, l) = x, y
        s = -1 if (f.p != 2 and b.degrees[j] * a.degrees[k] % 2) else 1
        out = f.zero()
        for m, c in f.items(a.mult[i][k]):
            for n, d in f.items(b.mult[j][l]):
                out = f.axpy(out, s * c * d, f.unit(index[(m, n)]))
        return out

    mult = tuple(tuple(tmul(x, y) for y in pairs) for x in pairs)
    comult = None
    if a.comult is not None and b.comult is not None:
        table = []
        for i, j in pairs:
            acc = {}
            for (i1, i2), c in a.coproduct(i).items():
                for (j1, j2), d in b.coproduct(j).items():
                    # (i1⊗i2)⊗(j1⊗j2) -> (i1⊗j1)⊗(i2⊗j2), swapping i2 past j1
                    s = -1 if (f.p != 2 and a.degrees[i2] * b.degrees[j1] % 2) else 1
                    key = (index[(i1, j1)], index[(i2, j2)])
                    acc[key] = (acc.get(key, 0) + s * c * d) % f.p
            table.append(tuple(sorted((x, y, c) for (x, y), c in acc.items() if c)))
        comult = tuple(table)
    unit = index[(a.unit_index, b.unit_index)]
    return _finish(GradedAlgebra(f, labels, degrees, unit, mult, comult,
                                 name=name or f"{a.name}*{b.name}"))


def dualize(a: GradedAlgebra, name=None) -> GradedAlgebra:
    """Dual Hopf algebra: multiplication from Δ, coproduct from multiplication.

    The dual basis element f_i keeps the degree of b_i.  Pairings use the
    Koszul sign (-1)^{|i||j|}, which is trivial for p = 2.
    """
    if a.comult is None:
        raise AlgebraError("dualize needs a comultiplication")
    f = a.field
    n = a.dim

    def sgn(i, j):
        return -1 if (f.p != 2 and a.degrees[i] * a.degrees[j] % 2) else 1

    mult = [[f.zero() for _ in range(n)] for _ in range(n)]
    for k in range(n):
        for i, j, c in a.comult[k]:
            mult[i][j] = f.axpy(mult[i][j], sgn(i, j) * c, f.unit(k))
    comult = []
    for k in range(n):
        terms = []
        for i in range(n):
            for j in range(n):
                c = f.coeff(a.mult[i][j], k)
                if c:
                    terms.append((i, j, (sgn(i, j) * c) % f.p))
        comult.append(tuple(terms))
    return _finish(GradedAlgebra(f, a.labels, a.degrees, a.unit_index,
                                 tuple(tuple(r) for r in mult), tuple(comult),
                                 name=name or f"dual({a.name})"))


def gorenstein_orientation(a: GradedAlgebra):
    """Top degree d and a functional e on A_d with nondegenerate pairings
    (x, y) -> e(xy) between A_q and A_{d-q} for every q."""
    cached = a._cache.get("orientation")
    if cached is not None:
        return cached
    f = a.field
    d = a.top_degree
    top = a.basis_in_degree(d)
    if len(top) != 1:
        raise AlgebraError(f"not Frobenius: top degree {d} has dimension {len(top)}, "
                           "so no functional gives a nondegenerate pairing")
    t = top[0]
    for q in range(d + 1):
        lo, hi = a.basis_in_degree(q), a.basis_in_degree(d - q)
        if len(lo) != len(hi):
            raise AlgebraError(f"not Frobenius: dim A_{q} = {len(lo)} but dim A_{d - q} = {len(hi)}")
        if not lo:
            continue
        pm = FMatrix.from_rows(f, [[f.coeff(a.mult[i][j], t) for j in hi] for i in lo])
        if rank(pm) != len(lo):
            raise AlgebraError(f"not Frobenius: pairing A_{q} x A_{d - q} is degenerate")
    e = tuple(1 if i == t else 0 for i in range(a.dim))
    a._cache["orientation"] = (d, e)
    return d, e


def is_monogenic(a: GradedAlgebra) -> bool:
    return len(a.generators()) == 1


def monogenic_data(a: GradedAlgebra):
    """(generator index, degree n, height h) with x^h = 0 and x^{h-1} != 0."""
    gens = a.generators()
    if len(gens) != 1:
        raise AlgebraError(f"algebra is not monogenic ({len(gens)} generators)")
    g = gens[0]
    x = a.field.unit(g)
    pw = a.one()
    h = 0
    while pw:
        pw = a.product(pw, x)
        h += 1
    return g, a.degrees[g], h


# ---------------------------------------------------------------- JSON specs

_SPEC_KEYS = {"p", "basis", "unit", "mult", "comult", "name"}


def to_spec(a: GradedAlgebra) -> dict:
    f = a.field
    doc = {
        "p": a.p,
        "basis": [{"label": l, "degree": d} for l, d in zip(a.labels, a.degrees)],
        "unit": a.unit_index,
        "mult": [[f.unpack(v, a.dim) for v in row] for row in a.mult],
    }
    if a.comult is not None:
        doc["comult"] = [[list(t) for t in row] for row in a.comult]
    if a.name:
        doc["name"] = a.name
    return doc


def from_spec(doc, name: str | None = None) -> GradedAlgebra:
    if isinstance(doc, (str, bytes)):
        doc = json.loads(doc)
    if not isinstance(doc, dict):
        raise SchemaError("algebra spec must be a JSON object")
    unknown = set(doc) - _SPEC_KEYS
    if unknown:
        raise SchemaError(f"unknown fields in algebra spec: {sorted(unknown)}")
    for key in ("p", "basis", "unit", "mult"):
        if key not in doc:
            raise SchemaError(f"missing field {key!r}")
    try:
        f = field_of(doc["p"])
    except (ValueError, TypeError) as e:
        raise SchemaError(str(e)) from None
    basis = doc["basis"]
    if not isinstance(basis, list) or not basis:
        raise SchemaError("basis must be a nonempty list")
    labels, degrees = [], []
    for b in basis:
        if not isinstance(b, dict) or set(b) != {"label", "degree"}:
            raise SchemaError("basis entries must be {label, degree} objects")
        if not isinstance(b["label"], str) or not isinstance(b["degree"], int):
            raise SchemaError("basis label must be a string and degree an integer")
        labels.append(b["label"])
        degrees.append(b["degree"])
    n = len(labels)
    unit = doc["unit"]
    if not isinstance(unit, int) or not 0 <= unit < n:
        raise SchemaError("unit must be a basis index")
    mult = doc["mult"]
    if (not isinstance(mult, list) or len(mult) != n
            or any(not isinstance(r, list) or len(r) != n for r in mult)):
        raise SchemaError(f"mult must be an {n}x{n} table of coefficient vectors")
    rows = []
    for r in mult:
        row = []
        for v in r:
            if not isinstance(v, list) or len(v) != n or any(not isinstance(c, int) for c in v):
                raise SchemaError(f"each mult entry must be an integer vector of length {n}")
            row.append(f.pack(v))
        rows.append(tuple(row))
    comult = None
    if doc.get("comult") is not None:
        cm = doc["comult"]
        if not isinstance(cm, list) or len(cm) != n:
            raise SchemaError("comult must list one coproduct per basis element")
        comult = []
        for row in cm:
            terms = []
            for t in row:
                if not (isinstance(t, list) and len(t) == 3 and all(isinstance(x, int) for x in t)):
                    raise SchemaError("comult terms must be [i, j, coeff] triples")
                if not (0 <= t[0] < n and 0 <= t[1] < n):
                    raise SchemaError("comult index out of range")
                if t[2] % f.p:
                    terms.append((t[0], t[1], t[2] % f.p))
            comult.append(tuple(sorted(terms)))
        comult = tuple(comult)
    a = GradedAlgebra(f, tuple(labels), tuple(degrees), unit, tuple(rows), comult,
                      name=name or doc.get("name", ""))
    return _finish(a)


def same_structure(a: GradedAlgebra, b: GradedAlgebra) -> bool:
    return (a.p == b.p and a.degrees == b.degrees and a.unit_index == b.unit_index
            and a.mult == b.mult and a.comult == b.comult)


def builtin(name: str) -> GradedAlgebra:
    """Registry: trivial, ext-d1-...-dm, trunc-p-n, A1, M."""
    if name.startswith("builtin:"):
        name = name[len("builtin:"):]
    if name == "trivial":
        return trivial_algebra(2)
    if name == "A1":
        return make_steenrod_A1()
    if name == "M":
        return make_noncomm_M()
    parts = name.split("-")
    try:
        nums = [int(x) for x in parts[1:]]
    except ValueError:
        nums = None
    if parts[0] == "ext" and nums:
        return make_exterior(nums, 2, name=name)
    if parts[0] == "trunc" and nums and len(nums) == 2:
        return make_truncated_poly(nums[1], nums[0], name=name)
    raise AlgebraError(f"unknown built-in algebra {name!r}")


BUILTINS = ("trivial", "ext-1", "ext-1-1", "ext-1-1-1", "ext-1-2", "ext-1-2-3",
            "trunc-3-2", "A1", "M")
