"""Exact linear algebra over prime fields.

Vectors are stored packed.  Over F_2 a vector is a Python int whose bit j is
coordinate j.  Over odd p a vector is a dict {index: nonzero residue}; such
dicts are never mutated after they are handed out.

The pivot rule everywhere is: leftmost column first, and among rows the
topmost.  Since reduced row echelon form is unique this only matters for
intermediate objects, but the incremental `Echelon` helper relies on it for
reproducible tagging.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence


class FieldMismatch(ValueError):
    pass


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class PrimeField:
    p: int

    def __post_init__(self):
        if not isinstance(self.p, int) or not _is_prime(self.p):
            raise ValueError(f"characteristic must be prime, got {self.p!r}")

    # -- scalars --
    def inv(self, c: int) -> int:
        c %= self.p
        if c == 0:
            raise ZeroDivisionError("0 has no inverse")
        return pow(c, self.p - 2, self.p)

    # -- packed vectors --
    def zero(self):
        return 0 if self.p == 2 else {}

    def unit(self, i: int):
        return 1 << i if self.p == 2 else {i: 1}

    def pack(self, entries: Iterable[int]):
        if self.p == 2:
            v = 0
            for i, c in enumerate(entries):
                if c & 1:
                    v |= 1 << i
            return v
        return {i: c % self.p for i, c in enumerate(entries) if c % self.p}

    def unpack(self, v, n: int) -> list[int]:
        if self.p == 2:
            return [(v >> i) & 1 for i in range(n)]
        out = [0] * n
        for i, c in v.items():
            out[i] = c
        return out

    def items(self, v) -> Iterator[tuple[int, int]]:
        """Nonzero (index, coefficient) pairs in increasing index order."""
        if self.p == 2:
            while v:
                low = v & -v
                yield low.bit_length() - 1, 1
                v ^= low
        else:
            for i in sorted(v):
                yield i, v[i]

    def coeff(self, v, i: int) -> int:
        if self.p == 2:
            return (v >> i) & 1
        return v.get(i, 0)

    def lead(self, v) -> int:
        """Index of the lowest nonzero coordinate, -1 for the zero vector."""
        if self.p == 2:
            return (v & -v).bit_length() - 1
        return min(v) if v else -1

    def add(self, u, v):
        if self.p == 2:
            return u ^ v
        return self.axpy(u, 1, v)

    def sub(self, u, v):
        if self.p == 2:
            return u ^ v
        return self.axpy(u, self.p - 1, v)

    def scale(self, c: int, v):
        c %= self.p
        if self.p == 2:
            return v if c else 0
        if c == 0:
            return {}
        return {i: (c * x) % self.p for i, x in v.items()}

    def axpy(self, u, c: int, v):
        """u + c*v."""
        c %= self.p
        if self.p == 2:
            return u ^ v if c else u
        if c == 0 or not v:
            return u
        out = dict(u)
        p = self.p
        for i, x in v.items():
            y = (out.get(i, 0) + c * x) % p
            if y:
                out[i] = y
            else:
                out.pop(i, None)
        return out

    def shift(self, v, k: int):
        """Move coordinate i to i+k (k may be negative)."""
        if self.p == 2:
            return v << k if k >= 0 else v >> -k
        return {i + k: c for i, c in v.items()}

    def restrict(self, v, lo: int, hi: int):
        """Coordinates in [lo, hi), re-indexed from 0."""
        if self.p == 2:
            return (v >> lo) & ((1 << (hi - lo)) - 1)
        return {i - lo: c for i, c in v.items() if lo <= i < hi}

    def dot(self, u, v) -> int:
        if self.p == 2:
            return (u & v).bit_count() & 1
        if len(u) > len(v):
            u, v = v, u
        return sum(c * v.get(i, 0) for i, c in u.items()) % self.p

    def weight(self, v) -> int:
        return v.bit_count() if self.p == 2 else len(v)


GF2 = PrimeField(2)


def field_of(p) -> PrimeField:
    if isinstance(p, PrimeField):
        return p
    return GF2 if p == 2 else PrimeField(p)


@dataclass(frozen=True, eq=False)
class FMatrix:
    """Dense matrix over F_p with packed rows."""

    field: PrimeField
    nrows: int
    ncols: int
    rows: tuple

    @classmethod
    def from_rows(cls, p, rows: Sequence[Sequence[int]], ncols: int | None = None) -> "FMatrix":
        f = field_of(p)
        rows = [list(r) for r in rows]
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != ncols:
                raise ValueError("ragged matrix")
        return cls(f, len(rows), ncols, tuple(f.pack(r) for r in rows))

    @classmethod
    def from_packed(cls, p, packed_rows, ncols: int) -> "FMatrix":
        return cls(field_of(p), len(packed_rows), ncols, tuple(packed_rows))

    @classmethod
    def from_columns(cls, p, packed_cols, nrows: int) -> "FMatrix":
        """Build from packed column vectors (each indexed by row)."""
        f = field_of(p)
        cols = list(packed_cols)
        return cls(f, nrows, len(cols), tuple(_transpose_packed(f, cols, nrows)))

    @classmethod
    def zeros(cls, p, nrows: int, ncols: int) -> "FMatrix":
        f = field_of(p)
        return cls(f, nrows, ncols, tuple(f.zero() for _ in range(nrows)))

    @classmethod
    def identity(cls, p, n: int) -> "FMatrix":
        f = field_of(p)
        return cls(f, n, n, tuple(f.unit(i) for i in range(n)))

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def entry(self, i: int, j: int) -> int:
        return self.field.coeff(self.rows[i], j)

    def to_lists(self) -> list[list[int]]:
        return [self.field.unpack(r, self.ncols) for r in self.rows]

    def columns(self) -> list:
        """Packed columns (each indexed by row)."""
        return _transpose_packed(self.field, self.rows, self.ncols)

    def column(self, j: int):
        f = self.field
        if f.p == 2:
            v = 0
            for i, r in enumerate(self.rows):
                if (r >> j) & 1:
                    v |= 1 << i
            return v
        return {i: r[j] for i, r in enumerate(self.rows) if j in r}

    def transpose(self) -> "FMatrix":
        return FMatrix(self.field, self.ncols, self.nrows, tuple(self.columns()))

    def matvec(self, v):
        """Packed product m*v where v is packed over columns."""
        f = self.field
        if f.p == 2:
            out = 0
            for i, r in enumerate(self.rows):
                if (r & v).bit_count() & 1:
                    out |= 1 << i
            return out
        out = {}
        for i, r in enumerate(self.rows):
            c = f.dot(r, v)
            if c:
                out[i] = c
        return out

    def __matmul__(self, other: "FMatrix") -> "FMatrix":
        _check_same_field(self, other)
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        f = self.field
        rows = []
        for r in self.rows:
            acc = f.zero()
            for k, c in f.items(r):
                acc = f.axpy(acc, c, other.rows[k])
            rows.append(acc)
        return FMatrix(f, self.nrows, other.ncols, tuple(rows))

    def __add__(self, other: "FMatrix") -> "FMatrix":
        _check_same_field(self, other)
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        f = self.field
        return FMatrix(f, self.nrows, self.ncols,
                       tuple(f.add(a, b) for a, b in zip(self.rows, other.rows)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, FMatrix):
            return NotImplemented
        return (self.p == other.p and self.shape == other.shape
                and self.rows == other.rows)

    def __hash__(self):
        return hash((self.p, self.shape, tuple(
            r if self.p == 2 else tuple(sorted(r.items())) for r in self.rows)))

    def is_zero(self) -> bool:
        return not any(self.rows)

    def submatrix(self, row_range: tuple[int, int], col_range: tuple[int, int]) -> "FMatrix":
        r0, r1 = row_range
        c0, c1 = col_range
        f = self.field
        return FMatrix(f, r1 - r0, c1 - c0,
                       tuple(f.restrict(r, c0, c1) for r in self.rows[r0:r1]))

    def hstack(self, other: "FMatrix") -> "FMatrix":
        _check_same_field(self, other)
        if self.nrows != other.nrows:
            raise ValueError("row count mismatch")
        f = self.field
        return FMatrix(f, self.nrows, self.ncols + other.ncols,
                       tuple(f.add(a, f.shift(b, self.ncols))
                             for a, b in zip(self.rows, other.rows)))

    def vstack(self, other: "FMatrix") -> "FMatrix":
        _check_same_field(self, other)
        if self.ncols != other.ncols:
            raise ValueError("column count mismatch")
        return FMatrix(self.field, self.nrows + other.nrows, self.ncols,
                       self.rows + other.rows)

    def __repr__(self):
        return f"FMatrix(p={self.p}, {self.to_lists()})"


def _check_same_field(a: FMatrix, b: FMatrix):
    if a.p != b.p:
        raise FieldMismatch(f"mixed characteristics {a.p} and {b.p}")


def _transpose_packed(f: PrimeField, vecs, n: int) -> list:
    """Transpose a list of packed vectors of length n."""
    out = [f.zero() for _ in range(n)]
    if f.p == 2:
        for i, v in enumerate(vecs):
            bit = 1 << i
            while v:
                low = v & -v
                j = low.bit_length() - 1
                out[j] |= bit
                v ^= low
        return out
    for i, v in enumerate(vecs):
        for j, c in v.items():
            out[j][i] = c
    return out


def _rref_packed(f: PrimeField, rows: list, ncols: int):
    """Reduced row echelon form of packed rows; returns (rows, pivots)."""
    rows = list(rows)
    pivots = []
    r = 0
    n = len(rows)
    if f.p == 2:
        for col in range(ncols):
            bit = 1 << col
            sel = -1
            for i in range(r, n):
                if rows[i] & bit:
                    sel = i
                    break
            if sel < 0:
                continue
            rows[r], rows[sel] = rows[sel], rows[r]
            pr = rows[r]
            for i in range(n):
                if i != r and rows[i] & bit:
                    rows[i] ^= pr
            pivots.append(col)
            r += 1
            if r == n:
                break
        return rows, pivots
    for col in range(ncols):
        sel = -1
        for i in range(r, n):
            if col in rows[i]:
                sel = i
                break
        if sel < 0:
            continue
        rows[r], rows[sel] = rows[sel], rows[r]
        pr = f.scale(f.inv(rows[r][col]), rows[r])
        rows[r] = pr
        for i in range(n):
            if i != r and col in rows[i]:
                rows[i] = f.axpy(rows[i], -rows[i][col], pr)
        pivots.append(col)
        r += 1
        if r == n:
            break
    return rows, pivots


def rref(m: FMatrix) -> tuple[FMatrix, list[int], int]:
    """Reduced row echelon form, pivot columns and rank."""
    rows, piv = _rref_packed(m.field, m.rows, m.ncols)
    return FMatrix(m.field, m.nrows, m.ncols, tuple(rows)), piv, len(piv)


def rank(m: FMatrix) -> int:
    ech = Echelon(m.field)
    for r in m.rows:
        ech.add(r)
    return ech.rank


def _kernel_from_rref(f: PrimeField, rows, piv, ncols) -> list:
    pivset = set(piv)
    out = []
    for free in range(ncols):
        if free in pivset:
            continue
        v = f.unit(free)
        for r, pc in enumerate(piv):
            c = f.coeff(rows[r], free)
            if c:
                v = f.axpy(v, -c, f.unit(pc))
        out.append(v)
    return out


def kernel_basis_packed(m: FMatrix) -> list:
    rows, piv = _rref_packed(m.field, m.rows, m.ncols)
    return _kernel_from_rref(m.field, rows, piv, m.ncols)


def kernel_basis(m: FMatrix) -> list[tuple[int, ...]]:
    """Basis of {v : m v = 0}, one vector per free column in increasing order."""
    f = m.field
    return [tuple(f.unpack(v, m.ncols)) for v in kernel_basis_packed(m)]


def solve_packed(m: FMatrix, b):
    """Packed particular solution of m x = b, or None."""
    f = m.field
    n = m.ncols
    colb = _transpose_packed(f, [b], m.nrows)  # b as a column, row by row
    aug = [f.add(r, f.shift(cb, n)) for r, cb in zip(m.rows, colb)]
    rows, piv = _rref_packed(f, aug, n + 1)
    if piv and piv[-1] == n:
        return None
    x = f.zero()
    for r, pc in enumerate(piv):
        c = f.coeff(rows[r], n)
        if c:
            x = f.axpy(x, c, f.unit(pc))
    return x


def solve(m: FMatrix, b: Sequence[int]):
    """Solve m x = b with free variables set to 0; None when inconsistent."""
    if len(b) != m.nrows:
        raise ValueError("right-hand side has the wrong length")
    f = m.field
    x = solve_packed(m, f.pack(b))
    if x is None:
        return None
    return tuple(f.unpack(x, m.ncols))


class Echelon:
    """Incremental echelon basis keyed by leading index.

    Each stored vector may carry a tag (another packed vector) that is
    transformed along with it, so that `express` can write a vector in terms
    of the vectors originally added.
    """

    def __init__(self, field: PrimeField):
        self.f = field
        self.piv = {}   # lead index -> (vector normalized to lead 1, tag)

    @property
    def rank(self) -> int:
        return len(self.piv)

    def reduce(self, v, tag=None):
        f = self.f
        if tag is None:
            tag = f.zero()
        piv = self.piv
        if f.p == 2:
            while v:
                low = v & -v
                hit = piv.get(low.bit_length() - 1)
                if hit is None:
                    break
                v ^= hit[0]
                tag ^= hit[1]
            return v, tag
        while v:
            lead = min(v)
            hit = piv.get(lead)
            if hit is None:
                break
            c = v[lead]
            v = f.axpy(v, -c, hit[0])
            tag = f.axpy(tag, -c, hit[1])
        return v, tag

    def _reduce_all(self, v, tag):
        """Reduce v against every stored pivot, not only at the front."""
        f = self.f
        for lead, (w, t) in self.piv.items():
            c = f.coeff(v, lead)
            if c:
                v = f.axpy(v, -c, w)
                tag = f.axpy(tag, -c, t)
        return v, tag

    def add(self, v, tag=None) -> bool:
        """Insert v; returns True when it enlarged the span."""
        f = self.f
        v, tag = self.reduce(v, tag)
        if not v:
            return False
        lead = f.lead(v)
        if f.p != 2:
            c = f.inv(v[lead])
            v = f.scale(c, v)
            tag = f.scale(c, tag)
        self.piv[lead] = (v, tag)
        return True

    def contains(self, v) -> bool:
        return not self.reduce(v)[0]

    def express(self, v):
        """Tag combination whose vectors sum to v, or None if v is outside the span.

        Assumes tags were unit vectors at insertion time.
        """
        f = self.f
        r, tag = self.reduce(v)
        if r:
            return None
        return f.scale(-1, tag) if f.p != 2 else tag

    def pivots(self) -> list[int]:
        return sorted(self.piv)

    def vectors(self) -> list:
        return [self.piv[k][0] for k in sorted(self.piv)]


def kernel_of_columns(f: PrimeField, cols: Sequence) -> list:
    """Kernel of the map whose i-th column is cols[i], as packed vectors over i.

    Uses tagged elimination; the i-th kernel vector found is attached to the
    first column that reduced to zero, so the order is deterministic.
    """
    ech = Echelon(f)
    out = []
    for i, c in enumerate(cols):
        r, tag = ech.reduce(c, f.unit(i))
        if r:
            lead = f.lead(r)
            if f.p != 2:
                s = f.inv(r[lead])
                r = f.scale(s, r)
                tag = f.scale(s, tag)
            ech.piv[lead] = (r, tag)
        else:
            out.append(tag)
    return out
