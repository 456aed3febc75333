"""Exact scalars and sparse linear algebra over Q and F_p.

Every cohomology number in this package comes out of :func:`rank`,
:func:`kernel_basis` and :func:`subquotient_dim` below; floating point is
never used.  Over Q the elimination is fraction-free: rows are scaled to
primitive integer vectors and updated by cross-multiplication, with the
content gcd divided out after every update to control coefficient growth.
Over F_p it is plain Gaussian elimination on residues.

Scalars are raw Python values (``fractions.Fraction`` for Q, ``int`` in
``[0, p)`` for F_p); a :class:`Field` object supplies the arithmetic.  The
rational literal syntax used by all file formats is ``"a/b"`` with ``/b``
omitted when the denominator is 1; F_p elements are decimal integers.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from .errors import CompositionNotZero, DimensionMismatch, ValidationError

__all__ = [
    "Q",
    "GF",
    "Field",
    "SparseMatrix",
    "rank",
    "kernel_basis",
    "compose",
    "subquotient_dim",
]


class Field:
    """Exact field interface; concrete instances are Q and GF(p)."""

    def zero(self):
        raise NotImplementedError

    def one(self):
        raise NotImplementedError

    def add(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def from_int(self, n):
        raise NotImplementedError

    def coerce(self, x):
        raise NotImplementedError

    def parse(self, s):
        raise NotImplementedError

    def fmt(self, a):
        raise NotImplementedError


class RationalField(Field):
    """The rationals.

    Values are ints whenever integral and ``Fraction`` otherwise (both are
    exact; mixed arithmetic stays exact and the integer fast path is what
    keeps the permutation-heavy matrices cheap).
    """

    characteristic = 0

    def zero(self):
        return 0

    def one(self):
        return 1

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in Q")
        if isinstance(a, int):
            return 1 if a == 1 else (-1 if a == -1 else Fraction(1, a))
        r = 1 / a
        return r.numerator if r.denominator == 1 else r

    def from_int(self, n):
        return n

    def coerce(self, x):
        if isinstance(x, int):
            return x
        if isinstance(x, Fraction):
            return x.numerator if x.denominator == 1 else x
        raise ValidationError(f"cannot coerce {x!r} into Q", witness=x)

    def parse(self, s):
        return self.coerce(Fraction(s.strip()))

    def fmt(self, a):
        return str(a)

    def __repr__(self):
        return "Q"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("Q")


class PrimeField(Field):
    """F_p for a prime p; values are ints in [0, p)."""

    def __init__(self, p):
        if p < 2 or any(p % d == 0 for d in range(2, int(p**0.5) + 1)):
            raise ValidationError(f"modulus {p} is not prime", witness=p)
        self.p = p
        self.characteristic = p

    def zero(self):
        return 0

    def one(self):
        return 1

    def add(self, a, b):
        return (a + b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError(f"inverse of 0 in F_{self.p}")
        return pow(a, -1, self.p)

    def from_int(self, n):
        return n % self.p

    def coerce(self, x):
        if isinstance(x, int):
            return x % self.p
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ValidationError(
                    f"denominator of {x} not invertible mod {self.p}", witness=x
                )
            return (x.numerator * pow(x.denominator, -1, self.p)) % self.p
        raise ValidationError(f"cannot coerce {x!r} into F_{self.p}", witness=x)

    def parse(self, s):
        return int(s.strip()) % self.p

    def fmt(self, a):
        return str(a % self.p)

    def __repr__(self):
        return f"F{self.p}"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("Fp", self.p))


Q = RationalField()

_GF_CACHE = {}


def GF(p):
    """The prime field F_p (cached)."""
    if p not in _GF_CACHE:
        _GF_CACHE[p] = PrimeField(p)
    return _GF_CACHE[p]


def parse_field(spec):
    """Parse a scalar-field description: "Q", "Fp:5", or {"Fp": 5}."""
    if isinstance(spec, dict):
        if "Fp" in spec:
            return GF(int(spec["Fp"]))
        raise ValidationError(f"unknown scalar spec {spec!r}", witness=spec)
    s = str(spec).strip()
    if s in ("Q", "QQ", "q"):
        return Q
    if s.lower().startswith("fp:"):
        return GF(int(s[3:]))
    raise ValidationError(f"unknown scalar spec {spec!r}", witness=spec)


class SparseMatrix:
    """Immutable-by-convention sparse matrix (dict-of-rows, no stored zeros).

    Rows and columns are 0-indexed.  All operations are pure; nothing
    mutates a matrix after construction.
    """

    __slots__ = ("field", "nrows", "ncols", "rows")

    def __init__(self, field, nrows, ncols, rows=None):
        self.field = field
        self.nrows = nrows
        self.ncols = ncols
        self.rows = rows if rows is not None else {}

    # -- constructors ------------------------------------------------

    @classmethod
    def from_entries(cls, field, nrows, ncols, entries):
        """Build from (row, col, scalar) triples; duplicates are an error."""
        rows = {}
        for i, j, v in entries:
            if not (0 <= i < nrows and 0 <= j < ncols):
                raise DimensionMismatch(
                    f"entry ({i},{j}) out of range {nrows}x{ncols}", witness=(i, j)
                )
            v = field.coerce(v)
            r = rows.setdefault(i, {})
            if j in r:
                raise ValidationError(f"duplicate entry at ({i},{j})", witness=(i, j))
            if v != field.zero():
                r[j] = v
        return cls(field, nrows, ncols, {i: r for i, r in rows.items() if r})

    @classmethod
    def from_dense(cls, field, lists):
        nrows = len(lists)
        ncols = len(lists[0]) if nrows else 0
        rows = {}
        zero = field.zero()
        for i, row in enumerate(lists):
            if len(row) != ncols:
                raise DimensionMismatch("ragged dense matrix", witness=i)
            r = {}
            for j, v in enumerate(row):
                v = field.coerce(v)
                if v != zero:
                    r[j] = v
            if r:
                rows[i] = r
        return cls(field, nrows, ncols, rows)

    @classmethod
    def identity(cls, field, n):
        one = field.one()
        return cls(field, n, n, {i: {i: one} for i in range(n)})

    @classmethod
    def zero(cls, field, nrows, ncols):
        return cls(field, nrows, ncols, {})

    @classmethod
    def vstack(cls, mats):
        if not mats:
            raise ValidationError("vstack of nothing")
        field, ncols = mats[0].field, mats[0].ncols
        rows = {}
        off = 0
        for m in mats:
            if m.ncols != ncols:
                raise DimensionMismatch("vstack column mismatch")
            for i, r in m.rows.items():
                rows[off + i] = dict(r)
            off += m.nrows
        return cls(field, off, ncols, rows)

    @classmethod
    def hstack(cls, mats):
        if not mats:
            raise ValidationError("hstack of nothing")
        field, nrows = mats[0].field, mats[0].nrows
        rows = {}
        off = 0
        for m in mats:
            if m.nrows != nrows:
                raise DimensionMismatch("hstack row mismatch")
            for i, r in m.rows.items():
                dst = rows.setdefault(i, {})
                for j, v in r.items():
                    dst[off + j] = v
            off += m.ncols
        return cls(field, nrows, off, rows)

    @classmethod
    def from_columns(cls, field, nrows, cols):
        """Matrix whose j-th column is the sparse vector cols[j] (a dict)."""
        rows = {}
        for j, vec in enumerate(cols):
            for i, v in vec.items():
                rows.setdefault(i, {})[j] = v
        return cls(field, nrows, len(cols), rows)

    # -- inspection --------------------------------------------------

    def entry(self, i, j):
        return self.rows.get(i, {}).get(j, self.field.zero())

    def iter_entries(self):
        for i in sorted(self.rows):
            r = self.rows[i]
            for j in sorted(r):
                yield i, j, r[j]

    @property
    def nnz(self):
        return sum(len(r) for r in self.rows.values())

    def is_zero(self):
        return not self.rows

    def column(self, j):
        return {i: r[j] for i, r in self.rows.items() if j in r}

    def to_dense(self):
        z = self.field.zero()
        out = [[z] * self.ncols for _ in range(self.nrows)]
        for i, r in self.rows.items():
            for j, v in r.items():
                out[i][j] = v
        return out

    def __eq__(self, other):
        return (
            isinstance(other, SparseMatrix)
            and self.field == other.field
            and self.nrows == other.nrows
            and self.ncols == other.ncols
            and self.rows == other.rows
        )

    def __hash__(self):
        raise TypeError("SparseMatrix is not hashable")

    def __repr__(self):
        return f"<SparseMatrix {self.nrows}x{self.ncols} over {self.field!r}, nnz={self.nnz}>"

    # -- arithmetic --------------------------------------------------

    def transpose(self):
        rows = {}
        for i, r in self.rows.items():
            for j, v in r.items():
                rows.setdefault(j, {})[i] = v
        return SparseMatrix(self.field, self.ncols, self.nrows, rows)

    def mul(self, other):
        """Matrix product self . other."""
        if self.ncols != other.nrows:
            raise DimensionMismatch(
                f"cannot compose {self.nrows}x{self.ncols} with {other.nrows}x{other.ncols}"
            )
        f = self.field
        zero = f.zero()
        out = {}
        orows = other.rows
        for i, r in self.rows.items():
            acc = {}
            for j, a in r.items():
                br = orows.get(j)
                if not br:
                    continue
                for k, b in br.items():
                    ab = f.mul(a, b)
                    if k in acc:
                        s = f.add(acc[k], ab)
                        if s == zero:
                            del acc[k]
                        else:
                            acc[k] = s
                    elif ab != zero:
                        acc[k] = ab
            if acc:
                out[i] = acc
        return SparseMatrix(f, self.nrows, other.ncols, out)

    def add(self, other):
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise DimensionMismatch("add shape mismatch")
        f = self.field
        zero = f.zero()
        out = {i: dict(r) for i, r in self.rows.items()}
        for i, r in other.rows.items():
            dst = out.setdefault(i, {})
            for j, v in r.items():
                if j in dst:
                    s = f.add(dst[j], v)
                    if s == zero:
                        del dst[j]
                    else:
                        dst[j] = s
                else:
                    dst[j] = v
            if not dst:
                del out[i]
        return SparseMatrix(f, self.nrows, self.ncols, out)

    def scale(self, c):
        f = self.field
        c = f.coerce(c)
        if c == f.zero():
            return SparseMatrix(f, self.nrows, self.ncols, {})
        return SparseMatrix(
            f,
            self.nrows,
            self.ncols,
            {i: {j: f.mul(c, v) for j, v in r.items()} for i, r in self.rows.items()},
        )

    def neg(self):
        f = self.field
        return SparseMatrix(
            f,
            self.nrows,
            self.ncols,
            {i: {j: f.neg(v) for j, v in r.items()} for i, r in self.rows.items()},
        )

    def sub(self, other):
        return self.add(other.neg())

    def apply(self, vec):
        """Matrix-vector product on a sparse dict vector."""
        f = self.field
        zero = f.zero()
        out = {}
        for i, r in self.rows.items():
            s = zero
            for j, a in r.items():
                if j in vec:
                    s = f.add(s, f.mul(a, vec[j]))
            if s != zero:
                out[i] = s
        return out

    # -- linear algebra ----------------------------------------------

    def rank(self):
        return _rank(self)

    def kernel_basis(self):
        return _kernel_basis(self)


# ---------------------------------------------------------------------------
# Elimination engines
# ---------------------------------------------------------------------------


def _scale_row_to_int(row):
    """Primitive integer vector spanning the same line as a Fraction row."""
    if not row:
        return {}
    lcm = 1
    for v in row.values():
        d = v.denominator
        lcm = lcm * d // gcd(lcm, d)
    g = 0
    ints = {}
    for j, v in row.items():
        n = int(v * lcm)
        ints[j] = n
        g = gcd(g, n)
    if g > 1:
        for j in ints:
            ints[j] //= g
    return ints


_GROWTH_BOUND = 1 << 64


def _reduce_content(row):
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        for j in row:
            row[j] //= g
    return row


def _eliminate_int(target, pivot, c):
    """target := pivot[c]*target - target[c]*pivot (fraction-free).

    The content gcd is divided out once entries grow beyond a fixed bound;
    rows only matter up to scale here (rank/kernel), so this is sound and
    keeps coefficient growth in check without paying for a gcd per step.
    """
    a = pivot[c]
    b = target[c]
    out = {}
    big = False
    if a == 1:
        out = dict(target)
    elif a == -1:
        out = {j: -v for j, v in target.items()}
    else:
        for j, v in target.items():
            w = a * v
            out[j] = w
            if w > _GROWTH_BOUND or -w > _GROWTH_BOUND:
                big = True
    for j, v in pivot.items():
        w = out.get(j, 0) - b * v
        if w:
            out[j] = w
            if w > _GROWTH_BOUND or -w > _GROWTH_BOUND:
                big = True
        elif j in out:
            del out[j]
    return _reduce_content(out) if big else out


def _eliminate_mod(target, pivot, c, field):
    a = field.inv(pivot[c])
    b = field.mul(target[c], a)
    p = field.p
    out = {}
    for j, v in target.items():
        out[j] = v
    for j, v in pivot.items():
        w = (out.get(j, 0) - b * v) % p
        if w:
            out[j] = w
        elif j in out:
            del out[j]
    return out


def _forward_echelon(field, raw_rows):
    """Sparse forward elimination.

    Returns (pivots, rows) where pivots is an ordered dict col -> row index
    into rows, and each returned row has its leading entry at its pivot
    column.  Over Q the rows are primitive integer dicts.
    """
    rational = isinstance(field, RationalField)
    if rational:
        rows = [_scale_row_to_int(r) for r in raw_rows]
    else:
        rows = [dict(r) for r in raw_rows]
    buckets = {}
    for r in rows:
        if r:
            buckets.setdefault(min(r), []).append(r)
    pivots = {}
    echelon = []
    while buckets:
        c = min(buckets)
        cand = buckets.pop(c)
        cand.sort(key=len)
        pivot = cand[0]
        pivots[c] = len(echelon)
        echelon.append(pivot)
        for r in cand[1:]:
            if rational:
                r2 = _eliminate_int(r, pivot, c)
            else:
                r2 = _eliminate_mod(r, pivot, c, field)
            if r2:
                buckets.setdefault(min(r2), []).append(r2)
    return pivots, echelon


def _back_eliminate(field, pivots, echelon):
    """Clear entries above every pivot (takes forward-echelon data).

    Uses a column-occurrence index so the cost is linear in the fill-in;
    after this pass each pivot row contains its pivot and free columns only.
    """
    rational = isinstance(field, RationalField)
    occ = {}
    for rid, row in enumerate(echelon):
        for j in row:
            occ.setdefault(j, []).append(rid)
    for c in sorted(pivots, reverse=True):
        prid = pivots[c]
        prow = echelon[prid]
        for rid in occ.get(c, ()):
            if rid == prid:
                continue
            row = echelon[rid]
            if c not in row:
                continue  # stale occurrence
            before = set(row)
            if rational:
                row2 = _eliminate_int(row, prow, c)
            else:
                row2 = _eliminate_mod(row, prow, c, field)
            echelon[rid] = row2
            for j in set(row2) - before:
                occ.setdefault(j, []).append(rid)
    return pivots, echelon


def _rank(m):
    pivots, _ = _forward_echelon(m.field, m.rows.values())
    return len(pivots)


def _kernel_basis(m):
    """Basis of the right null space {v : m.v = 0}.

    Vectors come back as sparse dicts; the basis is in reduced form with
    the free coordinates carrying an identity block (vector k has entry 1
    at the k-th free column and zeroes at the other free columns), which
    downstream code relies on to express vectors in subspace coordinates.
    """
    field = m.field
    pivots, echelon = _forward_echelon(field, m.rows.values())
    _back_eliminate(field, pivots, echelon)
    rational = isinstance(field, RationalField)
    free_index = {}
    free_cols = []
    for j in range(m.ncols):
        if j not in pivots:
            free_index[j] = len(free_cols)
            free_cols.append(j)
    one = field.one()
    basis = [{f: one} for f in free_cols]
    for c, rid in pivots.items():
        row = echelon[rid]
        pv = row[c]
        for j, val in row.items():
            if j == c:
                continue
            if rational:
                q, r = divmod(-val, pv)
                x = q if r == 0 else Fraction(-val, pv)
            else:
                x = field.mul(field.neg(val), field.inv(pv))
            if x != field.zero():
                basis[free_index[j]][c] = x
    return basis


# ---------------------------------------------------------------------------
# Spec-level operations
# ---------------------------------------------------------------------------


def rank(m):
    """Exact rank of a sparse matrix."""
    return m.rank()


def kernel_basis(m):
    """Basis of the right null space; length == cols - rank."""
    return m.kernel_basis()


def compose(a, b):
    """Exact product a.b (dimension-checked)."""
    return a.mul(b)


def subquotient_dim(d_in, d_out):
    """dim ker(d_out) - rank(d_in), after checking d_out . d_in = 0."""
    comp = d_out.mul(d_in)
    if not comp.is_zero():
        i, j, v = next(comp.iter_entries())
        raise CompositionNotZero(
            f"d_out . d_in has nonzero entry {v} at ({i},{j})", witness=(i, j, v)
        )
    return (d_out.ncols - d_out.rank()) - d_in.rank()
