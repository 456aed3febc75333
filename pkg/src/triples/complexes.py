"""Cochain complexes, chain maps, cosimplicial objects and their totalizations.

Grading is cohomological throughout: differentials raise degree by one.
Sign conventions (recorded once, used by every module):

* bicomplex totalization: ``d = d_row + (-1)^p d_col`` where ``p`` is the
  index raised by ``d_row`` (the "row" direction) and ``d_col`` is the
  differential internal to each row;
* a cosimplicial object whose levels are complexes totalizes with
  ``d = sum_j (-1)^j coface_j + (-1)^n d_internal`` on cosimplicial level n.

Truncation bookkeeping: a complex built from truncated data carries
``top_truncated=True``; cohomology above ``reliable_up_to`` raises
:class:`TruncationError` instead of returning a silently wrong value.
"""

from __future__ import annotations

from .errors import (
    CompositionNotZero,
    CosimplicialIdentityError,
    DimensionMismatch,
    NotClosedUnderDifferential,
    TruncationError,
    ValidationError,
)
from .linalg import SparseMatrix, subquotient_dim

__all__ = [
    "GradedSpace",
    "CochainComplex",
    "ChainMap",
    "Operator",
    "Subspace",
    "CosimplicialComplex",
    "ConormalizedComplex",
    "cohomology_dims",
    "conormalize",
    "totalize_bicomplex",
    "joint_kernel_subcomplex",
    "verify_chain_map",
    "constrained_cohomology_dims",
    "quasi_isomorphism_report",
]


class GradedSpace:
    """Finite-dimensional graded vector space on degrees [lo, hi]."""

    __slots__ = ("lo", "hi", "dims", "labels")

    def __init__(self, lo, dims, labels=None):
        self.lo = lo
        self.dims = list(dims)
        self.hi = lo + len(self.dims) - 1
        if any(d < 0 for d in self.dims):
            raise ValidationError("negative dimension", witness=self.dims)
        if labels is not None:
            labels = {int(k): list(v) for k, v in labels.items()}
            for k, lv in labels.items():
                if len(lv) != self.dim(k):
                    raise DimensionMismatch(f"label count mismatch in degree {k}")
                if len(set(lv)) != len(lv):
                    raise ValidationError(f"duplicate labels in degree {k}")
        self.labels = labels

    def dim(self, n):
        if self.lo <= n <= self.hi:
            return self.dims[n - self.lo]
        return 0

    def degrees(self):
        return range(self.lo, self.hi + 1)

    def total_dim(self):
        return sum(self.dims)

    def __repr__(self):
        return f"<GradedSpace {self.lo}..{self.hi} dims={self.dims}>"


class CochainComplex:
    """Cochain complex with exact differentials, d.d = 0 checked on build.

    ``top_truncated`` marks a complex cut off above ``space.hi``: the top
    differential is then unknown and cohomology is reliable only up to
    ``space.hi - 1`` (or an explicitly tighter ``reliable_override``).
    """

    def __init__(self, field, space, diffs, top_truncated=False, reliable_override=None, check=True):
        self.field = field
        self.space = space
        self.diffs = dict(diffs)
        self.top_truncated = top_truncated
        self.reliable_override = reliable_override
        for n, m in self.diffs.items():
            if m.nrows != space.dim(n + 1) or m.ncols != space.dim(n):
                raise DimensionMismatch(
                    f"d^{n} has shape {m.nrows}x{m.ncols}, expected "
                    f"{space.dim(n + 1)}x{space.dim(n)}",
                    witness=n,
                )
        if check:
            for n in space.degrees():
                a, b = self.diff(n), self.diff(n + 1)
                if n + 1 > space.hi - 1 and top_truncated:
                    continue
                comp = b.mul(a)
                if not comp.is_zero():
                    i, j, v = next(comp.iter_entries())
                    raise CompositionNotZero(
                        f"d^{n + 1} . d^{n} nonzero at ({i},{j})", witness=(n, i, j, v)
                    )

    def dim(self, n):
        return self.space.dim(n)

    def diff(self, n):
        if n in self.diffs:
            return self.diffs[n]
        return SparseMatrix.zero(self.field, self.dim(n + 1), self.dim(n))

    def diff_known(self, n):
        """Whether d^n is the honest differential (not lost to truncation)."""
        if not self.top_truncated:
            return True
        return n < self.space.hi

    @property
    def reliable_up_to(self):
        r = self.space.hi - 1 if self.top_truncated else None
        if self.reliable_override is not None:
            r = self.reliable_override if r is None else min(r, self.reliable_override)
        return r

    def cohomology_dim(self, n):
        r = self.reliable_up_to
        if r is not None and n > r:
            raise TruncationError(
                f"H^{n} requested but complex only reliable up to degree {r}", witness=n
            )
        return subquotient_dim(self.diff(n - 1), self.diff(n))

    def cohomology_dims(self, lo, hi):
        return [self.cohomology_dim(n) for n in range(lo, hi + 1)]

    def euler_characteristic(self):
        return sum((-1) ** n * self.dim(n) for n in self.space.degrees())

    # -- textual serialization ----------------------------------------

    def to_text(self):
        from .linalg import PrimeField

        lines = []
        f = self.field
        lines.append("field " + (f"Fp {f.p}" if isinstance(f, PrimeField) else "Q"))
        lines.append(f"degrees {self.space.lo} {self.space.hi}")
        lines.append("dims " + " ".join(str(d) for d in self.space.dims))
        lines.append("truncated " + ("1" if self.top_truncated else "0"))
        for n in sorted(self.diffs):
            for i, j, v in self.diffs[n].iter_entries():
                lines.append(f"d {n} {i} {j} {f.fmt(v)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        from .linalg import GF, Q

        field = None
        lo = hi = None
        dims = []
        truncated = False
        entries = {}
        for raw in text.splitlines():
            parts = raw.split()
            if not parts:
                continue
            if parts[0] == "field":
                field = Q if parts[1] == "Q" else GF(int(parts[2]))
            elif parts[0] == "degrees":
                lo, hi = int(parts[1]), int(parts[2])
            elif parts[0] == "dims":
                dims = [int(x) for x in parts[1:]]
            elif parts[0] == "truncated":
                truncated = parts[1] == "1"
            elif parts[0] == "d":
                n, i, j = int(parts[1]), int(parts[2]), int(parts[3])
                entries.setdefault(n, []).append((i, j, field.parse(parts[4])))
            else:
                raise ValidationError(f"bad complex line {raw!r}")
        space = GradedSpace(lo, dims)
        diffs = {
            n: SparseMatrix.from_entries(field, space.dim(n + 1), space.dim(n), es)
            for n, es in entries.items()
        }
        return cls(field, space, diffs, top_truncated=truncated)


def cohomology_dims(c, lo, hi):
    """H^n dimension table for lo <= n <= hi."""
    return c.cohomology_dims(lo, hi)


class ChainMap:
    """Degreewise map of complexes; commutation with d is checked by verify()."""

    def __init__(self, source, target, components):
        self.source = source
        self.target = target
        self.components = dict(components)
        for n, m in self.components.items():
            if m.nrows != target.dim(n) or m.ncols != source.dim(n):
                raise DimensionMismatch(f"chain map component in degree {n} has wrong shape")

    def component(self, n):
        if n in self.components:
            return self.components[n]
        return SparseMatrix.zero(self.source.field, self.target.dim(n), self.source.dim(n))

    def verify(self):
        lo = min(self.source.space.lo, self.target.space.lo)
        hi = max(self.source.space.hi, self.target.space.hi)
        for n in range(lo, hi):
            if self.source.top_truncated and not self.source.diff_known(n):
                continue
            if self.target.top_truncated and not self.target.diff_known(n):
                continue
            left = self.target.diff(n).mul(self.component(n))
            right = self.component(n + 1).mul(self.source.diff(n))
            if left != right:
                return False, n
        return True, None

    def compose(self, other):
        """self . other (other applied first)."""
        comps = {}
        for n in range(
            min(self.source.space.lo, other.source.space.lo),
            max(self.source.space.hi, other.source.space.hi) + 1,
        ):
            m = self.component(n).mul(other.component(n))
            if not m.is_zero() or (m.nrows and m.ncols):
                comps[n] = m
        return ChainMap(other.source, self.target, comps)


def verify_chain_map(f):
    """True iff every square commutes; otherwise (False, first failing degree)."""
    return f.verify()


class Operator:
    """Degree-shifting operator family on one complex (e.g. contraction)."""

    def __init__(self, complex_, degree_shift, components):
        self.complex = complex_
        self.degree_shift = degree_shift
        self.components = dict(components)
        for n, m in self.components.items():
            if m.nrows != complex_.dim(n + degree_shift) or m.ncols != complex_.dim(n):
                raise DimensionMismatch(
                    f"operator component in degree {n} has wrong shape", witness=n
                )

    def component(self, n):
        if n in self.components:
            return self.components[n]
        return SparseMatrix.zero(
            self.complex.field, self.complex.dim(n + self.degree_shift), self.complex.dim(n)
        )


class Subspace:
    """Subspace of k^n presented by a basis in reduced (pivot) form.

    ``pivots[k]`` is a coordinate where basis vector k has entry 1 and all
    other basis vectors vanish; this lets us express any vector known to lie
    in the subspace by reading off its pivot coordinates.
    """

    def __init__(self, field, ambient_dim, vectors, pivots):
        self.field = field
        self.ambient_dim = ambient_dim
        self.vectors = vectors
        self.pivots = pivots
        self._matrix = None

    @classmethod
    def full(cls, field, n):
        one = field.one()
        return cls(field, n, [{i: one} for i in range(n)], list(range(n)))

    @classmethod
    def from_kernel_of(cls, field, ambient_dim, mats):
        """Joint kernel of the given matrices (all with ambient_dim columns)."""
        mats = [m for m in mats if m.nrows]
        if not mats:
            return cls.full(field, ambient_dim)
        stacked = SparseMatrix.vstack(mats) if len(mats) > 1 else mats[0]
        vecs = stacked.kernel_basis()
        return cls(field, ambient_dim, vecs, _identity_coords(field, vecs))

    @property
    def dim(self):
        return len(self.vectors)

    @property
    def matrix(self):
        if self._matrix is None:
            self._matrix = SparseMatrix.from_columns(
                self.field, self.ambient_dim, self.vectors
            )
        return self._matrix

    def coords_of(self, m, context=""):
        """Express the columns of ambient-valued m in subspace coordinates.

        Raises NotClosedUnderDifferential when a column is not in the span.
        """
        rows = {}
        for k, p in enumerate(self.pivots):
            r = m.rows.get(p)
            if r:
                rows[k] = dict(r)
        coords = SparseMatrix(self.field, self.dim, m.ncols, rows)
        if self.matrix.mul(coords) != m:
            raise NotClosedUnderDifferential(
                f"vector leaves the subspace{': ' + context if context else ''}",
                witness=context,
            )
        return coords


def _identity_coords(field, vecs):
    """Coordinates carrying the identity block of a reduced kernel basis."""
    one = field.one()
    counts = {}
    for v in vecs:
        for j, x in v.items():
            counts[j] = counts.get(j, 0) + 1
    pivots = []
    for k, v in enumerate(vecs):
        cands = [j for j, x in v.items() if x == one and counts[j] == 1]
        if not cands:
            raise ValidationError("kernel basis lost its identity block", witness=k)
        pivots.append(min(cands))
    return pivots


# ---------------------------------------------------------------------------
# Cosimplicial complexes
# ---------------------------------------------------------------------------


class CosimplicialComplex:
    """Cosimplicial object whose levels are cochain complexes.

    ``levels[n]`` for 0 <= n <= N; ``cofaces[n][j]`` (0 <= j <= n+1) maps
    level n to level n+1 and ``codegeneracies[n][j]`` (0 <= j <= n) maps
    level n+1 to level n.  All cosimplicial identities are verified at
    construction as exact matrix identities.
    """

    def __init__(self, levels, cofaces, codegeneracies, check=True):
        self.levels = list(levels)
        self.cofaces = [list(cf) for cf in cofaces]
        self.codegeneracies = [list(cd) for cd in codegeneracies]
        self.N = len(self.levels) - 1
        if len(self.cofaces) != max(self.N, 0) or len(self.codegeneracies) != max(self.N, 0):
            raise DimensionMismatch("coface/codegeneracy layers do not match level count")
        for n, cf in enumerate(self.cofaces):
            if len(cf) != n + 2:
                raise DimensionMismatch(f"level {n} must have {n + 2} cofaces")
        for n, cd in enumerate(self.codegeneracies):
            if len(cd) != n + 1:
                raise DimensionMismatch(f"level {n} must have {n + 1} codegeneracies")
        if check:
            self.verify_identities()
            self.verify_chain_maps()

    def coface(self, n, j):
        return self.cofaces[n][j]

    def codegeneracy(self, n, j):
        return self.codegeneracies[n][j]

    def verify_chain_maps(self):
        for n, cf in enumerate(self.cofaces):
            for j, f in enumerate(cf):
                ok, deg = f.verify()
                if not ok:
                    raise CosimplicialIdentityError(
                        f"coface {j} at level {n} is not a chain map (degree {deg})",
                        witness=("coface", n, j, deg),
                    )
        for n, cd in enumerate(self.codegeneracies):
            for j, f in enumerate(cd):
                ok, deg = f.verify()
                if not ok:
                    raise CosimplicialIdentityError(
                        f"codegeneracy {j} at level {n} is not a chain map (degree {deg})",
                        witness=("codegeneracy", n, j, deg),
                    )

    def verify_identities(self):
        def eq(f, g, tag):
            degs = set(f.components) | set(g.components)
            for k in degs:
                if f.component(k) != g.component(k):
                    raise CosimplicialIdentityError(
                        f"cosimplicial identity {tag} fails in internal degree {k}",
                        witness=(tag, k),
                    )

        # coface-coface: e_j e_i = e_i e_{j-1} for i < j
        for n in range(self.N - 1):
            for j in range(n + 3):
                for i in range(j):
                    eq(
                        self.coface(n + 1, j).compose(self.coface(n, i)),
                        self.coface(n + 1, i).compose(self.coface(n, j - 1)),
                        f"e^{j} e^{i} = e^{i} e^{j - 1} at level {n}",
                    )
        # codegeneracy-codegeneracy: h_j h_i = h_i h_{j+1} for i <= j
        for n in range(self.N - 1):
            for j in range(n + 1):
                for i in range(j + 1):
                    eq(
                        self.codegeneracy(n, j).compose(self.codegeneracy(n + 1, i)),
                        self.codegeneracy(n, i).compose(self.codegeneracy(n + 1, j + 1)),
                        f"h^{j} h^{i} = h^{i} h^{j + 1} at level {n}",
                    )
        # mixed: h_j e_i
        for n in range(self.N):
            for j in range(n + 1):
                for i in range(n + 2):
                    lhs = self.codegeneracy(n, j).compose(self.coface(n, i))
                    if i == j or i == j + 1:
                        lvl = self.levels[n]
                        ident = ChainMap(
                            lvl,
                            lvl,
                            {
                                k: SparseMatrix.identity(lvl.field, lvl.dim(k))
                                for k in lvl.space.degrees()
                                if lvl.dim(k)
                            },
                        )
                        eq(lhs, ident, f"h^{j} e^{i} = id at level {n}")
                    elif i < j:
                        if n == 0:
                            continue
                        eq(
                            lhs,
                            self.coface(n - 1, i).compose(self.codegeneracy(n - 1, j - 1)),
                            f"h^{j} e^{i} = e^{i} h^{j - 1} at level {n}",
                        )
                    else:  # i > j + 1
                        if n == 0:
                            continue
                        eq(
                            lhs,
                            self.coface(n - 1, i - 1).compose(self.codegeneracy(n - 1, j)),
                            f"h^{j} e^{i} = e^{i - 1} h^{j} at level {n}",
                        )

    @classmethod
    def plain(cls, field, dims, cofaces, codegeneracies, check=True):
        """Cosimplicial module of ungraded spaces (complexes sitting in degree 0)."""
        levels = [
            CochainComplex(field, GradedSpace(0, [d]), {}) for d in dims
        ]
        cf = [
            [ChainMap(levels[n], levels[n + 1], {0: m}) for m in row]
            for n, row in enumerate(cofaces)
        ]
        cd = [
            [ChainMap(levels[n + 1], levels[n], {0: m}) for m in row]
            for n, row in enumerate(codegeneracies)
        ]
        return cls(levels, cf, cd, check=check)


class ConormalizedComplex(CochainComplex):
    """Totalized conormalization of a cosimplicial complex.

    Keeps the block data: ``pieces[(n, k)]`` is the joint-kernel subspace of
    the codegeneracies inside level n, internal degree k, and ``blocks[m]``
    lists the (n, k, offset) triples making up total degree m.
    """

    def __init__(self, field, space, diffs, pieces, blocks, source, **kw):
        super().__init__(field, space, diffs, **kw)
        self.pieces = pieces
        self.blocks = blocks
        self.source = source

    def restrict_operator(self, level_op, internal_shift, degrees, context=""):
        """Restrict a levelwise ambient operator to the conormalized total complex.

        ``level_op(n, k)`` must return the ambient matrix from level n internal
        degree k to internal degree k + internal_shift.  Returns a dict of
        matrices Tot^m -> Tot^{m+internal_shift} for m in ``degrees``.
        """
        out = {}
        for m in degrees:
            src_blocks = self.blocks.get(m, [])
            tgt_blocks = self.blocks.get(m + internal_shift, [])
            tgt_off = {(n, k): off for n, k, off in tgt_blocks}
            rows = {}
            tdim = self.dim(m + internal_shift)
            for n, k, off in src_blocks:
                sub = self.pieces[(n, k)]
                amb = level_op(n, k)
                comp = amb.mul(sub.matrix)
                key = (n, k + internal_shift)
                if key not in tgt_off:
                    if not comp.is_zero():
                        raise NotClosedUnderDifferential(
                            f"operator image leaves materialized blocks at {key}",
                            witness=(context, key),
                        )
                    continue
                coords = self.pieces[key].coords_of(comp, context=context)
                o = tgt_off[key]
                for i, r in coords.rows.items():
                    dst = rows.setdefault(o + i, {})
                    for j, v in r.items():
                        dst[off + j] = v
            out[m] = SparseMatrix(self.field, tdim, self.dim(m), rows)
        return out


def conormalize(cs, reliable_override=None):
    """Joint kernel of all codegeneracies, totalized with the standard signs.

    Degrees above what the truncated input can support are not materialized;
    the result's ``reliable_up_to`` reflects both the cosimplicial truncation
    and any internal truncation of the levels.
    """
    if not cs.levels:
        raise ValidationError("empty cosimplicial object")
    field = cs.levels[0].field
    N = cs.N

    pieces = {}
    for n, lvl in enumerate(cs.levels):
        for k in lvl.space.degrees():
            if n == 0:
                pieces[(n, k)] = Subspace.full(field, lvl.dim(k))
            else:
                mats = [
                    cs.codegeneracy(n - 1, j).component(k)
                    for j in range(n)
                ]
                pieces[(n, k)] = Subspace.from_kernel_of(field, lvl.dim(k), mats)

    # reliability: total degree m is fully differentiated when every block
    # (n, k) with n + k = m has a coface layer above (n < N) and an honest
    # internal differential at k
    def d_complete(m):
        for n, lvl in enumerate(cs.levels):
            k = m - n
            if lvl.dim(k) == 0 or pieces[(n, k)].dim == 0:
                continue
            if n >= N:
                return False
            if not lvl.diff_known(k):
                return False
        return True

    lo = min(lvl.space.lo for lvl in cs.levels)
    hi_possible = max(n + lvl.space.hi for n, lvl in enumerate(cs.levels))
    reliable = lo - 1
    while reliable + 1 <= hi_possible and d_complete(reliable + 1):
        reliable += 1
    # H^m needs d^m and d^{m-1}: materialize degrees up to reliable + 1
    hi = min(hi_possible, reliable + 1)
    if reliable_override is not None:
        reliable = min(reliable, reliable_override)
        hi = min(hi, reliable + 1)

    blocks = {}
    dims = []
    for m in range(lo, hi + 1):
        off = 0
        bl = []
        for n, lvl in enumerate(cs.levels):
            k = m - n
            if n > N or lvl.dim(k) == 0:
                continue
            sub = pieces[(n, k)]
            if sub.dim == 0:
                continue
            bl.append((n, k, off))
            off += sub.dim
        blocks[m] = bl
        dims.append(off)

    space = GradedSpace(lo, dims)
    diffs = {}
    for m in range(lo, hi):
        tgt_blocks = {(n, k): off for n, k, off in blocks[m + 1]}
        rows = {}
        for n, k, off in blocks[m]:
            sub = pieces[(n, k)]
            lvl = cs.levels[n]
            # cosimplicial direction: sum_j (-1)^j coface_j, landing in (n+1, k)
            if n < N and (n + 1, k) in tgt_blocks:
                total = None
                for j in range(n + 2):
                    mat = cs.coface(n, j).component(k)
                    mat = mat if j % 2 == 0 else mat.neg()
                    total = mat if total is None else total.add(mat)
                comp = total.mul(sub.matrix)
                coords = pieces[(n + 1, k)].coords_of(comp, context=f"coface sum at (n={n},k={k})")
                o = tgt_blocks[(n + 1, k)]
                for i, r in coords.rows.items():
                    dst = rows.setdefault(o + i, {})
                    for j2, v in r.items():
                        dst[off + j2] = v
            # internal direction: (-1)^n d_internal, landing in (n, k+1)
            dint = lvl.diff(k)
            if (n, k + 1) in tgt_blocks and not dint.is_zero():
                comp = dint.mul(sub.matrix)
                if n % 2 == 1:
                    comp = comp.neg()
                coords = pieces[(n, k + 1)].coords_of(comp, context=f"internal d at (n={n},k={k})")
                o = tgt_blocks[(n, k + 1)]
                for i, r in coords.rows.items():
                    dst = rows.setdefault(o + i, {})
                    for j2, v in r.items():
                        dst[off + j2] = v
        diffs[m] = SparseMatrix(field, space.dim(m + 1), space.dim(m), rows)

    return ConormalizedComplex(
        field,
        space,
        diffs,
        pieces,
        blocks,
        cs,
        top_truncated=True,
        reliable_override=reliable,
    )


def totalize_bicomplex(rows, row_maps):
    """Total complex of a two-directional grid.

    ``rows[p]`` is the complex forming row p (its differential raises the
    internal degree q); ``row_maps[p]`` is a ChainMap rows[p] -> rows[p+1].
    Row maps must be chain maps composing to zero; the total differential is
    ``d_row + (-1)^p d_internal`` and d.d = 0 is re-checked on the result.
    """
    ps = sorted(rows)
    if not ps:
        raise ValidationError("empty bicomplex")
    field = rows[ps[0]].field
    for p in ps[:-1]:
        if p + 1 in rows and p in row_maps:
            ok, deg = row_maps[p].verify()
            if not ok:
                raise ValidationError(
                    f"row map {p} -> {p + 1} is not a chain map (degree {deg})",
                    witness=(p, deg),
                )
    for p in ps[:-2]:
        if p in row_maps and p + 1 in row_maps:
            comp = row_maps[p + 1].compose(row_maps[p])
            for k, m in comp.components.items():
                if not m.is_zero():
                    raise CompositionNotZero(
                        f"row maps do not compose to zero at row {p}, degree {k}",
                        witness=(p, k),
                    )

    lo = min(p + rows[p].space.lo for p in ps)
    hi = max(p + rows[p].space.hi for p in ps)
    blocks = {}
    dims = []
    for m in range(lo, hi + 1):
        off = 0
        bl = []
        for p in ps:
            q = m - p
            if rows[p].dim(q):
                bl.append((p, q, off))
                off += rows[p].dim(q)
        blocks[m] = bl
        dims.append(off)
    space = GradedSpace(lo, dims)
    diffs = {}
    for m in range(lo, hi):
        tgt = {(p, q): off for p, q, off in blocks[m + 1]}
        rowacc = {}

        def put(mat, roff, coff):
            for i, r in mat.rows.items():
                dst = rowacc.setdefault(roff + i, {})
                for j, v in r.items():
                    if coff + j in dst:
                        s = field.add(dst[coff + j], v)
                        if s == field.zero():
                            del dst[coff + j]
                        else:
                            dst[coff + j] = s
                    else:
                        dst[coff + j] = v

        for p, q, off in blocks[m]:
            if (p + 1, q) in tgt and p in row_maps:
                put(row_maps[p].component(q), tgt[(p + 1, q)], off)
            if (p, q + 1) in tgt:
                d = rows[p].diff(q)
                put(d if p % 2 == 0 else d.neg(), tgt[(p, q + 1)], off)
        diffs[m] = SparseMatrix(field, space.dim(m + 1), space.dim(m), rowacc)
    return CochainComplex(field, space, diffs)


class SubcomplexResult:
    def __init__(self, complex_, inclusion, subspaces):
        self.complex = complex_
        self.inclusion = inclusion
        self.subspaces = subspaces


def joint_kernel_subcomplex(c, ops):
    """Subcomplex spanned degreewise by the joint kernel of the operators.

    Verifies that the differential maps the span into itself (raising
    NotClosedUnderDifferential otherwise) and that the inclusion is a chain
    map.
    """
    field = c.field
    subs = {}
    for n in c.space.degrees():
        mats = [op.component(n) for op in ops]
        subs[n] = Subspace.from_kernel_of(field, c.dim(n), mats)
    dims = [subs[n].dim for n in c.space.degrees()]
    space = GradedSpace(c.space.lo, dims)
    diffs = {}
    for n in c.space.degrees():
        if n >= c.space.hi:
            continue
        comp = c.diff(n).mul(subs[n].matrix)
        diffs[n] = subs[n + 1].coords_of(comp, context=f"differential at degree {n}")
    sub = CochainComplex(
        field,
        space,
        diffs,
        top_truncated=c.top_truncated,
        reliable_override=c.reliable_override,
    )
    incl = ChainMap(sub, c, {n: subs[n].matrix for n in c.space.degrees()})
    ok, deg = incl.verify()
    if not ok:
        raise NotClosedUnderDifferential(
            f"inclusion fails to commute with d in degree {deg}", witness=deg
        )
    return SubcomplexResult(sub, incl, subs)


def constrained_cohomology_dims(c, constraints, maxdeg, lo=0):
    """Cohomology of the subcomplex cut out by linear constraints.

    ``constraints[m]`` is a list of matrices on C^m whose joint kernel is the
    degree-m piece.  The top-degree piece at maxdeg+1 is never materialized:
    the last differential is handled as a composite into the ambient space,
    with closure still verified via the ambient constraint matrices.  This is
    what makes desk-scale group cohomology affordable.
    """
    r = c.reliable_up_to
    if r is not None and maxdeg > r:
        raise TruncationError(
            f"H^{maxdeg} requested but complex reliable only up to {r}", witness=maxdeg
        )
    field = c.field
    subs = {}
    for m in range(lo, maxdeg + 1):
        subs[m] = Subspace.from_kernel_of(field, c.dim(m), constraints.get(m, []))
    dsub = {}
    for m in range(lo, maxdeg):
        comp = c.diff(m).mul(subs[m].matrix)
        dsub[m] = subs[m + 1].coords_of(comp, context=f"constrained d at degree {m}")
    top = c.diff(maxdeg).mul(subs[maxdeg].matrix)
    for cm in constraints.get(maxdeg + 1, []):
        if not cm.mul(top).is_zero():
            raise NotClosedUnderDifferential(
                "top differential leaves the constrained subspace", witness=maxdeg
            )
    if not c.diff(lo - 1).is_zero():
        raise ValidationError("constrained_cohomology_dims requires lo at the bottom")
    dims = []
    prev_rank = 0
    for m in range(lo, maxdeg + 1):
        d_m = dsub[m] if m < maxdeg else top
        rk = d_m.rank()
        dims.append((subs[m].dim - rk) - prev_rank)
        prev_rank = rk
    return dims


def quasi_isomorphism_report(f, lo, hi):
    """Check that a chain map induces isomorphisms on H^n for lo <= n <= hi.

    Returns (ok, per-degree report).  Rank computations only; no choices of
    representatives are made.
    """
    src, tgt = f.source, f.target
    report = []
    ok = True
    for n in range(lo, hi + 1):
        hs = src.cohomology_dim(n)
        ht = tgt.cohomology_dim(n)
        z = SparseMatrix.from_columns(
            src.field, src.dim(n), src.diff(n).kernel_basis()
        )
        fz = f.component(n).mul(z)
        b = tgt.diff(n - 1)
        stacked = SparseMatrix.hstack([fz, b]) if b.ncols else fz
        induced_rank = stacked.rank() - b.rank()
        injective = induced_rank == hs
        iso = injective and hs == ht
        report.append(
            {
                "degree": n,
                "H_source": hs,
                "H_target": ht,
                "induced_rank": induced_rank,
                "isomorphism": iso,
            }
        )
        ok = ok and iso
    return ok, report
