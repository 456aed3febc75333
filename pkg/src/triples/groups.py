"""Finite groups, their module categories, and group cohomology.

Two monads on right modules are implemented:

* the translation monad T(V) = Map(G, V) with right structure
  ``(a . x)(y) = a(xy)`` (left translation in the argument), unit
  ``u_v(x) = v x`` and composition ``mu(F)(x) = F(x)(e)``;
* the diagonal monad U(V) = Map(G, V) with right structure
  ``(r . x)(y) = r(xy) x``, constant unit and composition
  ``nu(P)(x) = P(x)(x)``.

Group elements are indices into the Cayley table.  The action side is
explicit everywhere (the left/right dichotomy is a real bug source); right
modules store matrices with ``M[xy] = M[y] M[x]``, left modules with
``M[xy] = M[x] M[y]``, both acting on column vectors.

Cohomology is computed as the cohomology of the G-fixed part of the
conormalized dual standard construction.  Fixed points are kernels of
``action(x) - 1`` over a generating set, and the top degree is handled as a
composite into the ambient space so its fixed-point basis is never
materialized (the |G|^(n+1) blowup makes that matter).
"""

from __future__ import annotations

from .complexes import (
    ChainMap,
    CochainComplex,
    constrained_cohomology_dims,
    conormalize,
    GradedSpace,
    joint_kernel_subcomplex,
    Operator,
)
from .errors import (
    GroupAxiomError,
    ModuleAxiomError,
    SizeLimitError,
    ValidationError,
)
from .linalg import Q, SparseMatrix
from .monadics import MonadInstance, dual_standard_construction, partial_products

MAX_GROUP_ORDER = 24
# 12^5 = 248832 must fit: degree-3 cohomology of the order-12 groups needs
# the fifth functor power of the trivial module
MAX_CONSTRUCTION_DIM = 250_000


class FiniteGroup:
    """Group given by its Cayley table; all axioms verified exhaustively."""

    def __init__(self, table, name="G", element_names=None, check=True):
        self.table = [list(r) for r in table]
        self.order = len(self.table)
        self.name = name
        self.element_names = element_names
        if self.order > MAX_GROUP_ORDER:
            raise SizeLimitError(
                f"group order {self.order} exceeds the desk-scale bound {MAX_GROUP_ORDER}"
            )
        if check:
            self._validate()
        self.identity = self._find_identity()
        self.inverses = self._find_inverses()
        self._generators = None

    def _validate(self):
        n = self.order
        for i, row in enumerate(self.table):
            if len(row) != n:
                raise GroupAxiomError(f"Cayley row {i} has wrong length", witness=i)
            for j, v in enumerate(row):
                if not (0 <= v < n):
                    raise GroupAxiomError(
                        f"Cayley entry at ({i},{j}) out of range", witness=(i, j)
                    )
        t = self.table
        for i in range(n):
            for j in range(n):
                tij = t[i][j]
                for k in range(n):
                    if t[tij][k] != t[i][t[j][k]]:
                        raise GroupAxiomError(
                            f"associativity violated at ({i},{j},{k})", witness=(i, j, k)
                        )

    def _find_identity(self):
        n = self.order
        for e in range(n):
            if all(self.table[e][x] == x and self.table[x][e] == x for x in range(n)):
                return e
        raise GroupAxiomError("no identity element", witness=None)

    def _find_inverses(self):
        n, e = self.order, self.identity
        inv = [None] * n
        for x in range(n):
            for y in range(n):
                if self.table[x][y] == e and self.table[y][x] == e:
                    inv[x] = y
                    break
            if inv[x] is None:
                raise GroupAxiomError(f"element {x} has no inverse", witness=x)
        return inv

    def mult(self, a, b):
        return self.table[a][b]

    def inverse(self, a):
        return self.inverses[a]

    def generators(self):
        """Deterministic greedy generating set (identity group gives [])."""
        if self._generators is None:
            gens = []
            closure = {self.identity}
            while len(closure) < self.order:
                x = min(set(range(self.order)) - closure)
                gens.append(x)
                frontier = [x]
                while frontier:
                    z = frontier.pop()
                    for w in list(closure) + [z]:
                        for prod in (self.mult(z, w), self.mult(w, z)):
                            if prod not in closure:
                                closure.add(prod)
                                frontier.append(prod)
                    if z not in closure:
                        closure.add(z)
            self._generators = gens
        return self._generators

    def __repr__(self):
        return f"<FiniteGroup {self.name} of order {self.order}>"

    # -- constructors -------------------------------------------------

    @classmethod
    def from_table(cls, table, name="G"):
        return cls(table, name=name)

    @classmethod
    def trivial(cls):
        return cls([[0]], name="1")

    @classmethod
    def cyclic(cls, n):
        return cls(
            [[(i + j) % n for j in range(n)] for i in range(n)], name=f"C{n}"
        )

    @classmethod
    def dihedral(cls, n):
        """Dihedral group of order 2n; element a + n*b is r^a s^b."""

        def mul(x, y):
            a, b = x % n, x // n
            c, d = y % n, y // n
            if b == 0:
                return (a + c) % n + n * d
            return (a - c) % n + n * (1 - d)

        table = [[mul(x, y) for y in range(2 * n)] for x in range(2 * n)]
        return cls(table, name=f"D{n}")

    @classmethod
    def symmetric(cls, n):
        import itertools

        perms = sorted(itertools.permutations(range(n)))
        index = {p: i for i, p in enumerate(perms)}
        table = [
            [index[tuple(p[q[i]] for i in range(n))] for q in perms] for p in perms
        ]
        return cls(table, name=f"S{n}", element_names=perms)

    @classmethod
    def alternating(cls, n):
        import itertools

        def parity(p):
            inv = sum(
                1
                for i in range(len(p))
                for j in range(i + 1, len(p))
                if p[i] > p[j]
            )
            return inv % 2

        perms = sorted(p for p in itertools.permutations(range(n)) if parity(p) == 0)
        index = {p: i for i, p in enumerate(perms)}
        table = [
            [index[tuple(p[q[i]] for i in range(n))] for q in perms] for p in perms
        ]
        return cls(table, name=f"A{n}", element_names=perms)

    @classmethod
    def dicyclic(cls, n):
        """Dicyclic group of order 4n (n=2 gives the quaternion group Q8)."""
        m = 2 * n

        def mul(x, y):
            k, j = x % m, x // m
            l, i = y % m, y // m
            if j == 0:
                return (k + l) % m + m * i
            if i == 0:
                return (k - l) % m + m
            return (k - l + n) % m

        table = [[mul(x, y) for y in range(4 * n)] for x in range(4 * n)]
        return cls(table, name=f"Dic{n}")

    @classmethod
    def direct_product(cls, g, h):
        ng, nh = g.order, h.order

        def mul(x, y):
            a, b = divmod(x, nh)
            c, d = divmod(y, nh)
            return g.mult(a, c) * nh + h.mult(b, d)

        table = [[mul(x, y) for y in range(ng * nh)] for x in range(ng * nh)]
        return cls(table, name=f"{g.name}x{h.name}")


def all_groups_of_order_at_most(n):
    """The classification catalog for n <= 12 (24 groups at n = 12)."""
    if n > 12:
        raise ValidationError("catalog only covers order <= 12")
    G = FiniteGroup
    out = []
    for k in range(1, n + 1):
        out.append(G.cyclic(k))
        if k == 4:
            out.append(G.direct_product(G.cyclic(2), G.cyclic(2)))
        if k == 6:
            out.append(G.symmetric(3))
        if k == 8:
            out.append(G.direct_product(G.cyclic(4), G.cyclic(2)))
            out.append(
                G.direct_product(G.direct_product(G.cyclic(2), G.cyclic(2)), G.cyclic(2))
            )
            out.append(G.dihedral(4))
            out.append(G.dicyclic(2))
        if k == 9:
            out.append(G.direct_product(G.cyclic(3), G.cyclic(3)))
        if k == 10:
            out.append(G.dihedral(5))
        if k == 12:
            out.append(G.direct_product(G.cyclic(6), G.cyclic(2)))
            out.append(G.dihedral(6))
            out.append(G.alternating(4))
            out.append(G.dicyclic(3))
    return [g for g in out if g.order <= n]


# ---------------------------------------------------------------------------
# Modules
# ---------------------------------------------------------------------------


class GObj:
    """A complex of G-modules: cochain complex plus degreewise action.

    ``action(x)`` returns {degree: matrix}; built lazily for functor images
    (where only generators are ever requested) and eagerly for user input.
    """

    def __init__(self, group, complex_, side, action_fn, labels=None):
        self.group = group
        self.complex = complex_
        self.side = side
        self._action_fn = action_fn
        self._cache = {}
        self.labels = labels

    def action(self, x):
        if x not in self._cache:
            self._cache[x] = self._action_fn(x)
        return self._cache[x]

    def action_matrix(self, x, n):
        a = self.action(x)
        if n in a:
            return a[n]
        return SparseMatrix.zero(self.complex.field, self.complex.dim(n), self.complex.dim(n))

    def dim(self, n):
        return self.complex.dim(n)


class GModule:
    """G-module in a single degree; matrices act on column vectors."""

    def __init__(self, group, field, matrices, side="right", check=True):
        self.group = group
        self.field = field
        self.action = list(matrices)
        self.side = side
        self.dim = self.action[0].nrows if self.action else 0
        if len(self.action) != group.order:
            raise ModuleAxiomError("need one matrix per group element")
        if check:
            self._validate()

    def _validate(self):
        g, e = self.group, self.group.identity
        ident = SparseMatrix.identity(self.field, self.dim)
        if self.action[e] != ident:
            raise ModuleAxiomError("identity does not act as the identity matrix", witness=e)
        for x in range(g.order):
            if self.action[x].mul(self.action[g.inverse(x)]) != ident:
                raise ModuleAxiomError(f"action of element {x} is not invertible", witness=x)
        for x in range(g.order):
            for y in range(g.order):
                xy = g.mult(x, y)
                if self.side == "right":
                    expected = self.action[y].mul(self.action[x])
                else:
                    expected = self.action[x].mul(self.action[y])
                if self.action[xy] != expected:
                    raise ModuleAxiomError(
                        f"{self.side} module law fails at ({x},{y})", witness=(x, y)
                    )

    def as_obj(self):
        cx = CochainComplex(self.field, GradedSpace(0, [self.dim]), {})
        return GObj(self.group, cx, self.side, lambda x: {0: self.action[x]})

    # -- constructors -------------------------------------------------

    @classmethod
    def trivial(cls, group, field, dim=1):
        ident = SparseMatrix.identity(field, dim)
        return cls(group, field, [ident] * group.order, side="right", check=False)

    @classmethod
    def regular(cls, group, field, side="right"):
        mats = []
        for x in range(group.order):
            if side == "right":
                entries = [(group.mult(y, x), y, field.one()) for y in range(group.order)]
            else:
                entries = [(group.mult(x, y), y, field.one()) for y in range(group.order)]
            mats.append(
                SparseMatrix.from_entries(field, group.order, group.order, entries)
            )
        return cls(group, field, mats, side=side)

    @classmethod
    def character(cls, group, field, values, side="right"):
        mats = [
            SparseMatrix.from_entries(field, 1, 1, [(0, 0, v)] if field.coerce(v) != field.zero() else [])
            for v in values
        ]
        return cls(group, field, mats, side=side)

    @classmethod
    def sign_of_z2(cls, group, field):
        """The sign character of C2 (trivial in characteristic 2)."""
        if group.order != 2:
            raise ValidationError("sign_of_z2 needs the order-2 group")
        return cls.character(group, field, [field.one(), field.neg(field.one())])

    @classmethod
    def standard_representation(cls, sym, field, side="right"):
        """The (n-1)-dimensional standard representation of S_n."""
        perms = sym.element_names
        if perms is None:
            raise ValidationError("standard representation needs a permutation-presented group")
        n = len(perms[0])
        one = field.one()

        def diff_coords(a, b):
            # e_a - e_b in the basis v_k = e_{k-1} - e_k, k = 1..n-1
            coeffs = {}
            if a == b:
                return coeffs
            lo, hi, s = (a, b, one) if a < b else (b, a, field.neg(one))
            for t in range(lo, hi):
                coeffs[t] = s  # v_{t+1} has index t
            return coeffs

        mats = []
        for sigma in perms:
            inv = [0] * n
            for i, v in enumerate(sigma):
                inv[v] = i
            act = sigma if side == "left" else inv
            entries = []
            for k in range(1, n):
                for t, c in diff_coords(act[k - 1], act[k]).items():
                    entries.append((t, k - 1, c))
            mats.append(SparseMatrix.from_entries(field, n - 1, n - 1, entries))
        return cls(sym, field, mats, side=side)


class GComplex:
    """Cochain complex of G-modules with equivariant differentials."""

    def __init__(self, group, field, modules, diffs, side="right", lo=0):
        self.group = group
        self.field = field
        self.modules = dict(modules)  # degree -> GModule
        degrees = sorted(self.modules)
        dims = [self.modules.get(n, None).dim if n in self.modules else 0 for n in range(degrees[0], degrees[-1] + 1)]
        space = GradedSpace(degrees[0], dims)
        self.complex = CochainComplex(field, space, diffs)
        self.side = side
        for m in self.modules.values():
            if m.side != side:
                raise ModuleAxiomError("mixed action sides in a G-complex")
        for n in range(space.lo, space.hi):
            d = self.complex.diff(n)
            for x in group.generators():
                an = self.modules[n].action[x] if n in self.modules else None
                an1 = self.modules[n + 1].action[x] if n + 1 in self.modules else None
                if an is None or an1 is None:
                    continue
                if d.mul(an) != an1.mul(d):
                    raise ModuleAxiomError(
                        f"differential at degree {n} is not equivariant", witness=(n, x)
                    )

    def as_obj(self):
        def action_fn(x):
            return {n: m.action[x] for n, m in self.modules.items()}

        return GObj(self.group, self.complex, self.side, action_fn)


def _as_gobj(v):
    if isinstance(v, GObj):
        return v
    if isinstance(v, (GModule, GComplex)):
        return v.as_obj()
    raise ValidationError(f"not a G-module-like object: {v!r}")


# ---------------------------------------------------------------------------
# The monads T and U
# ---------------------------------------------------------------------------


def _map_space_complex(g, v):
    """Underlying complex of Map(G, V): |G| copies of V, block differential."""
    o = g.order
    cx = v.complex
    dims = [o * cx.dim(n) for n in cx.space.degrees()]
    space = GradedSpace(cx.space.lo, dims)
    diffs = {}
    for n in cx.space.degrees():
        d = cx.diff(n)
        if d.is_zero():
            continue
        dv = cx.dim(n)
        dw = cx.dim(n + 1)
        rows = {}
        for x in range(o):
            for i, r in d.rows.items():
                rows[x * dw + i] = {x * dv + j: val for j, val in r.items()}
        diffs[n] = SparseMatrix(cx.field, o * dw, o * dv, rows)
    return CochainComplex(
        cx.field, space, diffs, top_truncated=cx.top_truncated,
        reliable_override=cx.reliable_override, check=False,
    )


def _blockdiag_map(g, f, src_cx, tgt_cx):
    """Map(G, f): apply f to values, i.e. one block per group element."""
    o = g.order
    comps = {}
    for n in set(f.components):
        m = f.component(n)
        dv = f.source.dim(n)
        dw = f.target.dim(n)
        rows = {}
        for x in range(o):
            for i, r in m.rows.items():
                rows[x * dw + i] = {x * dv + j: val for j, val in r.items()}
        comps[n] = SparseMatrix(m.field, o * dw, o * dv, rows)
    return ChainMap(src_cx, tgt_cx, comps)


def monad_T(g, field):
    """The translation monad on right G-module complexes (Example with Map(G, .))."""

    def obj_map(v):
        o = g.order
        cx = _map_space_complex(g, v)

        def action_fn(h):
            out = {}
            for n in v.complex.space.degrees():
                d = v.dim(n)
                if d == 0:
                    continue
                entries = []
                one = field.one()
                for x in range(o):
                    hx = g.mult(h, x)
                    for i in range(d):
                        entries.append((x * d + i, hx * d + i, one))
                out[n] = SparseMatrix.from_entries(field, o * d, o * d, entries)
            return out

        return GObj(g, cx, "right", action_fn)

    def mor_map(f, src, tgt):
        return _blockdiag_map(g, f, monad.T(src).complex, monad.T(tgt).complex)

    def unit(v):
        tv = monad.T(v)
        comps = {}
        for n in v.complex.space.degrees():
            d = v.dim(n)
            if d == 0:
                continue
            rows = {}
            for x in range(g.order):
                ax = v.action_matrix(x, n)
                for i, r in ax.rows.items():
                    rows[x * d + i] = dict(r)
            comps[n] = SparseMatrix(field, g.order * d, d, rows)
        return ChainMap(v.complex, tv.complex, comps)

    def mu(v):
        tv = monad.T(v)
        t2v = monad.T(tv)
        o, e = g.order, g.identity
        comps = {}
        for n in v.complex.space.degrees():
            d = v.dim(n)
            if d == 0:
                continue
            entries = []
            one = field.one()
            for x in range(o):
                for i in range(d):
                    entries.append((x * d + i, x * (o * d) + e * d + i, one))
            comps[n] = SparseMatrix.from_entries(field, o * d, o * o * d, entries)
        return ChainMap(t2v.complex, tv.complex, comps)

    monad = MonadInstance("T (translation)", obj_map, mor_map, unit, mu)
    return monad


def monad_U(g, field, side="right"):
    """The diagonal monad on G-module complexes (left or right handed)."""

    def obj_map(v):
        o = g.order
        cx = _map_space_complex(g, v)

        def action_fn(h):
            out = {}
            for n in v.complex.space.degrees():
                d = v.dim(n)
                if d == 0:
                    continue
                ah = v.action_matrix(h, n)
                rows = {}
                for y in range(o):
                    src = g.mult(h, y) if side == "right" else g.mult(y, h)
                    for i, r in ah.rows.items():
                        rows[y * d + i] = {src * d + j: val for j, val in r.items()}
                out[n] = SparseMatrix(field, o * d, o * d, rows)
            return out

        return GObj(g, cx, side, action_fn)

    def mor_map(f, src, tgt):
        return _blockdiag_map(g, f, monad.T(src).complex, monad.T(tgt).complex)

    def unit(v):
        tv = monad.T(v)
        comps = {}
        one = field.one()
        for n in v.complex.space.degrees():
            d = v.dim(n)
            if d == 0:
                continue
            entries = []
            for x in range(g.order):
                for i in range(d):
                    entries.append((x * d + i, i, one))
            comps[n] = SparseMatrix.from_entries(field, g.order * d, d, entries)
        return ChainMap(v.complex, tv.complex, comps)

    def mu(v):
        tv = monad.T(v)
        t2v = monad.T(tv)
        o = g.order
        comps = {}
        one = field.one()
        for n in v.complex.space.degrees():
            d = v.dim(n)
            if d == 0:
                continue
            entries = []
            for x in range(o):
                for i in range(d):
                    entries.append((x * d + i, x * (o * d) + x * d + i, one))
            comps[n] = SparseMatrix.from_entries(field, o * d, o * o * d, entries)
        return ChainMap(t2v.complex, tv.complex, comps)

    name = "U (diagonal)" if side == "right" else "U-left (diagonal)"
    monad = MonadInstance(name, obj_map, mor_map, unit, mu)
    return monad


# ---------------------------------------------------------------------------
# The isomorphisms theta, Theta, Phi, Psi
# ---------------------------------------------------------------------------


def check_equivariant(f, src, tgt, context=""):
    """Equivariance over a generating set implies equivariance everywhere."""
    for x in src.group.generators():
        for n in set(f.components):
            lhs = tgt.action_matrix(x, n).mul(f.component(n))
            rhs = f.component(n).mul(src.action_matrix(x, n))
            if lhs != rhs:
                raise ValidationError(
                    f"map is not equivariant{': ' + context if context else ''} "
                    f"(element {x}, degree {n})",
                    witness=(context, x, n),
                )


def theta(v, g=None, field=None):
    """The natural isomorphism U(V) -> T(V), (theta r)(y) = r(y).y.

    Verifies invertibility, equivariance, and the unit/composition squares.
    Returns (theta, monad_U, monad_T) with theta a verified ChainMap.
    """
    vobj = _as_gobj(v)
    g = vobj.group
    field = vobj.complex.field
    mU = monad_U(g, field)
    mT = monad_T(g, field)
    th = _theta_map(vobj, mU, mT)
    _verify_theta(vobj, th, mU, mT)
    return th, mU, mT


def _theta_map(vobj, mU, mT):
    g = vobj.group
    field = vobj.complex.field
    uv, tv = mU.T(vobj), mT.T(vobj)
    comps = {}
    for n in vobj.complex.space.degrees():
        d = vobj.dim(n)
        if d == 0:
            continue
        rows = {}
        for y in range(g.order):
            ay = vobj.action_matrix(y, n)
            for i, r in ay.rows.items():
                rows[y * d + i] = {y * d + j: val for j, val in r.items()}
        comps[n] = SparseMatrix(field, g.order * d, g.order * d, rows)
    return ChainMap(uv.complex, tv.complex, comps)


def _theta_inverse(vobj, mU, mT):
    g = vobj.group
    field = vobj.complex.field
    uv, tv = mU.T(vobj), mT.T(vobj)
    comps = {}
    for n in vobj.complex.space.degrees():
        d = vobj.dim(n)
        if d == 0:
            continue
        rows = {}
        for y in range(g.order):
            ainv = vobj.action_matrix(g.inverse(y), n)
            for i, r in ainv.rows.items():
                rows[y * d + i] = {y * d + j: val for j, val in r.items()}
        comps[n] = SparseMatrix(field, g.order * d, g.order * d, rows)
    return ChainMap(tv.complex, uv.complex, comps)


def _verify_theta(vobj, th, mU, mT):
    g = vobj.group
    field = vobj.complex.field
    uv, tv = mU.T(vobj), mT.T(vobj)
    inv = _theta_inverse(vobj, mU, mT)
    for n in set(th.components):
        d = tv.complex.dim(n)
        ident = SparseMatrix.identity(field, d)
        if th.component(n).mul(inv.component(n)) != ident:
            raise ValidationError("theta is not invertible", witness=n)
    check_equivariant(th, uv, tv, context="theta")
    # CD11: theta . omega = u
    lhs = th.compose(mU.unit(vobj))
    rhs = mT.unit(vobj)
    for n in set(lhs.components) | set(rhs.components):
        if lhs.component(n) != rhs.component(n):
            raise ValidationError("theta does not intertwine the units (CD11)", witness=n)
    # CD2: theta . nu = mu . theta_{T(V)} . U(theta)
    u_of_theta = mU.T_mor(th, uv, tv)
    theta_at_tv = _theta_map(tv, mU, mT)
    lhs = th.compose(mU.mu(vobj))
    rhs = mT.mu(vobj).compose(theta_at_tv).compose(u_of_theta)
    for n in set(lhs.components) | set(rhs.components):
        if lhs.component(n) != rhs.component(n):
            raise ValidationError(
                "theta does not intertwine the compositions (CD2)", witness=n
            )


def _tuple_index(g, xs, d, i):
    idx = 0
    for x in xs:
        idx = idx * g.order + x
    return idx * d + i


def _all_tuples(g, length):
    out = [()]
    for _ in range(length):
        out = [t + (x,) for t in out for x in range(g.order)]
    return out


class BigTheta:
    """Degreewise isomorphism of the U- and T-resolutions (verified)."""

    def __init__(self, components, dsc_U, dsc_T):
        self.components = components
        self.dsc_U = dsc_U
        self.dsc_T = dsc_T


def big_theta(v, N, dsc_U=None, dsc_T=None):
    """The cosimplicial isomorphism Theta: U-construction -> T-construction.

    Degree n component: Theta(a)(x_0..x_n) = a(x_0, x_0 x_1, .., x_0..x_n)
    acted on by the total product x_0 x_1 .. x_n.  Verified to be bijective,
    equivariant, and compatible with every coface and codegeneracy.
    """
    vobj = _as_gobj(v)
    g = vobj.group
    field = vobj.complex.field
    mU = monad_U(g, field)
    mT = monad_T(g, field)
    if dsc_U is None:
        dsc_U = dual_standard_construction(mU, vobj, N)
    if dsc_T is None:
        dsc_T = dual_standard_construction(mT, vobj, N)
    comps = []
    for n in range(N + 1):
        src = dsc_U.cosimplicial.levels[n]
        tgt = dsc_T.cosimplicial.levels[n]
        mats = {}
        for k in vobj.complex.space.degrees():
            d = vobj.dim(k)
            if d == 0:
                continue
            rows = {}
            for xs in _all_tuples(g, n + 1):
                ys = partial_products(g, xs)
                total = ys[-1]
                at = vobj.action_matrix(total, k)
                for i, r in at.rows.items():
                    rows[_tuple_index(g, xs, d, i)] = {
                        _tuple_index(g, ys, d, j): val for j, val in r.items()
                    }
            mats[k] = SparseMatrix(field, tgt.dim(k), src.dim(k), rows)
        comps.append(ChainMap(src, tgt, mats))
    result = BigTheta(comps, dsc_U, dsc_T)
    _verify_cosimplicial_iso(
        comps, dsc_U, dsc_T, vobj, name="big theta",
    )
    return result


def _verify_cosimplicial_iso(comps, dsc_src, dsc_tgt, vobj, name):
    g = vobj.group
    field = vobj.complex.field
    N = len(comps) - 1
    for n in range(N + 1):
        # bijectivity: square blocks of an invertible module map; exact rank check
        m = comps[n]
        for k in set(m.components):
            mat = m.component(k)
            if mat.nrows != mat.ncols or mat.rank() != mat.nrows:
                raise ValidationError(f"{name}: level {n} not bijective", witness=(n, k))
        check_equivariant(
            m,
            _level_obj(dsc_src, n),
            _level_obj(dsc_tgt, n),
            context=f"{name} level {n}",
        )
    for n in range(N):
        for j in range(n + 2):
            lhs = comps[n + 1].compose(dsc_src.cosimplicial.coface(n, j))
            rhs = dsc_tgt.cosimplicial.coface(n, j).compose(comps[n])
            for k in set(lhs.components) | set(rhs.components):
                if lhs.component(k) != rhs.component(k):
                    raise ValidationError(
                        f"{name}: coface {j} square fails at level {n}", witness=(n, j, k)
                    )
        for j in range(n + 1):
            lhs = comps[n].compose(dsc_src.cosimplicial.codegeneracy(n, j))
            rhs = dsc_tgt.cosimplicial.codegeneracy(n, j).compose(comps[n + 1])
            for k in set(lhs.components) | set(rhs.components):
                if lhs.component(k) != rhs.component(k):
                    raise ValidationError(
                        f"{name}: codegeneracy {j} square fails at level {n}",
                        witness=(n, j, k),
                    )


def _level_obj(dsc, n):
    return dsc.tower[n + 1]


# ---------------------------------------------------------------------------
# Function modules on EG and (EG)^left; the factorization Phi . Psi = Theta
# ---------------------------------------------------------------------------


class FunctionModules:
    """Map(Y, V) for a simplicial group Y: cosimplicial right G-modules."""

    def __init__(self, cosimplicial, objects):
        self.cosimplicial = cosimplicial
        self.objects = objects


def function_cosimplicial(sg, vobj, principal_action):
    """V-valued functions on a simplicial principal G-set, diagonal action.

    ``principal_action(h, level, w)`` is the free left G-action on level
    elements; the right module structure is (a.h)(w) = a(h.w).h.
    """
    g = vobj.group
    field = vobj.complex.field
    levels = []
    objects = []
    for m in range(sg.N + 1):
        elems = sg.levels[m].elements
        pos = {t: idx for idx, t in enumerate(elems)}
        cx = vobj.complex
        dims = [len(elems) * cx.dim(k) for k in cx.space.degrees()]
        space = GradedSpace(cx.space.lo, dims)
        diffs = {}
        for k in cx.space.degrees():
            dmat = cx.diff(k)
            if dmat.is_zero():
                continue
            dv, dw = cx.dim(k), cx.dim(k + 1)
            rows = {}
            for t_i in range(len(elems)):
                for i, r in dmat.rows.items():
                    rows[t_i * dw + i] = {t_i * dv + j: val for j, val in r.items()}
            diffs[k] = SparseMatrix(field, len(elems) * dw, len(elems) * dv, rows)
        lvl = CochainComplex(field, space, diffs, check=False)
        levels.append(lvl)

        def action_fn(h, m=m, elems=elems, pos=pos, lvl=lvl):
            out = {}
            for k in vobj.complex.space.degrees():
                d = vobj.dim(k)
                if d == 0:
                    continue
                ah = vobj.action_matrix(h, k)
                rows = {}
                for idx, w in enumerate(elems):
                    src = pos[principal_action(h, m, w)]
                    for i, r in ah.rows.items():
                        rows[idx * d + i] = {src * d + j: val for j, val in r.items()}
                out[k] = SparseMatrix(field, lvl.dim(k), lvl.dim(k), rows)
            return out

        objects.append(GObj(g, lvl, "right", action_fn))

    def pullback(setmap, src_lvl, tgt_lvl, src_elems, tgt_pos):
        comps = {}
        for k in vobj.complex.space.degrees():
            d = vobj.dim(k)
            if d == 0:
                continue
            entries = []
            one = field.one()
            for idx, w in enumerate(src_elems):
                j = tgt_pos[setmap(w)]
                for i in range(d):
                    entries.append((idx * d + i, j * d + i, one))
            comps[k] = SparseMatrix.from_entries(
                field, src_lvl.dim(k), tgt_lvl.dim(k), entries
            )
        return comps

    cofaces = []
    codegens = []
    for n in range(sg.N):
        src_elems = sg.levels[n + 1].elements
        tgt_pos = {t: i for i, t in enumerate(sg.levels[n].elements)}
        cofaces.append(
            [
                ChainMap(
                    levels[n],
                    levels[n + 1],
                    pullback(sg.face(n + 1, j), levels[n + 1], levels[n], src_elems, tgt_pos),
                )
                for j in range(n + 2)
            ]
        )
        src_elems2 = sg.levels[n].elements
        tgt_pos2 = {t: i for i, t in enumerate(sg.levels[n + 1].elements)}
        codegens.append(
            [
                ChainMap(
                    levels[n + 1],
                    levels[n],
                    pullback(sg.degeneracy(n, j), levels[n], levels[n + 1], src_elems2, tgt_pos2),
                )
                for j in range(n + 1)
            ]
        )
    from .complexes import CosimplicialComplex

    return FunctionModules(CosimplicialComplex(levels, cofaces, codegens), objects)


def map_EG_cosimplicial(g, v, N, eg=None):
    """Map(EG, V) with the diagonal structure; coincides with the U-construction."""
    from .monadics import build_EG

    vobj = _as_gobj(v)
    eg = eg if eg is not None else build_EG(g, N)

    def principal(h, m, w):
        return tuple(g.mult(h, c) for c in w)

    return function_cosimplicial(eg, vobj, principal)


def map_EG_left_cosimplicial(g, v, N, egl=None):
    """Map((EG)^left, V) with the diagonal structure (left translation on
    the principal coordinate)."""
    from .monadics import build_EG_left

    vobj = _as_gobj(v)
    egl = egl if egl is not None else build_EG_left(g, N)

    def principal(h, m, w):
        return (g.mult(h, w[0]),) + w[1:]

    return function_cosimplicial(egl, vobj, principal)


class PsiPhi:
    def __init__(self, psi, phi, map_eg, map_eg_left, dsc_T):
        self.psi = psi
        self.phi = phi
        self.map_eg = map_eg
        self.map_eg_left = map_eg_left
        self.dsc_T = dsc_T


def psi_phi_factorization(v, N, big=None):
    """Psi: Map(EG,V) -> Map((EG)^left,V) and Phi: Map((EG)^left,V) -> T(V).

    Both are verified cosimplicial isomorphisms and the composite equals
    big_theta degreewise (exact matrix identity).
    """
    vobj = _as_gobj(v)
    g = vobj.group
    field = vobj.complex.field
    mT = monad_T(g, field)
    dsc_T = dual_standard_construction(mT, vobj, N)
    meg = map_EG_cosimplicial(g, vobj, N)
    megl = map_EG_left_cosimplicial(g, vobj, N)

    psi_comps = []
    phi_comps = []
    for n in range(N + 1):
        tuples = _all_tuples(g, n + 1)
        src = meg.cosimplicial.levels[n]
        mid = megl.cosimplicial.levels[n]
        tgt = dsc_T.cosimplicial.levels[n]
        psi_mats = {}
        phi_mats = {}
        for k in vobj.complex.space.degrees():
            d = vobj.dim(k)
            if d == 0:
                continue
            one = field.one()
            entries = []
            for xs in tuples:
                ys = partial_products(g, xs)
                for i in range(d):
                    entries.append(
                        (_tuple_index(g, xs, d, i), _tuple_index(g, ys, d, i), one)
                    )
            psi_mats[k] = SparseMatrix.from_entries(field, mid.dim(k), src.dim(k), entries)
            rows = {}
            for xs in tuples:
                total = partial_products(g, xs)[-1]
                at = vobj.action_matrix(total, k)
                for i, r in at.rows.items():
                    rows[_tuple_index(g, xs, d, i)] = {
                        _tuple_index(g, xs, d, j): val for j, val in r.items()
                    }
            phi_mats[k] = SparseMatrix(field, tgt.dim(k), mid.dim(k), rows)
        psi_comps.append(ChainMap(src, mid, psi_mats))
        phi_comps.append(ChainMap(mid, tgt, phi_mats))

    class _Wrap:
        def __init__(self, cosimplicial, tower):
            self.cosimplicial = cosimplicial
            self.tower = tower

    meg_w = _Wrap(meg.cosimplicial, [None] + meg.objects)
    megl_w = _Wrap(megl.cosimplicial, [None] + megl.objects)
    _verify_cosimplicial_iso(psi_comps, meg_w, megl_w, vobj, name="Psi")
    _verify_cosimplicial_iso(phi_comps, megl_w, dsc_T, vobj, name="Phi")

    if big is None:
        big = big_theta(vobj, N, dsc_T=dsc_T)
    for n in range(N + 1):
        comp = phi_comps[n].compose(psi_comps[n])
        for k in set(comp.components) | set(big.components[n].components):
            if comp.component(k) != big.components[n].component(k):
                raise ValidationError(
                    f"Phi . Psi differs from Theta at level {n}", witness=(n, k)
                )
    return PsiPhi(psi_comps, phi_comps, meg, megl, dsc_T)


# ---------------------------------------------------------------------------
# Invariants and cohomology
# ---------------------------------------------------------------------------


def invariants_functor(v):
    """Degreewise fixed points of a complex of modules, with restricted d.

    Fixed under a generating set = fixed under the group; the restriction is
    verified (an equivariant differential cannot leave the fixed part, but
    we assert rather than assume).
    """
    vobj = _as_gobj(v)
    c = vobj.complex
    gens = vobj.group.generators()
    ops = []
    for x in gens:
        comps = {}
        for n in c.space.degrees():
            if c.dim(n) == 0:
                continue
            comps[n] = vobj.action_matrix(x, n).sub(SparseMatrix.identity(c.field, c.dim(n)))
        ops.append(Operator(c, 0, comps))
    return joint_kernel_subcomplex(c, ops)


def _conormalized_action_constraints(conorm, dsc, gens, degrees):
    """Per-degree constraint matrices (action(x) - 1) . inclusion on Tot^m."""
    out = {}
    for m in degrees:
        blocks = conorm.blocks.get(m, [])
        mats = []
        for x in gens:
            cols = {}
            row_off = 0
            pieces_rows = []
            for n, k, off in blocks:
                sub = conorm.pieces[(n, k)]
                obj = dsc.tower[n + 1]
                act = obj.action_matrix(x, k)
                amb = act.mul(sub.matrix).sub(sub.matrix)
                pieces_rows.append((off, amb))
            total_rows = sum(p.nrows for _, p in pieces_rows)
            rows = {}
            racc = 0
            for off, amb in pieces_rows:
                for i, r in amb.rows.items():
                    rows[racc + i] = {off + j: val for j, val in r.items()}
                racc += amb.nrows
            mats.append(SparseMatrix(conorm.field, total_rows, conorm.dim(m), rows))
        out[m] = mats
    return out


def group_cohomology(g, v, maxdeg, via="T"):
    """dims of H^n(G, V) for 0 <= n <= maxdeg through the chosen monad."""
    vobj = _as_gobj(v)
    if vobj.side != "right":
        raise ValidationError("group_cohomology is built for right modules")
    field = vobj.complex.field
    N = maxdeg + 1
    top_dim = (g.order ** (N + 1)) * max(
        (vobj.dim(n) for n in vobj.complex.space.degrees()), default=0
    )
    if top_dim > MAX_CONSTRUCTION_DIM:
        raise SizeLimitError(
            f"construction dimension {top_dim} exceeds cap {MAX_CONSTRUCTION_DIM}",
            witness=top_dim,
        )
    if via == "T":
        monad = monad_T(g, field)
    elif via == "U":
        monad = monad_U(g, field)
    else:
        raise ValidationError(f"unknown monad choice {via!r}")
    dsc = dual_standard_construction(monad, vobj, N)
    conorm = conormalize(dsc.cosimplicial)
    gens = g.generators()
    constraints = _conormalized_action_constraints(
        conorm, dsc, gens, range(0, maxdeg + 2)
    )
    return constrained_cohomology_dims(conorm, constraints, maxdeg)
