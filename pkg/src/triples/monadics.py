"""Monads, comonads, their (dual) standard constructions, and EG.

A monad here is represented operationally: closures that build the image
object T(V), push morphisms through T, and produce the unit and composition
matrices at any object.  Law verification is an exhaustive matrix identity
check on every object actually constructed, never a sample.

The universal simplicial objects: ``build_EG`` gives the homogeneous object
(levels G^{n+1}, faces omit, degeneracies duplicate) and ``build_EG_left``
the nonhomogeneous one (faces multiply adjacent entries / drop the last,
degeneracies insert the identity after a slot).  The degreewise map
``(x_0, .., x_n) -> (x_0, x_0 x_1, .., x_0 .. x_n)`` is verified to be an
isomorphism of simplicial groups; the group structure on the nonhomogeneous
object is the iterated semidirect product, realized through partial-product
transport.
"""

from __future__ import annotations

from .complexes import ChainMap, CosimplicialComplex
from .errors import (
    ComonadLawViolation,
    MonadLawViolation,
    SimplicialIdentityError,
    ValidationError,
)
from .linalg import SparseMatrix

__all__ = [
    "MonadInstance",
    "ComonadInstance",
    "DualStandardConstruction",
    "dual_standard_construction",
    "standard_construction",
    "SimplicialSet",
    "SimplicialGroup",
    "SimplicialGroupMap",
    "build_EG",
    "build_EG_left",
    "iso_EG_left_to_EG",
    "comonad_diagonal_gset",
    "comonad_free_gset",
    "GSet",
]


# ---------------------------------------------------------------------------
# Monads on concrete linear categories
# ---------------------------------------------------------------------------


class MonadInstance:
    """Endofunctor with unit and composition, evaluated as explicit matrices.

    ``obj_map(v)`` builds T(v); objects must expose ``.complex``.
    ``mor_map(f, src, tgt)`` pushes a ChainMap through T.
    ``unit(v)`` and ``mu(v)`` return ChainMaps v -> T(v) and T^2(v) -> T(v).
    """

    def __init__(self, name, obj_map, mor_map, unit, mu):
        self.name = name
        self._obj_map = obj_map
        self._mor_map = mor_map
        self._unit = unit
        self._mu = mu
        self._cache = {}

    def T(self, v):
        key = id(v)
        if key not in self._cache:
            self._cache[key] = (v, self._obj_map(v))
        return self._cache[key][1]

    def T_mor(self, f, src, tgt):
        return self._mor_map(f, src, tgt)

    def unit(self, v):
        return self._unit(v)

    def mu(self, v):
        return self._mu(v)


def _identity_chain_map(c):
    return ChainMap(
        c,
        c,
        {n: SparseMatrix.identity(c.field, c.dim(n)) for n in c.space.degrees() if c.dim(n)},
    )


class DualStandardConstruction:
    """Result bundle: cosimplicial object, the tower T^k(v), and the maps."""

    def __init__(self, cosimplicial, tower, units, mus):
        self.cosimplicial = cosimplicial
        self.tower = tower  # tower[k] = T^k(v), tower[0] = v
        self.units = units
        self.mus = mus

    def level_object(self, n):
        """The object T^{n+1}(v) sitting in cosimplicial degree n."""
        return self.tower[n + 1]


def dual_standard_construction(monad, v, N, verify=True):
    """Cosimplicial object T^{n+1}(v), 0 <= n <= N, with the standard maps.

    Cofaces are T^j u T^{n-j+1} and codegeneracies T^j mu T^{n-j}; the
    cosimplicial identities are verified as matrix identities on
    construction, and the monad laws are verified exhaustively on every
    object of the tower deep enough to support the check.
    """
    tower = [v]
    for _ in range(N + 1):
        tower.append(monad.T(tower[-1]))

    units = [monad.unit(tower[k]) for k in range(N + 1)]  # T^k v -> T^{k+1} v
    mus = [monad.mu(tower[k]) for k in range(N)]  # T^{k+2} v -> T^{k+1} v

    def whisker(f, j, a, b):
        """T^j(f) where f maps tower[a] -> tower[b]."""
        for i in range(j):
            f = monad.T_mor(f, tower[a + i], tower[b + i])
        return f

    if verify:
        _verify_monad_laws(monad, tower, units, mus, whisker)

    levels = [tower[n + 1].complex for n in range(N + 1)]
    cofaces = []
    codegens = []
    for n in range(N):
        cofaces.append(
            [whisker(units[n + 1 - j], j, n + 1 - j, n + 2 - j) for j in range(n + 2)]
        )
        codegens.append(
            [whisker(mus[n - j], j, n + 2 - j, n + 1 - j) for j in range(n + 1)]
        )
    cosimplicial = CosimplicialComplex(levels, cofaces, codegens)
    return DualStandardConstruction(cosimplicial, tower, units, mus)


def _verify_monad_laws(monad, tower, units, mus, whisker):
    depth = len(tower) - 1
    for k in range(depth - 1):
        w = tower[k]
        tw = tower[k + 1]
        ident = _identity_chain_map(tw.complex)
        left = mus[k].compose(units[k + 1])  # mu_w . u_{T w}
        right = mus[k].compose(monad.T_mor(units[k], w, tw))  # mu_w . T(u_w)
        for f, tag in ((left, "mu . uT = id"), (right, "mu . Tu = id")):
            for n in set(f.components) | set(ident.components):
                if f.component(n) != ident.component(n):
                    raise MonadLawViolation(
                        f"{monad.name}: unit law '{tag}' fails at T^{k} object, degree {n}",
                        witness=(monad.name, tag, k, n),
                    )
    for k in range(depth - 2):
        w = tower[k]
        tw = tower[k + 1]
        t2w = tower[k + 2]
        lhs = mus[k].compose(mus[k + 1])  # mu_w . mu_{T w}
        rhs = mus[k].compose(monad.T_mor(mus[k], t2w, tw))  # mu_w . T(mu_w)
        for n in set(lhs.components) | set(rhs.components):
            if lhs.component(n) != rhs.component(n):
                raise MonadLawViolation(
                    f"{monad.name}: associativity fails at T^{k} object, degree {n}",
                    witness=(monad.name, "assoc", k, n),
                )


# ---------------------------------------------------------------------------
# Comonads on concrete finite-set categories
# ---------------------------------------------------------------------------


class GSet:
    """Finite set with a left action of a finite group (possibly trivial)."""

    def __init__(self, elements, act=None):
        self.elements = list(elements)
        self.index = {e: i for i, e in enumerate(self.elements)}
        if len(self.index) != len(self.elements):
            raise ValidationError("duplicate elements in finite set")
        self.act = act  # act(g_index, element) -> element

    def __len__(self):
        return len(self.elements)


class SetMap:
    def __init__(self, src, tgt, table):
        self.src = src
        self.tgt = tgt
        self.table = dict(table)
        for e in src.elements:
            if self.table[e] not in tgt.index:
                raise ValidationError(f"map value {self.table[e]!r} not in target")

    def __call__(self, e):
        return self.table[e]

    def compose(self, other):
        """self . other."""
        return SetMap(other.src, self.tgt, {e: self.table[other.table[e]] for e in other.src.elements})

    def __eq__(self, other):
        return self.table == other.table


class ComonadInstance:
    """Comonad on a category of finite (G-)sets, evaluated elementwise."""

    def __init__(self, name, obj_map, mor_map, counit, delta):
        self.name = name
        self._obj_map = obj_map
        self._mor_map = mor_map
        self._counit = counit
        self._delta = delta
        self._cache = {}

    def L(self, w):
        key = id(w)
        if key not in self._cache:
            self._cache[key] = (w, self._obj_map(w))
        return self._cache[key][1]

    def L_mor(self, f, src, tgt):
        return self._mor_map(f, src, tgt)

    def counit(self, w):
        return self._counit(w)

    def delta(self, w):
        return self._delta(w)


def standard_construction(comonad, w, N, verify=True):
    """Simplicial object L^{n+1}(w), faces L^j c L^{n-j}, degeneracies L^j delta L^{n-j}."""
    tower = [w]
    for _ in range(N + 2):
        tower.append(comonad.L(tower[-1]))

    counits = [comonad.counit(tower[k]) for k in range(N + 2)]  # L^{k+1} w -> L^k w
    deltas = [comonad.delta(tower[k]) for k in range(N + 2)]  # L^{k+1} w -> L^{k+2} w

    def whisker(f, j, a, b):
        for i in range(j):
            f = comonad.L_mor(f, tower[a + i], tower[b + i])
        return f

    if verify:
        _verify_comonad_laws(comonad, tower, counits, deltas)

    levels = [tower[m + 1] for m in range(N + 1)]
    faces = []
    degens = []
    for m in range(N + 1):
        faces.append([whisker(counits[m - j], j, m + 1 - j, m - j) for j in range(m + 1)])
        degens.append([whisker(deltas[m - j], j, m + 1 - j, m + 2 - j) for j in range(m + 1)])
    return SimplicialSet(levels, faces, degens)


def _verify_comonad_laws(comonad, tower, counits, deltas):
    depth = len(tower) - 1
    for k in range(depth - 1):
        w = tower[k]
        lw = tower[k + 1]
        # counit laws: cL . delta = id = Lc . delta
        left = counits[k + 1].compose(deltas[k])
        right = comonad.L_mor(counits[k], lw, w).compose(deltas[k])
        for f, tag in ((left, "cL . delta = id"), (right, "Lc . delta = id")):
            for e in lw.elements:
                if f(e) != e:
                    raise ComonadLawViolation(
                        f"{comonad.name}: counit law '{tag}' fails at L^{k} object",
                        witness=(comonad.name, tag, k, e),
                    )
    for k in range(depth - 2):
        lw = tower[k + 1]
        l2w = tower[k + 2]
        lhs = deltas[k + 1].compose(deltas[k])  # delta_{L w} . delta_w ... (delta L)
        rhs = comonad.L_mor(deltas[k], lw, l2w).compose(deltas[k])  # (L delta) . delta
        for e in lw.elements:
            if lhs(e) != rhs(e):
                raise ComonadLawViolation(
                    f"{comonad.name}: coassociativity fails at L^{k} object",
                    witness=(comonad.name, "coassoc", k, e),
                )


# ---------------------------------------------------------------------------
# Simplicial sets and simplicial groups
# ---------------------------------------------------------------------------


class SimplicialSet:
    """Truncated simplicial set; identities verified exhaustively on build."""

    def __init__(self, levels, faces, degens, check=True):
        self.levels = list(levels)
        self.faces = [list(fs) for fs in faces]
        self.degens = [list(ds) for ds in degens]
        self.N = len(self.levels) - 1
        if check:
            self.verify_identities()

    def face(self, m, i):
        return self.faces[m][i]

    def degeneracy(self, m, j):
        return self.degens[m][j]

    def verify_identities(self):
        def eq(f, g, elems, tag):
            for e in elems:
                if f(e) != g(e):
                    raise SimplicialIdentityError(
                        f"simplicial identity {tag} fails on {e!r}", witness=(tag, e)
                    )

        for m in range(2, self.N + 1):
            elems = self.levels[m].elements
            for j in range(m + 1):
                for i in range(j):
                    eq(
                        self.face(m - 1, i).compose(self.face(m, j)),
                        self.face(m - 1, j - 1).compose(self.face(m, i)),
                        elems,
                        f"d_{i} d_{j} = d_{j - 1} d_{i} at level {m}",
                    )
        for m in range(self.N - 1):
            elems = self.levels[m].elements
            for j in range(m + 1):
                for i in range(j + 1):
                    eq(
                        self.degeneracy(m + 1, i).compose(self.degeneracy(m, j)),
                        self.degeneracy(m + 1, j + 1).compose(self.degeneracy(m, i)),
                        elems,
                        f"s_{i} s_{j} = s_{j + 1} s_{i} at level {m}",
                    )
        for m in range(self.N):
            elems = self.levels[m].elements
            for j in range(m + 1):
                for i in range(m + 2):
                    comp = self.face(m + 1, i).compose(self.degeneracy(m, j))
                    if i == j or i == j + 1:
                        eq(comp, SetMap(self.levels[m], self.levels[m], {e: e for e in elems}), elems, f"d_{i} s_{j} = id at level {m}")
                    elif i < j:
                        eq(
                            comp,
                            self.degeneracy(m - 1, j - 1).compose(self.face(m, i)),
                            elems,
                            f"d_{i} s_{j} = s_{j - 1} d_{i} at level {m}",
                        )
                    else:
                        eq(
                            comp,
                            self.degeneracy(m - 1, j).compose(self.face(m, i - 1)),
                            elems,
                            f"d_{i} s_{j} = s_{j} d_{i - 1} at level {m}",
                        )


class SimplicialGroup(SimplicialSet):
    """Simplicial set whose levels are groups and whose maps are homomorphisms.

    ``mult(m, x, y)`` multiplies at level m.  Homomorphy of the structure
    maps is verified on all pairs when the level is small, and otherwise on
    all pairs whose first factor lies in the coordinate generating set
    (elements with at most one non-identity coordinate), which generates the
    level group.
    """

    PAIR_LIMIT = 200_000

    def __init__(self, group, levels, faces, degens, mult, identities, check=True):
        self.group = group
        self.mult = mult  # mult(m, x, y)
        self.level_identity = identities  # identity tuple per level
        super().__init__(levels, faces, degens, check=check)
        if check:
            self.verify_homomorphisms()

    def _check_pairs(self, m):
        elems = self.levels[m].elements
        if len(elems) ** 2 <= self.PAIR_LIMIT:
            return [(x, y) for x in elems for y in elems]
        e = self.group.identity
        gens = []
        for x in elems:
            nontrivial = [c for c in x if c != e]
            if len(nontrivial) <= 1:
                gens.append(x)
        return [(x, y) for x in gens for y in elems]

    def verify_homomorphisms(self):
        for m in range(self.N + 1):
            pairs = self._check_pairs(m)
            maps = [("face", m, i, self.face(m, i), m - 1) for i in range(m + 1) if m >= 1]
            maps += [
                ("degeneracy", m, j, self.degeneracy(m, j), m + 1)
                for j in range(m + 1)
                if m + 1 <= self.N
            ]
            for kind, lvl, idx, f, tgt in maps:
                for x, y in pairs:
                    if f(self.mult(lvl, x, y)) != self.mult(tgt, f(x), f(y)):
                        raise SimplicialIdentityError(
                            f"{kind} {idx} at level {lvl} is not a homomorphism",
                            witness=(kind, lvl, idx, x, y),
                        )


class SimplicialGroupMap:
    """Degreewise map of simplicial groups with a full verification report."""

    def __init__(self, source, target, components):
        self.source = source
        self.target = target
        self.components = components  # list of SetMap per level

    def verify(self):
        src, tgt = self.source, self.target
        for m in range(src.N + 1):
            f = self.components[m]
            values = set(f.table.values())
            if len(values) != len(f.table) or len(values) != len(tgt.levels[m]):
                raise SimplicialIdentityError(
                    f"level {m} component is not bijective", witness=m
                )
        for m in range(src.N + 1):
            f = self.components[m]
            for x, y in src._check_pairs(m):
                if f(src.mult(m, x, y)) != tgt.mult(m, f(x), f(y)):
                    raise SimplicialIdentityError(
                        f"level {m} component is not a homomorphism", witness=(m, x, y)
                    )
        for m in range(1, src.N + 1):
            for i in range(m + 1):
                lhs = self.components[m - 1].compose(src.face(m, i))
                rhs = tgt.face(m, i).compose(self.components[m])
                if lhs != rhs:
                    raise SimplicialIdentityError(
                        f"map does not commute with face {i} at level {m}", witness=(m, i)
                    )
        for m in range(src.N):
            for j in range(m + 1):
                lhs = self.components[m + 1].compose(src.degeneracy(m, j))
                rhs = tgt.degeneracy(m, j).compose(self.components[m])
                if lhs != rhs:
                    raise SimplicialIdentityError(
                        f"map does not commute with degeneracy {j} at level {m}",
                        witness=(m, j),
                    )
        return True


def _tuples(g, length):
    out = [()]
    for _ in range(length):
        out = [t + (x,) for t in out for x in range(g.order)]
    return out


def build_EG(g, N):
    """Homogeneous universal object: levels G^{n+1}, omit/duplicate, componentwise product."""
    levels = [GSet(_tuples(g, m + 1)) for m in range(N + 1)]
    faces = []
    degens = []
    for m in range(N + 1):
        faces.append(
            [
                SetMap(levels[m], levels[m - 1], {t: t[:i] + t[i + 1 :] for t in levels[m].elements})
                for i in range(m + 1)
            ]
            if m >= 1
            else []
        )
        degens.append(
            [
                SetMap(
                    levels[m],
                    levels[m + 1],
                    {t: t[: j + 1] + (t[j],) + t[j + 1 :] for t in levels[m].elements},
                )
                for j in range(m + 1)
            ]
            if m + 1 <= N
            else []
        )

    def mult(m, x, y):
        return tuple(g.mult(a, b) for a, b in zip(x, y))

    idents = [tuple([g.identity] * (m + 1)) for m in range(N + 1)]
    return SimplicialGroup(g, levels, faces, degens, mult, idents)


def build_EG_left(g, N):
    """Nonhomogeneous universal object (iterated semidirect product).

    Faces multiply adjacent entries (the last face drops the final entry);
    degeneracy s_j inserts the identity after slot j.  The product transports
    the componentwise product through partial products:
    (x . y)_i = p_{i-1}(y)^{-1} x_i p_{i-1}(y) y_i  with p_i(y) = y_0 .. y_i.
    """
    levels = [GSet(_tuples(g, m + 1)) for m in range(N + 1)]
    e = g.identity
    faces = []
    degens = []
    for m in range(N + 1):
        row = []
        if m >= 1:
            for i in range(m + 1):
                if i < m:
                    tab = {
                        t: t[:i] + (g.mult(t[i], t[i + 1]),) + t[i + 2 :]
                        for t in levels[m].elements
                    }
                else:
                    tab = {t: t[:-1] for t in levels[m].elements}
                row.append(SetMap(levels[m], levels[m - 1], tab))
        faces.append(row)
        row = []
        if m + 1 <= N:
            for j in range(m + 1):
                tab = {t: t[: j + 1] + (e,) + t[j + 1 :] for t in levels[m].elements}
                row.append(SetMap(levels[m], levels[m + 1], tab))
        degens.append(row)

    def mult(m, x, y):
        out = []
        p = e  # partial product of y
        for i in range(m + 1):
            pi = g.inverse(p)
            out.append(g.mult(g.mult(g.mult(pi, x[i]), p), y[i]))
            p = g.mult(p, y[i])
        return tuple(out)

    idents = [tuple([e] * (m + 1)) for m in range(N + 1)]
    return SimplicialGroup(g, levels, faces, degens, mult, idents)


def partial_products(g, t):
    """(x_0, x_0 x_1, ..., x_0 .. x_n) for a tuple t."""
    out = []
    p = g.identity
    for x in t:
        p = g.mult(p, x)
        out.append(p)
    return tuple(out)


def iso_EG_left_to_EG(g, N, left=None, right=None):
    """The partial-product map (EG)^left -> EG, verified as a simplicial-group iso."""
    left = left if left is not None else build_EG_left(g, N)
    right = right if right is not None else build_EG(g, N)
    comps = [
        SetMap(
            left.levels[m],
            right.levels[m],
            {t: partial_products(g, t) for t in left.levels[m].elements},
        )
        for m in range(N + 1)
    ]
    iso = SimplicialGroupMap(left, right, comps)
    iso.verify()
    return iso


# ---------------------------------------------------------------------------
# The two comonads of the universal objects (diagonal and free G-sets)
# ---------------------------------------------------------------------------


def comonad_diagonal_gset(g):
    """Comonad Z -> G x Z with diagonal action; its standard construction on
    a point is the homogeneous object EG."""

    def obj_map(z):
        elements = [(x, q) for x in range(g.order) for q in z.elements]

        def act(h, eq):
            x, q = eq
            return (g.mult(h, x), z.act(h, q) if z.act else q)

        return GSet(elements, act)

    def mor_map(f, src, tgt):
        lsrc, ltgt = obj_map(src), obj_map(tgt)
        return SetMap(lsrc, ltgt, {(x, q): (x, f(q)) for x, q in lsrc.elements})

    def counit(z):
        lz = obj_map(z)
        return SetMap(lz, z, {(x, q): q for x, q in lz.elements})

    def delta(z):
        lz = obj_map(z)
        l2z = obj_map(lz)
        return SetMap(lz, l2z, {(x, q): (x, (x, q)) for x, q in lz.elements})

    return ComonadInstance("diagonal-GxZ", obj_map, mor_map, counit, delta)


def comonad_free_gset(g):
    """Comonad Z -> G x Z from the free/forgetful adjunction; its standard
    construction on a point is the nonhomogeneous object (EG)^left."""

    def obj_map(z):
        elements = [(x, q) for x in range(g.order) for q in z.elements]

        def act(h, eq):
            x, q = eq
            return (g.mult(h, x), q)

        return GSet(elements, act)

    def mor_map(f, src, tgt):
        lsrc, ltgt = obj_map(src), obj_map(tgt)
        return SetMap(lsrc, ltgt, {(x, q): (x, f(q)) for x, q in lsrc.elements})

    def counit(z):
        lz = obj_map(z)
        if z.act is None:
            raise ValidationError("counit of the free comonad needs an action")
        return SetMap(lz, z, {(x, q): z.act(x, q) for x, q in lz.elements})

    def delta(z):
        lz = obj_map(z)
        l2z = obj_map(lz)
        return SetMap(lz, l2z, {(x, q): (x, (g.identity, q)) for x, q in lz.elements})

    return ComonadInstance("free-GxZ", obj_map, mor_map, counit, delta)


def point_gset(g):
    """A single point with the trivial G-action."""
    return GSet(["*"], act=lambda h, q: q)
