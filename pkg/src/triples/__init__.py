"""Exact-arithmetic cohomology via monads and standard constructions.

Computes group cohomology, finite-groupoid cohomology, Chevalley-Eilenberg
cohomology, infinitesimal equivariant cohomology (relative Ext over the cone
of a Lie algebra) and Lie-Rinehart equivariant cohomology over Q and F_p,
with the structural isomorphisms between the underlying resolutions verified
as machine-checked chain isomorphisms.
"""

__version__ = "0.1.0"
