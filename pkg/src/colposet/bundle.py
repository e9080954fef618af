"""Bundles of coloured posets and their total coloured posets.

A bundle assigns a coloured poset to every base element and a coloured-poset
morphism to every base relation, functorially. The total coloured poset glues
the fibres: elements are (base label, fibre label) pairs, cross-fibre order
pushes through the element maps, and cross-fibre colour maps compose the
fibre colouring after tau. Both base colourings used by the spectral
machinery live here as well: degree-q weak chains of the fibres, and fibre
homology.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .coloured import (
    ColouredError,
    ColouredPoset,
    ColouredPosetMorphism,
    coloured_from_json,
    compose_morphisms,
    s_basis,
    s_chain_map,
    s_complex,
)
from .linalg import homology_basis, induced_homology_map
from .matrix import Matrix
from .poset import Poset, boolean_on, label_to_json, from_json as poset_from_json


class BundleError(ValueError):
    pass


class Bundle:
    """Base poset, one coloured fibre per element, morphisms along covers.

    Functoriality (equal composites along any two cover paths, for both the
    element maps and the matrices) is verified at construction; composite
    morphisms for arbitrary relations are cached.
    """

    __slots__ = ("base", "fibres", "cover_morphisms", "ring", "_morphs")

    def __init__(self, base: Poset, fibres: dict, cover_morphisms: dict):
        self.base = base
        self.fibres = {}
        for x in base.elements:
            if x not in fibres:
                raise BundleError(f"missing fibre over {x!r}")
            self.fibres[x] = fibres[x]
        rings = {cp.ring for cp in self.fibres.values()}
        if len(rings) != 1:
            raise BundleError("fibres use different rings")
        self.ring = rings.pop()
        self.cover_morphisms = {}
        for (a, b) in base.covers():
            m = cover_morphisms.get((a, b))
            if m is None:
                raise BundleError(f"missing morphism for base cover {a!r} < {b!r}")
            if m.source is not self.fibres[a] or m.target is not self.fibres[b]:
                if (m.source.poset.elements != self.fibres[a].poset.elements
                        or m.target.poset.elements != self.fibres[b].poset.elements):
                    raise BundleError(f"morphism on {a!r} < {b!r} connects wrong fibres")
            self.cover_morphisms[(a, b)] = m
        self._morphs = self._close()

    def _close(self):
        B = self.base
        order = sorted(B.elements, key=lambda e: (len(B.down_set(e)), str(e)))
        below = {y: B.lower_covers(y) for y in B.elements}
        morphs = {}
        for x in B.elements:
            morphs[(x, x)] = ColouredPosetMorphism.identity(self.fibres[x])
            for z in order:
                if z == x or not B.leq(x, z):
                    continue
                composite = None
                for w in below[z]:
                    if not B.leq(x, w):
                        continue
                    cand = compose_morphisms(self.cover_morphisms[(w, z)],
                                             morphs[(x, w)])
                    if composite is None:
                        composite = cand
                    elif (composite.f != cand.f
                          or any(composite.tau[y] != cand.tau[y] for y in cand.f)):
                        raise BundleError(
                            f"bundle not functorial between {x!r} and {z!r}")
                morphs[(x, z)] = composite
        return morphs

    def fibre(self, x) -> ColouredPoset:
        return self.fibres[x]

    def morphism(self, x, z) -> ColouredPosetMorphism:
        try:
            return self._morphs[(x, z)]
        except KeyError:
            raise BundleError(f"{x!r} <= {z!r} does not hold in the base")

    def restrict(self, labels) -> "Bundle":
        """Bundle over the induced subposet (which must keep a unique max)."""
        sub = self.base.subposet(labels)
        fibres = {x: self.fibres[x] for x in sub.elements}
        morphs = {(a, b): self.morphism(a, b) for a, b in sub.covers()}
        return Bundle(sub, fibres, morphs)

    def to_json(self):
        return {
            "base": self.base.to_json(),
            "fibres": {str(label_to_json(x)): self.fibres[x].to_json()
                       for x in self.base.elements},
            "morphisms": {
                f"{label_to_json(a)}<{label_to_json(b)}": {
                    "f": {str(label_to_json(y)): label_to_json(m.f[y])
                          for y in m.source.poset.elements},
                    "tau": {str(label_to_json(y)): m.tau[y].to_json()
                            for y in m.source.poset.elements},
                }
                for (a, b), m in self.cover_morphisms.items()
            },
        }


def bundle_from_json(data) -> Bundle:
    base = poset_from_json(data["base"])
    by_key = {str(label_to_json(e)): e for e in base.elements}
    fibres = {}
    for k, v in data["fibres"].items():
        if k not in by_key:
            raise BundleError(f"fibre key {k!r} is not a base element")
        fibres[by_key[k]] = coloured_from_json(v)
    morphs = {}
    for k, v in data.get("morphisms", {}).items():
        parts = k.split("<")
        if len(parts) != 2 or parts[0] not in by_key or parts[1] not in by_key:
            raise BundleError(f"bad morphism key {k!r}")
        a, b = by_key[parts[0]], by_key[parts[1]]
        src, tgt = fibres[a], fibres[b]
        src_by_key = {str(label_to_json(y)): y for y in src.poset.elements}
        tgt_by_key = {str(label_to_json(y)): y for y in tgt.poset.elements}
        f = {src_by_key[y]: tgt_by_key[str(w)] for y, w in v["f"].items()}
        tau = {src_by_key[y]: Matrix.from_json(src.ring, rows,
                                               tgt.dims[f[src_by_key[y]]],
                                               src.dims[src_by_key[y]])
               for y, rows in v["tau"].items()}
        morphs[(a, b)] = ColouredPosetMorphism(src, tgt, f, tau)
    return Bundle(base, fibres, morphs)


def product_bundle(base: Poset, fibre: ColouredPoset) -> Bundle:
    """Same fibre everywhere, identity morphisms along every cover."""
    fibres = {x: fibre for x in base.elements}
    ident = ColouredPosetMorphism.identity(fibre)
    morphs = {c: ident for c in base.covers()}
    return Bundle(base, fibres, morphs)


# ---------------------------------------------------------------------------
# the total coloured poset


@dataclass
class TotalColouredPoset:
    total: ColouredPoset
    projection: dict
    fibre_elements: dict

    @property
    def poset(self) -> Poset:
        return self.total.poset


def total(xi: Bundle) -> TotalColouredPoset:
    """Glue the fibres into one coloured poset.

    Element labels are (base label, fibre label) pairs. That the glued order
    is transitive and the glued colouring path-independent are theorems, so
    either failing aborts loudly.
    """
    B = xi.base
    elems = []
    projection = {}
    fibre_elements = {}
    for x in B.elements:
        labels = []
        for y in xi.fibres[x].poset.elements:
            e = (x, y)
            elems.append(e)
            projection[e] = x
            labels.append(e)
        fibre_elements[x] = tuple(labels)
    n = len(elems)
    pos = {e: i for i, e in enumerate(elems)}
    leq = np.zeros((n, n), dtype=bool)
    for (x, y) in elems:
        fx = xi.fibres[x].poset
        i = pos[(x, y)]
        for x2 in B.up_set(x):
            if x2 == x:
                for y2 in fx.up_set(y):
                    leq[i, pos[(x, y2)]] = True
            else:
                fy = xi.morphism(x, x2).f[y]
                f2 = xi.fibres[x2].poset
                for y2 in f2.up_set(fy):
                    leq[i, pos[(x2, y2)]] = True
    closure = leq.copy()
    for k in range(n):
        rows = np.nonzero(closure[:, k])[0]
        if rows.size:
            closure[rows] |= closure[k]
    if not np.array_equal(closure, leq):
        raise BundleError("total order failed transitivity; bundle data corrupt")
    E = Poset(elems, _leq=leq)
    dims = {(x, y): xi.fibres[x].dims[y] for (x, y) in elems}
    cmaps = {}
    for ((x, y), (x2, y2)) in E.covers():
        if x == x2:
            cmaps[((x, y), (x2, y2))] = xi.fibres[x].map(y, y2)
        else:
            m = xi.morphism(x, x2)
            cmaps[((x, y), (x2, y2))] = (
                xi.fibres[x2].map(m.f[y], y2) @ m.tau[y])
    try:
        cp = ColouredPoset(E, xi.ring, dims, cmaps)
    except ColouredError as e:
        raise BundleError(f"total colouring failed validation: {e}")
    return TotalColouredPoset(cp, projection, fibre_elements)


# ---------------------------------------------------------------------------
# decompositions and base colourings


def boolean_decompose(cp: ColouredPoset, fixed_atoms) -> Bundle:
    """Split a colouring of a Boolean lattice into a bundle.

    The lattice's ground set is its top label (a sorted tuple). The base is
    the Boolean lattice on the atoms NOT in fixed_atoms; the fibre over a
    base subset Y holds the original colouring on {Y union Z} for Z ranging
    over subsets of fixed_atoms; morphisms along the base re-use the
    original colour maps.
    """
    ground = cp.poset.one
    if not isinstance(ground, tuple):
        raise BundleError("boolean_decompose needs subset-tuple labels")
    A = tuple(sorted(set(fixed_atoms), key=str))
    if not set(A) <= set(ground):
        raise BundleError("fixed atoms must lie in the ground set")
    free = tuple(a for a in ground if a not in set(A))
    base = boolean_on(free)
    subsets_A = []
    for r in range(len(A) + 1):
        subsets_A.extend(itertools.combinations(A, r))

    def union(y, z):
        return tuple(sorted(set(y) | set(z)))

    fibres = {}
    for Y in base.elements:
        labels = [union(Y, Z) for Z in subsets_A]
        fibres[Y] = cp.restrict(labels)
    morphs = {}
    for (Y, Y2) in base.covers():
        src, tgt = fibres[Y], fibres[Y2]
        f = {w: union(w, Y2) for w in src.poset.elements}
        tau = {w: cp.map(w, f[w]) for w in src.poset.elements}
        morphs[(Y, Y2)] = ColouredPosetMorphism(src, tgt, f, tau)
    return Bundle(base, fibres, morphs)


def q_chain_colouring(xi: Bundle, q: int) -> ColouredPoset:
    """Colour the base by degree-q weak chains of the fibres."""
    if q < 0:
        raise BundleError("q must be nonnegative")
    B = xi.base
    dims = {x: s_basis(xi.fibres[x], q).dim for x in B.elements}
    cmaps = {}
    for (a, b) in B.covers():
        cmaps[(a, b)] = s_chain_map(xi.morphism(a, b), q)[q]
    return ColouredPoset(B, xi.ring, dims, cmaps)


def fibre_homology_colouring(xi: Bundle, q: int) -> ColouredPoset:
    """Colour the base by degree-q homology of the fibres (fields only)."""
    if not xi.ring.is_field:
        raise BundleError("fibre homology colouring needs field coefficients")
    if q < 0:
        raise BundleError("q must be nonnegative")
    B = xi.base
    complexes = {x: s_complex(xi.fibres[x], q + 1) for x in B.elements}
    dims = {x: homology_basis(complexes[x], q).dim for x in B.elements}
    cmaps = {}
    for (a, b) in B.covers():
        fmap = s_chain_map(xi.morphism(a, b), q + 1)
        cmaps[(a, b)] = induced_homology_map(
            {q: fmap[q], q + 1: fmap[q + 1]}, complexes[a], complexes[b], q)
    return ColouredPoset(B, xi.ring, dims, cmaps)


# ---------------------------------------------------------------------------
# bundle morphisms


class BundleMorphism:
    """Base poset map g (top to top only) plus per-element fibre morphisms,
    natural against the two bundles' cover morphisms."""

    __slots__ = ("source", "target", "g", "eta")

    def __init__(self, source: Bundle, target: Bundle, g: dict, eta: dict):
        self.source = source
        self.target = target
        self.g = dict(g)
        self.eta = dict(eta)
        B, B2 = source.base, target.base
        for x in B.elements:
            if x not in self.g or self.g[x] not in B2.index:
                raise BundleError(f"base map bad at {x!r}")
            if (self.g[x] == B2.one) != (x == B.one):
                raise BundleError(f"base map top condition fails at {x!r}")
            m = self.eta.get(x)
            if m is None:
                raise BundleError(f"missing fibre morphism at {x!r}")
        for (a, b) in B.covers():
            if not B2.leq(self.g[a], self.g[b]):
                raise BundleError(f"base map not order-preserving on {a!r} < {b!r}")
            lhs = compose_morphisms(self.eta[b], source.morphism(a, b))
            rhs = compose_morphisms(target.morphism(self.g[a], self.g[b]),
                                    self.eta[a])
            if lhs.f != rhs.f or any(lhs.tau[y] != rhs.tau[y] for y in lhs.f):
                raise BundleError(f"naturality fails on base cover {a!r} < {b!r}")


def apply_bundle_morphism(bm: BundleMorphism, tot_src: TotalColouredPoset = None,
                          tot_tgt: TotalColouredPoset = None) -> ColouredPosetMorphism:
    """The induced morphism between the two total coloured posets."""
    if tot_src is None:
        tot_src = total(bm.source)
    if tot_tgt is None:
        tot_tgt = total(bm.target)
    f = {}
    tau = {}
    for (x, y) in tot_src.poset.elements:
        m = bm.eta[x]
        f[(x, y)] = (bm.g[x], m.f[y])
        tau[(x, y)] = m.tau[y]
    return ColouredPosetMorphism(tot_src.total, tot_tgt.total, f, tau)
