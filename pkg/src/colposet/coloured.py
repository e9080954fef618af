"""Coloured posets, their morphisms, and the two chain complexes.

A coloured poset assigns a free module to every element and a matrix to
every relation, functorially. Two complexes compute its homology: the
weak one indexed by multichains below the top (unbounded, truncated at a
caller-chosen degree) and the strict one indexed by chains without repeats
(bounded). They are homotopy equivalent, so homology computations use the
strict complex; morphisms however only act on the weak complex, since a
non-injective element map can collapse a strict chain into one with repeats.
"""
from __future__ import annotations

from dataclasses import dataclass

from .linalg import FreeChainComplex, HomologySummary, complex_homology
from .matrix import Matrix, MatrixBuilder
from .poset import Poset, label_to_json, from_json as poset_from_json
from .rings import Ring, parse_ring

DEFAULT_TRUNCATION = 6


class ColouredError(ValueError):
    pass


class ColouredPoset:
    """Poset plus a functorial assignment of free modules and matrices.

    cover_maps holds one matrix per cover (lower, upper), of shape
    dims[upper] x dims[lower]. Path independence of composites is checked
    at construction and the full pairwise map table is cached.
    """

    __slots__ = ("poset", "ring", "dims", "cover_maps", "_maps")

    def __init__(self, poset: Poset, ring: Ring, dims: dict, cover_maps: dict):
        self.poset = poset
        self.ring = ring
        self.dims = {}
        for e in poset.elements:
            if e not in dims:
                raise ColouredError(f"missing dimension for {e!r}")
            d = int(dims[e])
            if d < 0:
                raise ColouredError(f"negative dimension at {e!r}")
            self.dims[e] = d
        covers = poset.covers()
        self.cover_maps = {}
        for (a, b) in covers:
            if (a, b) not in cover_maps:
                raise ColouredError(f"missing map for cover {a!r} < {b!r}")
            m = cover_maps[(a, b)]
            if m.ring != ring:
                raise ColouredError(f"map for {a!r} < {b!r} has wrong ring")
            if m.shape != (self.dims[b], self.dims[a]):
                raise ColouredError(
                    f"map for {a!r} < {b!r} has shape {m.shape}, "
                    f"expected {(self.dims[b], self.dims[a])}")
            self.cover_maps[(a, b)] = m
        extra = set(cover_maps) - set(self.cover_maps)
        if extra:
            raise ColouredError(f"maps given for non-covers: {sorted(extra, key=str)}")
        self._maps = self._close()

    def _close(self):
        """All-pairs composites; raises on any non-commuting pair of paths."""
        P = self.poset
        order = sorted(P.elements, key=lambda e: (len(P.down_set(e)), str(e)))
        below = {y: P.lower_covers(y) for y in P.elements}
        maps = {}
        for x in P.elements:
            maps[(x, x)] = Matrix.identity(self.ring, self.dims[x])
            for y in order:
                if y == x or not P.leq(x, y):
                    continue
                composite = None
                for z in below[y]:
                    if not P.leq(x, z):
                        continue
                    cand = self.cover_maps[(z, y)] @ maps[(x, z)]
                    if composite is None:
                        composite = cand
                    elif composite != cand:
                        raise ColouredError(
                            f"path independence fails between {x!r} and {y!r}")
                maps[(x, y)] = composite
        return maps

    def dim(self, x) -> int:
        return self.dims[x]

    def map(self, a, b) -> Matrix:
        """The matrix of the colouring along a <= b."""
        try:
            return self._maps[(a, b)]
        except KeyError:
            raise ColouredError(f"{a!r} <= {b!r} does not hold")

    def restrict(self, labels) -> "ColouredPoset":
        sub = self.poset.subposet(labels)
        dims = {e: self.dims[e] for e in sub.elements}
        cmaps = {(a, b): self.map(a, b) for a, b in sub.covers()}
        return ColouredPoset(sub, self.ring, dims, cmaps)

    @classmethod
    def constant(cls, poset: Poset, ring: Ring, dim: int) -> "ColouredPoset":
        dims = {e: dim for e in poset.elements}
        cmaps = {c: Matrix.identity(ring, dim) for c in poset.covers()}
        return cls(poset, ring, dims, cmaps)

    def to_json(self):
        return {
            "poset": self.poset.to_json(),
            "ring": self.ring.tag,
            "dims": {str(label_to_json(e)): self.dims[e] for e in self.poset.elements},
            "maps": {
                f"{label_to_json(a)}<{label_to_json(b)}": m.to_json()
                for (a, b), m in self.cover_maps.items()
            },
        }


def coloured_from_json(data) -> ColouredPoset:
    poset = poset_from_json(data["poset"])
    ring = parse_ring(data["ring"])
    by_key = {str(label_to_json(e)): e for e in poset.elements}
    dims = {}
    for k, v in data["dims"].items():
        if k not in by_key:
            raise ColouredError(f"dims key {k!r} is not an element")
        dims[by_key[k]] = int(v)
    cmaps = {}
    for k, rows in data.get("maps", {}).items():
        parts = k.split("<")
        if len(parts) != 2 or parts[0] not in by_key or parts[1] not in by_key:
            raise ColouredError(f"bad map key {k!r}")
        a, b = by_key[parts[0]], by_key[parts[1]]
        cmaps[(a, b)] = Matrix.from_json(ring, rows, dims[b], dims[a])
    return ColouredPoset(poset, ring, dims, cmaps)


# ---------------------------------------------------------------------------
# morphisms


class ColouredPosetMorphism:
    """Order map f with per-element matrices tau, natural on every cover.

    f must send exactly the top to the top; this is what lets the element
    map act on chains avoiding the top.
    """

    __slots__ = ("source", "target", "f", "tau")

    def __init__(self, source: ColouredPoset, target: ColouredPoset,
                 f: dict, tau: dict):
        if source.ring != target.ring:
            raise ColouredError("morphism between different rings")
        self.source = source
        self.target = target
        self.f = dict(f)
        self.tau = dict(tau)
        P, Q = source.poset, target.poset
        for x in P.elements:
            if x not in self.f:
                raise ColouredError(f"element map misses {x!r}")
            if self.f[x] not in Q.index:
                raise ColouredError(f"element map sends {x!r} outside the target")
            if (self.f[x] == Q.one) != (x == P.one):
                raise ColouredError(f"top condition fails at {x!r}")
            t = self.tau.get(x)
            if t is None:
                raise ColouredError(f"tau misses {x!r}")
            want = (target.dims[self.f[x]], source.dims[x])
            if t.shape != want:
                raise ColouredError(f"tau at {x!r} has shape {t.shape}, expected {want}")
        for (a, b) in P.covers():
            if not Q.leq(self.f[a], self.f[b]):
                raise ColouredError(f"element map not order-preserving on {a!r} < {b!r}")
            lhs = self.tau[b] @ source.map(a, b)
            rhs = target.map(self.f[a], self.f[b]) @ self.tau[a]
            if lhs != rhs:
                raise ColouredError(f"naturality fails on cover {a!r} < {b!r}")

    @classmethod
    def identity(cls, cp: ColouredPoset) -> "ColouredPosetMorphism":
        f = {e: e for e in cp.poset.elements}
        tau = {e: Matrix.identity(cp.ring, cp.dims[e]) for e in cp.poset.elements}
        return cls(cp, cp, f, tau)


def compose_morphisms(m2: ColouredPosetMorphism,
                      m1: ColouredPosetMorphism) -> ColouredPosetMorphism:
    """The composite m2 after m1."""
    if m1.target is not m2.source and m1.target.poset.elements != m2.source.poset.elements:
        raise ColouredError("morphisms do not compose")
    f = {x: m2.f[m1.f[x]] for x in m1.f}
    tau = {x: m2.tau[m1.f[x]] @ m1.tau[x] for x in m1.f}
    return ColouredPosetMorphism(m1.source, m2.target, f, tau)


def validate_morphism(source, target, f, tau) -> dict:
    """Non-throwing validation; returns {"ok": bool, "error": str or None}."""
    try:
        ColouredPosetMorphism(source, target, f, tau)
        return {"ok": True, "error": None}
    except ColouredError as e:
        return {"ok": False, "error": str(e)}


# ---------------------------------------------------------------------------
# chain complexes


@dataclass
class ChainBasis:
    """Ordered basis of one chain degree: chains with per-chain offsets."""

    chains: tuple
    offsets: tuple
    widths: tuple
    dim: int

    def slot(self, chain) -> int:
        return self._index[chain]

    def offset(self, chain) -> int:
        return self.offsets[self._index[chain]]

    def __post_init__(self):
        self._index = {c: i for i, c in enumerate(self.chains)}


def _basis(cp: ColouredPoset, k: int, strict: bool) -> ChainBasis:
    P = cp.poset
    if k == 0:
        chains = [()]
        widths = [cp.dims[P.one]]
    else:
        domain = P.without_top()
        chains = (P.strict_chains(k, domain) if strict
                  else P.multichains(k, domain))
        widths = [cp.dims[c[0]] for c in chains]
    offsets = []
    total = 0
    for w in widths:
        offsets.append(total)
        total += w
    return ChainBasis(tuple(chains), tuple(offsets), tuple(widths), total)


def s_basis(cp: ColouredPoset, k: int) -> ChainBasis:
    """Multichain basis of the weak complex in degree k."""
    return _basis(cp, k, strict=False)


def c_basis(cp: ColouredPoset, k: int) -> ChainBasis:
    """Strict-chain basis of the bounded complex in degree k."""
    return _basis(cp, k, strict=True)


def chain_differential(cp: ColouredPoset, k: int, src: ChainBasis,
                       dst: ChainBasis) -> Matrix:
    """Degree-k differential: push the first entry up, alternate omissions.

    d(l x1...xk) = F(x1<=x2)(l) x2...xk - sum_{i>=2} (-1)^i l x1...^xi...xk,
    and in degree 1, d(l x) = F(x<=1)(l).
    """
    P = cp.poset
    mb = MatrixBuilder(cp.ring, dst.dim, src.dim)
    for ci, chain in enumerate(src.chains):
        off = src.offsets[ci]
        if src.widths[ci] == 0:
            continue
        if k == 1:
            mb.add_block(0, off, cp.map(chain[0], P.one))
            continue
        head = chain[1:]
        mb.add_block(dst.offset(head), off, cp.map(chain[0], chain[1]))
        for i in range(2, k + 1):
            rest = chain[:i - 1] + chain[i:]
            sign = 1 if i % 2 == 1 else -1  # -(-1)^i
            mb.add_scaled_identity(dst.offset(rest), off, src.widths[ci],
                                   cp.ring.canon(sign))
    return mb.build()


def s_complex(cp: ColouredPoset, k_max: int = DEFAULT_TRUNCATION) -> FreeChainComplex:
    """Weak complex truncated at k_max; homology certified below k_max."""
    if k_max < 1:
        raise ColouredError("k_max must be at least 1")
    bases = [s_basis(cp, k) for k in range(k_max + 1)]
    dims = {k: b.dim for k, b in enumerate(bases)}
    diff = {k: chain_differential(cp, k, bases[k], bases[k - 1])
            for k in range(1, k_max + 1)}
    return FreeChainComplex(cp.ring, dims, diff, top_degree=k_max)


def c_complex(cp: ColouredPoset) -> FreeChainComplex:
    """Strict-chain complex; bounded, so complete in every degree."""
    bases = [c_basis(cp, 0)]
    k = 1
    while True:
        b = _basis(cp, k, strict=True)
        if not b.chains:
            break
        bases.append(b)
        k += 1
    dims = {k: b.dim for k, b in enumerate(bases)}
    diff = {k: chain_differential(cp, k, bases[k], bases[k - 1])
            for k in range(1, len(bases))}
    return FreeChainComplex(cp.ring, dims, diff, top_degree=len(bases))


def homology(cp: ColouredPoset, degrees=None) -> HomologySummary:
    C = c_complex(cp)
    if degrees is None:
        degrees = range(0, C.max_degree + 1)
    return complex_homology(C, degrees)


def s_chain_map(m: ColouredPosetMorphism, k_max: int = DEFAULT_TRUNCATION) -> dict:
    """Degree-wise matrices of the map the morphism induces on weak chains.

    A multichain goes to its elementwise image (the top condition keeps it
    away from the top) and the coefficient is pushed through tau at the
    first entry.
    """
    out = {}
    for k in range(k_max + 1):
        src = s_basis(m.source, k)
        dst = s_basis(m.target, k)
        mb = MatrixBuilder(m.source.ring, dst.dim, src.dim)
        for ci, chain in enumerate(src.chains):
            if src.widths[ci] == 0:
                continue
            if k == 0:
                mb.add_block(0, 0, m.tau[m.source.poset.one])
                continue
            image = tuple(m.f[x] for x in chain)
            mb.add_block(dst.offset(image), src.offsets[ci], m.tau[chain[0]])
        out[k] = mb.build()
    return out
