"""Bicomplex of a bundle, its total complex, the comparison chain map, the
pages of the column filtration, and long-exact-sequence audits.

The bicomplex pairs strict base sequences with fibre multichains. Its rows
reuse the strict-chain differential of the base coloured by degree-q weak
chains of the fibres; its columns are the fibre differentials carrying a
total-degree sign, so the two anticommute. Pages of the filtration by base
length are computed over fields through exact subquotient ranks. The
comparison map into the weak complex of the total coloured poset re-indexes
generators along monotone grid paths; it is verified to be a chain map
generator by generator, which pins down every sign convention in here.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .bundle import (
    Bundle,
    fibre_homology_colouring,
    q_chain_colouring,
    total,
)
from .coloured import (
    ChainBasis,
    _basis,
    chain_differential,
    homology as coloured_homology,
    s_basis,
    s_complex,
)
from .linalg import (
    FreeChainComplex,
    LesReport,
    complex_homology,
    homology_basis,
    induced_homology_map,
    kernel_basis,
    les_exactness,
    rank,
    rref,
    solve,
)
from .matrix import Matrix, MatrixBuilder
from .poset import admissible_via, is_specially_admissible, label_to_json


class SpecseqError(ValueError):
    pass


# ---------------------------------------------------------------------------
# the bicomplex


class Bicomplex:
    """Blocks of strict base sequences against fibre multichains.

    Block (p, q) is spanned by generators (x1 < ... < xp, y1 <= ... <= yq)
    with the base sequence avoiding the base top and the fibre multichain
    living in the fibre over x1 minus its top; p = 0 blocks sit over the
    fibre of the base top. The horizontal differential is the strict-chain
    differential of the base coloured by degree-q weak chains, so the block
    layout is exactly that colouring's chain basis. The vertical one is the
    fibre differential times (-1)^(p+q). All three identities (both squares
    zero, anticommutation) are verified exactly at construction.
    """

    def __init__(self, xi: Bundle, q_max: int, check: bool = True):
        if q_max < 1:
            raise SpecseqError("q_max must be at least 1")
        self.bundle = xi
        self.ring = xi.ring
        self.q_max = q_max
        B = xi.base
        # one coloured poset per fibre degree; its chain bases are the blocks
        self._sq = {q: q_chain_colouring(xi, q) for q in range(q_max + 1)}
        self._bb = {}
        p = 0
        while True:
            row = {q: _basis(self._sq[q], p, strict=True) for q in range(q_max + 1)}
            if p > 0 and not row[0].chains:
                break
            for q in range(q_max + 1):
                self._bb[(p, q)] = row[q]
            p += 1
        self.p_max = p - 1
        self._fb = {}
        for x in B.elements:
            for q in range(q_max + 1):
                self._fb[(x, q)] = s_basis(xi.fibres[x], q)
        self.d_h = {}
        for q in range(q_max + 1):
            for p in range(1, self.p_max + 1):
                self.d_h[(p, q)] = chain_differential(
                    self._sq[q], p, self._bb[(p, q)], self._bb[(p - 1, q)])
        # vertical part: block diagonal over base sequences
        fibre_d = {}
        for x in B.elements:
            for q in range(1, q_max + 1):
                fibre_d[(x, q)] = chain_differential(
                    xi.fibres[x], q, self._fb[(x, q)], self._fb[(x, q - 1)])
        self.d_v = {}
        for q in range(1, q_max + 1):
            for p in range(self.p_max + 1):
                src, dst = self._bb[(p, q)], self._bb[(p, q - 1)]
                mb = MatrixBuilder(self.ring, dst.dim, src.dim)
                sign = -1 if (p + q) % 2 else 1
                for ci, c in enumerate(src.chains):
                    x1 = c[0] if p else B.one
                    mb.add_block(dst.offsets[ci], src.offsets[ci],
                                 fibre_d[(x1, q)], sign=sign)
                self.d_v[(p, q)] = mb.build()
        if check:
            self._verify_identities()

    def _verify_identities(self):
        for p in range(self.p_max + 1):
            for q in range(self.q_max + 1):
                if p >= 2 and not (self.d_h[(p - 1, q)] @ self.d_h[(p, q)]).is_zero():
                    raise SpecseqError(
                        f"horizontal square is nonzero at block ({p}, {q}); "
                        "sign-convention bug")
                if q >= 2 and not (self.d_v[(p, q - 1)] @ self.d_v[(p, q)]).is_zero():
                    raise SpecseqError(
                        f"vertical square is nonzero at block ({p}, {q}); "
                        "sign-convention bug")
                if p >= 1 and q >= 1:
                    anti = (self.d_h[(p, q - 1)] @ self.d_v[(p, q)]
                            + self.d_v[(p - 1, q)] @ self.d_h[(p, q)])
                    if not anti.is_zero():
                        raise SpecseqError(
                            f"differentials do not anticommute at block ({p}, {q}); "
                            "sign-convention bug")

    # -- bases and accessors -------------------------------------------------

    def block_basis(self, p: int, q: int) -> ChainBasis:
        """Strict base sequences of length p, widths = degree-q fibre chains."""
        b = self._bb.get((p, q))
        if b is None:
            if not (0 <= q <= self.q_max):
                raise SpecseqError(f"block ({p}, {q}) outside the truncation")
            return ChainBasis((), (), (), 0)
        return b

    def fibre_basis(self, x, q: int) -> ChainBasis:
        return self._fb[(x, q)]

    def block_dim(self, p: int, q: int) -> int:
        return self.block_basis(p, q).dim

    def dh(self, p: int, q: int) -> Matrix:
        m = self.d_h.get((p, q))
        if m is None:
            return Matrix.zeros(self.ring, self.block_dim(p - 1, q) if p >= 1 else 0,
                                self.block_dim(p, q))
        return m

    def dv(self, p: int, q: int) -> Matrix:
        m = self.d_v.get((p, q))
        if m is None:
            return Matrix.zeros(self.ring, self.block_dim(p, q - 1) if q >= 1 else 0,
                                self.block_dim(p, q))
        return m

    def blocks(self):
        return sorted(self._bb)


def bicomplex(xi: Bundle, q_max: int) -> Bicomplex:
    return Bicomplex(xi, q_max)


# ---------------------------------------------------------------------------
# the total complex


def _total_with_layout(K: Bicomplex, n_max: int):
    """Total complex plus, per degree, the (p, q, offset, dim) block list.

    Blocks are laid out by ascending base length p, so the filtration by
    base length is by coordinate prefixes.
    """
    if n_max < 1:
        raise SpecseqError("n_max must be at least 1")
    if n_max > K.q_max:
        raise SpecseqError(
            f"bicomplex truncated at q_max={K.q_max}, too small for n_max={n_max}")
    n_top = min(n_max + 1, K.q_max)
    layout, dims = {}, {}
    for n in range(n_top + 1):
        blocks, off = [], 0
        for p in range(min(K.p_max, n) + 1):
            d = K.block_dim(p, n - p)
            blocks.append((p, n - p, off, d))
            off += d
        layout[n] = tuple(blocks)
        dims[n] = off
    diff = {}
    for n in range(1, n_top + 1):
        tgt = {(p, q): off for (p, q, off, d) in layout[n - 1]}
        mb = MatrixBuilder(K.ring, dims[n - 1], dims[n])
        for (p, q, off, d) in layout[n]:
            if p >= 1:
                mb.add_block(tgt[(p - 1, q)], off, K.dh(p, q))
            if q >= 1:
                mb.add_block(tgt[(p, q - 1)], off, K.dv(p, q))
        diff[n] = mb.build()
    T = FreeChainComplex(K.ring, dims, diff, top_degree=n_top)
    return T, layout


def total_complex(K: Bicomplex, n_max: int) -> FreeChainComplex:
    """Direct sum along antidiagonals; homology certified below n_max."""
    return _total_with_layout(K, n_max)[0]


# ---------------------------------------------------------------------------
# the comparison chain map


def _alpha(q: int) -> int:
    return 1 if q % 4 in (1, 2) else 0


def _grid_paths(p: int, q: int):
    """Monotone vertex paths through the (p+1) x (q+1) grid, corner dropped.

    Yields (vertices, m): p+q vertices from (1,1) ending one step short of
    (p+1, q+1), and the count m of grid cells strictly under the path (cell
    (i, j) counts when the right-step out of column i happens above row j).
    """
    for rights in itertools.combinations(range(p + q), p):
        rset = set(rights)
        i = j = 1
        verts = [(1, 1)]
        m = 0
        for s in range(p + q):
            if s in rset:
                m += j - 1
                i += 1
            else:
                j += 1
            verts.append((i, j))
        yield tuple(verts[:-1]), m


def _phi_block(xi: Bundle, c: tuple, m: tuple) -> dict:
    """Image of one generator block: multichain in the total poset -> sign.

    Coefficients ride along unchanged because every path starts at the
    generator's own (x1, y1); distinct paths can hit the same multichain
    when the fibre multichain repeats, so contributions accumulate.
    """
    p, q = len(c), len(m)
    B = xi.base
    if q == 0:
        return {tuple((x, xi.fibres[x].poset.one) for x in c): 1}
    s = -1 if _alpha(q) else 1
    if p == 0:
        return {tuple((B.one, y) for y in m): s}
    cols = tuple(c) + (B.one,)
    fs = [xi.morphism(c[0], x).f for x in cols]
    grid = {}
    for i, x in enumerate(cols, start=1):
        f = fs[i - 1]
        for j, y in enumerate(m, start=1):
            grid[(i, j)] = (x, f[y])
        grid[(i, q + 1)] = (x, xi.fibres[x].poset.one)
    out = {}
    for verts, mz in _grid_paths(p, q):
        z = tuple(grid[v] for v in verts)
        coeff = out.get(z, 0) + s * (-1 if mz % 2 else 1)
        if coeff:
            out[z] = coeff
        elif z in out:
            del out[z]
    return out


def _total_diff_terms(xi: Bundle, c: tuple, m: tuple):
    """Symbolic total differential of a generator block.

    Yields ((c', m'), coeff) with coeff a Matrix or an integer scalar,
    mirroring the assembled horizontal and vertical matrices exactly.
    """
    p, q = len(c), len(m)
    B = xi.base
    if p >= 1:
        mor = xi.morphism(c[0], c[1] if p >= 2 else B.one)
        w = m[0] if q else xi.fibres[c[0]].poset.one
        yield (c[1:], tuple(mor.f[y] for y in m)), mor.tau[w]
        for i in range(2, p + 1):
            yield (c[:i - 1] + c[i:], m), (1 if i % 2 else -1)
    if q >= 1:
        s = -1 if (p + q) % 2 else 1
        F = xi.fibres[c[0] if p else B.one]
        if q == 1:
            head = F.map(m[0], F.poset.one)
        else:
            head = F.map(m[0], m[1])
        yield (c, m[1:]), (head if s == 1 else head.scale(-1))
        for j in range(2, q + 1):
            yield (c, m[:j - 1] + m[j:]), s * (1 if j % 2 else -1)


def _weak_diff_terms(tcp_total, z: tuple):
    """Symbolic weak-complex differential of a multichain in the total poset."""
    P = tcp_total.poset
    n = len(z)
    if n == 1:
        yield (), tcp_total.map(z[0], P.one)
        return
    yield z[1:], tcp_total.map(z[0], z[1])
    for i in range(2, n + 1):
        yield z[:i - 1] + z[i:], (1 if i % 2 else -1)


class PhiMap:
    """The comparison chain map from the total complex to weak chains.

    Construction verifies, generator by generator, that it commutes with the
    differentials in every built degree; a failure aborts since it would
    mean a broken sign convention. Degree matrices against the canonical
    weak-chain bases are assembled on demand.
    """

    def __init__(self, xi: Bundle, n_max: int, check: bool = True):
        self.bundle = xi
        self.ring = xi.ring
        self.n_max = n_max
        self.K = Bicomplex(xi, n_max, check=check)
        self.T, self.layout = _total_with_layout(self.K, n_max)
        self.tcp = total(xi)
        self.images = {}
        for n in sorted(self.layout):
            for (p, q, off, d) in self.layout[n]:
                blk = {}
                bb = self.K.block_basis(p, q)
                for c in bb.chains:
                    x1 = c[0] if p else xi.base.one
                    for mch in self.K.fibre_basis(x1, q).chains:
                        blk[(c, mch)] = _phi_block(xi, c, mch)
                self.images[(p, q)] = blk
        if check:
            self._verify_chain_map()
        self._matrices = {}
        self._sbases = {}
        self._scomplex = None

    def _verify_chain_map(self):
        xi = self.bundle
        E = self.tcp.total
        idcache = {}

        def ident(w, coeff):
            if w not in idcache:
                idcache[w] = Matrix.identity(self.ring, w)
            return idcache[w].scale(coeff)

        for n in range(1, self.T.top_degree + 1):
            for (p, q, off, d) in self.layout[n]:
                bb = self.K.block_basis(p, q)
                for ci, c in enumerate(bb.chains):
                    x1 = c[0] if p else xi.base.one
                    fb = self.K.fibre_basis(x1, q)
                    for mi, mch in enumerate(fb.chains):
                        w = fb.widths[mi]
                        if w == 0:
                            continue
                        lhs = {}
                        for (tc, tm), coeff in _total_diff_terms(xi, c, mch):
                            img = self.images[(len(tc), len(tm))][(tc, tm)]
                            for z, cz in img.items():
                                M = (coeff.scale(cz) if isinstance(coeff, Matrix)
                                     else ident(w, self.ring.canon(coeff * cz)))
                                lhs[z] = (lhs[z] + M) if z in lhs else M
                        rhs = {}
                        for z, cz in self.images[(p, q)][(c, mch)].items():
                            for z2, coeff in _weak_diff_terms(E, z):
                                M = (coeff.scale(cz) if isinstance(coeff, Matrix)
                                     else ident(w, self.ring.canon(coeff * cz)))
                                rhs[z2] = (rhs[z2] + M) if z2 in rhs else M
                        for z in set(lhs) | set(rhs):
                            a, b = lhs.get(z), rhs.get(z)
                            bad = ((b is None and not a.is_zero())
                                   or (a is None and not b.is_zero())
                                   or (a is not None and b is not None and a != b))
                            if bad:
                                raise SpecseqError(
                                    f"comparison map is not a chain map on the "
                                    f"block ({p}, {q}) generator {c!r} x {mch!r}")

    def _s_basis(self, n: int) -> ChainBasis:
        if n not in self._sbases:
            self._sbases[n] = s_basis(self.tcp.total, n)
        return self._sbases[n]

    def matrix(self, n: int) -> Matrix:
        """Degree-n matrix into the weak-chain basis of the total poset."""
        if n in self._matrices:
            return self._matrices[n]
        if n not in self.layout:
            raise SpecseqError(f"degree {n} was not built")
        sb = self._s_basis(n)
        mb = MatrixBuilder(self.ring, sb.dim, self.T.dim(n))
        for (p, q, off, d) in self.layout[n]:
            bb = self.K.block_basis(p, q)
            for ci, c in enumerate(bb.chains):
                x1 = c[0] if p else self.bundle.base.one
                fb = self.K.fibre_basis(x1, q)
                for mi, mch in enumerate(fb.chains):
                    w = fb.widths[mi]
                    if w == 0:
                        continue
                    col = off + bb.offsets[ci] + fb.offsets[mi]
                    for z, cz in self.images[(p, q)][(c, mch)].items():
                        mb.add_scaled_identity(sb.offset(z), col, w,
                                               self.ring.canon(cz))
        self._matrices[n] = mb.build()
        return self._matrices[n]

    def weak_complex(self) -> FreeChainComplex:
        if self._scomplex is None:
            self._scomplex = s_complex(self.tcp.total, self.T.top_degree)
        return self._scomplex


def phi(xi: Bundle, n_max: int) -> PhiMap:
    return PhiMap(xi, n_max)


def quasi_iso_check(xi: Bundle, n_max: int, force: bool = False) -> dict:
    """Rank-checks that the comparison map is a homology isomorphism.

    Requires field coefficients and a specially admissible base; a base
    outside those hypotheses is refused unless force=True, in which case the
    report is marked as unsupported by the convergence theorem.
    """
    if not xi.ring.is_field:
        raise SpecseqError("quasi-isomorphism check needs field coefficients")
    cert = is_specially_admissible(xi.base)
    if cert is None and not force:
        raise SpecseqError(
            "base poset is not specially admissible, outside the theorem's "
            "hypotheses; pass force=True to run anyway")
    ph = PhiMap(xi, n_max)
    S = ph.weak_complex()
    fmap = {k: ph.matrix(k) for k in range(ph.T.top_degree + 1)}
    table = []
    ok = True
    for n in range(n_max):
        M = induced_homology_map({n: fmap[n], n + 1: fmap[n + 1]}, ph.T, S, n)
        dt = homology_basis(ph.T, n).dim
        ds = homology_basis(S, n).dim
        iso = dt == ds and rank(M) == dt
        table.append({"n": n, "dim_total_complex": dt,
                      "dim_poset_homology": ds, "isomorphism": iso})
        ok = ok and iso
    return {
        "ring": xi.ring.tag,
        "n_max": n_max,
        "specially_admissible": cert is not None,
        "supported_by_theorem": cert is not None,
        "table": table,
        "ok": ok,
    }


# ---------------------------------------------------------------------------
# pages of the filtration by base length


@dataclass
class Page:
    r: int
    dims: dict  # (p, q) -> dimension, all cells in the window


class _Filtration:
    """Exact subquotient data of the prefix filtration of the total complex.

    z(n, p, t) is a column basis of the vectors supported on blocks of base
    length at most p whose differential is supported on blocks of length at
    most t; every page entry is a difference of ranks of such bases.
    """

    def __init__(self, K: Bicomplex, n_max: int):
        self.K = K
        self.ring = K.ring
        self.T, self.layout = _total_with_layout(K, n_max)
        self._z = {}
        self._entry = {}
        self._reps = {}
        self._diffs = {}

    def _cols_end(self, n: int, p: int) -> int:
        end = 0
        for (bp, bq, off, d) in self.layout.get(n, ()):
            if bp <= p:
                end = off + d
        return end

    def _rows_start(self, n: int, t: int) -> int:
        # first coordinate of the blocks with base length above t
        for (bp, bq, off, d) in self.layout.get(n, ()):
            if bp > t:
                return off
        return self.T.dim(n)

    def z(self, n: int, p: int, t: int) -> Matrix:
        if p < 0 or n not in self.layout:
            return Matrix.zeros(self.ring, self.T.dim(n), 0)
        cols_end = self._cols_end(n, p)
        rows_start = self._rows_start(n - 1, t)
        key = (n, cols_end, rows_start)
        got = self._z.get(key)
        if got is not None:
            return got
        nrows = self.T.dim(n - 1)
        if n - 1 not in self.layout or rows_start >= nrows:
            kb = Matrix.identity(self.ring, cols_end)
        else:
            sub = self.T.d(n).submatrix(rows=range(rows_start, nrows),
                                        cols=range(cols_end))
            kb = kernel_basis(sub)
        mb = MatrixBuilder(self.ring, self.T.dim(n), kb.ncols)
        mb.add_block(0, 0, kb)
        out = mb.build()
        self._z[key] = out
        return out

    def entry(self, r: int, p: int, q: int):
        """(dimension, cycle basis, boundary-and-lower generators) at page r."""
        key = (r, p, q)
        got = self._entry.get(key)
        if got is not None:
            return got
        n = p + q
        Z = self.z(n, p, p - r)
        parts = []
        D1 = self.z(n, p - 1, p - r)
        if D1.ncols:
            parts.append(D1)
        S = self.z(n + 1, p + r - 1, p)
        if S.ncols:
            parts.append(self.T.d(n + 1) @ S)
        D = (Matrix.hstack(parts) if parts
             else Matrix.zeros(self.ring, self.T.dim(n), 0))
        out = (Z.ncols - rank(D), Z, D)
        self._entry[key] = out
        return out

    def reps(self, r: int, p: int, q: int) -> Matrix:
        key = (r, p, q)
        got = self._reps.get(key)
        if got is not None:
            return got
        dim, Z, D = self.entry(r, p, q)
        if dim == 0:
            out = Matrix.zeros(self.ring, self.T.dim(p + q), 0)
        else:
            _, piv = rref(Matrix.hstack([D, Z]))
            take = [j - D.ncols for j in piv if j >= D.ncols]
            out = Z.submatrix(cols=take)
        self._reps[key] = out
        return out

    def diff(self, r: int, p: int, q: int) -> Matrix:
        """Page-r differential out of (p, q), landing in (p-r, q+r-1)."""
        if r == 0:
            return self.K.dv(p, q)
        key = (r, p, q)
        got = self._diffs.get(key)
        if got is not None:
            return got
        p2, q2 = p - r, q + r - 1
        dim_s, _, _ = self.entry(r, p, q)
        dim_t, _, Dt = self.entry(r, p2, q2)
        Rs = self.reps(r, p, q)
        Rt = self.reps(r, p2, q2)
        img = self.T.d(p + q) @ Rs
        sol = solve(Matrix.hstack([Dt, Rt]), img)
        out = sol.submatrix(rows=range(Dt.ncols, sol.nrows))
        self._diffs[key] = out
        return out


class PageSet:
    """Per-page dimensions in the validity window, differentials on demand."""

    def __init__(self, K: Bicomplex, n_max: int, r_max: int | None = None):
        if not K.ring.is_field:
            raise SpecseqError("pages need field coefficients; integral "
                               "coefficients are not supported")
        self.ring = K.ring
        self.p_max = K.p_max
        self.window = (0, n_max - 1)
        self.stable_r = K.p_max + 1
        self.r_max = self.stable_r if r_max is None else r_max
        self._flt = _Filtration(K, n_max)
        cells = [(p, n - p) for n in range(n_max)
                 for p in range(min(K.p_max, n) + 1)]
        self.pages = []
        for r in range(self.r_max + 1):
            if r == 0:
                dims = {(p, q): K.block_dim(p, q) for (p, q) in cells}
            else:
                dims = {(p, q): self._flt.entry(r, p, q)[0] for (p, q) in cells}
            self.pages.append(Page(r, dims))
        self.einf = {(p, q): self._flt.entry(self.stable_r, p, q)[0]
                     for (p, q) in cells}
        hs = complex_homology(self._flt.T, range(n_max))
        self.h_total = {n: hs.rank(n) for n in range(n_max)}
        self.convergence = {}
        for n in range(n_max):
            s = sum(d for (p, q), d in self.einf.items() if p + q == n)
            self.convergence[n] = (s, self.h_total[n])
        self.converges = all(a == b for a, b in self.convergence.values())

    def page(self, r: int) -> Page:
        if not (0 <= r <= self.r_max):
            raise SpecseqError(f"page {r} was not computed")
        return self.pages[r]

    def dim(self, r: int, p: int, q: int) -> int:
        return self.page(r).dims.get((p, q), 0)

    def differential(self, r: int, p: int, q: int) -> Matrix:
        return self._flt.diff(r, p, q)

    def to_json(self):
        def cells(dims):
            return [{"p": p, "q": q, "dim": d}
                    for (p, q), d in sorted(dims.items()) if d]

        return {
            "ring": self.ring.tag,
            "window": list(self.window),
            "stable_r": self.stable_r,
            "pages": [{"r": pg.r, "cells": cells(pg.dims)} for pg in self.pages],
            "einf": {"cells": cells(self.einf)},
            "convergence": {
                "ok": self.converges,
                "by_degree": [
                    {"n": n, "einf_sum": s, "total_homology": h}
                    for n, (s, h) in sorted(self.convergence.items())
                ],
            },
        }


def spectral_sequence(K: Bicomplex, n_max: int, r_max: int | None = None) -> PageSet:
    return PageSet(K, n_max, r_max)


def e2_direct(xi: Bundle, p_max: int, q_max: int) -> dict:
    """Base homology with fibre-homology coefficients, per fibre degree."""
    if not xi.ring.is_field:
        raise SpecseqError("fibre homology colouring needs field coefficients")
    out = {}
    for q in range(q_max + 1):
        hs = coloured_homology(fibre_homology_colouring(xi, q),
                               degrees=range(p_max + 1))
        for p in range(p_max + 1):
            out[(p, q)] = hs.rank(p)
    return out


# ---------------------------------------------------------------------------
# long-exact-sequence audits


@dataclass
class LesCheckReport:
    which: str
    witness: object
    les: LesReport
    quotient_shift: dict  # n -> (quotient homology dim, shifted side dim)
    ok: bool

    def to_json(self):
        return {
            "which": self.which,
            "witness": label_to_json(self.witness),
            "degrees": list(self.les.degrees),
            "exact_at": {f"{pos}:{n}": v
                         for (pos, n), v in sorted(self.les.exact_at.items())},
            "quotient_shift": {
                str(n): {"quotient_dim": a, "side_dim": b, "match": a == b}
                for n, (a, b) in sorted(self.quotient_shift.items())
            },
            "ok": self.ok,
        }


def les_check(xi: Bundle, x, n_max: int, which: str = "total-complex") -> LesCheckReport:
    """Audit of the two-sided splitting along an admissibility witness.

    The part of the complex over the complement of the witness interval is a
    subcomplex; exactness of the induced long sequence is checked at every
    position below n_max, and the quotient homology is compared against the
    degree-shifted homology of the interval side.
    """
    if not xi.ring.is_field:
        raise SpecseqError("long exact sequence audit needs field coefficients")
    B = xi.base
    if admissible_via(B, x) is None:
        raise SpecseqError(f"{x!r} is not an admissibility witness for the base")
    interval = set(B.down_set(x))
    degrees = range(n_max)
    if which == "total-complex":
        K = Bicomplex(xi, n_max)
        T, layout = _total_with_layout(K, n_max)
        sub_idx = {}
        for n, blocks in layout.items():
            idx = []
            for (p, q, off, d) in blocks:
                bb = K.block_basis(p, q)
                for ci, c in enumerate(bb.chains):
                    if all(e not in interval for e in c):
                        start = off + bb.offsets[ci]
                        idx.extend(range(start, start + bb.widths[ci]))
            sub_idx[n] = idx
        rep = les_exactness(T, sub_idx, degrees)
        side = total_complex(Bicomplex(xi.restrict(B.down_set(x)), n_max), n_max)
    elif which == "S-complex":
        tcp = total(xi)
        S = s_complex(tcp.total, n_max)
        sub_idx = {}
        for n in range(n_max + 1):
            sb = s_basis(tcp.total, n)
            idx = []
            for ci, z in enumerate(sb.chains):
                if n == 0 or tcp.projection[z[0]] not in interval:
                    idx.extend(range(sb.offsets[ci],
                                     sb.offsets[ci] + sb.widths[ci]))
            sub_idx[n] = idx
        rep = les_exactness(S, sub_idx, degrees)
        side = s_complex(total(xi.restrict(B.down_set(x))).total, n_max)
    else:
        raise SpecseqError("which must be 'total-complex' or 'S-complex'")
    shift = {}
    ok = rep.ok
    for n in degrees:
        a = rep.dims[("quot", n)]
        b = homology_basis(side, n - 1).dim if n >= 1 else 0
        shift[n] = (a, b)
        ok = ok and a == b
    return LesCheckReport(which, x, rep, shift, ok)
