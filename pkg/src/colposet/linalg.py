"""Exact linear algebra and chain-complex homology.

Elimination is deterministic: pivots are the first nonzero entry scanning
columns left to right and rows top to bottom, and rref() returns the canonical
reduced row echelon form, so every basis derived here (kernels, images,
homology representatives) is reproducible across runs and platforms.

Over Q and Z the eliminations run fraction-free on integer rows (each row is
pre-scaled by the lcm of its denominators, which changes neither row space nor
kernel); Bareiss division keeps entries minor-sized. Prime fields use
vectorized int64 arithmetic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .matrix import Matrix, _mutable
from .rings import Ring, RingError, ZZ, mpq


class LinalgError(ValueError):
    pass


# ---------------------------------------------------------------------------
# elimination cores


def _fp_rref(ring: Ring, a: np.ndarray):
    """In-place mod-p Gauss-Jordan. Returns pivot column list."""
    p = ring.p
    m, n = a.shape
    r = 0
    pivots = []
    for c in range(n):
        if r == m:
            break
        col = a[r:, c]
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        inv = pow(int(a[r, c]), p - 2, p)
        a[r] = (a[r] * inv) % p
        rows = np.nonzero(a[:, c])[0]
        rows = rows[rows != r]
        if rows.size:
            a[rows] = (a[rows] - np.outer(a[rows, c], a[r])) % p
        pivots.append(c)
        r += 1
    return pivots


def _int_rows(ring: Ring, a: np.ndarray) -> np.ndarray:
    """Scale each row to integer entries (denominator lcm). Object array out."""
    out = a.astype(object, copy=True)
    if ring.kind == "z":
        return out
    m, n = out.shape
    for i in range(m):
        den = 1
        for x in out[i]:
            if not isinstance(x, int):
                den = den * x.denominator // math.gcd(den, int(x.denominator))
        if den != 1:
            for j in range(n):
                x = out[i, j]
                out[i, j] = x * den if isinstance(x, int) else int(x * den)
        else:
            for j in range(n):
                out[i, j] = int(out[i, j])
    return out


def _bareiss_ref(a: np.ndarray) -> int:
    """Fraction-free REF on an integer object array, in place. Returns rank."""
    m, n = a.shape
    prev = 1
    r = 0
    for c in range(n):
        if r == m:
            break
        piv = None
        for i in range(r, m):
            if a[i, c] != 0:
                piv = i
                break
        if piv is None:
            continue
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        p = a[r, c]
        for i in range(r + 1, m):
            if a[i, c] != 0:
                a[i] = (a[i] * p - a[i, c] * a[r]) // prev
            elif prev != 1 or p != 1:
                a[i] = a[i] * p // prev
        prev = p
        r += 1
    return r


def _bareiss_jordan(a: np.ndarray):
    """Fraction-free Gauss-Jordan: full reduction, exact one-step division.

    After the sweep every pivot entry equals the returned denominator, and
    row/denominator is the canonical RREF row.
    """
    m, n = a.shape
    prev = 1
    r = 0
    pivots = []
    for c in range(n):
        if r == m:
            break
        piv = None
        for i in range(r, m):
            if a[i, c] != 0:
                piv = i
                break
        if piv is None:
            continue
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        p = a[r, c]
        for i in range(m):
            if i == r:
                continue
            if a[i, c] != 0:
                a[i] = (a[i] * p - a[i, c] * a[r]) // prev
            elif prev != 1 or p != 1:
                a[i] = a[i] * p // prev
        prev = p
        pivots.append(c)
        r += 1
    return pivots, prev


def rref(M: Matrix):
    """Canonical reduced row echelon form. Returns (R, pivot columns).

    Field rings only.
    """
    ring = M.ring
    if not ring.is_field:
        raise LinalgError("rref needs a field")
    if ring.kind == "fp":
        a = _mutable(M.a)
        pivots = _fp_rref(ring, a)
        return Matrix(ring, a, _canon=False), tuple(pivots)
    a = _int_rows(ring, M.a)
    pivots, den = _bareiss_jordan(a)
    r = len(pivots)
    m, n = a.shape
    out = np.empty((m, n), dtype=object)
    out[:] = 0
    for i in range(r):
        for j in range(n):
            x = a[i, j]
            if x:
                q = mpq(int(x), int(den))
                out[i, j] = int(q) if q.denominator == 1 else q
    return Matrix(ring, out, _canon=False), tuple(pivots)


def rank(M: Matrix) -> int:
    """Exact rank (over the fraction field for Z)."""
    ring = M.ring
    if M.a.size == 0:
        return 0
    if ring.kind == "fp":
        a = _mutable(M.a)
        return len(_fp_rref(ring, a))
    a = _int_rows(ring, M.a)
    return _bareiss_ref(a)


def kernel_basis(M: Matrix) -> Matrix:
    """Canonical kernel basis (columns), from the RREF. Field rings only."""
    R, pivots = rref(M)
    n = M.ncols
    free = [j for j in range(n) if j not in set(pivots)]
    K = Matrix.zeros(M.ring, n, len(free))
    a = _mutable(K.a)
    for k, j in enumerate(free):
        a[j, k] = 1
        for i, c in enumerate(pivots):
            v = R.a[i, j]
            if v != 0:
                a[c, k] = -v if M.ring.kind != "fp" else (-int(v)) % M.ring.p
    return Matrix(M.ring, a, _canon=False)


def column_space_basis(M: Matrix) -> Matrix:
    """Canonical basis (columns) of the column space: nonzero rows of rref(M^T)."""
    R, pivots = rref(M.T)
    return R.submatrix(rows=range(len(pivots))).T


def solve(A: Matrix, B: Matrix) -> Matrix:
    """One exact solution X of A X = B (free variables set to 0).

    Raises LinalgError if any column of B is outside the column space.
    """
    if A.ring != B.ring or A.nrows != B.nrows:
        raise LinalgError("shape/ring mismatch in solve")
    n, k = A.ncols, B.ncols
    R, pivots = rref(Matrix.hstack([A, B]))
    for c in pivots:
        if c >= n:
            raise LinalgError("inconsistent linear system")
    X = Matrix.zeros(A.ring, n, k)
    a = _mutable(X.a)
    for i, c in enumerate(pivots):
        a[c, :] = R.a[i, n:]
    return Matrix(A.ring, a, _canon=False)


# ---------------------------------------------------------------------------
# Smith normal form over Z


def smith_normal_form(M: Matrix):
    """Smith decomposition over Z: returns (U, D, V) with U @ M @ V = D,
    U and V unimodular, D diagonal with successive divisibility."""
    if M.ring != ZZ:
        raise LinalgError("smith_normal_form is defined over Z")
    A = _mutable(M.a).astype(object)
    m, n = A.shape
    U = np.eye(m, dtype=object)
    V = np.eye(n, dtype=object)

    def row_op(i, j, q):  # row_i -= q * row_j
        A[i] -= q * A[j]
        U[i] -= q * U[j]

    def col_op(i, j, q):  # col_i -= q * col_j
        A[:, i] -= q * A[:, j]
        V[:, i] -= q * V[:, j]

    t = 0
    while t < min(m, n):
        # locate smallest-magnitude nonzero pivot in A[t:, t:]
        best = None
        for i in range(t, m):
            for j in range(t, n):
                v = A[i, j]
                if v != 0 and (best is None or abs(v) < abs(A[best[0], best[1]])):
                    best = (i, j)
        if best is None:
            break
        bi, bj = best
        if bi != t:
            A[[t, bi]] = A[[bi, t]]
            U[[t, bi]] = U[[bi, t]]
        if bj != t:
            A[:, [t, bj]] = A[:, [bj, t]]
            V[:, [t, bj]] = V[:, [bj, t]]
        dirty = True
        while dirty:
            dirty = False
            for i in range(t + 1, m):
                if A[i, t] != 0:
                    q = A[i, t] // A[t, t]
                    row_op(i, t, q)
                    if A[i, t] != 0:  # remainder smaller than pivot: swap up
                        A[[t, i]] = A[[i, t]]
                        U[[t, i]] = U[[i, t]]
                        dirty = True
            for j in range(t + 1, n):
                if A[t, j] != 0:
                    q = A[t, j] // A[t, t]
                    col_op(j, t, q)
                    if A[t, j] != 0:
                        A[:, [t, j]] = A[:, [j, t]]
                        V[:, [t, j]] = V[:, [j, t]]
                        dirty = True
        # divisibility of the remaining block by the pivot
        fix = None
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if A[i, j] % A[t, t] != 0:
                    fix = i
                    break
            if fix is not None:
                break
        if fix is not None:
            row_op(t, fix, -1)  # add row fix to row t, retry
            continue
        if A[t, t] < 0:
            A[t] = -A[t]
            U[t] = -U[t]
        t += 1
    Um = Matrix(ZZ, U, _canon=False)
    Dm = Matrix(ZZ, A, _canon=False)
    Vm = Matrix(ZZ, V, _canon=False)
    return Um, Dm, Vm


def invariant_factors(M: Matrix):
    """Nonzero diagonal of the Smith form, in divisibility order."""
    _, D, _ = smith_normal_form(M)
    out = []
    for i in range(min(D.nrows, D.ncols)):
        v = D.a[i, i]
        if v != 0:
            out.append(int(v))
    return tuple(out)


# ---------------------------------------------------------------------------
# chain complexes


class FreeChainComplex:
    """Finitely generated free chain complex.

    dims maps degree -> rank, diff maps degree n -> the matrix of
    d_n : C_n -> C_{n-1}. Degrees not present are zero. top_degree marks the
    largest degree whose module AND outgoing differential are fully built;
    homology above top_degree-1 is not certified for truncated complexes.
    """

    def __init__(self, ring: Ring, dims: dict, diff: dict, top_degree: int | None = None,
                 check: bool = True):
        self.ring = ring
        self.dims = {n: d for n, d in dims.items() if d}
        self.diff = {n: m for n, m in diff.items()}
        degs = set(self.dims) | {0}
        self.min_degree = min(degs)
        self.max_degree = max(degs)
        self.top_degree = self.max_degree if top_degree is None else top_degree
        if check:
            self.validate()

    def dim(self, n: int) -> int:
        return self.dims.get(n, 0)

    def d(self, n: int) -> Matrix:
        m = self.diff.get(n)
        if m is None:
            return Matrix.zeros(self.ring, self.dim(n - 1), self.dim(n))
        return m

    def validate(self):
        for n, m in self.diff.items():
            if m.shape != (self.dim(n - 1), self.dim(n)):
                raise LinalgError(
                    f"d_{n} has shape {m.shape}, expected {(self.dim(n-1), self.dim(n))}")
            if m.ring != self.ring:
                raise RingError("differential ring mismatch")
        for n in sorted(self.diff):
            if n + 1 in self.diff:
                if not (self.d(n) @ self.d(n + 1)).is_zero():
                    raise LinalgError(f"d_{n} d_{n+1} != 0")


@dataclass
class HomologySummary:
    """Per-degree homology: free rank and (over Z) torsion invariant factors."""

    ring: Ring
    table: dict = field(default_factory=dict)  # n -> (rank, torsion tuple)

    def rank(self, n: int) -> int:
        return self.table.get(n, (0, ()))[0]

    def torsion(self, n: int):
        return self.table.get(n, (0, ()))[1]

    def nonzero_degrees(self):
        return sorted(n for n, (r, t) in self.table.items() if r or t)

    def to_json(self):
        return {
            str(n): {"rank": r, "torsion": list(t)}
            for n, (r, t) in sorted(self.table.items())
        }


def complex_homology(C: FreeChainComplex, degrees) -> HomologySummary:
    """Homology in the given degrees. Fields: ranks. Z: free rank + torsion."""
    out = HomologySummary(C.ring)
    rk_cache: dict[int, int] = {}

    def rk(n):
        if n not in rk_cache:
            rk_cache[n] = rank(C.d(n))
        return rk_cache[n]

    for n in degrees:
        dn = C.dim(n)
        if dn == 0:
            out.table[n] = (0, ())
            continue
        free = dn - rk(n) - rk(n + 1)
        if C.ring.is_field:
            out.table[n] = (free, ())
        else:
            tors = tuple(f for f in invariant_factors(C.d(n + 1)) if abs(f) > 1)
            out.table[n] = (free, tors)
    return out


@dataclass
class HomologyBasis:
    """Deterministic homology basis at one degree of a field complex.

    cycles: canonical kernel basis of d_n (columns).
    boundaries: canonical column basis of im d_{n+1}.
    reps: columns representing a homology basis (subset of cycle columns
    completing the boundaries).
    """

    degree: int
    cycles: Matrix
    boundaries: Matrix
    reps: Matrix

    @property
    def dim(self) -> int:
        return self.reps.ncols

    def coords(self, vectors: Matrix) -> Matrix:
        """Coordinates of cycle columns in this homology basis."""
        if self.dim == 0:
            if not solve_membership(self._bz(), vectors):
                raise LinalgError("vector is not a boundary in zero homology")
            return Matrix.zeros(vectors.ring, 0, vectors.ncols)
        X = solve(Matrix.hstack([self.boundaries, self.reps]), vectors)
        return X.submatrix(rows=range(self.boundaries.ncols, X.nrows))

    def _bz(self) -> Matrix:
        return self.boundaries


def solve_membership(A: Matrix, B: Matrix) -> bool:
    """True iff every column of B lies in the column space of A."""
    if B.is_zero():
        return True
    try:
        solve(A, B)
        return True
    except LinalgError:
        return False


def homology_basis(C: FreeChainComplex, n: int) -> HomologyBasis:
    if not C.ring.is_field:
        raise LinalgError("homology bases need a field")
    Z = kernel_basis(C.d(n))
    B = column_space_basis(C.d(n + 1))
    if Z.ncols == 0:
        reps = Matrix.zeros(C.ring, C.dim(n), 0)
        return HomologyBasis(n, Z, B, reps)
    _, pivots = rref(Matrix.hstack([B, Z]))
    take = [c - B.ncols for c in pivots if c >= B.ncols]
    reps = Z.submatrix(cols=take)
    return HomologyBasis(n, Z, B, reps)


def induced_homology_map(fmap: dict, C: FreeChainComplex, D: FreeChainComplex,
                         n: int) -> Matrix:
    """Matrix of H_n(f) in the deterministic homology bases.

    fmap maps degrees to matrices of a chain map C -> D; degrees n and n+1
    are required. The chain-map identity is checked at every degree where
    both the map and the differentials are available.
    """
    if C.ring != D.ring or not C.ring.is_field:
        raise LinalgError("induced map needs matching field coefficients")
    for k in (n, n + 1):
        if k not in fmap:
            raise LinalgError(f"chain map missing degree {k}")
    for k, fk in fmap.items():
        if fk.shape != (D.dim(k), C.dim(k)):
            raise LinalgError(f"chain map degree {k} has wrong shape")
        if k - 1 in fmap:
            if not (fmap[k - 1] @ C.d(k) == D.d(k) @ fk):
                raise LinalgError(f"not a chain map at degree {k}")
    hc = homology_basis(C, n)
    hd = homology_basis(D, n)
    img = fmap[n] @ hc.reps
    # image columns must be cycles in D
    if not (D.d(n) @ img).is_zero():
        raise LinalgError("image of a cycle is not a cycle")
    if hd.dim == 0:
        return Matrix.zeros(C.ring, 0, hc.dim)
    return hd.coords(img)


# ---------------------------------------------------------------------------
# short exact sequence of complexes -> long exact sequence


@dataclass
class LesReport:
    """Exactness audit of the homology long exact sequence of a basis split."""

    degrees: tuple
    dims: dict          # ("sub"|"mid"|"quot", n) -> dim H_n
    exact_at: dict      # (position, n) -> bool
    ok: bool

    def failures(self):
        return sorted(k for k, v in self.exact_at.items() if not v)


def sub_quotient_complexes(B: FreeChainComplex, sub_idx: dict):
    """Split B by basis indices into subcomplex A and quotient complex Q.

    sub_idx maps degree -> sorted index list of the sub's basis vectors.
    The differential must map the sub span into itself (checked).
    """
    ring = B.ring
    a_dims, q_dims, a_diff, q_diff = {}, {}, {}, {}
    comp_idx = {}
    for n in B.dims:
        idx = sub_idx.get(n, [])
        comp_idx[n] = [i for i in range(B.dim(n)) if i not in set(idx)]
        a_dims[n] = len(idx)
        q_dims[n] = len(comp_idx[n])
    for n in B.diff:
        d = B.d(n)
        si, ci = sub_idx.get(n, []), comp_idx.get(n, [])
        so, co = sub_idx.get(n - 1, []), comp_idx.get(n - 1, [])
        if not d.submatrix(rows=co, cols=si).is_zero():
            raise LinalgError(f"sub span is not a subcomplex at degree {n}")
        a_diff[n] = d.submatrix(rows=so, cols=si)
        q_diff[n] = d.submatrix(rows=co, cols=ci)
    A = FreeChainComplex(ring, a_dims, a_diff, top_degree=B.top_degree, check=False)
    Q = FreeChainComplex(ring, q_dims, q_diff, top_degree=B.top_degree, check=False)
    return A, Q, comp_idx


def les_exactness(B: FreeChainComplex, sub_idx: dict, degrees) -> LesReport:
    """Check exactness of ... -> H_n(A) -> H_n(B) -> H_n(Q) -> H_{n-1}(A) -> ...

    at every position with total degree in `degrees` (each degree must be at
    most B.top_degree - 1 so that both homologies involved are certified).
    """
    ring = B.ring
    if not ring.is_field:
        raise LinalgError("long exact sequence audit needs a field")
    A, Q, comp_idx = sub_quotient_complexes(B, sub_idx)
    degrees = sorted(set(degrees))
    need = set()
    for n in degrees:
        need.update((n, n - 1))
    hb = {n: homology_basis(B, n) for n in need}
    ha = {n: homology_basis(A, n) for n in need}
    hq = {n: homology_basis(Q, n) for n in need}

    def incl(n):
        M = Matrix.zeros(ring, B.dim(n), A.dim(n))
        a = _mutable(M.a)
        for col, row in enumerate(sub_idx.get(n, [])):
            a[row, col] = 1
        return Matrix(ring, a, _canon=False)

    def proj(n):
        M = Matrix.zeros(ring, Q.dim(n), B.dim(n))
        a = _mutable(M.a)
        for row, col in enumerate(comp_idx.get(n, [])):
            a[row, col] = 1
        return Matrix(ring, a, _canon=False)

    i_star, p_star, delta = {}, {}, {}
    for n in sorted(need):
        # H_n(A) -> H_n(B)
        img = incl(n) @ ha[n].reps
        i_star[n] = hb[n].coords(img) if hb[n].dim else Matrix.zeros(ring, 0, ha[n].dim)
        # H_n(B) -> H_n(Q)
        img = proj(n) @ hb[n].reps
        if not (Q.d(n) @ img).is_zero():
            raise LinalgError("projection broke a cycle")
        p_star[n] = hq[n].coords(img) if hq[n].dim else Matrix.zeros(ring, 0, hb[n].dim)
    for n in degrees:
        # connecting H_n(Q) -> H_{n-1}(A): lift along the complement, push d
        lift = Matrix.zeros(ring, B.dim(n), hq[n].dim)
        la = _mutable(lift.a)
        for col in range(hq[n].dim):
            for row, bi in enumerate(comp_idx.get(n, [])):
                la[bi, col] = hq[n].reps.a[row, col]
        lift = Matrix(ring, la, _canon=False)
        db = B.d(n) @ lift
        rows_sub = sub_idx.get(n - 1, [])
        rows_comp = comp_idx.get(n - 1, [])
        if not db.submatrix(rows=rows_comp).is_zero():
            raise LinalgError("connecting map lift left the subcomplex")
        da = db.submatrix(rows=rows_sub)
        delta[n] = (ha[n - 1].coords(da)
                    if ha[n - 1].dim else Matrix.zeros(ring, 0, hq[n].dim))

    dims = {}
    exact_at = {}
    for n in degrees:
        dims[("sub", n)] = ha[n].dim
        dims[("mid", n)] = hb[n].dim
        dims[("quot", n)] = hq[n].dim
        # at H_n(B): im i* = ker p*
        ok_b = ((p_star[n] @ i_star[n]).is_zero()
                and rank(i_star[n]) + rank(p_star[n]) == hb[n].dim)
        exact_at[("mid", n)] = ok_b
        # at H_n(Q): im p* = ker delta
        ok_q = ((delta[n] @ p_star[n]).is_zero()
                and rank(p_star[n]) + rank(delta[n]) == hq[n].dim)
        exact_at[("quot", n)] = ok_q
        # at H_{n-1}(A): im delta = ker i*
        ok_a = ((i_star[n - 1] @ delta[n]).is_zero()
                and rank(delta[n]) + rank(i_star[n - 1]) == ha[n - 1].dim)
        exact_at[("sub", n - 1)] = ok_a
    return LesReport(tuple(degrees), dims, exact_at, all(exact_at.values()))
