"""Finite posets with a unique maximal element.

Every poset here has a distinguished top element (its unique maximum). A
unique minimum only counts as a zero when the poset has at least two
elements, so a singleton has a top but no zero; this convention is what
makes a one-element up-set fail the admissibility test below.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np


class PosetError(ValueError):
    pass


def _key(label) -> str:
    return str(label)


class Poset:
    """Immutable finite poset, elements in a fixed construction order."""

    __slots__ = ("elements", "index", "_leq", "_covers")

    def __init__(self, elements, relations=(), _leq=None):
        elems = []
        seen = set()
        for e in elements:
            if e not in seen:
                seen.add(e)
                elems.append(e)
        if not elems:
            raise PosetError("empty poset")
        self.elements = tuple(elems)
        self.index = {e: i for i, e in enumerate(self.elements)}
        n = len(self.elements)
        if _leq is not None:
            leq = _leq
        else:
            leq = np.eye(n, dtype=bool)
            for a, b in relations:
                if a not in self.index or b not in self.index:
                    raise PosetError(f"relation {a!r} <= {b!r} uses unknown elements")
                leq[self.index[a], self.index[b]] = True
            # Warshall transitive closure
            for k in range(n):
                rows = np.nonzero(leq[:, k])[0]
                if rows.size:
                    leq[rows] |= leq[k]
        if np.any(leq & leq.T & ~np.eye(n, dtype=bool)):
            raise PosetError("relations contain a cycle")
        leq.setflags(write=False)
        self._leq = leq
        maxima = [self.elements[i] for i in range(n) if leq[i].sum() == 1]
        if len(maxima) != 1:
            raise PosetError(f"poset must have a unique maximal element, found {maxima}")
        self._covers = None

    # -- basic queries ------------------------------------------------------

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x):
        return x in self.index

    def __eq__(self, other):
        return (isinstance(other, Poset) and self.elements == other.elements
                and bool(np.array_equal(self._leq, other._leq)))

    __hash__ = None

    def __repr__(self):
        return f"Poset({len(self)} elements, top={self.one!r})"

    def leq(self, a, b) -> bool:
        return bool(self._leq[self.index[a], self.index[b]])

    def lt(self, a, b) -> bool:
        return a != b and self.leq(a, b)

    @property
    def one(self):
        for i, e in enumerate(self.elements):
            if self._leq[i].sum() == 1:
                return e
        raise PosetError("no maximum")  # unreachable after validation

    def minima(self):
        col = self._leq.sum(axis=0)
        return [e for i, e in enumerate(self.elements) if col[i] == 1]

    def has_zero(self) -> bool:
        # a zero only exists in a poset of size >= 2
        return len(self) >= 2 and len(self.minima()) == 1

    @property
    def zero(self):
        if not self.has_zero():
            raise PosetError("poset has no zero")
        return self.minima()[0]

    def covers(self):
        """Transitive reduction as a list of (lower, upper) pairs."""
        if self._covers is None:
            lt = self._leq & ~np.eye(len(self), dtype=bool)
            via = (lt.astype(np.int64) @ lt.astype(np.int64)) > 0
            cov = lt & ~via
            self._covers = tuple(
                (self.elements[i], self.elements[j])
                for i, j in zip(*np.nonzero(cov)))
        return list(self._covers)

    def upper_covers(self, x):
        return [b for a, b in self.covers() if a == x]

    def lower_covers(self, x):
        return [a for a, b in self.covers() if b == x]

    def co_atoms(self):
        """Elements covered by the top, in label order."""
        return sorted(self.lower_covers(self.one), key=_key)

    def up_set(self, x, strict=False):
        i = self.index[x]
        out = [e for j, e in enumerate(self.elements) if self._leq[i, j]]
        if strict:
            out.remove(x)
        return out

    def down_set(self, x, strict=False):
        i = self.index[x]
        out = [e for j, e in enumerate(self.elements) if self._leq[j, i]]
        if strict:
            out.remove(x)
        return out

    def height(self) -> int:
        """Length (number of edges) of a longest chain."""
        h = {e: 0 for e in self.elements}
        # fixpoint over covers, heights propagate upward
        changed = True
        while changed:
            changed = False
            for a, b in self.covers():
                if h[a] + 1 > h[b]:
                    h[b] = h[a] + 1
                    changed = True
        return max(h.values())

    # -- derived posets -----------------------------------------------------

    def subposet(self, labels) -> "Poset":
        keep = [e for e in self.elements if e in set(labels)]
        idx = [self.index[e] for e in keep]
        leq = self._leq[np.ix_(idx, idx)].copy()
        return Poset(keep, _leq=leq)

    def interval(self, x) -> "Poset":
        """Subposet of everything at or below x; its top is x."""
        return self.subposet(self.down_set(x))

    def complement(self, x) -> "Poset":
        """Subposet of everything not below-or-equal x; keeps the global top."""
        if x == self.one:
            raise PosetError("complement of the top interval is empty")
        i = self.index[x]
        keep = [e for j, e in enumerate(self.elements) if not self._leq[j, i]]
        return self.subposet(keep)

    def upper_set_off_interval(self, x, y) -> "Poset":
        """Elements above y that are not below x. Always contains the top."""
        i, jy = self.index[x], self.index[y]
        keep = [e for j, e in enumerate(self.elements)
                if self._leq[jy, j] and not self._leq[j, i]]
        if not keep:
            raise PosetError("empty upper set")
        return self.subposet(keep)

    def without_top(self):
        top = self.one
        return tuple(e for e in self.elements if e != top)

    # -- chain enumeration ---------------------------------------------------

    def strict_chains(self, k: int, domain=None):
        """All x1 < x2 < ... < xk with entries in domain (default: everything)."""
        return self._chains(k, domain, strict=True)

    def multichains(self, k: int, domain=None):
        """All x1 <= x2 <= ... <= xk with entries in domain."""
        return self._chains(k, domain, strict=False)

    def _chains(self, k, domain, strict):
        if domain is None:
            domain = self.elements
        idx = [self.index[e] for e in domain]
        if k == 0:
            return [()]
        succ = {}
        for i in idx:
            nxt = [j for j in idx if self._leq[i, j]]
            if strict:
                nxt = [j for j in nxt if j != i]
            succ[i] = nxt
        out = []
        stack = [(i,) for i in reversed(idx)]
        while stack:
            ch = stack.pop()
            if len(ch) == k:
                out.append(tuple(self.elements[i] for i in ch))
                continue
            for j in reversed(succ[ch[-1]]):
                stack.append(ch + (j,))
        return out

    # -- serialization -------------------------------------------------------

    def to_json(self):
        return {
            "elements": [label_to_json(e) for e in self.elements],
            "relations": [[label_to_json(a), label_to_json(b)]
                          for a, b in self.covers()],
        }


def label_to_json(e):
    if isinstance(e, (str, int)):
        return e
    if isinstance(e, tuple):
        return "{" + ",".join(str(v) for v in e) + "}"
    return str(e)


def build(elements, relations) -> Poset:
    return Poset(elements, relations)


def from_json(data) -> Poset:
    if not isinstance(data, dict) or "elements" not in data:
        raise PosetError("poset JSON needs an 'elements' list")
    return Poset(data["elements"], [tuple(r) for r in data.get("relations", [])])


# ---------------------------------------------------------------------------
# standard constructors


def chain(n: int) -> Poset:
    """Total order 1 < 2 < ... < n."""
    if n < 1:
        raise PosetError("chain needs n >= 1")
    return Poset(range(1, n + 1), [(i, i + 1) for i in range(1, n)])


def boolean_on(atoms) -> Poset:
    """All subsets of the given atoms, ordered by inclusion.

    Labels are sorted tuples of atoms, so they are deterministic and hashable.
    """
    atoms = sorted(set(atoms), key=_key)
    elems = []
    for r in range(len(atoms) + 1):
        elems.extend(itertools.combinations(atoms, r))
    rels = []
    for a, b in itertools.combinations(elems, 2):
        if set(a) <= set(b):
            rels.append((a, b))
        elif set(b) <= set(a):
            rels.append((b, a))
    return Poset(elems, rels)


def boolean(n: int) -> Poset:
    if n < 0:
        raise PosetError("boolean needs n >= 0")
    return boolean_on(range(1, n + 1))


def product(P: Poset, Q: Poset) -> Poset:
    """Componentwise order on pairs; top is (top, top)."""
    elems = [(a, b) for a in P.elements for b in Q.elements]
    n, m = len(P), len(Q)
    leq = np.zeros((n * m, n * m), dtype=bool)
    for i1, a1 in enumerate(P.elements):
        for j1, b1 in enumerate(Q.elements):
            row = P._leq[i1][:, None] & Q._leq[j1][None, :]
            leq[i1 * m + j1] = row.reshape(-1)
    return Poset(elems, _leq=leq)


def _dihedral_mul(m, a, b):
    # elements (k, f): the map t -> k + (-1)^f t on Z/m
    k1, f1 = a
    k2, f2 = b
    return ((k1 + (k2 if f1 == 0 else -k2)) % m, f1 ^ f2)


def bruhat_dihedral(m: int) -> Poset:
    """Bruhat order on the dihedral group with m-fold rotation.

    Covers run from every element of one length to every element of the
    next, since any two elements of different lengths are comparable here.
    Labels are shortest words in the two generators (lexicographically least).
    """
    if m < 2:
        raise PosetError("dihedral type needs m >= 2")
    e = (0, 0)
    s, t = (0, 1), (1, 1)
    word = {e: "e"}
    frontier = [e]
    while frontier:
        nxt = []
        for g in frontier:
            for gen, name in ((s, "s"), (t, "t")):
                h = _dihedral_mul(m, g, gen)
                w = name if word[g] == "e" else word[g] + name
                if h not in word:
                    word[h] = w
                    nxt.append(h)
                elif len(w) == len(word[h]) and w < word[h]:
                    word[h] = w
        frontier = nxt
    length = {g: (0 if w == "e" else len(w)) for g, w in word.items()}
    reflections = [(k, 1) for k in range(m)]
    rels = []
    for g in word:
        for r in reflections:
            h = _dihedral_mul(m, g, r)
            if length[h] > length[g]:
                rels.append((word[g], word[h]))
    return Poset(sorted(word.values(), key=lambda w: (len(w) if w != "e" else 0, w)),
                 rels)


def bruhat_symmetric(n: int) -> Poset:
    """Bruhat order on permutations of 1..n.

    Arrows w' -> w for w = w' followed by a transposition with longer length;
    the order is the transitive closure. Labels are one-line words like "2134".
    """
    if n < 1:
        raise PosetError("symmetric type needs n >= 1")
    perms = list(itertools.permutations(range(1, n + 1)))

    def inv(w):
        return sum(1 for i in range(n) for j in range(i + 1, n) if w[i] > w[j])

    def label(w):
        return "".join(str(v) for v in w)

    length = {w: inv(w) for w in perms}
    rels = []
    transpositions = list(itertools.combinations(range(n), 2))
    for w in perms:
        for (i, j) in transpositions:
            v = list(w)
            v[i], v[j] = v[j], v[i]
            v = tuple(v)
            if length[v] > length[w]:
                rels.append((label(w), label(v)))
    return Poset(sorted((label(w) for w in perms),
                        key=lambda s: (length[tuple(int(c) for c in s)], s)),
                 rels)


# ---------------------------------------------------------------------------
# admissibility


@dataclass
class AdmissibilityCertificate:
    """Witness data for (special) admissibility.

    witness: a co-atom x; minima: for each y strictly below x, the unique
    minimum of the up-set of y outside the interval of x; subcertificates:
    for special admissibility, certificates of the interval and complement
    (absent on a rank-1 Boolean leaf, where witness is the bottom element).
    """

    witness: object
    minima: dict
    subcertificates: tuple | None = None
    leaf: bool = False

    def tree_size(self) -> int:
        if self.subcertificates is None:
            return 1
        return 1 + sum(c.tree_size() for c in self.subcertificates)


def admissible_via(P: Poset, x) -> dict | None:
    """The minima map certifying admissibility through co-atom x, or None.

    For each y strictly below x the up-set of y outside the interval must
    have a unique minimal element distinct from the top (a bare {top} does
    not count as having a zero).
    """
    if x not in P.index or x == P.one or not P.leq(x, P.one):
        return None
    if x not in P.lower_covers(P.one):
        return None
    top = P.one
    minima = {}
    ix = P.index[x]
    for y in P.down_set(x, strict=True):
        iy = P.index[y]
        L = [e for j, e in enumerate(P.elements)
             if P._leq[iy, j] and not P._leq[j, ix]]
        mins = [z for z in L if not any(P.lt(w, z) for w in L)]
        if len(mins) != 1 or mins[0] == top:
            return None
        minima[y] = mins[0]
    return minima


def admissible_witnesses(P: Poset):
    """All co-atoms through which P is admissible, in label order."""
    return [x for x in P.co_atoms() if admissible_via(P, x) is not None]


def is_admissible(P: Poset) -> AdmissibilityCertificate | None:
    """Certificate for the first admissible witness in label order, or None."""
    for x in P.co_atoms():
        minima = admissible_via(P, x)
        if minima is not None:
            return AdmissibilityCertificate(x, minima)
    return None


def _is_boolean_rank1(P: Poset) -> bool:
    # a two-element poset with a unique maximum is automatically a chain
    return len(P) == 2


def is_specially_admissible(P: Poset) -> AdmissibilityCertificate | None:
    """Recursive certificate: rank-1 Boolean leaves, else an admissible
    witness whose interval and complement are both specially admissible.
    Backtracks across witnesses; memoized on element sets."""
    memo: dict = {}

    def rec(sub: Poset):
        key = frozenset(sub.elements)
        if key in memo:
            return memo[key]
        if _is_boolean_rank1(sub):
            cert = AdmissibilityCertificate(sub.minima()[0], {}, None, leaf=True)
            memo[key] = cert
            return cert
        result = None
        for x in sub.co_atoms():
            minima = admissible_via(sub, x)
            if minima is None:
                continue
            ci = rec(sub.interval(x))
            if ci is None:
                continue
            cc = rec(sub.complement(x))
            if cc is None:
                continue
            result = AdmissibilityCertificate(x, minima, (ci, cc))
            break
        memo[key] = result
        return result

    return rec(P)


def is_isomorphic(P: Poset, Q: Poset) -> bool:
    """Exhaustive isomorphism test with degree pruning (small posets only)."""
    if len(P) != len(Q):
        return False
    n = len(P)

    def profile(R, e):
        i = R.index[e]
        return (int(R._leq[i].sum()), int(R._leq[:, i].sum()),
                len(R.upper_covers(e)), len(R.lower_covers(e)))

    pp = {e: profile(P, e) for e in P.elements}
    qq = {e: profile(Q, e) for e in Q.elements}
    if sorted(pp.values()) != sorted(qq.values()):
        return False
    q_elems = list(Q.elements)

    def extend(assign, used):
        k = len(assign)
        if k == n:
            return True
        a = P.elements[k]
        for b in q_elems:
            if b in used or pp[a] != qq[b]:
                continue
            ok = True
            for a2, b2 in assign.items():
                if P.leq(a, a2) != Q.leq(b, b2) or P.leq(a2, a) != Q.leq(b2, b):
                    ok = False
                    break
            if ok:
                assign[a] = b
                used.add(b)
                if extend(assign, used):
                    return True
                del assign[a]
                used.remove(b)
        return False

    return extend({}, set())
