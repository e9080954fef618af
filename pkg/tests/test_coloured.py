import random

import pytest

from colposet.rings import QQ, ZZ, GF, rational
from colposet.matrix import Matrix
from colposet.linalg import complex_homology
from colposet.poset import boolean, build, chain
from colposet.coloured import (
    ColouredError,
    ColouredPoset,
    ColouredPosetMorphism,
    c_basis,
    c_complex,
    compose_morphisms,
    coloured_from_json,
    homology,
    s_basis,
    s_chain_map,
    s_complex,
    validate_morphism,
)

F2 = GF(2)


def chain_coloured(ring, maps):
    """Colour the chain 1<2<...<n+1 with the given list of matrices."""
    n = len(maps)
    P = chain(n + 1)
    dims = {1: maps[0].ncols}
    for i, m in enumerate(maps):
        dims[i + 2] = m.nrows
    cmaps = {(i + 1, i + 2): maps[i] for i in range(n)}
    return ColouredPoset(P, ring, dims, cmaps)


def test_constant_colouring_valid():
    cp = ColouredPoset.constant(boolean(2), QQ, 3)
    assert cp.dim(()) == 3
    assert cp.map((), (1, 2)) == Matrix.identity(QQ, 3)


def test_noncommuting_square_rejected():
    B = boolean(2)
    dims = {e: 1 for e in B.elements}
    cmaps = {c: Matrix.identity(QQ, 1) for c in B.covers()}
    cmaps[((1,), (1, 2))] = Matrix.from_rows(QQ, [[-1]])
    with pytest.raises(ColouredError, match="path independence"):
        ColouredPoset(B, QQ, dims, cmaps)


def test_missing_and_misshaped_maps_rejected():
    P = chain(2)
    with pytest.raises(ColouredError, match="missing map"):
        ColouredPoset(P, QQ, {1: 1, 2: 1}, {})
    with pytest.raises(ColouredError, match="shape"):
        ColouredPoset(P, QQ, {1: 1, 2: 2}, {(1, 2): Matrix.identity(QQ, 1)})


def test_map_composites():
    m1 = Matrix.from_rows(QQ, [[1], [2]])
    m2 = Matrix.from_rows(QQ, [[1, 1]])
    cp = chain_coloured(QQ, [m1, m2])
    assert cp.map(1, 3) == m2 @ m1
    assert cp.map(2, 2) == Matrix.identity(QQ, 2)
    with pytest.raises(ColouredError):
        cp.map(3, 1)


def test_restrict():
    cp = ColouredPoset.constant(boolean(2), QQ, 2)
    sub = cp.restrict([(), (1,)])
    assert len(sub.poset) == 2
    assert sub.map((), (1,)) == Matrix.identity(QQ, 2)


# ---------------------------------------------------------------------------
# complexes


def test_s_complex_singleton():
    P = build(["*"], [])
    cp = ColouredPoset(P, QQ, {"*": 4}, {})
    S = s_complex(cp, 3)
    assert S.dim(0) == 4
    assert all(S.dim(k) == 0 for k in (1, 2, 3))
    H = complex_homology(S, [0, 1, 2])
    assert H.rank(0) == 4 and H.rank(1) == 0


def test_s_complex_boolean1_repeats():
    cp = ColouredPoset.constant(boolean(1), QQ, 1)
    S = s_complex(cp, 5)
    # only multichain in each degree repeats the bottom element
    assert [S.dim(k) for k in range(6)] == [1] * 6
    H = complex_homology(S, range(0, 5))
    assert all(H.rank(k) == 0 for k in range(5))


def test_c_complex_shapes():
    cp = ColouredPoset.constant(boolean(1), QQ, 1)
    C = c_complex(cp)
    assert C.dim(0) == 1 and C.dim(1) == 1 and C.dim(2) == 0
    cp3 = ColouredPoset.constant(chain(3), QQ, 1)
    C3 = c_complex(cp3)
    assert C3.max_degree == 2


def test_constant_colouring_with_zero_is_acyclic():
    for P in (boolean(2), boolean(3), chain(3), chain(4)):
        for ring in (QQ, F2):
            cp = ColouredPoset.constant(P, ring, 2)
            H = homology(cp)
            assert H.nonzero_degrees() == []


def test_homology_singleton_rank():
    P = build(["*"], [])
    cp = ColouredPoset(P, ZZ, {"*": 3}, {})
    H = homology(cp)
    assert H.table[0] == (3, ())


def test_invertible_two_term_acyclic():
    cp = chain_coloured(QQ, [Matrix.from_rows(QQ, [[5]])])
    H = homology(cp)
    assert H.nonzero_degrees() == []


def test_noninvertible_two_term():
    cp = chain_coloured(QQ, [Matrix.from_rows(QQ, [[0]])])
    H = homology(cp)
    assert H.rank(0) == 1 and H.rank(1) == 1


def test_c_and_s_homology_agree():
    rng = random.Random(90210)
    for trial in range(10):
        n = rng.randint(1, 3)
        maps = []
        d_prev = rng.randint(1, 2)
        for _ in range(n):
            d_next = rng.randint(1, 2)
            maps.append(Matrix.from_rows(
                QQ, [[rng.randint(-2, 2) for _ in range(d_prev)]
                     for _ in range(d_next)], ncols=d_prev))
            d_prev = d_next
        cp = chain_coloured(QQ, maps)
        k_max = 4
        HS = complex_homology(s_complex(cp, k_max), range(0, k_max))
        HC = complex_homology(c_complex(cp), range(0, k_max))
        for k in range(k_max):
            assert HS.rank(k) == HC.rank(k), (trial, k)


def test_s_differential_squares_to_zero_over_z():
    # chain colourings are functorial for free; d^2 = 0 is then structural
    rng = random.Random(31337)
    for trial in range(10):
        maps = [Matrix.from_rows(ZZ, [[rng.randint(-3, 3) for _ in range(2)]
                                      for _ in range(2)], ncols=2)
                for _ in range(rng.randint(1, 3))]
        cp = chain_coloured(ZZ, maps)
        s_complex(cp, 5).validate()
        c_complex(cp).validate()


def test_basis_counts():
    cp = ColouredPoset.constant(boolean(2), QQ, 2)
    # P minus top has 3 elements: {}, {1}, {2}; multichains of length 2:
    # {}{}, {}{1}, {}{2}, {1}{1}, {2}{2}
    b = s_basis(cp, 2)
    assert len(b.chains) == 5
    assert b.dim == 10
    c = c_basis(cp, 2)
    assert len(c.chains) == 2
    assert c.dim == 4


# ---------------------------------------------------------------------------
# morphisms


def test_identity_and_compose():
    cp = ColouredPoset.constant(boolean(2), QQ, 2)
    ident = ColouredPosetMorphism.identity(cp)
    comp = compose_morphisms(ident, ident)
    assert comp.f == ident.f
    for x in cp.poset.elements:
        assert comp.tau[x] == ident.tau[x]


def test_top_condition_enforced():
    src = ColouredPoset.constant(chain(2), QQ, 1)
    tgt = ColouredPoset.constant(chain(2), QQ, 1)
    f_bad = {1: 2, 2: 2}  # non-top element sent to top
    tau = {x: Matrix.identity(QQ, 1) for x in (1, 2)}
    rep = validate_morphism(src, tgt, f_bad, tau)
    assert not rep["ok"] and "top" in rep["error"]


def test_naturality_enforced():
    src = chain_coloured(QQ, [Matrix.from_rows(QQ, [[2]])])
    tgt = chain_coloured(QQ, [Matrix.from_rows(QQ, [[1]])])
    f = {1: 1, 2: 2}
    good = {1: Matrix.from_rows(QQ, [[2]]), 2: Matrix.from_rows(QQ, [[1]])}
    ColouredPosetMorphism(src, tgt, f, good)
    bad = {1: Matrix.from_rows(QQ, [[1]]), 2: Matrix.from_rows(QQ, [[1]])}
    rep = validate_morphism(src, tgt, f, bad)
    assert not rep["ok"] and "naturality" in rep["error"]


def test_composite_of_valid_morphisms_valid():
    rng = random.Random(777)
    for trial in range(10):
        a = rng.randint(1, 3)
        src = chain_coloured(QQ, [Matrix.from_rows(QQ, [[a]])])
        mid = chain_coloured(QQ, [Matrix.from_rows(QQ, [[1]])])
        tgt = chain_coloured(QQ, [Matrix.from_rows(QQ, [[a]])])
        f = {1: 1, 2: 2}
        m1 = ColouredPosetMorphism(src, mid, f,
                                   {1: Matrix.from_rows(QQ, [[a]]),
                                    2: Matrix.from_rows(QQ, [[1]])})
        m2 = ColouredPosetMorphism(mid, tgt, f,
                                   {1: Matrix.from_rows(QQ, [[1]]),
                                    2: Matrix.from_rows(QQ, [[a]])})
        comp = compose_morphisms(m2, m1)
        assert comp.tau[1] == Matrix.from_rows(QQ, [[a]])


def test_s_chain_map_is_chain_map():
    # non-injective element map: only the weak complex carries it
    src = ColouredPoset.constant(chain(3), QQ, 1)
    tgt = ColouredPoset.constant(chain(2), QQ, 1)
    f = {1: 1, 2: 1, 3: 2}
    tau = {x: Matrix.identity(QQ, 1) for x in (1, 2, 3)}
    m = ColouredPosetMorphism(src, tgt, f, tau)
    k_max = 4
    fmap = s_chain_map(m, k_max)
    S1 = s_complex(src, k_max)
    S2 = s_complex(tgt, k_max)
    for k in range(1, k_max + 1):
        assert fmap[k - 1] @ S1.d(k) == S2.d(k) @ fmap[k]


def test_json_roundtrip():
    cp = chain_coloured(QQ, [Matrix.from_rows(QQ, [[rational(1, 2)], [3]]),
                             Matrix.from_rows(QQ, [[1, -1]])])
    back = coloured_from_json(cp.to_json())
    assert back.ring == cp.ring
    for (a, b), m in cp.cover_maps.items():
        assert back.cover_maps[(a, b)] == m
