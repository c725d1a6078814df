from hypothesis import given, settings, strategies as st

from lowterm.complexes import (
    ChainMap,
    CochainComplex,
    SESOfComplexes,
    cone,
    identity_chain_map,
    les_of_ses,
    quasi_iso_check,
    quotient_complex,
    shift,
    stalk,
    truncate_ge,
    truncate_le,
    zero_chain_map,
)
from lowterm.exact_linalg import IntMatrix, kernel_basis
from lowterm.fgab import FgAbGroup, FgAbMorphism, cyclic, make_morphism


def free_complex(lo, ranks, diffs):
    objs = [FgAbGroup(r) for r in ranks]
    ds = [FgAbMorphism(objs[k], objs[k + 1], IntMatrix(diffs[k], ranks[k + 1], ranks[k]))
          for k in range(len(diffs))]
    return CochainComplex(lo, objs, ds)


def shapes(C, degs):
    return [C.cohomology(n).group.shape for n in degs]


def test_cohomology_examples():
    C = free_complex(0, [1], [])
    assert shapes(C, [0]) == [(1, ())]
    C = free_complex(0, [1, 1], [[[2]]])
    assert shapes(C, [0, 1]) == [(0, ()), (0, (2,))]
    C = free_complex(0, [1, 1], [[[1]]])
    assert shapes(C, [0, 1]) == [(0, ()), (0, ())]


def sample_complex():
    # Z^2 -> Z^3 -> Z^2 with d∘d = 0
    return free_complex(0, [2, 3, 2], [[[1, 0], [2, 2], [0, 3]],
                                       [[-6, 3, -2], [12, -6, 4]]])


def test_truncations():
    C = sample_complex()
    assert quasi_iso_check(truncate_le(C, C.hi + 1)[1])[0]
    T, proj = truncate_ge(C, C.lo)
    assert quasi_iso_check(proj)[0]
    T, inc = truncate_le(C, 1)
    ok, per = quasi_iso_check(inc)
    assert per[0] and per[1]
    assert stalk(C, 1).cohomology(1).group.shape == C.cohomology(1).group.shape
    assert T.cohomology(2).group.is_trivial()


def test_quasi_iso_negative():
    C = free_complex(0, [1], [])
    assert quasi_iso_check(identity_chain_map(C))[0]
    assert not quasi_iso_check(zero_chain_map(C, C))[0]


def test_cone_examples():
    C = sample_complex()
    K, _, _ = cone(identity_chain_map(C))
    assert all(K.cohomology(n).group.is_trivial() for n in range(K.lo, K.hi + 1))
    K, _, _ = cone(zero_chain_map(C, C))
    for n in range(K.lo, K.hi + 1):
        assert K.U(n).n == C.U(n).n + C.U(n + 1).n
    Z = free_complex(0, [1], [])
    two = ChainMap(Z, Z, {0: make_morphism(Z.obj(0), Z.obj(0), [[2]])})
    K, _, _ = cone(two)
    assert shapes(K, [-1, 0]) == [(0, ()), (0, (2,))]


def test_shift():
    C = sample_complex()
    S = shift(C, 1)
    assert S.lo == C.lo - 1
    assert [S.cohomology(n - 1).group.shape for n in C.degrees()] == shapes(C, C.degrees())


def test_les_bockstein():
    Z = free_complex(0, [1], [])
    Z2 = CochainComplex(0, [cyclic(2)], [])
    i = ChainMap(Z, Z, {0: make_morphism(Z.obj(0), Z.obj(0), [[2]])})
    p = ChainMap(Z, Z2, {0: make_morphism(Z.obj(0), Z2.obj(0), [[1]])})
    les = les_of_ses(SESOfComplexes(Z, Z, Z2, i, p).validate(), 0, 1)
    assert les.is_exact()
    assert [g.shape for g in les.objects[:3]] == [(1, ()), (1, ()), (0, (2,))]


@st.composite
def random_free_complex(draw):
    a, b, c = (draw(st.integers(1, 3)) for _ in range(3))
    d0 = [[draw(st.integers(-3, 3)) for _ in range(a)] for _ in range(b)]
    K = kernel_basis(IntMatrix(d0, b, a).T)     # columns x with x^T d0 = 0
    rows = []
    for _ in range(c):
        coeffs = [draw(st.integers(-2, 2)) for _ in range(K.cols)]
        rows.append([sum(k * K[r, j] for j, k in enumerate(coeffs)) for r in range(b)])
    return free_complex(0, [a, b, c], [d0, rows])


@settings(max_examples=120)
@given(random_free_complex(), st.integers(2, 6))
def test_snake_les_random(X, k):
    maps = {n: make_morphism(X.obj(n), X.obj(n), IntMatrix.diagonal([k] * X.U(n).n))
            for n in X.degrees()}
    f = ChainMap(X, X, maps)
    Q, p = quotient_complex(f)
    s = SESOfComplexes(X, X, Q, f, p).validate()
    les = les_of_ses(s)
    assert les.is_exact()
    # connecting maps land in the right place: H^n(X/k) -> H^(n+1)(X)
    assert les.maps[2].target.shape == X.cohomology(1).group.shape


@settings(max_examples=40)
@given(random_free_complex())
def test_cone_les_random(X):
    K, inc, pr = cone(identity_chain_map(X))
    X1 = pr.target
    les = les_of_ses(SESOfComplexes(X, K, X1, inc, pr).validate())
    assert les.is_exact()
