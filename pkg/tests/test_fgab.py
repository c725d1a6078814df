from math import gcd

import pytest
from hypothesis import given, strategies as st

from lowterm.exact_linalg import IntMatrix
from lowterm.fgab import (
    FgAbGroup,
    InfiniteGroup,
    NotWellDefined,
    cokernel,
    cyclic,
    direct_sum,
    elements_equal_sets,
    from_relations,
    identity,
    image,
    is_exact,
    kernel,
    make_morphism,
    zero_morphism,
)


def test_from_relations():
    assert from_relations(1, IntMatrix([[2]])).shape == (0, (2,))
    assert from_relations(1, IntMatrix.zeros(1, 0)).shape == (1, ())
    assert from_relations(2, IntMatrix([[2, 0], [0, 0]])).shape == (1, (2,))


def test_make_morphism():
    Z4, Z2 = cyclic(4), cyclic(2)
    assert zero_morphism(Z2, Z4).is_zero()
    make_morphism(Z4, Z2, [[1]])
    with pytest.raises(NotWellDefined):
        make_morphism(Z2, Z4, [[1]])


def test_kernel_examples():
    Z4 = cyclic(4)
    K, _ = kernel(identity(Z4))
    assert K.is_trivial()
    K, inc = kernel(make_morphism(Z4, Z4, [[2]]))
    assert K.shape == (0, (2,))
    assert {inc(x).canonical() for x in K.enumerate_elements()} == \
        {Z4.element([0]).canonical(), Z4.element([2]).canonical()}
    Z = cyclic(0)
    K, _ = kernel(make_morphism(Z, Z, [[0]]))
    assert K.shape == (1, ())


def test_image_cokernel_preimage():
    Z = cyclic(0)
    f = make_morphism(Z, Z, [[2]])
    I, inc, fac = image(f)
    assert I.shape == (1, ())
    assert (inc @ fac).equals(f)
    C, p = cokernel(f)
    assert C.shape == (0, (2,))
    assert p.is_surjective()
    assert f.preimage(Z.zero()) is not None
    Z4 = cyclic(4)
    assert make_morphism(Z4, Z4, [[2]]).preimage(Z4.element([1])) is None


def test_enumerate():
    assert len(cyclic(2).enumerate_elements()) == 2
    S, _, _ = direct_sum([cyclic(2), cyclic(3)])
    els = S.enumerate_elements()
    assert len(els) == 6 and len({e.canonical() for e in els}) == 6
    with pytest.raises(InfiniteGroup):
        cyclic(0).enumerate_elements()


def test_direct_sum():
    S, _, _ = direct_sum([FgAbGroup(0), FgAbGroup(0)])
    assert S.is_trivial()
    S, inj, proj = direct_sum([cyclic(2), cyclic(2)])
    assert S.order() == 4
    S, inj, proj = direct_sum([cyclic(0), cyclic(2)])
    assert S.shape == (1, (2,))
    for k in range(2):
        assert (proj[k] @ inj[k]).equals(identity(inj[k].source))
    assert (proj[0] @ inj[1]).is_zero()


small_mods = st.lists(st.sampled_from([2, 3, 4, 6]), min_size=1, max_size=2)


@st.composite
def composable(draw):
    ma, mb, mc = draw(small_mods), draw(small_mods), draw(small_mods)
    A = FgAbGroup(len(ma), IntMatrix.diagonal(ma))
    B = FgAbGroup(len(mb), IntMatrix.diagonal(mb))
    C = FgAbGroup(len(mc), IntMatrix.diagonal(mc))

    def hom(S, T):
        # entries m with mod_S * m ≡ 0 mod mod_T make a well-defined map
        rows = []
        for t in range(T.n):
            row = []
            for s in range(S.n):
                ms, mt = S.relations[s, s], T.relations[t, t]
                step = mt // gcd(ms, mt)
                row.append(step * draw(st.integers(0, 3)))
            rows.append(row)
        return make_morphism(S, T, rows)
    return hom(A, B), hom(B, C)


@given(composable())
def test_exactness_matches_enumeration(fg):
    f, g = fg
    if not (g @ f).is_zero():
        return
    img = [f(x) for x in f.source.enumerate_elements()]
    ker = [y for y in f.target.enumerate_elements() if g(y).is_zero()]
    assert is_exact(f, g) == elements_equal_sets(img, ker)


@given(composable())
def test_kernel_image_cokernel_laws(fg):
    f, _ = fg
    K, inc = kernel(f)
    assert inc.is_injective() and (f @ inc).is_zero()
    I, iinc, fac = image(f)
    assert (iinc @ fac).equals(f)
    C, p = cokernel(f)
    assert p.is_surjective() and (p @ f).is_zero()
    assert is_exact(iinc, p)
    assert K.order() * I.order() == f.source.order()
