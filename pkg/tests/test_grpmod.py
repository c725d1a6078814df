import pytest

from lowterm.exact_linalg import IntMatrix
from lowterm.fgab import FgAbGroup, cyclic, identity
from lowterm.grpmod import (
    GModule,
    GroupError,
    NotACocycle,
    NotNormal,
    Subgroup,
    builtin_group,
    extension_from_cocycle,
    fixed_points,
    hom_over_subgroup,
    inflation,
    quotient_group,
    restriction,
)


@pytest.mark.parametrize("family,param,order", [
    ("cyclic", 1, 1), ("cyclic", 4, 4), ("symmetric3", None, 6), ("dihedral", 4, 8),
    ("quaternion8", None, 8), ("klein4", None, 4)])
def test_builtin_orders(family, param, order):
    G = builtin_group(family, param)
    assert G.order == order
    assert sorted(G.closure(G.generators)) == list(range(order))


def test_builtin_abelian():
    assert not builtin_group("symmetric3").is_abelian()
    assert not builtin_group("quaternion8").is_abelian()
    assert builtin_group("klein4").is_abelian()
    with pytest.raises(GroupError):
        builtin_group("mathieu", 11)


def test_quotients():
    G = builtin_group("cyclic", 4)
    assert quotient_group(G, Subgroup(G, (0,))).quotient.order == 4
    assert quotient_group(G, Subgroup(G, tuple(range(4)))).quotient.order == 1
    qd = quotient_group(G, Subgroup(G, (0, 2)))
    assert qd.quotient.order == 2
    assert all(qd.projection[G.mul(a, b)] == qd.quotient.mul(qd.projection[a], qd.projection[b])
               for a in range(4) for b in range(4))
    S3 = builtin_group("symmetric3")
    with pytest.raises(NotNormal):
        quotient_group(S3, Subgroup(S3, (0, 1)))
    with pytest.raises(GroupError):
        Subgroup(G, (0, 1))


def test_fixed_points():
    C2 = builtin_group("cyclic", 2)
    qd = quotient_group(C2, Subgroup(C2, (0, 1)))
    M = GModule.trivial(C2, cyclic(5))
    assert fixed_points(M, qd)[0].underlying.shape == (0, (5,))
    R = GModule.free(C2, 1)
    F, inc = fixed_points(R, qd)
    assert F.underlying.shape == (1, ())
    v = inc.apply([1])
    assert v in ([1, 1], [-1, -1])
    sign = GModule(C2, FgAbGroup(1), [IntMatrix([[1]]), IntMatrix([[-1]])])
    assert fixed_points(sign, qd)[0].underlying.is_trivial()


def test_inflation_restriction():
    C4 = builtin_group("cyclic", 4)
    qd = quotient_group(C4, Subgroup(C4, (0, 2)))
    T = GModule.trivial(qd.quotient, cyclic(2))
    inf = inflation(T, qd)
    assert inf.group is C4 and inf.is_trivial_action()
    assert inf.underlying.shape == T.underlying.shape
    R = restriction(GModule.free(C4, 1), Subgroup(C4, (0, 2)))
    assert R.underlying.shape == (4, ())
    assert restriction(GModule.trivial(C4, cyclic(3)), Subgroup(C4, (0,))).is_trivial_action()


def test_extension_from_cocycle():
    C2 = builtin_group("cyclic", 2)
    M = GModule.trivial(C2, cyclic(2))
    ses = extension_from_cocycle(C2, M, [[0], [0]])
    assert ses.splits()
    ses = extension_from_cocycle(C2, M, [[0], [1]])
    assert ses.B.action[1] == IntMatrix([[1, 1], [0, 1]])
    sq = ses.B.act(1) @ ses.B.act(1)
    assert sq.equals(identity(ses.B.underlying))
    assert not ses.splits()
    Z = GModule.trivial(C2, cyclic(0))
    with pytest.raises(NotACocycle):
        extension_from_cocycle(C2, Z, [[0], [1]])


def test_hom_over_subgroup():
    C4 = builtin_group("cyclic", 4)
    M = GModule.trivial(C4, cyclic(2))
    qd = quotient_group(C4, Subgroup(C4, (0, 2)))
    assert hom_over_subgroup(0, M, qd).underlying.n == 0
    assert hom_over_subgroup(1, M, qd).underlying.shape == (0, (2, 2))
    full = quotient_group(C4, Subgroup(C4, tuple(range(4))))
    assert hom_over_subgroup(1, M, full).underlying.shape == (0, (2,))
