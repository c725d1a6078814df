import pytest

from lowterm.spectral import (
    SpectralDatum,
    WindowExceeded,
    ext_oracle,
    hom_oracle,
    restriction_oracle,
)


@pytest.fixture(scope="module")
def spec(library):
    return {k: sc.spectral() for k, sc in library.items()}


@pytest.mark.parametrize("name", ["LIB-0", "LIB-1", "LIB-2", "LIB-3"])
@pytest.mark.parametrize("t", [1, 2, 3])
def test_low_term_exact(spec, name, t):
    seq = spec[name].low_term_sequence(t)
    assert len(seq.objects) == 7
    assert seq.is_exact()


def test_lib1_low_term_values(spec):
    seq = spec["LIB-1"].low_term_sequence(1)
    assert [str(g) for g in seq.objects[:3]] == ["Z/2", "Z/2", "Z/2"]


@pytest.mark.parametrize("name", ["LIB-1", "LIB-2"])
def test_rows_exact(spec, name):
    S = spec[name]
    for t in (1, 2, 3):
        assert S.long_exact_row(t, 0, 3).is_exact()
        assert S.ge1_row(t, 0, 3).is_exact()


@pytest.mark.parametrize("name", ["LIB-0", "LIB-1", "LIB-2", "LIB-3"])
def test_e3_and_e1_squared(spec, name):
    S = spec[name]
    assert S.e3_sequence().is_exact()
    for t in (1, 2, 3):
        assert S.e1_squared(t)[2]
        assert S.tau2_vs_hom(t)[1]


@pytest.mark.parametrize("name", ["LIB-1", "LIB-3"])
def test_column_triangles(spec, name):
    S = spec[name]
    for F in (S.S0, S.tau1, S.S1):
        u, v, w = S.column_maps(F, 1)
        assert (v @ u).is_zero() and (w @ v).is_zero()
        assert S.column_triangle(F, 1).is_exact()


def test_window(spec):
    S = spec["LIB-1"]
    with pytest.raises(WindowExceeded):
        S.E2(1, 3, 1)
    with pytest.raises(WindowExceeded):
        S.E(1, S.d + 2)


@pytest.mark.parametrize("name", ["LIB-0", "LIB-1", "LIB-2", "LIB-3"])
def test_ext_oracle(spec, name):
    for t in (1, 2, 3):
        for i in range(3):
            hyper, ext = ext_oracle(spec[name], t, i)
            assert hyper.shape == ext.shape


@pytest.mark.parametrize("name", ["LIB-0", "LIB-1", "LIB-2", "LIB-3"])
def test_hom_oracle(spec, name):
    for t in (1, 2, 3):
        a, b = hom_oracle(spec[name], t)
        assert a.shape == b.shape


def test_restriction_oracle_lib1(library):
    sc = library["LIB-1"]
    S = SpectralDatum(sc.qd, sc.M, sc.ses, 2, "bar")
    res = restriction_oracle(S)
    assert res["lift_iso"] and res["agree"]
