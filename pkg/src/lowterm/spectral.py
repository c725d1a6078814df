"""Hyper-Ext through total complexes, E2 terms and the low-term sequences.

For a resolution P of T over Z[Q] and a complex F of Q-modules,
Tot^n = ⊕_{p+q=n} Hom_Q(P_p, F^q) ≅ ⊕ (F^q)^{r_p} with
d = d_h + (-1)^p d_v, d_h precomposition with ∂ and d_v the
differential of F.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .complexes import (
    ChainMap,
    CochainComplex,
    CohomologyDatum,
    SESOfComplexes,
    connecting_map,
    quotient_complex,
    stalk_data,
    truncate_ge,
    truncate_le,
    induced_map,
)
from .exact_linalg import IntMatrix, block_diagonal
from .fgab import FgAbGroup, FgAbMorphism, direct_sum, inverse, is_exact, kernel, lift_through
from .grpmod import GModule, ModuleSES, QuotientData, hom_group, inflation
from .resolutions import (
    FreeResolution,
    Horseshoe,
    LhsComplex,
    _bar_index,
    bar_cochains,
    classical_restriction,
    ext_groups,
    hom_free_matrix,
    hom_free_object,
    horseshoe,
    lhs_complex,
    projective_resolution,
)


class WindowExceeded(ValueError):
    """A requested degree lies outside what the truncated data determines."""


@dataclass
class TotData:
    P: FreeResolution
    F: CochainComplex
    complex: CochainComplex
    offsets: dict                 # n -> {(p, q): (offset, size)}
    top: int

    def hyper(self, i: int) -> CohomologyDatum:
        if i > self.top - 1:
            raise WindowExceeded(f"degree {i} needs the total complex through {i + 1}, "
                                 f"only {self.top} is available")
        return self.complex.cohomology(i)


def tot_window(P: FreeResolution, F: CochainComplex) -> int:
    top = P.top + F.lo
    if F.valid_top is not None:
        top = min(top, F.valid_top)
    return top


def total_complex(P: FreeResolution, F: CochainComplex, top: Optional[int] = None,
                  lo: Optional[int] = None) -> TotData:
    allowed = tot_window(P, F)
    if top is None:
        top = allowed
    elif top > allowed:
        raise WindowExceeded(f"total degree {top} exceeds the window {allowed}")
    lo = F.lo if lo is None else min(lo, F.lo)
    top = max(top, lo)
    objs, offsets = [], {}
    for n in range(lo, top + 1):
        comps, offs, off = [], {}, 0
        for p in range(0, min(n - F.lo, P.top) + 1):
            q = n - p
            if q > F.hi or P.ranks[p] == 0 or F.U(q).n == 0:
                continue
            size = P.ranks[p] * F.U(q).n
            offs[(p, q)] = (off, size)
            comps.append(hom_free_object(P.ranks[p], F.obj(q)))
            off += size
        offsets[n] = offs
        objs.append(direct_sum(comps)[0] if comps else FgAbGroup(0))
    diffs = []
    for n in range(lo, top):
        src, tgt = offsets[n], offsets[n + 1]
        rows = [[0] * objs[n - lo].n for _ in range(objs[n + 1 - lo].n)]
        for (p, q), (o, _) in src.items():
            if (p + 1, q) in tgt:
                _paste(rows, tgt[(p + 1, q)][0], o, hom_free_matrix(P.d(p + 1), F.obj(q)))
            if (p, q + 1) in tgt:
                dv = block_diagonal([F.dfg(q).matrix] * P.ranks[p])
                _paste(rows, tgt[(p, q + 1)][0], o, dv, -1 if p % 2 else 1)
        diffs.append(FgAbMorphism(objs[n - lo], objs[n + 1 - lo],
                                  IntMatrix(rows, objs[n + 1 - lo].n, objs[n - lo].n), check=False))
    C = CochainComplex(lo, objs, diffs, check=False)
    return TotData(P, F, C, offsets, top)


def _paste(rows, r0, c0, M: IntMatrix, sign: int = 1):
    for a, row in enumerate(M.data):
        tgt = rows[r0 + a]
        for b, x in enumerate(row):
            if x:
                tgt[c0 + b] += sign * x


def tot_map(TX: TotData, TY: TotData, f: ChainMap) -> ChainMap:
    """Tot(P, X) -> Tot(P, Y) induced by f: X -> Y."""
    P = TX.P
    maps = {}
    for n in range(max(TX.complex.lo, TY.complex.lo), min(TX.top, TY.top) + 1):
        src, tgt = TX.offsets[n], TY.offsets[n]
        rows = [[0] * TX.complex.U(n).n for _ in range(TY.complex.U(n).n)]
        for (p, q), (o, _) in src.items():
            if (p, q) in tgt:
                _paste(rows, tgt[(p, q)][0], o, block_diagonal([f.fg(q).matrix] * P.ranks[p]))
        maps[n] = FgAbMorphism(TX.complex.U(n), TY.complex.U(n),
                               IntMatrix(rows, TY.complex.U(n).n, TX.complex.U(n).n), check=False)
    return ChainMap(TX.complex, TY.complex, maps, check=False)


def tot_shift_maps(TXk: TotData, TX: TotData, k: int) -> dict[int, FgAbMorphism]:
    """Tot(X[k])^n -> Tot(X)^(n+k), sign (-1)^(k·q') on component (p, q')."""
    maps = {}
    for n in range(TXk.complex.lo, TXk.top + 1):
        if n + k > TX.top:
            break
        src, tgt = TXk.offsets[n], TX.offsets.get(n + k, {})
        rows = [[0] * TXk.complex.U(n).n for _ in range(TX.complex.U(n + k).n)]
        for (p, q), (o, size) in src.items():
            if (p, q + k) in tgt:
                s = -1 if (k * q) % 2 else 1
                r0 = tgt[(p, q + k)][0]
                for a in range(size):
                    rows[r0 + a][o + a] = s
        maps[n] = FgAbMorphism(TXk.complex.U(n), TX.complex.U(n + k),
                               IntMatrix(rows, TX.complex.U(n + k).n, TXk.complex.U(n).n),
                               check=False)
    return maps


def hyper_ext(T: GModule, F: CochainComplex, i: int, d: int = 4,
              P: Optional[FreeResolution] = None) -> CohomologyDatum:
    P = P or projective_resolution(T, d)
    return total_complex(P, F).hyper(i)


def horseshoe_split(TB: TotData, Tsmall: TotData, hs: Horseshoe, mode: str) -> dict:
    """Coordinate maps Tot(P(C)) -> Tot(P(B)) ("inc") or Tot(P(B)) -> Tot(P(A)) ("proj").

    P(B)_p = P(A)_p ⊕ P(C)_p; a functional on P(C) pulls back along the
    projection, a functional on P(B) restricts to P(A).
    """
    maps = {}
    for n in range(max(TB.complex.lo, Tsmall.complex.lo), min(TB.top, Tsmall.top) + 1):
        nb, ns = TB.complex.U(n).n, Tsmall.complex.U(n).n
        if mode == "inc":
            rows = [[0] * ns for _ in range(nb)]
        else:
            rows = [[0] * nb for _ in range(ns)]
        for (p, q), (ob, _) in TB.offsets[n].items():
            if (p, q) not in Tsmall.offsets[n]:
                continue
            os_, size = Tsmall.offsets[n][(p, q)]
            shift_ = hs.PA.ranks[p] * TB.F.U(q).n if mode == "inc" else 0
            for a in range(size):
                if mode == "inc":
                    rows[ob + shift_ + a][os_ + a] = 1
                else:
                    rows[os_ + a][ob + a] = 1
        if mode == "inc":
            maps[n] = FgAbMorphism(Tsmall.complex.U(n), TB.complex.U(n),
                                   IntMatrix(rows, nb, ns), check=False)
        else:
            maps[n] = FgAbMorphism(TB.complex.U(n), Tsmall.complex.U(n),
                                   IntMatrix(rows, ns, nb), check=False)
    return maps


# -- the per-scenario engine ---------------------------------------------------

@dataclass
class Seq:
    """A finite sequence of groups and maps with node labels."""

    labels: list
    objects: list
    maps: list
    leading_zero: bool = False

    def exactness(self) -> list[bool]:
        return [is_exact(self.maps[k - 1], self.maps[k]) for k in range(1, len(self.objects) - 1)]

    def is_exact(self) -> bool:
        ok = all(self.exactness())
        if self.leading_zero:
            ok = ok and self.maps[0].is_injective()
        return ok


class SpectralDatum:
    """All hyper-Ext data of one scenario.

    t = 1, 2, 3 index T_1 = C, T_2 = B, T_3 = A of the coefficient sequence
    0 -> A -> B -> C -> 0 over Q = G/N.
    """

    def __init__(self, qd: QuotientData, M: GModule, ses: ModuleSES, d: int = 4,
                 resolution: str = "reduced", name: str = ""):
        self.qd, self.M, self.ses, self.d, self.name = qd, M, ses, d, name
        self.lhs: LhsComplex = lhs_complex(qd, M, d, resolution)
        self.D = self.lhs.D
        self.hs = horseshoe(ses, d)
        self.P = {1: self.hs.PC, 2: self.hs.PB, 3: self.hs.PA}
        self.T = {1: ses.C, 2: ses.B, 3: ses.A}
        self._tots: dict = {}
        self._ses: dict = {}
        self._build_complexes()

    # complexes and chain maps
    def _build_complexes(self):
        D = self.D
        self.tau1, self.inc_tau1 = truncate_le(D, 1)
        st0 = stalk_data(self.tau1, 0)
        self.S0 = st0.complex
        self.inc_S0 = st0.to_ge                     # S0 -> τ≤1 (τ≥0 of τ≤1 is itself)
        self.Qt, self.proj_Qt = quotient_complex(self.inc_S0)
        st1 = stalk_data(self.tau1, 1)
        self.S1 = st1.complex
        self.qiso_Qt = ChainMap(self.Qt, self.S1, {1: st1.from_le.at(1)}, check=False)
        self.tau1_to_S1 = st1.from_le
        # τ≤1 D -> D -> D/τ≤1 D ≃ τ≥2 D ⟵ stalk_2
        self.Dq, self.proj_Dq = quotient_complex(self.inc_tau1)
        self.tau2, self.proj_tau2 = truncate_ge(D, 2)
        self.qiso_Dq = ChainMap(self.Dq, self.tau2,
                                {n: self.proj_tau2.at(n) for n in range(2, D.hi + 1)},
                                check=False)
        st2 = stalk_data(D, 2)
        self.S2 = st2.complex
        self.S2_to_tau2 = st2.to_ge
        st3 = stalk_data(D, 3)
        self.S3 = st3.complex
        self.stalks = {0: self.S0, 1: self.S1, 2: self.S2, 3: self.S3}
        # S0 -> D -> D/S0 ≃ τ≥1 D
        self.inc_S0_D = self.inc_tau1 @ self.inc_S0
        self.DS0, self.proj_DS0 = quotient_complex(self.inc_S0_D)
        self.tau_ge1, self.proj_ge1 = truncate_ge(D, 1)
        m = {n: self.proj_ge1.at(n) for n in range(1, D.hi + 1)}
        self.qiso_DS0 = ChainMap(self.DS0, self.tau_ge1, m, check=False)

    # total complexes and hyper-Ext
    def tot(self, t: int, F: CochainComplex) -> TotData:
        key = (t, id(F))
        if key not in self._tots:
            self._tots[key] = (total_complex(self.P[t], F), F)
        return self._tots[key][0]

    def H(self, t: int, F: CochainComplex, i: int) -> CohomologyDatum:
        return self.tot(t, F).hyper(i)

    def ind(self, t: int, f: ChainMap, i: int) -> FgAbMorphism:
        TX, TY = self.tot(t, f.source), self.tot(t, f.target)
        TX.hyper(i), TY.hyper(i)
        return induced_map(tot_map(TX, TY, f), i)

    def iso_inv(self, t: int, f: ChainMap, i: int) -> FgAbMorphism:
        return inverse(self.ind(t, f, i))

    def tot_ses(self, t: int, inc: ChainMap, proj: ChainMap) -> SESOfComplexes:
        key = (t, id(inc), id(proj))
        if key not in self._ses:
            TA, TB, TC = self.tot(t, inc.source), self.tot(t, inc.target), self.tot(t, proj.target)
            self._ses[key] = SESOfComplexes(TA.complex, TB.complex, TC.complex,
                                            tot_map(TA, TB, inc), tot_map(TB, TC, proj))
        return self._ses[key]

    def delta(self, t: int, inc: ChainMap, proj: ChainMap, i: int) -> FgAbMorphism:
        s = self.tot_ses(t, inc, proj)
        self.tot(t, inc.source).hyper(i + 1)
        self.tot(t, proj.target).hyper(i)
        return connecting_map(s, i)

    # named terms
    def E2(self, t: int, p: int, q: int) -> FgAbGroup:
        if p + q > 3 or p < 0 or q < 0:
            raise WindowExceeded("E2 terms are provided for p + q <= 3")
        return self.H(t, self.stalks[q], p + q).group

    def E(self, t: int, n: int) -> FgAbGroup:
        return self.H(t, self.D, n).group

    def e_le1(self, t: int, i: int) -> FgAbGroup:
        return self.H(t, self.tau1, i).group

    def e_ge1(self, t: int, i: int) -> FgAbGroup:
        return self.H(t, self.tau_ge1, i).group

    # maps of the truncation triangle S0 -> τ≤1 -> stalk_1
    def row_in(self, t: int, i: int) -> FgAbMorphism:
        """ℍ^i(S0) -> ℍ^i(τ≤1)."""
        return self.ind(t, self.inc_S0, i)

    def row_edge(self, t: int, i: int) -> FgAbMorphism:
        """ℍ^i(τ≤1) -> ℍ^i(S1) through the quotient by S0."""
        return self.ind(t, self.qiso_Qt, i) @ self.ind(t, self.proj_Qt, i)

    def row_delta(self, t: int, i: int) -> FgAbMorphism:
        """ℍ^i(S1) -> ℍ^(i+1)(S0), the connecting map of S0 -> τ≤1 -> τ≤1/S0."""
        return self.delta(t, self.inc_S0, self.proj_Qt, i) @ self.iso_inv(t, self.qiso_Qt, i)

    def long_exact_row(self, t: int, lo: int = 0, hi: int = 3) -> Seq:
        labels, objs, maps = [], [], []
        for i in range(lo, hi + 1):
            a, b = self.row_in(t, i), self.row_edge(t, i)
            labels += [f"E2^{i},0", f"E^{i}_<=1", f"E2^{i - 1},1"]
            objs += [a.source, a.target, b.target]
            maps += [a, b]
            if i < hi:
                maps.append(self.row_delta(t, i))
        return Seq(labels, objs, maps)

    def tau1_to_D(self, t: int, i: int) -> FgAbMorphism:
        return self.ind(t, self.inc_tau1, i)

    def low_term_sequence(self, t: int) -> Seq:
        """E2^{1,0} -> E^1 -> E2^{0,1} -> E2^{2,0} -> E1^2 -> E2^{1,1} -> E2^{3,0}."""
        a1, b1, c1 = self.row_in(t, 1), self.row_edge(t, 1), self.row_delta(t, 1)
        a2, b2, c2 = self.row_in(t, 2), self.row_edge(t, 2), self.row_delta(t, 2)
        j1 = self.tau1_to_D(t, 1)
        j1inv = inverse(j1)
        maps = [j1 @ a1, b1 @ j1inv, c1, a2, b2, c2]
        objs = [m.source for m in maps] + [maps[-1].target]
        labels = ["E2^1,0", "E^1", "E2^0,1", "E2^2,0", "E1^2", "E2^1,1", "E2^3,0"]
        return Seq(labels, objs, maps, leading_zero=True)

    def edge2(self, t: int) -> FgAbMorphism:
        """E^2 -> E2^{0,2} through D -> D/τ≤1 ≃ τ≥2 ≃ stalk_2."""
        to_q = self.ind(t, self.proj_Dq, 2)
        q_to_tau2 = self.ind(t, self.qiso_Dq, 2)
        s2_to_tau2 = self.ind(t, self.S2_to_tau2, 2)
        return inverse(s2_to_tau2) @ q_to_tau2 @ to_q

    def e3_sequence(self) -> Seq:
        """0 -> E1^2 -> E^2 -> E2^{0,2} -> E^3_<=1 -> E^3 for t = 1."""
        t = 1
        i2 = self.tau1_to_D(t, 2)
        e = self.edge2(t)
        q_to_tau2 = self.ind(t, self.qiso_Dq, 2)
        s2_to_tau2 = self.ind(t, self.S2_to_tau2, 2)
        dl = self.delta(t, self.inc_tau1, self.proj_Dq, 2) @ inverse(q_to_tau2) @ s2_to_tau2
        i3 = self.tau1_to_D(t, 3)
        maps = [i2, e, dl, i3]
        return Seq(["E1^2", "E^2", "E2^0,2", "E^3_<=1", "E^3"],
                   [m.source for m in maps] + [i3.target], maps, leading_zero=True)

    def e1_squared(self, t: int) -> tuple[FgAbGroup, FgAbMorphism, bool]:
        """(ker(E^2 -> E2^{0,2}), inclusion, agreement with ℍ^2(τ≤1 D))."""
        K, inc = kernel(self.edge2(t))
        i2 = self.tau1_to_D(t, 2)
        h = lift_through(i2, inc)
        agrees = h is not None and h.is_isomorphism()
        return K, inc, agrees

    def ge1_row(self, t: int, lo: int = 0, hi: int = 3) -> Seq:
        """… -> E2^{i,0} -> E^i -> E^i_>=1 -> E2^{i+1,0} -> …"""
        labels, objs, maps = [], [], []
        for i in range(lo, hi + 1):
            a = self.ind(t, self.inc_S0_D, i)
            b = self.ind(t, self.qiso_DS0, i) @ self.ind(t, self.proj_DS0, i)
            labels += [f"E2^{i},0", f"E^{i}", f"E^{i}_>=1"]
            objs += [a.source, a.target, b.target]
            maps += [a, b]
            if i < hi:
                c = self.delta(t, self.inc_S0_D, self.proj_DS0, i) @ \
                    self.iso_inv(t, self.qiso_DS0, i)
                maps.append(c)
        return Seq(labels, objs, maps)

    def tau2_vs_hom(self, t: int) -> tuple[FgAbMorphism, bool]:
        """ℍ^2(stalk_2) = Hom(T_t, H^2(D)) -> ℍ^2(τ≥2 D), with its iso verdict."""
        m = self.ind(t, self.S2_to_tau2, 2)
        return m, m.is_isomorphism()

    # columns: Tot(P(C), F) -> Tot(P(B), F) -> Tot(P(A), F)
    def column_ses(self, F: CochainComplex) -> SESOfComplexes:
        key = ("col", id(F))
        if key not in self._ses:
            T1, T2, T3 = self.tot(1, F), self.tot(2, F), self.tot(3, F)
            u = ChainMap(T1.complex, T2.complex, horseshoe_split(T2, T1, self.hs, "inc"),
                         check=False)
            v = ChainMap(T2.complex, T3.complex, horseshoe_split(T2, T3, self.hs, "proj"),
                         check=False)
            self._ses[key] = SESOfComplexes(T1.complex, T2.complex, T3.complex, u, v)
        return self._ses[key]

    def column_maps(self, F: CochainComplex, i: int) -> tuple[FgAbMorphism, ...]:
        """ℍ^i_1(F) -> ℍ^i_2(F) -> ℍ^i_3(F) -> ℍ^(i+1)_1(F)."""
        s = self.column_ses(F)
        for t in (1, 2, 3):
            self.tot(t, F).hyper(i)
        self.tot(1, F).hyper(i + 1)
        return induced_map(s.i, i), induced_map(s.p, i), connecting_map(s, i)

    def column_triangle(self, F: CochainComplex, i: int = 1) -> Seq:
        u, v, w = self.column_maps(F, i)
        return Seq([f"H{i}_1", f"H{i}_2", f"H{i}_3", f"H{i + 1}_1"],
                   [u.source, v.source, w.source, w.target], [u, v, w])



# -- oracles -------------------------------------------------------------------

def ext_oracle(S: SpectralDatum, t: int, i: int) -> tuple[FgAbGroup, FgAbGroup]:
    """(ℍ^i Ψ_t(D), Ext^i over Z[G] of (inflated T_t, M)); they should agree."""
    ext = ext_groups(inflation(S.T[t], S.qd), S.M, max(S.d, i + 2))[i]
    return S.E(t, i), ext


def hom_oracle(S: SpectralDatum, t: int) -> tuple[FgAbGroup, FgAbGroup]:
    """(ℍ^2 Ψ_t(τ≥2 D), Hom over G/N of (T_t, H^2 D)); they should agree."""
    H2 = S.S2.obj(2)
    hom, _ = hom_group(S.T[t], H2)
    return S.H(t, S.tau2, 2).group, hom


def _g_to_n_cochains(S: SpectralDatum, CG: CochainComplex, n: int) -> FgAbMorphism:
    """Hom_G(P_n, M) -> Hom_N(P_n, M): block (i, k) is s_k · f(e_i)."""
    qd, M = S.qd, S.M
    idx, nM = len(qd.section), M.n
    D = S.D
    rows = [[0] * CG.U(n).n for _ in range(D.U(n).n)]
    for i in range(CG.U(n).n // nM):
        for k in range(idx):
            rho = M.action[qd.section[k]]
            for a in range(nM):
                for b in range(nM):
                    rows[(i * idx + k) * nM + a][i * nM + b] = rho.data[a][b]
    return FgAbMorphism(CG.U(n), D.U(n), IntMatrix(rows, D.U(n).n, CG.U(n).n), check=False)


def restriction_oracle(S: SpectralDatum) -> dict:
    """Compare E^1 -> E2^{0,1} with restriction of bar cocycles from G to N.

    Needs D built on the bar resolution and T_1 = Z. A G-cocycle z is placed
    in the p = 0 slot of Tot(P(Z), D), giving an isomorphism H^1(G, M) -> E^1.
    Its image in E2^{0,1} is lifted back to a cocycle of D, restricted to bar
    chains of N and compared with the classical restriction of z.
    """
    if S.lhs.P.kind != "bar":
        raise ValueError("the oracle needs D built on the bar resolution")
    P1 = S.P[1]
    if S.T[1].n != 1 or not S.T[1].is_trivial_action() or P1.ranks[0] != 1:
        raise ValueError("the oracle needs T_1 = Z with a rank one P_0")
    G, N, M = S.qd.group, S.qd.normal, S.M
    CG, _ = bar_cochains(G, M, S.d)
    TD = S.tot(1, S.D)
    TD.hyper(1)
    maps = {}
    for n in range(0, TD.top + 1):
        off, size = TD.offsets[n].get((0, n), (0, 0))
        iota = _g_to_n_cochains(S, CG, n)
        tgt = TD.complex.U(n)
        rows = [[0] * CG.U(n).n for _ in range(tgt.n)]
        for a in range(size):
            rows[off + a] = list(iota.matrix.data[a])
        maps[n] = FgAbMorphism(CG.U(n), tgt, IntMatrix(rows, tgt.n, CG.U(n).n), check=False)
    CGw = CochainComplex(0, [CG.obj(n) for n in range(TD.top + 1)],
                         [CG.d(n) for n in range(TD.top)], check=False)
    phi = ChainMap(CGw, TD.complex, maps).induced(1)
    edge = S.row_edge(1, 1) @ inverse(S.tau1_to_D(1, 1))
    res = classical_restriction(G, N, M, 1, d=S.d)

    TS1 = S.tot(1, S.S1)
    h1 = TS1.hyper(1)
    off, size = TS1.offsets[1].get((0, 1), (0, 0))
    from_le = S.tau1_to_S1.fg(1)
    inc = S.inc_tau1.fg(1)
    NG = N.as_group
    MN = GModule(NG, M.underlying, [M.action[h] for h in N.elements], check=False)
    CN, _ = bar_cochains(NG, MN, S.d)
    hN = CN.cohomology(1)
    ig, iN = _bar_index(G, 1), _bar_index(NG, 1)
    k0 = S.qd.projection[G.identity]
    idx, nM = len(S.qd.section), M.n

    agree = True
    for j in range(phi.source.n):
        x = phi.source.element([int(a == j) for a in range(phi.source.n)])
        y = edge(phi(x))
        w = h1.lift_element(y)[off:off + size]
        z = from_le.preimage(from_le.target.element(w))
        v = inc.apply(z.coords)
        rv = [0] * CN.U(1).n
        for tN, jN in iN.items():
            jg = ig[(N.elements[tN[0]],)]
            for a in range(nM):
                rv[jN * nM + a] = v[(jg * idx + k0) * nM + a]
        got = hN.class_of(rv)
        want = res(x)
        if not res.target.element(got.coords) == want:
            agree = False
    return {"lift_iso": phi.is_isomorphism(), "agree": agree, "edge": edge, "restriction": res}
