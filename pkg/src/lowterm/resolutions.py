"""Free resolutions over group rings, Ext, and the LHS-type complex D.

A free module Z[G]^r has Z-basis (i, h) at index i*|G| + h. Boundaries are
``FreeMap``s storing the image of each basis generator.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Optional, Sequence

from .complexes import ChainMap, CochainComplex
from .exact_linalg import IntMatrix, block_diagonal, kernel_mod, solve_integer
from .fgab import FgAbGroup, FgAbMorphism
from .grpmod import (
    FiniteGroup,
    FreeMap,
    GModule,
    ModuleSES,
    QuotientData,
    Subgroup,
    act_on_free,
    fixed_points,
    hom_over_subgroup,
    hom_over_subgroup_map,
)


@dataclass
class FreeResolution:
    """... -> Z[G]^r1 -> Z[G]^r0 -> T -> 0, known through degree ``top``.

    ``boundaries[p-1]`` is the map F_p -> F_(p-1); ``augmentation[j]`` is the
    image in T of the j-th generator of F_0.
    """

    group: FiniteGroup
    module: GModule
    ranks: list[int]
    boundaries: list[FreeMap]
    augmentation: list[tuple[int, ...]]
    kind: str = "projective"

    @property
    def top(self) -> int:
        return len(self.ranks) - 1

    def d(self, p: int) -> FreeMap:
        return self.boundaries[p - 1]

    def augmentation_matrix(self) -> IntMatrix:
        """Z-matrix of F_0 -> T."""
        G, T = self.group, self.module
        cols = []
        for v in self.augmentation:
            for h in G.elements():
                cols.append(T.action[h].apply(v))
        if not cols:
            return IntMatrix.zeros(T.n, 0)
        return IntMatrix.from_columns(cols, T.n)

    def verify(self) -> bool:
        """Exactness of F_top -> ... -> F_0 -> T -> 0 as Z-lattices."""
        T = self.module
        eps = self.augmentation_matrix()
        target = [list(T.underlying.relations.column(c)) for c in range(T.underlying.relations.cols)]
        span = IntMatrix.from_columns(eps.columns() + target, T.n) if eps.cols + len(target) \
            else IntMatrix.zeros(T.n, 0)
        for k in range(T.n):
            e = [int(i == k) for i in range(T.n)]
            if solve_integer(span, e) is None:
                return False
        prev = eps
        prev_mods = T.underlying.mods
        prev_U = T.underlying._snf.U
        for p in range(1, self.top + 1):
            Z = self.d(p).z_matrix()
            if not _zero_mod(prev_U @ prev @ Z, prev_mods):
                return False
            K = kernel_mod(prev_U @ prev, prev_mods) if prev.rows else IntMatrix.identity(prev.cols)
            for c in K.columns():
                if solve_integer(Z, c) is None:
                    return False
            prev, prev_mods, prev_U = Z, (0,) * Z.rows, IntMatrix.identity(Z.rows)
        return True


def _zero_mod(M: IntMatrix, mods: Sequence[int]) -> bool:
    for i, row in enumerate(M.data):
        m = mods[i]
        for x in row:
            if (m == 0 and x) or (m and x % m):
                return False
    return True


def _orbit_columns(G: FiniteGroup, v: Sequence[int]) -> list[list[int]]:
    return [act_on_free(G, h, v) for h in G.elements()]


def _greedy_generators(G: FiniteGroup, candidates: list[list[int]], dim: int,
                       extra: Sequence[Sequence[int]] = ()) -> list[list[int]]:
    """Pick candidates until their Z[G]-span (plus ``extra``) contains all."""
    chosen: list[list[int]] = []
    span: list[list[int]] = [list(c) for c in extra]
    for c in sorted(candidates, key=lambda v: (sum(abs(x) for x in v), [abs(x) for x in v])):
        S = IntMatrix.from_columns(span, dim) if span else IntMatrix.zeros(dim, 0)
        if span and solve_integer(S, c) is not None:
            continue
        chosen.append(list(c))
        span.extend(_orbit_columns(G, c))
    return chosen


def bar_resolution(G: FiniteGroup, d: int) -> FreeResolution:
    """Normalized bar resolution of Z over Z[G], degrees 0..d."""
    e = G.identity
    nonid = [g for g in G.elements() if g != e]
    k = G.order
    tuples = [list(product(nonid, repeat=q)) for q in range(d + 1)]
    index = [{t: i for i, t in enumerate(ts)} for ts in tuples]
    ranks = [len(ts) for ts in tuples]
    boundaries = []
    for q in range(1, d + 1):
        imgs = []
        for t in tuples[q]:
            v = [0] * (ranks[q - 1] * k)
            v[index[q - 1][t[1:]] * k + t[0]] += 1
            for i in range(q - 1):
                prod_ = G.mul(t[i], t[i + 1])
                if prod_ != e:
                    s = t[:i] + (prod_,) + t[i + 2:]
                    v[index[q - 1][s] * k + e] += (-1) ** (i + 1)
            v[index[q - 1][t[:-1]] * k + e] += (-1) ** q
            imgs.append(tuple(v))
        boundaries.append(FreeMap(G, ranks[q], ranks[q - 1], tuple(imgs)))
    Z = GModule.trivial(G, FgAbGroup(1))
    return FreeResolution(G, Z, ranks, boundaries, [(1,)], kind="bar")


def projective_resolution(T: GModule, d: int) -> FreeResolution:
    """Iterated free covers of T over Z[G], degrees 0..d.

    Degree 0 uses the presentation's generators verbatim; higher kernels are
    covered by a greedily pruned set of lattice basis vectors.
    """
    G = T.group
    k = G.order
    n = T.n
    aug = [tuple(int(i == j) for i in range(n)) for j in range(n)]
    ranks = [n]
    boundaries: list[FreeMap] = []
    res = FreeResolution(G, T, ranks, boundaries, aug)
    prev = res.augmentation_matrix()
    prev_U, prev_mods = T.underlying._snf.U, T.underlying.mods
    for p in range(1, d + 1):
        dim = ranks[-1] * k
        if prev.rows:
            K = kernel_mod(prev_U @ prev, prev_mods)
        else:
            K = IntMatrix.identity(dim)
        gens = _greedy_generators(G, K.columns(), dim)
        phi = FreeMap(G, len(gens), ranks[-1], tuple(tuple(g) for g in gens))
        ranks.append(len(gens))
        boundaries.append(phi)
        prev = phi.z_matrix()
        prev_U, prev_mods = IntMatrix.identity(prev.rows), (0,) * prev.rows
    return res


def free_resolution_of_trivial(G: FiniteGroup, d: int, kind: str = "reduced") -> FreeResolution:
    if kind == "bar":
        return bar_resolution(G, d)
    if kind == "reduced":
        return projective_resolution(GModule.trivial(G, FgAbGroup(1)), d)
    raise ValueError(f"unknown resolution kind {kind!r}")


# -- Hom out of free modules ------------------------------------------------

def hom_free_object(rank: int, X: GModule) -> FgAbGroup:
    """Hom_G(Z[G]^rank, X) ≅ X^rank (value on each generator)."""
    if rank == 0:
        return FgAbGroup(0)
    return FgAbGroup(rank * X.n, block_diagonal([X.underlying.relations] * rank))


def hom_free_matrix(phi: FreeMap, X: GModule) -> IntMatrix:
    """Precomposition Hom(F_tgt, X) -> Hom(F_src, X); block (j, i) = Σ_h c ρ(h)."""
    k, n = phi.group.order, X.n
    rows = [[0] * (phi.tgt * n) for _ in range(phi.src * n)]
    for j, v in enumerate(phi.images):
        for pos, c in enumerate(v):
            if not c:
                continue
            i, h = divmod(pos, k)
            A = X.action[h].data
            for a in range(n):
                row = rows[j * n + a]
                Ar = A[a]
                for b in range(n):
                    if Ar[b]:
                        row[i * n + b] += c * Ar[b]
    return IntMatrix(rows, phi.src * n, phi.tgt * n)


def hom_complex(P: FreeResolution, X: GModule, top: Optional[int] = None) -> CochainComplex:
    """Hom_G(P_•, X) in degrees 0..top."""
    top = P.top if top is None else top
    objs = [hom_free_object(P.ranks[p], X) for p in range(top + 1)]
    diffs = [FgAbMorphism(objs[p], objs[p + 1], hom_free_matrix(P.d(p + 1), X), check=False)
             for p in range(top)]
    return CochainComplex(0, objs, diffs, valid_top=top, check=False)


def ext_groups(T: GModule, M: GModule, d: int,
               P: Optional[FreeResolution] = None) -> list[FgAbGroup]:
    """Ext^i_G(T, M) for i = 0..d-1."""
    if T.group is not M.group:
        raise ValueError("modules over different groups")
    P = P or projective_resolution(T, d)
    C = hom_complex(P, M, d)
    return [C.cohomology(i).group for i in range(d)]


def group_cohomology(G: FiniteGroup, M: GModule, d: int, kind: str = "bar") -> list[FgAbGroup]:
    """H^i(G, M) for i = 0..d-1."""
    return ext_groups(GModule.trivial(G, FgAbGroup(1)), M, d, free_resolution_of_trivial(G, d, kind))


# -- horseshoe ---------------------------------------------------------------

@dataclass
class Horseshoe:
    """P(B) = P(A) ⊕ P(C) degreewise, with ∂_B = [[∂_A, θ], [0, ∂_C]]."""

    ses: ModuleSES
    PA: FreeResolution
    PB: FreeResolution
    PC: FreeResolution
    theta: list[FreeMap]       # theta[p-1]: P(C)_p -> P(A)_(p-1)


def horseshoe(ses: ModuleSES, d: int, PA: Optional[FreeResolution] = None,
              PC: Optional[FreeResolution] = None) -> Horseshoe:
    G = ses.A.group
    k = G.order
    PA = PA or projective_resolution(ses.A, d)
    PC = PC or projective_resolution(ses.C, d)
    A, B, C = ses.A, ses.B, ses.C
    i_mat, j_mat = ses.i.matrix, ses.j.matrix
    # λ: lift each ε_C generator through j
    lam = []
    jB = FgAbMorphism(B.underlying, C.underlying, j_mat, check=False)
    for v in PC.augmentation:
        x = jB.preimage(C.underlying.element(v))
        if x is None:
            raise ArithmeticError("coefficient map j is not surjective")
        lam.append(tuple(x.coords))
    aug_B = [tuple(i_mat.apply(v)) for v in PA.augmentation] + lam
    epsA = PA.augmentation_matrix()
    epsA_f = FgAbMorphism(FgAbGroup(epsA.cols), A.underlying, epsA, check=False)
    iA = FgAbMorphism(A.underlying, B.underlying, i_mat, check=False)
    lam_res = FreeResolution(G, B, [len(lam)], [], lam)
    lam_Z = lam_res.augmentation_matrix()        # Z-matrix of λ: P(C)_0 -> B
    theta: list[FreeMap] = []
    boundaries: list[FreeMap] = []
    top = min(d, PA.top, PC.top)
    for p in range(1, top + 1):
        dC = PC.d(p)
        imgs = []
        for c in dC.images:
            if p == 1:
                b = lam_Z.apply(c)
                a = iA.preimage(B.underlying.element(b))
                if a is None:
                    raise ArithmeticError("λ∂ does not land in the image of i")
                neg = A.underlying.element([-x for x in a.coords])
                y = epsA_f.preimage(neg)
                if y is None:
                    raise ArithmeticError("augmentation of P(A) is not surjective")
                imgs.append(tuple(y.coords))
            else:
                prev = theta[p - 2].z_matrix()
                w = [-x for x in prev.apply(c)]
                Z = PA.d(p - 1).z_matrix()
                y = solve_integer(Z, w) if Z.cols else ([] if not any(w) else None)
                if y is None:
                    raise ArithmeticError("horseshoe lift failed")
                imgs.append(tuple(y))
        th = FreeMap(G, PC.ranks[p], PA.ranks[p - 1], tuple(imgs))
        theta.append(th)
        # ∂_B on generators: A-part (∂_A e, 0); C-part (θ c, ∂_C c)
        rA0, rC0 = PA.ranks[p - 1], PC.ranks[p - 1]
        bimgs = []
        for v in PA.d(p).images:
            bimgs.append(tuple(v) + (0,) * (rC0 * k))
        for t_img, c_img in zip(th.images, dC.images):
            bimgs.append(tuple(t_img) + tuple(c_img))
        boundaries.append(FreeMap(G, PA.ranks[p] + PC.ranks[p], rA0 + rC0, tuple(bimgs)))
    ranks = [PA.ranks[p] + PC.ranks[p] for p in range(top + 1)]
    PB = FreeResolution(G, B, ranks, boundaries, aug_B, kind="horseshoe")
    return Horseshoe(ses, PA, PB, PC, theta)


# -- the LHS-type complex -----------------------------------------------------

@dataclass
class LhsComplex:
    """D^q = Hom_{Z[N]}(P_q, M) as G/N-modules, q = 0..d."""

    D: CochainComplex
    qd: QuotientData
    M: GModule
    P: FreeResolution
    d: int

    @property
    def valid_top(self) -> int:
        return self.d


def lhs_complex(qd: QuotientData, M: GModule, d: int, resolution: str = "reduced",
                P: Optional[FreeResolution] = None) -> LhsComplex:
    G = qd.group
    P = P or free_resolution_of_trivial(G, d, resolution)
    objs = [hom_over_subgroup(P.ranks[q], M, qd) for q in range(d + 1)]
    diffs = [hom_over_subgroup_map(P.d(q + 1), M, qd, objs[q + 1], objs[q]) for q in range(d)]
    D = CochainComplex(0, objs, diffs, group=qd.quotient, valid_top=d, check=False, name="D")
    return LhsComplex(D, qd, M, P, d)


# -- classical cocycle-level maps ----------------------------------------------

def bar_cochains(G: FiniteGroup, M: GModule, d: int) -> tuple[CochainComplex, FreeResolution]:
    P = bar_resolution(G, d)
    return hom_complex(P, M, d), P


def _bar_index(G: FiniteGroup, q: int) -> dict[tuple, int]:
    nonid = [g for g in G.elements() if g != G.identity]
    return {t: i for i, t in enumerate(product(nonid, repeat=q))}


def classical_restriction(G: FiniteGroup, N: Subgroup, M: GModule, q: int,
                          d: Optional[int] = None) -> FgAbMorphism:
    """H^q(G, M) -> H^q(N, M) by restricting bar cochains."""
    d = d or q + 1
    CG, _ = bar_cochains(G, M, d)
    NG = N.as_group
    MN = GModule(NG, M.underlying, [M.action[h] for h in N.elements], check=False)
    CN, _ = bar_cochains(NG, MN, d)
    maps = {}
    n = M.n
    for r in range(d + 1):
        ig, iN = _bar_index(G, r), _bar_index(NG, r)
        rows = [[0] * CG.U(r).n for _ in range(CN.U(r).n)]
        for t, j in iN.items():
            tg = tuple(N.elements[x] for x in t)
            jg = ig[tg]
            for a in range(n):
                rows[j * n + a][jg * n + a] = 1
        maps[r] = FgAbMorphism(CG.U(r), CN.U(r), IntMatrix(rows, CN.U(r).n, CG.U(r).n),
                               check=False)
    return ChainMap(CG, CN, maps, check=False).induced(q)


def classical_inflation(qd: QuotientData, M: GModule, q: int,
                        d: Optional[int] = None) -> FgAbMorphism:
    """H^q(G/N, M^N) -> H^q(G, M) by composing cocycles with G -> G/N."""
    d = d or q + 1
    G, Q = qd.group, qd.quotient
    MN, inc = fixed_points(M, qd)
    CQ, _ = bar_cochains(Q, MN, d)
    CG, _ = bar_cochains(G, M, d)
    maps = {}
    nG, nQ = M.n, MN.n
    for r in range(d + 1):
        ig, iq = _bar_index(G, r), _bar_index(Q, r)
        rows = [[0] * CQ.U(r).n for _ in range(CG.U(r).n)]
        for t, j in ig.items():
            tq = tuple(qd.projection[x] for x in t)
            if Q.identity in tq:
                continue
            jq = iq[tq]
            for a in range(nG):
                for b in range(nQ):
                    rows[j * nG + a][jq * nQ + b] = inc.matrix.data[a][b]
        maps[r] = FgAbMorphism(CQ.U(r), CG.U(r), IntMatrix(rows, CG.U(r).n, CQ.U(r).n),
                               check=False)
    return ChainMap(CQ, CG, maps, check=False).induced(q)
