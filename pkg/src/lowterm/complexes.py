"""Bounded cochain complexes of abelian groups or of modules.

Objects live in a contiguous degree window; everything outside it is zero.
Cohomology comes with cocycle lifts and class maps so that connecting
morphisms and induced maps can be computed on representatives.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from .exact_linalg import IntMatrix, kernel_mod, solve_integer
from .fgab import (
    FgAbGroup,
    FgAbMorphism,
    direct_sum,
    identity,
    induced_on_quotients,
    is_exact,
    lift_through,
    same_group,
)
from .grpmod import (
    FiniteGroup,
    GModule,
    GModuleMorphism,
    direct_sum_modules,
    module_cokernel,
    module_kernel,
)

Obj = Union[FgAbGroup, GModule]
Mor = Union[FgAbMorphism, GModuleMorphism]


class LiftFailure(RuntimeError):
    """A preimage that must exist on valid input was not found."""


class NotAChainMap(ValueError):
    pass


def underlying(x: Obj) -> FgAbGroup:
    return x.underlying if isinstance(x, GModule) else x


def fgab_of(m: Mor) -> FgAbMorphism:
    return m.fgab if isinstance(m, GModuleMorphism) else m


class CochainComplex:
    """Objects in degrees lo..hi and differentials d^n: C^n -> C^(n+1).

    ``valid_top`` marks complexes cut off from an unbounded one: only the
    terms in degrees <= valid_top agree with the intended complex.
    """

    def __init__(self, lo: int, objects: Sequence[Obj], diffs: Sequence[Mor],
                 group: Optional[FiniteGroup] = None, valid_top: Optional[int] = None,
                 check: bool = True, name: str = ""):
        self.lo = lo
        self.objects = list(objects)
        self.hi = lo + len(self.objects) - 1
        if len(diffs) != max(len(self.objects) - 1, 0):
            raise ValueError("need exactly one differential between consecutive objects")
        self.diffs = list(diffs)
        if group is None and self.objects and isinstance(self.objects[0], GModule):
            group = self.objects[0].group
        self.group = group
        self.valid_top = valid_top
        self.name = name
        self._zero = None
        self._coh: dict[int, "CohomologyDatum"] = {}
        if check:
            for n in range(lo, self.hi - 1):
                if not (self.dfg(n + 1) @ self.dfg(n)).is_zero():
                    raise ValueError(f"d∘d != 0 at degree {n}")

    @property
    def is_module_complex(self) -> bool:
        return self.group is not None

    def zero_object(self) -> Obj:
        if self._zero is None:
            if self.group is not None:
                self._zero = GModule(self.group, FgAbGroup(0),
                                     [IntMatrix.zeros(0, 0)] * self.group.order, check=False)
            else:
                self._zero = FgAbGroup(0)
        return self._zero

    def obj(self, n: int) -> Obj:
        if self.lo <= n <= self.hi:
            return self.objects[n - self.lo]
        return self.zero_object()

    def U(self, n: int) -> FgAbGroup:
        return underlying(self.obj(n))

    def d(self, n: int) -> Mor:
        if self.lo <= n < self.hi:
            return self.diffs[n - self.lo]
        return _zero_mor(self.obj(n), self.obj(n + 1))

    def dfg(self, n: int) -> FgAbMorphism:
        return fgab_of(self.d(n))

    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    def cohomology(self, n: int) -> "CohomologyDatum":
        if n not in self._coh:
            self._coh[n] = cohomology_at(self, n)
        return self._coh[n]

    def __repr__(self) -> str:
        body = ", ".join(f"{n}: {self.U(n)!r}" for n in self.degrees())
        return f"CochainComplex({body})"


def _zero_mor(a: Obj, b: Obj) -> Mor:
    M = IntMatrix.zeros(underlying(b).n, underlying(a).n)
    if isinstance(a, GModule):
        return GModuleMorphism(a, b, M, check=False)
    return FgAbMorphism(a, b, M, check=False)


def _scale(m: Mor, k: int) -> Mor:
    if k == 1:
        return m
    if isinstance(m, GModuleMorphism):
        return GModuleMorphism(m.source, m.target, m.matrix.scale(k), check=False)
    return m.scale(k)


def _mk(src: Obj, tgt: Obj, M: IntMatrix) -> Mor:
    if isinstance(src, GModule):
        return GModuleMorphism(src, tgt, M, check=False)
    return FgAbMorphism(src, tgt, M, check=False)


def _identity_mor(x: Obj) -> Mor:
    return _mk(x, x, IntMatrix.identity(underlying(x).n))


def from_groups(lo: int, objects, diffs, **kw) -> CochainComplex:
    return CochainComplex(lo, objects, diffs, **kw)


class ChainMap:
    """Degreewise morphisms source^n -> target^n commuting with d."""

    def __init__(self, source: CochainComplex, target: CochainComplex,
                 maps: dict[int, Mor], check: bool = True):
        self.source = source
        self.target = target
        self.maps = dict(maps)
        if check:
            for n in range(min(source.lo, target.lo) - 1, max(source.hi, target.hi) + 1):
                lhs = self.fg(n + 1) @ source.dfg(n)
                rhs = target.dfg(n) @ self.fg(n)
                if not lhs.equals(rhs):
                    raise NotAChainMap(f"square at degree {n} does not commute")

    def at(self, n: int) -> Mor:
        if n in self.maps and self.source.lo <= n <= self.source.hi \
                and self.target.lo <= n <= self.target.hi:
            return self.maps[n]
        return _zero_mor(self.source.obj(n), self.target.obj(n))

    def fg(self, n: int) -> FgAbMorphism:
        return fgab_of(self.at(n))

    def __matmul__(self, other: "ChainMap") -> "ChainMap":
        degs = set(self.maps) | set(other.maps)
        return ChainMap(other.source, self.target,
                        {n: _mk(other.source.obj(n), self.target.obj(n),
                                self.fg(n).matrix @ other.fg(n).matrix) for n in degs},
                        check=False)

    def __neg__(self) -> "ChainMap":
        return ChainMap(self.source, self.target, {n: _scale(m, -1) for n, m in self.maps.items()},
                        check=False)

    def induced(self, n: int) -> FgAbMorphism:
        return induced_map(self, n)


def identity_chain_map(C: CochainComplex) -> ChainMap:
    return ChainMap(C, C, {n: _identity_mor(C.obj(n)) for n in C.degrees()}, check=False)


def zero_chain_map(A: CochainComplex, B: CochainComplex) -> ChainMap:
    return ChainMap(A, B, {}, check=False)


# -- cohomology -------------------------------------------------------------

@dataclass
class CohomologyDatum:
    """H^n with a cocycle lift and the class map.

    ``lift`` sends H^n (a simplified presentation) to cocycles in C^n;
    ``class_of`` sends a cocycle (ambient coordinates of C^n) to its class.
    """

    degree: int
    group: FgAbGroup
    lift: FgAbMorphism
    _cycles: IntMatrix = field(repr=False)
    _from_raw: IntMatrix = field(repr=False)

    def class_of(self, z: Sequence[int]):
        c = solve_integer(self._cycles, list(z))
        if c is None:
            raise ValueError("vector is not a cocycle")
        return self.group.element(self._from_raw.apply(c))

    def lift_element(self, h) -> list[int]:
        return self.lift.apply(h.coords)


def cohomology_at(C: CochainComplex, n: int) -> CohomologyDatum:
    Cn = C.U(n)
    d = C.dfg(n)
    tgt = d.target
    K = kernel_mod(tgt._snf.U @ d.matrix, tgt.mods) if tgt.n else IntMatrix.identity(Cn.n)
    bounds = C.dfg(n - 1).matrix.columns() + Cn.relations.columns()
    cols = []
    for b in bounds:
        c = solve_integer(K, b)
        if c is None:
            raise LiftFailure("boundary outside the cycle lattice (d∘d != 0?)")
        cols.append(c)
    R = IntMatrix.from_columns(cols, K.cols) if cols else IntMatrix.zeros(K.cols, 0)
    raw = FgAbGroup(K.cols, R)
    S, to_raw, from_raw = raw.simplified
    lift = FgAbMorphism(S, Cn, K @ to_raw.matrix, check=False)
    return CohomologyDatum(n, S, lift, K, from_raw.matrix)


def induced_map(f: ChainMap, n: int) -> FgAbMorphism:
    Hs = f.source.cohomology(n)
    Ht = f.target.cohomology(n)
    fn = f.fg(n)
    cols = [list(Ht.class_of(fn.apply(Hs.lift.apply(e.coords))).coords) for e in Hs.group.gens()]
    M = IntMatrix.from_columns(cols, Ht.group.n) if cols else IntMatrix.zeros(Ht.group.n, 0)
    return FgAbMorphism(Hs.group, Ht.group, M, check=False)


def degree_shifting_induced(source: CochainComplex, target: CochainComplex,
                            maps: dict[int, FgAbMorphism], k: int, n: int) -> FgAbMorphism:
    """H^n(source) -> H^(n+k)(target) from cochain maps source^m -> target^(m+k)."""
    Hs, Ht = source.cohomology(n), target.cohomology(n + k)
    fn = maps[n]
    cols = [list(Ht.class_of(fn.apply(Hs.lift.apply(e.coords))).coords) for e in Hs.group.gens()]
    M = IntMatrix.from_columns(cols, Ht.group.n) if cols else IntMatrix.zeros(Ht.group.n, 0)
    return FgAbMorphism(Hs.group, Ht.group, M, check=False)


def quasi_iso_check(f: ChainMap) -> tuple[bool, dict[int, bool]]:
    lo = min(f.source.lo, f.target.lo)
    hi = max(f.source.hi, f.target.hi)
    top = min(x for x in (f.source.valid_top, f.target.valid_top, hi + 1) if x is not None)
    witness = {}
    for n in range(lo, min(hi, top - 1) + 1):
        witness[n] = induced_map(f, n).is_isomorphism()
    return all(witness.values()), witness


# -- truncations, shifts, cones ----------------------------------------------

def _kernel_obj(m: Mor):
    if isinstance(m, GModuleMorphism):
        return module_kernel(m)
    from .fgab import kernel
    return kernel(m)


def _cokernel_obj(m: Mor):
    if isinstance(m, GModuleMorphism):
        return module_cokernel(m)
    from .fgab import cokernel
    return cokernel(m)


def truncate_le(C: CochainComplex, n: int) -> tuple[CochainComplex, ChainMap]:
    """τ≤n C: degrees < n kept, ker d^n in degree n; with the inclusion into C."""
    if n >= C.hi:
        return C, identity_chain_map(C)
    lo = min(C.lo, n)
    K, inc = _kernel_obj(C.d(n))
    objs = [C.obj(k) for k in range(lo, n)] + [K]
    diffs = [C.d(k) for k in range(lo, n - 1)]
    if n - 1 >= lo:
        h = lift_through(C.dfg(n - 1), fgab_of(inc))
        diffs.append(_mk(C.obj(n - 1), K, h.matrix))
    T = CochainComplex(lo, objs, diffs, group=C.group, check=False)
    maps = {k: _identity_mor(C.obj(k)) for k in range(lo, n)}
    maps[n] = inc
    return T, ChainMap(T, C, maps, check=False)


def truncate_ge(C: CochainComplex, n: int) -> tuple[CochainComplex, ChainMap]:
    """τ≥n C: coker d^(n-1) in degree n, degrees > n kept; with the projection."""
    if n <= C.lo:
        return C, identity_chain_map(C)
    hi = max(C.hi, n)
    Q, proj = _cokernel_obj(C.d(n - 1))
    objs = [Q] + [C.obj(k) for k in range(n + 1, hi + 1)]
    diffs = []
    if n + 1 <= hi:
        dn = induced_on_quotients(C.dfg(n), fgab_of(proj), identity(C.U(n + 1)))
        diffs.append(_mk(Q, C.obj(n + 1), dn.matrix))
        diffs += [C.d(k) for k in range(n + 1, hi)]
    T = CochainComplex(n, objs, diffs, group=C.group, valid_top=C.valid_top, check=False)
    maps = {n: proj}
    maps.update({k: _identity_mor(C.obj(k)) for k in range(n + 1, hi + 1)})
    return T, ChainMap(C, T, maps, check=False)


@dataclass
class Stalk:
    """H^n(C) in degree n, with the canonical maps τ≤n C -> stalk -> τ≥n C."""

    complex: CochainComplex
    from_le: ChainMap      # τ≤n C -> stalk
    to_ge: ChainMap        # stalk -> τ≥n C
    le: CochainComplex
    ge: CochainComplex


def stalk_data(C: CochainComplex, n: int) -> Stalk:
    le, _ = truncate_le(C, n)
    ge, _ = truncate_ge(C, n)
    # H^n = ker(ge^n -> ge^(n+1))
    H, inc = _kernel_obj(ge.d(n))
    S = CochainComplex(n, [H], [], group=C.group, check=False)
    to_ge = ChainMap(S, ge, {n: inc}, check=False)
    # τ≤n: ker d^n -> C^n -> coker d^(n-1) lands in H
    le_inc_n = _le_inclusion(C, n, le)
    ge_proj_n = _ge_projection(C, n, ge)
    comp = ge_proj_n @ le_inc_n
    h = lift_through(comp, fgab_of(inc))
    from_le = ChainMap(le, S, {n: _mk(le.obj(n), H, h.matrix)}, check=False)
    return Stalk(S, from_le, to_ge, le, ge)


def _le_inclusion(C, n, le) -> FgAbMorphism:
    if n >= C.hi:
        return identity(C.U(n))
    _, inc = _kernel_obj(C.d(n))
    return fgab_of(inc)


def _ge_projection(C, n, ge) -> FgAbMorphism:
    if n <= C.lo:
        return identity(C.U(n))
    _, proj = _cokernel_obj(C.d(n - 1))
    return fgab_of(proj)


def stalk(C: CochainComplex, n: int) -> CochainComplex:
    return stalk_data(C, n).complex


def shift(C: CochainComplex, k: int) -> CochainComplex:
    """C[k]: (C[k])^n = C^(n+k), differential scaled by (-1)^k."""
    sign = -1 if k % 2 else 1
    vt = None if C.valid_top is None else C.valid_top - k
    return CochainComplex(C.lo - k, C.objects, [_scale(d, sign) for d in C.diffs],
                          group=C.group, valid_top=vt, check=False)


def shift_map(f: ChainMap, k: int, source: Optional[CochainComplex] = None,
              target: Optional[CochainComplex] = None) -> ChainMap:
    src = source or shift(f.source, k)
    tgt = target or shift(f.target, k)
    return ChainMap(src, tgt, {n - k: m for n, m in f.maps.items()}, check=False)


def _dsum(objs: Sequence[Obj], group):
    if group is not None:
        return direct_sum_modules(list(objs), group)
    return direct_sum(list(objs))


def cone(f: ChainMap) -> tuple[CochainComplex, ChainMap, ChainMap]:
    """cone(f)^n = X^(n+1) ⊕ Y^n, d = [[-d_X, 0], [f, d_Y]].

    Returns (cone, Y -> cone, cone -> X[1]).
    """
    X, Y = f.source, f.target
    group = X.group if X.group is not None else Y.group
    lo = min(X.lo - 1, Y.lo)
    hi = max(X.hi - 1, Y.hi)
    objs, injs, projs = [], [], []
    for n in range(lo, hi + 1):
        S, inj, proj = _dsum([X.obj(n + 1), Y.obj(n)], group)
        objs.append(S)
        injs.append(inj)
        projs.append(proj)
    diffs = []
    for n in range(lo, hi):
        a = X.dfg(n + 1).matrix.scale(-1)
        b = f.fg(n + 1).matrix
        c = Y.dfg(n).matrix
        nx1, nx2 = X.U(n + 1).n, X.U(n + 2).n
        ny1, ny2 = Y.U(n).n, Y.U(n + 1).n
        rows = [list(a.data[i]) + [0] * ny1 for i in range(nx2)]
        rows += [list(b.data[i]) + list(c.data[i]) for i in range(ny2)]
        diffs.append(_mk(objs[n - lo], objs[n + 1 - lo], IntMatrix(rows, nx2 + ny2, nx1 + ny1)))
    vt = _min_opt(None if X.valid_top is None else X.valid_top - 1, Y.valid_top)
    Cn = CochainComplex(lo, objs, diffs, group=group, valid_top=vt, check=False)
    X1 = shift(X, 1)
    inc = ChainMap(Y, Cn, {n: injs[n - lo][1] for n in range(lo, hi + 1)
                           if Y.lo <= n <= Y.hi}, check=False)
    pr = ChainMap(Cn, X1, {n: projs[n - lo][0] for n in range(lo, hi + 1)
                           if X.lo <= n + 1 <= X.hi}, check=False)
    return Cn, inc, pr


def _min_opt(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def same_complex(A: CochainComplex, B: CochainComplex) -> bool:
    """Equality on the nose: same degrees, presentations and differentials."""
    lo, hi = min(A.lo, B.lo), max(A.hi, B.hi)
    for n in range(lo, hi + 1):
        if not same_group(A.U(n), B.U(n)):
            if A.U(n).n == 0 and B.U(n).n == 0:
                continue
            return False
        if A.dfg(n).matrix != B.dfg(n).matrix and (A.U(n).n and A.U(n + 1).n):
            return False
    return True


# -- short exact sequences and the snake lemma -------------------------------

@dataclass
class SESOfComplexes:
    A: CochainComplex
    B: CochainComplex
    C: CochainComplex
    i: ChainMap
    p: ChainMap

    def validate(self) -> "SESOfComplexes":
        lo = min(self.A.lo, self.B.lo, self.C.lo)
        hi = max(self.A.hi, self.B.hi, self.C.hi)
        for n in range(lo, hi + 1):
            i, p = self.i.fg(n), self.p.fg(n)
            if not i.is_injective():
                raise ValueError(f"i not injective in degree {n}")
            if not p.is_surjective():
                raise ValueError(f"p not surjective in degree {n}")
            if not is_exact(i, p):
                raise ValueError(f"not exact in the middle in degree {n}")
        return self


@dataclass
class LongExactSequence:
    """objects[k] -maps[k]-> objects[k+1]; labels name each node."""

    objects: list
    maps: list
    labels: list

    def exactness(self) -> list[bool]:
        """Exactness verdict at each interior node (index 1..len-2)."""
        return [is_exact(self.maps[k - 1], self.maps[k]) for k in range(1, len(self.objects) - 1)]

    def is_exact(self) -> bool:
        return all(self.exactness())


def connecting_map(s: SESOfComplexes, n: int) -> FgAbMorphism:
    """δ: H^n(C) -> H^(n+1)(A) by lift, differentiate, pull back."""
    HC = s.C.cohomology(n)
    HA = s.A.cohomology(n + 1)
    p, i = s.p.fg(n), s.i.fg(n + 1)
    dB = s.B.dfg(n)
    cols = []
    for e in HC.group.gens():
        z = HC.group.element(e.coords)
        zc = s.C.U(n).element(HC.lift.apply(z.coords))
        b = p.preimage(zc)
        if b is None:
            raise LiftFailure(f"cocycle in degree {n} does not lift through p")
        db = s.B.U(n + 1).element(dB.apply(b.coords))
        a = i.preimage(db)
        if a is None:
            raise LiftFailure(f"d(lift) in degree {n + 1} is not in the image of i")
        cols.append(list(HA.class_of(a.coords).coords))
    M = IntMatrix.from_columns(cols, HA.group.n) if cols else IntMatrix.zeros(HA.group.n, 0)
    return FgAbMorphism(HC.group, HA.group, M, check=False)


def les_of_ses(s: SESOfComplexes, lo: Optional[int] = None,
               hi: Optional[int] = None) -> LongExactSequence:
    if lo is None:
        lo = min(s.A.lo, s.B.lo, s.C.lo)
    if hi is None:
        hi = max(s.A.hi, s.B.hi, s.C.hi)
    objs, maps, labels = [], [], []
    for n in range(lo, hi + 1):
        objs += [s.A.cohomology(n).group, s.B.cohomology(n).group, s.C.cohomology(n).group]
        labels += [f"H{n}(A)", f"H{n}(B)", f"H{n}(C)"]
        maps += [induced_map(s.i, n), induced_map(s.p, n)]
        if n < hi:
            maps.append(connecting_map(s, n))
    return LongExactSequence(objs, maps, labels)


def quotient_complex(f: ChainMap) -> tuple[CochainComplex, ChainMap]:
    """Y/X for a degreewise injective f: X -> Y, with the projection.

    Degrees where X vanishes keep Y's object verbatim.
    """
    X, Y = f.source, f.target
    objs, projs = [], {}
    for n in Y.degrees():
        if X.U(n).n == 0:
            objs.append(Y.obj(n))
            projs[n] = _identity_mor(Y.obj(n))
        else:
            Qn, pn = _cokernel_obj(f.at(n))
            objs.append(Qn)
            projs[n] = pn
    diffs = []
    for n in range(Y.lo, Y.hi):
        m = induced_on_quotients(Y.dfg(n), fgab_of(projs[n]), fgab_of(projs[n + 1]))
        diffs.append(_mk(objs[n - Y.lo], objs[n + 1 - Y.lo], m.matrix))
    Qc = CochainComplex(Y.lo, objs, diffs, group=Y.group, valid_top=Y.valid_top, check=False)
    return Qc, ChainMap(Y, Qc, projs, check=False)
