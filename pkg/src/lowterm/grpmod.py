"""Finite groups, quotients, and finitely generated modules with action.

Groups are Cayley tables (element 0 need not be the identity, but every
builtin puts it there). Module actions are stored per group element.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

from .exact_linalg import IntMatrix, block_diagonal
from .fgab import (
    FgAbGroup,
    FgAbMorphism,
    cokernel,
    direct_sum,
    identity,
    image,
    induced_on_quotients,
    kernel,
    lift_through,
)


class GroupError(ValueError):
    pass


class NotNormal(GroupError):
    pass


class NotACocycle(ValueError):
    def __init__(self, message: str, pair: tuple[int, int]):
        super().__init__(message)
        self.pair = pair


class NotEquivariant(ValueError):
    pass


class FiniteGroup:
    """A group given by its full multiplication table."""

    def __init__(self, table: Sequence[Sequence[int]], labels: Optional[Sequence[str]] = None,
                 name: str = "", generators: Optional[Sequence[int]] = None):
        self.table = tuple(tuple(r) for r in table)
        self.order = len(self.table)
        self.labels = tuple(labels) if labels else tuple(f"g{i}" for i in range(self.order))
        self.name = name
        self._validate()
        self.identity = next(e for e in range(self.order)
                             if all(self.table[e][x] == x for x in range(self.order)))
        self.inverse = tuple(next(y for y in range(self.order) if self.table[x][y] == self.identity)
                             for x in range(self.order))
        self.generators = tuple(generators) if generators is not None else self._find_generators()

    def _validate(self):
        n = self.order
        rng = range(n)
        if n == 0 or any(len(r) != n for r in self.table):
            raise GroupError("Cayley table must be square and nonempty")
        if any(not 0 <= x < n for r in self.table for x in r):
            raise GroupError("Cayley table entries out of range")
        ids = [e for e in rng if all(self.table[e][x] == x and self.table[x][e] == x for x in rng)]
        if not ids:
            raise GroupError("no identity element")
        for r in self.table:
            if len(set(r)) != n:
                raise GroupError("a row of the Cayley table is not a permutation")
        t = self.table
        for a, b, c in itertools.product(rng, rng, rng):
            if t[t[a][b]][c] != t[a][t[b][c]]:
                raise GroupError(f"associativity fails at ({a}, {b}, {c})")

    def _find_generators(self) -> tuple[int, ...]:
        gens: list[int] = []
        span = {self.identity}
        for g in range(self.order):
            if g not in span:
                gens.append(g)
                span = set(self.closure(gens))
        return tuple(gens)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def closure(self, gens: Sequence[int]) -> list[int]:
        seen = {self.identity}
        queue = deque([self.identity])
        while queue:
            x = queue.popleft()
            for g in gens:
                y = self.table[g][x]
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return sorted(seen)

    def is_abelian(self) -> bool:
        return all(self.table[a][b] == self.table[b][a]
                   for a in range(self.order) for b in range(self.order))

    def elements(self) -> range:
        return range(self.order)

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name or 'order ' + str(self.order)})"


def _perm_group(perms, name, generators):
    index = {p: i for i, p in enumerate(perms)}
    table = [[index[tuple(p[q[k]] for k in range(len(q)))] for q in perms] for p in perms]
    return FiniteGroup(table, ["".join(map(str, p)) for p in perms], name,
                       [index[g] for g in generators])


def builtin_group(family: str, parameter: Optional[int] = None) -> FiniteGroup:
    """cyclic n, dihedral n (order 2n), quaternion8, symmetric3, klein4."""
    if family == "cyclic":
        n = int(parameter or 1)
        if n < 1:
            raise GroupError("cyclic group needs n >= 1")
        table = [[(a + b) % n for b in range(n)] for a in range(n)]
        return FiniteGroup(table, [f"g^{k}" for k in range(n)], f"C{n}",
                           [1 % n] if n > 1 else [])
    if family == "dihedral":
        n = int(parameter or 3)
        # element r^k s^e has index k + n*e
        def mul(x, y):
            k1, e1 = x % n, x // n
            k2, e2 = y % n, y // n
            k = (k1 + (k2 if e1 == 0 else -k2)) % n
            return k + n * ((e1 + e2) % 2)
        table = [[mul(x, y) for y in range(2 * n)] for x in range(2 * n)]
        labels = [f"r^{k}" + ("s" if e else "") for e in range(2) for k in range(n)]
        return FiniteGroup(table, labels, f"D{n}", [1 % n, n])
    if family == "quaternion8":
        # elements ±1, ±i, ±j, ±k encoded as (sign, unit)
        units = ["1", "i", "j", "k"]
        prod = {("1", u): (1, u) for u in units}
        prod.update({(u, "1"): (1, u) for u in units})
        prod.update({("i", "i"): (-1, "1"), ("j", "j"): (-1, "1"), ("k", "k"): (-1, "1"),
                     ("i", "j"): (1, "k"), ("j", "k"): (1, "i"), ("k", "i"): (1, "j"),
                     ("j", "i"): (-1, "k"), ("k", "j"): (-1, "i"), ("i", "k"): (-1, "j")})
        elems = [(s, u) for s in (1, -1) for u in units]
        index = {e: i for i, e in enumerate(elems)}
        def mul(x, y):
            s, u = prod[(x[1], y[1])]
            return index[(x[0] * y[0] * s, u)]
        table = [[mul(x, y) for y in elems] for x in elems]
        labels = [("" if s > 0 else "-") + u for s, u in elems]
        return FiniteGroup(table, labels, "Q8", [index[(1, "i")], index[(1, "j")]])
    if family == "symmetric3":
        perms = sorted(itertools.permutations(range(3)))
        return _perm_group(perms, "S3", [(1, 0, 2), (1, 2, 0)])
    if family == "klein4":
        table = [[a ^ b for b in range(4)] for a in range(4)]
        return FiniteGroup(table, ["e", "a", "b", "ab"], "V4", [1, 2])
    raise GroupError(f"unknown group family {family!r}")


@dataclass(frozen=True)
class Subgroup:
    group: FiniteGroup
    elements: tuple[int, ...]

    def __post_init__(self):
        els = tuple(sorted(set(self.elements)))
        object.__setattr__(self, "elements", els)
        G = self.group
        if G.identity not in els:
            raise GroupError("subgroup must contain the identity")
        s = set(els)
        for a in els:
            for b in els:
                if G.mul(a, b) not in s:
                    raise GroupError(f"subset not closed: {a}*{b} = {G.mul(a, b)}",)

    @property
    def order(self) -> int:
        return len(self.elements)

    def is_normal(self) -> bool:
        return self.normality_violation() is None

    def normality_violation(self) -> Optional[tuple[int, int]]:
        G = self.group
        s = set(self.elements)
        for g in range(G.order):
            for n in self.elements:
                if G.mul(G.mul(g, n), G.inverse[g]) not in s:
                    return (g, n)
        return None

    @cached_property
    def as_group(self) -> FiniteGroup:
        els = self.elements
        idx = {g: i for i, g in enumerate(els)}
        table = [[idx[self.group.mul(a, b)] for b in els] for a in els]
        return FiniteGroup(table, [self.group.labels[g] for g in els],
                           f"subgroup of {self.group.name}")


def closure_violation(G: FiniteGroup, subset: Sequence[int]) -> Optional[tuple[int, int]]:
    s = set(subset)
    for a in subset:
        for b in subset:
            if G.mul(a, b) not in s:
                return (a, b)
    return None


@dataclass(frozen=True)
class QuotientData:
    """G/N with projection and a section through least coset elements."""

    group: FiniteGroup
    normal: Subgroup
    quotient: FiniteGroup
    projection: tuple[int, ...]   # G index -> Q index
    section: tuple[int, ...]      # Q index -> G index (coset representative)

    def n_part(self, g: int) -> tuple[int, int]:
        """Write g = n·s with s the chosen representative; returns (n, q)."""
        G = self.group
        q = self.projection[g]
        s = self.section[q]
        return G.mul(g, G.inverse[s]), q


def quotient_group(G: FiniteGroup, N: Subgroup) -> QuotientData:
    v = N.normality_violation()
    if v is not None:
        raise NotNormal(f"subgroup is not normal: conjugating {v[1]} by {v[0]} leaves it")
    reps = []
    proj = [None] * G.order
    for g in range(G.order):
        if proj[g] is None:
            coset = {G.mul(g, n) for n in N.elements}
            q = len(reps)
            reps.append(min(coset))
            for x in coset:
                proj[x] = q
    # reps are already increasing since g runs in order
    table = [[proj[G.mul(reps[a], reps[b])] for b in range(len(reps))] for a in range(len(reps))]
    gens = sorted({proj[g] for g in G.generators} - {proj[G.identity]})
    Q = FiniteGroup(table, [G.labels[r] + "N" for r in reps], f"{G.name}/N", gens)
    return QuotientData(G, N, Q, tuple(proj), tuple(reps))


# --------------------------------------------------------------------------
# modules

class GModule:
    """Finitely generated abelian group with a group action."""

    def __init__(self, group: FiniteGroup, underlying: FgAbGroup,
                 action: Sequence[IntMatrix], check: bool = True, name: str = ""):
        self.group = group
        self.underlying = underlying
        self.action = tuple(a if isinstance(a, IntMatrix) else IntMatrix(a, underlying.n,
                                                                          underlying.n)
                            for a in action)
        self.name = name
        if len(self.action) != group.order:
            raise ValueError("one action matrix per group element required")
        if check:
            self.validate()

    def validate(self):
        G, A = self.group, self.underlying
        maps = [FgAbMorphism(A, A, m) for m in self.action]
        if not maps[G.identity].equals(identity(A)):
            raise ValueError("identity does not act trivially")
        for g in range(G.order):
            for h in range(G.order):
                if not (maps[g] @ maps[h]).equals(maps[G.mul(g, h)]):
                    raise ValueError(f"action is not multiplicative at ({g}, {h})")

    @property
    def n(self) -> int:
        return self.underlying.n

    def act(self, g: int) -> FgAbMorphism:
        return FgAbMorphism(self.underlying, self.underlying, self.action[g], check=False)

    def is_trivial_action(self) -> bool:
        return all(self.act(g).equals(identity(self.underlying)) for g in self.group.elements())

    def __repr__(self) -> str:
        return f"GModule({self.group.name}, {self.underlying!r})"

    @classmethod
    def trivial(cls, group: FiniteGroup, underlying: FgAbGroup) -> "GModule":
        I = IntMatrix.identity(underlying.n)
        return cls(group, underlying, [I] * group.order, check=False)

    @classmethod
    def from_generators(cls, group: FiniteGroup, underlying: FgAbGroup,
                        gen_action: dict[int, IntMatrix], name: str = "") -> "GModule":
        """Expand generator matrices over the whole group, then validate."""
        n = underlying.n
        acts: dict[int, IntMatrix] = {group.identity: IntMatrix.identity(n)}
        gens = list(gen_action)
        span = group.closure(gens)
        if len(span) != group.order:
            raise ValueError("listed elements do not generate the group")
        queue = deque([group.identity])
        while queue:
            x = queue.popleft()
            for g in gens:
                y = group.mul(g, x)
                if y not in acts:
                    acts[y] = gen_action[g] @ acts[x]
                    queue.append(y)
        for g, m in gen_action.items():
            if not FgAbMorphism(underlying, underlying, m).equals(
                    FgAbMorphism(underlying, underlying, acts[g], check=False)):
                raise ValueError(f"action of {group.labels[g]} inconsistent with the group law")
        return cls(group, underlying, [acts[g] for g in range(group.order)], name=name)

    @classmethod
    def free(cls, group: FiniteGroup, rank: int) -> "GModule":
        """Z[G]^rank; coordinate (i, h) sits at index i*|G| + h."""
        k = group.order
        n = rank * k
        acts = []
        for g in range(k):
            M = [[0] * n for _ in range(n)]
            for i in range(rank):
                for h in range(k):
                    M[i * k + group.mul(g, h)][i * k + h] = 1
            acts.append(IntMatrix(M, n, n))
        return cls(group, FgAbGroup(n), acts, check=False)


def _dsum_module(mods: Sequence[GModule]) -> tuple[GModule, list, list]:
    S, inj, proj = direct_sum([m.underlying for m in mods])
    G = mods[0].group
    acts = [block_diagonal([m.action[g] for m in mods]) for g in range(G.order)]
    return GModule(G, S, acts, check=False), inj, proj


def direct_sum_modules(mods: Sequence[GModule], group: Optional[FiniteGroup] = None):
    if not mods:
        G = group
        return GModule(G, FgAbGroup(0), [IntMatrix.zeros(0, 0)] * G.order, check=False), [], []
    return _dsum_module(mods)


class GModuleMorphism:
    def __init__(self, source: GModule, target: GModule, matrix, check: bool = True):
        if source.group is not target.group:
            raise ValueError("modules over different groups")
        self.source = source
        self.target = target
        self.fgab = FgAbMorphism(source.underlying, target.underlying, matrix, check=check)
        if check:
            for g in source.group.elements():
                if not (target.act(g) @ self.fgab).equals(self.fgab @ source.act(g)):
                    raise NotEquivariant(f"map does not commute with {source.group.labels[g]}")

    @property
    def matrix(self) -> IntMatrix:
        return self.fgab.matrix

    def __matmul__(self, other: "GModuleMorphism") -> "GModuleMorphism":
        return GModuleMorphism(other.source, self.target, self.matrix @ other.matrix, check=False)

    def __neg__(self):
        return GModuleMorphism(self.source, self.target, -self.matrix, check=False)


def module_kernel(f: GModuleMorphism) -> tuple[GModule, GModuleMorphism]:
    K, inc = kernel(f.fgab)
    acts = []
    for g in f.source.group.elements():
        h = lift_through(f.source.act(g) @ inc, inc)
        acts.append(h.matrix)
    Km = GModule(f.source.group, K, acts, check=False)
    return Km, GModuleMorphism(Km, f.source, inc.matrix, check=False)


def module_cokernel(f: GModuleMorphism) -> tuple[GModule, GModuleMorphism]:
    C, proj = cokernel(f.fgab)
    acts = [induced_on_quotients(f.target.act(g), proj, proj).matrix
            for g in f.source.group.elements()]
    Cm = GModule(f.source.group, C, acts, check=False)
    return Cm, GModuleMorphism(f.target, Cm, proj.matrix, check=False)


def module_image(f: GModuleMorphism) -> tuple[GModule, GModuleMorphism]:
    I, inc, _ = image(f.fgab)
    acts = [lift_through(f.target.act(g) @ inc, inc).matrix for g in f.source.group.elements()]
    Im = GModule(f.source.group, I, acts, check=False)
    return Im, GModuleMorphism(Im, f.target, inc.matrix, check=False)


@dataclass
class ModuleSES:
    """0 -> A -i-> B -j-> C -> 0."""

    A: GModule
    B: GModule
    C: GModule
    i: GModuleMorphism
    j: GModuleMorphism
    cocycle: Optional[list] = field(default=None)

    def validate(self):
        from .fgab import is_exact
        if not self.i.fgab.is_injective():
            raise ValueError("i is not injective")
        if not self.j.fgab.is_surjective():
            raise ValueError("j is not surjective")
        if not is_exact(self.i.fgab, self.j.fgab):
            raise ValueError("image(i) != kernel(j)")
        return self

    def splits(self) -> bool:
        """True iff j has an equivariant section (searched by solving)."""
        return equivariant_section(self) is not None


def equivariant_section(ses: ModuleSES) -> Optional[GModuleMorphism]:
    H, inc = hom_group(ses.C, ses.B)
    jstar = _hom_postcompose(ses.C, ses.B, ses.C, ses.j)
    # sections are homs s with j∘s = id_C
    target = _hom_ambient(ses.C, ses.C)
    idvec = _flatten(IntMatrix.identity(ses.C.n))
    comp = jstar @ inc
    x = comp.preimage(target.element(idvec))
    if x is None:
        return None
    return GModuleMorphism(ses.C, ses.B, _unflatten(inc.apply(x.coords), ses.B.n, ses.C.n))


# -- Hom groups ------------------------------------------------------------

def _flatten(X: IntMatrix) -> list[int]:
    # column-major: block b is the image of generator b
    return [X.data[a][b] for b in range(X.cols) for a in range(X.rows)]


def _unflatten(v: Sequence[int], rows: int, cols: int) -> IntMatrix:
    return IntMatrix([[v[b * rows + a] for b in range(cols)] for a in range(rows)], rows, cols)


def _hom_ambient(T: GModule, M: GModule) -> FgAbGroup:
    return FgAbGroup(T.n * M.n, block_diagonal([M.underlying.relations] * T.n))


def _hom_postcompose(T: GModule, M: GModule, M2: GModule, f: GModuleMorphism) -> FgAbMorphism:
    src, tgt = _hom_ambient(T, M), _hom_ambient(T, M2)
    return FgAbMorphism(src, tgt, block_diagonal([f.matrix] * T.n), check=False)


def hom_group(T: GModule, M: GModule) -> tuple[FgAbGroup, FgAbMorphism]:
    """Hom_G(T, M) by solving the equivariance and relation equations.

    Returns (H, inclusion into the ambient group of all integer matrices
    modulo matrices with columns in M's relation lattice). Use
    ``_unflatten`` on inclusion images to read off matrices.
    """
    G = T.group
    nT, nM = T.n, M.n
    amb = _hom_ambient(T, M)
    rows_blocks = []
    targets = []
    RT = T.underlying.relations
    # X -> X·R_T
    for c in range(RT.cols):
        col = RT.column(c)
        blk = [[0] * (nT * nM) for _ in range(nM)]
        for b in range(nT):
            if col[b]:
                for a in range(nM):
                    blk[a][b * nM + a] += col[b]
        rows_blocks.append(blk)
        targets.append(M.underlying)
    # X -> ρ_M(g)X − Xρ_T(g)
    for g in G.generators:
        rm, rt = M.action[g], T.action[g]
        blk = [[0] * (nT * nM) for _ in range(nM * nT)]
        for b in range(nT):
            for a in range(nM):
                r = b * nM + a
                for a2 in range(nM):
                    if rm.data[a][a2]:
                        blk[r][b * nM + a2] += rm.data[a][a2]
                for b2 in range(nT):
                    if rt.data[b2][b]:
                        blk[r][b2 * nM + a] -= rt.data[b2][b]
        rows_blocks.append(blk)
        targets.extend([M.underlying] * nT)
    tgt, _, _ = direct_sum(targets)
    rows = [r for blk in rows_blocks for r in blk]
    Phi = FgAbMorphism(amb, tgt, IntMatrix(rows, tgt.n, amb.n), check=False)
    return kernel(Phi)


def hom_matrices(T: GModule, M: GModule) -> list[IntMatrix]:
    """All elements of a finite Hom_G(T, M), as matrices."""
    H, inc = hom_group(T, M)
    return [_unflatten(inc.apply(x.coords), M.n, T.n) for x in H.enumerate_elements()]


# -- functors ---------------------------------------------------------------

def fixed_points(M: GModule, qd: QuotientData) -> tuple[GModule, FgAbMorphism]:
    """(M^N as a G/N-module, inclusion of underlying groups)."""
    A = M.underlying
    nelts = [n for n in qd.normal.elements if n != M.group.identity]
    tgt, _, _ = direct_sum([A] * len(nelts))
    rows = []
    for n in nelts:
        D = M.action[n] - IntMatrix.identity(A.n)
        rows.extend(D.data)
    f = FgAbMorphism(A, tgt, IntMatrix(rows, tgt.n, A.n), check=False)
    K, inc = kernel(f)
    acts = [lift_through(M.act(qd.section[q]) @ inc, inc).matrix
            for q in qd.quotient.elements()]
    return GModule(qd.quotient, K, acts), inc


def inflation(T: GModule, qd: QuotientData) -> GModule:
    if T.group is not qd.quotient:
        raise ValueError("module is not over the quotient group")
    return GModule(qd.group, T.underlying, [T.action[qd.projection[g]]
                                            for g in qd.group.elements()], check=False)


def restriction(M: GModule, H: Subgroup) -> GModule:
    return GModule(H.as_group, M.underlying, [M.action[h] for h in H.elements], check=False)


def extension_from_cocycle(Q: FiniteGroup, M: GModule, u: Sequence[Sequence[int]]) -> ModuleSES:
    """0 -> M -> S -> Z -> 0 with s·(m, a) = (s·m + a·u(s), a)."""
    if M.group is not Q:
        raise ValueError("module is not over the given group")
    n = M.n
    u = [list(v) for v in u]
    if len(u) != Q.order or any(len(v) != n for v in u):
        raise ValueError("cocycle needs one vector of module rank per group element")
    A = M.underlying
    for s in Q.elements():
        for t in Q.elements():
            lhs = u[Q.mul(s, t)]
            rhs = [a + b for a, b in zip(u[s], M.action[s].apply(u[t]))]
            if not A.contains_relation([a - b for a, b in zip(lhs, rhs)]):
                raise NotACocycle(f"u({Q.labels[s]}·{Q.labels[t]}) != u(s) + s·u(t)", (s, t))
    R = M.underlying.relations
    S = FgAbGroup(n + 1, IntMatrix(list(R.data) + [[0] * R.cols], n + 1, R.cols))
    acts = []
    for s in Q.elements():
        rows = [list(M.action[s].data[i]) + [u[s][i]] for i in range(n)]
        rows.append([0] * n + [1])
        acts.append(IntMatrix(rows, n + 1, n + 1))
    Sm = GModule(Q, S, acts)
    Zm = GModule.trivial(Q, FgAbGroup(1))
    i = GModuleMorphism(M, Sm, IntMatrix([[int(a == b) for b in range(n)]
                                          for a in range(n + 1)], n + 1, n))
    j = GModuleMorphism(Sm, Zm, IntMatrix([[0] * n + [1]], 1, n + 1))
    return ModuleSES(M, Sm, Zm, i, j, cocycle=u).validate()


# -- free modules and Hom over the normal subgroup -------------------------

@dataclass(frozen=True)
class FreeMap:
    """Z[G]-linear map Z[G]^src -> Z[G]^tgt; images[j] is the image of e_j in
    coordinates (i, h) -> i*|G| + h."""

    group: FiniteGroup
    src: int
    tgt: int
    images: tuple[tuple[int, ...], ...]

    def z_matrix(self) -> IntMatrix:
        G, k = self.group, self.group.order
        cols = []
        for j in range(self.src):
            v = self.images[j]
            for g in range(k):
                w = [0] * (self.tgt * k)
                for idx, c in enumerate(v):
                    if c:
                        i, h = divmod(idx, k)
                        w[i * k + G.mul(g, h)] += c
                cols.append(w)
        return IntMatrix.from_columns(cols, self.tgt * k) if cols else \
            IntMatrix.zeros(self.tgt * k, 0)

    def then(self, other: "FreeMap") -> "FreeMap":
        """other ∘ self."""
        Z = other.z_matrix()
        return FreeMap(self.group, self.src, other.tgt,
                       tuple(tuple(Z.apply(v)) for v in self.images))


def act_on_free(group: FiniteGroup, g: int, v: Sequence[int]) -> list[int]:
    k = group.order
    w = [0] * len(v)
    for idx, c in enumerate(v):
        if c:
            i, h = divmod(idx, k)
            w[i * k + group.mul(g, h)] += c
    return w


def hom_over_subgroup(rank: int, M: GModule, qd: QuotientData) -> GModule:
    """Hom_{Z[N]}(Z[G]^rank, M) as a G/N-module.

    Coordinates: block (i, k) holds f(s_k e_i) with s_k the k-th coset
    representative; (q·f)(x) = g·f(g⁻¹x) with g = section(q).
    """
    G, Q = qd.group, qd.quotient
    idx = len(qd.section)
    nM = M.n
    blocks = rank * idx
    acts = []
    for q in Q.elements():
        g = qd.section[q]
        big = [[0] * (blocks * nM) for _ in range(blocks * nM)]
        for i in range(rank):
            for k in range(idx):
                x = G.mul(G.inverse[g], qd.section[k])
                nprime, kk = qd.n_part(x)
                A = M.action[G.mul(g, nprime)]
                r0, c0 = (i * idx + k) * nM, (i * idx + kk) * nM
                for a in range(nM):
                    big[r0 + a][c0:c0 + nM] = A.data[a]
        acts.append(IntMatrix(big, blocks * nM, blocks * nM))
    under = FgAbGroup(blocks * nM, block_diagonal([M.underlying.relations] * blocks))
    return GModule(Q, under, acts, check=False)


def hom_over_subgroup_map(phi: FreeMap, M: GModule, qd: QuotientData,
                          source: GModule, target: GModule) -> GModuleMorphism:
    """Precomposition with phi: Hom_N(Z[G]^tgt, M) -> Hom_N(Z[G]^src, M)."""
    G = qd.group
    k = G.order
    idx = len(qd.section)
    nM = M.n
    rows = [[0] * (phi.tgt * idx * nM) for _ in range(phi.src * idx * nM)]
    for j in range(phi.src):
        v = phi.images[j]
        for kk in range(idx):
            s = qd.section[kk]
            for pos, c in enumerate(v):
                if not c:
                    continue
                i, h = divmod(pos, k)
                n_, k2 = qd.n_part(G.mul(s, h))
                A = M.action[n_].data
                r0, c0 = (j * idx + kk) * nM, (i * idx + k2) * nM
                for a in range(nM):
                    row = rows[r0 + a]
                    for b in range(nM):
                        if A[a][b]:
                            row[c0 + b] += c * A[a][b]
    return GModuleMorphism(target, source, IntMatrix(rows, source.n, target.n), check=False)
