"""Finitely presented abelian groups and their morphisms.

A group is ``Z^n`` modulo the column lattice of an integer relation matrix.
Subgroups and quotients are never element sets: kernels, images and
cokernels come back as fresh presentations together with structure maps.
"""

from __future__ import annotations

import itertools
from functools import cached_property
from typing import Iterable, Optional, Sequence

from .exact_linalg import (
    IntMatrix,
    block_diagonal,
    kernel_mod,
    smith_normal_form,
    solve_integer,
)


class NotWellDefined(ValueError):
    """A matrix does not respect the relations of its source group."""

    def __init__(self, message: str, column: Optional[list[int]] = None):
        super().__init__(message)
        self.column = column


class InfiniteGroup(ValueError):
    pass


class ParentMismatch(ValueError):
    pass


def same_group(a: "FgAbGroup", b: "FgAbGroup") -> bool:
    """Presentational identity: same ambient rank and relation matrix."""
    return a is b or (a.n == b.n and a.relations == b.relations)


class FgAbGroup:
    """``Z^n / <columns of relations>``."""

    def __init__(self, n: int, relations: Optional[IntMatrix] = None, name: str = ""):
        if relations is None:
            relations = IntMatrix.zeros(n, 0)
        if not isinstance(relations, IntMatrix):
            relations = IntMatrix(relations, n, len(relations[0]) if relations and n else 0)
        if relations.rows != n:
            raise ValueError(f"relation matrix has {relations.rows} rows, expected {n}")
        self.n = n
        self.relations = relations
        self.name = name

    @cached_property
    def _snf(self):
        return smith_normal_form(self.relations)

    @cached_property
    def mods(self) -> tuple[int, ...]:
        """Per-row moduli after the row transform ``U`` of the relation SNF."""
        d = self._snf.d
        return tuple(d) + (0,) * (self.n - len(d))

    @cached_property
    def _keep(self) -> tuple[int, ...]:
        return tuple(i for i, m in enumerate(self.mods) if m != 1)

    @property
    def ambient_rank(self) -> int:
        return self.n

    @cached_property
    def free_rank(self) -> int:
        return sum(1 for m in self.mods if m == 0)

    @cached_property
    def torsion(self) -> tuple[int, ...]:
        return tuple(m for m in self.mods if m > 1)

    @property
    def shape(self) -> tuple[int, tuple[int, ...]]:
        return (self.free_rank, self.torsion)

    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def is_finite(self) -> bool:
        return self.free_rank == 0

    def order(self) -> int:
        if not self.is_finite():
            raise InfiniteGroup(f"{self} is infinite")
        out = 1
        for d in self.torsion:
            out *= d
        return out

    def isomorphic(self, other: "FgAbGroup") -> bool:
        return self.shape == other.shape

    def __str__(self) -> str:
        parts = ["Z"] * self.free_rank + [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "0"

    def __repr__(self) -> str:
        return f"FgAbGroup({self})"

    # -- elements -----------------------------------------------------------

    def canonical(self, coords: Sequence[int]) -> tuple[int, ...]:
        """Canonical representative: SNF coordinates reduced mod divisors."""
        if len(coords) != self.n:
            raise ParentMismatch(f"vector of length {len(coords)} in group of rank {self.n}")
        y = self._snf.U.apply(coords)
        return tuple(y[i] % self.mods[i] if self.mods[i] else y[i] for i in self._keep)

    def contains_relation(self, coords: Sequence[int]) -> bool:
        y = self._snf.U.apply(coords)
        return all((m == 0 and v == 0) or (m and v % m == 0) for v, m in zip(y, self.mods))

    def element(self, coords: Sequence[int]) -> "FgAbElement":
        return FgAbElement(self, coords)

    def zero(self) -> "FgAbElement":
        return FgAbElement(self, [0] * self.n)

    def gens(self) -> list["FgAbElement"]:
        return [FgAbElement(self, [int(i == j) for i in range(self.n)]) for j in range(self.n)]

    def from_canonical(self, y: Sequence[int]) -> "FgAbElement":
        full = [0] * self.n
        for i, v in zip(self._keep, y):
            full[i] = v
        return FgAbElement(self, self._snf.U_inv.apply(full))

    def enumerate_elements(self) -> list["FgAbElement"]:
        if not self.is_finite():
            raise InfiniteGroup(f"cannot enumerate infinite group {self}")
        ranges = [range(self.mods[i]) for i in self._keep]
        return [self.from_canonical(y) for y in itertools.product(*ranges)]

    # -- presentations ------------------------------------------------------

    @cached_property
    def simplified(self) -> tuple["FgAbGroup", "FgAbMorphism", "FgAbMorphism"]:
        """(S, to_self, from_self) with S a diagonal presentation and mutually
        inverse isomorphisms."""
        keep = self._keep
        S = FgAbGroup(len(keep), IntMatrix.diagonal([self.mods[i] for i in keep]))
        U, Ui = self._snf.U, self._snf.U_inv
        to_self = FgAbMorphism(S, self, Ui.submatrix(range(self.n), keep), check=False)
        from_self = FgAbMorphism(self, S, U.submatrix(keep, range(self.n)), check=False)
        return S, to_self, from_self


class FgAbElement:
    __slots__ = ("parent", "coords")

    def __init__(self, parent: FgAbGroup, coords: Sequence[int]):
        if len(coords) != parent.n:
            raise ParentMismatch(f"vector of length {len(coords)} in group of rank {parent.n}")
        self.parent = parent
        self.coords = tuple(int(c) for c in coords)

    def _check(self, other: "FgAbElement"):
        if not same_group(other.parent, self.parent):
            raise ParentMismatch("elements of different groups")

    def __add__(self, other: "FgAbElement") -> "FgAbElement":
        self._check(other)
        return FgAbElement(self.parent, [a + b for a, b in zip(self.coords, other.coords)])

    def __sub__(self, other: "FgAbElement") -> "FgAbElement":
        self._check(other)
        return FgAbElement(self.parent, [a - b for a, b in zip(self.coords, other.coords)])

    def __neg__(self) -> "FgAbElement":
        return FgAbElement(self.parent, [-a for a in self.coords])

    def __rmul__(self, k: int) -> "FgAbElement":
        return FgAbElement(self.parent, [k * a for a in self.coords])

    def is_zero(self) -> bool:
        return self.parent.contains_relation(self.coords)

    def canonical(self) -> tuple[int, ...]:
        return self.parent.canonical(self.coords)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FgAbElement):
            return NotImplemented
        self._check(other)
        return (self - other).is_zero()

    def __hash__(self) -> int:
        return hash((self.parent.n, self.canonical()))

    def __repr__(self) -> str:
        return f"FgAbElement({list(self.coords)})"


class FgAbMorphism:
    """Homomorphism given by an integer matrix on ambient coordinates."""

    def __init__(self, source: FgAbGroup, target: FgAbGroup, matrix: IntMatrix,
                 check: bool = True):
        if not isinstance(matrix, IntMatrix):
            matrix = IntMatrix(matrix, target.n, source.n)
        if matrix.shape != (target.n, source.n):
            raise ValueError(f"matrix shape {matrix.shape} does not match "
                             f"{target.n}x{source.n}")
        self.source = source
        self.target = target
        self.matrix = matrix
        if check:
            for j in range(source.relations.cols):
                img = matrix.apply(source.relations.column(j))
                if not target.contains_relation(img):
                    raise NotWellDefined(
                        f"relation column {j} maps outside the target relations",
                        source.relations.column(j))

    def __repr__(self) -> str:
        return f"FgAbMorphism({self.source!r} -> {self.target!r})"

    def __call__(self, x: FgAbElement) -> FgAbElement:
        if not same_group(x.parent, self.source):
            raise ParentMismatch("element does not belong to the source")
        return FgAbElement(self.target, self.matrix.apply(x.coords))

    def apply(self, coords: Sequence[int]) -> list[int]:
        return self.matrix.apply(coords)

    def __matmul__(self, other: "FgAbMorphism") -> "FgAbMorphism":
        """Composition ``self ∘ other``."""
        if not same_group(other.target, self.source):
            raise ParentMismatch("composition of non-composable morphisms")
        return FgAbMorphism(other.source, self.target, self.matrix @ other.matrix, check=False)

    def __add__(self, other: "FgAbMorphism") -> "FgAbMorphism":
        self._same(other)
        return FgAbMorphism(self.source, self.target, self.matrix + other.matrix, check=False)

    def __sub__(self, other: "FgAbMorphism") -> "FgAbMorphism":
        self._same(other)
        return FgAbMorphism(self.source, self.target, self.matrix - other.matrix, check=False)

    def __neg__(self) -> "FgAbMorphism":
        return FgAbMorphism(self.source, self.target, -self.matrix, check=False)

    def scale(self, k: int) -> "FgAbMorphism":
        return FgAbMorphism(self.source, self.target, self.matrix.scale(k), check=False)

    def _same(self, other):
        if not (same_group(other.source, self.source) and same_group(other.target, self.target)):
            raise ParentMismatch("morphisms with different source/target")

    def is_zero(self) -> bool:
        return all(self.target.contains_relation(self.matrix.column(j))
                   for j in range(self.source.n))

    def equals(self, other: "FgAbMorphism") -> bool:
        self._same(other)
        return (self - other).is_zero()

    def is_injective(self) -> bool:
        return kernel(self)[0].is_trivial()

    def is_surjective(self) -> bool:
        return cokernel(self)[0].is_trivial()

    def is_isomorphism(self) -> bool:
        return self.is_injective() and self.is_surjective()

    @cached_property
    def _lifted(self) -> IntMatrix:
        return self.matrix.hstack(self.target.relations)

    def preimage(self, y: FgAbElement) -> Optional[FgAbElement]:
        if not same_group(y.parent, self.target):
            raise ParentMismatch("element does not belong to the target")
        x = solve_integer(self._lifted, list(y.coords))
        if x is None:
            return None
        return FgAbElement(self.source, x[:self.source.n])


def identity(G: FgAbGroup) -> FgAbMorphism:
    return FgAbMorphism(G, G, IntMatrix.identity(G.n), check=False)


def zero_morphism(A: FgAbGroup, B: FgAbGroup) -> FgAbMorphism:
    return FgAbMorphism(A, B, IntMatrix.zeros(B.n, A.n), check=False)


def from_relations(n: int, R: IntMatrix) -> FgAbGroup:
    if not isinstance(R, IntMatrix):
        R = IntMatrix(R)
        if R.rows == 0 and n:
            R = IntMatrix.zeros(n, 0)
    if R.rows != n:
        raise ValueError(f"relation matrix has {R.rows} rows, expected {n}")
    return FgAbGroup(n, R)


def cyclic(d: int) -> FgAbGroup:
    """``Z/d`` (``d = 0`` gives ``Z``)."""
    return FgAbGroup(1, IntMatrix([[d]]) if d else IntMatrix.zeros(1, 0))


def make_morphism(src: FgAbGroup, tgt: FgAbGroup, A) -> FgAbMorphism:
    return FgAbMorphism(src, tgt, A if isinstance(A, IntMatrix) else IntMatrix(A, tgt.n, src.n))


# -- kernel / image / cokernel ---------------------------------------------

def _kernel_lattice(f: FgAbMorphism) -> IntMatrix:
    T = f.target
    UA = T._snf.U @ f.matrix
    return kernel_mod(UA, T.mods)


def _quotient_of_lattice(K: IntMatrix, rel_cols: Iterable[Sequence[int]]) -> IntMatrix:
    """Coordinates, in the basis K, of vectors known to lie in its lattice."""
    cols = []
    for r in rel_cols:
        c = solve_integer(K, list(r))
        if c is None:
            raise ArithmeticError("relation vector outside the lattice")
        cols.append(c)
    return IntMatrix.from_columns(cols, K.cols) if cols else IntMatrix.zeros(K.cols, 0)


def kernel(f: FgAbMorphism) -> tuple[FgAbGroup, FgAbMorphism]:
    """(K, inclusion K -> source) with K simplified."""
    K = _kernel_lattice(f)
    R = _quotient_of_lattice(K, f.source.relations.columns())
    raw = FgAbGroup(K.cols, R)
    S, to_raw, _ = raw.simplified
    inc = FgAbMorphism(S, f.source, K @ to_raw.matrix, check=False)
    return S, inc


def image(f: FgAbMorphism) -> tuple[FgAbGroup, FgAbMorphism, FgAbMorphism]:
    """(I, inclusion I -> target, factorization source -> I)."""
    K = _kernel_lattice(f)
    raw = FgAbGroup(f.source.n, K)
    S, to_raw, from_raw = raw.simplified
    inc = FgAbMorphism(S, f.target, f.matrix @ to_raw.matrix, check=False)
    fac = FgAbMorphism(f.source, S, from_raw.matrix, check=False)
    return S, inc, fac


def cokernel(f: FgAbMorphism) -> tuple[FgAbGroup, FgAbMorphism]:
    """(C, projection target -> C)."""
    raw = FgAbGroup(f.target.n, f.target.relations.hstack(f.matrix))
    S, _, from_raw = raw.simplified
    return S, FgAbMorphism(f.target, S, from_raw.matrix, check=False)


def preimage(f: FgAbMorphism, y: FgAbElement) -> Optional[FgAbElement]:
    return f.preimage(y)


def inverse(f: FgAbMorphism) -> FgAbMorphism:
    """Inverse of an isomorphism, built from preimages of target generators."""
    cols = []
    for e in f.target.gens():
        x = f.preimage(e)
        if x is None:
            raise ValueError("morphism is not surjective")
        cols.append(list(x.coords))
    g = FgAbMorphism(f.target, f.source, IntMatrix.from_columns(cols, f.source.n)
                     if cols else IntMatrix.zeros(f.source.n, 0), check=False)
    if not (g @ f).equals(identity(f.source)):
        raise ValueError("morphism is not injective")
    return g


def lift_through(f: FgAbMorphism, g: FgAbMorphism) -> Optional[FgAbMorphism]:
    """h with g ∘ h = f, if every generator image lifts (g: B -> C, f: A -> C)."""
    cols = []
    for e in f.source.gens():
        x = g.preimage(f(e))
        if x is None:
            return None
        cols.append(list(x.coords))
    M = IntMatrix.from_columns(cols, g.source.n) if cols else IntMatrix.zeros(g.source.n, 0)
    return FgAbMorphism(f.source, g.source, M)


def is_exact(f: FgAbMorphism, g: FgAbMorphism) -> bool:
    """Exactness of A -f-> B -g-> C at B."""
    if not same_group(f.target, g.source):
        raise ParentMismatch("maps do not meet")
    if not (g @ f).is_zero():
        return False
    _, inc = kernel(g)
    return all(f.preimage(inc(e)) is not None for e in inc.source.gens())


def direct_sum(groups: Sequence[FgAbGroup]):
    """(S, injections, projections) for the biproduct."""
    n = sum(G.n for G in groups)
    S = FgAbGroup(n, block_diagonal([G.relations for G in groups]) if groups
                  else IntMatrix.zeros(0, 0))
    inj, proj = [], []
    off = 0
    for G in groups:
        I = [[int(i == j + off) for j in range(G.n)] for i in range(n)]
        inj.append(FgAbMorphism(G, S, IntMatrix(I, n, G.n), check=False))
        P = [[int(j == i + off) for j in range(n)] for i in range(G.n)]
        proj.append(FgAbMorphism(S, G, IntMatrix(P, G.n, n), check=False))
        off += G.n
    return S, inj, proj


def induced_on_quotients(f: FgAbMorphism, src_proj: FgAbMorphism,
                         tgt_proj: FgAbMorphism) -> FgAbMorphism:
    """Map between quotients making the square with the projections commute."""
    cols = []
    for e in src_proj.target.gens():
        x = src_proj.preimage(e)
        cols.append(tgt_proj.apply(f.apply(x.coords)))
    M = IntMatrix.from_columns(cols, tgt_proj.target.n) if cols else \
        IntMatrix.zeros(tgt_proj.target.n, 0)
    return FgAbMorphism(src_proj.target, tgt_proj.target, M)


def elements_equal_sets(xs: Iterable[FgAbElement], ys: Iterable[FgAbElement]) -> bool:
    return {x.canonical() for x in xs} == {y.canonical() for y in ys}
