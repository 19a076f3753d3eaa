"""Lie-algebra data: structure constants, validation, adjoint maps, the
linear Poisson tensor, trace operators, and a catalog of named test algebras.

Structure constants are stored densely as nested tuples of Fractions, indexed
0-based as c[i][j][k] for the coefficient of e_k in [e_i, e_j].  All inputs
and outputs at the JSON/text boundary are 1-based.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .operators import DiffOperator, BiDiffOperator
from .poly import DimensionMismatch, Polynomial, as_fraction


class AntisymmetryViolation(ValueError):
    """C_ij^k != -C_ji^k; indices reported 1-based."""

    def __init__(self, i: int, j: int, k: int):
        super().__init__(f"antisymmetry violated at (i,j,k)=({i},{j},{k})")
        self.indices = (i, j, k)


class JacobiViolation(ValueError):
    """Jacobi identity fails; indices reported 1-based."""

    def __init__(self, i: int, j: int, k: int, l: int):
        super().__init__(f"Jacobi identity violated at (i,j,k,l)=({i},{j},{k},{l})")
        self.indices = (i, j, k, l)


@dataclass(frozen=True)
class LieAlgebra:
    """Validated structure constants of a finite-dimensional Lie algebra."""

    dim: int
    c: tuple  # c[i][j][k], nested tuples of Fraction
    name: str | None = None

    def bracket_coeff(self, i: int, j: int, k: int) -> Fraction:
        return self.c[i][j][k]

    def bracket(self, x: Sequence[Fraction], y: Sequence[Fraction]) -> list:
        """[X, Y] in coordinates."""
        d = self.dim
        out = [Fraction(0)] * d
        for i in range(d):
            if not x[i]:
                continue
            for j in range(d):
                if not y[j]:
                    continue
                for k in range(d):
                    out[k] += x[i] * y[j] * self.c[i][j][k]
        return out

    def __str__(self):
        return f"LieAlgebra({self.name or 'unnamed'}, dim={self.dim})"


@dataclass(frozen=True)
class AdjointMatrix:
    """Matrix of ad_X in the fixed basis: (ad_X)^a_b = sum_i X_i C_ib^a."""

    dim: int
    entries: tuple  # entries[a][b]
    coefficients: tuple  # the linear-form coefficients X_i

    def __getitem__(self, ab):
        a, b = ab
        return self.entries[a][b]

    def matmul(self, other: "AdjointMatrix") -> tuple:
        d = self.dim
        return tuple(
            tuple(sum(self.entries[a][m] * other.entries[m][b] for m in range(d)) for b in range(d))
            for a in range(d)
        )


class PoissonTensor:
    """Antisymmetric bivector with polynomial components pi^{ij}."""

    __slots__ = ("dim", "components")

    def __init__(self, dim: int, components: Mapping[tuple, Polynomial]):
        comps = {}
        for (i, j), p in components.items():
            if not (0 <= i < dim and 0 <= j < dim):
                raise DimensionMismatch(f"component index ({i},{j}) out of range")
            if p.dim != dim:
                raise DimensionMismatch("component has wrong dimension")
            if not p.is_zero:
                comps[(i, j)] = p
        for (i, j), p in comps.items():
            q = comps.get((j, i), Polynomial.zero(dim))
            if q != -p:
                raise ValueError(f"Poisson tensor not antisymmetric at ({i + 1},{j + 1})")
        for i in range(dim):
            if (i, i) in comps:
                raise ValueError("Poisson tensor has a nonzero diagonal component")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "components", comps)

    def __setattr__(self, name, value):
        raise AttributeError("PoissonTensor is immutable")

    def component(self, i: int, j: int) -> Polynomial:
        return self.components.get((i, j), Polynomial.zero(self.dim))

    @property
    def is_zero(self) -> bool:
        return not self.components

    def is_linear(self) -> bool:
        return all(p.is_linear_form() for p in self.components.values())

    def bracket(self, f: Polynomial, g: Polynomial) -> Polynomial:
        out = Polynomial.zero(self.dim)
        for (i, j), p in self.components.items():
            df = f.partial(i)
            if df.is_zero:
                continue
            dg = g.partial(j)
            if dg.is_zero:
                continue
            out = out + p * df * dg
        return out

    def as_bidiff(self) -> BiDiffOperator:
        return BiDiffOperator(self.dim, {((i,), (j,)): p for (i, j), p in self.components.items()})

    def jacobi_defects(self):
        """Polynomials sum_l (pi^{lk} d_l pi^{ij} + cyclic) for all i<j<k."""
        d = self.dim
        out = {}
        for i in range(d):
            for j in range(i + 1, d):
                for k in range(j + 1, d):
                    total = Polynomial.zero(d)
                    for (a, b, c) in ((i, j, k), (j, k, i), (k, i, j)):
                        for l in range(d):
                            total = total + self.component(l, c) * self.component(a, b).partial(l)
                    out[(i, j, k)] = total
        return out

    def satisfies_jacobi(self) -> bool:
        return all(p.is_zero for p in self.jacobi_defects().values())


def validate_algebra(c, name: str | None = None) -> LieAlgebra:
    """Check shape, antisymmetry, and the Jacobi identity; return the algebra."""
    rows = list(c)
    d = len(rows)
    table = []
    for i, row in enumerate(rows):
        row = list(row)
        if len(row) != d:
            raise ValueError(f"structure constants are not cubical at index {i + 1}")
        cols = []
        for j, col in enumerate(row):
            col = [as_fraction(v) for v in col]
            if len(col) != d:
                raise ValueError(f"structure constants are not cubical at index ({i + 1},{j + 1})")
            cols.append(tuple(col))
        table.append(tuple(cols))
    table = tuple(table)

    for i in range(d):
        for j in range(d):
            for k in range(d):
                if table[i][j][k] != -table[j][i][k]:
                    raise AntisymmetryViolation(i + 1, j + 1, k + 1)
    for i in range(d):
        for j in range(d):
            for k in range(d):
                for l in range(d):
                    total = Fraction(0)
                    for m in range(d):
                        total += (
                            table[i][j][m] * table[m][k][l]
                            + table[j][k][m] * table[m][i][l]
                            + table[k][i][m] * table[m][j][l]
                        )
                    if total:
                        raise JacobiViolation(i + 1, j + 1, k + 1, l + 1)
    return LieAlgebra(dim=d, c=table, name=name)


def algebra_from_brackets(dim: int, brackets: Iterable[tuple], name: str | None = None) -> LieAlgebra:
    """Build from 1-based (i, j, k, coeff) entries with i < j; antisymmetric
    completion is implied."""
    c = [[[Fraction(0)] * dim for _ in range(dim)] for _ in range(dim)]
    for i, j, k, v in brackets:
        if not (1 <= i < j <= dim and 1 <= k <= dim):
            raise ValueError(f"bad bracket entry ({i},{j},{k})")
        v = as_fraction(v)
        c[i - 1][j - 1][k - 1] += v
        c[j - 1][i - 1][k - 1] -= v
    return validate_algebra(c, name=name)


def adjoint(g: LieAlgebra, x: Sequence) -> AdjointMatrix:
    """Matrix of ad_X for the linear form with coefficients x."""
    coeffs = [as_fraction(v) for v in x]
    if len(coeffs) != g.dim:
        raise DimensionMismatch(f"expected {g.dim} coefficients, got {len(coeffs)}")
    d = g.dim
    entries = tuple(
        tuple(sum((coeffs[i] * g.c[i][b][a] for i in range(d)), Fraction(0)) for b in range(d))
        for a in range(d)
    )
    return AdjointMatrix(dim=d, entries=entries, coefficients=tuple(coeffs))


def adjoint_basis(g: LieAlgebra, i: int) -> AdjointMatrix:
    """ad_{e_i}, 0-based basis index."""
    return adjoint(g, [1 if j == i else 0 for j in range(g.dim)])


def poisson_tensor(g: LieAlgebra) -> PoissonTensor:
    """Kirillov-Poisson tensor: pi^{ij} = sum_k C_ij^k x^k."""
    d = g.dim
    comps = {}
    for i in range(d):
        for j in range(d):
            if i == j:
                continue
            p = Polynomial(d, {
                tuple(1 if m == k else 0 for m in range(d)): g.c[i][j][k] for k in range(d)
            })
            if not p.is_zero:
                comps[(i, j)] = p
    tensor = PoissonTensor(d, comps)
    assert tensor.satisfies_jacobi()  # follows from the Jacobi identity for C
    return tensor


def _trace_word(g: LieAlgebra, word: tuple) -> Fraction:
    d = g.dim
    mats = [adjoint_basis(g, i).entries for i in word]
    prod = mats[0]
    for m in mats[1:]:
        prod = tuple(
            tuple(sum(prod[a][t] * m[t][b] for t in range(d)) for b in range(d))
            for a in range(d)
        )
    return sum((prod[a][a] for a in range(d)), Fraction(0))


def trace_operator(g: LieAlgebra, r: int) -> DiffOperator:
    """Constant-coefficient operator with Tr(ad_{e_{i1}} ... ad_{e_{ir}}) on
    the derivative word (i1..ir), summed over ordered words and stored on the
    unordered multi-index."""
    if r < 2:
        raise ValueError("trace operator requires r >= 2")
    import itertools

    d = g.dim
    acc: dict = {}
    for word in itertools.product(range(d), repeat=r):
        t = _trace_word(g, word)
        if t:
            key = tuple(sorted(word))
            acc[key] = acc.get(key, Fraction(0)) + t
    return DiffOperator(d, {k: Polynomial.constant(d, v) for k, v in acc.items() if v})


def is_nilpotent_probe(g: LieAlgebra, rmax: int = 6) -> bool:
    """True iff all trace operators vanish for 2 <= r <= rmax."""
    return all(trace_operator(g, r).is_zero for r in range(2, rmax + 1))


_CATALOG_BRACKETS = {
    "abelian3": (3, []),
    "heis3": (3, [(1, 2, 3, 1)]),
    "so3": (3, [(1, 2, 3, 1), (2, 3, 1, 1), (1, 3, 2, -1)]),
    "sl2": (3, [(1, 2, 2, 2), (1, 3, 3, -2), (2, 3, 1, 1)]),
    "aff1": (2, [(1, 2, 2, 1)]),
    "filiform4": (4, [(1, 2, 3, 1), (1, 3, 4, 1)]),
}


def catalog(name: str) -> LieAlgebra:
    """Named test algebras: abelian3, heis3, so3, sl2, aff1, filiform4."""
    try:
        dim, brackets = _CATALOG_BRACKETS[name]
    except KeyError:
        raise KeyError(f"unknown algebra {name!r}; choose from {sorted(_CATALOG_BRACKETS)}")
    return algebra_from_brackets(dim, brackets, name=name)


def catalog_names() -> list:
    return sorted(_CATALOG_BRACKETS)


# -- JSON interchange --------------------------------------------------------
# {"dim": d, "name": str, "brackets": [[i, j, k, "p/q"], ...]} with i < j,
# 1-based indices, antisymmetric completion implied.


def algebra_to_json(g: LieAlgebra) -> dict:
    brackets = []
    for i in range(g.dim):
        for j in range(i + 1, g.dim):
            for k in range(g.dim):
                v = g.c[i][j][k]
                if v:
                    brackets.append([i + 1, j + 1, k + 1, str(v)])
    return {"dim": g.dim, "name": g.name, "brackets": brackets}


def algebra_from_json(data: dict) -> LieAlgebra:
    dim = data["dim"]
    brackets = [(int(i), int(j), int(k), as_fraction(v)) for i, j, k, v in data.get("brackets", [])]
    return algebra_from_brackets(dim, brackets, name=data.get("name"))


def load_algebra(path: str) -> LieAlgebra:
    with open(path) as fh:
        return algebra_from_json(json.load(fh))


def save_algebra(g: LieAlgebra, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(algebra_to_json(g), fh, indent=2)
