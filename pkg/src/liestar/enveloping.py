"""Universal enveloping algebra with PBW normal ordering, the symmetrization
map and its inverse, the Gutt star-product, the Campbell-Hausdorff series,
and the Bernoulli-number closed form for products with a linear factor.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

from .algebra import LieAlgebra, poisson_tensor
from .poly import DimensionMismatch, HSeries, Polynomial


class UEAElement:
    """Element of the enveloping algebra in the PBW basis.

    Words are nondecreasing tuples of 0-based basis indices; coefficients are
    exact rationals.
    """

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: Mapping[tuple, Fraction] | None = None):
        clean = {}
        for word, coeff in (terms or {}).items():
            word = tuple(word)
            if any(word[t] > word[t + 1] for t in range(len(word) - 1)):
                raise ValueError(f"word {word} is not PBW-ordered")
            if any(not 0 <= i < dim for i in word):
                raise DimensionMismatch(f"basis index out of range in {word}")
            coeff = Fraction(coeff)
            if coeff:
                clean[word] = coeff
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("UEAElement is immutable")

    @classmethod
    def zero(cls, dim: int) -> "UEAElement":
        return cls(dim)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "UEAElement") -> "UEAElement":
        if self.dim != other.dim:
            raise DimensionMismatch("elements over different algebras")
        terms = dict(self.terms)
        for w, c in other.terms.items():
            terms[w] = terms.get(w, Fraction(0)) + c
        return UEAElement(self.dim, terms)

    def __neg__(self):
        return UEAElement(self.dim, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        k = Fraction(scalar)
        return UEAElement(self.dim, {w: c * k for w, c in self.terms.items()})

    __rmul__ = __mul__

    def grade_component(self, k: int) -> "UEAElement":
        """Span of PBW words of length exactly k."""
        return UEAElement(self.dim, {w: c for w, c in self.terms.items() if len(w) == k})

    def max_length(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def __eq__(self, other):
        if not isinstance(other, UEAElement):
            return NotImplemented
        return self.dim == other.dim and self.terms == other.terms

    def __str__(self):
        if self.is_zero:
            return "0"
        bits = []
        for w in sorted(self.terms, key=lambda w: (len(w), w)):
            body = "".join(f"X{i + 1}" for i in w) or "1"
            bits.append(f"{self.terms[w]}*{body}")
        return " + ".join(bits)


@lru_cache(maxsize=None)
def _normalize_word(word: tuple, g: LieAlgebra) -> tuple:
    """PBW rewrite of an arbitrary word; returns ((word, coeff), ...).

    Rewrites the first descent x_j x_i -> x_i x_j + sum_k C_ji^k x_k.  The
    result is independent of the rewrite order (PBW theorem); tests assert
    confluence against random rewrite orders.
    """
    for t in range(len(word) - 1):
        if word[t] > word[t + 1]:
            swapped = word[:t] + (word[t + 1], word[t]) + word[t + 2:]
            acc: dict = {}
            for w, c in _normalize_word(swapped, g):
                acc[w] = acc.get(w, Fraction(0)) + c
            for k in range(g.dim):
                coeff = g.c[word[t]][word[t + 1]][k]
                if coeff:
                    shorter = word[:t] + (k,) + word[t + 2:]
                    for w, c in _normalize_word(shorter, g):
                        acc[w] = acc.get(w, Fraction(0)) + coeff * c
            return tuple((w, c) for w, c in acc.items() if c)
    return ((word, Fraction(1)),)


def pbw_normalize(word, g: LieAlgebra) -> UEAElement:
    """Rewrite an arbitrary word of basis indices into the PBW basis."""
    word = tuple(word)
    if any(not 0 <= i < g.dim for i in word):
        raise DimensionMismatch(f"basis index out of range in {word}")
    return UEAElement(g.dim, dict(_normalize_word(word, g)))


def uea_mul(u: UEAElement, v: UEAElement, g: LieAlgebra) -> UEAElement:
    out = UEAElement.zero(g.dim)
    for w1, c1 in u.terms.items():
        for w2, c2 in v.terms.items():
            out = out + c1 * c2 * pbw_normalize(w1 + w2, g)
    return out


def _word_of_monomial(exps: tuple) -> tuple:
    word = []
    for i, e in enumerate(exps):
        word.extend([i] * e)
    return tuple(word)


def _monomial_of_word(word: tuple, dim: int) -> tuple:
    exps = [0] * dim
    for i in word:
        exps[i] += 1
    return tuple(exps)


@lru_cache(maxsize=None)
def _sym_monomial(exps: tuple, g: LieAlgebra) -> UEAElement:
    """sigma(x^exps): average of all orderings of the letters, normalized."""
    word = _word_of_monomial(exps)
    m = len(word)
    if m == 0:
        return UEAElement(g.dim, {(): Fraction(1)})
    stab = math.prod(math.factorial(e) for e in exps)
    weight = Fraction(stab, math.factorial(m))
    out = UEAElement.zero(g.dim)
    for perm in set(itertools.permutations(word)):
        out = out + weight * pbw_normalize(perm, g)
    return out


def symmetrize(p: Polynomial, g: LieAlgebra) -> UEAElement:
    """The symmetrization map from polynomials to the enveloping algebra."""
    if p.dim != g.dim:
        raise DimensionMismatch("polynomial dimension does not match the algebra")
    out = UEAElement.zero(g.dim)
    for exps, coeff in p.terms.items():
        out = out + coeff * _sym_monomial(exps, g)
    return out


def unsymmetrize(u: UEAElement, g: LieAlgebra) -> Polynomial:
    """Inverse of symmetrize, computed degree by degree (sigma is a filtered
    isomorphism with identity leading term)."""
    dim = g.dim
    rest = u
    result = Polynomial.zero(dim)
    while not rest.is_zero:
        m = rest.max_length()
        top = {w: c for w, c in rest.terms.items() if len(w) == m}
        layer = Polynomial(dim, {_monomial_of_word(w, dim): c for w, c in top.items()})
        result = result + layer
        rest = rest - symmetrize(layer, g)
        assert rest.max_length() < m or rest.is_zero
    return result


@lru_cache(maxsize=None)
def _gutt_monomial(e1: tuple, e2: tuple, g: LieAlgebra) -> tuple:
    """Gutt product of two monomials: ((r, Polynomial), ...) for h^r terms."""
    p = sum(e1)
    q = sum(e2)
    u = uea_mul(_sym_monomial(e1, g), _sym_monomial(e2, g), g)
    w = unsymmetrize(u, g)
    out = []
    for r in range(p + q + 1):
        part = w.homogeneous_part(p + q - r)
        if not part.is_zero:
            out.append((r, part * Fraction(2 ** r)))
    return tuple(out)


def gutt_product(p: Polynomial, q: Polynomial, g: LieAlgebra, order: int | None = None) -> HSeries:
    """Gutt star-product, exact (the series terminates at r = deg p + deg q - 1).

    The result is an HSeries truncated at `order` (default: high enough to
    hold every nonzero term).
    """
    if p.dim != g.dim or q.dim != g.dim:
        raise DimensionMismatch("polynomial dimension does not match the algebra")
    if order is None:
        order = max(p.degree() + q.degree(), 0)
    coeffs = [Polynomial.zero(g.dim) for _ in range(order + 1)]
    for e1, c1 in p.terms.items():
        for e2, c2 in q.terms.items():
            for r, part in _gutt_monomial(e1, e2, g):
                if r <= order:
                    coeffs[r] = coeffs[r] + c1 * c2 * part
    return HSeries(g.dim, order, coeffs)


def gutt_power(x: Polynomial, k: int, g: LieAlgebra, order: int | None = None) -> HSeries:
    """x * x * ... * x (k Gutt factors)."""
    if order is None:
        order = max(x.degree() * k, 0)
    out = HSeries.from_polynomial(Polynomial.one(g.dim), order)
    for _ in range(k):
        acc = HSeries.zero(g.dim, order)
        for r in range(order + 1):
            acc = acc + gutt_product(out.coeffs[r], x, g, order=order).shift(r)
        out = acc
    return out


# -- Bernoulli numbers (B1 = -1/2 convention) --------------------------------


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    if n == 0:
        return Fraction(1)
    if n == 1:
        return Fraction(-1, 2)
    if n % 2 == 1:
        return Fraction(0)
    total = Fraction(0)
    for k in range(n):
        total += math.comb(n + 1, k) * bernoulli(k)
    return -total / (n + 1)


# -- Campbell-Hausdorff series ------------------------------------------------


@dataclass(frozen=True)
class CHTerm:
    """One coefficient c_i of the Campbell-Hausdorff series; `value` is a
    linear form with h-series coefficients (degree-1 homogeneous at every
    h-order)."""

    order: int
    value: HSeries


def _ch_terms(x: Polynomial, y: Polynomial, n: int, bracket):
    """c_1..c_n via the standard recursion, for an arbitrary bilinear bracket
    on linear forms.  Elements are kept as dicts h-order -> linear Polynomial;
    the `bracket` callback reports which h-order shift one bracket costs."""
    shift, pair = bracket
    dim = x.dim

    def lie(u: dict, v: dict) -> dict:
        out: dict = {}
        for a, ua in u.items():
            for b, vb in v.items():
                w = pair(ua, vb)
                if not w.is_zero:
                    key = a + b + shift
                    out[key] = out.get(key, Polynomial.zero(dim)) + w
        return {k: v for k, v in out.items() if not v.is_zero}

    def add(u: dict, v: dict) -> dict:
        out = dict(u)
        for k, p in v.items():
            out[k] = out.get(k, Polynomial.zero(dim)) + p
        return {k: v for k, v in out.items() if not v.is_zero}

    def scale(u: dict, s: Fraction) -> dict:
        return {k: p * s for k, p in u.items()} if s else {}

    xv = {0: x} if not x.is_zero else {}
    yv = {0: y} if not y.is_zero else {}
    xmy = add(xv, scale(yv, Fraction(-1)))
    xpy = add(xv, yv)
    cs = [None, xpy]  # cs[i] = c_i
    for n_cur in range(1, n):
        total = scale(lie(xmy, cs[n_cur]), Fraction(1, 2))
        for p in range(1, n_cur // 2 + 1):
            kcoef = bernoulli(2 * p) / Fraction(math.factorial(2 * p))
            inner: dict = {}
            for ks in itertools.product(range(1, n_cur + 1), repeat=2 * p):
                if sum(ks) != n_cur:
                    continue
                term = xpy
                for k in reversed(ks):
                    term = lie(cs[k], term)
                inner = add(inner, term)
            total = add(total, scale(inner, kcoef))
        cs.append(scale(total, Fraction(1, n_cur + 1)))
    return cs


def ch_series(x: Polynomial, y: Polynomial, n: int, g: LieAlgebra) -> list:
    """Campbell-Hausdorff coefficients c_1..c_n with [X, Y] = 2h * Pi(X, Y).

    c_i carries exactly one h^{i-1} factor; each value is returned as an
    HSeries of truncation order n-1.
    """
    if n < 1:
        raise ValueError("ch_series requires order >= 1")
    if not (x.is_linear_form() or x.is_zero) or not (y.is_linear_form() or y.is_zero):
        raise ValueError("ch_series expects linear forms")
    pi = poisson_tensor(g)
    bracket = (1, lambda u, v: pi.bracket(u, v) * 2)
    cs = _ch_terms(x, y, n, bracket)
    out = []
    for i in range(1, n + 1):
        coeffs = [cs[i].get(r, Polynomial.zero(g.dim)) for r in range(n)]
        out.append(CHTerm(order=i, value=HSeries(g.dim, n - 1, coeffs)))
    return out


def _ch_plain(x: Polynomial, y: Polynomial, n: int, g: LieAlgebra) -> list:
    """c_1..c_n with the plain bracket [X, Y] = Pi(X, Y); plain polynomials."""
    pi = poisson_tensor(g)
    bracket = (0, pi.bracket)
    cs = _ch_terms(x, y, n, bracket)
    return [cs[i].get(0, Polynomial.zero(g.dim)) for i in range(1, n + 1)]


def _truncated_exp(p: Polynomial, max_degree: int) -> Polynomial:
    out = Polynomial.zero(p.dim)
    power = Polynomial.one(p.dim)
    for k in range(max_degree + 1):
        out = out + power * Fraction(1, math.factorial(k))
        power = power * p
    return Polynomial(p.dim, {e: c for e, c in out.terms.items() if sum(e) <= max_degree})


def _partitions(r: int):
    """Partitions of r as {part_size: multiplicity} dicts."""
    def rec(remaining: int, max_part: int):
        if remaining == 0:
            yield {}
            return
        for m in range(min(remaining, max_part), 0, -1):
            for n in range(remaining // m, 0, -1):
                for rest in rec(remaining - m * n, m - 1):
                    d = dict(rest)
                    d[m] = n
                    yield d
    yield from rec(r, r)


def gutt_cochain(r: int, x: Polynomial, y: Polynomial, g: LieAlgebra,
                 max_degree: int = 6) -> Polynomial:
    """h^r coefficient of the Gutt product of two exponentials of linear
    forms, expanded combinatorially from the Campbell-Hausdorff coefficients
    (plain Poisson bracket, overall factor 2^r), truncated at total degree
    `max_degree`.  Cross-check only; the product itself comes from
    gutt_product."""
    if r < 0:
        raise ValueError("cochain order must be nonnegative")
    dim = g.dim
    if r == 0:
        return _truncated_exp(x + y, max_degree)
    cs = _ch_plain(x, y, r + 1, g)  # cs[i-1] = c_i
    total = Polynomial.zero(dim)
    for partition in _partitions(r):
        factor = Polynomial.one(dim)
        for m, n in sorted(partition.items()):
            factor = factor * (cs[m] ** n) * Fraction(1, math.factorial(n))
        total = total + factor
    total = total * Fraction(2 ** r)
    out = _truncated_exp(x + y, max_degree) * total
    return Polynomial(dim, {e: c for e, c in out.terms.items() if sum(e) <= max_degree})


def gutt_linear_cochain(r: int, x: Polynomial, f: Polynomial, g: LieAlgebra) -> Polynomial:
    """h^r coefficient of x * f for linear x, via the Bernoulli closed form:

        (-1)^r 2^r B_r / r! * sum Pi^{i1 j1} d_{i1} Pi^{i2 j2} ...
                              d_{i_{r-1}} Pi^{i_r j_r} d_{i_r} x d_{j1..jr} f
    """
    if r < 0:
        raise ValueError("cochain order must be >= 0")
    if not x.is_linear_form():
        raise ValueError("first factor must be a linear form")
    if r == 0:
        return x * f
    dim = g.dim
    br = bernoulli(r)
    if not br:
        return Polynomial.zero(dim)
    xc = x.linear_coefficients()
    pi = poisson_tensor(g)
    prefactor = Fraction((-1) ** r * 2 ** r) * br / math.factorial(r)
    out = Polynomial.zero(dim)
    # chain: for t >= 2 the factor d_{i_{t-1}} Pi^{i_t j_t} = C_{i_t j_t}^{i_{t-1}}
    for idx in itertools.product(range(dim), repeat=2 * r):
        i = idx[:r]
        j = idx[r:]
        scalar = xc[i[r - 1]]
        if not scalar:
            continue
        for t in range(1, r):
            scalar *= g.c[i[t]][j[t]][i[t - 1]]
            if not scalar:
                break
        if not scalar:
            continue
        head = pi.component(i[0], j[0])
        if head.is_zero:
            continue
        df = f.partial_multi(j)
        if df.is_zero:
            continue
        out = out + head * df * scalar
    return out * prefactor
