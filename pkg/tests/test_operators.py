from fractions import Fraction

import pytest

from liestar.operators import (
    BiDiffOperator,
    DiffOperator,
    ExtractionError,
    extract_bidiff_operator,
    extract_diff_operator,
    hochschild_coboundary,
    multi_factorial,
    normalize_multi,
    sub_multisets,
)
from liestar.poly import HSeries, Polynomial, parse_poly


def test_normalize_multi():
    assert normalize_multi([2, 0, 1, 0]) == (0, 0, 1, 2)


def test_sub_multisets_partition():
    pairs = list(sub_multisets((0, 0, 1), 2))
    assert ((), (0, 0, 1)) in pairs
    assert ((0, 0, 1), ()) in pairs
    assert ((0,), (0, 1)) in pairs
    assert len(pairs) == 6


def test_multi_factorial():
    assert multi_factorial((0, 0, 1), 2) == 2
    assert multi_factorial((1, 1, 1), 2) == 6


def test_identity_and_zero():
    ident = DiffOperator.identity(2)
    p = parse_poly("x1*x2 + 3", 2)
    assert ident.apply(p) == p
    assert DiffOperator.zero(2).apply(p).is_zero


def test_apply_multiset_derivative():
    op = DiffOperator(2, {(0, 0): Polynomial.one(2)})
    assert op.apply(parse_poly("x1^3", 2)) == parse_poly("6*x1", 2)


def test_apply_hseries():
    op = DiffOperator(1, {(0,): Polynomial.one(1)})
    s = HSeries(1, 1, [parse_poly("x1^2", 1), parse_poly("x1", 1)])
    out = op.apply(s)
    assert out.coefficient(0) == parse_poly("2*x1", 1)
    assert out.coefficient(1) == Polynomial.one(1)


def test_compose_leibniz():
    d1 = DiffOperator(1, {(0,): Polynomial.one(1)})
    x = Polynomial.variable(0, 1)
    mul_x = DiffOperator(1, {(): x})
    # d/dx . (x .) = 1 + x d/dx
    comp = d1.compose(mul_x)
    p = parse_poly("x1^2", 1)
    assert comp.apply(p) == d1.apply(x * p)


def test_symbol_constant_coefficient():
    op = DiffOperator(2, {(0, 1): Polynomial.constant(2, Fraction(3))})
    sym = op.symbol()
    assert sym == parse_poly("3*x1*x2", 2)


def test_bidiff_multiplication():
    m = BiDiffOperator.multiplication(2)
    f = parse_poly("x1", 2)
    g = parse_poly("x2^2", 2)
    assert m.apply(f, g) == f * g


def test_bidiff_apply():
    # f_x * g_y
    op = BiDiffOperator(2, {((0,), (1,)): Polynomial.one(2)})
    f = parse_poly("x1^2", 2)
    g = parse_poly("x2^3", 2)
    assert op.apply(f, g) == parse_poly("6*x1*x2^2", 2)


def test_hochschild_coboundary_of_derivation_vanishes():
    eta = DiffOperator(2, {(0,): Polynomial.one(2)})
    delta = hochschild_coboundary(eta)
    f = parse_poly("x1*x2", 2)
    g = parse_poly("x1 + x2^2", 2)
    assert delta.apply(f, g).is_zero


def test_hochschild_coboundary_second_order():
    # eta = d^2/dx^2: delta eta (f,g) = -2 f_x g_x
    eta = DiffOperator(1, {(0, 0): Polynomial.one(1)})
    delta = hochschild_coboundary(eta)
    f = parse_poly("x1^2", 1)
    g = parse_poly("x1^3", 1)
    assert delta.apply(f, g) == parse_poly("-12*x1^3", 1)


def test_extract_diff_operator():
    target = DiffOperator(2, {(0,): parse_poly("x2", 2), (1, 1): Polynomial.one(2)})
    recovered = extract_diff_operator(target.apply, 2, 2)
    assert recovered == target


def test_extract_bidiff_operator():
    target = BiDiffOperator(
        2,
        {
            ((0,), (1,)): parse_poly("x1", 2),
            ((0, 0), (1,)): Polynomial.one(2),
        },
    )
    recovered = extract_bidiff_operator(target.apply, 2, 2)
    assert recovered == target


def test_extract_detects_overflow():
    # a third-order operator cannot be captured at max_order 1
    target = DiffOperator(1, {(0, 0, 0): Polynomial.one(1)})
    with pytest.raises(ExtractionError):
        extract_diff_operator(target.apply, 1, 1)
