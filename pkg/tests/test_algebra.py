import json
from fractions import Fraction

import pytest

from liestar.algebra import (
    AntisymmetryViolation,
    JacobiViolation,
    algebra_from_brackets,
    algebra_to_json,
    algebra_from_json,
    catalog,
    catalog_names,
    is_nilpotent_probe,
    poisson_tensor,
    trace_operator,
    validate_algebra,
)
from liestar.poly import Polynomial, parse_poly


def test_catalog_names():
    names = catalog_names()
    for expected in ["abelian3", "heis3", "so3", "sl2", "aff1", "filiform4"]:
        assert expected in names


def test_so3_brackets():
    g = catalog("so3")
    assert g.dim == 3
    assert g.bracket_coeff(0, 1, 2) == 1
    assert g.bracket_coeff(1, 0, 2) == -1
    assert g.bracket_coeff(1, 2, 0) == 1
    assert g.bracket_coeff(0, 2, 1) == -1


def test_validate_rejects_antisymmetry_violation():
    # c[0][1][2] = 1 but c[1][0][2] = 0
    c = [[[0] * 2 for _ in range(2)] for _ in range(2)]
    c[0][1][0] = 1
    with pytest.raises(AntisymmetryViolation) as err:
        validate_algebra(c)
    assert err.value.indices[:2] == (1, 2)


def test_validate_rejects_jacobi_violation():
    # [e1,e2]=e3, [e1,e3]=e1 breaks Jacobi
    with pytest.raises(JacobiViolation):
        algebra_from_brackets(3, [(1, 2, 3, 1), (1, 3, 1, 1)])


def test_poisson_tensor_linear_and_antisymmetric():
    for name in catalog_names():
        pi = poisson_tensor(catalog(name))
        assert pi.is_linear()
        for i in range(pi.dim):
            assert pi.component(i, i).is_zero
            for j in range(pi.dim):
                assert pi.component(i, j) == -pi.component(j, i)
        assert pi.satisfies_jacobi()


def test_poisson_bracket_so3():
    pi = poisson_tensor(catalog("so3"))
    x1 = Polynomial.variable(0, 3)
    x2 = Polynomial.variable(1, 3)
    assert pi.bracket(x1, x2) == Polynomial.variable(2, 3)


def test_trace_operator_so3_is_minus_two_laplacian():
    d2 = trace_operator(catalog("so3"), 2)
    expected = {((0, 0),), ((1, 1),), ((2, 2),)}
    assert set(d2.terms) == {(0, 0), (1, 1), (2, 2)} or set(d2.terms) == {
        (0, 0),
        (1, 1),
        (2, 2),
    }
    for key in d2.terms:
        assert d2.terms[key] == Polynomial.constant(3, -2)


def test_trace_operator_aff1():
    d2 = trace_operator(catalog("aff1"), 2)
    assert d2.terms == {(0, 0): Polynomial.one(2)}
    d3 = trace_operator(catalog("aff1"), 3)
    assert d3.terms == {(0, 0, 0): Polynomial.one(2)}


def test_trace_operator_nilpotent_vanishes():
    for name in ["abelian3", "heis3", "filiform4"]:
        g = catalog(name)
        for r in range(2, 6):
            assert trace_operator(g, r).is_zero


def test_nilpotent_probe():
    assert is_nilpotent_probe(catalog("heis3"))
    assert is_nilpotent_probe(catalog("filiform4"))
    assert is_nilpotent_probe(catalog("abelian3"))
    assert not is_nilpotent_probe(catalog("so3"))
    assert not is_nilpotent_probe(catalog("sl2"))
    assert not is_nilpotent_probe(catalog("aff1"))


def test_json_round_trip(tmp_path):
    g = catalog("sl2")
    data = algebra_to_json(g)
    path = tmp_path / "sl2.json"
    path.write_text(json.dumps(data))
    g2 = algebra_from_json(json.loads(path.read_text()))
    assert g2.dim == g.dim
    assert g2.c == g.c


def test_json_fractions():
    data = {
        "dim": 2,
        "name": "half",
        "brackets": [[1, 2, 2, "1/2"]],
    }
    g = algebra_from_json(data)
    assert g.bracket_coeff(0, 1, 1) == Fraction(1, 2)


def test_adjoint_traces_match_c2_trace_term():
    # Tr(ad_1 ad_1) on so3 is -2
    from liestar.algebra import adjoint_basis

    g = catalog("so3")
    ad1 = adjoint_basis(g, 0)
    tr = sum(ad1[a, b] * ad1[b, a] for a in range(3) for b in range(3))
    assert tr == -2
