import random
from fractions import Fraction

import pytest
import sympy

from posgeom.algebra import MPoly, parse_poly, parse_ratfn
from posgeom.canonical import (adjoint_through_residual_points, canonical_form,
                               canonical_form_simple, canonical_form_via_triangulation,
                               check_arrangement_simple, dual_volume_at,
                               dual_volume_function, pole_structure, toric_amplitude,
                               universal_adjoint, verify_positive_geometry, warren_adjoint)
from posgeom.errors import (ArrangementNotSimple, DomainError, NotSimple,
                            VerificationFailed)
from posgeom.forms import RatForm
from posgeom.polytope import Polytope, triangulate

from conftest import polytope
from generators import random_simple_polytopes

Y12 = ("y1", "y2")
PENT_NAMES = ("x13", "x14", "x24", "x25", "x35")
CUBE01 = {"U": [[1, 0, 0], [0, 1, 0], [0, 0, 1], [-1, 0, 0], [0, -1, 0], [0, 0, -1]],
          "z": [0, 0, 0, 1, 1, 1]}
SQUARE = {"U": [[1, 0], [0, 1], [-1, 0], [0, -1]], "z": [0, 0, 1, 1]}


def sym(r):
    return sympy.sympify(r.to_text().replace("^", "**"))


# -- canonical forms ------------------------------------------------------------

def test_triangle_form():
    res = canonical_form(polytope("triangle"))
    assert res.coeff == parse_ratfn("1/(x*y*(1-x-y))", ("x", "y"))
    assert res.to_latex() == "\\frac{1}{xy(1-x-y)}\\, dx \\wedge dy"


def test_pentagon_form():
    res = canonical_form_simple(polytope("pentagon"))
    assert res.numerator == parse_poly("5 - 3*y1 + 3*y2 - y1*y2", Y12)
    expected = {parse_poly(f, Y12) for f in ("1+y1", "1+y2", "1-y1+y2", "1-y1", "1-y2")}
    assert set(res.denominator_factors) == expected


def test_quadrilateral_form():
    res = canonical_form(polytope("quadrilateral"))
    # same expression, denominator written with the outward orientation
    target = parse_ratfn("(-18+x+12*y)/(x*(y-1)*(x+2*y-3)*(x-3*y-3))", ("x", "y"))
    assert res.coeff == target


def test_simple_form_matches_sympy_triangulation_sum():
    # independent oracle: each triangle contributes
    # 1/(lambda_1 lambda_2 lambda_3) * |d lambda_1 ^ d lambda_2| in barycentrics
    P = polytope("pentagon")
    y1, y2 = sympy.symbols("y1 y2")
    total = 0
    for s in triangulate(P):
        a, b, c = [sympy.Matrix(v) for v in s.vertices]
        area2 = abs((b - a).row_join(c - a).det())
        lam = []
        for p, q, r in ((a, b, c), (b, c, a), (c, a, b)):
            ell = (q[1] - p[1]) * (y1 - p[0]) - (q[0] - p[0]) * (y2 - p[1])
            lam.append(ell / ell.subs({y1: r[0], y2: r[1]}))
        total += 1 / (area2 * sympy.prod(lam))
    assert sympy.simplify(total - sym(canonical_form(P).coeff)) == 0


def test_non_simple_refused_by_vertex_formula():
    with pytest.raises(NotSimple):
        canonical_form_simple(polytope("pyramid"))


# -- dual volume -------------------------------------------------------------------

def test_pentagon_dual_volume():
    P = polytope("pentagon")
    assert dual_volume_at(P) == 5
    assert dual_volume_function(P) == canonical_form_simple(P).coeff
    with pytest.raises(DomainError):
        dual_volume_at(P, (1, 1))


def test_pyramid_dual_volume_vs_triangulation():
    P = polytope("pyramid")
    tri = canonical_form_via_triangulation(P).coeff
    dv = dual_volume_function(P)
    assert tri == dv
    rng = random.Random(3)
    for _ in range(5):
        a, b = Fraction(rng.randint(-20, 20), 100), Fraction(rng.randint(-20, 20), 100)
        c = Fraction(rng.randint(1, 40), 100)
        assert dual_volume_at(P, (a, b, c)) == tri.evaluate([a, b, c])


def test_pyramid_poles():
    P = polytope("pyramid")
    coeff = canonical_form_via_triangulation(P).coeff
    assert pole_structure(P, coeff) == []
    assert len(coeff.factors) == 5
    assert all(e == 1 for _, e in coeff.factors)


# -- amplitudes and adjoints --------------------------------------------------------

def test_pentagon_amplitude():
    amp = toric_amplitude(polytope("pentagon"), PENT_NAMES)
    expect = sympy.sympify("1/(x13*x14)+1/(x14*x24)+1/(x24*x25)+1/(x25*x35)+1/(x13*x35)")
    assert sympy.simplify(sym(amp.as_ratfn()) - expect) == 0
    assert amp.to_text() == "1/(x13*x14) + 1/(x13*x35) + 1/(x14*x24) + 1/(x24*x25) + 1/(x25*x35)"


def test_simplex_amplitude():
    amp = toric_amplitude(polytope("triangle"))
    assert sympy.simplify(sym(amp.as_ratfn()) - sympy.sympify("1/(x1*x2)+1/(x2*x3)+1/(x1*x3)")) == 0


def test_associahedron_amplitude_terms():
    assert len(toric_amplitude(polytope("associahedron3d"))) == 14


def test_amplitude_specializes_to_form():
    P = polytope("pentagon")
    assert toric_amplitude(P).specialize(P) == canonical_form(P).coeff


def test_universal_adjoint_pentagon():
    ua = universal_adjoint(polytope("pentagon"), PENT_NAMES)
    assert ua.polynomial == parse_poly(
        "x24*x25*x35 + x13*x25*x35 + x13*x14*x35 + x13*x14*x24 + x14*x24*x25", PENT_NAMES)
    assert len(ua.polynomial) == 5


def test_universal_adjoint_simplex():
    ua = universal_adjoint(polytope("triangle"))
    assert ua.polynomial == parse_poly("x1 + x2 + x3", ua.names)


def _restrict(P, poly, names):
    """Adj(U y + z y0) as a polynomial in y0, y1, ..."""
    hv = ("y0",) + P.variables
    subs = {}
    for i, name in enumerate(names):
        row = P.U.rows[i]
        subs[name] = MPoly.linear([P.z[i]] + list(row), 0, hv)
    return poly.substitute(subs).with_variables(hv)


def test_universal_restricts_to_warren():
    P = polytope("pentagon")
    ua = universal_adjoint(P, PENT_NAMES)
    got = _restrict(P, ua.polynomial, PENT_NAMES)
    y0 = MPoly.variable("y0", ("y0",) + Y12)
    assert got == y0 * parse_poly("5*y0^2 - 3*y0*y1 + 3*y0*y2 - y1*y2", ("y0",) + Y12)


@pytest.mark.parametrize("name", ["pentagon", "triangle", "associahedron3d"])
def test_universal_adjoint_vanishes_on_column_span(name):
    P = polytope(name)
    ua = universal_adjoint(P)
    rng = random.Random(name)
    for _ in range(20):
        y = [Fraction(rng.randint(-50, 50), rng.randint(1, 9)) for _ in range(P.d)]
        x = [sum(a * b for a, b in zip(row, y)) for row in P.U.rows]
        assert ua.polynomial.evaluate(x) == 0


def test_warren_adjoint():
    assert warren_adjoint(polytope("pentagon")).polynomial == \
        parse_poly("5*y0^2 - 3*y0*y1 + 3*y0*y2 - y1*y2", ("y0",) + Y12)
    seg = Polytope.from_json({"U": [[1], [-1]], "z": [0, 1]})
    assert warren_adjoint(seg).polynomial.is_constant()
    cube = Polytope.from_json(CUBE01)
    wa = warren_adjoint(cube).polynomial
    assert wa.is_homogeneous() and wa.total_degree() == 2
    num = dual_volume_function(cube).numerator.homogenize("y0", 2)
    assert wa.factor_key() == num.with_variables(wa.variables).factor_key()


def test_adjoint_by_interpolation():
    P = polytope("pentagon")
    adj = adjoint_through_residual_points(P)
    assert adj.factor_key() == warren_adjoint(P).polynomial.factor_key()
    tri = adjoint_through_residual_points(polytope("triangle"))
    assert tri.is_constant() and tri.constant_term() == 1
    sq = adjoint_through_residual_points(Polytope.from_json(SQUARE))
    assert sq.factor_key() == MPoly.variable("y0", sq.variables).factor_key()


def test_non_simple_arrangement_refused():
    cube = Polytope.from_json(CUBE01)
    with pytest.raises(ArrangementNotSimple):
        check_arrangement_simple(cube)
    with pytest.raises(ArrangementNotSimple):
        adjoint_through_residual_points(cube)


# -- verification ----------------------------------------------------------------------

def test_verify_triangle():
    rep = verify_positive_geometry(polytope("triangle"))
    assert rep.passed
    assert rep.counts() == {1: 3, 0: 3}


def test_verify_pentagon_and_cube():
    assert verify_positive_geometry(polytope("pentagon")).passed
    rep = verify_positive_geometry(Polytope.from_json(CUBE01))
    assert rep.passed
    assert rep.counts() == {2: 6, 1: 12, 0: 8}


def test_verify_pyramid_via_triangulation():
    P = polytope("pyramid")
    form = canonical_form_via_triangulation(P).form
    assert verify_positive_geometry(P, form).passed


def test_verify_rejects_wrong_form():
    P = polytope("pentagon")
    bad = RatForm(P.variables, canonical_form(P).coeff * 2)
    rep = verify_positive_geometry(P, bad)
    assert not rep.passed
    with pytest.raises(VerificationFailed):
        verify_positive_geometry(P, bad, strict=True)


def test_random_simple_polytopes_verify():
    for P in random_simple_polytopes(6, seed=11):
        assert verify_positive_geometry(P).passed
        assert canonical_form_via_triangulation(P).coeff == canonical_form(P).coeff
