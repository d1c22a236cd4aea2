import dataclasses
import random
from fractions import Fraction

import pytest
import sympy

from posgeom.algebra import MPoly, exact_div, parse_poly, parse_ratfn
from posgeom.canonical import canonical_form_simple
from posgeom.errors import (ChartDegenerate, GammaMismatch, IrrationalIntersection,
                            KernelDimensionNot1, NotNodal, NotTransversal,
                            ParamInconsistent, VertexNotOnCurves, VertexOnThirdCurve)
from posgeom.forms import parse_form, pullback_curve, segment_form
from posgeom.polypol import (Polypol, adjoint_curve, canonical_form_polypol,
                             polypol_from_polygon, pullback_projective,
                             raw_root_accounting, residual_arrangement, segment_residue,
                             verify_polypol_geometry)
from posgeom.polytope import Polytope

from conftest import load_json, polypol, polytope
from generators import random_unimodular

XYZ = ("x", "y", "z")
XY = ("x", "y")
EQ3 = "(1+x+y)/(x*y*(1-x^2-y^2))"
P2_POS = {"curves": [{"f": "x", "param": ["0", "1 - t", "t"]},
                     {"f": "y", "param": ["t", "0", "1 - t"]},
                     {"f": "z", "param": ["1 - t", "t", "0"]}],
          "vertices": [[0, 0, 1], [1, 0, 0], [0, 1, 0]],
          "intervals": [[0, 1], [0, 1], [0, 1]]}


def points(ra):
    return {rp.coords for rp in ra.points}


# -- validation ------------------------------------------------------------------

def test_pizza_is_valid():
    q = polypol("pizza")
    assert q.r == 3 and q.n == 4 and q.is_quasi_regular


def test_vertex_off_curves():
    data = load_json("pizza")
    data["vertices"][0] = [1, 1, 1]
    with pytest.raises(VertexNotOnCurves):
        Polypol.from_json(data)


def test_vertex_on_third_curve():
    data = load_json("pizza")
    data["curves"][2] = {"f": "x^2 + y^2 - y*z - x*z", "param": None}
    data["intervals"] = None
    data["vertices"] = [[0, 0, 1], [1, 0, 1], [0, 1, 1]]
    with pytest.raises(VertexOnThirdCurve):
        Polypol.from_json(data)


def test_tangent_vertex():
    with pytest.raises(NotTransversal):
        polypol("tangent")


def test_param_inconsistent():
    data = load_json("pizza")
    data["intervals"][2] = [0, 1]
    with pytest.raises(ParamInconsistent):
        Polypol.from_json(data)
    data = load_json("pizza")
    data["curves"][2]["param"] = ["t", "1 - t^2", "t^2 + 1"]
    with pytest.raises(ParamInconsistent):
        Polypol.from_json(data)


def test_bad_node():
    data = load_json("nodal_cubic")
    data["curves"][0]["nodes"] = [[-1, 0, 1]]
    with pytest.raises(NotNodal):
        Polypol.from_json(data)
    data["curves"][0]["nodes"] = []
    with pytest.raises(NotNodal):
        Polypol.from_json(data)


# -- residual arrangement and adjoint ---------------------------------------------

def test_pizza_residual_and_adjoint():
    q = polypol("pizza")
    assert points(residual_arrangement(q)) == {(-1, 0, 1), (0, -1, 1)}
    assert adjoint_curve(q) == parse_poly("x + y + z", XYZ)


def test_pentagon_polypol_residual():
    q = polypol_from_polygon(polytope("pentagon", XY))
    pts = points(residual_arrangement(q))
    assert len(pts) == 5
    assert sum(1 for p in pts if p[2] == 0) == 2


def test_triangle_polypol_adjoint_constant():
    q = polypol_from_polygon(polytope("triangle"))
    assert residual_arrangement(q).points == ()
    assert adjoint_curve(q) == MPoly.constant(1, XYZ)


def test_nodal_cubic_adjoint():
    q = polypol("nodal_cubic")
    assert points(residual_arrangement(q)) == {(0, 1, 0), (0, 0, 1)}
    assert adjoint_curve(q) == parse_poly("x", XYZ)


def test_elliptic_kernel_dimension():
    q = polypol("elliptic")
    assert points(residual_arrangement(q)) == {(-1, 0, 1)}
    with pytest.raises(KernelDimensionNot1) as info:
        adjoint_curve(q)
    assert info.value.dimension == 2


def test_dart_adjoint():
    q = polypol("dart")
    assert points(residual_arrangement(q)) == {(1, 0, 1), (0, 1, 1)}
    assert adjoint_curve(q).factor_key() == parse_poly("x + y - z", XYZ).factor_key()


def test_irrational_intersection_blocks():
    data = load_json("disc_corner")
    extra = data.pop("extra_points")
    with pytest.raises(IrrationalIntersection) as info:
        residual_arrangement(Polypol.from_json(data))
    assert info.value.unresolved == 2
    data["extra_points"] = extra
    q = Polypol.from_json(data)
    adj = adjoint_curve(q)
    # independent check: the adjoint vanishes at the two complex points
    x, y = sympy.symbols("x y")
    sols = sympy.solve([x**2 + y**2 - 1, 2*x + 2*y - 3], [x, y], dict=True)
    assert len(sols) == 2
    A = sympy.sympify(adj.to_text().replace("^", "**")).subs("z", 1)
    for s in sols:
        assert sympy.simplify(A.subs(s)) == 0
    assert verify_polypol_geometry(q).passed


# -- canonical forms ----------------------------------------------------------------

def test_pizza_canonical_form():
    res = canonical_form_polypol(polypol("pizza"))
    assert res.alpha == 1
    assert res.form == parse_form(EQ3 + " dx^dy")
    assert res.gammas == (1, 1, 1)


def test_pizza_segment_residues():
    q = polypol("pizza")
    res = canonical_form_polypol(q)
    x0 = res.residues[0]
    # restricted to x = 0 the residue is -1/(y(1-y)) dy
    assert pullback_curve(x0.eta, ("0", "t", "1")) == parse_form("-1/(t*(1-t)) dt")
    assert x0.eta.dvar == "y"
    y0 = res.residues[1]
    assert y0.eta.dvar == "x"
    assert pullback_curve(y0.eta, ("t", "0", "1")) == parse_form("1/(t*(1-t)) dt")
    circle = segment_residue(q, 2, res.form)
    assert circle.pullback == parse_form("1/(t*(t-1)) dt")


def test_triangle_from_lines():
    q = polypol_from_polygon(polytope("triangle"))
    assert canonical_form_polypol(q).form == parse_form("1/(x*y*(1-x-y)) dx^dy")


@pytest.mark.parametrize("name", ["pentagon", "quadrilateral", "triangle"])
def test_polygon_polypol_matches_polytope(name):
    P = polytope(name, XY)
    q = polypol_from_polygon(P)
    assert canonical_form_polypol(q).form.coeff == canonical_form_simple(P).coeff
    assert verify_polypol_geometry(q).passed


def test_dart_matches_triangle_sum():
    q = polypol("dart")
    res = canonical_form_polypol(q)
    t1 = Polytope.from_vertices([(0, 0), (2, 0), (Fraction(2, 3), Fraction(2, 3))], XY)
    t2 = Polytope.from_vertices([(0, 0), (Fraction(2, 3), Fraction(2, 3)), (0, 2)], XY)
    total = canonical_form_simple(t1).coeff + canonical_form_simple(t2).coeff
    assert res.form.coeff == total
    assert verify_polypol_geometry(q).passed


def test_line_at_infinity_needs_chart():
    q = Polypol.from_json(P2_POS)
    with pytest.raises(ChartDegenerate):
        canonical_form_polypol(q)
    res = canonical_form_polypol(q, chart_matrix=[[1, 0, 0], [0, 1, 0], [1, 1, 1]])
    assert res.form == parse_form("1/(x*y*(1-x-y)) dx^dy")


def test_complementary_segment_same_gamma():
    data = load_json("pizza")
    # [0, 1] now runs through infinity along y = 0; the log form cannot tell
    # a segment from its complement, so the normalization is unchanged
    data["curves"][1]["param"] = ["t", "0", "2*t - 1"]
    res = canonical_form_polypol(Polypol.from_json(data))
    assert res.gammas == (1, 1, 1)


def test_gamma_mismatch(monkeypatch):
    import posgeom.polypol as pp
    real = pp.segment_residue

    def skewed(p, i, cand):
        s = real(p, i, cand)
        return dataclasses.replace(s, gamma=-s.gamma) if i == 1 else s

    monkeypatch.setattr(pp, "segment_residue", skewed)
    with pytest.raises(GammaMismatch):
        canonical_form_polypol(polypol("pizza"))


def test_scaled_adjoint_absorbed_by_alpha():
    q = polypol("pizza")
    res = canonical_form_polypol(q)
    res2 = canonical_form_polypol(q, adjoint=res.adjoint * 2)
    assert res2.alpha == res.alpha / 2
    assert res2.form == res.form
    assert verify_polypol_geometry(q, adjoint=res.adjoint * 2).passed


def test_flip_orientation():
    q = polypol("pizza")
    assert canonical_form_polypol(q, flip_orientation=True).form == \
        -canonical_form_polypol(q).form


@pytest.mark.parametrize("name", ["pizza", "dart", "disc_corner"])
def test_gamma_independent_of_curve(name):
    res = canonical_form_polypol(polypol(name))
    assert len(set(res.gammas)) == 1


@pytest.mark.parametrize("name", ["pizza", "dart", "disc_corner"])
def test_root_accounting(name):
    q = polypol(name)
    adj = adjoint_curve(q)
    t = MPoly.variable("t")
    for i in range(q.r):
        N, D, expected = raw_root_accounting(q, i, adj)
        assert N.total_degree() <= expected
        assert D.total_degree() <= expected + 2
        a, b = q.intervals[i]
        ratio = exact_div(N * (t - a) * (b - t), D)
        assert ratio is not None and ratio.is_constant() and not ratio.is_zero()


def test_verify_pizza_report():
    rep = verify_polypol_geometry(polypol("pizza"))
    assert rep.passed
    assert sum(1 for c in rep.checks if "endpoints" in c.stratum) == 3
    assert sum(1 for c in rep.checks if "vertex" in c.stratum) == 3


def test_projective_equivariance():
    q = polypol("pizza")
    base = canonical_form_polypol(q).form
    rng = random.Random(5)
    done = 0
    while done < 3:
        M = random_unimodular(3, rng)
        try:
            res = canonical_form_polypol(q.transform(M))
        except ChartDegenerate:
            continue
        assert pullback_projective(res.form, M) == base
        done += 1


def test_json_roundtrip():
    q = polypol("disc_corner")
    assert Polypol.from_json(q.to_json()) == q
