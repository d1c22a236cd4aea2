from fractions import Fraction
from itertools import combinations

import pytest
import sympy
from hypothesis import assume, given, strategies as st

from posgeom.errors import (EmptyPolytope, NotFullDimensional, OriginNotInterior,
                            RedundantInequality, Unbounded)
from posgeom.polytope import (Polytope, affine_image, face_lattice, hrep_from_vertices,
                              normal_cone_triangulation, normalized_volume, polar_dual,
                              residual_flats, translate, triangulate)

from conftest import load_json, polytope

CUBE01 = {"U": [[1, 0, 0], [0, 1, 0], [0, 0, 1], [-1, 0, 0], [0, -1, 0], [0, 0, -1]],
          "z": [0, 0, 0, 1, 1, 1]}
CUBE11 = {"U": CUBE01["U"], "z": [1] * 6}
SQUARE = {"U": [[1, 0], [0, 1], [-1, 0], [0, -1]], "z": [0, 0, 1, 1]}


def brute_vertices(U, z):
    """Independent oracle: solve every d-subset with sympy, keep feasible points."""
    d = len(U[0])
    out = set()
    for S in combinations(range(len(U)), d):
        A = sympy.Matrix([U[i] for i in S])
        if A.det() == 0:
            continue
        v = A.solve(sympy.Matrix([-z[i] for i in S]))
        if all(sum(U[k][j] * v[j] for j in range(d)) + z[k] >= 0 for k in range(len(U))):
            out.add(tuple(Fraction(str(c)) for c in v))
    return sorted(out)


def test_pentagon_vertices():
    P = polytope("pentagon")
    assert set(P.vertices) == {(-1, -1), (0, -1), (1, 0), (1, 1), (-1, 1)}
    assert P.is_simple()


def test_simplex_vertices():
    assert set(polytope("triangle").vertices) == {(0, 0), (1, 0), (0, 1)}


def test_associahedron_vertices():
    data = load_json("associahedron3d")
    P = polytope("associahedron3d")
    assert len(P.vertices) == 14
    assert list(P.vertices) == brute_vertices(data["U"], data["z"])
    assert P.is_simple()


def test_simplicity():
    assert Polytope.from_json(CUBE01).is_simple()
    assert not polytope("pyramid").is_simple()


def test_face_lattice_cube():
    faces = face_lattice(Polytope.from_json(CUBE01))
    dims = sorted(dim for _, dim in faces.values())
    assert dims.count(0) == 8 and dims.count(1) == 12 and dims.count(2) == 6


def test_errors():
    with pytest.raises(EmptyPolytope):
        polytope("empty")
    with pytest.raises(Unbounded):
        polytope("unbounded")
    with pytest.raises(RedundantInequality):
        Polytope.from_json({"U": SQUARE["U"] + [[1, 1]], "z": SQUARE["z"] + [5]})
    with pytest.raises(NotFullDimensional):
        Polytope.from_json({"U": [[1, 0], [-1, 0], [0, 1], [0, -1]], "z": [0, 0, 0, 1]})


def test_polar_dual_pentagon():
    P = polytope("pentagon")
    D = polar_dual(P)
    rows = {tuple(r) for r in load_json("pentagon")["U"]}
    assert set(D.vertices) == rows
    assert normalized_volume(D) == 5


def test_polar_dual_cube_is_octahedron():
    D = polar_dual(Polytope.from_json(CUBE11))
    axes = {tuple(s * int(i == j) for j in range(3)) for i in range(3) for s in (1, -1)}
    assert set(D.vertices) == axes
    with pytest.raises(OriginNotInterior):
        polar_dual(Polytope.from_json(CUBE01))


def test_triangulations():
    assert len(triangulate(polytope("pyramid"))) == 2
    assert len(triangulate(polytope("pentagon"))) == 3
    T = polytope("triangle")
    (s,) = triangulate(T)
    assert set(s.vertices) == set(T.vertices)


def test_triangulation_volume_matches_sympy():
    P = polytope("associahedron3d")
    total = sum(s.normalized_volume() for s in triangulate(P))
    assert total == normalized_volume(P)
    # independent: simplex determinants via sympy
    vol = 0
    for s in triangulate(P):
        v0 = s.vertices[0]
        M = sympy.Matrix([[a - b for a, b in zip(v, v0)] for v in s.vertices[1:]])
        vol += abs(M.det())
    assert Fraction(str(vol)) == total


def test_normal_cone_triangulation_covers_cone():
    P = polytope("pyramid")
    apex = P.vertices.index((0, 0, 1))
    cones = normal_cone_triangulation(P, apex)
    assert len(cones) == 2


def test_translate():
    P = polytope("pentagon")
    Q = translate(P, (1, 1))
    zero = [z for z in Q.z if z == 0]
    assert len(zero) == 2
    R = translate(P, (Fraction(1, 3), Fraction(-1, 4)))
    assert all(z > 0 for z in R.z)


def test_residual_flats():
    pent = residual_flats(polytope("pentagon"))
    assert len(pent) == 5
    assert sum(f.at_infinity for f in pent) == 2
    assert residual_flats(polytope("triangle")) == []
    sq = residual_flats(Polytope.from_json(SQUARE))
    assert len(sq) == 2 and all(f.at_infinity for f in sq)


def test_json_roundtrip_of_vertices():
    P = polytope("quadrilateral")
    Q = Polytope.from_json({"vertices": P.to_json()["vertices"]})
    assert set(Q.vertices) == set(P.vertices)


# -- property tests ------------------------------------------------------------------

pts2 = st.lists(st.tuples(st.integers(-4, 4), st.integers(-4, 4)), min_size=3, max_size=8,
                unique=True)


def _full(points):
    p0 = points[0]
    return any((a[0] - p0[0]) * (b[1] - p0[1]) - (a[1] - p0[1]) * (b[0] - p0[0])
               for a, b in combinations(points[1:], 2))


@given(pts2)
def test_vertex_hrep_roundtrip(points):
    assume(_full(points))
    P = Polytope.from_vertices(points)
    h = hrep_from_vertices(P.vertices)
    Q = Polytope.from_hrep(h.U, h.z)
    assert set(Q.vertices) == set(P.vertices)
    hull = sympy.convex_hull(*[sympy.Point(*p) for p in points])
    assert {tuple(Fraction(str(c)) for c in v) for v in hull.vertices} == set(P.vertices)


@given(pts2)
def test_volume_matches_sympy(points):
    assume(_full(points))
    P = Polytope.from_vertices(points)
    hull = sympy.convex_hull(*[sympy.Point(*p) for p in points])
    assert normalized_volume(P) == 2 * abs(Fraction(str(hull.area)))


@given(pts2)
def test_polar_involution(points):
    assume(_full(points))
    P = Polytope.from_vertices(points)
    c = P.interior_point()
    P0 = translate(P, c)
    assert set(polar_dual(polar_dual(P0)).vertices) == set(P0.vertices)


@given(pts2, st.sampled_from([[[1, 1], [0, 1]], [[0, 1], [1, 0]], [[2, 1], [1, 1]],
                               [[1, 0], [-3, 1]]]))
def test_unimodular_image(points, A):
    assume(_full(points))
    P = Polytope.from_vertices(points)
    Q = affine_image(P, A, [1, -2])
    img = {tuple(sum(A[i][j] * v[j] for j in range(2)) + (1, -2)[i] for i in range(2))
           for v in P.vertices}
    assert set(Q.vertices) == img
    assert normalized_volume(Q) == normalized_volume(P)
