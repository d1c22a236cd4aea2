"""Exact convex polytopes given by inequalities ``U y + z >= 0``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Sequence

from .algebra import MPoly, RatMatrix, det, nullspace, parse_rat, rank, solve
from .errors import (DimensionMismatch, EmptyPolytope, NotFullDimensional, NotFullRank,
                     OriginNotInterior, ParseError, RedundantInequality, Unbounded)


def default_variables(d: int, prefix: str = "y") -> tuple:
    return tuple(f"{prefix}{i}" for i in range(1, d + 1))


def _dot(a, b):
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def affine_rank(points) -> int:
    """Dimension of the affine hull (-1 for no points)."""
    if not points:
        return -1
    return rank([(Fraction(1),) + tuple(p) for p in points]) - 1


def primitive_integer(vec):
    """Scale a nonzero rational vector to coprime integers, keeping direction."""
    den = 1
    for x in vec:
        den = den * x.denominator // math.gcd(den, x.denominator)
    ints = [int(x * den) for x in vec]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    return [Fraction(x // g) for x in ints]


@dataclass(frozen=True)
class HRep:
    U: RatMatrix
    z: tuple

    def __post_init__(self):
        if len(self.z) != self.U.nrows:
            raise DimensionMismatch("U and z have different numbers of rows")

    @classmethod
    def from_lists(cls, U, z):
        U = U if isinstance(U, RatMatrix) else RatMatrix(U)
        return cls(U, tuple(parse_rat(x) for x in z))

    @classmethod
    def from_json(cls, data: dict):
        try:
            return cls.from_lists(data["U"], data["z"])
        except KeyError as exc:
            raise ParseError(f"polytope JSON needs key {exc}") from None
        except TypeError as exc:
            raise ParseError(f"malformed polytope JSON: {exc}") from None

    @property
    def n(self) -> int:
        return self.U.nrows

    @property
    def d(self) -> int:
        return self.U.ncols

    def row(self, i):
        return self.U.rows[i]


class Polytope:
    """A full-dimensional bounded polytope with exact vertices and incidences.

    ``incidence[k]`` is the sorted tuple of facet indices tight at
    ``vertices[k]``.
    """

    def __init__(self, hrep: HRep, vertices, incidence, variables=None):
        self.hrep = hrep
        self.vertices = tuple(tuple(v) for v in vertices)
        self.incidence = tuple(tuple(s) for s in incidence)
        self.variables = tuple(variables) if variables is not None else default_variables(hrep.d)
        if len(self.variables) != hrep.d:
            raise DimensionMismatch("variable names do not match the dimension")

    @classmethod
    def from_hrep(cls, U, z, variables=None):
        return vertices_from_hrep(HRep.from_lists(U, z), variables)

    @classmethod
    def from_vertices(cls, points, variables=None):
        return vertices_from_hrep(hrep_from_vertices(points), variables)

    @classmethod
    def from_json(cls, data: dict):
        """``{"U": ..., "z": ...}`` or ``{"vertices": ...}``, optional ``"vars"``."""
        if not isinstance(data, dict):
            raise ParseError("polytope JSON must be an object")
        if "U" not in data and "vertices" in data:
            try:
                pts = [[parse_rat(x) for x in v] for v in data["vertices"]]
            except TypeError as exc:
                raise ParseError(f"malformed vertex list: {exc}") from None
            return cls.from_vertices(pts, data.get("vars"))
        return vertices_from_hrep(HRep.from_json(data), data.get("vars"))

    @property
    def U(self) -> RatMatrix:
        return self.hrep.U

    @property
    def z(self) -> tuple:
        return self.hrep.z

    @property
    def n(self) -> int:
        return self.hrep.n

    @property
    def d(self) -> int:
        return self.hrep.d

    def facet_form(self, i: int) -> MPoly:
        """``u_F . y + z_F`` as a polynomial in the chart variables."""
        return MPoly.linear(self.U.rows[i], self.z[i], self.variables)

    def facet_forms(self) -> list:
        return [self.facet_form(i) for i in range(self.n)]

    def facet_vertices(self, i: int) -> tuple:
        return tuple(k for k, inc in enumerate(self.incidence) if i in inc)

    def is_simple(self) -> bool:
        return is_simple(self)

    def det_at(self, k: int) -> Fraction:
        """``|det U_v|`` for a simple vertex."""
        return abs(det(self.U.submatrix(self.incidence[k])))

    @cached_property
    def faces(self) -> dict:
        return face_lattice(self)

    def contains(self, point) -> bool:
        return all(_dot(u, point) + z >= 0 for u, z in zip(self.U.rows, self.z))

    def interior_point(self) -> tuple:
        """Vertex centroid."""
        m = len(self.vertices)
        return tuple(sum(v[j] for v in self.vertices) / m for j in range(self.d))

    def with_variables(self, variables) -> "Polytope":
        return Polytope(self.hrep, self.vertices, self.incidence, variables)

    def to_json(self) -> dict:
        from .algebra import format_rat
        return {
            "vars": list(self.variables),
            "vertices": [[format_rat(x) for x in v] for v in self.vertices],
            "incidence": [list(s) for s in self.incidence],
            "simple": self.is_simple(),
        }

    def __repr__(self):
        return f"Polytope(d={self.d}, n={self.n}, vertices={len(self.vertices)})"


def _check_bounded(U: RatMatrix):
    d = U.ncols
    n = U.nrows
    for S in combinations(range(n), d - 1):
        sub = U.submatrix(S)
        if S and rank(sub) != d - 1:
            continue
        ker = nullspace(sub) if S else [[Fraction(int(i == 0)) for i in range(d)]]
        if len(ker) != 1:
            continue
        k = ker[0]
        vals = U @ k
        if all(v >= 0 for v in vals) or all(v <= 0 for v in vals):
            raise Unbounded(f"recession direction {[str(x) for x in k]}")


def vertices_from_hrep(h: HRep, variables=None) -> Polytope:
    """Enumerate vertices by solving every d-subset of tight inequalities."""
    U, z = h.U, h.z
    n, d = h.n, h.d
    if d == 0:
        raise DimensionMismatch("dimension 0")
    if rank(U) < d:
        raise NotFullRank(f"rank(U) < {d}")
    _check_bounded(U)
    found = set()
    for S in combinations(range(n), d):
        sub = U.submatrix(S)
        v = solve(sub, [-z[i] for i in S])
        if v is None or rank(sub) < d:
            continue
        if all(_dot(u, v) + zz >= 0 for u, zz in zip(U.rows, z)):
            found.add(tuple(v))
    if not found:
        raise EmptyPolytope("inequalities have no common solution")
    verts = sorted(found)
    if affine_rank(verts) < d:
        raise NotFullDimensional("polytope is not full-dimensional")
    inc = [tuple(i for i in range(n) if _dot(U.rows[i], v) + z[i] == 0) for v in verts]
    seen = {}
    for i in range(n):
        tight = tuple(k for k, s in enumerate(inc) if i in s)
        if affine_rank([verts[k] for k in tight]) != d - 1:
            raise RedundantInequality(f"inequality {i} does not define a facet")
        if tight in seen:
            raise RedundantInequality(f"inequalities {seen[tight]} and {i} define the same facet")
        seen[tight] = i
    return Polytope(h, verts, inc, variables)


def hrep_from_vertices(points) -> HRep:
    """Minimal H-representation of conv(points) with primitive integer rows."""
    pts = sorted({tuple(parse_rat(x) for x in p) for p in points})
    if not pts:
        raise EmptyPolytope("no points")
    d = len(pts[0])
    if affine_rank(pts) < d:
        raise NotFullDimensional("points do not span the space")
    rows = []
    seen = set()
    for S in combinations(range(len(pts)), d):
        M = [(Fraction(1),) + pts[i] for i in S]
        ker = nullspace(M)
        if len(ker) != 1:
            continue
        b, *a = ker[0]
        vals = [_dot(a, p) + b for p in pts]
        if all(v >= 0 for v in vals):
            pass
        elif all(v <= 0 for v in vals):
            a, b = [-x for x in a], -b
        else:
            continue
        row = tuple(primitive_integer(list(a) + [b]))
        if row not in seen:
            seen.add(row)
            rows.append(row)
    return HRep.from_lists([r[:d] for r in rows], [r[d] for r in rows])


def is_simple(P: Polytope) -> bool:
    return all(len(s) == P.d for s in P.incidence)


def face_lattice(P: Polytope) -> dict:
    """Map frozenset of vertex indices -> (tight facet tuple, dimension)."""
    allv = frozenset(range(len(P.vertices)))
    facets = [frozenset(P.facet_vertices(i)) for i in range(P.n)]
    faces = {allv}
    frontier = [allv]
    while frontier:
        nxt = []
        for F in frontier:
            for G in facets:
                H = F & G
                if H and H not in faces:
                    faces.add(H)
                    nxt.append(H)
        frontier = nxt
    out = {}
    for F in faces:
        tight = tuple(i for i in range(P.n) if F <= facets[i])
        out[F] = (tight, affine_rank([P.vertices[k] for k in F]))
    return out


@dataclass(frozen=True)
class Simplex:
    vertices: tuple
    orientation: int

    def normalized_volume(self) -> Fraction:
        return abs(_simplex_det(self.vertices))


def _simplex_det(vs) -> Fraction:
    v0 = vs[0]
    return det([[a - b for a, b in zip(v, v0)] for v in vs[1:]])


def triangulate(P: Polytope, pull_first: int | None = None) -> list:
    """Pulling triangulation; vertices are pulled in index order, starting
    with ``pull_first`` when given."""
    lattice = P.faces
    order = list(range(len(P.vertices)))
    if pull_first is not None:
        order.remove(pull_first)
        order.insert(0, pull_first)
    rank_of = {v: i for i, v in enumerate(order)}
    by_dim = {}
    for F, (_, k) in lattice.items():
        by_dim.setdefault(k, []).append(F)
    memo = {}

    def tri(F):
        if F in memo:
            return memo[F]
        k = lattice[F][1]
        if k == 0:
            res = [tuple(F)]
        else:
            v = min(F, key=rank_of.__getitem__)
            res = []
            for G in by_dim.get(k - 1, []):
                if G < F and v not in G:
                    res.extend((v,) + s for s in tri(G))
        memo[F] = res
        return res

    out = []
    for s in tri(frozenset(range(len(P.vertices)))):
        vs = tuple(P.vertices[k] for k in sorted(s))
        dt = _simplex_det(vs)
        out.append(Simplex(vs, 1 if dt > 0 else -1))
    return out


def normal_cone_triangulation(P: Polytope, k: int) -> list:
    """Split the normal cone at vertex ``k`` into simplicial cones.

    Only the incident facet normals are used as rays; each cone is a sorted
    tuple of d facet indices.
    """
    lattice = P.faces
    d = P.d
    containing = {F: v for F, v in lattice.items() if k in F}
    by_dim = {}
    for F, (_, dim) in containing.items():
        by_dim.setdefault(dim, []).append(F)
    memo = {}

    def tri(F):
        if F in memo:
            return memo[F]
        tight, dim = containing[F]
        if dim == d - 1:
            res = [(tight[0],)]
        else:
            r = min(tight)
            res = []
            for G in by_dim.get(dim + 1, []):
                if F < G and r not in containing[G][0]:
                    res.extend((r,) + c for c in tri(G))
        memo[F] = res
        return res

    return [tuple(sorted(c)) for c in tri(frozenset([k]))]


def normalized_volume(P: Polytope) -> Fraction:
    """d! times the Euclidean volume."""
    return sum((s.normalized_volume() for s in triangulate(P)), Fraction(0))


def polar_dual(P: Polytope, variables=None) -> Polytope:
    """The polar {u : u.y >= -1 on P}; needs the origin strictly inside."""
    if any(zz <= 0 for zz in P.z):
        raise OriginNotInterior("polar dual needs all z_F > 0")
    ones = [Fraction(1)] * len(P.vertices)
    return vertices_from_hrep(HRep.from_lists(P.vertices, ones), variables)


def translate(P: Polytope, y) -> Polytope:
    """``P - y``: the H-representation becomes (U, U y + z)."""
    y = [parse_rat(x) for x in y]
    if len(y) != P.d:
        raise DimensionMismatch("translation vector has the wrong length")
    z2 = tuple(a + b for a, b in zip(P.U @ y, P.z))
    verts = [tuple(a - b for a, b in zip(v, y)) for v in P.vertices]
    return Polytope(HRep(P.U, z2), verts, P.incidence, P.variables)


def affine_image(P: Polytope, A, b) -> Polytope:
    """``A P + b`` for an invertible rational matrix A."""
    A = A if isinstance(A, RatMatrix) else RatMatrix(A)
    b = [parse_rat(x) for x in b]
    d = P.d
    cols = []
    for j in range(d):
        e = [Fraction(int(i == j)) for i in range(d)]
        x = solve(A, e)
        if x is None or rank(A) < d:
            raise NotFullRank("affine map is not invertible")
        cols.append(x)
    Ainv = RatMatrix([[cols[j][i] for j in range(d)] for i in range(d)])
    U2 = [tuple(_dot(u, col) for col in Ainv.transpose().rows) for u in P.U.rows]
    # u.(A^{-1}(y - b)) + z = (u A^{-1}) y + z - u A^{-1} b
    z2 = [zz - _dot(u2, b) for u2, zz in zip(U2, P.z)]
    verts = sorted(tuple(a + bb for a, bb in zip(A @ v, b)) for v in P.vertices)
    h = HRep.from_lists(U2, z2)
    inc = [tuple(i for i in range(P.n) if _dot(U2[i], v) + z2[i] == 0) for v in verts]
    return Polytope(h, verts, inc, P.variables)


@dataclass(frozen=True)
class ResidualFlat:
    """The flat ``L_S`` in homogeneous coordinates (y0 : y1 : ... : yd).

    ``basis`` spans L_S as a linear subspace of Q^{d+1}.
    """

    facets: tuple
    basis: tuple
    at_infinity: bool

    @property
    def dimension(self) -> int:
        return len(self.basis) - 1

    def point(self) -> tuple:
        if self.dimension != 0:
            raise DimensionMismatch("flat is not a point")
        return self.basis[0]


def _rref_key(vectors):
    m = [list(v) for v in vectors]
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
    return tuple(tuple(row) for row in m[:r])


def homogeneous_rows(P: Polytope) -> list:
    """Rows ``(z_F, u_F)``: the facet hyperplanes in coordinates (y0, y)."""
    return [(zz,) + tuple(u) for u, zz in zip(P.U.rows, P.z)]


def _normalize_point(v):
    piv = next(x for x in v if x != 0)
    if v[0] != 0:
        piv = v[0]
    return tuple(x / piv for x in v)


def residual_flats(P: Polytope) -> list:
    """Flats L_S (|S| = 2..d, independent homogeneous rows) missing P.

    Flats at infinity come out of the homogeneous system directly, so
    parallel facets contribute their common point at infinity in any d.
    """
    H = homogeneous_rows(P)
    inc = [set(s) for s in P.incidence]
    out = []
    seen = {}
    for size in range(2, P.d + 1):
        for S in combinations(range(P.n), size):
            rows = [H[i] for i in S]
            if rank(rows) != size:
                continue
            if any(set(S) <= s for s in inc):
                continue
            basis = nullspace(rows)
            key = _rref_key(basis)
            if key in seen:
                continue
            if len(basis) == 1:
                basis = [_normalize_point(basis[0])]
            seen[key] = len(out)
            at_inf = all(b[0] == 0 for b in basis)
            out.append(ResidualFlat(S, tuple(tuple(b) for b in basis), at_inf))
    return out
