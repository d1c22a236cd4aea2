"""Plane polypols: validation, residual arrangements, adjoint curves and
normalized canonical forms.

Curves are homogeneous polynomials in (x, y, z). A curve may carry a
rational parametrization ``t -> (r(t) : s(t) : h(t))`` and a list of
declared nodes. ``vertices[i]`` is the vertex shared by curves i and i+1
(cyclically), so the segment of curve i runs from ``vertices[i-1]`` to
``vertices[i]`` and is the image of the parameter interval ``[a_i, b_i]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from .algebra import (FactoredRatFn, MPoly, RatMatrix, det, exact_div, format_rat,
                      parse_poly, parse_rat, rank, rational_roots, solve,
                      univariate_gcd, _udivmod, _trim)
from .canonical import interpolate
from .errors import (AdjointContainsBoundary, AdjointContainsVertex, ChartDegenerate,
                     DegenerateParametrization, DimensionMismatch, DomainError,
                     GammaMismatch, IrrationalIntersection, NotNodal, NotTransversal,
                     ParamInconsistent, ParseError, ResidueNotLogSegmentForm,
                     VerificationFailed, VertexNotOnCurves, VertexOnThirdCurve,
                     VertexSingular)
from .forms import (OneForm, OneFormOnLine, RatForm, pole_order, pullback_curve,
                    residue_along, residue_at_point, segment_form)

XYZ = ("x", "y", "z")
CHART = ("x", "y")
T = "t"


def _point(p) -> tuple:
    p = tuple(parse_rat(c) for c in p)
    if len(p) == 2:
        p = p + (Fraction(1),)
    if len(p) != 3 or not any(p):
        raise DimensionMismatch(f"not a projective plane point: {p}")
    return p


def normalize_point(p) -> tuple:
    """Scale so that the last nonzero coordinate is 1."""
    p = _point(p)
    piv = next(c for c in reversed(p) if c != 0)
    return tuple(c / piv for c in p)


def same_point(p, q) -> bool:
    return normalize_point(p) == normalize_point(q)


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _tpoly(p) -> MPoly:
    if isinstance(p, MPoly):
        q = p
    elif isinstance(p, str):
        q = parse_poly(p, (T,))
    else:
        q = MPoly.constant(p, (T,))
    if any(v != T for v in q.used_variables()):
        raise ParseError(f"parametrization must be univariate in {T}: {q}")
    return q.with_variables((T,)) if T in q.variables else MPoly.constant(q.constant_term(), (T,))


@dataclass(frozen=True)
class PlaneCurve:
    f: MPoly
    param: tuple | None = None
    nodes: tuple = ()

    @classmethod
    def make(cls, f, param=None, nodes=()):
        f = f if isinstance(f, MPoly) else parse_poly(f, XYZ)
        if any(v not in XYZ for v in f.used_variables()):
            raise ParseError(f"curve equation must use x, y, z only: {f}")
        f = f.with_variables(XYZ)
        if param is not None:
            param = tuple(_tpoly(c) for c in param)
            if len(param) != 3:
                raise ParseError("a parametrization has three components")
        return cls(f, param, tuple(_point(q) for q in nodes))

    @property
    def degree(self) -> int:
        return self.f.total_degree()

    def gradient(self, p) -> tuple:
        p = dict(zip(XYZ, _point(p)))
        return tuple(self.f.diff(v).evaluate(p) for v in XYZ)

    def hessian(self, p) -> RatMatrix:
        p = dict(zip(XYZ, _point(p)))
        return RatMatrix([[self.f.diff(a).diff(b).evaluate(p) for b in XYZ] for a in XYZ])

    def contains(self, p) -> bool:
        return self.f.evaluate(_point(p)) == 0

    def param_degree(self) -> int:
        return max(c.total_degree() for c in self.param)

    def at(self, t) -> tuple:
        """Image of a parameter value; ``"oo"`` gives the point at infinity."""
        if t in ("oo", None):
            n = self.param_degree()
            return normalize_point(tuple(c.dense(T)[n] if c.total_degree() == n else 0
                                         for c in self.param))
        t = parse_rat(t)
        return normalize_point(tuple(c.evaluate([t]) for c in self.param))

    def compose(self, g: MPoly) -> MPoly:
        """``g(r(t), s(t), h(t))`` as a univariate polynomial."""
        out = g.with_variables(XYZ).substitute(dict(zip(XYZ, self.param)))
        return _tpoly(out)

    def to_json(self) -> dict:
        return {
            "f": self.f.to_text(),
            "param": [c.to_text() for c in self.param] if self.param else None,
            "nodes": [[format_rat(c) for c in q] for q in self.nodes],
        }


@dataclass(frozen=True)
class Polypol:
    curves: tuple
    vertices: tuple
    intervals: tuple | None = None
    extra_points: tuple = ()

    @property
    def r(self) -> int:
        return len(self.curves)

    @property
    def n(self) -> int:
        return sum(c.degree for c in self.curves)

    @property
    def is_quasi_regular(self) -> bool:
        return self.intervals is not None

    @classmethod
    def from_json(cls, data: dict) -> "Polypol":
        try:
            curves = tuple(PlaneCurve.make(c["f"], c.get("param"), c.get("nodes", ()))
                           for c in data["curves"])
            vertices = tuple(_point(v) for v in data["vertices"])
            intervals = data.get("intervals")
            if intervals is not None:
                intervals = tuple((parse_rat(a), parse_rat(b)) for a, b in intervals)
            extras = tuple(
                (int(e["curve"]), int(e["other"]), parse_poly(e["minpoly"], (T,)))
                for e in data.get("extra_points", ()))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, DomainError):
                raise
            raise ParseError(f"malformed polypol JSON: {exc}") from None
        return validate_polypol(cls(curves, vertices, intervals, extras))

    def to_json(self) -> dict:
        out = {
            "curves": [c.to_json() for c in self.curves],
            "vertices": [[format_rat(c) for c in v] for v in self.vertices],
        }
        if self.intervals is not None:
            out["intervals"] = [[format_rat(a), format_rat(b)] for a, b in self.intervals]
        if self.extra_points:
            out["extra_points"] = [{"curve": i, "other": j, "minpoly": m.to_text()}
                                   for i, j, m in self.extra_points]
        return out

    def transform(self, M) -> "Polypol":
        """Image under the projective change of coordinates ``w = M x``."""
        M = M if isinstance(M, RatMatrix) else RatMatrix(M)
        if M.shape != (3, 3) or det(M) == 0:
            raise DimensionMismatch("need an invertible 3x3 matrix")
        cols = [solve(M, [Fraction(int(i == j)) for i in range(3)]) for j in range(3)]
        inv_rows = [[cols[j][i] for j in range(3)] for i in range(3)]
        w = [MPoly.linear(row, 0, XYZ) for row in inv_rows]
        curves = []
        for c in self.curves:
            tmp = c.f.substitute({v: MPoly.variable("__" + v) for v in XYZ})
            f2 = tmp.substitute({"__" + v: w[k] for k, v in enumerate(XYZ)}).with_variables(XYZ)
            param = None
            if c.param is not None:
                param = tuple(sum((c.param[j] * M.rows[i][j] for j in range(3)),
                                  MPoly.constant(0, (T,))) for i in range(3))
            nodes = tuple(tuple(M @ q) for q in c.nodes)
            curves.append(PlaneCurve(f2, param, nodes))
        verts = tuple(tuple(M @ v) for v in self.vertices)
        return validate_polypol(Polypol(tuple(curves), verts, self.intervals, self.extra_points))


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def check_node(curve: PlaneCurve, q) -> None:
    if not curve.contains(q):
        raise NotNodal(f"declared node {q} is not on {curve.f}")
    if any(curve.gradient(q)):
        raise NotNodal(f"declared node {q} is a smooth point of {curve.f}")
    if rank(curve.hessian(q)) != 2:
        raise NotNodal(f"singular point {q} of {curve.f} is not an ordinary node")


def _check_param(i: int, c: PlaneCurve) -> None:
    if c.f.is_zero() or not c.f.is_homogeneous() or c.degree < 1:
        raise DomainError(f"curve {i} needs a nonconstant homogeneous equation")
    if c.param is None:
        return
    r, s, h = c.param
    if all((a * b.diff(T) - a.diff(T) * b).is_zero() for a, b in ((r, h), (s, h), (r, s))):
        raise DegenerateParametrization(f"parametrization of curve {i} is constant")
    if not c.compose(c.f).is_zero():
        raise ParamInconsistent(f"parametrization does not lie on curve {i}")
    g = univariate_gcd(univariate_gcd(r, s), h)
    if g.total_degree() > 0:
        raise ParamInconsistent(f"parametrization of curve {i} has a common factor {g}")
    if c.param_degree() != c.degree:
        # a proper parametrization of an irreducible degree-n curve has degree n
        raise ParamInconsistent(
            f"curve {i}: parametrization degree {c.param_degree()} != curve degree {c.degree}")
    expected = (c.degree - 1) * (c.degree - 2) // 2
    if len(c.nodes) != expected:
        raise NotNodal(f"rational curve {i} of degree {c.degree} needs {expected} declared "
                       f"nodes, got {len(c.nodes)}")


def validate_polypol(p: Polypol) -> Polypol:
    """Check every condition on curves, vertices, nodes and intervals."""
    r = p.r
    if r < 2:
        raise DomainError("a polypol needs at least two curves")
    if len(p.vertices) != r:
        raise DimensionMismatch(f"{r} curves need {r} vertices")
    for i, c in enumerate(p.curves):
        _check_param(i, c)
        for q in c.nodes:
            check_node(c, q)
    keys = [c.f.factor_key() for c in p.curves]
    if len(set(keys)) != r:
        raise DomainError("boundary curves must be distinct")
    for i in range(r):
        j = (i + 1) % r
        v = p.vertices[i]
        ci, cj = p.curves[i], p.curves[j]
        if not (ci.contains(v) and cj.contains(v)):
            raise VertexNotOnCurves(f"vertex {i} = {v} is not on curves {i} and {j}")
        for k, ck in enumerate(p.curves):
            if k not in (i, j) and ck.contains(v):
                raise VertexOnThirdCurve(f"vertex {i} also lies on curve {k}")
        gi, gj = ci.gradient(v), cj.gradient(v)
        if not any(gi) or not any(gj):
            raise VertexSingular(f"vertex {i} is a singular point of a boundary curve")
        if not any(_cross(gi, gj)):
            raise NotTransversal(f"curves {i} and {j} are tangent at vertex {i}")
    for i, v in enumerate(p.vertices):
        for w in p.vertices[i + 1:]:
            if same_point(v, w):
                raise DomainError("vertices must be distinct")
    if p.intervals is not None:
        if len(p.intervals) != r:
            raise DimensionMismatch(f"{r} curves need {r} intervals")
        for i, (a, b) in enumerate(p.intervals):
            c = p.curves[i]
            if c.param is None:
                raise ParamInconsistent(f"curve {i} has an interval but no parametrization")
            if a == b:
                raise ParamInconsistent(f"interval of curve {i} is degenerate")
            if not same_point(c.at(a), p.vertices[i - 1]) or not same_point(c.at(b), p.vertices[i]):
                raise ParamInconsistent(
                    f"curve {i}: phi(a) must be vertex {(i - 1) % r} and phi(b) vertex {i}")
    for i, j, m in p.extra_points:
        if not (0 <= i < r and 0 <= j < r) or i == j or p.curves[i].param is None:
            raise ParseError(f"bad extra point block ({i}, {j})")
    return p


# ---------------------------------------------------------------------------
# Residual arrangement and adjoint
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ResidualPoint:
    coords: tuple
    kind: str
    curves: tuple

    def to_json(self) -> dict:
        return {"point": [format_rat(c) for c in self.coords], "kind": self.kind,
                "curves": list(self.curves)}


@dataclass(frozen=True)
class ResidualArrangementP:
    points: tuple
    blocks: tuple = ()

    def coordinates(self) -> list:
        return [p.coords for p in self.points]


def _intersections(p: Polypol, i: int, j: int, extras):
    """Rational points of curve i meeting curve j, via curve i's parameter."""
    ci, cj = p.curves[i], p.curves[j]
    g = ci.compose(cj.f)
    if g.is_zero():
        raise DomainError(f"curves {i} and {j} share a component")
    expected = ci.degree * cj.degree
    out = []
    rr = rational_roots(g)
    for t0, m in rr.roots:
        if m > 1:
            raise NotNodal(f"curves {i} and {j} are tangent at t = {t0}")
        out.append(ci.at(t0))
    drop = expected - g.total_degree()
    if drop > 1:
        raise NotNodal(f"curves {i} and {j} are tangent at the parameter point at infinity")
    if drop == 1:
        out.append(ci.at("oo"))
    blocks = []
    cof = rr.cofactor
    if cof.total_degree() > 0:
        for (a, b, m) in extras:
            if (a, b) != (i, j):
                continue
            q, rem = _udivmod(cof.dense(T), m.dense(T))
            if _trim(rem):
                raise IrrationalIntersection(
                    f"minimal polynomial {m} does not divide the cofactor {cof}",
                    cof.total_degree())
            blocks.append((i, j, m))
            cof = MPoly.from_dense(_trim(q), T)
        if cof.total_degree() > 0:
            raise IrrationalIntersection(
                f"curves {i} and {j} meet in {cof.total_degree()} irrational points "
                f"(cofactor {cof})", cof.total_degree())
    return out, blocks


def _branches_through(p: Polypol, q) -> int:
    total = 0
    for c in p.curves:
        if c.contains(q):
            total += 2 if any(same_point(q, n) for n in c.nodes) else 1
    return total


def residual_arrangement(p: Polypol, extra_points=None) -> ResidualArrangementP:
    """Declared nodes plus pairwise intersections, minus the vertices."""
    extras = tuple(extra_points) if extra_points is not None else p.extra_points
    found = []
    blocks = []
    for i, c in enumerate(p.curves):
        for q in c.nodes:
            found.append(ResidualPoint(normalize_point(q), "node", (i,)))
    for i in range(p.r):
        for j in range(i + 1, p.r):
            declared = [a for a, b, _ in extras if {a, b} == {i, j}]
            if declared:
                a = declared[0]
                pts, blk = _intersections(p, a, j if a == i else i, extras)
            elif p.curves[i].param is not None:
                pts, blk = _intersections(p, i, j, extras)
            elif p.curves[j].param is not None:
                pts, blk = _intersections(p, j, i, extras)
            else:
                raise DomainError(f"neither curve {i} nor {j} is parametrized")
            blocks.extend(blk)
            seen = set()
            for q in pts:
                q = normalize_point(q)
                if q in seen:
                    raise NotNodal(f"curves {i} and {j} meet twice at {q}")
                seen.add(q)
                found.append(ResidualPoint(q, "intersection", (i, j)))
    for rp in found:
        if _branches_through(p, rp.coords) != 2:
            raise NotNodal(f"point {rp.coords} lies on more than two branches")
    verts = {normalize_point(v) for v in p.vertices}
    pts = []
    seen = set()
    for rp in found:
        if rp.coords in verts or rp.coords in seen:
            continue
        seen.add(rp.coords)
        pts.append(rp)
    pts.sort(key=lambda rp: (rp.kind, rp.coords))
    return ResidualArrangementP(tuple(pts), tuple(blocks))


def _block_rows(p: Polypol, block, monos):
    i, _, m = block
    c = p.curves[i]
    mdense = m.dense(T)
    cols = []
    for e in monos:
        val = MPoly.constant(1, (T,))
        for comp, k in zip(c.param, e):
            if k:
                val = val * comp ** k
        _, rem = _udivmod(val.dense(T), mdense)
        rem = list(rem) + [Fraction(0)] * (len(mdense) - 1 - len(rem))
        cols.append(rem)
    return [[cols[k][row] for k in range(len(monos))] for row in range(len(mdense) - 1)]


def adjoint_curve(p: Polypol, extra_points=None) -> MPoly:
    """The unique curve of degree n-3 through the residual arrangement."""
    from .canonical import _monomials
    n = p.n
    if n < 3:
        raise DomainError("adjoint curves need total degree n >= 3")
    ra = residual_arrangement(p, extra_points)
    monos = list(_monomials(3, n - 3))
    extra_rows = []
    for blk in ra.blocks:
        extra_rows.extend(_block_rows(p, blk, monos))
    adj = interpolate(XYZ, n - 3, [[pt.coords] for pt in ra.points], extra_rows)
    adj = adj.primitive()
    for i, c in enumerate(p.curves):
        if adj.total_degree() >= c.degree and exact_div(adj, c.f) is not None:
            raise AdjointContainsBoundary(f"adjoint contains curve {i}")
    for k, v in enumerate(p.vertices):
        if adj.evaluate(_point(v)) == 0:
            raise AdjointContainsVertex(f"adjoint passes through vertex {k}")
    return adj


# ---------------------------------------------------------------------------
# Canonical form
# ---------------------------------------------------------------------------

def _affine(f: MPoly) -> MPoly:
    return f.substitute({"z": 1}).with_variables(CHART) if "z" in f.variables else \
        f.with_variables(CHART)


@dataclass(frozen=True)
class SegmentResidue:
    curve: int
    eta: OneForm
    pullback: OneFormOnLine
    beta: Fraction
    gamma: Fraction


def _candidate(p: Polypol, adj: MPoly) -> RatForm:
    for i, c in enumerate(p.curves):
        if c.f.factor_key() == MPoly.variable("z", XYZ).factor_key():
            raise ChartDegenerate(f"curve {i} is the line at infinity z = 0")
    coeff = FactoredRatFn(_affine(adj), [(_affine(c.f), 1) for c in p.curves])
    return RatForm(CHART, coeff)


def segment_residue(p: Polypol, i: int, candidate: RatForm) -> SegmentResidue:
    """Residue of ``candidate`` along curve i, pulled back to the parameter line.

    The result must be ``beta / ((t - a)(b - t)) dt``; gamma = beta / (b - a).
    """
    if not p.is_quasi_regular:
        raise DomainError("segment residues need parameter intervals")
    c = p.curves[i]
    a, b = p.intervals[i]
    eta = residue_along(candidate, _affine(c.f))
    pb = pullback_curve(eta, c.param, T, CHART)
    t = MPoly.variable(T)
    scaled = pb.coeff * FactoredRatFn((t - a) * (-t + b))
    if not scaled.is_polynomial() or not scaled.numerator.is_constant() or scaled.is_zero():
        raise ResidueNotLogSegmentForm(
            f"residue along curve {i} pulls back to {pb.to_text()}, not a segment form")
    beta = scaled.numerator.constant_term()
    return SegmentResidue(i, eta, pb, beta, beta / (b - a))


def raw_root_accounting(p: Polypol, i: int, adj: MPoly):
    """Unreduced numerator and denominator of the pulled-back residue.

    Returns ``(N, D, expected_degree)`` with N = A(phi) * (differential
    factor) and D = (pivot derivative)(phi) * prod_{j != i} f_j(phi), all as
    polynomials in t; expected_degree is (n-1) n_i - 2.
    """
    c = p.curves[i]
    f = c.f
    piv = "y" if not f.diff("y").is_zero() else "x"
    other = "x" if piv == "y" else "y"
    k = XYZ.index(other)
    comp, h = c.param[k], c.param[2]
    N = c.compose(adj) * (comp.diff(T) * h - comp * h.diff(T))
    D = c.compose(f.diff(piv))
    for j, cj in enumerate(p.curves):
        if j != i:
            D = D * c.compose(cj.f)
    return N, D, (p.n - 1) * c.degree - 2


@dataclass(frozen=True)
class PolypolCanonicalResult:
    form: RatForm
    alpha: Fraction
    adjoint: MPoly
    gammas: tuple
    residues: tuple

    def to_text(self) -> str:
        return self.form.to_text()


def canonical_form_polypol(p: Polypol, *, adjoint: MPoly | None = None,
                           chart_matrix=None, flip_orientation: bool = False
                           ) -> PolypolCanonicalResult:
    """``alpha * adj / (f_1 ... f_r) dx^dy`` in the chart z = 1.

    ``alpha`` is fixed so the residue of the first segment at its start
    point is +1. With ``chart_matrix`` the polypol is first moved by that
    projective change of coordinates and the form is reported there.
    """
    if chart_matrix is not None:
        p = p.transform(chart_matrix)
    if not p.is_quasi_regular:
        raise DomainError("canonical forms need parameter intervals")
    adj = adjoint_curve(p) if adjoint is None else adjoint.with_variables(XYZ)
    cand = _candidate(p, adj)
    res = tuple(segment_residue(p, i, cand) for i in range(p.r))
    gammas = tuple(s.gamma for s in res)
    for i, g in enumerate(gammas):
        if g != gammas[0]:
            raise GammaMismatch(f"gamma_{i} = {g} differs from gamma_0 = {gammas[0]}; "
                                f"check the orientation of interval {i}")
    alpha = 1 / gammas[0]
    if flip_orientation:
        alpha = -alpha
    form = RatForm(CHART, cand.coeff * alpha)
    return PolypolCanonicalResult(form, alpha, adj, gammas, res)


@dataclass
class PolypolCheck:
    stratum: str
    passed: bool
    detail: str = ""


@dataclass
class PolypolReport:
    passed: bool
    checks: list = field(default_factory=list)
    result: PolypolCanonicalResult | None = None

    def to_text(self) -> str:
        lines = [f"{'pass' if c.passed else 'FAIL'} {c.stratum}" +
                 (f" ({c.detail})" if c.detail else "") for c in self.checks]
        lines.append("verification: " + ("pass" if self.passed else "FAIL"))
        return "\n".join(lines)


def verify_polypol_geometry(p: Polypol, *, strict: bool = False,
                            adjoint: MPoly | None = None) -> PolypolReport:
    """Pole orders, segment residues, endpoint residues and vertex
    iterated residues of the normalized canonical form."""
    result = canonical_form_polypol(p, adjoint=adjoint)
    form = result.form
    checks = []
    endpoint = {}
    for i, c in enumerate(p.curves):
        a, b = p.intervals[i]
        f = _affine(c.f)
        k = pole_order(form, f)
        checks.append(PolypolCheck(f"curve {i} pole order", k == 1, f"order {k}"))
        seg = segment_residue(p, i, form)
        ok = seg.pullback == segment_form(a, b, T)
        checks.append(PolypolCheck(f"curve {i} residue", ok, seg.pullback.to_text()))
        ra = residue_at_point(seg.pullback, a)
        rb = residue_at_point(seg.pullback, b)
        checks.append(PolypolCheck(f"curve {i} endpoints", ra == 1 and rb == -1,
                                   f"Res_a = {ra}, Res_b = {rb}"))
        endpoint[i] = (ra, rb)
    for k in range(p.r):
        j = (k + 1) % p.r
        before = endpoint[k][1]
        after = endpoint[j][0]
        ok = before in (1, -1) and after in (1, -1) and before == -after
        checks.append(PolypolCheck(f"vertex {k} iterated residues", ok,
                                   f"via curve {k}: {before}, via curve {j}: {after}"))
    report = PolypolReport(all(c.passed for c in checks), checks, result)
    if strict and not report.passed:
        bad = next(c for c in checks if not c.passed)
        raise VerificationFailed(f"{bad.stratum}: {bad.detail}", report, bad.stratum)
    return report


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def line_through(p, q) -> tuple:
    """``(f, param)`` for the line through affine points p, q with phi(0)=p, phi(1)=q."""
    p = [parse_rat(c) for c in p]
    q = [parse_rat(c) for c in q]
    t = MPoly.variable(T)
    one = MPoly.constant(1, (T,))
    param = (one * p[0] + t * (q[0] - p[0]), one * p[1] + t * (q[1] - p[1]), one)
    a, b = q[1] - p[1], p[0] - q[0]
    c = -(a * p[0] + b * p[1])
    f = MPoly.linear([a, b, c], 0, XYZ).primitive()
    return f, param


def polypol_from_polygon(P) -> Polypol:
    """The edge lines of a convex polygon as a polypol, counterclockwise,
    each segment parametrized over [0, 1]."""
    if P.d != 2:
        raise DimensionMismatch("polypol_from_polygon needs a polygon")
    verts = list(P.vertices)
    cx = sum(v[0] for v in verts) / len(verts)
    cy = sum(v[1] for v in verts) / len(verts)

    def half(v):
        dx, dy = v[0] - cx, v[1] - cy
        return 0 if (dy > 0 or (dy == 0 and dx > 0)) else 1

    def before(v, w):
        hv, hw = half(v), half(w)
        if hv != hw:
            return hv < hw
        return (v[0] - cx) * (w[1] - cy) - (v[1] - cy) * (w[0] - cx) > 0

    import functools
    verts.sort(key=functools.cmp_to_key(lambda v, w: -1 if before(v, w) else (1 if before(w, v) else 0)))
    m = len(verts)
    curves = []
    intervals = []
    for i in range(m):
        f, param = line_through(verts[i], verts[(i + 1) % m])
        curves.append(PlaneCurve(f.primitive(), param, ()))
        intervals.append((Fraction(0), Fraction(1)))
    vertices = tuple(_point(verts[(i + 1) % m]) for i in range(m))
    return validate_polypol(Polypol(tuple(curves), vertices, tuple(intervals)))


def pullback_projective(form: RatForm, M) -> RatForm:
    """Pull back ``c(X, Y) dX^dY`` along ``(X : Y : 1) = M (x, y, 1)``."""
    M = M if isinstance(M, RatMatrix) else RatMatrix(M)
    L = [MPoly.linear(row[:2], row[2], CHART) for row in M.rows]
    w = "__w"

    def hom(g: MPoly):
        g = g.with_variables(CHART) if set(g.used_variables()) <= set(CHART) else g
        deg = max(g.total_degree(), 0)
        gh = g.homogenize(w, deg)
        tmp = gh.substitute({"x": MPoly.variable("__X"), "y": MPoly.variable("__Y")})
        out = tmp.substitute({"__X": L[0], "__Y": L[1], w: L[2]})
        return out.with_variables(CHART) if set(out.used_variables()) <= set(CHART) else out, deg

    num, dn = hom(form.coeff.numerator)
    facs = []
    power = 3 + dn
    for f, e in form.coeff.factors:
        fh, df = hom(f)
        facs.append((fh, e))
        power -= df * e
    num = num * det(M)
    if power > 0:
        facs.append((L[2], power))
    elif power < 0:
        num = num * L[2] ** (-power)
    return RatForm(CHART, FactoredRatFn(num, facs))
