"""Canonical forms, amplitudes and adjoints of convex polytopes."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .algebra import FactoredRatFn, MPoly, det, format_rat, nullspace, parse_rat
from .errors import (ArrangementNotSimple, DimensionMismatch, DivisionByY0Fails,
                     DomainError, KernelDimensionNot1, NotSimple, VerificationFailed)
from .forms import RatForm, OneFormOnLine, residue_along_linear
from .polytope import (HRep, Polytope, affine_rank, homogeneous_rows, hrep_from_vertices,
                       is_simple, normal_cone_triangulation, residual_flats, triangulate,
                       vertices_from_hrep)


@dataclass(frozen=True)
class CanonicalFormResult:
    form: RatForm
    numerator: MPoly
    denominator_factors: tuple

    @property
    def coeff(self) -> FactoredRatFn:
        return self.form.coeff

    def to_text(self) -> str:
        return self.form.to_text()

    def to_latex(self) -> str:
        return self.form.to_latex()


def _result(P: Polytope, coeff: FactoredRatFn) -> CanonicalFormResult:
    form = RatForm(P.variables, coeff) if P.d != 1 else OneFormOnLine(P.variables, coeff)
    num = coeff.numerator
    if num.variables != P.variables:
        num = num.with_variables(P.variables) if set(num.used_variables()) <= set(P.variables) \
            else num
    return CanonicalFormResult(form, num, tuple(f for f, _ in coeff.factors))


def _require_simple(P: Polytope):
    if not is_simple(P):
        bad = [k for k, s in enumerate(P.incidence) if len(s) != P.d]
        raise NotSimple(f"vertices {bad} lie on more than {P.d} facets")


def _product(polys, variables):
    out = MPoly.constant(1, variables)
    for p in polys:
        out = out * p
    return out


def canonical_form_simple(P: Polytope) -> CanonicalFormResult:
    """Vertex-sum formula over the common denominator of all facet forms."""
    _require_simple(P)
    ells = P.facet_forms()
    num = MPoly.constant(0, P.variables)
    for k, inc in enumerate(P.incidence):
        others = [ells[i] for i in range(P.n) if i not in inc]
        num = num + _product(others, P.variables) * P.det_at(k)
    coeff = FactoredRatFn(num, [(ell, 1) for ell in ells])
    return _result(P, coeff)


def dual_volume_terms(P: Polytope) -> list:
    """``(|det U_C|, C)`` for every simplicial piece C of every normal cone."""
    out = []
    for k in range(len(P.vertices)):
        for C in normal_cone_triangulation(P, k):
            out.append((abs(det(P.U.submatrix(C))), C))
    return out


def dual_volume_function(P: Polytope) -> FactoredRatFn:
    """``y -> vol((P - y)°)`` as a rational function in the chart variables."""
    ells = P.facet_forms()
    num = MPoly.constant(0, P.variables)
    for w, C in dual_volume_terms(P):
        others = [ells[i] for i in range(P.n) if i not in C]
        num = num + _product(others, P.variables) * w
    return FactoredRatFn(num, [(ell, 1) for ell in ells])


def dual_volume_at(P: Polytope, y=None) -> Fraction:
    """Normalized volume of ``(P - y)°`` for y in the interior (default 0)."""
    y = [Fraction(0)] * P.d if y is None else [parse_rat(c) for c in y]
    zs = [sum((a * b for a, b in zip(u, y)), Fraction(0)) + zz for u, zz in zip(P.U.rows, P.z)]
    if any(v <= 0 for v in zs):
        raise DomainError("point is not in the interior")
    total = Fraction(0)
    for w, C in dual_volume_terms(P):
        t = w
        for i in C:
            t /= zs[i]
        total += t
    return total


def canonical_form(P: Polytope) -> CanonicalFormResult:
    """Vertex formula for simple P, dual volume function otherwise."""
    if is_simple(P):
        return canonical_form_simple(P)
    return _result(P, dual_volume_function(P))


def facet_names(P: Polytope, names: Sequence[str] | None = None) -> tuple:
    if names is None:
        return tuple(f"x{i}" for i in range(1, P.n + 1))
    names = tuple(names)
    if len(names) != P.n or len(set(names)) != P.n:
        raise DimensionMismatch(f"need {P.n} distinct facet names, got {len(names)}")
    return names


@dataclass(frozen=True)
class Amplitude:
    vertex_terms: tuple
    names: tuple

    def as_ratfn(self) -> FactoredRatFn:
        total = FactoredRatFn(MPoly.constant(0, self.names))
        for c, S in self.vertex_terms:
            total = total + FactoredRatFn(
                MPoly.constant(c, self.names),
                [(MPoly.variable(self.names[i], self.names), 1) for i in S])
        return total

    def evaluate(self, values) -> Fraction:
        if isinstance(values, dict):
            values = [values[n] for n in self.names]
        values = [parse_rat(v) for v in values]
        total = Fraction(0)
        for c, S in self.vertex_terms:
            t = c
            for i in S:
                t /= values[i]
            total += t
        return total

    def specialize(self, P: Polytope) -> FactoredRatFn:
        """Substitute ``x_F = u_F . y + z_F``."""
        ells = P.facet_forms()
        num = MPoly.constant(0, P.variables)
        for c, S in self.vertex_terms:
            others = [ells[i] for i in range(len(self.names)) if i not in S]
            num = num + _product(others, P.variables) * c
        return FactoredRatFn(num, [(ell, 1) for ell in ells])

    def to_text(self) -> str:
        parts = []
        for c, S in self.vertex_terms:
            den = "*".join(self.names[i] for i in S)
            if len(S) > 1:
                den = f"({den})"
            parts.append(f"{format_rat(c)}/{den}")
        return " + ".join(parts)

    def to_latex(self) -> str:
        parts = []
        for c, S in self.vertex_terms:
            den = "".join(_latex_name(self.names[i]) for i in S)
            parts.append(f"\\frac{{{format_rat(c)}}}{{{den}}}")
        return " + ".join(parts)

    def __len__(self):
        return len(self.vertex_terms)


def _latex_name(name: str) -> str:
    import re
    m = re.fullmatch(r"([A-Za-z]+)(\d+)", name)
    return f"{m.group(1)}_{{{m.group(2)}}}" if m else name


def toric_amplitude(P: Polytope, names: Sequence[str] | None = None) -> Amplitude:
    _require_simple(P)
    names = facet_names(P, names)
    terms = tuple((P.det_at(k), inc) for k, inc in enumerate(P.incidence))
    return Amplitude(terms, names)


@dataclass(frozen=True)
class UniversalAdjoint:
    polynomial: MPoly
    names: tuple

    def to_text(self) -> str:
        return self.polynomial.to_text()


def universal_adjoint(P: Polytope, names: Sequence[str] | None = None) -> UniversalAdjoint:
    """``sum_v |det U_v| prod_{F not containing v} x_F``."""
    _require_simple(P)
    names = facet_names(P, names)
    poly = MPoly.constant(0, names)
    for k, inc in enumerate(P.incidence):
        e = tuple(0 if i in inc else 1 for i in range(P.n))
        poly = poly + MPoly({e: P.det_at(k)}, names)
    return UniversalAdjoint(poly, names)


@dataclass(frozen=True)
class WarrenAdjoint:
    polynomial: MPoly
    hom_var: str = "y0"

    def dehomogenize(self) -> MPoly:
        return self.polynomial.substitute({self.hom_var: 1})

    def to_text(self) -> str:
        return self.polynomial.to_text()


def _homogeneous_vars(P: Polytope, hom_var: str) -> tuple:
    if hom_var in P.variables:
        raise DimensionMismatch(f"{hom_var} clashes with a chart variable")
    return (hom_var,) + P.variables


def _positive_at_centroid(poly: MPoly, P: Polytope, hom_var: str) -> MPoly:
    poly = poly.primitive()
    pt = dict(zip(P.variables, P.interior_point()))
    pt[hom_var] = Fraction(1)
    if poly.evaluate(pt) < 0:
        poly = -poly
    return poly


def warren_adjoint(P: Polytope, hom_var: str = "y0") -> WarrenAdjoint:
    """Adjoint of degree n-d-1 in (y0, y1, ..., yd), positive inside P.

    The scale is the raw one from the substitution (no integer
    normalization), with the sign fixed so the value at the vertex
    centroid is positive.
    """
    hv = _homogeneous_vars(P, hom_var)
    target = P.n - P.d - 1
    if is_simple(P):
        ua = universal_adjoint(P)
        y0 = MPoly.variable(hom_var, hv)
        subs = {}
        for i, name in enumerate(ua.names):
            subs[name] = MPoly.linear(P.U.rows[i], 0, hv[1:]).with_variables(hv) + y0 * P.z[i]
        full = ua.polynomial.substitute(subs).with_variables(hv)
        poly = _exact_div_y0(full, y0)
    else:
        num = dual_volume_function(P).numerator
        if num.total_degree() > target:
            raise DivisionByY0Fails(
                f"dual volume numerator has degree {num.total_degree()} > {target}")
        poly = num.with_variables(P.variables).homogenize(hom_var, target).with_variables(hv)
    pt = dict(zip(P.variables, P.interior_point()))
    pt[hom_var] = Fraction(1)
    if poly.evaluate(pt) < 0:
        poly = -poly
    return WarrenAdjoint(poly, hom_var)


def _exact_div_y0(full: MPoly, y0: MPoly) -> MPoly:
    from .algebra import exact_div
    q = exact_div(full, y0)
    if q is None:
        raise DivisionByY0Fails("substituted universal adjoint is not divisible by y0")
    return q


def canonical_form_via_triangulation(P: Polytope, pull_first: int | None = None):
    """Sum of the simplex forms of a pulling triangulation."""
    total = FactoredRatFn(MPoly.constant(0, P.variables))
    for s in triangulate(P, pull_first):
        S = vertices_from_hrep(hrep_from_vertices(s.vertices), P.variables)
        total = total + canonical_form_simple(S).coeff
    return _result(P, total)


def pole_structure(P: Polytope, coeff: FactoredRatFn):
    """Check that the poles are exactly the facets, each simple.

    Returns a list of problems (empty when fine).
    """
    problems = []
    ells = P.facet_forms()
    keys = {ell.factor_key(): i for i, ell in enumerate(ells)}
    for f, e in coeff.factors:
        i = keys.get(f.factor_key())
        if i is None:
            problems.append(f"pole {f.to_text()} is not a facet")
        elif e != 1:
            problems.append(f"pole along facet {i} has order {e}")
    for i, ell in enumerate(ells):
        if coeff.order_of(ell) != 1:
            problems.append(f"facet {i} is not a simple pole")
    return problems


# ---------------------------------------------------------------------------
# Recursive verification
# ---------------------------------------------------------------------------

@dataclass
class StratumCheck:
    facets: tuple
    dimension: int
    passed: bool
    residue: str = ""
    detail: str = ""
    sign: int = 0


@dataclass
class VerificationReport:
    passed: bool
    strata: list = field(default_factory=list)

    def counts(self) -> dict:
        out = {}
        for s in self.strata:
            out[s.dimension] = out.get(s.dimension, 0) + 1
        return out

    def failures(self) -> list:
        return [s for s in self.strata if not s.passed]

    def to_text(self) -> str:
        lines = []
        for s in self.strata:
            tag = "pass" if s.passed else "FAIL"
            idx = ",".join(str(i) for i in s.facets) or "-"
            extra = f" ({s.detail})" if s.detail else ""
            lines.append(f"{tag} dim={s.dimension} facets={{{idx}}} residue={s.residue}{extra}")
        lines.append("verification: " + ("pass" if self.passed else "FAIL"))
        return "\n".join(lines)


def facet_polytope(P: Polytope, i: int):
    """Facet i as a polytope in the chart obtained by eliminating the
    residue pivot. Returns (polytope, chart_map, original facet labels)."""
    ell = P.facet_form(i)
    probe = RatForm(P.variables, FactoredRatFn(MPoly.constant(1, P.variables), [(ell, 1)]))
    _, cmap = residue_along_linear(probe, ell)
    fv = set(P.facet_vertices(i))
    rows, zs, labels = [], [], []
    for g in range(P.n):
        if g == i:
            continue
        common = [P.vertices[k] for k in fv if g in P.incidence[k]]
        if affine_rank(common) != P.d - 2:
            continue
        r = cmap.apply(P.facet_form(g)).with_variables(cmap.target_vars)
        rows.append([r.diff(v).constant_term() for v in cmap.target_vars])
        zs.append(r.constant_term())
        labels.append(g)
    if P.d == 1:
        return None, cmap, []
    F = vertices_from_hrep(HRep.from_lists(rows, zs), cmap.target_vars)
    return F, cmap, labels


def _verify(P, coeff, labels, path, results, flip):
    problems = pole_structure(P, coeff)
    key = frozenset(path)
    if problems:
        results.setdefault(key, []).append(
            StratumCheck(tuple(sorted(path)), P.d, False, "", "; ".join(problems)))
    form = RatForm(P.variables, coeff)
    for i in range(P.n):
        sub_path = path + (labels[i],)
        skey = frozenset(sub_path)
        eta, _ = residue_along_linear(form, P.facet_form(i), flip_orientation=flip)
        F, _, sub_labels = facet_polytope(P, i)
        if F is None:
            val = eta.coeff.numerator.constant_term() if eta.coeff.numerator.is_constant() \
                and not eta.coeff.factors else None
            ok = val in (1, -1)
            results.setdefault(skey, []).append(StratumCheck(
                tuple(sorted(sub_path)), 0, ok, eta.to_text(),
                "" if ok else "point residue is not +-1", int(val) if ok else 0))
            continue
        expected = canonical_form(F).coeff
        if eta.coeff == expected:
            sign = 1
        elif eta.coeff == -expected:
            sign = -1
        else:
            results.setdefault(skey, []).append(StratumCheck(
                tuple(sorted(sub_path)), F.d, False, eta.to_text(),
                "residue differs from the facet canonical form"))
            continue
        results.setdefault(skey, []).append(StratumCheck(
            tuple(sorted(sub_path)), F.d, True, eta.to_text(), "", sign))
        _verify(F, eta.coeff, [labels[g] for g in sub_labels], sub_path, results, flip)


def verify_positive_geometry(P: Polytope, form: RatForm | None = None, *,
                             strict: bool = False, flip_orientation: bool = False
                             ) -> VerificationReport:
    """Recursive residue check over every face of P.

    Each stratum is keyed by the set of original facet indices cutting it
    out. Strata reached along several residue paths must pass on each.
    """
    if P.d > 4:
        raise DomainError("verification is limited to d <= 4")
    coeff = form.coeff if form is not None else canonical_form(P).coeff
    results = {}
    _verify(P, coeff, list(range(P.n)), (), results, flip_orientation)
    strata = []
    for key in sorted(results, key=lambda k: (len(k), sorted(k))):
        checks = results[key]
        first = checks[0]
        ok = all(c.passed for c in checks)
        detail = "; ".join(c.detail for c in checks if c.detail)
        strata.append(StratumCheck(first.facets, first.dimension, ok, first.residue,
                                   detail, first.sign))
    report = VerificationReport(all(s.passed for s in strata), strata)
    if strict and not report.passed:
        bad = report.failures()[0]
        raise VerificationFailed(f"stratum {bad.facets}: {bad.detail}", report, bad.facets)
    return report


# ---------------------------------------------------------------------------
# Adjoint by interpolation
# ---------------------------------------------------------------------------

def _monomials(nvars: int, degree: int):
    if nvars == 1:
        yield (degree,)
        return
    for a in range(degree, -1, -1):
        for rest in _monomials(nvars - 1, degree - a):
            yield (a,) + rest


def check_arrangement_simple(P: Polytope):
    H = homogeneous_rows(P)
    for S in combinations(range(P.n), P.d + 1):
        if det([H[i] for i in S]) == 0:
            raise ArrangementNotSimple(f"hyperplanes {S} meet in a common point")


def interpolate(variables, degree, flats, extra_rows=()):
    """Homogeneous polynomial of ``degree`` vanishing on every flat.

    ``flats`` is a list of bases (each a list of homogeneous vectors);
    ``extra_rows`` are further linear conditions on the coefficients of
    the monomials of ``monomials(len(variables), degree)``. The kernel must
    be one-dimensional.
    """
    variables = tuple(variables)
    monos = list(_monomials(len(variables), degree))
    rows = []
    for basis in flats:
        m = len(basis)
        svars = tuple(f"__s{j}" for j in range(m))
        coords = [MPoly.linear([b[i] for b in basis], 0, svars) for i in range(len(variables))]
        blocks = {}
        for col, e in enumerate(monos):
            val = MPoly.constant(1, svars)
            for c, k in zip(coords, e):
                if k:
                    val = val * c ** k
            for se, cf in val.terms.items():
                blocks.setdefault(se, [Fraction(0)] * len(monos))[col] = cf
        rows.extend(blocks[k] for k in sorted(blocks))
    rows.extend(list(r) for r in extra_rows)
    ker = nullspace(rows) if rows else [[Fraction(int(i == j)) for i in range(len(monos))]
                                       for j in range(len(monos))]
    if len(ker) != 1:
        raise KernelDimensionNot1(f"interpolation kernel has dimension {len(ker)}", len(ker))
    poly = MPoly(dict(zip(monos, ker[0])), variables)
    return poly


def adjoint_through_residual_points(P: Polytope, hom_var: str = "y0") -> MPoly:
    """Unique degree n-d-1 hypersurface through the residual arrangement.

    Requires a simple facet arrangement (no d+1 hyperplanes concurrent).
    """
    check_arrangement_simple(P)
    hv = _homogeneous_vars(P, hom_var)
    flats = [f.basis for f in residual_flats(P)]
    poly = interpolate(hv, P.n - P.d - 1, flats)
    return _positive_at_centroid(poly, P, hom_var)
