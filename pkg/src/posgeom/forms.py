"""Rational top-forms on affine charts and their residues.

A :class:`RatForm` is ``coeff * dx1^...^dxd`` in a fixed chart order. The
residue along a divisor ``f`` uses the decomposition with ``df/f`` in the
last wedge slot, eliminating the chart variable of largest index that
actually occurs in ``f``.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .algebra import (FactoredRatFn, MPoly, RatMatrix, det, parse_rat, parse_ratfn,
                      rational_roots, univariate_gcd, _latex_var, _udivmod, _trim)
from .errors import (ChartMismatch, ConstantDivisor, DegenerateParametrization,
                     DimensionMismatch, DomainError, HigherOrderPole,
                     LinearFormConstant, ParseError)

log = logging.getLogger(__name__)

INFINITY = "oo"


def _perm_sign(seq, ref) -> int:
    pos = [ref.index(v) for v in seq]
    sign = 1
    for i in range(len(pos)):
        for j in range(i + 1, len(pos)):
            if pos[i] > pos[j]:
                sign = -sign
    return sign


def _as_ratfn(c) -> FactoredRatFn:
    if isinstance(c, FactoredRatFn):
        return c
    if isinstance(c, str):
        return parse_ratfn(c)
    if isinstance(c, MPoly):
        return FactoredRatFn(c)
    return FactoredRatFn(MPoly.constant(c))


class RatForm:
    """``coeff * d(chart_vars[0]) ^ ... ^ d(chart_vars[-1])``."""

    __slots__ = ("chart_vars", "coeff")

    def __init__(self, chart_vars: Sequence[str], coeff, differentials=None):
        self.chart_vars = tuple(chart_vars)
        coeff = _as_ratfn(coeff)
        if differentials is not None:
            differentials = tuple(differentials)
            if sorted(differentials) != sorted(self.chart_vars) or \
                    len(set(differentials)) != len(differentials):
                raise DimensionMismatch(
                    f"differentials {differentials} are not a permutation of {self.chart_vars}")
            if _perm_sign(differentials, self.chart_vars) < 0:
                coeff = -coeff
        extra = set(coeff.variables) - set(self.chart_vars)
        used = set()
        used.update(coeff.numerator.used_variables())
        for f, _ in coeff.factors:
            used.update(f.used_variables())
        if used & extra:
            raise DimensionMismatch(
                f"coefficient uses {sorted(used & extra)} outside the chart {self.chart_vars}")
        self.coeff = coeff

    @property
    def degree(self) -> int:
        return len(self.chart_vars)

    @classmethod
    def parse(cls, text: str, chart_vars: Sequence[str] | None = None):
        return parse_form(text, chart_vars)

    def flip_orientation(self) -> "RatForm":
        return type(self)(self.chart_vars, -self.coeff)

    def __neg__(self):
        return self.flip_orientation()

    def _check_chart(self, other):
        if not isinstance(other, RatForm):
            raise TypeError("expected a RatForm")
        if self.chart_vars != other.chart_vars:
            raise ChartMismatch(
                f"forms live on different charts: {self.chart_vars} vs {other.chart_vars}")

    def __add__(self, other):
        self._check_chart(other)
        return type(self)(self.chart_vars, self.coeff + other.coeff)

    def __sub__(self, other):
        self._check_chart(other)
        return type(self)(self.chart_vars, self.coeff - other.coeff)

    def __mul__(self, scalar):
        return type(self)(self.chart_vars, self.coeff * _as_ratfn(scalar))

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, RatForm):
            return NotImplemented
        return form_equal(self, other)

    __hash__ = None

    def differential_text(self) -> str:
        return "^".join(f"d{v}" for v in self.chart_vars)

    def to_text(self) -> str:
        if not self.chart_vars:
            return self.coeff.to_text()
        return f"{self.coeff.to_text()} {self.differential_text()}"

    def to_latex(self) -> str:
        c = self.coeff.to_latex()
        if not self.chart_vars:
            return c
        wedge = " \\wedge ".join(f"d{_latex_var(v)}" for v in self.chart_vars)
        return f"{c}\\, {wedge}"

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"{type(self).__name__}({self.to_text()!r})"


class OneFormOnLine(RatForm):
    """A one-form ``coeff(t) dt`` on the affine line."""

    __slots__ = ()

    def __init__(self, var, coeff, differentials=None):
        if isinstance(var, str):
            var = (var,)
        if len(tuple(var)) != 1:
            raise DimensionMismatch("a one-form on a line has exactly one variable")
        super().__init__(var, coeff, differentials)

    @property
    def var(self) -> str:
        return self.chart_vars[0]


@dataclass(frozen=True)
class OneForm:
    """``coeff(x, y, ...) d(dvar)``: a one-form in ambient coordinates.

    Used for residues along nonlinear curves, where the restriction is only
    meaningful after pulling back along a parametrization.
    """

    ambient_vars: tuple
    coeff: FactoredRatFn
    dvar: str

    def to_text(self) -> str:
        return f"{self.coeff.to_text()} d{self.dvar}"

    def to_latex(self) -> str:
        return f"{self.coeff.to_latex()}\\, d{_latex_var(self.dvar)}"

    def __str__(self):
        return self.to_text()


@dataclass(frozen=True)
class ChartMap:
    """Affine embedding of a hyperplane chart: ``pivot = expression``."""

    source_vars: tuple
    target_vars: tuple
    pivot: str
    expression: MPoly

    def apply(self, p):
        """Restrict a polynomial or rational function to the hyperplane."""
        return p.substitute({self.pivot: self.expression})

    def point(self, coords) -> tuple:
        """Ambient coordinates of a point given in the hyperplane chart."""
        vals = dict(zip(self.target_vars, (parse_rat(c) for c in coords)))
        vals[self.pivot] = self.expression.evaluate(vals)
        return tuple(vals[v] for v in self.source_vars)

    def to_text(self) -> str:
        return f"{self.pivot} = {self.expression.to_text()}"


_FORM_RE = re.compile(r"^(.*?)(?:\s+(d[A-Za-z_]\w*(?:\s*\^\s*d[A-Za-z_]\w*)*))?\s*$", re.S)


def parse_form(text: str, chart_vars: Sequence[str] | None = None) -> RatForm:
    """Parse ``<ratfn> dx^dy``; a wedge order differing from ``chart_vars``
    contributes the sign of the permutation."""
    m = _FORM_RE.match(text.strip())
    if not m or not m.group(1):
        raise ParseError(f"cannot parse form {text!r}")
    coeff_text, diff_text = m.group(1), m.group(2)
    diffs = tuple(p.strip()[1:] for p in diff_text.split("^")) if diff_text else ()
    chart = tuple(chart_vars) if chart_vars is not None else diffs
    coeff = parse_ratfn(coeff_text, chart)
    if len(chart) == 1:
        return OneFormOnLine(chart, coeff, diffs)
    return RatForm(chart, coeff, diffs)


def form_equal(a: RatForm, b: RatForm) -> bool:
    """Exact equality of two forms on the same chart."""
    if a.chart_vars != b.chart_vars:
        raise ChartMismatch(
            f"forms live on different charts: {a.chart_vars} vs {b.chart_vars}")
    return a.coeff == b.coeff


def pole_order(form, f: MPoly) -> int:
    """Order of f as a pole of the form (negative for a zero)."""
    if f.is_constant():
        raise ConstantDivisor(f"pole order along a constant {f}")
    coeff = form.coeff if not isinstance(form, FactoredRatFn) else form
    return coeff.order_of(f)


def _linear_pivot(chart_vars, ell: MPoly):
    if ell.total_degree() > 1:
        raise DomainError(f"{ell} is not affine-linear")
    if any(v not in chart_vars for v in ell.used_variables()):
        raise DimensionMismatch(f"{ell} uses variables outside {chart_vars}")
    coeffs = [ell.diff(v).constant_term() for v in chart_vars]
    piv = None
    for i, c in enumerate(coeffs):
        if c:
            piv = i
    if piv is None:
        raise LinearFormConstant(f"{ell} has no chart variable")
    return piv, coeffs


def residue_along_linear(form: RatForm, ell: MPoly, flip_orientation: bool = False):
    """Residue along the hyperplane ``ell = 0``.

    Returns ``(eta, chart_map)`` where eta is a form in the remaining chart
    variables and chart_map expresses the eliminated pivot variable.
    """
    chart = form.chart_vars
    d = len(chart)
    p, coeffs = _linear_pivot(chart, ell)
    cp = coeffs[p]
    pivot = chart[p]
    rest_vars = chart[:p] + chart[p + 1:]
    expr = -(ell - MPoly.variable(pivot, ell.variables) * cp) * (1 / cp)
    expr = expr.with_variables(rest_vars)
    cmap = ChartMap(chart, rest_vars, pivot, expr)
    log.debug("residue chart: %s", cmap.to_text())
    k, rest = form.coeff.split(ell)
    if k > 1:
        raise HigherOrderPole(f"pole of order {k} along {ell}")
    if k <= 0 or rest.is_zero():
        eta = FactoredRatFn(MPoly.constant(0, rest_vars))
    else:
        sign = -1 if (d - 1 - p) % 2 else 1
        if flip_orientation:
            sign = -sign
        eta = cmap.apply(rest) * Fraction(sign, 1) * (1 / cp)
    cls = OneFormOnLine if len(rest_vars) == 1 else RatForm
    return cls(rest_vars, eta), cmap


def residue_along(form: RatForm, f: MPoly, flip_orientation: bool = False) -> OneForm:
    """Residue along a plane curve ``f = 0``, left unrestricted.

    The pivot is the chart variable of largest index with a nonzero partial
    derivative of f; the result is ``sign * rest / (df/dpivot) d(other)``.
    """
    chart = form.chart_vars
    if len(chart) != 2:
        raise DimensionMismatch("curve residues are implemented for 2-forms")
    if f.is_constant():
        raise ConstantDivisor(f"residue along a constant {f}")
    p = None
    for i, v in enumerate(chart):
        if not f.diff(v).is_zero():
            p = i
    k, rest = form.coeff.split(f)
    if k > 1:
        raise HigherOrderPole(f"pole of order {k} along {f}")
    other = chart[1 - p]
    if k <= 0 or rest.is_zero():
        return OneForm(chart, FactoredRatFn(MPoly.constant(0, chart)), other)
    sign = -1 if p == 0 else 1
    if flip_orientation:
        sign = -sign
    df = f.diff(chart[p])
    coeff = rest / FactoredRatFn(df) * sign
    return OneForm(chart, coeff, other)


# ---------------------------------------------------------------------------
# Curves and lines
# ---------------------------------------------------------------------------

def _univariate(p, var):
    if isinstance(p, str):
        p = MPoly.parse(p, (var,))
    elif not isinstance(p, MPoly):
        p = MPoly.constant(p, (var,))
    used = p.used_variables()
    if any(v != var for v in used):
        raise DimensionMismatch(f"parametrization {p} is not univariate in {var}")
    return p.with_variables((var,)) if var in p.variables or not p.variables \
        else MPoly.constant(p.constant_term(), (var,))


def _homog_eval(g: MPoly, chart, r, s, h, var):
    """``g^h(r, s, h)`` for g in the chart variables (x, y)."""
    w = "__w"
    deg = max(g.total_degree(), 0)
    gh = g.with_variables(tuple(chart)).homogenize(w, deg)
    out = gh.substitute({chart[0]: r, chart[1]: s, w: h})
    return _univariate(out, var), deg


def _line_ratfn(num_dense, den_dense, var) -> FactoredRatFn:
    """Reduce num/den and factor the denominator over Q into linear parts."""
    g = univariate_gcd(MPoly.from_dense(num_dense, var), MPoly.from_dense(den_dense, var))
    if not g.is_zero() and g.total_degree() > 0:
        num_dense, _ = _udivmod(num_dense, g.dense(var))
        den_dense, _ = _udivmod(den_dense, g.dense(var))
    num = MPoly.from_dense(_trim(num_dense), var)
    den = MPoly.from_dense(_trim(den_dense), var)
    if num.is_zero():
        return FactoredRatFn(MPoly.constant(0, (var,)))
    if den.is_constant():
        return FactoredRatFn(num * (1 / den.constant_term()))
    rr = rational_roots(den)
    t = MPoly.variable(var)
    facs = [(t - a, m) for a, m in rr.roots]
    prod = MPoly.constant(1, (var,))
    for f, m in facs:
        prod = prod * f ** m
    cof, _ = _udivmod(den.dense(var), prod.dense(var))
    cof = MPoly.from_dense(_trim(cof), var)
    if not cof.is_constant():
        facs.append((cof, 1))
        return FactoredRatFn(num, facs)
    return FactoredRatFn(num * (1 / cof.constant_term()), facs)


def pullback_curve(eta, phi, var: str = "t", chart: Sequence[str] | None = None) -> OneFormOnLine:
    """Pull back a one-form in a plane chart along ``t -> (r/h, s/h)``.

    ``eta`` is a :class:`OneForm` (or a one-variable :class:`RatForm`, read
    as a form in the chart (x, y)); ``phi`` is ``(r, s, h)`` or ``(r, s)``.
    """
    if isinstance(eta, OneForm):
        chart = tuple(chart or eta.ambient_vars)
        coeff, dvar = eta.coeff, eta.dvar
    elif isinstance(eta, RatForm) and eta.degree == 1:
        chart = tuple(chart or ("x", "y"))
        coeff, dvar = eta.coeff, eta.chart_vars[0]
    else:
        raise DimensionMismatch("pullback_curve expects a one-form")
    if len(chart) != 2 or dvar not in chart:
        raise DimensionMismatch(f"differential d{dvar} is not a chart direction of {chart}")
    phi = list(phi)
    if len(phi) == 2:
        phi.append(1)
    r, s, h = (_univariate(c, var) for c in phi)
    if h.is_zero():
        raise DegenerateParametrization("h(t) is identically zero")
    tvar = (var,)
    dr = r.diff(var) * h - r * h.diff(var)
    ds = s.diff(var) * h - s * h.diff(var)
    if dr.is_zero() and ds.is_zero():
        raise DegenerateParametrization("parametrization is constant")
    dnum = dr if dvar == chart[0] else ds
    n_t, n_deg = _homog_eval(coeff.numerator, chart, r, s, h, var)
    num = n_t * dnum
    den = MPoly.constant(1, tvar)
    hpow = -n_deg - 2
    for f, e in coeff.factors:
        f_t, f_deg = _homog_eval(f, chart, r, s, h, var)
        if f_t.is_zero():
            raise DomainError(f"parametrization lies on the pole {f}")
        den = den * f_t ** e
        hpow += f_deg * e
    if hpow >= 0:
        num = num * h ** hpow
    else:
        den = den * h ** (-hpow)
    return OneFormOnLine(var, _line_ratfn(num.dense(var), den.dense(var), var))


def _line_dense(eta: OneFormOnLine):
    var = eta.var
    num = eta.coeff.numerator.with_variables((var,)) if eta.coeff.numerator.variables \
        else MPoly.constant(eta.coeff.numerator.constant_term(), (var,))
    den = eta.coeff.denominator()
    return _trim(num.dense(var)), _trim(den.dense(var) if den.used_variables() or
                                        den.variables else [den.constant_term()])


def _order_at(c, a):
    k = 0
    while len(c) > 1:
        val = sum(x * a ** i for i, x in enumerate(c))
        if val:
            break
        c, _ = _udivmod(c, [-a, Fraction(1)])
        k += 1
    return k, c


def residue_at_point(eta: OneFormOnLine, a) -> Fraction:
    """Residue of ``eta`` at ``t = a``; ``a`` may be ``"oo"`` or ``None`` for infinity."""
    num, den = _line_dense(eta)
    if not num:
        return Fraction(0)
    if a is None or a == INFINITY or a == "inf":
        order = 2 + (len(num) - 1) - (len(den) - 1)
        if order <= 0:
            return Fraction(0)
        if order > 1:
            raise HigherOrderPole(f"pole of order {order} at infinity")
        return -num[-1] / den[-1]
    a = parse_rat(a)
    kd, dred = _order_at(den, a)
    kn, nred = _order_at(num, a)
    order = kd - kn
    if order <= 0:
        return Fraction(0)
    if order > 1:
        raise HigherOrderPole(f"pole of order {order} at t = {a}")
    return sum(x * a ** i for i, x in enumerate(nred)) / \
        sum(x * a ** i for i, x in enumerate(dred))


def line_poles(eta: OneFormOnLine) -> list:
    """Rational finite poles of a one-form with their orders."""
    num, den = _line_dense(eta)
    var = eta.var
    out = []
    for a, _ in rational_roots(MPoly.from_dense(den, var)).roots:
        kd, _ = _order_at(den, a)
        kn, _ = _order_at(num, a)
        if kd > kn:
            out.append((a, kd - kn))
    return out


def residue_sum(eta: OneFormOnLine) -> Fraction:
    """Sum of residues at rational poles and at infinity."""
    return sum((residue_at_point(eta, a) for a, _ in line_poles(eta)), Fraction(0)) + \
        residue_at_point(eta, INFINITY)


def segment_form(a, b, var: str = "t") -> OneFormOnLine:
    """``(b-a)/((t-a)(b-t)) dt``: the canonical form of the segment from a to b."""
    a, b = parse_rat(a), parse_rat(b)
    t = MPoly.variable(var)
    return OneFormOnLine(var, FactoredRatFn(MPoly.constant(b - a, (var,)),
                                            [(t - a, 1), (-t + b, 1)]))


def pullback_affine(form: RatForm, matrix, offset, new_vars: Sequence[str] | None = None):
    """Pull back along ``x = matrix * w + offset``; the Jacobian is det(matrix)."""
    m = matrix if isinstance(matrix, RatMatrix) else RatMatrix(matrix)
    d = form.degree
    if m.shape != (d, d) or len(offset) != d:
        raise DimensionMismatch("affine map does not match the chart dimension")
    new_vars = tuple(new_vars) if new_vars is not None else form.chart_vars
    subs = {}
    for i, v in enumerate(form.chart_vars):
        subs[v] = MPoly.linear(m.rows[i], offset[i], new_vars)
    renamed = {v: MPoly.variable("__p" + v) for v in form.chart_vars}
    coeff = form.coeff.substitute(renamed)
    coeff = coeff.substitute({"__p" + v: subs[v] for v in form.chart_vars})
    jac = det(m)
    return type(form)(new_vars, coeff * jac)
