"""Exact algebraic substrate.

Rational scalars are :class:`fractions.Fraction`. Polynomials are sparse maps
from exponent tuples to nonzero rational coefficients over an ordered list
of named variables. Rational functions are kept with an explicitly factored
denominator; there is no multivariate gcd, only exact division against the
known factors.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Rational
from types import MappingProxyType
from typing import NamedTuple, Sequence

from . import kernels
from .errors import DimensionMismatch, ParseError, ZeroPolynomial

Rat = Fraction

__all__ = [
    "Rat", "parse_rat", "format_rat", "MPoly", "FactoredRatFn", "RatMatrix",
    "poly_arith", "exact_div", "nullspace", "rank", "det", "solve",
    "rational_roots", "RationalRoots", "univariate_gcd", "univariate_divmod",
    "parse_poly", "parse_ratfn",
]


def parse_rat(value) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string to a Fraction.

    Floats are rejected: the core never touches floating point.
    """
    if isinstance(value, bool):
        raise ParseError(f"not a rational number: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, str):
        s = value.strip()
        if re.fullmatch(r"[+-]?\d+(\s*/\s*[+-]?\d+)?", s):
            try:
                return Fraction(s.replace(" ", ""))
            except ZeroDivisionError:
                raise ParseError(f"zero denominator in {value!r}") from None
    raise ParseError(f"not a rational number: {value!r}")


def format_rat(q) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def _grlex_key(e):
    return (sum(e), e)


def _print_key(e):
    # constant first, then by degree; within a degree earlier variables first
    return (sum(e), tuple(-x for x in e))


class MPoly:
    """Sparse multivariate polynomial with rational coefficients.

    Instances are immutable. Binary operations align variable lists by name;
    the result's variables are the left operand's followed by any new names
    of the right operand.
    """

    __slots__ = ("_vars", "_terms", "_hash")

    def __init__(self, terms=None, variables: Sequence[str] = ()):
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise DimensionMismatch(f"repeated variable in {variables}")
        n = len(variables)
        clean = {}
        if terms:
            for e, c in dict(terms).items():
                e = tuple(int(x) for x in e)
                if len(e) != n:
                    raise DimensionMismatch(
                        f"exponent {e} does not match variables {variables}")
                if any(x < 0 for x in e):
                    raise ValueError(f"negative exponent {e}")
                c = parse_rat(c)
                if c:
                    clean[e] = clean.get(e, 0) + c
            clean = {e: c for e, c in clean.items() if c}
        self._vars = variables
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms, variables):
        p = object.__new__(cls)
        p._vars = variables
        p._terms = terms
        p._hash = None
        return p

    # -- constructors -----------------------------------------------------
    @classmethod
    def constant(cls, c, variables: Sequence[str] = ()):
        variables = tuple(variables)
        c = parse_rat(c)
        return cls._raw({(0,) * len(variables): c} if c else {}, variables)

    @classmethod
    def variable(cls, name: str, variables: Sequence[str] | None = None):
        variables = tuple(variables) if variables is not None else (name,)
        if name not in variables:
            variables = variables + (name,)
        e = tuple(1 if v == name else 0 for v in variables)
        return cls._raw({e: Fraction(1)}, variables)

    @classmethod
    def parse(cls, text: str, variables: Sequence[str] | None = None):
        return parse_poly(text, variables)

    @classmethod
    def from_dense(cls, coeffs, var: str):
        """Univariate polynomial from coefficients listed low degree first."""
        return cls._raw({(i,): Fraction(c) for i, c in enumerate(coeffs) if c}, (var,))

    @classmethod
    def linear(cls, coeffs, const, variables: Sequence[str]):
        """``sum(coeffs[i]*variables[i]) + const``."""
        variables = tuple(variables)
        n = len(variables)
        if len(coeffs) != n:
            raise DimensionMismatch("coefficient count does not match variables")
        terms = {}
        for i, c in enumerate(coeffs):
            c = parse_rat(c)
            if c:
                terms[tuple(1 if j == i else 0 for j in range(n))] = c
        const = parse_rat(const)
        if const:
            terms[(0,) * n] = const
        return cls._raw(terms, variables)

    # -- accessors --------------------------------------------------------
    @property
    def variables(self) -> tuple:
        return self._vars

    @property
    def terms(self):
        return MappingProxyType(self._terms)

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * len(self._vars), Fraction(0))

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def degree(self, var: str) -> int:
        if var not in self._vars:
            return 0 if self._terms else -1
        i = self._vars.index(var)
        return max((e[i] for e in self._terms), default=-1)

    def used_variables(self) -> tuple:
        used = [False] * len(self._vars)
        for e in self._terms:
            for i, x in enumerate(e):
                if x:
                    used[i] = True
        return tuple(v for v, u in zip(self._vars, used) if u)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self._terms}) <= 1

    def leading_term(self):
        """(exponent, coefficient) of the grlex-largest term."""
        if not self._terms:
            raise ZeroPolynomial("zero polynomial has no leading term")
        e = max(self._terms, key=_grlex_key)
        return e, self._terms[e]

    # -- variable bookkeeping --------------------------------------------
    def with_variables(self, variables: Sequence[str]) -> "MPoly":
        """Re-express over ``variables``, which must contain every used one."""
        variables = tuple(variables)
        if variables == self._vars:
            return self
        idx = {v: i for i, v in enumerate(variables)}
        n = len(variables)
        out = {}
        for e, c in self._terms.items():
            ne = [0] * n
            for v, x in zip(self._vars, e):
                if x:
                    if v not in idx:
                        raise DimensionMismatch(f"variable {v!r} is used but dropped")
                    ne[idx[v]] = x
            out[tuple(ne)] = c
        return MPoly._raw(out, variables)

    def _align(self, other: "MPoly"):
        if self._vars == other._vars:
            return self._vars, self._terms, other._terms
        extra = tuple(v for v in other._vars if v not in self._vars)
        variables = self._vars + extra
        return (variables, self.with_variables(variables)._terms,
                other.with_variables(variables)._terms)

    def _coerce(self, other):
        if isinstance(other, MPoly):
            return other
        if isinstance(other, (int, Fraction, Rational)) and not isinstance(other, bool):
            return MPoly.constant(other, self._vars)
        return None

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        vs, a, b = self._align(o)
        return MPoly._raw(kernels.add_terms(a, b, 1), vs)

    def __radd__(self, other):
        return self.__add__(other)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        vs, a, b = self._align(o)
        return MPoly._raw(kernels.add_terms(a, b, -1), vs)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return MPoly._raw({e: -c for e, c in self._terms.items()}, self._vars)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if not other:
                return MPoly._raw({}, self._vars)
            return MPoly._raw({e: c * other for e, c in self._terms.items()}, self._vars)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        vs, a, b = self._align(o)
        return MPoly._raw(kernels.mul_terms(a, b), vs)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        if isinstance(other, MPoly):
            if not other.is_constant():
                raise TypeError("use exact_div or FactoredRatFn for polynomial division")
            other = other.constant_term()
        other = parse_rat(other)
        if not other:
            raise ZeroDivisionError("division of polynomial by zero")
        return self * (1 / other)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("polynomial exponent must be a nonnegative int")
        result = MPoly.constant(1, self._vars)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, MPoly):
            if self._vars == other._vars:
                return self._terms == other._terms
            _, a, b = self._align(other)
            return a == b
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self == o

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(
                (tuple((v, x) for v, x in zip(self._vars, e) if x), c)
                for e, c in self._terms.items()))
        return self._hash

    # -- evaluation and substitution ---------------------------------------
    def evaluate(self, point) -> Fraction:
        """Value at a point given as a mapping or a sequence in variable order."""
        if isinstance(point, dict):
            vals = []
            for v in self._vars:
                if v in point:
                    vals.append(parse_rat(point[v]))
                else:
                    vals.append(None)
        else:
            vals = [parse_rat(x) for x in point]
            if len(vals) != len(self._vars):
                raise DimensionMismatch("point dimension does not match variables")
        total = Fraction(0)
        for e, c in self._terms.items():
            t = c
            for x, val in zip(e, vals):
                if x:
                    if val is None:
                        raise DimensionMismatch("point leaves a used variable unset")
                    t *= val ** x
            total += t
        return total

    __call__ = evaluate

    def substitute(self, mapping) -> "MPoly":
        """Replace variables by polynomials or numbers.

        Variables not in ``mapping`` are kept. The result's variable list is
        the kept variables followed by those of the substituted values.
        """
        keep = tuple(v for v in self._vars if v not in mapping)
        values = {}
        result_vars = keep
        for v in self._vars:
            if v in mapping:
                val = mapping[v]
                if not isinstance(val, MPoly):
                    val = MPoly.constant(val)
                values[v] = val
                result_vars = result_vars + tuple(
                    w for w in val._vars if w not in result_vars)
        for v in values:
            values[v] = values[v].with_variables(result_vars)
        keep_idx = [result_vars.index(v) for v in keep]
        n = len(result_vars)
        powers = {}

        def power(v, k):
            key = (v, k)
            if key not in powers:
                powers[key] = values[v] ** k
            return powers[key]

        acc = {}
        for e, c in self._terms.items():
            mono = [0] * n
            subs = []
            for v, x in zip(self._vars, e):
                if not x:
                    continue
                if v in values:
                    subs.append(power(v, x))
                else:
                    mono[keep_idx[keep.index(v)]] += x
            term = {tuple(mono): c}
            for s in subs:
                term = kernels.mul_terms(term, s._terms)
            acc = kernels.add_terms(acc, term, 1)
        return MPoly._raw(acc, result_vars)

    def diff(self, var: str) -> "MPoly":
        if var not in self._vars:
            return MPoly._raw({}, self._vars)
        i = self._vars.index(var)
        out = {}
        for e, c in self._terms.items():
            if e[i]:
                ne = e[:i] + (e[i] - 1,) + e[i + 1:]
                out[ne] = c * e[i]
        return MPoly._raw(out, self._vars)

    def homogenize(self, var: str, degree: int | None = None) -> "MPoly":
        """Homogenize with ``var`` to ``degree`` (default: total degree)."""
        d = self.total_degree() if degree is None else degree
        if self._terms and d < self.total_degree():
            raise ValueError("target degree below total degree")
        p = self if var in self._vars else self.with_variables(self._vars + (var,))
        i = p._vars.index(var)
        out = {}
        for e, c in p._terms.items():
            ne = list(e)
            ne[i] += d - sum(e)
            out[tuple(ne)] = c
        return MPoly._raw(out, p._vars)

    def coefficients_in(self, var: str) -> dict:
        """Map power of ``var`` to the coefficient polynomial (without ``var``)."""
        if var not in self._vars:
            return {0: self} if self._terms else {}
        i = self._vars.index(var)
        rest = self._vars[:i] + self._vars[i + 1:]
        groups = {}
        for e, c in self._terms.items():
            groups.setdefault(e[i], {})[e[:i] + e[i + 1:]] = c
        return {k: MPoly._raw(t, rest) for k, t in groups.items()}

    def dense(self, var: str | None = None) -> list:
        """Univariate coefficient list, low degree first."""
        used = self.used_variables()
        if var is None:
            if len(used) > 1:
                raise DimensionMismatch(f"not univariate: uses {used}")
            var = used[0] if used else (self._vars[0] if self._vars else "t")
        elif any(v != var for v in used):
            raise DimensionMismatch(f"not univariate in {var}: uses {used}")
        if not self._terms:
            return []
        i = self._vars.index(var) if var in self._vars else None
        deg = self.total_degree()
        out = [Fraction(0)] * (deg + 1)
        for e, c in self._terms.items():
            out[e[i] if i is not None else 0] = c
        return out

    def content(self) -> Fraction:
        """Positive rational c such that self/c has coprime integer coefficients."""
        if not self._terms:
            return Fraction(0)
        num = 0
        den = 1
        for c in self._terms.values():
            num = math.gcd(num, c.numerator)
            den = _lcm(den, c.denominator)
        return Fraction(num, den)

    def primitive(self) -> "MPoly":
        """Integer coefficients with gcd 1 and positive grlex leading coefficient."""
        if not self._terms:
            return self
        c = self.content()
        if self.leading_term()[1] < 0:
            c = -c
        return self * (1 / c)

    def monic(self) -> "MPoly":
        lc = self.leading_term()[1]
        return self * (1 / lc)

    def factor_key(self):
        """Hashable key identifying the polynomial up to a nonzero scalar."""
        if not self._terms:
            return None
        lc = self.leading_term()[1]
        return frozenset(
            (tuple((v, x) for v, x in zip(self._vars, e) if x), c / lc)
            for e, c in self._terms.items())

    def proportionality(self, other: "MPoly"):
        """Return lam with self == lam*other, or None."""
        if self.factor_key() != other.factor_key():
            return None
        return self.leading_term()[1] / other.leading_term()[1]

    # -- printing ------------------------------------------------------------
    def sorted_terms(self):
        return sorted(self._terms.items(), key=lambda t: _print_key(t[0]))

    def _monomial_text(self, e, mul="*", latex=False):
        parts = []
        for v, x in zip(self._vars, e):
            if x == 1:
                parts.append(v)
            elif x:
                parts.append(f"{v}^{{{x}}}" if latex and x > 9 else f"{v}^{x}")
        return mul.join(parts)

    def to_text(self) -> str:
        if not self._terms:
            return "0"
        out = []
        for k, (e, c) in enumerate(self.sorted_terms()):
            mono = self._monomial_text(e)
            a = abs(c)
            if mono:
                body = mono if a == 1 else f"{format_rat(a)}*{mono}"
            else:
                body = format_rat(a)
            if k == 0:
                out.append(("-" if c < 0 else "") + body)
            else:
                out.append((" - " if c < 0 else " + ") + body)
        return "".join(out)

    def to_latex(self) -> str:
        if not self._terms:
            return "0"
        out = []
        for k, (e, c) in enumerate(self.sorted_terms()):
            mono = self._latex_monomial(e)
            a = abs(c)
            if a.denominator != 1:
                coeff = f"\\frac{{{a.numerator}}}{{{a.denominator}}}"
            else:
                coeff = str(a.numerator)
            body = (mono if a == 1 else coeff + mono) if mono else coeff
            if k == 0:
                out.append(("-" if c < 0 else "") + body)
            else:
                out.append(("-" if c < 0 else "+") + body)
        return "".join(out)

    def _latex_monomial(self, e):
        parts = []
        for v, x in zip(self._vars, e):
            name = _latex_var(v)
            if x == 1:
                parts.append(name)
            elif x:
                parts.append(f"{name}^{{{x}}}")
        return "".join(parts)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"MPoly({self.to_text()!r}, variables={self._vars})"


def _latex_var(v: str) -> str:
    m = re.fullmatch(r"([A-Za-z]+)(\d+)", v)
    if m:
        return f"{m.group(1)}_{{{m.group(2)}}}"
    return v


def poly_arith(a: MPoly, b: MPoly, op: str) -> MPoly:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def exact_div(a: MPoly, b: MPoly):
    """Return q with a == q*b, or None when b does not divide a.

    Uses grlex division: if b divides the running remainder, the leading
    term of b divides its leading term, so a failed monomial division
    certifies non-divisibility.
    """
    if b.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    vs, rem, bt = a._align(b)
    if not rem:
        return MPoly._raw({}, vs)
    be = max(bt, key=_grlex_key)
    bc = bt[be]
    if len(bt) == 1:
        out = {}
        for e, c in rem.items():
            q = tuple(x - y for x, y in zip(e, be))
            if min(q) < 0:
                return None
            out[q] = c / bc
        return MPoly._raw(out, vs)
    quot = {}
    rem = dict(rem)
    bdeg = sum(be)
    while rem:
        e = max(rem, key=_grlex_key)
        if sum(e) < bdeg:
            return None
        q = tuple(x - y for x, y in zip(e, be))
        if min(q) < 0:
            return None
        qc = rem[e] / bc
        quot[q] = qc
        step = {tuple(x + y for x, y in zip(q, f)): -qc * c for f, c in bt.items()}
        rem = kernels.add_terms(rem, step, 1)
    return MPoly._raw(quot, vs)


# ---------------------------------------------------------------------------
# Factored rational functions
# ---------------------------------------------------------------------------

def _as_poly(x, variables=()):
    if isinstance(x, MPoly):
        return x
    return MPoly.constant(x, variables)


class FactoredRatFn:
    """``numerator / prod(factor**exponent)`` with known denominator factors.

    On construction constant factors are absorbed into the numerator,
    proportional factors are merged, and every factor dividing the numerator
    exactly is cancelled.
    """

    __slots__ = ("numerator", "factors")

    def __init__(self, numerator, factors=(), *, normalize=True):
        num = _as_poly(numerator)
        facs = [(f if isinstance(f, MPoly) else MPoly.constant(f), int(e))
                for f, e in factors]
        if not normalize:
            self.numerator = num
            self.factors = tuple(facs)
            return
        merged = []  # [key, rep, exp]
        index = {}
        for f, e in facs:
            if e < 0:
                raise ValueError("negative exponent in denominator factor")
            if e == 0:
                continue
            if f.is_zero():
                raise ZeroDivisionError("zero denominator factor")
            if f.is_constant():
                num = num * (1 / f.constant_term() ** e)
                continue
            key = f.factor_key()
            if key in index:
                slot = merged[index[key]]
                lam = f.leading_term()[1] / slot[1].leading_term()[1]
                num = num * (1 / lam ** e)
                slot[2] += e
            else:
                index[key] = len(merged)
                merged.append([key, f, e])
        out = []
        if num.is_zero():
            merged = []
        for _, f, e in merged:
            while e and not num.is_constant():
                q = exact_div(num, f)
                if q is None:
                    break
                num = q
                e -= 1
            if e:
                out.append((f, e))
        self.numerator = num
        self.factors = tuple(out)

    @classmethod
    def from_poly(cls, p):
        return cls(p, ())

    @property
    def variables(self) -> tuple:
        vs = self.numerator.variables
        for f, _ in self.factors:
            vs = vs + tuple(v for v in f.variables if v not in vs)
        return vs

    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def is_polynomial(self) -> bool:
        return not self.factors

    def denominator(self) -> MPoly:
        d = MPoly.constant(1, self.numerator.variables)
        for f, e in self.factors:
            d = d * f ** e
        return d

    def factor_exponent(self, f: MPoly) -> int:
        key = f.factor_key()
        for g, e in self.factors:
            if g.factor_key() == key:
                return e
        return 0

    # -- arithmetic --------------------------------------------------------
    @staticmethod
    def _coerce(x):
        if isinstance(x, FactoredRatFn):
            return x
        if isinstance(x, MPoly):
            return FactoredRatFn(x)
        if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
            return FactoredRatFn(MPoly.constant(x))
        return None

    def _rebase(self, reps):
        """Express factors via representatives in ``reps`` (key -> poly)."""
        num = self.numerator
        facs = {}
        for f, e in self.factors:
            key = f.factor_key()
            if key in reps:
                rep = reps[key]
                lam = f.leading_term()[1] / rep.leading_term()[1]
                if lam != 1:
                    num = num * (1 / lam ** e)
            else:
                reps[key] = f
            facs[key] = facs.get(key, 0) + e
        return num, facs

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.is_zero():
            return o
        if o.is_zero():
            return self
        reps = {}
        na, fa = self._rebase(reps)
        nb, fb = o._rebase(reps)
        keys = list(fa) + [k for k in fb if k not in fa]
        exps = {k: max(fa.get(k, 0), fb.get(k, 0)) for k in keys}
        ta, tb = na, nb
        for k in keys:
            da = exps[k] - fa.get(k, 0)
            db = exps[k] - fb.get(k, 0)
            if da:
                ta = ta * reps[k] ** da
            if db:
                tb = tb * reps[k] ** db
        return FactoredRatFn(ta + tb, [(reps[k], exps[k]) for k in keys])

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        return FactoredRatFn(-self.numerator, self.factors, normalize=False)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return FactoredRatFn(self.numerator * other, self.factors, normalize=False) \
                if other else FactoredRatFn(MPoly.constant(0, self.numerator.variables))
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FactoredRatFn(self.numerator * o.numerator, self.factors + o.factors)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self * (1 / Fraction(other))
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return FactoredRatFn(self.numerator * o.denominator(),
                             self.factors + ((o.numerator, 1),))

    def __pow__(self, k: int):
        if k < 0:
            return FactoredRatFn(1) / self ** (-k)
        return FactoredRatFn(self.numerator ** k, [(f, e * k) for f, e in self.factors])

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.numerator * o.denominator() == o.numerator * self.denominator()

    __hash__ = None

    # -- evaluation --------------------------------------------------------
    def evaluate(self, point) -> Fraction:
        num = self.numerator.evaluate(point) if isinstance(point, dict) else \
            self.numerator.with_variables(self.variables).evaluate(point)
        den = Fraction(1)
        for f, e in self.factors:
            val = f.evaluate(point) if isinstance(point, dict) else \
                f.with_variables(self.variables).evaluate(point)
            den *= val ** e
        if not den:
            raise ZeroDivisionError("evaluation at a pole")
        return num / den

    def substitute(self, mapping) -> "FactoredRatFn":
        """Substitute polynomials for variables in numerator and every factor."""
        num = self.numerator.substitute(mapping)
        facs = []
        for f, e in self.factors:
            g = f.substitute(mapping)
            if g.is_zero():
                raise ZeroDivisionError(
                    f"factor {f} vanishes identically under the substitution")
            facs.append((g, e))
        return FactoredRatFn(num, facs)

    def split(self, f: MPoly):
        """Return ``(k, rest)`` with self == rest / f**k and f absent from rest."""
        if f.is_constant():
            raise ValueError("cannot split off a constant")
        num = self.numerator
        k_num = 0
        while not num.is_zero():
            q = exact_div(num, f)
            if q is None:
                break
            num = q
            k_num += 1
        k_den = 0
        facs = []
        for g, e in self.factors:
            m = 0
            while True:
                q = exact_div(g, f)
                if q is None:
                    break
                g = q
                m += 1
            k_den += m * e
            if not g.is_constant() or g.constant_term() != 1:
                facs.append((g, e))
        if num.is_zero():
            return 0, FactoredRatFn(num)
        return k_den - k_num, FactoredRatFn(num, facs)

    def order_of(self, f: MPoly) -> int:
        """Pole order along f (negative for a zero)."""
        return self.split(f)[0]

    # -- printing ----------------------------------------------------------
    def to_text(self) -> str:
        num = self.numerator
        ntxt = num.to_text()
        if not self.factors:
            return ntxt
        if len(num) > 1:
            ntxt = f"({ntxt})"
        parts = []
        for f, e in self.factors:
            t = f.to_text()
            if len(f) > 1 or (len(f) == 1 and (f.terms[f.leading_term()[0]] != 1
                                               or sum(f.leading_term()[0]) > 1)):
                t = f"({t})"
            parts.append(t if e == 1 else f"{t}^{e}")
        den = "*".join(parts)
        if len(parts) > 1:
            den = f"({den})"
        return f"{ntxt}/{den}"

    def to_latex(self) -> str:
        ntxt = self.numerator.to_latex()
        if not self.factors:
            return ntxt
        parts = []
        for f, e in self.factors:
            t = f.to_latex()
            if len(f) > 1:
                t = f"({t})"
            parts.append(t if e == 1 else f"{t}^{{{e}}}")
        return f"\\frac{{{ntxt}}}{{{''.join(parts)}}}"

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"FactoredRatFn({self.to_text()!r})"


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character at {pos} in {text!r}")
        num, name, op = m.groups()
        if num is not None:
            out.append(("num", int(num)))
        elif name is not None:
            out.append(("var", name))
        else:
            out.append(("op", "^" if op == "**" else op))
        pos = m.end()
    return out


class _Prod:
    """Parse value: const * prod(num_factors) / prod(den_factors)."""

    __slots__ = ("const", "num", "den")

    def __init__(self, const, num=(), den=()):
        self.const = Fraction(const)
        self.num = list(num)
        self.den = list(den)

    def to_ratfn(self, variables):
        n = MPoly.constant(self.const, variables)
        for f, e in self.num:
            n = n * f ** e
        return FactoredRatFn(n, self.den)

    @classmethod
    def from_ratfn(cls, r):
        return cls(1, [(r.numerator, 1)], list(r.factors))


class _Parser:
    def __init__(self, text, variables):
        self.text = text
        self.toks = _tokenize(text)
        names = list(variables or ())
        for kind, val in self.toks:
            if kind == "var" and val not in names:
                names.append(val)
        self.vars = tuple(names)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def expect(self, op):
        t = self.take()
        if t != ("op", op):
            raise ParseError(f"expected {op!r} in {self.text!r}")

    def parse(self):
        if not self.toks:
            raise ParseError("empty expression")
        v = self.expr()
        if self.i != len(self.toks):
            raise ParseError(f"trailing input in {self.text!r}")
        return v

    def expr(self):
        sign = 1
        if self.peek() in (("op", "+"), ("op", "-")):
            sign = -1 if self.take()[1] == "-" else 1
        acc = self.term()
        if sign < 0:
            acc.const = -acc.const
        pieces = [acc]
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            t = self.term()
            if op == "-":
                t.const = -t.const
            pieces.append(t)
        if len(pieces) == 1:
            return pieces[0]
        total = FactoredRatFn(MPoly.constant(0, self.vars))
        for p in pieces:
            total = total + p.to_ratfn(self.vars)
        return _Prod.from_ratfn(total)

    def term(self):
        acc = self.factor()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            f = self.factor()
            if op == "*":
                acc = _Prod(acc.const * f.const, acc.num + f.num, acc.den + f.den)
            else:
                if f.const == 0 and not f.num:
                    raise ParseError(f"division by zero in {self.text!r}")
                acc = _Prod(acc.const / f.const, acc.num + f.den, acc.den + f.num)
        return acc

    def factor(self):
        if self.peek() == ("op", "-"):
            self.take()
            f = self.factor()
            f.const = -f.const
            return f
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            if self.peek() == ("op", "+"):
                self.take()
            kind, k = self.take()
            if kind != "num":
                raise ParseError(f"exponent must be a nonnegative integer in {self.text!r}")
            return _Prod(base.const ** k, [(f, e * k) for f, e in base.num],
                         [(f, e * k) for f, e in base.den])
        return base

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return _Prod(val)
        if kind == "var":
            return _Prod(1, [(MPoly.variable(val, self.vars), 1)])
        if (kind, val) == ("op", "("):
            v = self.expr()
            self.expect(")")
            return v
        raise ParseError(f"unexpected token {val!r} in {self.text!r}")


def parse_ratfn(text: str, variables: Sequence[str] | None = None) -> FactoredRatFn:
    """Parse a rational expression; products in denominators stay factored."""
    p = _Parser(text, variables)
    return p.parse().to_ratfn(p.vars)


def parse_poly(text: str, variables: Sequence[str] | None = None) -> MPoly:
    """Parse a polynomial in the ``+ - * ^`` grammar with ``p/q`` coefficients."""
    p = _Parser(text, variables)
    r = p.parse().to_ratfn(p.vars)
    if r.factors:
        raise ParseError(f"not a polynomial: {text!r}")
    return r.numerator.with_variables(p.vars)


# ---------------------------------------------------------------------------
# Exact linear algebra
# ---------------------------------------------------------------------------

class RatMatrix:
    """Dense rectangular matrix of Fractions."""

    __slots__ = ("rows", "ncols")

    def __init__(self, rows, ncols: int | None = None):
        rows = tuple(tuple(parse_rat(x) for x in r) for r in rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise DimensionMismatch("ragged matrix")
        self.rows = rows
        self.ncols = ncols

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def row(self, i):
        return self.rows[i]

    def submatrix(self, row_indices):
        return RatMatrix([self.rows[i] for i in row_indices], self.ncols)

    def transpose(self):
        return RatMatrix([tuple(r[j] for r in self.rows) for j in range(self.ncols)],
                         self.nrows)

    def __matmul__(self, vec):
        if isinstance(vec, RatMatrix):
            cols = vec.transpose().rows
            return RatMatrix([[sum(a * b for a, b in zip(r, c)) for c in cols]
                              for r in self.rows], vec.ncols)
        vec = [parse_rat(x) for x in vec]
        if len(vec) != self.ncols:
            raise DimensionMismatch("vector length does not match matrix")
        return [sum((a * b for a, b in zip(r, vec)), Fraction(0)) for r in self.rows]

    def __eq__(self, other):
        return isinstance(other, RatMatrix) and self.rows == other.rows and \
            self.ncols == other.ncols

    __hash__ = None

    def rank(self) -> int:
        return rank(self)

    def nullspace(self):
        return nullspace(self)

    def det(self) -> Fraction:
        return det(self)

    def __repr__(self):
        return f"RatMatrix({[[format_rat(x) for x in r] for r in self.rows]})"


def _as_matrix(m) -> RatMatrix:
    return m if isinstance(m, RatMatrix) else RatMatrix(m)


def _integer_rows(rows):
    """Scale each row to coprime-free integers; returns (int_rows, scales)."""
    out = []
    scales = []
    for r in rows:
        s = 1
        for x in r:
            s = _lcm(s, x.denominator)
        out.append([int(x * s) for x in r])
        scales.append(s)
    return out, scales


def _echelon(m: RatMatrix):
    rows, scales = _integer_rows(m.rows)
    pivots, swaps = kernels.bareiss_echelon(rows, m.ncols)
    return rows, pivots, swaps, scales


def rank(m) -> int:
    m = _as_matrix(m)
    if not m.nrows or not m.ncols:
        return 0
    return len(_echelon(m)[1])


def det(m) -> Fraction:
    m = _as_matrix(m)
    n = m.nrows
    if n != m.ncols:
        raise DimensionMismatch("determinant of a non-square matrix")
    if n == 0:
        return Fraction(1)
    rows, pivots, swaps, scales = _echelon(m)
    if len(pivots) < n:
        return Fraction(0)
    d = Fraction(rows[n - 1][n - 1])
    if swaps % 2:
        d = -d
    for s in scales:
        d /= s
    return d


def _back_substitute(rows, pivots, ncols, free_values, rhs=None):
    x = [Fraction(0)] * ncols
    for j, v in free_values.items():
        x[j] = Fraction(v)
    for k in range(len(pivots) - 1, -1, -1):
        pc = pivots[k]
        r = rows[k]
        s = Fraction(rhs[k]) if rhs is not None else Fraction(0)
        for j in range(pc + 1, ncols):
            if r[j]:
                s -= r[j] * x[j]
        x[pc] = s / r[pc]
    return x


def nullspace(m) -> list:
    """Exact basis of the right kernel; each vector has a 1 in its free slot."""
    m = _as_matrix(m)
    n = m.ncols
    if m.nrows == 0:
        return [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    rows, pivots, _, _ = _echelon(m)
    free = [j for j in range(n) if j not in set(pivots)]
    basis = []
    for f in free:
        basis.append(_back_substitute(rows, pivots, n, {f: 1}))
    return basis


def solve(m, rhs):
    """One solution of m x = rhs (free variables set to 0), or None."""
    m = _as_matrix(m)
    rhs = [parse_rat(x) for x in rhs]
    if len(rhs) != m.nrows:
        raise DimensionMismatch("right-hand side length does not match rows")
    aug = RatMatrix([r + (b,) for r, b in zip(m.rows, rhs)], m.ncols + 1)
    rows, pivots, _, _ = _echelon(aug)
    if pivots and pivots[-1] == m.ncols:
        return None
    rhs_col = [r[m.ncols] for r in rows]
    core = [r[:m.ncols] for r in rows]
    return _back_substitute(core, pivots, m.ncols, {}, rhs_col)


# ---------------------------------------------------------------------------
# Univariate helpers
# ---------------------------------------------------------------------------

def _trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def _udivmod(a, b):
    a = _trim(a)
    b = _trim(b)
    if not b:
        raise ZeroDivisionError("univariate division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    r = [Fraction(x) for x in a]
    lb = b[-1]
    while len(r) >= len(b) and r:
        k = len(r) - len(b)
        c = r[-1] / lb
        q[k] = c
        for i, bc in enumerate(b):
            r[i + k] -= c * bc
        r = _trim(r)
    return q, r


def _ugcd(a, b):
    a = _trim(a)
    b = _trim(b)
    while b:
        _, r = _udivmod(a, b)
        a, b = b, r
    if not a:
        return []
    lc = a[-1]
    return [x / lc for x in a]


def _univariate_var(*polys):
    used = set()
    for p in polys:
        used.update(p.used_variables())
    if len(used) > 1:
        raise DimensionMismatch(f"not univariate: uses {sorted(used)}")
    if used:
        return used.pop()
    for p in polys:
        if p.variables:
            return p.variables[0]
    return "t"


def univariate_divmod(a: MPoly, b: MPoly):
    var = _univariate_var(a, b)
    q, r = _udivmod(a.dense(var), b.dense(var))
    return MPoly.from_dense(q, var), MPoly.from_dense(r, var)


def univariate_gcd(a: MPoly, b: MPoly) -> MPoly:
    """Monic gcd of two univariate polynomials (zero if both are zero)."""
    var = _univariate_var(a, b)
    return MPoly.from_dense(_ugcd(a.dense(var), b.dense(var)), var)


def _divisors(n: int):
    n = abs(n)
    small, large = [], []
    i = 1
    while i * i <= n:
        if n % i == 0:
            small.append(i)
            if i * i != n:
                large.append(n // i)
        i += 1
    return small + large[::-1]


class RationalRoots(NamedTuple):
    roots: list
    cofactor: MPoly

    @property
    def cofactor_degree(self) -> int:
        return self.cofactor.total_degree()


def _integer_dense(coeffs):
    s = 1
    for c in coeffs:
        s = _lcm(s, Fraction(c).denominator)
    ints = [int(Fraction(c) * s) for c in coeffs]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    return [x // g for x in ints] if g else ints


def _int_poly_div_linear(c, p, q):
    """Divide integer poly c (low first) by (q t - p); return quotient or None."""
    n = len(c) - 1
    out = [0] * n
    rem = c[n]
    for k in range(n - 1, -1, -1):
        if rem % q:
            return None
        out[k] = rem // q
        rem = c[k] + out[k] * p
    if rem != 0:
        return None
    return out


def rational_roots(p: MPoly) -> RationalRoots:
    """All rational roots with multiplicity, plus the root-free cofactor."""
    if p.is_zero():
        raise ZeroPolynomial("rational_roots of the zero polynomial")
    var = _univariate_var(p)
    c = _integer_dense(p.dense(var))
    roots = []
    k = 0
    while c[k] == 0:
        k += 1
    if k:
        roots.append((Fraction(0), k))
        c = c[k:]
    if len(c) > 1:
        lead_divs = _divisors(c[-1])
        cand = set()
        for a in _divisors(c[0]):
            for b in lead_divs:
                cand.add(Fraction(a, b))
                cand.add(Fraction(-a, b))
        for r in sorted(cand):
            if len(c) == 1:
                break
            m = 0
            while len(c) > 1:
                q = _int_poly_div_linear(c, r.numerator, r.denominator)
                if q is None:
                    break
                c = q
                m += 1
            if m:
                roots.append((r, m))
    roots.sort()
    cof = MPoly.from_dense(c, var)
    return RationalRoots(roots, cof.primitive())
