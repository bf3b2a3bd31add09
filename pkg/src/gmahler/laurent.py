"""Sparse Laurent polynomials in several complex variables.

A :class:`LaurentPoly` maps integer exponent vectors to complex coefficients.
It is immutable and hashable, so it can key caches and be shared freely between
threads.  The text format accepted by :func:`parse` and produced by ``str()``
looks like ``x + x^-1 + y + y^-1 + 4``; the two round-trip exactly.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DegeneracyError, DomainError, UsageError

#: Largest absolute exponent accepted per variable (exponents fit in int16).
EXP_CAP = 30000

Exponent = tuple[int, ...]


def default_names(n_vars: int) -> tuple[str, ...]:
    if n_vars <= 3:
        return ("x", "y", "z")[:n_vars]
    return tuple(f"x{k + 1}" for k in range(n_vars))


class LaurentPoly:
    """Immutable sparse Laurent polynomial with complex coefficients.

    Parameters
    ----------
    terms : mapping
        Exponent vector -> coefficient.  Exact zeros are dropped.
    n_vars : int, optional
        Number of variables; inferred from the keys when omitted.  ``0`` is
        allowed and denotes a constant (it appears as the coefficient ring of
        one-variable factorizations).
    """

    __slots__ = ("_terms", "_n", "_hash")

    def __init__(self, terms: Mapping[Sequence[int], complex] | None = None, n_vars: int | None = None):
        terms = terms or {}
        if n_vars is None:
            if not terms:
                raise UsageError("n_vars is required for the zero polynomial")
            n_vars = len(next(iter(terms)))
        if n_vars < 0:
            raise UsageError("n_vars must be non-negative")
        clean: dict[Exponent, complex] = {}
        for exp, coeff in terms.items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != n_vars:
                raise UsageError(f"exponent {exp} does not have length {n_vars}")
            if any(abs(e) > EXP_CAP for e in exp):
                raise UsageError(f"exponent {exp} exceeds the cap {EXP_CAP}")
            coeff = complex(coeff)
            if coeff != 0:
                clean[exp] = clean.get(exp, 0j) + coeff
                if clean[exp] == 0:
                    del clean[exp]
        self._terms = MappingProxyType(clean)
        self._n = n_vars
        self._hash = None

    # -- construction helpers -------------------------------------------------

    @classmethod
    def constant(cls, value: complex, n_vars: int) -> "LaurentPoly":
        return cls({(0,) * n_vars: value}, n_vars)

    @classmethod
    def monomial(cls, exponent: Sequence[int], coeff: complex = 1.0) -> "LaurentPoly":
        return cls({tuple(exponent): coeff}, len(exponent))

    @classmethod
    def variable(cls, index: int, n_vars: int) -> "LaurentPoly":
        exp = [0] * n_vars
        exp[index] = 1
        return cls.monomial(exp)

    # -- basic queries ----------------------------------------------------------

    @property
    def n_vars(self) -> int:
        return self._n

    @property
    def terms(self) -> Mapping[Exponent, complex]:
        return self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    def exponent_range(self, var: int) -> tuple[int, int]:
        """Smallest and largest exponent of variable ``var``."""
        if self.is_zero():
            raise DegeneracyError("the zero polynomial has no exponents")
        exps = [e[var] for e in self._terms]
        return min(exps), max(exps)

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Exponents as an ``(T, n)`` int array and coefficients as ``(T,)`` complex."""
        keys = sorted(self._terms)
        exps = np.array(keys, dtype=np.int64).reshape(len(keys), self._n)
        coeffs = np.array([self._terms[k] for k in keys], dtype=np.complex128)
        return exps, coeffs

    def coefficient_abs_sum(self) -> float:
        return math.fsum(abs(c) for c in self._terms.values())

    def sup_bound(self, radii: Sequence[float]) -> float:
        """Upper bound for ``|p|`` on the torus with the given radii."""
        return math.fsum(abs(c) * math.prod(r ** e for r, e in zip(radii, exp)) for exp, c in self._terms.items())

    # -- equality / hashing -----------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, LaurentPoly):
            return self._n == other._n and dict(self._terms) == dict(other._terms)
        if isinstance(other, (int, float, complex)):
            return self == LaurentPoly.constant(other, self._n)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._n, frozenset(self._terms.items())))
        return self._hash

    # -- arithmetic -------------------------------------------------------------

    def _coerce(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            if other._n != self._n:
                raise UsageError(f"cannot combine polynomials in {self._n} and {other._n} variables")
            return other
        if isinstance(other, (int, float, complex, np.number)):
            return LaurentPoly.constant(complex(other), self._n)
        raise TypeError(f"unsupported operand {other!r}")

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        for exp, c in other._terms.items():
            out[exp] = out.get(exp, 0j) + c
        return LaurentPoly(out, self._n)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({e: -c for e, c in self._terms.items()}, self._n)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        return mul(self, self._coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if len(other) != 1:
            raise UsageError("division is only defined by a monomial")
        (exp, c), = other._terms.items()
        return mul(self, LaurentPoly({tuple(-e for e in exp): 1 / c}, self._n))

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, n: int):
        return power(self, n)

    def __call__(self, *point) -> complex:
        """``p(x, y)`` or ``p((x, y))``."""
        if len(point) == 1 and isinstance(point[0], (tuple, list, np.ndarray)):
            point = tuple(point[0])
        return evaluate(self, point)

    # -- text -------------------------------------------------------------------

    def to_string(self, names: Sequence[str] | None = None) -> str:
        return format_poly(self, names)

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"LaurentPoly({format_poly(self)!r}, n_vars={self._n})"


# ---------------------------------------------------------------------------
# Core operations
# ---------------------------------------------------------------------------


def evaluate(p: LaurentPoly, point: Sequence[complex]) -> complex:
    """Value of ``p`` at ``point`` with a correctly rounded sum over terms.

    Raises
    ------
    DomainError
        A coordinate is zero while some term carries a negative power of it.
    """
    point = [complex(z) for z in point]
    if len(point) != p.n_vars:
        raise UsageError(f"expected {p.n_vars} coordinates, got {len(point)}")
    re_parts, im_parts = [], []
    for exp, c in p.terms.items():
        v = c
        for z, e in zip(point, exp):
            if e == 0:
                continue
            if z == 0:
                if e < 0:
                    raise DomainError("zero coordinate with a negative exponent")
                v = 0j
                break
            v *= z ** e
        re_parts.append(v.real)
        im_parts.append(v.imag)
    return complex(math.fsum(re_parts), math.fsum(im_parts))


def mul(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    if p.n_vars != q.n_vars:
        raise UsageError(f"cannot multiply polynomials in {p.n_vars} and {q.n_vars} variables")
    out: dict[Exponent, complex] = {}
    for e1, c1 in p.terms.items():
        for e2, c2 in q.terms.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, 0j) + c1 * c2
    return LaurentPoly(out, p.n_vars)


def power(p: LaurentPoly, n: int) -> LaurentPoly:
    """``p**n`` for a non-negative integer ``n`` by repeated squaring."""
    if n < 0 or int(n) != n:
        raise UsageError("power needs a non-negative integer exponent")
    result = LaurentPoly.constant(1, p.n_vars)
    base = p
    n = int(n)
    while n:
        if n & 1:
            result = mul(result, base)
        n >>= 1
        if n:
            base = mul(base, base)
    return result


def constant_term(p: LaurentPoly) -> complex:
    return p.terms.get((0,) * p.n_vars, 0j)


@dataclass(frozen=True)
class YFactorization:
    """``p = u^-pole_order * (leading*u^degree + constant + sum_j middle[j-1]*u^j)``.

    The coefficients are polynomials in the remaining variables (in their
    original order).
    """

    var: int
    pole_order: int
    degree: int
    leading: LaurentPoly
    constant: LaurentPoly
    middle: tuple[LaurentPoly, ...]

    def coefficients(self) -> list[LaurentPoly]:
        """All coefficients, index ``k`` multiplying ``u^k`` after clearing the pole."""
        return [self.constant, *self.middle, self.leading]

    def reassemble(self) -> LaurentPoly:
        n = self.leading.n_vars + 1
        out: dict[Exponent, complex] = {}
        for k, coeff in enumerate(self.coefficients()):
            for exp, c in coeff.terms.items():
                full = exp[: self.var] + (k - self.pole_order,) + exp[self.var:]
                out[full] = out.get(full, 0j) + c
        return LaurentPoly(out, n)


def factor_in_variable(p: LaurentPoly, var: int) -> YFactorization:
    """View ``p`` as a polynomial in variable ``var`` after clearing its pole at 0."""
    n = p.n_vars
    if not 0 <= var < n:
        raise UsageError(f"variable index {var} out of range for {n} variables")
    if p.is_zero():
        raise DegeneracyError("the zero polynomial has no factorization")
    lo, hi = p.exponent_range(var)
    pole = max(0, -lo)
    degree = hi + pole
    if degree == 0:
        raise DegeneracyError(f"polynomial is constant in variable {var} after clearing its pole")
    buckets: list[dict[Exponent, complex]] = [dict() for _ in range(degree + 1)]
    for exp, c in p.terms.items():
        buckets[exp[var] + pole][exp[:var] + exp[var + 1:]] = c
    coeffs = [LaurentPoly(b, n - 1) for b in buckets]
    return YFactorization(var, pole, degree, coeffs[-1], coeffs[0], tuple(coeffs[1:-1]))


def slice_variable(p: LaurentPoly, var: int, value: complex) -> LaurentPoly:
    """Substitute ``value`` for variable ``var``; the result has ``n_vars - 1`` variables."""
    if not 0 <= var < p.n_vars:
        raise UsageError(f"variable index {var} out of range")
    value = complex(value)
    if value == 0:
        raise DomainError("slice value must be nonzero")
    out: dict[Exponent, complex] = {}
    for exp, c in p.terms.items():
        rest = exp[:var] + exp[var + 1:]
        out[rest] = out.get(rest, 0j) + c * value ** exp[var]
    return LaurentPoly(out, p.n_vars - 1)


def fix_variables(p: LaurentPoly, values: Mapping[int, complex]) -> LaurentPoly:
    """Substitute several variables at once, keeping the remaining ones in order."""
    out = p
    for var in sorted(values, reverse=True):
        out = slice_variable(out, var, values[var])
    return out


def scale_variables(p: LaurentPoly, radii: Sequence[float]) -> LaurentPoly:
    """``p(r1*x1, ..., rn*xn)``."""
    return LaurentPoly(
        {e: c * math.prod(complex(r) ** k for r, k in zip(radii, e)) for e, c in p.terms.items()},
        p.n_vars,
    )


def log_derivative_numerator(p: LaurentPoly, var: int) -> LaurentPoly:
    """``u * dp/du`` for the variable ``u`` with index ``var``."""
    return LaurentPoly({e: c * e[var] for e, c in p.terms.items() if e[var]}, p.n_vars)


def univariate_coefficients(p: LaurentPoly) -> tuple[int, list[complex]]:
    """For a one-variable ``p``: ``(pole_order, [c_0, ..., c_d])`` with ``p = u^-pole * sum c_k u^k``."""
    if p.n_vars != 1:
        raise UsageError("expected a polynomial in one variable")
    if p.is_zero():
        raise DegeneracyError("zero polynomial")
    lo, hi = p.exponent_range(0)
    pole = max(0, -lo)
    coeffs = [0j] * (hi + pole + 1)
    for (e,), c in p.terms.items():
        coeffs[e + pole] = c
    return pole, coeffs


# ---------------------------------------------------------------------------
# Exact arithmetic (Gaussian rationals) for constant-term oracles
# ---------------------------------------------------------------------------

GaussianRational = tuple[Fraction, Fraction]


def _gmul(a: GaussianRational, b: GaussianRational) -> GaussianRational:
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _exact_terms(p: LaurentPoly) -> dict[Exponent, GaussianRational]:
    return {e: (Fraction(c.real), Fraction(c.imag)) for e, c in p.terms.items()}


def _exact_mul(p: dict, q: dict) -> dict:
    out: dict[Exponent, GaussianRational] = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            prod = _gmul(c1, c2)
            acc = out.get(e, (Fraction(0), Fraction(0)))
            out[e] = (acc[0] + prod[0], acc[1] + prod[1])
    return {e: c for e, c in out.items() if c[0] or c[1]}


def exact_constant_term_of_power(p: LaurentPoly, n: int) -> GaussianRational:
    """Constant term of ``p**n`` in exact Gaussian-rational arithmetic.

    Coefficients of ``p`` are converted exactly from their binary floating-point
    values, so integer inputs give integer outputs.
    """
    if n < 0:
        raise UsageError("n must be non-negative")
    zero = (0,) * p.n_vars
    result = {zero: (Fraction(1), Fraction(0))}
    base = _exact_terms(p)
    while n:
        if n & 1:
            result = _exact_mul(result, base)
        n >>= 1
        if n:
            base = _exact_mul(base, base)
    return result.get(zero, (Fraction(0), Fraction(0)))


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------


def _format_real(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def _format_coeff(c: complex) -> tuple[str, str]:
    """Return (sign, magnitude text) for a coefficient; complex ones keep their own signs."""
    if c.imag == 0:
        sign = "-" if c.real < 0 else "+"
        return sign, _format_real(abs(c.real))
    if c.real == 0:
        sign = "-" if c.imag < 0 else "+"
        return sign, f"{_format_real(abs(c.imag))}i"
    im_sign = "-" if c.imag < 0 else "+"
    return "+", f"({_format_real(c.real)}{im_sign}{_format_real(abs(c.imag))}i)"


def format_poly(p: LaurentPoly, names: Sequence[str] | None = None) -> str:
    """Canonical text form; terms ordered by descending exponent vector."""
    if p.is_zero():
        return "0"
    names = tuple(names) if names is not None else default_names(p.n_vars)
    if len(names) != p.n_vars:
        raise UsageError("wrong number of variable names")
    pieces = []
    for exp in sorted(p.terms, reverse=True):
        sign, mag = _format_coeff(p.terms[exp])
        mono = "*".join(
            name if e == 1 else f"{name}^{e}" for name, e in zip(names, exp) if e
        )
        if mono:
            body = mono if mag == "1" else f"{mag}*{mono}"
        else:
            body = mag
        pieces.append((sign, body))
    first_sign, first = pieces[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>\*\*|[-+*/^()]))"
)


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise UsageError(f"cannot parse polynomial near {text[pos:pos + 10]!r}")
        kind = m.lastgroup
        tokens.append((kind, m.group(kind)))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens, names: dict[str, int], n_vars: int):
        self.tokens = tokens
        self.i = 0
        self.names = names
        self.n = n_vars

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self, value=None):
        tok = self.peek()
        if tok[0] is None or (value is not None and tok[1] != value):
            raise UsageError(f"expected {value or 'token'}, found {tok[1]!r}")
        self.i += 1
        return tok

    def expr(self) -> LaurentPoly:
        sign = 1
        if self.peek()[1] in ("+", "-"):
            sign = -1 if self.take()[1] == "-" else 1
        acc = self.term() * sign
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            t = self.term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term(self) -> LaurentPoly:
        acc = self.factor()
        while True:
            kind, val = self.peek()
            if val in ("*", "/"):
                self.take()
                f = self.factor()
                acc = acc * f if val == "*" else acc / f
            elif kind in ("num", "name") or val == "(":
                acc = acc * self.factor()  # implicit product, e.g. "3x" or "2i"
            else:
                return acc

    def _int_exponent(self) -> int:
        kind, val = self.peek()
        if val == "(":
            self.take("(")
            e = self._int_exponent()
            self.take(")")
            return e
        sign = 1
        if val in ("+", "-"):
            sign = -1 if self.take()[1] == "-" else 1
        kind, val = self.take()
        if kind != "num" or not val.isdigit():
            raise UsageError(f"exponents must be integers, got {val!r}")
        return sign * int(val)

    def factor(self) -> LaurentPoly:
        base = self.atom()
        if self.peek()[1] in ("^", "**"):
            self.take()
            e = self._int_exponent()
            if e >= 0:
                return power(base, e)
            if len(base) != 1:
                raise UsageError("negative powers are only defined for monomials")
            return power(LaurentPoly.constant(1, self.n) / base, -e)
        return base

    def atom(self) -> LaurentPoly:
        kind, val = self.take()
        if kind == "num":
            return LaurentPoly.constant(float(val), self.n)
        if kind == "name":
            if val in self.names:
                return LaurentPoly.variable(self.names[val], self.n)
            if val == "i":
                return LaurentPoly.constant(1j, self.n)
            raise UsageError(f"unknown variable {val!r}")
        if val == "(":
            inner = self.expr()
            self.take(")")
            return inner
        raise UsageError(f"unexpected token {val!r}")


def parse(text: str, names: Sequence[str] | None = None, n_vars: int | None = None) -> LaurentPoly:
    """Parse the text format, e.g. ``"x + x^-1 + y + y^-1 + 4"`` or ``"(1+2i)*x1*x2^-3"``.

    Variables default to ``x, y, z`` (up to three) or ``x1 .. xn``.  ``n_vars``
    pads the arity, e.g. ``parse("y + 1", n_vars=2)``.  ``i`` is the imaginary unit.
    """
    tokens = _tokenize(text)
    if not tokens:
        raise UsageError("empty polynomial")
    if names is None:
        used = {v for k, v in tokens if k == "name" and v != "i"}
        indexed = [int(m.group(1)) for v in used if (m := re.fullmatch(r"x(\d+)", v))]
        if indexed and len(indexed) == len(used):
            n = max(max(indexed), n_vars or 0)
            names = default_names(max(n, 4)) if n >= 4 else tuple(f"x{k + 1}" for k in range(n))
        else:
            unknown = used - {"x", "y", "z"}
            if unknown:
                raise UsageError(f"unknown variables {sorted(unknown)}; pass names=")
            n = max([("x", "y", "z").index(v) + 1 for v in used] + [n_vars or 1])
            names = default_names(n)
    names = tuple(names)
    if n_vars is not None and n_vars > len(names):
        raise UsageError("n_vars exceeds the number of variable names")
    n = len(names)
    parser = _Parser(tokens, {name: k for k, name in enumerate(names)}, n)
    out = parser.expr()
    if parser.i != len(tokens):
        raise UsageError(f"trailing input: {tokens[parser.i][1]!r}")
    return out


def variables(n_vars: int) -> tuple[LaurentPoly, ...]:
    return tuple(LaurentPoly.variable(k, n_vars) for k in range(n_vars))


def family_q(n_vars: int = 2) -> LaurentPoly:
    """``x + 1/x + y + 1/y (+ z + 1/z ...)``, the base of the tempered family."""
    out = LaurentPoly({}, n_vars)
    for k in range(n_vars):
        e = [0] * n_vars
        e[k] = 1
        out = out + LaurentPoly.monomial(e) + LaurentPoly.monomial([-v for v in e])
    return out


def linear_form(coeffs: Iterable[complex], constant: complex = 0) -> LaurentPoly:
    """``sum_k coeffs[k] * x_k + constant``."""
    coeffs = list(coeffs)
    n = len(coeffs)
    out = LaurentPoly.constant(constant, n)
    for k, c in enumerate(coeffs):
        out = out + LaurentPoly.variable(k, n) * c
    return out


# Short names used throughout the docs; they deliberately shadow the builtins
# only inside this module's namespace.
pow = power  # noqa: A001
slice = slice_variable  # noqa: A001
