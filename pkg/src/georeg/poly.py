"""Dense univariate polynomials with complex coefficients.

Coefficients are stored in ascending powers, so ``coeffs[j]`` multiplies
``x**j``.  The *nominal* degree fixes the ambient space P_n (length of the
coefficient vector minus one) and may exceed the exact degree.  The norm is
the 2-norm of the coefficient vector, which makes P_n isometric to C^(n+1).
"""

from __future__ import annotations

import re
from typing import Iterable

import numpy as np

__all__ = [
    "Polynomial",
    "PolynomialParseError",
    "parse",
    "format_poly",
    "multiply",
    "dot",
    "convolution_matrix",
    "sylvester_matrix",
    "derivative",
    "evaluate",
]


class PolynomialParseError(ValueError):
    """Raised for malformed polynomial text; ``pos`` is the character offset."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class Polynomial:
    """Immutable dense polynomial in ascending powers."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable[complex] | np.ndarray, nominal_degree: int | None = None):
        c = np.array(coeffs, dtype=complex).ravel()
        if c.size == 0:
            c = np.zeros(1, dtype=complex)
        if nominal_degree is not None:
            if nominal_degree < 0:
                raise ValueError("nominal degree must be nonnegative")
            if nominal_degree + 1 < c.size:
                if np.any(c[nominal_degree + 1:] != 0):
                    raise ValueError("nonzero coefficients beyond the nominal degree")
                c = c[: nominal_degree + 1]
            else:
                c = np.concatenate([c, np.zeros(nominal_degree + 1 - c.size, dtype=complex)])
        c.setflags(write=False)
        self._c = c

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def nominal_degree(self) -> int:
        return self._c.size - 1

    @property
    def exact_degree(self) -> int:
        """Largest index with a nonzero coefficient; 0 for the zero polynomial."""
        nz = np.flatnonzero(self._c)
        return int(nz[-1]) if nz.size else 0

    @property
    def leading(self) -> complex:
        return complex(self._c[self.exact_degree])

    def is_zero(self) -> bool:
        return not np.any(self._c)

    def norm(self) -> float:
        return float(np.linalg.norm(self._c))

    def trimmed(self) -> Polynomial:
        """Same polynomial with nominal degree lowered to the exact degree."""
        return Polynomial(self._c[: self.exact_degree + 1])

    def with_degree(self, n: int) -> Polynomial:
        return Polynomial(self._c, nominal_degree=n)

    def __add__(self, other: Polynomial) -> Polynomial:
        n = max(self.nominal_degree, other.nominal_degree)
        return Polynomial(_pad(self._c, n + 1) + _pad(other._c, n + 1))

    def __sub__(self, other: Polynomial) -> Polynomial:
        n = max(self.nominal_degree, other.nominal_degree)
        return Polynomial(_pad(self._c, n + 1) - _pad(other._c, n + 1))

    def __neg__(self) -> Polynomial:
        return Polynomial(-self._c)

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            return multiply(self, other)
        return Polynomial(self._c * complex(other))

    __rmul__ = __mul__

    def __truediv__(self, alpha) -> Polynomial:
        return Polynomial(self._c / complex(alpha))

    def __call__(self, x):
        return evaluate(self, x)

    def __eq__(self, other) -> bool:
        return isinstance(other, Polynomial) and np.array_equal(self._c, other._c)

    def __hash__(self):
        return hash(self._c.tobytes())

    def __repr__(self) -> str:
        return f"Polynomial({format_poly(self)!r}, nominal_degree={self.nominal_degree})"

    def __str__(self) -> str:
        return format_poly(self)


def _pad(c: np.ndarray, length: int) -> np.ndarray:
    out = np.zeros(length, dtype=complex)
    out[: c.size] = c
    return out


# --------------------------------------------------------------------------
# text format

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<cplx>\((?P<body>[^()]*)\))
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<var>[A-Za-z_]\w*)
  | (?P<op>[-+*^])
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise PolynomialParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind == "body":
            kind = "cplx"
        if kind != "ws":
            value = m.group("body") if kind == "cplx" else m.group(0)
            tokens.append((kind, value, pos))
        pos = m.end()
    return tokens


def _complex_literal(body: str, pos: int) -> complex:
    s = body.replace(" ", "")
    if not s:
        raise PolynomialParseError("empty complex literal", pos)
    try:
        return complex(s.replace("i", "j"))
    except ValueError:
        raise PolynomialParseError(f"bad complex literal ({body})", pos) from None


def parse(text: str, nominal_degree: int | None = None, var: str | None = None) -> Polynomial:
    """Parse ``1-.333*x+0.667*x^3`` style text.

    Terms are ``coef``, ``coef*x``, ``coef*x^k``, ``x`` or ``x^k``; ``coef`` is
    a decimal or a parenthesised complex literal such as ``(1.5-2i)``.  Repeated
    powers are summed.  The variable is the first identifier seen unless
    ``var`` is given.
    """
    toks = _tokenize(text)
    if not toks:
        raise PolynomialParseError("empty polynomial", 0)
    terms: dict[int, complex] = {}
    i = 0

    def peek(k=0):
        return toks[i + k] if i + k < len(toks) else None

    first = True
    while i < len(toks):
        sign = 1.0
        tok = peek()
        if tok[0] == "op" and tok[1] in "+-":
            sign = -1.0 if tok[1] == "-" else 1.0
            i += 1
        elif not first:
            raise PolynomialParseError(f"expected '+' or '-', got {tok[1]!r}", tok[2])
        first = False
        tok = peek()
        if tok is None:
            raise PolynomialParseError("dangling sign", len(text))
        coef: complex = 1.0
        power = 0
        if tok[0] in ("num", "cplx"):
            coef = float(tok[1]) if tok[0] == "num" else _complex_literal(tok[1], tok[2])
            i += 1
            nxt = peek()
            if nxt is not None and nxt[0] == "op" and nxt[1] == "*":
                i += 1
                tok = peek()
                if tok is None or tok[0] != "var":
                    raise PolynomialParseError("expected variable after '*'",
                                               tok[2] if tok else len(text))
            else:
                tok = None
        if tok is not None:
            if tok[0] != "var":
                raise PolynomialParseError(f"unexpected token {tok[1]!r}", tok[2])
            if var is None:
                var = tok[1]
            elif tok[1] != var:
                raise PolynomialParseError(f"unknown variable {tok[1]!r}", tok[2])
            i += 1
            power = 1
            nxt = peek()
            if nxt is not None and nxt[0] == "op" and nxt[1] == "^":
                i += 1
                e = peek()
                if e is not None and e[0] == "op" and e[1] == "-":
                    raise PolynomialParseError("negative exponent", e[2])
                if e is None or e[0] != "num" or not e[1].isdigit():
                    raise PolynomialParseError("expected nonnegative integer exponent",
                                               e[2] if e else len(text))
                power = int(e[1])
                i += 1
        terms[power] = terms.get(power, 0.0) + sign * coef
    deg = max(terms)
    c = np.zeros(deg + 1, dtype=complex)
    for k, v in terms.items():
        c[k] += v
    if nominal_degree is not None and nominal_degree < deg:
        raise ValueError(f"text has degree {deg} > nominal degree {nominal_degree}")
    return Polynomial(c, nominal_degree=nominal_degree if nominal_degree is not None else deg)


def _fmt_real(x: float) -> str:
    return f"{x + 0.0:.15g}"  # + 0.0 turns -0.0 into 0.0


def _fmt_coef(c: complex) -> tuple[str, str]:
    """Return (sign, magnitude text) for one coefficient."""
    if c.imag == 0:
        r = c.real
        return ("-" if r < 0 else "+"), _fmt_real(abs(r))
    im = c.imag
    body = f"{_fmt_real(c.real)}{'-' if im < 0 else '+'}{_fmt_real(abs(im))}i"
    return "+", f"({body})"


def format_poly(p: Polynomial, var: str = "x") -> str:
    """Canonical text: ascending powers, 15 significant digits, zeros omitted."""
    parts = []
    for k, c in enumerate(p.coeffs):
        if c == 0:
            continue
        sign, mag = _fmt_coef(complex(c))
        if k == 0:
            term = mag
        else:
            mono = var if k == 1 else f"{var}^{k}"
            term = mono if mag == "1" else f"{mag}*{mono}"
        if not parts:
            parts.append(term if sign == "+" else f"-{term}")
        else:
            parts.append(f" {sign} {term}")
    return "".join(parts) if parts else "0"


# --------------------------------------------------------------------------
# arithmetic and structured matrices

def multiply(p: Polynomial, q: Polynomial) -> Polynomial:
    return Polynomial(np.convolve(p.coeffs, q.coeffs))


def dot(p: Polynomial, q: Polynomial) -> complex:
    """Bilinear coefficient dot product (no conjugation), zero-padded."""
    n = min(p.coeffs.size, q.coeffs.size)
    return complex(np.sum(p.coeffs[:n] * q.coeffs[:n]))


def convolution_matrix(p: Polynomial | np.ndarray, arg_degree: int) -> np.ndarray:
    """Matrix M with ``M @ q.coeffs == (p*q).coeffs`` for q in P_arg_degree."""
    if arg_degree < 0:
        raise ValueError("arg_degree must be nonnegative")
    c = p.coeffs if isinstance(p, Polynomial) else np.asarray(p, dtype=complex)
    m = c.size
    M = np.zeros((m + arg_degree, arg_degree + 1), dtype=complex)
    for j in range(arg_degree + 1):
        M[j:j + m, j] = c
    return M


def sylvester_matrix(p: Polynomial, q: Polynomial, k: int = 1) -> np.ndarray:
    """k-th Sylvester subresultant ``[conv(q, m-k) | conv(p, n-k)]``.

    Uses the exact degrees m, n of p and q.  A null vector ``(v, -w)`` gives
    cofactors with ``q*v == p*w``.
    """
    if p.is_zero() or q.is_zero():
        raise ValueError("zero polynomial has no Sylvester matrix")
    p, q = p.trimmed(), q.trimmed()
    m, n = p.nominal_degree, q.nominal_degree
    if m < 1 or n < 1:
        raise ValueError("Sylvester matrix needs degrees >= 1")
    if not 1 <= k <= min(m, n):
        raise ValueError(f"subresultant index k={k} outside 1..{min(m, n)}")
    return np.hstack([convolution_matrix(q, m - k), convolution_matrix(p, n - k)])


def derivative(p: Polynomial) -> Polynomial:
    n = p.nominal_degree
    if n == 0:
        return Polynomial([0.0])
    return Polynomial(p.coeffs[1:] * np.arange(1, n + 1))


def evaluate(p: Polynomial, x):
    """Horner evaluation; ``x`` may be a scalar or an array."""
    acc = np.zeros_like(np.asarray(x, dtype=complex))
    for c in p.coeffs[::-1]:
        acc = acc * x + c
    return complex(acc) if acc.ndim == 0 else acc
