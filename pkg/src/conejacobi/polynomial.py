"""Sparse multivariate polynomials with exact coefficients.

A :class:`Poly` maps exponent tuples to coefficients.  Coefficients are
usually :class:`fractions.Fraction`, but any field type works (floats, or
sympy expressions when the weight exponent is kept symbolic).
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product

import numpy as np


def _is_zero(c):
    if hasattr(c, "free_symbols"):
        import sympy

        return sympy.cancel(c) == 0
    return c == 0


def _normalize(c):
    if hasattr(c, "free_symbols"):
        import sympy

        return sympy.cancel(c)
    if isinstance(c, int) and not isinstance(c, bool):
        return Fraction(c)
    return c


class Poly:
    """Polynomial in ``nvars`` variables stored as ``{exponents: coeff}``."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars, terms=None):
        self.nvars = int(nvars)
        clean = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != self.nvars:
                raise ValueError(f"exponent {exps} does not match {self.nvars} variables")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            c = _normalize(c)
            if not _is_zero(c):
                clean[exps] = clean.get(exps, 0) + c
        self.terms = {k: v for k, v in clean.items() if not _is_zero(v)}

    @classmethod
    def monomial(cls, exps, coeff=1):
        return cls(len(exps), {tuple(exps): coeff})

    @classmethod
    def constant(cls, nvars, value=1):
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def zero(cls, nvars):
        return cls(nvars)

    def is_zero(self):
        return not self.terms

    def degrees(self):
        return {sum(e) for e in self.terms}

    @property
    def degree(self):
        return max(self.degrees(), default=-1)

    def is_homogeneous(self):
        return len(self.degrees()) <= 1

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        if self.nvars != other.nvars:
            return False
        return (self - other).is_zero()

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return "Poly(0)"
        parts = []
        for exps in sorted(self.terms, reverse=True):
            mono = "*".join(f"x{i}^{e}" if e > 1 else f"x{i}" for i, e in enumerate(exps) if e)
            parts.append(f"({self.terms[exps]})" + (f"*{mono}" if mono else ""))
        return "Poly(" + " + ".join(parts) + ")"

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.constant(self.nvars, other)
        self._check(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return Poly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.nvars, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly(self.nvars, {k: v * other for k, v in self.terms.items()})
        self._check(other)
        out = {}
        for (ka, va), (kb, vb) in product(self.terms.items(), other.terms.items()):
            k = tuple(a + b for a, b in zip(ka, kb))
            out[k] = out.get(k, 0) + va * vb
        return Poly(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, n):
        out = Poly.constant(self.nvars)
        for _ in range(int(n)):
            out = out * self
        return out

    def _check(self, other):
        if other.nvars != self.nvars:
            raise ValueError("polynomials live in different numbers of variables")

    def diff(self, var):
        out = {}
        for exps, c in self.terms.items():
            e = exps[var]
            if e:
                k = exps[:var] + (e - 1,) + exps[var + 1 :]
                out[k] = out.get(k, 0) + c * e
        return Poly(self.nvars, out)

    def laplacian(self, variables=None):
        if variables is None:
            variables = range(self.nvars)
        out = Poly.zero(self.nvars)
        for v in variables:
            out = out + self.diff(v).diff(v)
        return out

    def embed(self, nvars, offset):
        """Re-index into ``nvars`` variables, shifting variable ``i`` to ``i + offset``."""
        out = {}
        for exps, c in self.terms.items():
            k = [0] * nvars
            k[offset : offset + self.nvars] = exps
            out[tuple(k)] = c
        return Poly(nvars, out)

    def map_coeffs(self, fn):
        return Poly(self.nvars, {k: fn(v) for k, v in self.terms.items()})

    def __call__(self, *xs):
        """Evaluate numerically; arguments broadcast like numpy arrays."""
        if len(xs) != self.nvars:
            raise ValueError(f"expected {self.nvars} arguments, got {len(xs)}")
        xs = [np.asarray(x, dtype=float) for x in xs]
        shape = np.broadcast_shapes(*(x.shape for x in xs)) if xs else ()
        total = np.zeros(shape)
        for exps, c in self.terms.items():
            term = np.full(shape, float(c))
            for x, e in zip(xs, exps):
                if e:
                    term = term * x**e
            total = total + term
        return total
