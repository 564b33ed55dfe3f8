"""Order-2 Taylor jets for exact derivatives along one-parameter families.

A Jet2 carries (value, first derivative, second derivative) of a quantity
along a path t -> q(t), evaluated at t = 0. Arithmetic pushes jets through
products, quotients and square roots with the exact Leibniz/chain rules, so
any pipeline built from those operations returns the exact t-derivatives of
its output (up to roundoff), with no finite-difference truncation error.

Components are plain numpy arrays (any broadcastable shapes). The geometry
pipeline in surface.py is written against the small protocol implemented
here (+, -, *, /, indexing, .sum, sqrt), so the same code runs on floats
and on jets.
"""

import numpy as np

__all__ = ["Jet2", "jet_sqrt", "jet_sum"]


class Jet2:
    """Value with first and second t-derivatives along a path.

    Parameters
    ----------
    a : ndarray
        Value at t = 0.
    b : ndarray, optional
        First derivative. Defaults to zeros.
    c : ndarray, optional
        Second derivative (the actual d2/dt2, not divided by 2).
    """

    __slots__ = ("a", "b", "c")

    def __init__(self, a, b=None, c=None):
        self.a = np.asarray(a, dtype=float)
        self.b = np.zeros_like(self.a) if b is None else np.asarray(b, dtype=float)
        self.c = np.zeros_like(self.a) if c is None else np.asarray(c, dtype=float)

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Jet2):
            return Jet2(self.a + other.a, self.b + other.b, self.c + other.c)
        return Jet2(self.a + other, self.b, self.c)

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self.a, -self.b, -self.c)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Jet2) else -np.asarray(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet2):
            return Jet2(
                self.a * other.a,
                self.a * other.b + self.b * other.a,
                self.a * other.c + 2.0 * self.b * other.b + self.c * other.a,
            )
        return Jet2(self.a * other, self.b * other, self.c * other)

    __rmul__ = __mul__

    def reciprocal(self):
        a, b, c = self.a, self.b, self.c
        inv = 1.0 / a
        return Jet2(inv, -b * inv * inv, (2.0 * b * b - a * c) * inv * inv * inv)

    def __truediv__(self, other):
        if isinstance(other, Jet2):
            return self * other.reciprocal()
        return Jet2(self.a / other, self.b / other, self.c / other)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    # -- array-like helpers --------------------------------------------------

    def __getitem__(self, key):
        return Jet2(self.a[key], self.b[key], self.c[key])

    def sum(self, axis=None):
        return Jet2(self.a.sum(axis=axis), self.b.sum(axis=axis),
                    self.c.sum(axis=axis))

    def sqrt(self):
        s = np.sqrt(self.a)
        ds = self.b / (2.0 * s)
        return Jet2(s, ds, (self.c - 2.0 * ds * ds) / (2.0 * s))

    @property
    def shape(self):
        return self.a.shape

    def __repr__(self):
        return f"Jet2(shape={self.a.shape})"


def jet_sqrt(x):
    """Square root that accepts both plain arrays and jets."""
    if isinstance(x, Jet2):
        return x.sqrt()
    return np.sqrt(x)


def jet_sum(x, axis=None):
    """Sum that accepts both plain arrays and jets."""
    if isinstance(x, Jet2):
        return x.sum(axis=axis)
    return np.sum(x, axis=axis)
