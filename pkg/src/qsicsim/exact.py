"""Exact rational and Gaussian-rational arithmetic, and canonical rays.

State identity throughout the package is exact: a pure state is stored as
the unique primitive Gaussian-integer vector representing its ray, so two
states are equal if and only if their stored entries are equal.  No
floating-point comparison of states happens anywhere.

Rationals are :class:`fractions.Fraction` (re-exported as ``BigRational``),
which already guarantees a positive denominator and a fully reduced
numerator/denominator pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence, Union

from .errors import DimensionMismatch, ZeroVector

BigRational = Fraction

#: A Gaussian integer as an (re, im) pair of plain ints.
GaussianInt = "tuple[int, int]"


@dataclass(frozen=True, slots=True)
class GaussianRational:
    """A complex number with exact rational real and imaginary parts."""

    re: Fraction
    im: Fraction

    @staticmethod
    def of(re, im=0) -> "GaussianRational":
        return GaussianRational(Fraction(re), Fraction(im))

    def __add__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __truediv__(self, other: "GaussianRational") -> "GaussianRational":
        d = other.abs2()
        if d == 0:
            raise ZeroDivisionError("division by zero GaussianRational")
        num = self * other.conjugate()
        return GaussianRational(num.re / d, num.im / d)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        """Squared modulus, an exact nonnegative rational."""
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __repr__(self) -> str:
        return f"GaussianRational({self.re!r}, {self.im!r})"


GR_ZERO = GaussianRational(Fraction(0), Fraction(0))
GR_ONE = GaussianRational(Fraction(1), Fraction(0))
GR_I = GaussianRational(Fraction(0), Fraction(1))

#: Anything canonicalize() accepts as one vector entry.
EntryLike = Union[int, Fraction, GaussianRational, "tuple[int, int]"]


def _nearest_quotient(n: int, d: int) -> int:
    """Nearest integer to n/d; exact ties round to the candidate of smaller
    absolute value.  d must be nonzero.  Deterministic by construction."""
    if d < 0:
        n, d = -n, -d
    q, r = divmod(n, d)
    if 2 * r > d:
        return q + 1
    if 2 * r < d:
        return q
    return q if abs(q) < abs(q + 1) else q + 1


def gaussian_gcd(a: "tuple[int, int]", b: "tuple[int, int]") -> "tuple[int, int]":
    """Greatest common divisor of two Gaussian integers.

    Euclidean algorithm with nearest-Gaussian-integer quotients; the
    remainder norm strictly decreases, so termination is guaranteed.  The
    result is normalized to the phase convention (re > 0, im >= 0) so the
    function is deterministic; any unit multiple would serve equally.
    """
    ar, ai = a
    br, bi = b
    while br or bi:
        nb = br * br + bi * bi
        # a / b = a * conj(b) / |b|^2, rounded per component
        qr = _nearest_quotient(ar * br + ai * bi, nb)
        qi = _nearest_quotient(ai * br - ar * bi, nb)
        rr = ar - (qr * br - qi * bi)
        ri = ai - (qr * bi + qi * br)
        ar, ai, br, bi = br, bi, rr, ri
    if ar == 0 and ai == 0:
        return (0, 0)
    return _phase_fix_entry((ar, ai))


def _phase_fix_entry(e: "tuple[int, int]") -> "tuple[int, int]":
    """Rotate a nonzero Gaussian integer by the unit making re > 0, im >= 0."""
    re, im = e
    for _ in range(4):
        if re > 0 and im >= 0:
            return (re, im)
        re, im = -im, re  # multiply by i
    raise AssertionError("unreachable: some unit rotation must satisfy the rule")


def vector_content(entries: Iterable["tuple[int, int]"]) -> "tuple[int, int]":
    """Gaussian-integer gcd of all entries (the content of the vector)."""
    g = (0, 0)
    for e in entries:
        if e == (0, 0):
            continue
        g = gaussian_gcd(g, e)
        if g[0] * g[0] + g[1] * g[1] == 1:
            break
    return g


@dataclass(frozen=True, slots=True)
class CanonicalRay:
    """The unique primitive Gaussian-integer representative of a quantum ray.

    Invariants (established by :func:`canonicalize`, assumed afterwards):
    at least one entry is nonzero, the Gaussian gcd of all entries is a
    unit, and the first nonzero entry (re, im) satisfies re > 0, im >= 0.

    Why this is a canonical form: if two primitive Gaussian-integer vectors
    span the same ray, their ratio is a Gaussian rational that, by
    primitivity (Gauss's lemma in the PID Z[i]), must be a unit of Z[i],
    i.e. one of {1, i, -1, -i}.  The phase rule selects exactly one of the
    four unit multiples, so ray equality is plain entrywise equality.
    """

    entries: "tuple[tuple[int, int], ...]"

    @property
    def dim(self) -> int:
        return len(self.entries)

    def is_real(self) -> bool:
        return all(im == 0 for _, im in self.entries)

    def norm2(self) -> int:
        """Squared norm <v|v>, a positive integer."""
        return sum(re * re + im * im for re, im in self.entries)

    def to_gaussian_rationals(self) -> "tuple[GaussianRational, ...]":
        return tuple(GaussianRational.of(re, im) for re, im in self.entries)

    def serialize(self) -> str:
        """Render as ``re:im,re:im,...`` (used in CSV/JSON exports)."""
        return ",".join(f"{re}:{im}" for re, im in self.entries)

    def sort_key(self) -> "tuple[tuple[int, int], ...]":
        return self.entries

    def __repr__(self) -> str:
        return f"CanonicalRay({self.serialize()})"


def _coerce_entry(value: EntryLike) -> GaussianRational:
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, tuple):
        re, im = value
        return GaussianRational(Fraction(re), Fraction(im))
    return GaussianRational(Fraction(value), Fraction(0))


def canonicalize(values: Sequence[EntryLike], dim: "int | None" = None) -> CanonicalRay:
    """Return the canonical ray through the given vector.

    Accepts entries as ints, Fractions, ``(re, im)`` int pairs, or
    :class:`GaussianRational`.  Clears denominators, divides out the
    Gaussian-integer content, then applies the unique unit of Z[i] that puts
    the first nonzero entry into the phase convention re > 0, im >= 0.

    Raises ZeroVector for the all-zero vector and DimensionMismatch when an
    explicit ``dim`` disagrees with the entry count.
    """
    vec = [_coerce_entry(v) for v in values]
    if dim is not None and len(vec) != dim:
        raise DimensionMismatch(f"expected {dim} entries, got {len(vec)}")
    if not vec or all(v.is_zero() for v in vec):
        raise ZeroVector("cannot canonicalize the zero vector")

    denom = lcm(*(lcm(v.re.denominator, v.im.denominator) for v in vec))
    ints = [(int(v.re * denom), int(v.im * denom)) for v in vec]
    return canonicalize_ints(ints)


def canonicalize_ints(entries: Sequence["tuple[int, int]"]) -> CanonicalRay:
    """Canonicalize a vector already given as Gaussian-integer (re, im) pairs."""
    ints = list(entries)
    if all(e == (0, 0) for e in ints):
        raise ZeroVector("cannot canonicalize the zero vector")

    g = vector_content(ints)
    ng = g[0] * g[0] + g[1] * g[1]
    if ng != 1:
        gr, gi = g
        divided = []
        for re, im in ints:
            # e / g = e * conj(g) / |g|^2; divisions are exact
            nre = re * gr + im * gi
            nim = im * gr - re * gi
            divided.append((nre // ng, nim // ng))
        ints = divided

    lead = next(e for e in ints if e != (0, 0))
    rotations = 0
    re, im = lead
    while not (re > 0 and im >= 0):
        re, im = -im, re
        rotations += 1
    for _ in range(rotations):
        ints = [(-im, re) for re, im in ints]

    return CanonicalRay(tuple(ints))


def rays_equal(a: CanonicalRay, b: CanonicalRay) -> bool:
    """Exact ray equality; valid entrywise by canonical-form uniqueness."""
    if a.dim != b.dim:
        raise DimensionMismatch(f"dim {a.dim} vs {b.dim}")
    return a.entries == b.entries


def ray_from_string(text: str) -> CanonicalRay:
    """Parse the ``re:im,...`` serialization back into a ray."""
    entries = []
    for part in text.split(","):
        re_s, im_s = part.split(":")
        entries.append((int(re_s), int(im_s)))
    ray = canonicalize(entries)
    if ray.entries != tuple(entries):
        raise ValueError(f"{text!r} is not in canonical form")
    return ray
