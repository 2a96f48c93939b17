"""Two-outcome projective measurements: probabilities and state updates.

A measurement is either a rank-one projector (outcomes 1/0, "clicked / not
clicked") or a dichotomic Hermitian observable squaring to the identity
(outcomes +1/-1, its eigenvalues).  All formulas divide by <v|v> and <psi|psi>
explicitly, so states never need normalizing and every quantity stays an
exact rational.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import lcm
from typing import Union

from .errors import DimensionMismatch, ValidationError, ZeroProbabilityBranch
from .exact import (
    GR_ONE,
    GR_ZERO,
    CanonicalRay,
    GaussianRational,
    canonicalize_ints,
)

#: Exact complex matrix as nested tuples.
GMatrix = "tuple[tuple[GaussianRational, ...], ...]"

Outcome = int


def identity_matrix(dim: int) -> GMatrix:
    return tuple(
        tuple(GR_ONE if i == j else GR_ZERO for j in range(dim)) for i in range(dim)
    )


def mat_mul(a: GMatrix, b: GMatrix) -> GMatrix:
    n = len(a)
    return tuple(
        tuple(
            sum((a[i][k] * b[k][j] for k in range(n)), GR_ZERO) for j in range(n)
        )
        for i in range(n)
    )


def mat_vec(a: GMatrix, v: "tuple[GaussianRational, ...]") -> "tuple[GaussianRational, ...]":
    return tuple(sum((row[k] * v[k] for k in range(len(v))), GR_ZERO) for row in a)


def kron(a: GMatrix, b: GMatrix) -> GMatrix:
    """Tensor (Kronecker) product of two exact matrices."""
    na, nb = len(a), len(b)
    return tuple(
        tuple(a[i // nb][j // nb] * b[i % nb][j % nb] for j in range(na * nb))
        for i in range(na * nb)
    )


def _is_hermitian(m: GMatrix) -> bool:
    n = len(m)
    return all(m[i][j] == m[j][i].conjugate() for i in range(n) for j in range(n))


@dataclass(frozen=True, slots=True)
class RankOneProjector:
    """Projective measurement onto a single ray; outcome 1 means "clicked"."""

    label: str
    target: CanonicalRay

    @property
    def dim(self) -> int:
        return self.target.dim

    def outcomes(self) -> "tuple[Outcome, Outcome]":
        return (1, 0)


@dataclass(frozen=True, slots=True)
class DichotomicObservable:
    """A +-1-valued observable: Hermitian and squaring to the identity."""

    label: str
    matrix: GMatrix

    def __post_init__(self):
        n = len(self.matrix)
        if any(len(row) != n for row in self.matrix):
            raise ValidationError(f"observable {self.label!r}: matrix is not square")
        if not _is_hermitian(self.matrix):
            raise ValidationError(f"observable {self.label!r}: matrix is not Hermitian")
        if mat_mul(self.matrix, self.matrix) != identity_matrix(n):
            raise ValidationError(
                f"observable {self.label!r}: matrix does not square to the identity"
            )

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def outcomes(self) -> "tuple[Outcome, Outcome]":
        return (1, -1)


Measurement = Union[RankOneProjector, DichotomicObservable]


def _check_dims(state: CanonicalRay, m: Measurement) -> None:
    if state.dim != m.dim:
        raise DimensionMismatch(
            f"state dim {state.dim} vs measurement {m.label!r} dim {m.dim}"
        )


def _projector_inner(state: CanonicalRay, target: CanonicalRay) -> "tuple[int, int]":
    """<v|psi> over Gaussian integers."""
    re = im = 0
    for (vr, vi), (sr, si) in zip(target.entries, state.entries):
        # conj(v) * s
        re += vr * sr + vi * si
        im += vr * si - vi * sr
    return re, im


@lru_cache(maxsize=None)
def observable_integer_form(m: DichotomicObservable):
    """The matrix scaled to Gaussian-integer entries: (rows, k) with A = rows/k."""
    k = 1
    for row in m.matrix:
        for e in row:
            k = lcm(k, e.re.denominator, e.im.denominator)
    rows = tuple(
        tuple((int(e.re * k), int(e.im * k)) for e in row) for row in m.matrix
    )
    return rows, k


def _apply_integer(rows, state: CanonicalRay) -> "list[tuple[int, int]]":
    out = []
    for row in rows:
        ar = ai = 0
        for (mr, mi), (sr, si) in zip(row, state.entries):
            ar += mr * sr - mi * si
            ai += mr * si + mi * sr
        out.append((ar, ai))
    return out


def _observable_expectation_scaled(state: CanonicalRay, m: DichotomicObservable) -> "tuple[int, int]":
    """(<psi|rows|psi>, k) with <psi|A|psi> = first/k; exact, real by Hermiticity."""
    rows, k = observable_integer_form(m)
    av = _apply_integer(rows, state)
    acc = 0
    for (sr, si), (ar, ai) in zip(state.entries, av):
        acc += sr * ar + si * ai  # real part of conj(s) * a
    return acc, k


def outcome_probability(state: CanonicalRay, m: Measurement, outcome: Outcome) -> Fraction:
    """Born-rule probability of ``outcome``; exact, in [0, 1].

    The two outcome probabilities of any measurement sum to exactly 1.
    """
    _check_dims(state, m)
    if outcome not in m.outcomes():
        raise ValueError(f"outcome {outcome!r} invalid for measurement {m.label!r}")
    pp = state.norm2()
    if isinstance(m, RankOneProjector):
        ir, ii = _projector_inner(state, m.target)
        p_click = Fraction(ir * ir + ii * ii, m.target.norm2() * pp)
        return p_click if outcome == 1 else 1 - p_click
    scaled, k = _observable_expectation_scaled(state, m)
    return Fraction(k * pp + outcome * scaled, 2 * k * pp)


def post_measurement_state(state: CanonicalRay, m: Measurement, outcome: Outcome) -> CanonicalRay:
    """State after observing ``outcome``, per the projection update rule.

    Computes the unnormalized projected vector over Gaussian integers and
    re-canonicalizes, so the result is again a primitive canonical ray.
    Raises ZeroProbabilityBranch when the outcome has probability zero.
    """
    _check_dims(state, m)
    if outcome not in m.outcomes():
        raise ValueError(f"outcome {outcome!r} invalid for measurement {m.label!r}")
    if isinstance(m, RankOneProjector):
        ir, ii = _projector_inner(state, m.target)
        if outcome == 1:
            if ir == 0 and ii == 0:
                raise ZeroProbabilityBranch(
                    f"state is orthogonal to {m.label!r}; outcome 1 cannot occur"
                )
            return m.target
        vv = m.target.norm2()
        u = []
        for (vr, vi), (sr, si) in zip(m.target.entries, state.entries):
            u.append((vv * sr - (ir * vr - ii * vi), vv * si - (ir * vi + ii * vr)))
        if all(e == (0, 0) for e in u):
            raise ZeroProbabilityBranch(
                f"state lies on {m.label!r}; outcome 0 cannot occur"
            )
        return canonicalize_ints(u)
    # observable branch: project with (I + outcome*A)/2, i.e. k*psi + outcome*rows psi
    rows, k = observable_integer_form(m)
    av = _apply_integer(rows, state)
    u = [
        (k * sr + outcome * ar, k * si + outcome * ai)
        for (sr, si), (ar, ai) in zip(state.entries, av)
    ]
    if all(e == (0, 0) for e in u):
        raise ZeroProbabilityBranch(
            f"state is a {-outcome:+d} eigenstate of {m.label!r}; "
            f"outcome {outcome:+d} cannot occur"
        )
    return canonicalize_ints(u)


def measurement_matrix(m: Measurement) -> GMatrix:
    """The operator associated with a measurement.

    Rank-one projectors map to the unnormalized |v><v| (scaling does not
    affect commutation), observables to their matrix.
    """
    if isinstance(m, DichotomicObservable):
        return m.matrix
    v = m.target.to_gaussian_rationals()
    return tuple(tuple(vi * vj.conjugate() for vj in v) for vi in v)


def commute(a: Measurement, b: Measurement) -> bool:
    """True iff the associated operators commute (exact matrix check)."""
    if a.dim != b.dim:
        raise DimensionMismatch(f"{a.label!r} dim {a.dim} vs {b.label!r} dim {b.dim}")
    ma, mb = measurement_matrix(a), measurement_matrix(b)
    return mat_mul(ma, mb) == mat_mul(mb, ma)
