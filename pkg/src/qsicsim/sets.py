"""Built-in measurement sets and ingestion of user-defined sets from files.

The two built-ins are the standard square of nine two-qubit Pauli products
(six contexts: three rows, three columns) and the thirteen-ray qutrit set
(contexts are its maximal mutually-orthogonal subsets).
"""

from __future__ import annotations

import json
import re as _re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Optional, Sequence

from .errors import ParseError, ValidationError
from .exact import (
    GR_I,
    GR_ONE,
    GR_ZERO,
    CanonicalRay,
    GaussianRational,
    canonicalize,
)
from .measurements import (
    DichotomicObservable,
    GMatrix,
    Measurement,
    RankOneProjector,
    commute,
    identity_matrix,
    kron,
    mat_mul,
)


@dataclass(frozen=True)
class QsicSet:
    """A named set of same-dimension measurements with a context structure.

    ``contexts`` lists 0-based measurement indices; within a context all
    pairs must commute.  ``weights``, when given, selects measurements
    non-uniformly (must be positive and sum to 1); the default is uniform
    choice.
    """

    name: str
    dim: int
    measurements: "tuple[Measurement, ...]"
    contexts: "tuple[tuple[int, ...], ...]"
    weights: "Optional[tuple[Fraction, ...]]" = None

    def __post_init__(self):
        labels = [m.label for m in self.measurements]
        if len(set(labels)) != len(labels):
            dup = next(l for l in labels if labels.count(l) > 1)
            raise ValidationError(f"duplicate measurement label {dup!r}")
        for m in self.measurements:
            if m.dim != self.dim:
                raise ValidationError(
                    f"measurement {m.label!r} has dim {m.dim}, set has dim {self.dim}"
                )
        for ctx in self.contexts:
            for idx in ctx:
                if not 0 <= idx < len(self.measurements):
                    raise ValidationError(f"context index {idx} out of range")
            for i, j in combinations(ctx, 2):
                a, b = self.measurements[i], self.measurements[j]
                if not commute(a, b):
                    raise ValidationError(
                        f"context {ctx} contains non-commuting pair "
                        f"({a.label!r}, {b.label!r})"
                    )
        if self.weights is not None:
            if len(self.weights) != len(self.measurements):
                raise ValidationError("weights length differs from measurement count")
            if any(w <= 0 for w in self.weights):
                raise ValidationError("measurement weights must be positive")
            if sum(self.weights) != 1:
                raise ValidationError("measurement weights must sum to 1")

    @property
    def size(self) -> int:
        return len(self.measurements)

    def measurement_by_label(self, label: str) -> Measurement:
        for m in self.measurements:
            if m.label == label:
                return m
        raise KeyError(label)


# --- two-qubit Pauli-product square -----------------------------------------

def _pauli(name: str) -> GMatrix:
    if name == "1":
        return identity_matrix(2)
    if name == "x":
        return ((GR_ZERO, GR_ONE), (GR_ONE, GR_ZERO))
    if name == "y":
        return ((GR_ZERO, -GR_I), (GR_I, GR_ZERO))
    if name == "z":
        return ((GR_ONE, GR_ZERO), (GR_ZERO, -GR_ONE))
    raise ValueError(name)


_SQUARE_LABELS = ("z1", "z2", "zz", "x2", "x1", "xx", "zx", "xz", "yy")


def _square_operator(label: str) -> GMatrix:
    """z1 means z on qubit 1 (identity elsewhere); zx means z (x) tensor x (z)
    on qubits 1 and 2 respectively."""
    a, b = label
    if b in "12":
        first = a if b == "1" else "1"
        second = a if b == "2" else "1"
    else:
        first, second = a, b
    return kron(_pauli(first), _pauli(second))


def peres_mermin() -> QsicSet:
    """The nine two-qubit Pauli-product observables in their six contexts
    (three rows and three columns of the square)."""
    measurements = tuple(
        DichotomicObservable(label, _square_operator(label)) for label in _SQUARE_LABELS
    )
    rows = ((0, 1, 2), (3, 4, 5), (6, 7, 8))
    cols = ((0, 3, 6), (1, 4, 7), (2, 5, 8))
    return QsicSet("peres-mermin", 4, measurements, rows + cols)


def pm_eigenstates() -> "tuple[CanonicalRay, ...]":
    """The 24 common eigenstates of the six contexts, four per context.

    Ordered by (context index, outcome signature); use
    :func:`pm_eigenstate_signatures` for the signature of each state.
    """
    return tuple(ray for ray, _ in _pm_eigenstate_table())


def pm_eigenstate_signatures() -> "dict[CanonicalRay, tuple[int, tuple[int, int, int]]]":
    """Map each eigenstate to its (context index, outcome triple) signature."""
    return {ray: sig for ray, sig in _pm_eigenstate_table()}


def _pm_eigenstate_table() -> "list[tuple[CanonicalRay, tuple[int, tuple[int, int, int]]]]":
    pm = peres_mermin()
    table = []
    for ci, ctx in enumerate(pm.contexts):
        mats = [pm.measurements[i].matrix for i in ctx]
        prod = mat_mul(mat_mul(mats[0], mats[1]), mats[2])
        ctx_sign = 1 if prod == identity_matrix(4) else -1
        for signs in product((1, -1), repeat=3):
            if signs[0] * signs[1] * signs[2] != ctx_sign:
                continue
            # (I + s1 A)(I + s2 B)(I + s3 C) projects onto the joint eigenray
            proj = identity_matrix(4)
            for s, mat in zip(signs, mats):
                step = tuple(
                    tuple(
                        (GR_ONE if i == j else GR_ZERO) + (mat[i][j] if s == 1 else -mat[i][j])
                        for j in range(4)
                    )
                    for i in range(4)
                )
                proj = mat_mul(proj, step)
            col = next(
                [proj[i][j] for i in range(4)]
                for j in range(4)
                if any(proj[i][j] for i in range(4))
            )
            table.append((canonicalize(col), (ci, signs)))
    assert len(table) == 24
    return table


# --- thirteen-ray qutrit set -------------------------------------------------

_QUTRIT_RAYS = (
    ("z1", (1, 0, 0)),
    ("z2", (0, 1, 0)),
    ("z3", (0, 0, 1)),
    ("y1-", (0, 1, -1)),
    ("y2-", (1, 0, -1)),
    ("y3-", (1, -1, 0)),
    ("y1+", (0, 1, 1)),
    ("y2+", (1, 0, 1)),
    ("y3+", (1, 1, 0)),
    ("h1", (-1, 1, 1)),
    ("h2", (1, -1, 1)),
    ("h3", (1, 1, -1)),
    ("h0", (1, 1, 1)),
)


def yu_oh() -> QsicSet:
    """The thirteen-projector qutrit set; contexts are all maximal
    mutually-orthogonal subsets of the rays."""
    measurements = tuple(
        RankOneProjector(label, canonicalize(vec)) for label, vec in _QUTRIT_RAYS
    )
    contexts = orthogonality_contexts([m.target for m in measurements])
    return QsicSet("yu-oh", 3, measurements, contexts)


def orthogonality_contexts(rays: Sequence[CanonicalRay]) -> "tuple[tuple[int, ...], ...]":
    """All maximal sets of mutually orthogonal rays, as sorted index tuples.

    For rank-one projectors compatibility is orthogonality (or identity), so
    these are exactly the maximal contexts.  Deterministic output order.
    """
    n = len(rays)

    def orthogonal(i: int, j: int) -> bool:
        re = im = 0
        for (ar, ai), (br, bi) in zip(rays[i].entries, rays[j].entries):
            re += ar * br + ai * bi
            im += ar * bi - ai * br
        return re == 0 and im == 0

    adj = {i: {j for j in range(n) if j != i and orthogonal(i, j)} for i in range(n)}
    cliques: "list[tuple[int, ...]]" = []

    # Each maximal clique is recorded exactly once, at the end of its unique
    # ascending-index chain; an empty candidate set (= no common neighbor
    # remains) certifies maximality.
    def extend(clique: "tuple[int, ...]", candidates: "set[int]") -> None:
        if not candidates:
            cliques.append(clique)
            return
        for c in sorted(candidates):
            if c > clique[-1]:
                extend(clique + (c,), candidates & adj[c])

    for i in range(n):
        extend((i,), adj[i])
    return tuple(sorted(cliques))


# --- set definition files ----------------------------------------------------

_NUM = r"[+-]?\d+(?:/\d+)?"
_ENTRY_RE = _re.compile(
    rf"^\s*(?:"
    rf"(?P<real>{_NUM})(?P<imag>[+-](?:\d+(?:/\d+)?)?)i"  # a+bi
    rf"|(?P<imag_only>[+-]?(?:\d+(?:/\d+)?)?)i"  # bi, i, -i
    rf"|(?P<real_only>{_NUM})"  # a
    rf")\s*$"
)


def _signed_unit(text: str) -> Fraction:
    if text in ("", "+"):
        return Fraction(1)
    if text == "-":
        return Fraction(-1)
    return Fraction(text)


def parse_entry(text: str, where: str = "entry") -> GaussianRational:
    """Parse ``a/b``, ``a/b+c/di``, or a pure-imaginary ``ci`` string."""
    m = _ENTRY_RE.match(text)
    if not m:
        raise ParseError(f"{where}: cannot parse {text!r} as an exact complex number")
    if m.group("real") is not None:
        return GaussianRational(Fraction(m.group("real")), _signed_unit(m.group("imag")))
    if m.group("imag_only") is not None:
        return GaussianRational(Fraction(0), _signed_unit(m.group("imag_only")))
    return GaussianRational(Fraction(m.group("real_only")), Fraction(0))


def _coerce_field(raw, where: str) -> GaussianRational:
    if isinstance(raw, int):
        return GaussianRational.of(raw)
    if isinstance(raw, str):
        return parse_entry(raw, where)
    raise ParseError(f"{where}: expected an integer or entry string, got {raw!r}")


def load_set(path) -> QsicSet:
    """Load and fully validate a measurement set from a JSON definition file.

    Schema: ``{name, dim, kind: "rank1"|"observable", vectors|matrices,
    contexts?, labels?, weights?}``.  Entries follow the exact-number
    grammar of :func:`parse_entry`; contexts are 0-based and are
    autocomputed (orthogonality) for rank-1 sets when omitted.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc

    if not isinstance(doc, dict):
        raise ParseError(f"{path}: top level must be an object")
    try:
        name = str(doc["name"])
        dim = int(doc["dim"])
        kind = doc["kind"]
    except KeyError as exc:
        raise ParseError(f"{path}: missing required field {exc.args[0]!r}") from exc
    if kind not in ("rank1", "observable"):
        raise ParseError(f"{path}: kind must be 'rank1' or 'observable', got {kind!r}")
    if dim < 1:
        raise ValidationError(f"{path}: dim must be positive")

    labels = doc.get("labels")

    def label_for(i: int) -> str:
        if labels is not None:
            return str(labels[i])
        return f"m{i}"

    measurements: "list[Measurement]" = []
    if kind == "rank1":
        vectors = doc.get("vectors")
        if not isinstance(vectors, list) or not vectors:
            raise ParseError(f"{path}: rank1 sets need a non-empty 'vectors' list")
        for vi, vec in enumerate(vectors):
            if not isinstance(vec, list) or len(vec) != dim:
                raise ParseError(f"{path}: vectors[{vi}] must have {dim} entries")
            entries = [
                _coerce_field(e, f"{path}: vectors[{vi}][{ei}]")
                for ei, e in enumerate(vec)
            ]
            measurements.append(RankOneProjector(label_for(vi), canonicalize(entries)))
    else:
        matrices = doc.get("matrices")
        if not isinstance(matrices, list) or not matrices:
            raise ParseError(f"{path}: observable sets need a non-empty 'matrices' list")
        for mi, mat in enumerate(matrices):
            if not isinstance(mat, list) or len(mat) != dim:
                raise ParseError(f"{path}: matrices[{mi}] must be {dim}x{dim}")
            rows = []
            for ri, row in enumerate(mat):
                if not isinstance(row, list) or len(row) != dim:
                    raise ParseError(f"{path}: matrices[{mi}][{ri}] must have {dim} entries")
                rows.append(
                    tuple(
                        _coerce_field(e, f"{path}: matrices[{mi}][{ri}][{ei}]")
                        for ei, e in enumerate(row)
                    )
                )
            measurements.append(DichotomicObservable(label_for(mi), tuple(rows)))

    raw_contexts = doc.get("contexts")
    if raw_contexts is None:
        if kind != "rank1":
            raise ValidationError(
                f"{path}: contexts are required for observable sets"
            )
        contexts = orthogonality_contexts([m.target for m in measurements])
    else:
        contexts = tuple(tuple(int(i) for i in ctx) for ctx in raw_contexts)

    weights = None
    if "weights" in doc:
        weights = tuple(Fraction(w) for w in doc["weights"])

    return QsicSet(name, dim, tuple(measurements), contexts, weights)
