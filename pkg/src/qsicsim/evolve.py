"""Exact evolution of state distributions under uniformly random measurements.

This is the enumeration/DP engine.  The public one-step operation
(:func:`evolve_step`) is a direct reference implementation over
:mod:`qsicsim.measurements`.  Multi-step drivers (:func:`reachable_counts`,
:func:`entropy_curve`, :func:`iter_distributions`) run a faster engine that
represents the same exact rationals differently: each state's probability is
stored as an integer weight against one common denominator shared by the
whole step.

Why a common denominator exists: write w(s) = p(s) / <s|s> for every state s
(states are primitive integer vectors, so <s|s> is a positive integer).  A
projector branch v with squared norm vv contributes

    w'(succ) += w(s) * |<v|s>|^2 / vv^2        (outcome 1, succ = v's ray)
    w'(succ) += w(s) * |c|^2 / vv^2            (outcome 0)

where c is the integer content of the projected vector vv*s - <v|s>*v; the
analogous observable branch (I +- A)/2 with A = M/k (M integer, k the entry
denominator) contributes |c|^2 / (4 k^2).  Multiplying all weights by
(set size) * lcm of the per-measurement denominators once per step keeps
every weight a plain integer while remaining bit-for-bit the exact rational
distribution: p(s) = w(s) * <s|s> / D.  The engine asserts the exact
mass-conservation identity  sum_s w(s) <s|s> == D  after every step.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from hashlib import sha256
from math import fsum, gcd, lcm, log2
from typing import Iterator, Mapping

from .errors import DimensionMismatch, ResourceLimit, ValidationError
from .exact import CanonicalRay, vector_content
from .measurements import (
    DichotomicObservable,
    RankOneProjector,
    observable_integer_form,
    outcome_probability,
    post_measurement_state,
)
from .sets import QsicSet

DEFAULT_SUPPORT_CAP = 50_000_000


@dataclass(frozen=True)
class StateDistribution:
    """An exact probability distribution over canonical rays.

    Every stored probability is positive and the probabilities sum to
    exactly 1 (validated at construction).
    """

    dim: int
    entries: "Mapping[CanonicalRay, Fraction]"

    def __post_init__(self):
        if not self.entries:
            raise ValidationError("a state distribution needs at least one state")
        total = Fraction(0)
        for ray, p in self.entries.items():
            if ray.dim != self.dim:
                raise ValidationError(
                    f"state {ray.serialize()} has dim {ray.dim}, expected {self.dim}"
                )
            if p <= 0:
                raise ValidationError("zero-mass states must be removed")
            total += p
        if total != 1:
            raise ValidationError(f"probabilities sum to {total}, not 1")

    @staticmethod
    def uniform(rays) -> "StateDistribution":
        rays = list(rays)
        p = Fraction(1, len(rays))
        return StateDistribution(rays[0].dim, {r: p for r in rays})

    @staticmethod
    def point(ray: CanonicalRay) -> "StateDistribution":
        return StateDistribution(ray.dim, {ray: Fraction(1)})

    def support_size(self) -> int:
        return len(self.entries)

    def sorted_items(self) -> "list[tuple[CanonicalRay, Fraction]]":
        return sorted(self.entries.items(), key=lambda kv: kv[0].sort_key())

    def digest(self) -> str:
        """SHA-256 over the lexicographically sorted exact (state, probability)
        lines; stable across internal representations."""
        h = sha256()
        lines = [
            f"{ray.serialize()}={p.numerator}/{p.denominator}\n"
            for ray, p in self.entries.items()
        ]
        for line in sorted(lines):
            h.update(line.encode())
        return h.hexdigest()


@dataclass(frozen=True)
class CurvePoint:
    step: int
    reachable_count: int
    entropy_bits: float
    exact_distribution_digest: str


@dataclass(frozen=True)
class EntropyCurve:
    points: "tuple[CurvePoint, ...]"

    def counts(self) -> "list[int]":
        return [p.reachable_count for p in self.points]

    def entropies(self) -> "list[float]":
        return [p.entropy_bits for p in self.points]


def noncontextual_baseline(qset: QsicSet) -> float:
    """Bits sufficient for any compatible-subset-only restriction: log2(dim)."""
    return log2(qset.dim)


def entropy_of(d: StateDistribution) -> float:
    """Shannon entropy in bits; floats enter only here, never the DP."""
    terms = [
        float(p) * (log2(p.numerator) - log2(p.denominator)) for p in d.entries.values()
    ]
    return -fsum(terms)


def evolve_step(d: StateDistribution, qset: QsicSet) -> StateDistribution:
    """One step of evolution: random measurement, Born-rule branch, update.

    Reference implementation; exact rationals throughout, zero-probability
    branches skipped, successors merged by canonical-ray equality.
    """
    if d.dim != qset.dim:
        raise DimensionMismatch(f"distribution dim {d.dim} vs set dim {qset.dim}")
    choice = qset.weights or (Fraction(1, qset.size),) * qset.size
    out: "dict[CanonicalRay, Fraction]" = {}
    for ray, p in d.entries.items():
        for m, wm in zip(qset.measurements, choice):
            for o in m.outcomes():
                q = outcome_probability(ray, m, o)
                if q == 0:
                    continue
                succ = post_measurement_state(ray, m, o)
                out[succ] = out.get(succ, Fraction(0)) + p * q * wm
    return StateDistribution(d.dim, out)


# --- compiled integer-weight engine -------------------------------------------

@dataclass(frozen=True)
class _Compiled:
    dim: int
    n: int
    real: bool
    step_factor: int  # n * L
    # real kernels
    projs: tuple  # (v, vv, mult, vkey) with flat int tuples
    obss: tuple  # (rows, k, mult)
    # complex kernels; keys are entry tuples ((re, im), ...)
    cprojs: tuple  # (v_pairs, vv, mult, vkey)
    cobss: tuple  # (rows_pairs, k, mult)


def _matrix_ints(m: DichotomicObservable) -> "tuple[tuple, int, bool]":
    """Gaussian-integer form of an observable plus a reality flag."""
    rows, k = observable_integer_form(m)
    real = all(im == 0 for row in rows for _, im in row)
    return rows, k, real


def _compile(qset: QsicSet) -> _Compiled:
    denms = []
    data = []
    real = True
    for m in qset.measurements:
        if isinstance(m, RankOneProjector):
            vv = m.target.norm2()
            denms.append(vv * vv)
            real = real and m.target.is_real()
            data.append(("p", m))
        else:
            rows, k, mreal = _matrix_ints(m)
            denms.append(4 * k * k)
            real = real and mreal
            data.append(("o", rows, k))
    big_l = lcm(*denms)
    projs, obss, cprojs, cobss = [], [], [], []
    for item in data:
        if item[0] == "p":
            m = item[1]
            vv = m.target.norm2()
            mult = big_l // (vv * vv)
            pairs = m.target.entries
            cprojs.append((pairs, vv, mult, pairs))
            if real:
                v = tuple(re for re, _ in pairs)
                projs.append((v, vv, mult, v))
        else:
            _, rows, k = item
            mult = big_l // (4 * k * k)
            cobss.append((rows, k, mult))
            if real:
                rrows = tuple(tuple(re for re, _ in row) for row in rows)
                obss.append((rrows, k, mult))
    return _Compiled(
        dim=qset.dim,
        n=qset.size,
        real=real,
        step_factor=qset.size * big_l,
        projs=tuple(projs),
        obss=tuple(obss),
        cprojs=tuple(cprojs),
        cobss=tuple(cobss),
    )


def _expand_real(items, compiled: _Compiled) -> dict:
    """One engine step over real integer state tuples."""
    out: dict = {}
    get = out.get
    projs, obss = compiled.projs, compiled.obss
    for s, w in items:
        for v, vv, mult, vkey in projs:
            inner = sum(a * b for a, b in zip(v, s))
            if inner:
                out[vkey] = get(vkey, 0) + w * inner * inner * mult
            u = tuple(vv * a - inner * b for a, b in zip(s, v))
            if any(u):
                g = gcd(*u)
                u = tuple(x // g for x in u)
                if next(x for x in u if x) < 0:
                    u = tuple(-x for x in u)
                out[u] = get(u, 0) + w * g * g * mult
        for rows, k, mult in obss:
            mv = tuple(sum(r * x for r, x in zip(row, s)) for row in rows)
            for sign in (1, -1):
                u = tuple(k * a + sign * b for a, b in zip(s, mv))
                if any(u):
                    g = gcd(*u)
                    u = tuple(x // g for x in u)
                    if next(x for x in u if x) < 0:
                        u = tuple(-x for x in u)
                    out[u] = get(u, 0) + w * g * g * mult
    return out


def _canon_pairs(u: "list[tuple[int, int]]") -> "tuple[tuple[tuple[int, int], ...], int]":
    """Divide out Gaussian content and fix the phase; returns (key, |content|^2)."""
    g = vector_content(u)
    ng = g[0] * g[0] + g[1] * g[1]
    if ng != 1:
        gr, gi = g
        u = [((re * gr + im * gi) // ng, (im * gr - re * gi) // ng) for re, im in u]
    lead = next(e for e in u if e != (0, 0))
    re, im = lead
    while not (re > 0 and im >= 0):
        re, im = -im, re
        u = [(-i2, r2) for r2, i2 in u]
    return tuple(u), ng


def _expand_complex(items, compiled: _Compiled) -> dict:
    """One engine step over Gaussian-integer state keys (entry-pair tuples)."""
    out: dict = {}
    get = out.get
    for s, w in items:
        for v, vv, mult, vkey in compiled.cprojs:
            ir = ii = 0
            for (vr, vi), (sr, si) in zip(v, s):
                ir += vr * sr + vi * si
                ii += vr * si - vi * sr
            if ir or ii:
                out[vkey] = get(vkey, 0) + w * (ir * ir + ii * ii) * mult
            u = [
                (vv * sr - (ir * vr - ii * vi), vv * si - (ir * vi + ii * vr))
                for (vr, vi), (sr, si) in zip(v, s)
            ]
            if any(e != (0, 0) for e in u):
                key, ng = _canon_pairs(u)
                out[key] = get(key, 0) + w * ng * mult
        for rows, k, mult in compiled.cobss:
            mv = []
            for row in rows:
                ar = ai = 0
                for (mr, mi), (sr, si) in zip(row, s):
                    ar += mr * sr - mi * si
                    ai += mr * si + mi * sr
                mv.append((ar, ai))
            for sign in (1, -1):
                u = [
                    (k * sr + sign * ar, k * si + sign * ai)
                    for (sr, si), (ar, ai) in zip(s, mv)
                ]
                if any(e != (0, 0) for e in u):
                    key, ng = _canon_pairs(u)
                    out[key] = get(key, 0) + w * ng * mult
    return out


def _expand_chunk(args):
    items, compiled = args
    if compiled.real:
        return _expand_real(items, compiled)
    return _expand_complex(items, compiled)


class _Engine:
    """Integer-weight DP over the reachable state space."""

    PARALLEL_THRESHOLD = 20_000

    def __init__(self, qset: QsicSet, init: StateDistribution, workers: int = 1):
        if init.dim != qset.dim:
            raise DimensionMismatch(f"init dim {init.dim} vs set dim {qset.dim}")
        if qset.weights is not None:
            raise ValidationError(
                "the fast engine only supports uniform measurement choice; "
                "use evolve_step for weighted sets"
            )
        self.compiled = _compile(qset)
        self.dim = qset.dim
        self.workers = max(1, workers)
        denom = lcm(*(p.denominator * r.norm2() for r, p in init.entries.items()))
        self.weights = {}
        for ray, p in init.sorted_items():
            key = self._key_of(ray)
            w = p.numerator * (denom // (p.denominator * ray.norm2()))
            self.weights[key] = self.weights.get(key, 0) + w
        self.denominator = denom
        self._check_mass()

    def _key_of(self, ray: CanonicalRay):
        if self.compiled.real:
            return tuple(re for re, _ in ray.entries)
        return ray.entries

    def _ray_of(self, key) -> CanonicalRay:
        if self.compiled.real:
            return CanonicalRay(tuple((x, 0) for x in key))
        return CanonicalRay(key)

    def _pp(self, key) -> int:
        if self.compiled.real:
            return sum(x * x for x in key)
        return sum(re * re + im * im for re, im in key)

    def _check_mass(self) -> None:
        mass = sum(w * self._pp(k) for k, w in self.weights.items())
        assert mass == self.denominator, "exact mass conservation violated"

    def step(self) -> None:
        items = list(self.weights.items())
        if self.workers > 1 and len(items) >= self.PARALLEL_THRESHOLD:
            out = self._step_parallel(items)
        else:
            out = _expand_chunk((items, self.compiled))
        self.weights = out
        self.denominator *= self.compiled.step_factor
        self._check_mass()

    def _step_parallel(self, items) -> dict:
        import multiprocessing as mp

        nchunks = self.workers
        size = (len(items) + nchunks - 1) // nchunks
        chunks = [items[i : i + size] for i in range(0, len(items), size)]
        ctx = mp.get_context("fork")
        with ctx.Pool(self.workers) as pool:
            partials = pool.map(
                _expand_chunk, [(chunk, self.compiled) for chunk in chunks]
            )
        out = partials[0]
        for part in partials[1:]:
            get = out.get
            for k, v in part.items():
                out[k] = get(k, 0) + v
        return out

    def count(self) -> int:
        return len(self.weights)

    def entropy_bits(self) -> float:
        d = self.denominator
        log2d = log2(d)
        terms = []
        for k, w in self.weights.items():
            wpp = w * self._pp(k)
            # wpp / d is a correctly rounded float even for big integers
            terms.append((wpp / d) * (log2(wpp) - log2d))
        return -fsum(terms)

    def digest(self) -> str:
        d = self.denominator
        h = sha256()
        lines = []
        for k, w in self.weights.items():
            p = Fraction(w * self._pp(k), d)
            lines.append(f"{self._ray_of(k).serialize()}={p.numerator}/{p.denominator}\n")
        for line in sorted(lines):
            h.update(line.encode())
        return h.hexdigest()

    def distribution(self) -> StateDistribution:
        d = self.denominator
        entries = {
            self._ray_of(k): Fraction(w * self._pp(k), d)
            for k, w in self.weights.items()
        }
        return StateDistribution(self.dim, entries)


def _run_engine(
    qset: QsicSet,
    init: StateDistribution,
    steps: int,
    max_support: int,
    workers: int,
) -> "Iterator[_Engine]":
    engine = _Engine(qset, init, workers)
    if engine.count() > max_support:
        raise ResourceLimit(
            f"initial support {engine.count()} exceeds cap {max_support}"
        )
    yield engine
    for _ in range(steps):
        engine.step()
        if engine.count() > max_support:
            raise ResourceLimit(
                f"support {engine.count()} exceeds cap {max_support}"
            )
        yield engine


def reachable_counts(
    qset: QsicSet,
    init: StateDistribution,
    steps: int,
    max_support: int = DEFAULT_SUPPORT_CAP,
    workers: int = 1,
) -> "list[int]":
    """Support sizes of the distribution after 0..steps evolution steps."""
    return [e.count() for e in _run_engine(qset, init, steps, max_support, workers)]


def entropy_curve(
    qset: QsicSet,
    init: StateDistribution,
    steps: int,
    max_support: int = DEFAULT_SUPPORT_CAP,
    workers: int = 1,
) -> EntropyCurve:
    """Reachable count, entropy, and exact digest for steps 0..steps."""
    points = []
    for step, engine in enumerate(
        _run_engine(qset, init, steps, max_support, workers)
    ):
        points.append(
            CurvePoint(step, engine.count(), engine.entropy_bits(), engine.digest())
        )
    return EntropyCurve(tuple(points))


def iter_distributions(
    qset: QsicSet,
    init: StateDistribution,
    steps: int,
    max_support: int = DEFAULT_SUPPORT_CAP,
    workers: int = 1,
) -> "Iterator[StateDistribution]":
    """Yield the exact distribution at each step 0..steps."""
    for engine in _run_engine(qset, init, steps, max_support, workers):
        yield engine.distribution()
