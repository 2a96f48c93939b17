"""Causal-state machines over the reachable post-measurement states.

The causal states of the measured process are identified with the reachable
canonical rays themselves (each ray determines all future statistics, and
the audits below verify empirically that distinct rays are statistically
distinguishable and that transitions are unifilar).  A machine built on an
open set is truncated at an explicit depth; transition rows exist only for
states that were fully expanded.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .errors import (
    DimensionMismatch,
    ResourceLimit,
    Truncated,
)
from .errors import NonUniqueStationary as NonUniqueStationaryError
from .exact import CanonicalRay
from .evolve import StateDistribution
from .measurements import outcome_probability, post_measurement_state
from .sets import QsicSet

DEFAULT_STATE_CAP = 2_000_000
DEFAULT_PAIR_CAP = 50_000_000

#: One transition branch: (outcome, exact probability, successor state index).
Branch = "tuple[int, Fraction, int]"


@dataclass(frozen=True)
class Transducer:
    """A unifilar input-output machine with exact transition probabilities.

    ``transitions`` maps (state index, measurement index) to the positive-
    probability branches of that row; rows are present exactly for the
    states that were expanded during the build.  ``initial`` is the build
    distribution mapped onto state indices.
    """

    qset: QsicSet
    states: "tuple[CanonicalRay, ...]"
    transitions: "dict[tuple[int, int], tuple[Branch, ...]]"
    initial: "tuple[tuple[int, Fraction], ...]"
    truncated: bool
    depth: "int | None"

    def state_index(self, ray: CanonicalRay) -> int:
        return self._index()[ray]

    def _index(self) -> "dict[CanonicalRay, int]":
        if not hasattr(self, "_idx_cache"):
            object.__setattr__(
                self, "_idx_cache", {r: i for i, r in enumerate(self.states)}
            )
        return self._idx_cache

    def measurement_index(self, label: str) -> int:
        for i, m in enumerate(self.qset.measurements):
            if m.label == label:
                return i
        raise KeyError(label)


def _branches(ray: CanonicalRay, qset: QsicSet, index, frontier_add):
    """Expand one (state, measurement) table row; returns per-measurement rows."""
    rows = []
    for m in qset.measurements:
        row = []
        for o in m.outcomes():
            q = outcome_probability(ray, m, o)
            if q == 0:
                continue
            succ = post_measurement_state(ray, m, o)
            si = index.get(succ)
            if si is None:
                si = frontier_add(succ)
            row.append((o, q, si))
        assert sum(q for _, q, _ in row) == 1
        rows.append(tuple(row))
    return rows


def build_transducer(
    qset: QsicSet,
    init: StateDistribution,
    max_depth: "int | None" = None,
    max_states: int = DEFAULT_STATE_CAP,
) -> Transducer:
    """Breadth-first build of the machine reachable from ``init``.

    Expands shells of new states until closure or until ``max_depth`` shells
    have been expanded; ``truncated`` records whether the frontier was still
    growing when the build stopped.
    """
    if init.dim != qset.dim:
        raise DimensionMismatch(f"init dim {init.dim} vs set dim {qset.dim}")

    states: "list[CanonicalRay]" = []
    index: "dict[CanonicalRay, int]" = {}

    def add_state(ray: CanonicalRay) -> int:
        if len(states) >= max_states:
            raise ResourceLimit(f"state count exceeds cap {max_states}")
        index[ray] = len(states)
        states.append(ray)
        return index[ray]

    for ray, _ in init.sorted_items():
        add_state(ray)

    transitions: "dict[tuple[int, int], tuple[Branch, ...]]" = {}
    expanded = 0
    depth = 0
    truncated = False
    while True:
        frontier_start = len(states)
        if expanded == frontier_start:
            break  # closure: no unexpanded states remain
        if max_depth is not None and depth >= max_depth:
            truncated = True
            break
        for si in range(expanded, frontier_start):
            rows = _branches(states[si], qset, index, add_state)
            for mi, row in enumerate(rows):
                transitions[(si, mi)] = row
        expanded = frontier_start
        depth += 1

    initial = tuple(
        (index[ray], p) for ray, p in init.sorted_items()
    )
    return Transducer(
        qset=qset,
        states=tuple(states),
        transitions=transitions,
        initial=initial,
        truncated=truncated,
        depth=depth if max_depth is not None else None,
    )


def verify_unifilar(t: Transducer) -> bool:
    """Audit: every positive-probability (state, input, outcome) has exactly
    one successor, and every row is exactly stochastic."""
    for (_, _), row in t.transitions.items():
        seen = set()
        total = Fraction(0)
        for outcome, prob, _ in row:
            if prob <= 0:
                return False
            if outcome in seen:
                return False
            seen.add(outcome)
            total += prob
        if total != 1:
            return False
    return True


@dataclass(frozen=True)
class DistinguishabilityReport:
    pairs_checked: int
    failures: "tuple[tuple[CanonicalRay, CanonicalRay], ...]"

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_distinguishability(
    states, qset: QsicSet, pair_cap: int = DEFAULT_PAIR_CAP
) -> DistinguishabilityReport:
    """Search, for every pair of distinct rays, for one measurement whose
    outcome statistics differ (exact rational comparison).

    Two rays are indistinguishable by single measurements iff their whole
    per-measurement probability signatures coincide, so the pairwise search
    is equivalent to grouping states by signature; failures are exactly the
    pairs sharing a group.
    """
    states = list(states)
    pairs = len(states) * (len(states) - 1) // 2
    if pairs > pair_cap:
        raise ResourceLimit(f"{pairs} pairs exceed cap {pair_cap}")
    groups: "dict[tuple, list[CanonicalRay]]" = {}
    for ray in states:
        if ray.dim != qset.dim:
            raise DimensionMismatch(
                f"state dim {ray.dim} vs set dim {qset.dim}"
            )
        sig = tuple(
            outcome_probability(ray, m, m.outcomes()[0]) for m in qset.measurements
        )
        groups.setdefault(sig, []).append(ray)
    failures = []
    for members in groups.values():
        for a, b in combinations(members, 2):
            failures.append((a, b))
    return DistinguishabilityReport(pairs, tuple(failures))


def _uniform_chain(t: Transducer) -> "dict[int, dict[int, Fraction]]":
    """Markov chain on causal states induced by uniform input choice."""
    n_meas = t.qset.size
    chain: "dict[int, dict[int, Fraction]]" = {}
    for si in range(len(t.states)):
        row: "dict[int, Fraction]" = {}
        for mi in range(n_meas):
            for _, prob, sj in t.transitions[(si, mi)]:
                row[sj] = row.get(sj, Fraction(0)) + prob / n_meas
        chain[si] = row
    return chain


def _closed_classes(chain) -> "list[list[int]]":
    """Strongly connected components with no outgoing edges, via Tarjan."""
    n = len(chain)
    index_of = {}
    lowlink = {}
    on_stack = set()
    stack = []
    sccs = []
    counter = [0]

    def strongconnect(v0):
        work = [(v0, iter(chain[v0]))]
        index_of[v0] = lowlink[v0] = counter[0]
        counter[0] += 1
        stack.append(v0)
        on_stack.add(v0)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index_of:
                    index_of[w] = lowlink[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(chain[w])))
                    advanced = True
                    break
                if w in on_stack:
                    lowlink[v] = min(lowlink[v], index_of[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[v])
            if lowlink[v] == index_of[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(sorted(comp))

    for v in range(n):
        if v not in index_of:
            strongconnect(v)

    closed = []
    for comp in sccs:
        members = set(comp)
        if all(w in members for v in comp for w in chain[v]):
            closed.append(comp)
    return sorted(closed)


def _solve_stationary(chain, members: "list[int]") -> "dict[int, Fraction]":
    """Exact stationary distribution on one closed class: reduced row
    echelon form of the system (P^T - I) pi = 0, sum(pi) = 1, over rationals."""
    pos = {s: i for i, s in enumerate(members)}
    n = len(members)
    rows = []
    for i, si in enumerate(members):
        row = [Fraction(0)] * (n + 1)
        for sj in members:
            row[pos[sj]] += chain[sj].get(si, Fraction(0))
        row[i] -= 1
        rows.append(row)
    rows.append([Fraction(1)] * n + [Fraction(1)])

    rank = 0
    pivot_cols = []
    for col in range(n):
        pivot = next((k for k in range(rank, len(rows)) if rows[k][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = 1 / rows[rank][col]
        rows[rank] = [x * inv for x in rows[rank]]
        for k in range(len(rows)):
            if k != rank and rows[k][col] != 0:
                f = rows[k][col]
                rows[k] = [a - f * b for a, b in zip(rows[k], rows[rank])]
        pivot_cols.append(col)
        rank += 1

    if any(rows[k][n] != 0 for k in range(rank, len(rows))):
        raise ArithmeticError("inconsistent stationary system")
    # a closed communicating class has a one-dimensional fixed space, so the
    # normalized system has full rank
    assert rank == n, "stationary solution is not unique on a closed class"
    solution = {members[col]: rows[i][n] for i, col in enumerate(pivot_cols)}
    assert sum(solution.values()) == 1
    return solution


def stationary_distribution(t: Transducer) -> StateDistribution:
    """Exact stationary distribution of the uniform-input state chain.

    Requires a closed (non-truncated) machine.  When several closed
    communicating classes exist the distribution is not unique:
    NonUniqueStationary is raised carrying one exact solution per class.
    With a single closed class the unique solution is returned (a warning
    is emitted if transient states exist).
    """
    if t.truncated:
        raise Truncated("stationary distribution needs a closed machine")
    chain = _uniform_chain(t)
    closed = _closed_classes(chain)
    if len(closed) > 1:
        solutions = []
        for comp in closed:
            sol = _solve_stationary(chain, comp)
            solutions.append(
                StateDistribution(
                    t.qset.dim, {t.states[s]: p for s, p in sol.items() if p > 0}
                )
            )
        raise NonUniqueStationaryError(
            f"{len(closed)} closed communicating classes; stationary "
            "distribution is not unique",
            solutions,
        )
    members = closed[0]
    if len(members) < len(t.states):
        warnings.warn(
            "chain is reducible (transient states present); the unique "
            "stationary distribution ignores transients",
            stacklevel=2,
        )
    sol = _solve_stationary(chain, members)
    return StateDistribution(
        t.qset.dim, {t.states[s]: p for s, p in sol.items() if p > 0}
    )


def past_sufficiency(
    qset: QsicSet, prior: StateDistribution, n: int
) -> "list[Fraction]":
    """Probability that an input-output past fails to pin down the state.

    Entry L (for L = 0..n) is the total probability, under the prior and
    uniform inputs, of observing a length-L past compatible with at least
    two different current states.  A past that leaves a single candidate
    state determines the state forever after (identical dynamics), which
    prunes the enumeration.
    """
    if prior.dim != qset.dim:
        raise DimensionMismatch(f"prior dim {prior.dim} vs set dim {qset.dim}")
    n_meas = qset.size
    totals = [Fraction(0)] * (n + 1)

    def walk(cands: "dict[CanonicalRay, Fraction]", depth: int, path_mass: Fraction):
        # cands: candidate current state -> prior-weighted path probability
        if len(cands) >= 2:
            totals[depth] += path_mass
        else:
            return  # a unique candidate stays unique under every continuation
        if depth == n:
            return
        for m in qset.measurements:
            for o in m.outcomes():
                nxt: "dict[CanonicalRay, Fraction]" = {}
                for ray, p in cands.items():
                    q = outcome_probability(ray, m, o)
                    if q == 0:
                        continue
                    succ = post_measurement_state(ray, m, o)
                    nxt[succ] = nxt.get(succ, Fraction(0)) + p * q
                if nxt:
                    walk(nxt, depth + 1, sum(nxt.values()) / (n_meas ** (depth + 1)))

    walk(dict(prior.entries), 0, Fraction(1))
    return totals


def export_dot(t: Transducer, max_states: "int | None" = None) -> str:
    """Graph description (DOT syntax); edges labeled ``input / outcome : p``."""
    limit = len(t.states) if max_states is None else min(max_states, len(t.states))
    lines = ["digraph transducer {", "  rankdir=LR;"]
    for si in range(limit):
        lines.append(f'  s{si} [label="{t.states[si].serialize()}"];')
    for (si, mi), row in sorted(t.transitions.items()):
        if si >= limit:
            continue
        label = t.qset.measurements[mi].label
        for outcome, prob, sj in row:
            if sj >= limit:
                continue
            lines.append(
                f'  s{si} -> s{sj} [label="{label} / {outcome} : '
                f'{prob.numerator}/{prob.denominator}"];'
            )
    lines.append("}")
    return "\n".join(lines) + "\n"
