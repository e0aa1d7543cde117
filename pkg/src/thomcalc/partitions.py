"""Partition sequences, torus weights and the relation calculus.

A singularity stratum is indexed by a sequence of partitions, one per level,
whose l-th entry has weight at most l and whose entries are pairwise
distinct.  The functions here enumerate those sequences, test the
completeness condition that cuts out fixed points, and build the quadratic
relations among the pair-indexed weights uhat^l_{m,r} together with the
nilpotent actions used to certify them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import WeightInhomogeneityError
from .poly import (
    LinearForm,
    Polynomial,
    Variable,
    _mono_text,
    uhatvar,
    uvar,
    zvar,
)


@dataclass(frozen=True)
class Partition:
    """A nondecreasing tuple of positive parts."""

    parts: Tuple[int, ...]

    def __post_init__(self):
        if not self.parts:
            raise ValueError("partitions here are nonempty")
        if any(p < 1 for p in self.parts):
            raise ValueError("parts must be positive")
        if list(self.parts) != sorted(self.parts):
            raise ValueError(f"parts must be nondecreasing, got {self.parts}")

    @staticmethod
    def of(*parts: int) -> "Partition":
        return Partition(tuple(sorted(parts)))

    @property
    def weight(self) -> int:
        return sum(self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    def count(self, part: int) -> int:
        return self.parts.count(part)

    def perm_count(self) -> int:
        """Number of distinct arrangements of the parts (multinomial)."""
        total = 1
        for i in range(2, len(self.parts) + 1):
            total *= i
        for part in set(self.parts):
            c = self.parts.count(part)
            for i in range(2, c + 1):
                total //= i
        return total

    def union(self, other: "Partition") -> "Partition":
        return Partition(tuple(sorted(self.parts + other.parts)))

    def replace_part(self, old: int, new: int) -> "Partition":
        parts = list(self.parts)
        parts.remove(old)
        parts.append(new)
        return Partition(tuple(sorted(parts)))

    def sub_partitions(self) -> List["Partition"]:
        """All distinct nonempty sub-multisets, the partition itself included."""
        distinct = sorted(set(self.parts))
        out = []
        choices = [range(self.parts.count(p) + 1) for p in distinct]
        for combo in itertools.product(*choices):
            parts = []
            for p, c in zip(distinct, combo):
                parts.extend([p] * c)
            if parts:
                out.append(Partition(tuple(parts)))
        out.sort(key=_partition_order_key)
        return out

    def to_text(self) -> str:
        return "[" + ",".join(str(p) for p in self.parts) + "]"

    def __repr__(self) -> str:
        return f"Partition{self.parts}"


def _partition_order_key(p: Partition) -> tuple:
    return (p.weight, p.length, p.parts)


def partitions_up_to(bound: int) -> List[Partition]:
    """Nonempty partitions of weight at most bound, ordered by weight,
    then length, then lexicographically."""
    out: List[Partition] = []
    for total in range(1, bound + 1):
        out.extend(_partitions_of(total))
    out.sort(key=_partition_order_key)
    return out


def _partitions_of(total: int) -> List[Partition]:
    results: List[Partition] = []

    def rec(remaining: int, minimum: int, acc: List[int]):
        if remaining == 0:
            results.append(Partition(tuple(acc)))
            return
        for part in range(minimum, remaining + 1):
            acc.append(part)
            rec(remaining - part, part, acc)
            acc.pop()

    rec(total, 1, [])
    return results


@dataclass(frozen=True)
class AdmissibleSequence:
    """Entries pi_1..pi_d with weight(pi_l) <= l, pairwise distinct."""

    entries: Tuple[Partition, ...]

    def __post_init__(self):
        for l, entry in enumerate(self.entries, start=1):
            if entry.weight > l:
                raise ValueError(f"entry {entry.to_text()} too heavy for level {l}")
        if len(set(self.entries)) != len(self.entries):
            raise ValueError("entries must be pairwise distinct")

    @property
    def depth(self) -> int:
        return len(self.entries)

    def defect(self) -> int:
        return sum(l - entry.weight for l, entry in enumerate(self.entries, start=1))

    def is_complete(self) -> bool:
        """Every nonempty sub-multiset of every entry is itself an entry."""
        entry_set = set(self.entries)
        for entry in self.entries:
            for sub in entry.sub_partitions():
                if sub not in entry_set:
                    return False
        return True

    def to_text(self) -> str:
        return "(" + ",".join(e.to_text() for e in self.entries) + ")"

    def __repr__(self) -> str:
        return f"AdmissibleSequence{tuple(e.parts for e in self.entries)}"


def enumerate_admissible(d: int, complete_only: bool = False) -> List[AdmissibleSequence]:
    """All admissible sequences of depth d, in per-level candidate order
    with the last level varying fastest."""
    level_candidates = [partitions_up_to(l) for l in range(1, d + 1)]
    out: List[AdmissibleSequence] = []

    def rec(level: int, acc: List[Partition]):
        if level == d:
            seq = AdmissibleSequence(tuple(acc))
            if not complete_only or seq.is_complete():
                out.append(seq)
            return
        for candidate in level_candidates[level]:
            if candidate in acc:
                continue
            acc.append(candidate)
            rec(level + 1, acc)
            acc.pop()

    rec(0, [])
    return out


# -- dimension bookkeeping --------------------------------------------


def uhat_index_triples(d: int) -> List[Tuple[int, int, int]]:
    """(m, r, l) with 1 <= m <= r and m + r <= l <= d, ordered by level."""
    return [
        (m, r, l)
        for l in range(1, d + 1)
        for m in range(1, l)
        for r in range(m, l - m + 1)
    ]


def dim_normal_model(d: int) -> int:
    return len(uhat_index_triples(d))


def dim_orbit(d: int) -> int:
    return d * (d - 1) // 2


def deg_qhat(d: int) -> int:
    return dim_normal_model(d) - dim_orbit(d)


def uhat_weight(v: Variable) -> LinearForm:
    m, r, l = v.index
    coeffs: Dict[Variable, Fraction] = {}
    for i, s in ((m, 1), (r, 1), (l, -1)):
        w = zvar(i)
        coeffs[w] = coeffs.get(w, Fraction(0)) + s
    return LinearForm(0, coeffs)


def relation_weight(p: Polynomial) -> LinearForm:
    """The common torus weight of a weight-homogeneous uhat-polynomial.

    Raises WeightInhomogeneityError naming two offending monomials when
    the terms disagree.
    """
    if p.is_zero():
        raise ValueError("the zero polynomial has no well-defined weight")
    weight: Optional[LinearForm] = None
    first_mono = None
    for mono, _ in p.terms():
        coeffs: Dict[Variable, Fraction] = {}
        for v, e in mono:
            if v.family != "uhat":
                raise ValueError(f"expected uhat variables only, found {v.text}")
            for w, q in uhat_weight(v).items:
                coeffs[w] = coeffs.get(w, Fraction(0)) + e * q
        this = LinearForm(0, coeffs)
        if weight is None:
            weight = this
            first_mono = mono
        elif this != weight:
            raise WeightInhomogeneityError(
                f"monomials {_mono_text(first_mono)} and {_mono_text(mono)} "
                f"carry different weights"
            )
    return weight


# -- basic relations among the uhat weights ---------------------------


@dataclass(frozen=True)
class BasicRelation:
    i: int
    j: int
    m: int
    level: int
    toric: bool
    polynomial: Polynomial

    def weight(self) -> LinearForm:
        return relation_weight(self.polynomial)

    def label(self) -> str:
        return f"R({self.i},{self.j},{self.m};{self.level})"


def _paired_sum(a: int, b: int, single: int, level: int) -> Polynomial:
    # sum over s of uhat^s_{a,b} uhat^level_{single,s}
    lo, hi = a + b, level - single
    out = Polynomial.zero()
    for s in range(lo, hi + 1):
        inner = uhatvar(a, b, s)
        outer = uhatvar(min(single, s), max(single, s), level)
        out = out + Polynomial.term(1, [(inner, 1), (outer, 1)])
    return out


def _normalize_sign(p: Polynomial) -> Polynomial:
    smallest_sign = None
    for mono, coeff in p.terms():
        smallest_sign = coeff  # terms() is sorted descending, keep the last
    if smallest_sign is None:
        raise ValueError("cannot orient the zero polynomial")
    return -p if smallest_sign < 0 else p


def basic_relations(d: int) -> List[BasicRelation]:
    """The pairwise differences of the three double sums attached to each
    index triple, deduplicated, for every level up to d."""
    out: List[BasicRelation] = []
    for level in range(3, d + 1):
        for i in range(1, level + 1):
            for j in range(i, level + 1):
                for m in range(j, level - i - j + 1):
                    sums = [
                        _paired_sum(j, m, i, level),
                        _paired_sum(min(i, m), max(i, m), j, level),
                        _paired_sum(i, j, m, level),
                    ]
                    unique: List[Polynomial] = []
                    for s in sums:
                        if not any(s == u for u in unique):
                            unique.append(s)
                    for other in unique[1:]:
                        poly = _normalize_sign(unique[0] - other)
                        out.append(
                            BasicRelation(
                                i=i,
                                j=j,
                                m=m,
                                level=level,
                                toric=(i + j + m == level),
                                polynomial=poly,
                            )
                        )
    return out


def uhat_reference_value(p: Polynomial) -> Fraction:
    """Evaluate a uhat-polynomial at the reference point where
    uhat^l_{m,r} is 1 exactly when m + r = l."""
    assignment = {}
    for v in p.variables():
        m, r, l = v.index
        assignment[v] = Fraction(1) if m + r == l else Fraction(0)
    return p.evaluate(assignment)


# -- the u-space calculus ---------------------------------------------


def u_reference_value(p: Polynomial) -> Fraction:
    """Evaluate at the reference point where u^l_tau is 1 exactly when
    weight(tau) = l."""
    assignment = {}
    for v in p.variables():
        l, tau = v.index
        assignment[v] = Fraction(1) if sum(tau) == l else Fraction(0)
    return p.evaluate(assignment)


def u_monomial(entries: Sequence[Partition]) -> Polynomial:
    pairs = []
    for l, entry in enumerate(entries, start=1):
        pairs.append((uvar(l, entry.parts), 1))
    return Polynomial.term(1, pairs)


def _permutation_sign(perm: Sequence[int]) -> int:
    sign = 1
    for a in range(len(perm)):
        for b in range(a + 1, len(perm)):
            if perm[a] > perm[b]:
                sign = -sign
    return sign


def expansion_relation(rho: AdmissibleSequence, tau: Partition) -> Polynomial:
    """The signed sum over permutations and insertion slots of rho's
    entries with tau merged into one slot, keeping admissible outcomes."""
    d = rho.depth
    out = Polynomial.zero()
    for perm in itertools.permutations(range(d)):
        sign = _permutation_sign(perm)
        permuted = [rho.entries[p] for p in perm]
        for slot in range(d):
            entries = list(permuted)
            entries[slot] = entries[slot].union(tau)
            if any(e.weight > l for l, e in enumerate(entries, start=1)):
                continue
            if len(set(entries)) != len(entries):
                continue
            out = out + u_monomial(entries) * sign
    return out


def apply_right_action(p: Polynomial, m: int) -> Polynomial:
    """Leibniz action of the right-side lowering operator E_{m,m+1}:
    u^l_tau maps to u^{l-1}_tau when l = m + 1 and weight(tau) < l,
    and to zero otherwise."""
    return _leibniz(p, lambda l, tau: _right_step(l, tau, m))


def _right_step(l: int, tau: Tuple[int, ...], m: int):
    if sum(tau) == l or l != m + 1:
        return None
    return (1, uvar(l - 1, tau))


def apply_left_action(p: Polynomial, m: int) -> Polynomial:
    """Leibniz action of the left-side operator: u^l_tau maps to
    count(m in tau) * u^l_{tau with one m bumped to m+1} when
    weight(tau) < l, and to zero otherwise."""
    return _leibniz(p, lambda l, tau: _left_step(l, tau, m))


def _left_step(l: int, tau: Tuple[int, ...], m: int):
    if sum(tau) == l:
        return None
    mult = tau.count(m)
    if mult == 0:
        return None
    bumped = list(tau)
    bumped.remove(m)
    bumped.append(m + 1)
    return (mult, uvar(l, tuple(sorted(bumped))))


def _leibniz(p: Polynomial, step) -> Polynomial:
    out = Polynomial.zero()
    for mono, coeff in p.term_map().items():
        for pos, (v, e) in enumerate(mono):
            if v.family != "u":
                raise ValueError(f"expected u-variables only, found {v.text}")
            l, tau = v.index
            result = step(l, tau)
            if result is None:
                continue
            mult, image = result
            rest = list(mono)
            if e == 1:
                del rest[pos]
            else:
                rest[pos] = (v, e - 1)
            out = out + Polynomial.term(coeff * e * mult, rest + [(image, 1)])
    return out


def pair_relation(rho: Partition, tau: Partition, m: int) -> Polynomial:
    """u^m_{rho+tau} minus the splittings sum_{t+r=m} u^t_rho u^r_tau with
    t and r large enough to carry their partitions."""
    merged = rho.union(tau)
    if merged.weight > m:
        raise ValueError("the union does not fit under the given level")
    out = Polynomial.term(1, [(uvar(m, merged.parts), 1)])
    for t in range(rho.weight, m - tau.weight + 1):
        r = m - t
        out = out - Polynomial.term(
            1, [(uvar(t, rho.parts), 1), (uvar(r, tau.parts), 1)]
        )
    return out


def stored_quartic_relation() -> Polynomial:
    """The extra degree-4 relation that first appears at level 6, beyond the
    quadratic basic relations.  Stored as a constant for weight checking; its
    derivation needs Groebner computations outside our scope."""
    terms = [
        (1, [(1, 2, 4), (1, 2, 4), (2, 3, 5), (3, 3, 6)]),
        (1, [(2, 2, 4), (1, 3, 4), (1, 2, 5), (3, 3, 6)]),
        (1, [(1, 3, 4), (1, 3, 4), (2, 2, 5), (2, 3, 6)]),
        (1, [(2, 2, 4), (1, 3, 4), (2, 3, 5), (1, 3, 6)]),
        (-1, [(2, 2, 4), (1, 1, 4), (2, 3, 5), (3, 3, 6)]),
        (-1, [(1, 3, 4), (1, 2, 4), (2, 2, 5), (3, 3, 6)]),
        (-1, [(2, 2, 4), (1, 3, 4), (1, 3, 5), (2, 3, 6)]),
        (-1, [(1, 3, 4), (1, 3, 4), (2, 3, 5), (2, 2, 6)]),
    ]
    out = Polynomial.zero()
    for sign, factors in terms:
        out = out + Polynomial.term(sign, [(uhatvar(m, r, l), 1) for m, r, l in factors])
    return out
