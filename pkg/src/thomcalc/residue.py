"""Iterated residues at infinity.

The main entry point expands every denominator factor as a geometric series
in its top z-variable, multiplies the series together one variable at a time
(innermost variable first, matching the regime |z_1| << ... << |z_d|), and
reads off the coefficient of 1/(z_1 ... z_d).  The residue carries the sign
(-1)^d relative to that coefficient.

Truncation is self-validating: the expansion runs twice, at the requested
order and again slightly deeper, and a disagreement raises instead of
returning a silently wrong answer.

Two exact backends complement the expansion: a single-variable residue by
summing over symbolic simple poles, and an iterated pole sum used for
cross-checks at numeric parameter values.  The module also hosts the degree
bookkeeping (deg on a variable subset, leading-factor counts) behind the
criterion that certifies a residue vanishes without expanding anything.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple, Union

from .errors import (
    CoincidentPoleError,
    ConstantFormError,
    TruncationUnstableError,
)
from .poly import (
    LinearForm,
    Monomial,
    Polynomial,
    RationalFunction,
    Variable,
    expand_inverse_factor,
    zvar,
)

NEG_INF = float("-inf")

FactorList = Sequence[Tuple[LinearForm, int]]


@dataclass(frozen=True)
class TruncationPolicy:
    base_order: int
    validation_increment: int = 2

    def __post_init__(self):
        if self.base_order < 0:
            raise ValueError("base_order must be nonnegative")
        if self.validation_increment < 1:
            raise ValueError("validation_increment must be positive")


class ResidueProblem:
    """A residue integrand: numerator, linear denominator factors, and
    an optional finite Laurent series factor per variable."""

    __slots__ = ("numerator", "denominator_factors", "per_variable_series", "variables")

    def __init__(
        self,
        numerator: Polynomial,
        denominator_factors: FactorList = (),
        per_variable_series: Optional[Mapping[Variable, Polynomial]] = None,
        variables: Sequence[Variable] = (),
    ):
        variables = tuple(variables)
        seen = set()
        for v in variables:
            if v.family != "z":
                raise ValueError(f"residue variables must be z-variables, got {v.text}")
            if v in seen:
                raise ValueError(f"duplicate residue variable {v.text}")
            seen.add(v)
        var_set = set(variables)

        factors = []
        for form, mult in denominator_factors:
            if mult < 1:
                raise ValueError("factor multiplicities must be positive")
            zs = [v for v in form.variables() if v.family == "z"]
            if not zs:
                raise ConstantFormError(f"denominator factor {form.to_text()} has no z-variable")
            stray = [v for v in zs if v not in var_set]
            if stray:
                raise ValueError(f"factor {form.to_text()} uses unlisted variable {stray[0].text}")
            factors.append((form, int(mult)))

        series = dict(per_variable_series or {})
        for v, s in series.items():
            if v not in var_set:
                raise ValueError(f"series attached to unlisted variable {v.text}")
            for w in s.variables():
                if w.family == "z" and w is not v:
                    raise ValueError(
                        f"series for {v.text} mentions another residue variable {w.text}"
                    )

        for w in numerator.variables():
            if w.family == "z" and w not in var_set:
                raise ValueError(f"numerator uses unlisted variable {w.text}")

        self.numerator = numerator
        self.denominator_factors = tuple(factors)
        self.per_variable_series = series
        self.variables = variables

    # -- serialization used by the CLI --------------------------------

    def to_json_dict(self) -> dict:
        return {
            "numerator": self.numerator.to_json_dict(),
            "denominator_factors": [
                dict(form.to_json_dict(), mult=mult)
                for form, mult in self.denominator_factors
            ],
            "per_variable_series": {
                v.text: s.to_json_dict() for v, s in self.per_variable_series.items()
            },
            "variables": [v.text for v in self.variables],
        }

    @staticmethod
    def from_json_dict(obj: dict) -> "ResidueProblem":
        from .poly import variable_from_text

        factors = []
        for entry in obj.get("denominator_factors", []):
            form = LinearForm.from_json_dict(entry)
            factors.append((form, int(entry.get("mult", 1))))
        series = {
            variable_from_text(name): Polynomial.from_json_dict(p)
            for name, p in obj.get("per_variable_series", {}).items()
        }
        return ResidueProblem(
            numerator=Polynomial.from_json_dict(obj["numerator"]),
            denominator_factors=factors,
            per_variable_series=series,
            variables=[variable_from_text(t) for t in obj["variables"]],
        )


def default_policy(problem: ResidueProblem) -> TruncationPolicy:
    """A coarse order heuristic for problems without a caller-chosen policy."""
    d = len(problem.variables)
    numer_hi = max((_z_degree(m) for m in problem.numerator.term_map()), default=0)
    span = sum(mult for _, mult in problem.denominator_factors)
    for s in problem.per_variable_series.values():
        lo = hi = 0
        for mono in s.term_map():
            deg = _z_degree(mono)
            lo, hi = min(lo, deg), max(hi, deg)
        span += hi - lo
    return TruncationPolicy(base_order=max(4, numer_hi + span + d))


def iterated_residue(
    problem: ResidueProblem, policy: Optional[TruncationPolicy] = None
) -> Polynomial:
    """Residue at infinity in every listed variable, exactly.

    Computes the expansion at the policy order and at a deeper validation
    order; a mismatch raises TruncationUnstableError.
    """
    if policy is None:
        policy = default_policy(problem)
    first = _expand_residue(problem, policy.base_order)
    second = _expand_residue(problem, policy.base_order + policy.validation_increment)
    if first != second:
        raise TruncationUnstableError(
            f"residue changed between orders {policy.base_order} and "
            f"{policy.base_order + policy.validation_increment}"
        )
    return first


def _z_degree(mono: Monomial) -> int:
    return sum(e for v, e in mono if v.family == "z")


class _Piece:
    """One expanded series factor with its exponent bookkeeping."""

    __slots__ = ("terms", "var_ranges", "zdeg_lo", "zdeg_hi")

    def __init__(self, poly: Polynomial):
        self.terms = list(poly.term_map().items())
        n = len(self.terms)
        counts: Dict[Variable, int] = {}
        mins: Dict[Variable, int] = {}
        maxs: Dict[Variable, int] = {}
        zlo = zhi = None
        for mono, _ in self.terms:
            deg = 0
            for v, e in mono:
                if v.family != "z":
                    continue
                deg += e
                counts[v] = counts.get(v, 0) + 1
                mins[v] = e if v not in mins else min(mins[v], e)
                maxs[v] = e if v not in maxs else max(maxs[v], e)
            zlo = deg if zlo is None else min(zlo, deg)
            zhi = deg if zhi is None else max(zhi, deg)
        ranges: Dict[Variable, Tuple[int, int]] = {}
        for v, lo in mins.items():
            hi = maxs[v]
            if counts[v] < n:
                # the variable is absent, hence at exponent 0, in some term
                lo, hi = min(lo, 0), max(hi, 0)
            ranges[v] = (lo, hi)
        self.var_ranges = ranges
        self.zdeg_lo = zlo or 0
        self.zdeg_hi = zhi or 0


def _expand_residue(problem: ResidueProblem, order: int) -> Polynomial:
    d = len(problem.variables)
    if d == 0:
        return problem.numerator

    # group pieces by stage; stage order is innermost (last listed) first
    stage_pieces: Dict[Variable, List[_Piece]] = {v: [] for v in problem.variables}
    index_of = {v: i for i, v in enumerate(problem.variables)}
    for form, mult in problem.denominator_factors:
        top = max((v for v in form.variables() if v.family == "z"), key=lambda v: index_of[v])
        expansion = expand_inverse_factor(form, order)
        for _ in range(mult):
            stage_pieces[top].append(_Piece(expansion))
    for v, s in problem.per_variable_series.items():
        stage_pieces[v].insert(0, _Piece(s))

    # aggregate ranges over every piece not yet multiplied in
    remaining: Dict[Variable, List[int]] = {}
    rem_lo = rem_hi = 0
    for pieces in stage_pieces.values():
        for piece in pieces:
            rem_lo += piece.zdeg_lo
            rem_hi += piece.zdeg_hi
            for v, (lo, hi) in piece.var_ranges.items():
                agg = remaining.setdefault(v, [0, 0])
                agg[0] += lo
                agg[1] += hi

    def feasible(mono: Monomial, finalized: int) -> bool:
        zdeg = 0
        for v, e in mono:
            if v.family != "z":
                continue
            zdeg += e
            agg = remaining.get(v)
            lo, hi = agg if agg is not None else (0, 0)
            if not (e + lo <= -1 <= e + hi):
                return False
        # variables not present in the monomial sit at exponent 0
        for v, (lo, hi) in remaining.items():
            if not (lo <= -1 <= hi):
                for w, _ in mono:
                    if w is v:
                        break
                else:
                    return False
        need = -d - (zdeg - finalized)
        return rem_lo <= need <= rem_hi

    current: Dict[Monomial, Fraction] = dict(problem.numerator.term_map())
    finalized = 0
    from .poly import _mono_mul  # local alias, hot loop

    for v in reversed(problem.variables):
        for piece in stage_pieces[v]:
            # consume this piece from the aggregates before the feasibility test
            rem_lo -= piece.zdeg_lo
            rem_hi -= piece.zdeg_hi
            for w, (lo, hi) in piece.var_ranges.items():
                agg = remaining[w]
                agg[0] -= lo
                agg[1] -= hi
                if agg == [0, 0]:
                    del remaining[w]
            merged: Dict[Monomial, Fraction] = {}
            for m1, c1 in current.items():
                for m2, c2 in piece.terms:
                    mono = _mono_mul(m1, m2)
                    if not feasible(mono, finalized):
                        continue
                    q = merged.get(mono)
                    q = c1 * c2 if q is None else q + c1 * c2
                    if q:
                        merged[mono] = q
                    else:
                        del merged[mono]
            current = merged
        # keep the 1/v slice and drop the variable
        sliced: Dict[Monomial, Fraction] = {}
        for mono, coeff in current.items():
            e = 0
            rest = []
            for w, we in mono:
                if w is v:
                    e = we
                else:
                    rest.append((w, we))
            if e == -1:
                key = tuple(rest)
                q = sliced.get(key)
                sliced[key] = coeff if q is None else q + coeff
        current = {m: c for m, c in sliced.items() if c}
        finalized += 1

    result = Polynomial(current)
    if d % 2:
        result = -result
    return result


# -- exact pole-sum backends ------------------------------------------


def residue_single_variable_exact(f, variable: Variable) -> Polynomial:
    """Residue at infinity in one variable by summing finite-pole residues.

    ``f`` is a FactoredRational whose denominator factors are all linear in
    the variable with simple, pairwise distinct symbolic roots; a repeated
    form or a multiplicity above one raises CoincidentPoleError.  A pole at
    the origin coming from negative numerator exponents is handled by
    series extraction.
    """
    numerator = f.numerator
    flat: List[LinearForm] = []
    for form, mult in f.factors:
        if form.coefficient(variable) == 0:
            raise ValueError(f"factor {form.to_text()} does not involve {variable.text}")
        if mult > 1:
            raise CoincidentPoleError(f"factor {form.to_text()} has multiplicity {mult}")
        flat.append(form)

    roots: List[Tuple[Polynomial, Fraction, LinearForm]] = []
    for form in flat:
        a = form.coefficient(variable)
        root = form.drop(variable).as_polynomial() * (Fraction(-1) / a)
        for other_root, _, _ in roots:
            if other_root == root:
                raise CoincidentPoleError(
                    f"two denominator factors share the root {root.to_text()}"
                )
        roots.append((root, a, form))

    total = RationalFunction(Polynomial.zero())
    for root, a, form in roots:
        if root.is_zero():
            continue  # folded into the origin term below
        num = _substitute_laurent(numerator, variable, root)
        den = RationalFunction(Polynomial.constant(a))
        for other in flat:
            if other is form:
                continue
            value = other.drop(variable).as_polynomial() + other.coefficient(variable) * root
            den = den * RationalFunction(value)
        total = total + num / den

    total = total + _origin_residue(numerator, flat, variable)
    return (-total).to_polynomial()


def _substitute_laurent(
    p: Polynomial, variable: Variable, value: Polynomial
) -> RationalFunction:
    # value must be nonzero when negative exponents occur
    out = RationalFunction(Polynomial.zero())
    for mono, coeff in p.term_map().items():
        e = 0
        rest = []
        for w, we in mono:
            if w is variable:
                e = we
            else:
                rest.append((w, we))
        base = Polynomial({tuple(rest): coeff})
        if e >= 0:
            out = out + RationalFunction(base * value ** e)
        else:
            if value.is_zero():
                raise ZeroDivisionError("substituting the zero root into a pole at 0")
            out = out + RationalFunction(base, value ** (-e))
    return out


def _origin_residue(
    numerator: Polynomial, flat: Sequence[LinearForm], variable: Variable
) -> RationalFunction:
    min_exp, _ = numerator.exponent_range(variable)
    k0 = max(0, -min_exp)
    zero_root = [f for f in flat if f.drop(variable).is_zero()]
    nonzero_root = [f for f in flat if not f.drop(variable).is_zero()]
    target = k0 + len(zero_root) - 1
    if target < 0:
        return RationalFunction(Polynomial.zero())

    # shift so the numerator is polynomial at the origin
    shifted = numerator.multiply_monomial(((variable, k0),)) if k0 else numerator
    scale = Fraction(1)
    for f in zero_root:
        scale *= f.coefficient(variable)

    # expand prod 1/f around the origin up to v^target, coefficients are
    # rational functions of the remaining symbols: 1/(c + a*v) has the
    # origin series sum_t (-a)^t v^t / c^(t+1)
    coeffs: List[RationalFunction] = [RationalFunction(Polynomial.one())]
    coeffs += [RationalFunction(Polynomial.zero()) for _ in range(target)]
    for f in nonzero_root:
        a = f.coefficient(variable)
        c = f.drop(variable).as_polynomial()
        inv: List[RationalFunction] = []
        a_power = Fraction(1)
        for t in range(target + 1):
            inv.append(RationalFunction(Polynomial.constant(a_power), c ** (t + 1)))
            a_power *= -a
        new: List[RationalFunction] = []
        for t in range(target + 1):
            acc = RationalFunction(Polynomial.zero())
            for s in range(t + 1):
                acc = acc + coeffs[s] * inv[t - s]
            new.append(acc)
        coeffs = new

    result = RationalFunction(Polynomial.zero())
    for t in range(target + 1):
        slice_poly = shifted.coefficient_slice(variable, t)
        if slice_poly.is_zero():
            continue
        result = result + RationalFunction(slice_poly) * coeffs[target - t]
    return result * RationalFunction(Polynomial.one(), Polynomial.constant(scale))


def residue_by_pole_sum(
    numerator: Polynomial,
    forms: Sequence[LinearForm],
    variables: Sequence[Variable],
) -> RationalFunction:
    """Iterated residue at infinity as a nested sum over simple poles.

    Exact (no truncation), at the price of requiring each variable's
    denominator factors to have pairwise distinct linear roots.  Intended
    for cross-checks, usually after specializing parameters to numbers.
    """
    if numerator.has_negative_exponent():
        raise ValueError("pole-sum backend expects a polynomial numerator")
    return _pole_sum(numerator, list(forms), list(variables))


def _pole_sum(
    numerator: Polynomial, forms: List[LinearForm], variables: List[Variable]
) -> RationalFunction:
    if not variables:
        result = RationalFunction(numerator)
        for form in forms:
            result = result / RationalFunction(form.as_polynomial())
        return result
    v = variables[-1]
    rest_vars = variables[:-1]
    with_v = [f for f in forms if f.coefficient(v) != 0]
    without_v = [f for f in forms if f.coefficient(v) == 0]

    roots: List[LinearForm] = []
    for f in with_v:
        a = f.coefficient(v)
        roots.append(f.drop(v).scaled(Fraction(-1) / a))
    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            if roots[i] == roots[j]:
                raise CoincidentPoleError(
                    f"poles in {v.text} coincide at {roots[i].to_text()}"
                )

    total = RationalFunction(Polynomial.zero())
    for f, root in zip(with_v, roots):
        a = f.coefficient(v)
        sub_numerator = numerator.substitute({v: root.as_polynomial()}) * (Fraction(-1) / a)
        # the -1/a carries both the residue normalization and the sign of
        # the at-infinity flip for this variable
        sub_forms = list(without_v)
        for g in with_v:
            if g is f:
                continue
            sub_forms.append(g.substitute_linear({v: root}))
        total = total + _pole_sum(sub_numerator, sub_forms, rest_vars)
    return total


# -- vanishing bookkeeping --------------------------------------------

VarOrIndex = Union[Variable, int]


def _as_zvar_set(subset: Iterable[VarOrIndex]) -> Set[Variable]:
    out = set()
    for item in subset:
        v = zvar(item) if isinstance(item, int) else item
        if v.family != "z":
            raise ValueError(f"subset entries must be z-variables, got {v.text}")
        out.add(v)
    return out


def deg_in_subset(p: Polynomial, subset: Iterable[VarOrIndex]):
    """Degree of p after sending subset variables to t and other z-variables
    to 1, keeping remaining symbols.  Returns -inf on the zero polynomial
    (and in particular whenever cancellation wipes out every term)."""
    svars = _as_zvar_set(subset)
    buckets: Dict[Tuple[int, Monomial], Fraction] = {}
    for mono, coeff in p.term_map().items():
        texp = 0
        rest = []
        for v, e in mono:
            if v in svars:
                texp += e
            elif v.family == "z":
                continue  # evaluated at 1
            else:
                rest.append((v, e))
        key = (texp, tuple(rest))
        q = buckets.get(key, Fraction(0)) + coeff
        if q:
            buckets[key] = q
        else:
            buckets.pop(key, None)
    if not buckets:
        return NEG_INF
    return max(texp for texp, _ in buckets)


def _form_deg_in_subset(form: LinearForm, svars: Set[Variable]):
    tcoeff = Fraction(0)
    lower = form.constant
    symbolic = False
    for v, q in form.items:
        if v in svars:
            tcoeff += q
        elif v.family == "z":
            lower += q
        else:
            symbolic = True
    if tcoeff != 0:
        return 1
    if symbolic or lower != 0:
        return 0
    return NEG_INF


def lead_count(factors: FactorList, m: int) -> int:
    """Number of denominator factors (with multiplicity) whose top
    z-variable is z_m."""
    count = 0
    for form, mult in factors:
        try:
            top, _ = form.top_z_variable()
        except ConstantFormError:
            continue
        if top.index == m:
            count += mult
    return count


def vanishing_criterion(p: Polynomial, factors: FactorList, l: int, d: int) -> bool:
    """True when degree bookkeeping alone forces the iterated residue of
    p / prod(factors) over z_1..z_d to vanish at position l.

    Either the tail-subset degrees leave no room for the exponent pattern
    (-1, ..., -1), or the single-variable count at z_l does while every
    z_l-factor tops out there.
    """
    if not 1 <= l <= d:
        raise ValueError("need 1 <= l <= d")
    tail = _as_zvar_set(range(l, d + 1))
    dq_tail = 0
    for form, mult in factors:
        fd = _form_deg_in_subset(form, tail)
        if fd is NEG_INF or fd == NEG_INF:
            dq_tail = NEG_INF
            break
        dq_tail += mult * fd
    dp_tail = deg_in_subset(p, tail)
    if dp_tail + (d - l + 1) < dq_tail:
        return True

    single = _as_zvar_set([l])
    dq_single = 0
    for form, mult in factors:
        fd = _form_deg_in_subset(form, single)
        if fd == NEG_INF:
            dq_single = NEG_INF
            break
        dq_single += mult * fd
    if dq_single == NEG_INF:
        return False
    dp_single = deg_in_subset(p, single)
    return dp_single + 1 < dq_single and dq_single == lead_count(factors, l)
