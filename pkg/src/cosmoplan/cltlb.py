"""Bounded-trace temporal formulas over linear arithmetic, plus evaluation.

Formulas are interpreted over finite traces of instants ``0..K``.  Arithmetic
atoms are linear relations over *shifted* state variables (a variable read a
fixed number of instants ahead or behind); Boolean atoms read trace
propositions.  Nine core node kinds are evaluated directly; the usual derived
operators (implication, always, eventually, last-instant) normalise to the
core at construction time.

Two different out-of-range regimes apply, on purpose:

* the *formula-level* next/previous operators follow finite-trace semantics
  (false beyond either end), which is what makes the last-instant marker
  ``final_instant()`` work;
* a *term-level* shift that runs off the trace raises :class:`BoundsError`,
  because a silently-false arithmetic read would mask encoding bugs.  Binary
  connectives evaluate left to right and short-circuit, so guarded shifts
  are never touched.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

Number = Union[int, float]

CMPS = ("=", "<", "<=", ">", ">=")


class BoundsError(Exception):
    """A shifted variable read fell outside the trace."""


class TraceIncomplete(Exception):
    """The trace lacks a value or proposition the formula needs."""


@dataclass(frozen=True)
class Att:
    """Arithmetic temporal term: a state variable read ``shift`` instants
    away from the evaluation instant (positive = future)."""

    var: str
    shift: int = 0


@dataclass(frozen=True)
class Formula:
    kind: str
    args: tuple["Formula", ...] = ()
    # atom payload
    prop: Optional[str] = None
    # rel payload
    coeffs: tuple[tuple[int, Att], ...] = ()
    cmp: str = "="
    const: int = 0


# -- constructors (core) -----------------------------------------------------


def atom(prop: str) -> Formula:
    return Formula("atom", prop=prop)


def rel(coeffs: Iterable[tuple[int, Att]], cmp: str, const: int) -> Formula:
    if cmp not in CMPS:
        raise ValueError(f"unsupported comparison {cmp!r}")
    return Formula("rel", coeffs=tuple(coeffs), cmp=cmp, const=int(const))


def not_(f: Formula) -> Formula:
    return Formula("not", (f,))


def and_(*fs: Formula) -> Formula:
    flat = [g for f in fs for g in (f.args if f.kind == "and" else (f,))]
    if not flat:
        return tt()
    if len(flat) == 1:
        return flat[0]
    return Formula("and", tuple(flat))


def or_(*fs: Formula) -> Formula:
    flat = [g for f in fs for g in (f.args if f.kind == "or" else (f,))]
    if not flat:
        return ff()
    if len(flat) == 1:
        return flat[0]
    return Formula("or", tuple(flat))


def next_(f: Formula) -> Formula:
    return Formula("next", (f,))


def prev(f: Formula) -> Formula:
    return Formula("prev", (f,))


def until(f1: Formula, f2: Formula) -> Formula:
    return Formula("until", (f1, f2))


def since(f1: Formula, f2: Formula) -> Formula:
    return Formula("since", (f1, f2))


# -- constructors (derived, normalised away) ----------------------------------


def tt() -> Formula:
    return rel((), "=", 0)  # 0 = 0


def ff() -> Formula:
    return rel((), "=", 1)  # 0 = 1


def implies(a: Formula, b: Formula) -> Formula:
    return or_(not_(a), b)


def eventually(f: Formula) -> Formula:
    return until(tt(), f)


def always(f: Formula) -> Formula:
    return not_(eventually(not_(f)))


def final_instant() -> Formula:
    """Holds exactly at the final trace instant."""
    return not_(next_(tt()))


def last(f: Formula) -> Formula:
    return and_(eventually(final_instant()), f, final_instant())


def var(name: str, shift: int = 0) -> Att:
    return Att(name, shift)


def eq(a: Att, b: Att) -> Formula:
    return rel(((1, a), (-1, b)), "=", 0)


def eq_const(a: Att, c: int) -> Formula:
    return rel(((1, a),), "=", c)


# -- traces --------------------------------------------------------------------


@dataclass
class Trace:
    """Finite trace: per-variable value arrays and per-proposition flags,
    each of length ``length + 1`` (instants 0..K)."""

    length: int
    values: dict[str, tuple[Number, ...]] = field(default_factory=dict)
    props: dict[str, tuple[bool, ...]] = field(default_factory=dict)

    def value(self, name: str, k: int) -> Number:
        if not (0 <= k <= self.length):
            raise BoundsError(f"variable {name!r} read at instant {k} outside 0..{self.length}")
        try:
            row = self.values[name]
        except KeyError:
            raise TraceIncomplete(f"trace has no variable {name!r}") from None
        return row[k]

    def prop(self, name: str, k: int) -> bool:
        if not (0 <= k <= self.length):
            raise BoundsError(f"proposition {name!r} read at instant {k} outside 0..{self.length}")
        try:
            row = self.props[name]
        except KeyError:
            raise TraceIncomplete(f"trace has no proposition {name!r}") from None
        return row[k]


def eval_formula(f: Formula, trace: Trace, k: int) -> bool:
    """Truth of ``f`` on ``trace`` at instant ``k`` (0 <= k <= K)."""
    if not (0 <= k <= trace.length):
        raise BoundsError(f"evaluation instant {k} outside 0..{trace.length}")
    K = trace.length
    kind = f.kind
    if kind == "atom":
        return trace.prop(f.prop, k)
    if kind == "rel":
        total: Number = 0
        for c, att in f.coeffs:
            total += c * trace.value(att.var, k + att.shift)
        if f.cmp == "=":
            return total == f.const
        if f.cmp == "<":
            return total < f.const
        if f.cmp == "<=":
            return total <= f.const
        if f.cmp == ">":
            return total > f.const
        return total >= f.const
    if kind == "not":
        return not eval_formula(f.args[0], trace, k)
    if kind == "and":
        return all(eval_formula(g, trace, k) for g in f.args)
    if kind == "or":
        return any(eval_formula(g, trace, k) for g in f.args)
    if kind == "next":
        return k + 1 <= K and eval_formula(f.args[0], trace, k + 1)
    if kind == "prev":
        return k - 1 >= 0 and eval_formula(f.args[0], trace, k - 1)
    if kind == "until":
        f1, f2 = f.args
        for i in range(k, K + 1):
            if eval_formula(f2, trace, i):
                return True
            if not eval_formula(f1, trace, i):
                return False
        return False
    if kind == "since":
        f1, f2 = f.args
        for i in range(k, -1, -1):
            if eval_formula(f2, trace, i):
                return True
            if not eval_formula(f1, trace, i):
                return False
        return False
    raise ValueError(f"unknown formula kind {kind!r}")


# -- debug serialisation ---------------------------------------------------------


def to_sexpr(f: Formula) -> str:
    kind = f.kind
    if kind == "atom":
        return f.prop
    if kind == "rel":
        if not f.coeffs:
            return "true" if (f.const == 0) == (f.cmp in ("=", "<=", ">=")) else "false"
        parts = []
        for c, a in f.coeffs:
            shift = "" if a.shift == 0 else f"@{a.shift:+d}"
            parts.append(f"(* {c} {a.var}{shift})")
        lhs = parts[0] if len(parts) == 1 else "(+ " + " ".join(parts) + ")"
        return f"({f.cmp} {lhs} {f.const})"
    name = {"not": "not", "and": "and", "or": "or", "next": "X", "prev": "Y",
            "until": "U", "since": "S"}[kind]
    return "(" + name + " " + " ".join(to_sexpr(g) for g in f.args) + ")"


# -- plan checking ----------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    violated_at: Optional[int] = None
    clause: Optional[Formula] = None


def _always_body(f: Formula) -> Optional[Formula]:
    # always(psi) normalises to not(until(tt, not(psi))).
    if f.kind != "not" or f.args[0].kind != "until":
        return None
    u = f.args[0]
    guard, neg = u.args
    if guard.kind == "rel" and not guard.coeffs and guard.const == 0 and neg.kind == "not":
        return neg.args[0]
    return None


def _smallest_failing(f: Formula, trace: Trace, k: int) -> Formula:
    if f.kind == "and":
        for g in f.args:
            if not eval_formula(g, trace, k):
                return _smallest_failing(g, trace, k)
    return f


def check_trace(f: Formula, trace: Trace) -> CheckResult:
    """Evaluate ``f`` at instant 0; on failure locate the earliest failing
    instant of the first failing conjunct (descending through always-blocks)."""
    conjuncts = f.args if f.kind == "and" else (f,)
    for g in conjuncts:
        if eval_formula(g, trace, 0):
            continue
        body = _always_body(g)
        if body is not None:
            for k in range(trace.length + 1):
                if not eval_formula(body, trace, k):
                    return CheckResult(False, k, _smallest_failing(body, trace, k))
        return CheckResult(False, 0, _smallest_failing(g, trace, 0))
    return CheckResult(True)


def check_plan(f: Formula, plan, scene) -> CheckResult:
    """Replay a plan into a trace and check ``f`` against it.

    The trace is reconstructed independently of any solver model: object
    states follow the primitive effects (pick-up sets the carried flag,
    drop-off relocates the object, a request marks it away), poses come from
    the plan steps.
    """
    from .primitives import build_trace

    return check_trace(f, build_trace(plan, scene))
