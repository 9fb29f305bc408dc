"""Top-down mission layer.

Splits a global mission automaton into per-robot missions by natural
projection, then justifies that the joint behaviour stays inside the global
mission with an asymmetric assume-guarantee argument whose environment
assumptions are learned actively (observation-table learning driven by
inclusion checks).  Also hosts the mission edits used by the coordination
loop: removing a violating trace and inserting request/response event pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .automata import (
    Alphabet,
    Dfa,
    Word,
    chain,
    included,
    lift,
    minimize,
    project,
    project_word,
    subtract_word,
    sync_product,
)

# ---------------------------------------------------------------------------
# Observation-table learner
# ---------------------------------------------------------------------------


class ObservationTable:
    """Classic (S, E, T) table: S prefix-closed rows, E suffix-closed columns.

    T maps every word of (S u S.A).E to 0/1 through the membership oracle.
    The candidate automaton has one state per distinct S-row.
    """

    def __init__(self, alphabet: Alphabet, membership: Callable[[Word], bool]):
        self.alphabet = alphabet
        self.membership = membership
        self.S: list[Word] = [()]
        self.E: list[Word] = [()]
        self._cells: dict[Word, bool] = {}
        self.fill()

    # T is total on (S u S.A) x E by construction.
    def _query(self, w: Word) -> bool:
        if w not in self._cells:
            self._cells[w] = bool(self.membership(w))
        return self._cells[w]

    def row(self, s: Word) -> tuple[bool, ...]:
        return tuple(self._query(s + e) for e in self.E)

    def extended(self) -> list[Word]:
        out = list(self.S)
        seen = set(out)
        for s in self.S:
            for a in self.alphabet:
                w = s + (a,)
                if w not in seen:
                    seen.add(w)
                    out.append(w)
        return out

    def fill(self) -> None:
        for s in self.extended():
            for e in self.E:
                self._query(s + e)

    def is_closed(self) -> Optional[Word]:
        """None when closed, else a row of S.A missing from S's rows."""
        rows = {self.row(s) for s in self.S}
        for s in self.S:
            for a in self.alphabet:
                t = s + (a,)
                if self.row(t) not in rows:
                    return t
        return None

    def is_consistent(self) -> Optional[Word]:
        """None when consistent, else a new distinguishing suffix a.e."""
        for i, s1 in enumerate(self.S):
            for s2 in self.S[i + 1 :]:
                if self.row(s1) != self.row(s2):
                    continue
                for a in self.alphabet:
                    for e in self.E:
                        if self._query(s1 + (a,) + e) != self._query(s2 + (a,) + e):
                            return (a,) + e
        return None

    def add_prefixes(self, w: Word) -> None:
        """Add every prefix of ``w`` to S (counterexample handling)."""
        for i in range(len(w) + 1):
            p = w[:i]
            if p not in self.S:
                self.S.append(p)
        self.fill()

    def add_suffix(self, e: Word) -> None:
        if e not in self.E:
            self.E.append(e)
        self.fill()

    def repair(self) -> None:
        """Restore closedness and consistency, refilling as needed."""
        while True:
            t = self.is_closed()
            if t is not None:
                self.S.append(t)
                self.fill()
                continue
            e = self.is_consistent()
            if e is not None:
                self.add_suffix(e)
                continue
            return

    def candidate(self) -> Dfa:
        """Total DFA over the table's rows; accepting rows are marked."""
        reps: dict[tuple[bool, ...], Word] = {}
        for s in self.S:
            reps.setdefault(self.row(s), s)
        ids = {r: i for i, r in enumerate(reps)}
        trans: dict[tuple[int, str], int] = {}
        for r, s in reps.items():
            for a in self.alphabet:
                trans[(ids[r], a)] = ids[self.row(s + (a,))]
        marked = frozenset(ids[r] for r in reps if r[self.E.index(())])
        return Dfa(self.alphabet, len(reps), ids[self.row(())], trans, marked)


def learn(
    alphabet: Alphabet,
    membership: Callable[[Word], bool],
    equivalence: Callable[[Dfa], Optional[Word]],
    max_rounds: int = 200,
) -> Dfa:
    """Active learning of a regular language from the two oracles.

    ``equivalence`` gets a total candidate DFA (marked = accepted) and returns
    None on success or any word misclassified by the candidate.
    Counterexamples are handled by adding all their prefixes to S.
    """
    table = ObservationTable(alphabet, membership)
    for _ in range(max_rounds):
        table.repair()
        cand = table.candidate()
        cex = equivalence(cand)
        if cex is None:
            return cand
        table.add_prefixes(tuple(cex))
    raise RuntimeError("learning did not converge (oracle inconsistent?)")


def accepted_to_generated(d: Dfa) -> Dfa:
    """Turn a total accept/reject DFA for a prefix-closed language into a
    partial automaton whose generated language is the accepted one."""
    keep = {q for q in range(d.n_states) if q in d.marked}
    trans = {
        (s, e): t for (s, e), t in d.transitions.items() if s in keep and t in keep
    }
    if d.initial not in keep:
        return Dfa(d.alphabet, 0, 0, {}, frozenset())
    out = Dfa(d.alphabet, d.n_states, d.initial, trans, frozenset(keep))
    return minimize(out)


# ---------------------------------------------------------------------------
# Assume-guarantee verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AgTriple:
    assumption: Dfa
    module: Dfa
    property: Dfa


@dataclass
class MembershipCounter:
    """Memoised mission-triple membership with prefix-closure shortcuts.

    The underlying predicate is monotone: once a word fails, every extension
    fails; once a word passes, every prefix passes.  The counter reports how
    many words actually went through the expensive inclusion check.
    """

    fn: Callable[[Word], bool]
    calls: int = 0
    _cache: dict[Word, bool] = field(default_factory=dict)

    def __call__(self, w: Word) -> bool:
        w = tuple(w)
        if w in self._cache:
            return self._cache[w]
        for i in range(len(w)):
            if self._cache.get(w[:i]) is False:
                self._cache[w] = False
                return False
        self.calls += 1
        res = bool(self.fn(w))
        self._cache[w] = res
        if res:
            for i in range(len(w)):
                self._cache[w[:i]] = True
        return res


def membership_query(
    t: Sequence[str],
    module: Dfa,
    property: Dfa,
    asm_alphabet: Optional[Alphabet] = None,
) -> int:
    """1 iff the trace automaton of ``t`` composed with ``module`` stays
    inside ``property`` (generated-language inclusion).

    The trace automaton generates exactly the prefixes of ``t`` and blocks
    every other event of the assumption alphabet (default: the events of
    ``t`` itself, which only matters for the empty word).
    """
    if asm_alphabet is None:
        asm_alphabet = Alphabet.of(t)
    dfa_t = chain(tuple(t), asm_alphabet if len(asm_alphabet) else module.alphabet)
    prod = sync_product([dfa_t, module])
    return 1 if included(prod, property).holds else 0


def _trace_automaton(t: Word, alphabet: Alphabet) -> Dfa:
    return chain(t, alphabet)


@dataclass(frozen=True)
class LearnedAssumption:
    assumption: Dfa
    queries: int


@dataclass(frozen=True)
class Violation:
    word: Word  # over the assumption alphabet


def learn_assumption(
    module: Dfa,
    property: Dfa,
    env: Dfa,
    asm_alphabet: Optional[Alphabet] = None,
) -> LearnedAssumption | Violation:
    """Learn an environment assumption discharging the asymmetric rule.

    Membership of a word t is the check <trace(t)> module <property>.  A
    candidate A is accepted when (i) A || module stays in the property and
    (ii) the environment's language is contained in A.  Failures of (i)
    refine A; failures of (ii) either refine A or expose a real violation.
    """
    if asm_alphabet is None:
        asm_alphabet = env.alphabet
    if len(asm_alphabet) == 0:
        raise ValueError("assumption alphabet must be non-empty")

    member = MembershipCounter(
        lambda t: included(
            sync_product([_trace_automaton(t, asm_alphabet), module]), property
        ).holds
    )

    outcome: dict = {}

    def equivalence(cand: Dfa) -> Optional[Word]:
        asm = accepted_to_generated(cand)
        # (i) <A> module <property>
        res = included(sync_product([asm, module]), property)
        if not res.holds:
            # The assumption admits too much; its projection must be pruned.
            return project_word(res.counterexample, asm_alphabet)
        # (ii) <true> env <A>
        res = included(env, asm)
        if res.holds:
            outcome["assumption"] = asm
            return None
        c = project_word(res.counterexample, asm_alphabet)
        if member(c):
            return c  # assumption too strong: c is legal, refine
        outcome["violation"] = c
        return None

    learn(asm_alphabet, member, equivalence)
    if "violation" in outcome:
        return Violation(outcome["violation"])
    return LearnedAssumption(outcome["assumption"], member.calls)


@dataclass(frozen=True)
class VerifyResult:
    holds: bool
    assumptions: tuple[Dfa, ...] = ()
    counterexample: Optional[Word] = None


def verify_rule(modules: Sequence[Dfa], property: Dfa) -> VerifyResult:
    """Asymmetric assume-guarantee check that ||modules stays in property.

    Folds right-associatively: an assumption is learned for the head module
    against the product of the remaining ones, then becomes the property the
    tail must satisfy.  On any real violation a shortest global
    counterexample is extracted from the monolithic product (learned
    assumptions can be stronger than the weakest one, so level-local
    violations are only reliable as a failure signal, not as traces).
    """
    if not modules:
        raise ValueError("verify_rule needs at least one module")
    mods = list(modules)
    prop = property
    assumptions: list[Dfa] = []
    while len(mods) >= 2:
        env = sync_product(mods[1:])
        res = learn_assumption(mods[0], prop, env)
        if isinstance(res, Violation):
            return VerifyResult(
                False, tuple(assumptions), _global_counterexample(modules, property)
            )
        assumptions.append(res.assumption)
        prop = res.assumption
        mods = mods[1:]
    final = included(mods[0], prop)
    if not final.holds:
        return VerifyResult(
            False, tuple(assumptions), _global_counterexample(modules, property)
        )
    return VerifyResult(True, tuple(assumptions))


def _global_counterexample(modules: Sequence[Dfa], property: Dfa) -> Word:
    res = included(sync_product(modules), property)
    assert not res.holds, "assume-guarantee failure not confirmed by product"
    return res.counterexample


def decompose(global_mission: Dfa, local_alphabets: Sequence[Alphabet]) -> list[Dfa]:
    """Per-robot missions by natural projection of the global mission."""
    union = local_alphabets[0]
    for ab in local_alphabets[1:]:
        union = union.union(ab)
    if not global_mission.alphabet.issubset(union):
        missing = [e for e in global_mission.alphabet if e not in union]
        raise ValueError(f"local alphabets do not cover the global mission: {missing}")
    return [project(global_mission, ab) for ab in local_alphabets]


def refine_from_counterexample(locals_: Sequence[Dfa], t: Sequence[str]) -> list[Dfa]:
    """Remove the projection of a violating trace from each local mission.

    Agents whose projection of ``t`` is empty keep their mission unchanged
    (removing the empty word would empty the language).
    """
    out: list[Dfa] = []
    for d in locals_:
        p = project_word(t, d.alphabet)
        if len(p) == 0:
            out.append(d)
            continue
        out.append(subtract_word(d, p).dfa)
    return out


# ---------------------------------------------------------------------------
# Coordination edits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoordinationRequest:
    requester: int  # 1-based agent ids
    responder: int
    object: int

    @property
    def request_event(self) -> str:
        return f"?O{self.object}Away"

    @property
    def response_event(self) -> str:
        return f"!O{self.object}Away"

    def to_json_dict(self) -> dict:
        return {"requester": self.requester, "responder": self.responder, "object": self.object}

    @staticmethod
    def from_json_dict(data: dict) -> "CoordinationRequest":
        return CoordinationRequest(int(data["requester"]), int(data["responder"]), int(data["object"]))


def mission_events(d: Dfa) -> list[str]:
    """Event sequence of a single-path mission automaton."""
    if d.is_empty:
        return []
    events: list[str] = []
    q = d.initial
    seen = {q}
    while True:
        outs = d.out_events(q)
        if len(outs) == 0:
            return events
        if len(outs) > 1:
            raise ValueError(f"mission automaton branches at state {q}: {outs}")
        e = outs[0]
        q = d.transitions[(q, e)]
        if q in seen:
            raise ValueError("mission automaton has a cycle")
        seen.add(q)
        events.append(e)


def sequential_mission(events: Sequence[str]) -> Dfa:
    return chain(tuple(events))


def insert_coordination(
    locals_: Sequence[Dfa], req: CoordinationRequest, anchor: str
) -> list[Dfa]:
    """Insert a request/response event pair into two local missions.

    The requester's mission gains the request event up front (after any
    requests already present); the responder's mission gains the response
    event immediately after ``anchor`` (the pick-up of the requested object).
    """
    out = list(locals_)
    r_i = req.requester - 1
    s_i = req.responder - 1
    if not (0 <= r_i < len(out) and 0 <= s_i < len(out)):
        raise ValueError("coordination request references missing agents")

    req_events = mission_events(out[r_i])
    if req.request_event in req_events:
        raise ValueError(f"{req.request_event} already present in requester mission")
    pos = 0
    while pos < len(req_events) and req_events[pos].startswith("?"):
        pos += 1
    out[r_i] = sequential_mission(req_events[:pos] + [req.request_event] + req_events[pos:])

    res_events = mission_events(out[s_i])
    if anchor not in res_events:
        raise ValueError(f"anchor event {anchor!r} not in responder mission")
    if req.response_event in res_events:
        raise ValueError(f"{req.response_event} already present in responder mission")
    at = res_events.index(anchor) + 1
    out[s_i] = sequential_mission(res_events[:at] + [req.response_event] + res_events[at:])
    return out


def verify_separable(modified: Sequence[Dfa], originals: Sequence[Dfa]) -> VerifyResult:
    """Check ||modified stays within ||originals without building the product.

    Valid when the global mission is exactly the product of the original
    locals: the product of the modified missions is contained in it iff each
    modified mission, projected back onto its original alphabet, is contained
    in the original mission.
    """
    for i, (mod, orig) in enumerate(zip(modified, originals)):
        got = project(mod, orig.alphabet)
        res = included(got, orig)
        if not res.holds:
            return VerifyResult(False, (), res.counterexample)
    return VerifyResult(True, ())
