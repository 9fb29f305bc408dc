"""Deterministic finite automata over mission event alphabets.

Events are plain strings (request events start with ``?``, response events
with ``!``).  A :class:`Dfa` plays two language roles at once: its *generated*
language is the set of all words with a defined run (mission specifications
are prefix-closed, so every reachable state generates), while its *marked*
language additionally requires the run to end in a marked state (used as the
completion condition by the planner).

All constructions return automata in a canonical form: states renumbered
``0..n-1`` in breadth-first order, visiting events in alphabet order, so that
equal inputs give bit-identical outputs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from collections import deque
from typing import Iterable, Iterator, Literal, Optional, Sequence

REQUEST_PREFIX = "?"
RESPONSE_PREFIX = "!"

Acceptance = Literal["generated", "marked", "rejected"]


def is_request(event: str) -> bool:
    return event.startswith(REQUEST_PREFIX)


def is_response(event: str) -> bool:
    return event.startswith(RESPONSE_PREFIX)


@dataclass(frozen=True)
class Alphabet:
    """Ordered, duplicate-free set of event names (insertion order kept)."""

    events: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(set(self.events)) != len(self.events):
            raise ValueError(f"duplicate events in alphabet: {self.events}")

    @staticmethod
    def of(events: Iterable[str]) -> "Alphabet":
        out: list[str] = []
        seen: set[str] = set()
        for e in events:
            if e not in seen:
                seen.add(e)
                out.append(e)
        return Alphabet(tuple(out))

    def __iter__(self) -> Iterator[str]:
        return iter(self.events)

    def __len__(self) -> int:
        return len(self.events)

    def __contains__(self, event: str) -> bool:
        return event in self.events

    def union(self, other: "Alphabet") -> "Alphabet":
        return Alphabet.of(tuple(self.events) + tuple(other.events))

    def issubset(self, other: "Alphabet") -> bool:
        return set(self.events) <= set(other.events)

    def without(self, events: Iterable[str]) -> "Alphabet":
        drop = set(events)
        return Alphabet.of(e for e in self.events if e not in drop)


Word = tuple[str, ...]


def word(*events: str) -> Word:
    return tuple(events)


@dataclass(frozen=True)
class Dfa:
    """Partial deterministic automaton.

    ``transitions`` maps ``(state, event) -> state``.  ``n_states == 0``
    encodes the empty language (no word generated, not even the empty one).
    """

    alphabet: Alphabet
    n_states: int
    initial: int
    transitions: dict[tuple[int, str], int] = field(default_factory=dict)
    marked: frozenset[int] = frozenset()

    def __post_init__(self) -> None:
        if self.n_states < 0:
            raise ValueError("n_states must be >= 0")
        if self.n_states > 0 and not (0 <= self.initial < self.n_states):
            raise ValueError(f"initial state {self.initial} out of range")
        for (src, ev), dst in self.transitions.items():
            if not (0 <= src < self.n_states and 0 <= dst < self.n_states):
                raise ValueError(f"transition ({src},{ev})->{dst} references missing state")
            if ev not in self.alphabet:
                raise ValueError(f"transition event {ev!r} not in alphabet")
        for q in self.marked:
            if not (0 <= q < self.n_states):
                raise ValueError(f"marked state {q} out of range")

    # -- basic queries ---------------------------------------------------

    @property
    def is_empty(self) -> bool:
        return self.n_states == 0

    def step(self, state: int, event: str) -> Optional[int]:
        return self.transitions.get((state, event))

    def run(self, w: Sequence[str]) -> Optional[int]:
        """State reached on ``w`` from the initial state, or None."""
        if self.is_empty:
            return None
        q = self.initial
        for e in w:
            nxt = self.step(q, e)
            if nxt is None:
                return None
            q = nxt
        return q

    def out_events(self, state: int) -> list[str]:
        return [e for e in self.alphabet if (state, e) in self.transitions]


def chain(events: Sequence[str], alphabet: Optional[Alphabet] = None) -> Dfa:
    """Linear automaton generating exactly the prefixes of ``events``.

    The final state is the single marked state.  ``alphabet`` may widen the
    event set (extra events have no transitions, so they are blocked).
    """
    ab = alphabet if alphabet is not None else Alphabet.of(events)
    for e in events:
        if e not in ab:
            raise ValueError(f"chain event {e!r} missing from alphabet")
    n = len(events) + 1
    trans = {(i, e): i + 1 for i, e in enumerate(events)}
    return Dfa(ab, n, 0, trans, frozenset({n - 1}))


def universal(alphabet: Alphabet) -> Dfa:
    """Single-state automaton generating (and marking) every word."""
    trans = {(0, e): 0 for e in alphabet}
    return Dfa(alphabet, 1, 0, trans, frozenset({0}))


def empty(alphabet: Alphabet) -> Dfa:
    return Dfa(alphabet, 0, 0, {}, frozenset())


# -- canonicalisation ------------------------------------------------------


def _bfs_normalize(d: Dfa) -> Dfa:
    """Renumber reachable states in BFS order (events in alphabet order)."""
    if d.is_empty:
        return d
    order: dict[int, int] = {d.initial: 0}
    queue = deque([d.initial])
    while queue:
        q = queue.popleft()
        for e in d.alphabet:
            nxt = d.step(q, e)
            if nxt is not None and nxt not in order:
                order[nxt] = len(order)
                queue.append(nxt)
    trans = {
        (order[src], e): order[dst]
        for (src, e), dst in d.transitions.items()
        if src in order and dst in order
    }
    marked = frozenset(order[q] for q in d.marked if q in order)
    return Dfa(d.alphabet, len(order), 0, trans, marked)


# -- operations ------------------------------------------------------------


def accepts(d: Dfa, w: Sequence[str]) -> Acceptance:
    """Classify ``w``: generated, marked (generated + marked state) or rejected."""
    for e in w:
        if e not in d.alphabet:
            raise ValueError(f"event {e!r} not in alphabet")
    q = d.run(w)
    if q is None:
        return "rejected"
    return "marked" if q in d.marked else "generated"


def generates(d: Dfa, w: Sequence[str]) -> bool:
    return d.run(w) is not None


def project_word(w: Sequence[str], sub: Alphabet) -> Word:
    """Natural projection of a word: erase events outside ``sub``."""
    return tuple(e for e in w if e in sub)


def project(d: Dfa, sub: Alphabet) -> Dfa:
    """Automaton for the natural projection of both language roles onto ``sub``.

    Events outside ``sub`` are erased (treated as silent), then the result is
    determinised by subset construction and minimised.
    """
    if len(sub) == 0:
        raise ValueError("projection alphabet must be non-empty")
    if not sub.issubset(d.alphabet):
        extra = [e for e in sub if e not in d.alphabet]
        raise ValueError(f"projection alphabet not contained in DFA alphabet: {extra}")
    if d.is_empty:
        return empty(sub)

    silent = [e for e in d.alphabet if e not in sub]

    def closure(states: frozenset[int]) -> frozenset[int]:
        seen = set(states)
        queue = deque(states)
        while queue:
            q = queue.popleft()
            for e in silent:
                nxt = d.step(q, e)
                if nxt is not None and nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        return frozenset(seen)

    start = closure(frozenset({d.initial}))
    subset_ids: dict[frozenset[int], int] = {start: 0}
    queue = deque([start])
    trans: dict[tuple[int, str], int] = {}
    marked: set[int] = set()
    if start & d.marked:
        marked.add(0)
    while queue:
        cur = queue.popleft()
        cur_id = subset_ids[cur]
        for e in sub:
            targets = {d.step(q, e) for q in cur}
            targets.discard(None)
            if not targets:
                continue
            nxt = closure(frozenset(targets))  # type: ignore[arg-type]
            if nxt not in subset_ids:
                subset_ids[nxt] = len(subset_ids)
                queue.append(nxt)
            trans[(cur_id, e)] = subset_ids[nxt]
            if nxt & d.marked:
                marked.add(subset_ids[nxt])
    det = Dfa(sub, len(subset_ids), 0, trans, frozenset(marked))
    return minimize(det)


def minimize(d: Dfa) -> Dfa:
    """Partition-refinement minimisation preserving generated + marked languages.

    The automaton is completed with a sink so that definedness participates in
    the refinement; the sink class is dropped again afterwards.
    """
    d = _bfs_normalize(d)
    if d.is_empty:
        return d
    sink = d.n_states
    n = d.n_states + 1

    def dst(q: int, e: str) -> int:
        if q == sink:
            return sink
        t = d.step(q, e)
        return sink if t is None else t

    # Initial partition: marked / generated-unmarked / sink.
    block: list[int] = []
    for q in range(n):
        if q == sink:
            block.append(2)
        elif q in d.marked:
            block.append(0)
        else:
            block.append(1)

    changed = True
    while changed:
        changed = False
        signatures: dict[tuple, int] = {}
        new_block = [0] * n
        for q in range(n):
            sig = (block[q],) + tuple(block[dst(q, e)] for e in d.alphabet)
            if sig not in signatures:
                signatures[sig] = len(signatures)
            new_block[q] = signatures[sig]
        if new_block != block:
            block = new_block
            changed = True

    sink_block = block[sink]
    reps: dict[int, int] = {}
    for q in range(d.n_states):
        if block[q] not in reps:
            reps[block[q]] = q
    trans: dict[tuple[int, str], int] = {}
    for b, q in reps.items():
        if b == sink_block:
            continue
        for e in d.alphabet:
            t = d.step(q, e)
            if t is not None and block[t] != sink_block:
                trans[(b, e)] = block[t]
    # Map block ids to a dense range before normalising.
    live = sorted(b for b in reps if b != sink_block)
    remap = {b: i for i, b in enumerate(live)}
    dense_trans = {(remap[s], e): remap[t] for (s, e), t in trans.items()}
    marked = frozenset(remap[block[q]] for q in d.marked)
    out = Dfa(d.alphabet, len(live), remap[block[d.initial]], dense_trans, marked)
    return _bfs_normalize(out)


def sync_product(ds: Sequence[Dfa]) -> Dfa:
    """Synchronous product over the union alphabet.

    A shared event moves every component that has it in its alphabet (all must
    have the transition defined); private events move one component.  A tuple
    state is marked when every component state is marked.
    """
    if not ds:
        raise ValueError("sync_product needs at least one automaton")
    union = ds[0].alphabet
    for d in ds[1:]:
        union = union.union(d.alphabet)
    if any(d.is_empty for d in ds):
        return empty(union)

    start = tuple(d.initial for d in ds)
    ids: dict[tuple[int, ...], int] = {start: 0}
    queue = deque([start])
    trans: dict[tuple[int, str], int] = {}
    marked: set[int] = set()

    def is_marked(state: tuple[int, ...]) -> bool:
        return all(q in d.marked for q, d in zip(state, ds))

    if is_marked(start):
        marked.add(0)
    while queue:
        cur = queue.popleft()
        cur_id = ids[cur]
        for e in union:
            nxt_list: list[int] = []
            ok = True
            for q, d in zip(cur, ds):
                if e in d.alphabet:
                    t = d.step(q, e)
                    if t is None:
                        ok = False
                        break
                    nxt_list.append(t)
                else:
                    nxt_list.append(q)
            if not ok:
                continue
            nxt = tuple(nxt_list)
            if nxt not in ids:
                ids[nxt] = len(ids)
                queue.append(nxt)
                if is_marked(nxt):
                    marked.add(ids[nxt])
            trans[(cur_id, e)] = ids[nxt]
    return Dfa(union, len(ids), 0, trans, frozenset(marked))


def lift(d: Dfa, universe: Alphabet) -> Dfa:
    """Inverse projection: allow events outside ``d.alphabet`` anywhere.

    Adds self-loops on every state for each foreign event, so the generated
    language becomes the inverse projection of the original one.
    """
    if not d.alphabet.issubset(universe):
        raise ValueError("universe must contain the DFA alphabet")
    if d.is_empty:
        return empty(universe)
    extra = [e for e in universe if e not in d.alphabet]
    trans = dict(d.transitions)
    for q in range(d.n_states):
        for e in extra:
            trans[(q, e)] = q
    return Dfa(universe, d.n_states, d.initial, trans, d.marked)


@dataclass(frozen=True)
class Inclusion:
    holds: bool
    counterexample: Optional[Word] = None


def included(a: Dfa, b: Dfa) -> Inclusion:
    """Check L(a) <= L(b) on generated languages.

    Alphabets are unified first by inverse projection (foreign events
    self-loop).  On failure the counterexample is a shortest word of
    L(a) \\ L(b); ties are broken by alphabet order, so results are
    deterministic.
    """
    universe = a.alphabet.union(b.alphabet)
    a_l = lift(a, universe)
    b_l = lift(b, universe)
    if a_l.is_empty:
        return Inclusion(True)
    if b_l.is_empty:
        return Inclusion(False, ())

    sink = -1
    start = (a_l.initial, b_l.initial)
    seen: set[tuple[int, int]] = {start}
    queue: deque[tuple[tuple[int, int], Word]] = deque([(start, ())])
    while queue:
        (qa, qb), w = queue.popleft()
        if qb == sink:
            return Inclusion(False, w)
        for e in universe:
            na = a_l.step(qa, e)
            if na is None:
                continue
            nb = b_l.step(qb, e) if qb != sink else None
            nxt = (na, sink if nb is None else nb)
            if nxt not in seen:
                seen.add(nxt)
                queue.append((nxt, w + (e,)))
    return Inclusion(True)


def language_equivalent(a: Dfa, b: Dfa) -> bool:
    return included(a, b).holds and included(b, a).holds


@dataclass(frozen=True)
class Subtraction:
    dfa: Dfa
    removed: bool  # False when the word was not generated (no-op, flagged)


def subtract_word(d: Dfa, w: Sequence[str]) -> Subtraction:
    """Remove ``w`` and every extension of it from the generated language.

    Keeps the result prefix-closed: the outcome is the largest prefix-closed
    subset of L(d) avoiding ``w``.  If ``w`` is not generated the input is
    returned unchanged with ``removed=False``.
    """
    w = tuple(w)
    if d.run(w) is None:
        return Subtraction(d, False)
    if len(w) == 0:
        return Subtraction(empty(d.alphabet), True)

    # Product with a prefix-tracker: state m in 0..len(w) counts how much of w
    # has been matched so far; DIVERGED means the input can no longer have w
    # as a prefix.  States that complete the match are cut.
    diverged = len(w) + 1

    def track(m: int, e: str) -> int:
        if m == diverged or m >= len(w):
            return diverged
        return m + 1 if w[m] == e else diverged

    start = (d.initial, 0)
    ids: dict[tuple[int, int], int] = {start: 0}
    queue = deque([start])
    trans: dict[tuple[int, str], int] = {}
    marked: set[int] = set()
    if d.initial in d.marked:
        marked.add(0)
    while queue:
        cur = queue.popleft()
        cur_id = ids[cur]
        q, m = cur
        for e in d.alphabet:
            t = d.step(q, e)
            if t is None:
                continue
            nm = track(m, e)
            if nm == len(w):
                continue  # this move would complete the banned word
            nxt = (t, nm)
            if nxt not in ids:
                ids[nxt] = len(ids)
                queue.append(nxt)
                if t in d.marked:
                    marked.add(ids[nxt])
            trans[(cur_id, e)] = ids[nxt]
    out = Dfa(d.alphabet, len(ids), 0, trans, frozenset(marked))
    return Subtraction(minimize(out), True)


# -- serialization ----------------------------------------------------------


def to_json_dict(d: Dfa) -> dict:
    return {
        "alphabet": list(d.alphabet),
        "states": d.n_states,
        "initial": d.initial if not d.is_empty else 0,
        "marked": sorted(d.marked),
        "transitions": sorted(
            [[src, ev, dst] for (src, ev), dst in d.transitions.items()],
            key=lambda t: (t[0], t[1], t[2]),
        ),
    }


def from_json_dict(data: dict) -> Dfa:
    try:
        alphabet = Alphabet.of(data["alphabet"])
        n = int(data["states"])
        initial = int(data["initial"])
        marked = frozenset(int(q) for q in data["marked"])
        trans = {(int(s), str(e)): int(t) for s, e, t in data["transitions"]}
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed DFA JSON: {exc}") from exc
    return Dfa(alphabet, n, initial, trans, marked)


def save(d: Dfa, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_json_dict(d), fh, indent=2, sort_keys=False)
        fh.write("\n")


def load(path) -> Dfa:
    with open(path, "r", encoding="utf-8") as fh:
        return from_json_dict(json.load(fh))
