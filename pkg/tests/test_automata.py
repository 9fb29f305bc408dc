import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from cosmoplan import automata as au
from cosmoplan.automata import (
    Alphabet,
    Dfa,
    accepts,
    chain,
    empty,
    included,
    language_equivalent,
    lift,
    minimize,
    project,
    project_word,
    subtract_word,
    sync_product,
    universal,
)
from conftest import all_words, random_dfa, random_word

R1 = ("R1pO1", "R1dO1aW1", "r1")
R2 = ("R2pO2", "R2dO2aW2", "r2")


def robot1_mission() -> Dfa:
    return chain(R1)


def robot2_mission() -> Dfa:
    return chain(R2)


def global_mission() -> Dfa:
    """Interleaving of the two robot chains over the six-event alphabet."""
    return sync_product([robot1_mission(), robot2_mission()])


def pref(*words: tuple, alphabet: Alphabet | None = None) -> Dfa:
    """Prefix-closure automaton of a finite set of words (trie)."""
    letters = alphabet if alphabet is not None else Alphabet.of(e for w in words for e in w)
    nodes: dict[tuple, int] = {(): 0}
    trans: dict[tuple[int, str], int] = {}
    marked = set()
    for w in words:
        for i in range(len(w)):
            prefix, ext = w[:i], w[: i + 1]
            if ext not in nodes:
                nodes[ext] = len(nodes)
            trans[(nodes[prefix], w[i])] = nodes[ext]
        marked.add(nodes[w])
    return Dfa(letters, len(nodes), 0, trans, frozenset(marked))


# -- accepts ----------------------------------------------------------------


def test_accepts_full_mission_is_marked():
    assert accepts(robot1_mission(), R1) == "marked"


def test_accepts_empty_word_at_marked_initial():
    d = universal(Alphabet.of("ab"))
    assert accepts(d, ()) == "marked"


def test_accepts_undefined_path_rejected():
    assert accepts(robot1_mission(), ("r1",)) == "rejected"


def test_accepts_proper_prefix_is_generated():
    assert accepts(robot1_mission(), R1[:2]) == "generated"


def test_accepts_foreign_event_is_an_error():
    with pytest.raises(ValueError):
        accepts(robot1_mission(), ("nope",))


# -- projection ---------------------------------------------------------------


def test_project_global_onto_robot1_gives_local_mission():
    local = project(global_mission(), Alphabet.of(R1))
    assert language_equivalent(local, robot1_mission())


def test_project_global_onto_robot2_gives_local_mission():
    local = project(global_mission(), Alphabet.of(R2))
    assert language_equivalent(local, robot2_mission())


def test_project_onto_full_alphabet_is_identity():
    d = global_mission()
    assert language_equivalent(project(d, d.alphabet), d)


def test_project_word_drops_foreign_events():
    assert project_word(("R1pO1", "R2pO2", "r1"), Alphabet.of(R2)) == ("R2pO2",)


def test_project_rejects_alphabet_not_contained():
    with pytest.raises(ValueError):
        project(robot1_mission(), Alphabet.of(("zzz",)))


def test_projection_soundness_against_string_projection(rng):
    """Generated words project into the projected automaton's language."""
    for _ in range(60):
        d = random_dfa(rng)
        sub = Alphabet.of(e for e in d.alphabet if rng.random() < 0.6)
        if len(sub) == 0:
            continue
        p = project(d, sub)
        for _ in range(40):
            w = random_word(rng, d.alphabet, 6)
            if d.run(w) is not None:
                assert p.run(project_word(w, sub)) is not None


# -- product ------------------------------------------------------------------


def test_product_brute_force_two_letter_example():
    a = pref(("a", "c"))  # pref(ac)
    a = pref(tuple("ac"))
    b = pref(tuple("bc"))
    prod = sync_product([a, b])
    expected = pref(tuple("abc"), tuple("bac"))
    # Brute force every word up to length 3 to pin the language.
    for w in all_words(prod.alphabet, 3):
        want = expected.run(w) is not None
        assert (prod.run(w) is not None) == want, w


def test_product_idempotent_on_identical_automaton():
    d = robot1_mission()
    assert language_equivalent(sync_product([d, d]), d)


def test_product_of_locals_within_global():
    prod = sync_product([robot1_mission(), robot2_mission()])
    assert included(prod, global_mission()).holds


def test_product_soundness_brute_force(rng):
    """w in product iff every projection is in its component (|w| <= 4)."""
    for _ in range(25):
        d1 = random_dfa(rng, max_states=4, alphabet_size=3, density=0.8)
        d2 = random_dfa(rng, max_states=4, alphabet_size=3, density=0.8)
        prod = sync_product([d1, d2])
        for w in all_words(prod.alphabet, 4):
            lhs = prod.run(w) is not None
            rhs = (
                d1.run(project_word(w, d1.alphabet)) is not None
                and d2.run(project_word(w, d2.alphabet)) is not None
            )
            assert lhs == rhs, w


# -- inclusion ----------------------------------------------------------------


def test_included_reflexive():
    d = global_mission()
    assert included(d, d).holds


def test_included_product_in_global():
    prod = sync_product([robot1_mission(), robot2_mission()])
    res = included(prod, global_mission())
    assert res.holds


def test_included_counterexample_is_shortest():
    ab = Alphabet.of("ab")
    a = pref(tuple("ab"), alphabet=ab)
    b = pref(tuple("a"), alphabet=ab)
    res = included(a, b)
    assert not res.holds
    assert res.counterexample == tuple("ab")


def test_included_counterexample_validity(rng):
    for _ in range(80):
        a = random_dfa(rng, max_states=5, alphabet_size=3)
        b = random_dfa(rng, max_states=5, alphabet_size=3)
        res = included(a, b)
        if not res.holds:
            w = res.counterexample
            assert a.run(w) is not None
            assert au.lift(b, a.alphabet.union(b.alphabet)).run(w) is None


def test_included_lifts_smaller_alphabet():
    # b over a sub-alphabet: words of a using events foreign to b are admitted
    # through b's inverse projection.
    a = pref(tuple("ab"))
    b_sub = pref(tuple("a"))  # alphabet {'a'} only
    assert included(a, b_sub).holds
    # But the a-projection still has to fit: 'aa' projects to 'aa' not in pref(a).
    assert not included(pref(tuple("aa"), alphabet=Alphabet.of("ab")), b_sub).holds


# -- minimize / determinize preservation --------------------------------------


def test_minimize_preserves_membership(rng):
    checked = 0
    for _ in range(45):
        d = random_dfa(rng)
        m = minimize(d)
        for _ in range(25):
            w = random_word(rng, d.alphabet)
            assert (d.run(w) is None) == (m.run(w) is None)
            if d.run(w) is not None:
                assert accepts(d, w) == accepts(m, w)
            checked += 1
    assert checked > 1000


def test_minimize_is_minimal_for_chain():
    d = chain(tuple("aba"), Alphabet.of("ab"))
    assert minimize(d).n_states == d.n_states


# -- subtraction ---------------------------------------------------------------


def test_subtract_word_removes_extensions():
    d = pref(tuple("abc"))
    out = subtract_word(d, tuple("ab"))
    assert out.removed
    assert language_equivalent(out.dfa, pref(tuple("a"), alphabet=d.alphabet))


def test_subtract_epsilon_empties_language():
    d = pref(tuple("ab"))
    out = subtract_word(d, ())
    assert out.removed
    assert out.dfa.is_empty
    assert out.dfa.run(()) is None


def test_subtract_word_keeps_sibling_branch():
    d = pref(tuple("ab"), tuple("ac"))
    out = subtract_word(d, tuple("ab"))
    assert language_equivalent(out.dfa, pref(tuple("ac"), alphabet=d.alphabet))


def test_subtract_missing_word_is_flagged_noop():
    d = pref(tuple("ab"))
    out = subtract_word(d, tuple("ba"))
    assert not out.removed
    assert out.dfa is d


def test_subtract_word_result_is_prefix_closed(rng):
    for _ in range(40):
        d = random_dfa(rng, max_states=5, alphabet_size=3)
        w = random_word(rng, d.alphabet, 4)
        if d.run(w) is None:
            continue
        out = subtract_word(d, w).dfa
        for u in all_words(d.alphabet, 4):
            if out.run(u) is not None:
                assert w != u[: len(w)]  # banned prefix truly gone
                for i in range(len(u)):
                    assert out.run(u[:i]) is not None


# -- serialization -------------------------------------------------------------


def test_json_round_trip(tmp_path):
    d = global_mission()
    path = tmp_path / "dfa.json"
    au.save(d, path)
    again = au.load(path)
    assert again == d
    # Deterministic bytes for identical automata.
    au.save(again, tmp_path / "dfa2.json")
    assert (tmp_path / "dfa.json").read_bytes() == (tmp_path / "dfa2.json").read_bytes()


def test_json_rejects_malformed(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"alphabet": ["a"], "states": 1}))
    with pytest.raises(ValueError):
        au.load(path)


# -- hypothesis properties -----------------------------------------------------


@st.composite
def word_over(draw, letters="abc", max_len=6):
    return tuple(draw(st.lists(st.sampled_from(letters), max_size=max_len)))


@given(word_over())
@settings(max_examples=60, deadline=None)
def test_unfolding_of_projection_definition(w):
    sub = Alphabet.of("ab")
    projected = project_word(w, sub)
    # Inductive definition: erase one symbol at a time.
    acc = ()
    for e in w:
        acc = acc + (e,) if e in sub else acc
    assert acc == projected


@given(word_over(letters="ab", max_len=5))
@settings(max_examples=40, deadline=None)
def test_chain_generates_exactly_prefixes(w):
    target = tuple("abab")
    d = chain(target, Alphabet.of("ab"))
    assert (d.run(w) is not None) == (w == target[: len(w)])
