import random

import pytest

from cosmoplan.automata import Alphabet, Dfa


def random_dfa(rng: random.Random, max_states: int = 8, alphabet_size: int = 4,
               density: float = 0.7) -> Dfa:
    """Random partial DFA with reachable-only states kept implicit."""
    letters = Alphabet.of(chr(ord("a") + i) for i in range(alphabet_size))
    n = rng.randint(1, max_states)
    trans = {}
    for q in range(n):
        for e in letters:
            if rng.random() < density:
                trans[(q, e)] = rng.randrange(n)
    marked = frozenset(q for q in range(n) if rng.random() < 0.4)
    return Dfa(letters, n, 0, trans, marked)


def random_word(rng: random.Random, alphabet: Alphabet, max_len: int = 8) -> tuple:
    k = rng.randint(0, max_len)
    events = list(alphabet)
    return tuple(rng.choice(events) for _ in range(k))


def all_words(alphabet: Alphabet, max_len: int):
    """Every word over ``alphabet`` with length <= max_len (deterministic order)."""
    frontier = [()]
    yield ()
    for _ in range(max_len):
        nxt = []
        for w in frontier:
            for e in alphabet:
                word = w + (e,)
                yield word
                nxt.append(word)
        frontier = nxt


@pytest.fixture
def rng():
    return random.Random(20240811)
