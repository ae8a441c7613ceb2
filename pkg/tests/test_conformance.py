import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, strategies as st

from agentminer.conformance import (
    DegenerateDenominator,
    Dfa,
    UnsafeNetError,
    _ratio,
    automaton_from_words,
    equivalent,
    intersect,
    log_automaton,
    measure,
    measure_automata,
    model_automaton,
    short_circuit_matrix,
    spectral_radius,
    spectral_radius_dense,
    topological_entropy,
)
from agentminer.events import Naming, case_log, log_from_sequences
from agentminer.petri import NetBuilder, StateBoundExceeded
from test_petri import build, chain

SIGMA_STAR = Dfa([{"a": 0, "b": 0}], 0, frozenset({0}))


def walk_count_entropy(d, n=64):
    """ln(W_n)/n for walks of length n from the initial state of the
    short-circuited automaton, with exact integer counts."""
    t = d.trim()
    a = short_circuit_matrix(t).toarray().astype(int).tolist()
    v = [1] * len(a)
    for _ in range(n):
        v = [sum(x * y for x, y in zip(row, v)) for row in a]
    return math.log(v[t.initial]) / n


@st.composite
def dfas(draw, max_states=8):
    n = draw(st.integers(1, max_states))
    alphabet = "abc"[:draw(st.integers(1, 3))]
    delta = []
    for _ in range(n):
        row = {}
        for l in alphabet:
            t = draw(st.one_of(st.none(), st.integers(0, n - 1)))
            if t is not None:
                row[l] = t
        delta.append(row)
    acc = draw(st.sets(st.integers(0, n - 1), min_size=1))
    return Dfa(delta, 0, frozenset(acc))


# -- automata -------------------------------------------------------------------

def test_log_trie():
    d = log_automaton(log_from_sequences([("a",), ("a", "b")]))
    assert d.n_states == 3 and len(d.accepting) == 2


def test_log_trie_has_set_semantics():
    one = log_automaton(log_from_sequences([("a", "b")]))
    many = log_automaton(log_from_sequences([("a", "b")] * 1000))
    assert one == many


def test_table1_trie(table1):
    d = log_automaton(case_log(table1, Naming.AOL))
    assert sorted(map(len, d.words(20))) == [3, 17]


def test_chain_automaton():
    assert model_automaton(chain("a")).words(4) == {("a",)}


def test_unsafe_net_rejected():
    wf = build([("i", "t"), ("t", "p"), ("t", "q"), ("p", "u"), ("q", "v"), ("u", "r"),
                ("v", "r"), ("r", "w"), ("w", "f")],
               {"t": None, "u": "a", "v": "b", "w": None}, check=False)
    with pytest.raises(UnsafeNetError):
        model_automaton(wf)


def test_unbounded_net_rejected():
    wf = build([("i", "t"), ("t", "i"), ("t", "p"), ("i", "u"), ("u", "f"), ("p", "v"),
                ("v", "f")], {"t": "a", "u": None, "v": None}, check=False)
    with pytest.raises(StateBoundExceeded):
        model_automaton(wf, 50)


def test_intersection():
    l1 = automaton_from_words([("a",)])
    l2 = automaton_from_words([("a",), ("b",)])
    assert intersect(l1, l2).words(3) == {("a",)}
    assert intersect(l1, automaton_from_words([("b",)])).is_empty()


@given(dfas())
def test_intersection_is_idempotent(d):
    assert equivalent(intersect(d, d), d)


@given(dfas())
def test_minimization_preserves_language(d):
    assert d.minimize().words(5) == d.words(5)


# -- entropy -------------------------------------------------------------------

def test_sigma_star_entropy_is_ln3():
    dense = math.log(spectral_radius_dense(short_circuit_matrix(SIGMA_STAR)))
    assert dense == pytest.approx(math.log(3), abs=1e-12)
    assert topological_entropy(SIGMA_STAR) == pytest.approx(dense, abs=1e-6)


def test_a_star_entropy_is_ln2():
    assert topological_entropy(Dfa([{"a": 0}], 0, frozenset({0}))) == pytest.approx(
        math.log(2), abs=1e-6)


def test_empty_language_has_zero_entropy():
    assert topological_entropy(Dfa([{"a": 0}], 0, frozenset())) == 0


def test_single_word_has_zero_entropy():
    # {a}: one cycle i -a-> s -> i, spectral radius 1
    assert topological_entropy(automaton_from_words([("a",)])) == 0


@given(dfas())
def test_entropy_matches_walk_count(d):
    if d.trim().is_empty():
        assert topological_entropy(d) == 0
        return
    assert topological_entropy(d) == pytest.approx(walk_count_entropy(d), abs=0.02)


@given(dfas())
def test_power_iteration_agrees_with_dense(d):
    a = short_circuit_matrix(d)
    assert spectral_radius(a) == pytest.approx(spectral_radius_dense(a), abs=1e-6)


def test_periodic_component_converges():
    # a pure 3-cycle, where plain power iteration would oscillate
    a = np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]], dtype=float)
    assert spectral_radius(sp.csr_matrix(a)) == pytest.approx(1.0, abs=1e-9)


# -- measure -------------------------------------------------------------------

def flower(*labels):
    b = NetBuilder()
    b.place("i"), b.place("h"), b.place("f")
    b.chain("i", b.transition("in"), "h")
    b.chain("h", b.transition("out"), "f")
    for l in labels:
        b.chain("h", b.transition(f"t_{l}", l), "h")
    return b.workflow("i", "f")


def test_identical_languages():
    seqs = [("a", "b"), ("a", "c")]
    b = NetBuilder()
    b.place("i"), b.place("p"), b.place("f")
    b.chain("i", b.transition("ta", "a"), "p")
    b.chain("p", b.transition("tb", "b"), "f")
    b.chain("p", b.transition("tc", "c"), "f")
    q = measure(b.workflow("i", "f"), log_from_sequences(seqs))
    assert q.recall == pytest.approx(1) and q.precision == pytest.approx(1)
    assert q.size == 3 + 3 + 6


def test_flower_model_is_imprecise():
    log = log_from_sequences([("a", "b"), ("b", "a", "b")])
    q = measure(flower("a", "b"), log)
    assert q.recall == pytest.approx(1, abs=1e-9)
    assert q.precision < 1


def test_unfit_model_has_lower_recall():
    log = log_from_sequences([("a",), ("a", "a"), ("a", "a", "a"), ("b",)])
    wf = chain("a")
    q = measure(wf, log)
    assert 0 <= q.recall < 1


def test_degenerate_denominator():
    with pytest.raises(DegenerateDenominator):
        _ratio(0.5, 0.0, "recall")


def test_finite_log_against_sigma_star():
    q = measure_automata(SIGMA_STAR, automaton_from_words([("a",)]))
    assert q.recall == 1 and q.precision == 0


def test_zero_over_zero_is_one():
    q = measure_automata(automaton_from_words([("a",)]), automaton_from_words([("a",)]))
    assert q.recall == 1 and q.precision == 1


@given(dfas(), dfas())
def test_measure_is_invariant_under_minimization(m, l):
    try:
        q1 = measure_automata(m, l)
    except DegenerateDenominator:
        return
    q2 = measure_automata(m.minimize(), l.minimize())
    assert q1.recall == pytest.approx(q2.recall, abs=1e-6)
    assert q1.precision == pytest.approx(q2.precision, abs=1e-6)
    assert -1e-6 <= q1.recall <= 1 + 1e-6 and -1e-6 <= q1.precision <= 1 + 1e-6


def test_adding_model_behaviour_outside_log_never_raises_precision():
    log = log_from_sequences([("a", "b"), ("a", "b", "a", "b")])
    narrow = measure(flower("a", "b"), log).precision
    wide = measure(flower("a", "b", "c"), log).precision
    assert wide <= narrow + 1e-9


def test_adding_accepted_trace_never_lowers_recall():
    wf = flower("a", "b")
    base = measure(wf, log_from_sequences([("a",), ("c",)])).recall
    more = measure(wf, log_from_sequences([("a",), ("c",), ("a", "b", "a")])).recall
    assert more >= base - 1e-9
