"""
Entropy-based recall and precision
==================================

The size of a language is measured by its topological entropy: the
growth rate of the number of words, read off the spectral radius of a
short-circuited automaton.
"""
import math

import numpy as np

from agentminer.conformance import (
    Dfa,
    automaton_from_words,
    intersect,
    measure_automata,
    short_circuit_matrix,
    topological_entropy,
)

# {a, b}* : one state, two loops, plus the loop added by short-circuiting
sigma_star = Dfa([{"a": 0, "b": 0}], 0, frozenset({0}))
print("ent({a,b}*) =", topological_entropy(sigma_star), " ln 3 =", math.log(3))
print(short_circuit_matrix(sigma_star).toarray())

# Walk counts grow like rho^n, so ln(W_n)/n approaches the entropy.
a = short_circuit_matrix(sigma_star).toarray()
for n in (4, 16, 64):
    w = np.linalg.matrix_power(a, n).sum()
    print(f"n={n:3d}  ln(W_n)/n = {math.log(w) / n:.6f}")

# A log is a finite language; its automaton is a prefix tree.
log = automaton_from_words([("a", "b"), ("a", "b", "a", "b"), ("b",)])
model = Dfa([{"a": 1, "b": 2}, {"b": 0}, {}], 0, frozenset({0, 2}))  # (ab)*(b|)
print("log entropy  ", topological_entropy(log))
print("model entropy", topological_entropy(model))
print("intersection ", topological_entropy(intersect(model, log)))

q = measure_automata(model, log)
print(f"recall {q.recall:.3f}  precision {q.precision:.3f}")

# A flower model accepts everything over its alphabet: perfect recall,
# but the extra behaviour drives precision down.
flower = Dfa([{"a": 0, "b": 0}], 0, frozenset({0}))
q = measure_automata(flower, log)
print(f"flower: recall {q.recall:.3f}  precision {q.precision:.3f}")
