"""Entropy-based recall and precision of workflow nets against logs.

Languages are handled as deterministic automata: the log as a prefix
tree, the net through its reachability graph (silent moves closed,
subsets determinized).  The topological entropy of a language is the
natural log of the spectral radius of its trimmed automaton after
short-circuiting (every accepting state gets an extra edge back to the
initial state).
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .events import EventLog
from .petri import DEFAULT_STATE_BOUND, WorkflowNet, net_size, reachability_graph

SUBSET_STATE_CAP = 1_000_000
POWER_TOL = 1e-9
POWER_MAX_ITER = 100_000
DENSE_LIMIT = 512
ENTROPY_ZERO = 1e-9


class UnsafeNetError(ValueError):
    pass


class DegenerateDenominator(ZeroDivisionError):
    pass


class ConvergenceError(RuntimeError):
    pass


@dataclass
class Dfa:
    """Deterministic automaton; ``delta[s]`` maps labels to successor states."""

    delta: list[dict[str, int]]
    initial: int
    accepting: frozenset[int]

    @property
    def n_states(self) -> int:
        return len(self.delta)

    @property
    def alphabet(self) -> set[str]:
        return {l for row in self.delta for l in row}

    def accepts(self, word: Sequence[str]) -> bool:
        s = self.initial
        for l in word:
            s = self.delta[s].get(l)
            if s is None:
                return False
        return s in self.accepting

    def is_empty(self) -> bool:
        return not self.trim().accepting

    def words(self, max_len: int) -> set[tuple[str, ...]]:
        """Accepted words up to ``max_len`` (for tests and small checks)."""
        out = set()
        frontier = [(self.initial, ())]
        for _ in range(max_len + 1):
            nxt = []
            for s, w in frontier:
                if s in self.accepting:
                    out.add(w)
                for l, t in self.delta[s].items():
                    nxt.append((t, w + (l,)))
            frontier = nxt
        return out

    def trim(self) -> "Dfa":
        """Restrict to states reachable from the initial state and co-reachable
        from an accepting state; an empty language yields a one-state DFA."""
        n = self.n_states
        fwd = {self.initial}
        todo = [self.initial]
        while todo:
            for t in self.delta[todo.pop()].values():
                if t not in fwd:
                    fwd.add(t)
                    todo.append(t)
        back: list[list[int]] = [[] for _ in range(n)]
        for s in range(n):
            for t in self.delta[s].values():
                back[t].append(s)
        bwd = set(a for a in self.accepting if a in fwd)
        todo = list(bwd)
        while todo:
            for s in back[todo.pop()]:
                if s not in bwd and s in fwd:
                    bwd.add(s)
                    todo.append(s)
        keep = sorted(fwd & bwd, key=lambda s: (s != self.initial, s))
        if self.initial not in bwd:
            return Dfa([{}], 0, frozenset())
        ren = {s: k for k, s in enumerate(keep)}
        delta = [{l: ren[t] for l, t in sorted(self.delta[s].items()) if t in ren} for s in keep]
        return Dfa(delta, 0, frozenset(ren[a] for a in self.accepting if a in ren))

    def minimize(self) -> "Dfa":
        """Moore partition refinement on the trimmed automaton."""
        d = self.trim()
        n = d.n_states
        alphabet = sorted(d.alphabet)
        block = [1 if s in d.accepting else 0 for s in range(n)]
        while True:
            sigs = {}
            new = []
            for s in range(n):
                sig = (block[s], tuple(block[d.delta[s][l]] if l in d.delta[s] else -1
                                       for l in alphabet))
                new.append(sigs.setdefault(sig, len(sigs)))
            if len(sigs) == len(set(block)):
                break
            block = new
        order: dict[int, int] = {}
        queue = deque([d.initial])
        order[block[d.initial]] = 0
        while queue:
            s = queue.popleft()
            for l in sorted(d.delta[s]):
                b = block[d.delta[s][l]]
                if b not in order:
                    order[b] = len(order)
                    queue.append(d.delta[s][l])
        delta: list[dict[str, int]] = [dict() for _ in order]
        for s in range(n):
            if block[s] in order:
                delta[order[block[s]]] = {l: order[block[t]] for l, t in d.delta[s].items()}
        acc = frozenset(order[block[s]] for s in d.accepting)
        return Dfa(delta, 0, acc)


def equivalent(a: Dfa, b: Dfa) -> bool:
    """Language equality via isomorphism of minimal automata."""
    ma, mb = a.minimize(), b.minimize()
    return ma.delta == mb.delta and ma.accepting == mb.accepting


def automaton_from_words(words: Iterable[Sequence[str]]) -> Dfa:
    """Prefix-tree acceptor of a finite set of words."""
    delta: list[dict[str, int]] = [{}]
    accepting = set()
    for w in words:
        s = 0
        for l in w:
            t = delta[s].get(l)
            if t is None:
                t = len(delta)
                delta.append({})
                delta[s][l] = t
            s = t
        accepting.add(s)
    return Dfa(delta, 0, frozenset(accepting))


def log_automaton(log: EventLog) -> Dfa:
    """Prefix tree of the log's label sequences (set semantics)."""
    if len(log) == 0:
        raise ValueError("empty log")
    return automaton_from_words(log.label_sequences())


def model_automaton(wf: WorkflowNet, state_bound: int = DEFAULT_STATE_BOUND) -> Dfa:
    """Deterministic automaton of the net's observable runs from [i] to [f]."""
    rg = reachability_graph(wf, state_bound)
    if any(c > 1 for m in rg.states for c in m):
        raise UnsafeNetError("net is not safe; its language is not handled")
    labels = rg.labels
    silent: list[list[int]] = [[] for _ in rg.states]
    moves: list[list[tuple[str, int]]] = [[] for _ in rg.states]
    for s, t, d in rg.edges:
        if labels[t] is None:
            silent[s].append(d)
        else:
            moves[s].append((labels[t], d))

    def closure(states: Iterable[int]) -> frozenset[int]:
        seen = set(states)
        todo = list(seen)
        while todo:
            for d in silent[todo.pop()]:
                if d not in seen:
                    seen.add(d)
                    todo.append(d)
        return frozenset(seen)

    start = closure([0])
    index = {start: 0}
    subsets = [start]
    delta: list[dict[str, int]] = []
    k = 0
    while k < len(subsets):
        cur = subsets[k]
        succ: dict[str, set[int]] = {}
        for s in cur:
            for l, d in moves[s]:
                succ.setdefault(l, set()).add(d)
        row = {}
        for l in sorted(succ):
            tgt = closure(succ[l])
            j = index.get(tgt)
            if j is None:
                j = len(subsets)
                if j >= SUBSET_STATE_CAP:
                    raise RuntimeError(f"determinization exceeded {SUBSET_STATE_CAP} states")
                index[tgt] = j
                subsets.append(tgt)
            row[l] = j
        delta.append(row)
        k += 1
    fin = rg.final_state
    accepting = frozenset(j for j, sub in enumerate(subsets) if fin is not None and fin in sub)
    return Dfa(delta, 0, accepting).trim()


def intersect(d1: Dfa, d2: Dfa) -> Dfa:
    """Product automaton accepting words accepted by both (trimmed)."""
    start = (d1.initial, d2.initial)
    index = {start: 0}
    pairs = [start]
    delta: list[dict[str, int]] = []
    k = 0
    while k < len(pairs):
        a, b = pairs[k]
        row = {}
        ra, rb = d1.delta[a], d2.delta[b]
        if len(rb) < len(ra):
            common = [l for l in rb if l in ra]
        else:
            common = [l for l in ra if l in rb]
        for l in sorted(common):
            tgt = (ra[l], rb[l])
            j = index.get(tgt)
            if j is None:
                j = len(pairs)
                index[tgt] = j
                pairs.append(tgt)
            row[l] = j
        delta.append(row)
        k += 1
    acc = frozenset(j for j, (a, b) in enumerate(pairs) if a in d1.accepting and b in d2.accepting)
    return Dfa(delta, 0, acc).trim()


def short_circuit_matrix(d: Dfa) -> sp.csr_matrix:
    """Adjacency (edge-count) matrix of the trimmed DFA plus one edge from
    every accepting state back to the initial state."""
    d = d.trim()
    rows, cols = [], []
    for s, row in enumerate(d.delta):
        for t in row.values():
            rows.append(s)
            cols.append(t)
    for a in d.accepting:
        rows.append(a)
        cols.append(d.initial)
    n = d.n_states
    data = np.ones(len(rows))
    return sp.csr_matrix((data, (rows, cols)), shape=(n, n))


def spectral_radius_dense(a) -> float:
    m = a.toarray() if sp.issparse(a) else np.asarray(a, dtype=float)
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(m))))


def spectral_radius_power(a: sp.csr_matrix, tol: float = POWER_TOL,
                          max_iter: int = POWER_MAX_ITER) -> float:
    """Perron root of an irreducible nonnegative matrix by power iteration.

    Iterates on ``A + I``, which is primitive whenever ``A`` is
    irreducible, so periodic components converge too.
    """
    n = a.shape[0]
    b = (a + sp.identity(n, format="csr")).tocsr()
    v = np.full(n, 1.0 / n)
    lam = 0.0
    for it in range(1, max_iter + 1):
        w = b @ v
        lam_new = float(w.sum())
        w /= lam_new
        if abs(lam_new - lam) <= tol * lam_new and np.max(np.abs(w - v)) <= tol:
            return lam_new - 1.0
        v, lam = w, lam_new
    raise ConvergenceError(
        f"power iteration did not converge in {max_iter} iterations "
        f"(n={n}, last estimate {lam - 1.0:.12g}, last step {abs(lam_new - lam):.3g})")


def spectral_radius(a: sp.csr_matrix) -> float:
    """Largest spectral radius over the strongly connected components of ``a``."""
    n = a.shape[0]
    if n == 0 or a.nnz == 0:
        return 0.0
    ncomp, comp = connected_components(a, directed=True, connection="strong")
    best = 0.0
    coo = a.tocoo()
    internal = comp[coo.row] == comp[coo.col]
    has_edge = np.zeros(ncomp, dtype=bool)
    has_edge[comp[coo.row[internal]]] = True
    for c in np.flatnonzero(has_edge):
        idx = np.flatnonzero(comp == c)
        sub = a[idx][:, idx]
        try:
            rho = spectral_radius_power(sub)
        except ConvergenceError:
            if len(idx) > DENSE_LIMIT:
                raise
            rho = spectral_radius_dense(sub)
        best = max(best, rho)
    return best


def topological_entropy(d: Dfa) -> float:
    """Entropy of the language of ``d`` (0 for the empty language)."""
    t = d.trim()
    if not t.accepting:
        return 0.0
    rho = spectral_radius(short_circuit_matrix(t))
    if rho <= 1.0:
        return 0.0
    h = math.log(rho)
    return 0.0 if h < ENTROPY_ZERO else h


@dataclass(frozen=True)
class QualityReport:
    recall: float
    precision: float
    size: int
    ent_log: float
    ent_model: float
    ent_intersection: float


def _ratio(x: float, y: float, what: str) -> float:
    if y == 0:
        if x == 0:
            return 1.0
        raise DegenerateDenominator(f"{what}: zero denominator with nonzero numerator")
    r = x / y
    if r > 1.0 and r <= 1.0 + 1e-6:
        r = 1.0
    return r


def measure_automata(model: Dfa, log_dfa: Dfa, size: int = 0) -> QualityReport:
    inter = intersect(model, log_dfa)
    e_log = topological_entropy(log_dfa)
    e_model = topological_entropy(model)
    e_int = topological_entropy(inter)
    return QualityReport(
        recall=_ratio(e_int, e_log, "recall"),
        precision=_ratio(e_int, e_model, "precision"),
        size=size,
        ent_log=e_log,
        ent_model=e_model,
        ent_intersection=e_int,
    )


def measure(wf: WorkflowNet, log: EventLog, state_bound: int = DEFAULT_STATE_BOUND) -> QualityReport:
    """Entropy recall/precision of ``wf`` against the log's traces, plus net size."""
    return measure_automata(model_automaton(wf, state_bound), log_automaton(log), net_size(wf))
