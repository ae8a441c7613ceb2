from collections import Counter

import pytest
from hypothesis import given, strategies as st

from agentminer.agent_types import (
    assignment_csv,
    cluster_agents,
    dfg_distance,
    distance_matrix_csv,
    identify_agent_types,
    instance_dfgs,
    relabel_to_types,
)
from agentminer.dfg import Dfg, dfg_from_sequences
from agentminer.logio import GeneratorConfig, generate_health_log
from strategies import selections


def dfg(*edges):
    acts = Counter(x for e in edges for x in e)
    return Dfg(acts, Counter(edges))


def groups(assignment):
    out = {}
    for a, t in assignment.items():
        out.setdefault(t, set()).add(a)
    return {frozenset(g) for g in out.values()}


def test_identical_edge_sets():
    assert dfg_distance(dfg(("a", "b")), dfg(("a", "b"))) == 0


def test_subsumption_gives_zero():
    assert dfg_distance(dfg(("a", "b")), dfg(("a", "b"), ("b", "c"))) == 0


def test_disjoint_edge_sets():
    assert dfg_distance(dfg(("a", "b")), dfg(("c", "d"))) == 1


def test_partial_overlap():
    d1 = dfg(("a", "b"), ("b", "c"))
    d2 = dfg(("a", "b"), ("b", "d"), ("d", "e"))
    assert dfg_distance(d1, d2) == pytest.approx(0.5)


def test_edgeless_dfgs():
    a, a2, b = (dfg_from_sequences([(x,)]) for x in "aab")
    assert dfg_distance(a, a2) == 0
    assert dfg_distance(a, b) == 1
    assert dfg_distance(a, dfg(("a", "b"))) == 1


@given(st.lists(st.tuples(st.sampled_from("abcd"), st.sampled_from("abcd")), max_size=8),
       st.lists(st.tuples(st.sampled_from("abcd"), st.sampled_from("abcd")), max_size=8))
def test_distance_is_symmetric_and_bounded(e1, e2):
    d1 = dfg(*e1) if e1 else dfg_from_sequences([("a",)])
    d2 = dfg(*e2) if e2 else dfg_from_sequences([("b",)])
    x = dfg_distance(d1, d2)
    assert 0 <= x <= 1
    assert x == dfg_distance(d2, d1)
    if e1:
        assert dfg_distance(d1, d1) == 0


@pytest.mark.parametrize("seed", [1, 2, 3, 7])
def test_health_instances_form_three_types(seed):
    sel = generate_health_log(GeneratorConfig(cases=128, seed=seed))
    assignment = cluster_agents(instance_dfgs(sel), 0.5)
    assert groups(assignment) == {frozenset({"d1"}), frozenset({"d2", "d4"}),
                                  frozenset({"d3", "d5"})}
    assert assignment["d1"] == "a1"


def test_threshold_extremes():
    dfgs = {"x": dfg(("a", "b")), "y": dfg(("c", "d")), "z": dfg(("e", "f"))}
    assert cluster_agents(dfgs, 0.0) == {"x": "a1", "y": "a2", "z": "a3"}
    assert set(cluster_agents(dfgs, 1.0).values()) == {"a1"}


def test_complete_linkage_does_not_chain():
    # x~y and y~z are close, x and z are far apart
    dfgs = {"x": dfg(("a", "b"), ("b", "c")),
            "y": dfg(("b", "c"), ("c", "d")),
            "z": dfg(("c", "d"), ("d", "e"))}
    assert len(set(cluster_agents(dfgs, 0.5).values())) == 2


def test_no_instances():
    with pytest.raises(ValueError):
        cluster_agents({})


def test_relabel_table1(table1_instances, table1):
    typed = relabel_to_types(table1_instances, {"d1": "a1", "d3": "a3", "d4": "a2"})
    assert [e.agent for e in typed] == [e.agent for e in table1]


def test_relabel_missing_instance(table1_instances):
    with pytest.raises(KeyError, match="d3"):
        relabel_to_types(table1_instances, {"d1": "a1", "d4": "a2"})


@given(selections(max_events=25))
def test_relabel_preserves_everything_but_agents(sel):
    if len(sel) == 0:
        return
    typed, assignment = identify_agent_types(sel)
    assert set(assignment) == {e.agent for e in sel}
    assert len(typed) == len(sel)
    for a, b in zip(sel, typed):
        assert (a.id, a.timestamp, a.case, a.activity) == (b.id, b.timestamp, b.case, b.activity)
        assert b.agent == assignment[a.agent]


def test_csv_exports(table1_instances):
    dfgs = instance_dfgs(table1_instances)
    lines = distance_matrix_csv(dfgs).splitlines()
    assert lines[0] == "agent,d1,d4,d3"
    assert lines[1].startswith("d1,0.000000,")
    assert assignment_csv({"d1": "a1"}) == "instance,type\nd1,a1\n"
