import pytest
from hypothesis import given

from agentminer.events import Naming, case_trace_set, name_of
from agentminer.partition import agent_log, agent_logs, agent_trace_set, interaction_log
from conftest import names
from strategies import selections


def test_agent_trace_set_of_running_example(table1):
    got = {names(t) for t in agent_trace_set(table1)}
    assert got == {
        ("ea", "eb", "ee"), ("ec", "ed", "et"), ("ef", "eg"),
        ("eh", "ei", "ej", "ek", "el", "em", "en", "eo", "ep"), ("eq", "er", "es"),
    }


def test_interaction_log_of_running_example(table1):
    log = interaction_log(table1)
    assert {e.extras["event"] for e in log.selection} == {"ea", "ec", "ef", "eh", "eq"}
    assert {names(t) for t in log.traces} == {("ea", "ef", "eh", "eq"), ("ec",)}
    assert log.naming is Naming.AGENT
    assert set(log.label_sequences()) == {("a1", "a2", "a3", "a1"), ("a1",)}


def test_agent_log_of_a1(table1):
    log = agent_log(table1, "a1")
    assert {e.extras["event"] for e in log.selection} == {f"e{c}" for c in "abcdeqrst"}
    assert {names(t) for t in log.traces} == {("ea", "eb", "ee"), ("ec", "ed", "et"), ("eq", "er", "es")}
    assert log.label_sequences()[0] == ("a1|check", "a1|analyze", "a1|prescribe")


def test_unknown_agent(table1):
    with pytest.raises(KeyError):
        agent_log(table1, "a9")


def test_agent_logs_cover_all_agents(table1):
    assert list(agent_logs(table1)) == ["a1", "a2", "a3"]


def test_instances_give_same_traces_here(table1_instances):
    # one instance per type in the running example
    assert len(agent_trace_set(table1_instances)) == 5
    assert set(interaction_log(table1_instances).label_sequences()) == {("d1", "d4", "d3", "d1"), ("d1",)}


@given(selections())
def test_agent_traces_partition_selection(sel):
    traces = agent_trace_set(sel)
    ids = [e.id for t in traces for e in t]
    assert sorted(ids) == sorted(e.id for e in sel)
    for t in traces:
        assert len({e.case for e in t}) == 1 and len({e.agent for e in t}) == 1


@given(selections())
def test_case_traces_are_concatenations_of_agent_traces(sel):
    by_case = {}
    for t in agent_trace_set(sel):
        by_case.setdefault(t[0].case, []).append(t)
    for ct in case_trace_set(sel):
        parts = sorted(by_case[ct[0].case], key=lambda t: t[0].key)
        assert tuple(e for t in parts for e in t) == tuple(ct)


@given(selections())
def test_interaction_traces_have_no_repeated_agent(sel):
    for seq in interaction_log(sel).label_sequences():
        assert all(a != b for a, b in zip(seq, seq[1:]))


@given(selections())
def test_namings_are_total(sel):
    for e in sel:
        for n in Naming:
            assert isinstance(name_of(e, n), str)
