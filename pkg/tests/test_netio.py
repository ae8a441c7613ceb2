import xml.etree.ElementTree as ET

import pytest

from agentminer.dfg import dfg_from_sequences, dfg_to_wfnet
from agentminer.netio import read_pnml, to_dot, to_pnml
from agentminer.petri import NetBuilder
from test_petri import doctor_net, system_net


@pytest.mark.parametrize("make", [system_net, doctor_net])
def test_pnml_round_trip(make):
    wf = make()
    back = read_pnml(to_pnml(wf, "x"))
    assert back == wf


def test_pnml_round_trip_of_mined_net():
    wf = dfg_to_wfnet(dfg_from_sequences([("a|x", "b|y"), ("a|x",)]))
    assert read_pnml(to_pnml(wf)) == wf


def test_pnml_marks_silent_transitions():
    root = ET.fromstring(to_pnml(system_net()))
    invisible = {t.get("id") for t in root.iter("transition")
                 if t.find("toolspecific") is not None}
    assert invisible == {"t1", "t2", "t6", "t7"}


def test_pnml_without_final_marking_uses_the_sink():
    text = to_pnml(system_net()).replace("<finalmarkings>", "<ignored>").replace(
        "</finalmarkings>", "</ignored>")
    assert read_pnml(text).final == "p8"


def test_read_pnml_rejects_documents_without_net():
    with pytest.raises(ValueError):
        read_pnml("<pnml/>")


def test_dot_lists_every_node_and_arc():
    wf = system_net()
    dot = to_dot(wf, "sys")
    assert dot.startswith('digraph "sys" {')
    assert dot.count(" -> ") == len(wf.net.arcs)
    assert dot.count("fillcolor=black") == 4
    assert 'label="a1"' in dot
    assert "peripheries=2" in dot


def test_dot_escapes_quotes():
    b = NetBuilder()
    b.chain(b.place("i"), b.transition("t", 'say "hi"'), b.place("f"))
    assert 'label="say \\"hi\\""' in to_dot(b.workflow("i", "f"))
