"""PNML and Graphviz DOT serialization of nets."""
from __future__ import annotations

import xml.etree.ElementTree as ET

from .petri import LabeledNet, NetBuilder, WorkflowNet

PNML_NS = "http://www.pnml.org/version-2009/grammar/pnmlcoremodel"


def _text(parent: ET.Element, tag: str, value: str) -> None:
    el = ET.SubElement(parent, tag)
    ET.SubElement(el, "text").text = value


def to_pnml(net: WorkflowNet | LabeledNet, name: str = "net") -> str:
    """Serialize a net as PNML.

    Silent transitions carry a ``toolspecific`` element with
    ``activity="$invisible$"``; the final marking of a workflow net is
    written to a ``finalmarkings`` element.
    """
    wf = net if isinstance(net, WorkflowNet) else None
    n = wf.net if wf else net
    root = ET.Element("pnml")
    el_net = ET.SubElement(root, "net", id=name, type=PNML_NS)
    _text(el_net, "name", name)
    page = ET.SubElement(el_net, "page", id="page0")
    for p in n.places:
        el = ET.SubElement(page, "place", id=p)
        _text(el, "name", p)
        if wf and p == wf.initial:
            _text(el, "initialMarking", "1")
    for t in n.transitions:
        el = ET.SubElement(page, "transition", id=t)
        label = n.labels[t]
        _text(el, "name", t if label is None else label)
        if label is None:
            ET.SubElement(el, "toolspecific", tool="ProM", version="6.4",
                          activity="$invisible$", localNodeID=t)
    for k, (a, b) in enumerate(sorted(n.arcs)):
        ET.SubElement(page, "arc", id=f"arc{k}", source=a, target=b)
    if wf:
        fm = ET.SubElement(el_net, "finalmarkings")
        marking = ET.SubElement(fm, "marking")
        pl = ET.SubElement(marking, "place", idref=wf.final)
        ET.SubElement(pl, "text").text = "1"
    ET.indent(root)
    return ET.tostring(root, encoding="unicode", xml_declaration=True) + "\n"


def read_pnml(text: str) -> WorkflowNet:
    """Parse PNML written by :func:`to_pnml` (or a compatible tool).

    The initial place is the one with an initial marking; the final place
    is taken from ``finalmarkings`` when present, otherwise the unique
    place with an empty postset.
    """
    root = ET.fromstring(text)
    for el in root.iter():
        if isinstance(el.tag, str) and "}" in el.tag:
            el.tag = el.tag.split("}", 1)[1]
    net = root.find("net")
    if net is None:
        raise ValueError("no <net> element")
    b = NetBuilder()
    initial = None
    for el in net.iter("place"):
        if el.get("idref") is not None:
            continue
        pid = el.get("id")
        b.place(pid)
        im = el.find("initialMarking/text")
        if im is not None and int(im.text.strip()) > 0:
            initial = pid
    for el in net.iter("transition"):
        tid = el.get("id")
        silent = any(ts.get("activity") == "$invisible$" for ts in el.findall("toolspecific"))
        name = el.find("name/text")
        label = None if silent else (name.text if name is not None else tid)
        b.transition(tid, label)
    for el in net.iter("arc"):
        b.arc(el.get("source"), el.get("target"))
    lnet = b.build()
    final = None
    fm = net.find("finalmarkings/marking/place")
    if fm is not None:
        final = fm.get("idref")
    else:
        sinks = [p for p in lnet.places if not lnet.postset(p)]
        if len(sinks) == 1:
            final = sinks[0]
    if initial is None or final is None:
        raise ValueError("cannot determine initial/final place")
    return WorkflowNet(lnet, initial, final)


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(net: WorkflowNet | LabeledNet, name: str = "net") -> str:
    """Graphviz rendering: places as circles, silent transitions as filled boxes."""
    wf = net if isinstance(net, WorkflowNet) else None
    n = wf.net if wf else net
    lines = [f"digraph {_q(name)} {{", "  rankdir=LR;"]
    for p in n.places:
        mark = "&#9679;" if wf and p == wf.initial else ""
        attrs = f'shape=circle label="{mark}" width=0.3'
        if wf and p == wf.final:
            attrs += " peripheries=2"
        lines.append(f"  {_q(p)} [{attrs}];")
    for t in n.transitions:
        label = n.labels[t]
        if label is None:
            lines.append(f'  {_q(t)} [shape=box style=filled fillcolor=black label="" width=0.15];')
        else:
            lines.append(f"  {_q(t)} [shape=box label={_q(label)}];")
    for a, b in sorted(n.arcs):
        lines.append(f"  {_q(a)} -> {_q(b)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
