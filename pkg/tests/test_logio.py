import pytest
from hypothesis import given

from agentminer.events import case_log
from agentminer.logio import (
    ColumnMapping, GeneratorConfig, LogFormatError, THERAPIES, TESTS, generate_health_log,
    parse_csv, parse_timestamp, parse_xes, role_violations, variant_frequency_filter, write_csv,
)
from agentminer.events import Event, EventSelection
from strategies import selections


def test_table1_csv(table1):
    assert len(table1) == 20
    assert table1.cases() == ["case1", "case2"]
    assert table1.agents() == ["a1", "a2", "a3"]


def test_table1_instances(table1_instances):
    # three doctors act in the running example: d1, d4, d3
    assert table1_instances.agents() == ["d1", "d4", "d3"]


def test_header_only(tmp_path):
    p = tmp_path / "h.csv"
    p.write_text("case,activity,agent,timestamp\n")
    assert len(parse_csv(p)) == 0


def test_missing_agent_cell(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("case,activity,agent,timestamp\nc,a,g,2023-01-01T00:00:00\nc,b,,2023-01-01T00:01:00\n")
    with pytest.raises(LogFormatError, match="missing attribute 'agent' at row 3"):
        parse_csv(p)


def test_missing_column(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("case,activity,timestamp\n")
    with pytest.raises(LogFormatError, match="'agent'"):
        parse_csv(p)


def test_bad_timestamp(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("case,activity,agent,timestamp\nc,a,g,yesterday\n")
    with pytest.raises(LogFormatError, match="row 2"):
        parse_csv(p)


def test_timestamp_formats():
    assert parse_timestamp("1970-01-01T00:00:01Z") == 1_000_000
    assert parse_timestamp("1970-01-01T01:00:01+01:00") == 1_000_000
    assert parse_timestamp("1500") == 1_500_000
    assert parse_timestamp("1500", "epoch-ms") == 1_500_000
    assert parse_timestamp("01/01/1970 00:00", "%d/%m/%Y %H:%M") == 0


def test_custom_columns(tmp_path):
    p = tmp_path / "c.csv"
    p.write_text("id,task,who,when\n1,a,x,10\n1,b,y,20\n")
    sel = parse_csv(p, ColumnMapping("id", "task", "who", "when", "epoch-ms"))
    assert [(e.activity, e.agent, e.timestamp) for e in sel] == [("a", "x", 10_000), ("b", "y", 20_000)]


def test_mapping_validation():
    with pytest.raises(ValueError):
        ColumnMapping("a", "a", "b", "c")


@given(selections())
def test_csv_round_trip(sel):
    text = write_csv(sel)
    import io
    back = parse_csv(io.StringIO(text))
    key = lambda s: sorted((e.timestamp, e.case, e.activity, e.agent) for e in s)
    assert key(back) == key(sel)


def test_csv_quoting(tmp_path):
    sel = EventSelection([Event(0, 0, 'c,"1"', "a\nb", "g")])
    p = tmp_path / "q.csv"
    write_csv(sel, p)
    back = parse_csv(p)
    assert (back[0].case, back[0].activity) == ('c,"1"', "a\nb")


XES = """<?xml version="1.0" encoding="UTF-8"?>
<log xmlns="http://www.xes-standard.org/">
  <trace><string key="concept:name" value="t1"/>
    <event><string key="concept:name" value="a"/><string key="org:resource" value="r1"/>
      <date key="time:timestamp" value="2023-01-01T10:00:00.000+00:00"/></event>
    <event><string key="concept:name" value="b"/><string key="org:resource" value="r1"/>
      <date key="time:timestamp" value="2023-01-01T11:00:00.000+00:00"/></event>
  </trace>
  <trace><string key="concept:name" value="t2"/>
    <event><string key="concept:name" value="a"/><string key="org:resource" value="r1"/>
      <date key="time:timestamp" value="2023-01-02T10:00:00.000+00:00"/></event>
  </trace>
</log>"""


def test_xes(tmp_path):
    p = tmp_path / "l.xes"
    p.write_text(XES)
    sel = parse_xes(p)
    assert len(sel) == 3
    assert sel.cases() == ["t1", "t2"]
    assert sel.agents() == ["r1"]


def test_xes_single_trace():
    text = XES.split("<trace><string key=\"concept:name\" value=\"t2\"/>")[0] + "</log>"
    sel = parse_xes(text)
    assert len(sel) == 2 and sel.cases() == ["t1"]


def test_xes_missing_resource():
    bad = XES.replace('<string key="org:resource" value="r1"/>\n      <date key="time:timestamp" '
                      'value="2023-01-01T11:00:00.000+00:00"/>',
                      '<date key="time:timestamp" value="2023-01-01T11:00:00.000+00:00"/>')
    with pytest.raises(LogFormatError, match="event 1"):
        parse_xes(bad)


def test_xes_malformed():
    with pytest.raises(LogFormatError):
        parse_xes("<log><trace>")


def _variant_log(variants):
    events, ts = [], 0
    for c, variant in enumerate(variants):
        for a in variant:
            ts += 1
            events.append(Event(len(events), ts, f"c{c}", a, "g"))
    return EventSelection(events)


def test_vff_keeps_dominant_variant():
    sel = _variant_log(["A"] * 8 + ["B", "C"])
    kept = variant_frequency_filter(sel, 0.8)
    assert set(case_log(kept).label_sequences()) == {("A",)}
    assert len(kept.cases()) == 8


def test_vff_whole_variants():
    sel = _variant_log(["AB"] * 4)
    assert len(variant_frequency_filter(sel, 0.1)) == len(sel)


def test_vff_identity_and_range():
    sel = _variant_log(["AB", "C"])
    assert variant_frequency_filter(sel, 1.0) == sel
    with pytest.raises(ValueError):
        variant_frequency_filter(sel, 0)


def test_vff_ties_are_lexicographic():
    sel = _variant_log(["B", "A", "C", "C"])
    assert set(case_log(variant_frequency_filter(sel, 0.75)).label_sequences()) == {("C",), ("A",)}


@given(selections())
def test_vff_prefix_property(sel):
    from collections import Counter
    counts = Counter(case_log(sel).label_sequences())
    ranked = [v for v, _ in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))]
    for vff in (0.2, 0.5, 0.9):
        kept = set(case_log(variant_frequency_filter(sel, vff)).label_sequences()) if len(sel) else set()
        assert kept == set(ranked[:len(kept)])


def test_generator_shape():
    sel = generate_health_log(GeneratorConfig(cases=64, seed=7))
    log = case_log(sel)
    assert len(log) == 64
    for t in log.traces:
        assert (t[0].agent, t[0].activity) == ("d1", "check")
        assert (t[-1].agent, t[-1].activity) == ("d1", "discharge")
    assert not role_violations(sel)
    assert {e.activity for e in sel} <= {"check", "analyze", "prescribe", "discharge", *TESTS, *THERAPIES}


def test_generator_minimal_path():
    sel = generate_health_log(GeneratorConfig(cases=1, max_rework_rounds=0))
    assert [(e.agent, e.activity) for e in sel] == [("d1", "check"), ("d1", "analyze"), ("d1", "discharge")]


def test_generator_deterministic():
    cfg = GeneratorConfig(cases=50, seed=11)
    assert write_csv(generate_health_log(cfg)) == write_csv(generate_health_log(cfg))


def test_generator_cases_independent_of_count():
    small = case_log(generate_health_log(GeneratorConfig(cases=5, seed=3))).label_sequences()
    big = case_log(generate_health_log(GeneratorConfig(cases=40, seed=3))).label_sequences()
    assert big[:5] == small


def test_generator_config_validation():
    with pytest.raises(ValueError):
        GeneratorConfig(cases=0)
    with pytest.raises(ValueError):
        GeneratorConfig(prescription_probabilities={"yoga": 1.5})
