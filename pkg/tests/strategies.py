"""Hypothesis strategies shared by the property tests."""
from hypothesis import strategies as st

from agentminer.events import Event, EventSelection


@st.composite
def selections(draw, max_events=30, agents="abc", activities="xyz", cases=3):
    n = draw(st.integers(0, max_events))
    rows = draw(st.lists(
        st.tuples(st.integers(0, 50), st.integers(0, cases - 1),
                  st.sampled_from(activities), st.sampled_from(agents)),
        min_size=n, max_size=n))
    return EventSelection(Event(i, ts, f"c{c}", act, ag) for i, (ts, c, act, ag) in enumerate(rows))
