"""
The running example, step by step
=================================

Twenty events of two patients, handled by a doctor (a1), a lab (a2)
and a therapist (a3).  We cut the log into agent traces, build the
interaction log and the agent logs, and compose the nets.
"""
from pathlib import Path

from agentminer.composer import discover, verify_bundle
from agentminer.conformance import measure, model_automaton
from agentminer.events import Naming, case_log
from agentminer.logio import ColumnMapping, parse_csv
from agentminer.netio import to_dot
from agentminer.partition import agent_logs, agent_trace_set, interaction_log

table = Path(__file__).resolve().parent.parent / "tests" / "data" / "table1.csv"
selection = parse_csv(table, ColumnMapping(agent_column="type"))
print(f"{len(selection)} events, cases {selection.cases()}, agents {selection.agents()}")

# Every case splits wherever the agent changes hands.
for trace in agent_trace_set(selection):
    print(trace[0].case, trace[0].agent, [e.extras["event"] for e in trace])

# The interaction log keeps the first event of every agent trace and
# names it by its agent.
ilog = interaction_log(selection)
print("interaction log:", ilog.label_sequences())

for agent, log in agent_logs(selection).items():
    print(f"agent log {agent}:", sorted(set(log.label_sequences())))

# Discover the nets.  Each one should be a safe and sound workflow net.
bundle = discover(selection)
for v in verify_bundle(bundle).verdicts:
    print(f"{v.name:12s} size {v.size:3d}  safe {v.safe}  sound {v.sound}")

# A few words of the composed net, shortest first
words = sorted(model_automaton(bundle.mas_net).words(8), key=len)
for w in words[:4]:
    print("  ", " ".join(w))

q = measure(bundle.mas_net, case_log(selection, Naming.AAL))
print(f"MAS net against the case traces: recall {q.recall:.3f}, precision {q.precision:.3f}")

# Graphviz source of the interaction net; pipe it into `dot -Tpng`.
print(to_dot(bundle.interaction_net, "interaction"))
