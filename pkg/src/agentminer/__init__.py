"""Agent system discovery from event logs.

Partition a log by agent, mine agent nets and an interaction net,
compose them into a multi-agent workflow net, and compare models by
entropy-based recall and precision.
"""
from .agent_types import cluster_agents, dfg_distance, identify_agent_types
from .composer import DiscoveryBundle, discover, remove_observable_iterations, verify_bundle
from .conformance import QualityReport, measure, topological_entropy
from .dfg import build_dfg, dfg_to_wfnet, filter_dfg
from .events import Event, EventLog, EventSelection, Naming, Trace, case_log
from .inductive import discover_cm_model, discover_tree, inductive_miner, tree_to_wfnet
from .logio import ColumnMapping, GeneratorConfig, generate_health_log, parse_csv, parse_xes
from .partition import agent_log, agent_logs, agent_trace_set, interaction_log
from .petri import WorkflowNet, is_safe, is_sound, net_size
from .pipeline import SweepConfig, pareto_front, run_pipeline

__version__ = "0.1.0"
