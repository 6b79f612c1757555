"""cpaforge: turn EPANET water-network models into cyber-physical attack
scenarios, edit the cyber topology, and score its path-diversity resilience."""

from .errors import (
    DanglingReference,
    DuplicateId,
    DuplicateLink,
    EndpointMismatch,
    EnumerationBudgetExceeded,
    GraphTooSmall,
    IncompleteParams,
    InvalidIdentifier,
    InvalidWindow,
    MalformedControl,
    MalformedSection,
    SensorNotAtSource,
    ToolError,
    UnknownAttackKind,
    UnknownCommand,
    UnknownEndpoint,
    UnknownSession,
    UnknownTarget,
    UnknownVertex,
    ValidationFailed,
)
from .inp_model import ControlRule, InpModel, extract_control_rules, inventory, parse_inp, to_inp_text
from .cyber_topology import (
    CyberLink,
    CyberNode,
    CyberTopology,
    LogicalGraph,
    SensorRef,
    add_cyber_link,
    add_cyber_node,
    derive_baseline_topology,
    remove_cyber_link,
    remove_cyber_node,
    to_logical_graph,
    validate,
)
from .attack_studio import (
    AttackSpec,
    AttackWindow,
    TimeCondition,
    ValueCondition,
    build_attack,
    parse_cpa,
    render_cpa,
)
from .resilience import (
    DiversityParams,
    Path,
    ResilienceReport,
    all_simple_paths,
    effective_path_diversity,
    epd,
    k_sd_cumulative,
    k_sd_max,
    path_diversity,
    resilience_report,
    shortest_path,
    tgd,
)
from .session_service import Command, Session, SessionStore, apply, create_app, create_session, export, report

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "ToolError", "MalformedSection", "MalformedControl", "DanglingReference",
    "InvalidIdentifier", "DuplicateId", "DuplicateLink", "UnknownEndpoint",
    "SensorNotAtSource", "UnknownTarget", "IncompleteParams", "InvalidWindow",
    "UnknownAttackKind", "ValidationFailed", "EndpointMismatch", "UnknownVertex",
    "EnumerationBudgetExceeded", "GraphTooSmall", "UnknownSession", "UnknownCommand",
    # network model
    "InpModel", "ControlRule", "parse_inp", "extract_control_rules", "inventory",
    "to_inp_text",
    # cyber topology
    "CyberTopology", "CyberNode", "CyberLink", "SensorRef", "LogicalGraph",
    "derive_baseline_topology", "add_cyber_node", "remove_cyber_node",
    "add_cyber_link", "remove_cyber_link", "to_logical_graph", "validate",
    # attacks and scenario files
    "AttackSpec", "AttackWindow", "TimeCondition", "ValueCondition",
    "build_attack", "render_cpa", "parse_cpa",
    # resilience metrics
    "Path", "DiversityParams", "ResilienceReport", "path_diversity",
    "shortest_path", "all_simple_paths", "k_sd_max", "k_sd_cumulative",
    "effective_path_diversity", "epd", "tgd", "resilience_report",
    # sessions
    "Session", "Command", "SessionStore", "create_session", "apply",
    "report", "export", "create_app",
]
