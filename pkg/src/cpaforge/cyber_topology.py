"""Cyber-layer graph model: control nodes, communication links, and edits.

A topology is a value; every edit returns a new topology and leaves its
input untouched. The baseline topology is derived from a model's control
rules (one control node per controlled link), after which operators add
the communication links and extra nodes the file format cannot tell us
about.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Any, Iterable, Mapping

from .errors import (
    DanglingReference,
    DuplicateId,
    DuplicateLink,
    InvalidIdentifier,
    SensorNotAtSource,
    UnknownEndpoint,
    UnknownVertex,
    ValidationFailed,
)
from .inp_model import (
    LINK_KINDS,
    QUANTITIES,
    SENSABLE_QUANTITIES,
    ControlRule,
    InpModel,
    NodeLevelTrigger,
    is_valid_identifier,
)


@dataclass(frozen=True, order=True)
class SensorRef:
    """A sensed quantity on a physical element, e.g. the level of tank T1."""

    element: str
    quantity: str  # pressure | level | flow | status


@dataclass(frozen=True)
class CyberNode:
    id: str
    sensors: frozenset[SensorRef] = frozenset()
    actuators: frozenset[str] = frozenset()
    controls: frozenset[int] = frozenset()  # indices into InpModel.controls


@dataclass(frozen=True)
class CyberLink:
    source: str
    destination: str
    sensors: frozenset[SensorRef] = frozenset()


@dataclass(frozen=True)
class CyberTopology:
    nodes: tuple[CyberNode, ...] = ()
    links: tuple[CyberLink, ...] = ()
    provenance: str = ""

    def node_ids(self) -> list[str]:
        return [n.id for n in self.nodes]

    def find_node(self, node_id: str) -> CyberNode | None:
        for node in self.nodes:
            if node.id == node_id:
                return node
        return None

    def find_link(self, source: str, destination: str) -> CyberLink | None:
        for link in self.links:
            if link.source == source and link.destination == destination:
                return link
        return None

    def sensed(self) -> frozenset[SensorRef]:
        return frozenset(ref for node in self.nodes for ref in node.sensors)

    def actuated(self) -> frozenset[str]:
        return frozenset(a for node in self.nodes for a in node.actuators)

    def owned_controls(self) -> frozenset[int]:
        return frozenset(c for node in self.nodes for c in node.controls)


@dataclass(frozen=True)
class LogicalGraph:
    """Plain directed graph projected out of a topology for metric work."""

    vertices: frozenset[str]
    edges: frozenset[tuple[str, str]]

    @classmethod
    def of(cls, vertices: Iterable[str], edges: Iterable[tuple[str, str]]) -> "LogicalGraph":
        vset = frozenset(vertices)
        eset = frozenset((a, b) for a, b in edges)
        for a, b in eset:
            if a == b:
                raise ValueError(f"self-loop on {a!r}")
            if a not in vset or b not in vset:
                raise UnknownVertex(f"edge ({a!r}, {b!r}) references unknown vertex")
        return cls(vset, eset)


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    subject: str
    message: str

    def __str__(self) -> str:
        return f"{self.severity}[{self.subject}]: {self.message}"


def _sensor_resolves(model: InpModel, ref: SensorRef) -> bool:
    return any(
        ref.quantity in SENSABLE_QUANTITIES.get(kind, frozenset())
        for kind in model.kinds_of(ref.element)
    )


def _check_node_against_model(node: CyberNode, model: InpModel) -> None:
    for ref in sorted(node.sensors):
        if ref.quantity not in QUANTITIES:
            raise DanglingReference(
                f"node {node.id!r}: unknown quantity {ref.quantity!r}"
            )
        if not _sensor_resolves(model, ref):
            raise DanglingReference(
                f"node {node.id!r}: cannot sense {ref.quantity} of {ref.element!r}"
            )
    for act in sorted(node.actuators):
        # Anything a control can drive (pipe/pump/valve) may sit in an
        # actuator set; actuator *attacks* are restricted separately.
        if not model.has(act, LINK_KINDS):
            raise DanglingReference(
                f"node {node.id!r}: {act!r} is not a controllable link element"
            )
    for idx in sorted(node.controls):
        if not 0 <= idx < len(model.controls):
            raise DanglingReference(
                f"node {node.id!r}: control index {idx} out of range"
            )


def derive_baseline_topology(rules: Iterable[ControlRule], model: InpModel) -> CyberTopology:
    """One control node per distinct controlled link, named ``PLC_<link>``.

    Each node actuates its link, senses every node-level trigger source
    among its rules (tank level, junction pressure), and owns those rules.
    Links are left empty: hardware connectivity is operator knowledge.
    """
    grouped: dict[str, list[ControlRule]] = {}
    for rule in rules:
        grouped.setdefault(rule.target_link, []).append(rule)

    nodes = []
    for link_id, link_rules in grouped.items():
        if not model.has(link_id, LINK_KINDS):
            raise DanglingReference(f"rule targets unknown link {link_id!r}")
        sensors = set()
        for rule in link_rules:
            trigger = rule.trigger
            if not isinstance(trigger, NodeLevelTrigger):
                continue
            kinds = model.kinds_of(trigger.node)
            if not kinds:
                raise DanglingReference(
                    f"rule trigger references unknown element {trigger.node!r}"
                )
            if "tank" in kinds:
                sensors.add(SensorRef(trigger.node, "level"))
            elif "junction" in kinds:
                sensors.add(SensorRef(trigger.node, "pressure"))
            # Reservoir triggers carry no sensable quantity; skipped.
        nodes.append(
            CyberNode(
                id=f"PLC_{link_id}",
                sensors=frozenset(sensors),
                actuators=frozenset({link_id}),
                controls=frozenset(rule.index for rule in link_rules),
            )
        )
    return CyberTopology(nodes=tuple(nodes), links=(), provenance=model.source_name)


def add_cyber_node(
    topology: CyberTopology, node: CyberNode, model: InpModel | None = None
) -> CyberTopology:
    """Topology with ``node`` added; the input value is unchanged."""
    if not is_valid_identifier(node.id):
        raise InvalidIdentifier(f"bad node id {node.id!r}")
    if topology.find_node(node.id) is not None:
        raise DuplicateId(f"node id {node.id!r} already present")
    if model is not None:
        _check_node_against_model(node, model)
    return replace(topology, nodes=topology.nodes + (node,))


def remove_cyber_node(topology: CyberTopology, node_id: str) -> CyberTopology:
    """Remove a node and every link touching it."""
    if topology.find_node(node_id) is None:
        raise UnknownEndpoint(f"no node {node_id!r}")
    return replace(
        topology,
        nodes=tuple(n for n in topology.nodes if n.id != node_id),
        links=tuple(
            l for l in topology.links if node_id not in (l.source, l.destination)
        ),
    )


def add_cyber_link(topology: CyberTopology, link: CyberLink) -> CyberTopology:
    if link.source == link.destination:
        raise UnknownEndpoint(f"self-loop on {link.source!r} rejected")
    source = topology.find_node(link.source)
    if source is None:
        raise UnknownEndpoint(f"no node {link.source!r}")
    if topology.find_node(link.destination) is None:
        raise UnknownEndpoint(f"no node {link.destination!r}")
    if topology.find_link(link.source, link.destination) is not None:
        raise DuplicateLink(f"link {link.source}->{link.destination} already present")
    missing = link.sensors - source.sensors
    if missing:
        ref = sorted(missing)[0]
        raise SensorNotAtSource(
            f"{link.source!r} does not sense {ref.quantity} of {ref.element!r}"
        )
    return replace(topology, links=topology.links + (link,))


def remove_cyber_link(topology: CyberTopology, source: str, destination: str) -> CyberTopology:
    if topology.find_link(source, destination) is None:
        raise UnknownEndpoint(f"no link {source}->{destination}")
    return replace(
        topology,
        links=tuple(
            l
            for l in topology.links
            if not (l.source == source and l.destination == destination)
        ),
    )


def to_logical_graph(topology: CyberTopology) -> LogicalGraph:
    """Vertices are node ids, edges are (source, destination) of each link."""
    return LogicalGraph(
        vertices=frozenset(topology.node_ids()),
        edges=frozenset((l.source, l.destination) for l in topology.links),
    )


def validate(topology: CyberTopology, model: InpModel | None = None) -> list[Diagnostic]:
    """Diagnostics for every broken invariant; empty list means valid.

    A warning (not an error) is issued for any node whose sensed data has
    nowhere to go: nonempty sensors but no outgoing link.
    """
    out: list[Diagnostic] = []
    seen_ids: set[str] = set()
    for node in topology.nodes:
        if not is_valid_identifier(node.id):
            out.append(Diagnostic("error", node.id, "invalid node identifier"))
        if node.id in seen_ids:
            out.append(Diagnostic("error", node.id, "duplicate node id"))
        seen_ids.add(node.id)
        if model is not None:
            try:
                _check_node_against_model(node, model)
            except DanglingReference as exc:
                out.append(Diagnostic("error", node.id, exc.message))

    seen_pairs: set[tuple[str, str]] = set()
    for link in topology.links:
        subject = f"{link.source}->{link.destination}"
        if link.source == link.destination:
            out.append(Diagnostic("error", subject, "self-loop"))
        pair = (link.source, link.destination)
        if pair in seen_pairs:
            out.append(Diagnostic("error", subject, "duplicate link"))
        seen_pairs.add(pair)
        source = topology.find_node(link.source)
        if source is None:
            out.append(Diagnostic("error", subject, f"unknown source {link.source!r}"))
        if topology.find_node(link.destination) is None:
            out.append(
                Diagnostic("error", subject, f"unknown destination {link.destination!r}")
            )
        if source is not None:
            for ref in sorted(link.sensors - source.sensors):
                out.append(
                    Diagnostic(
                        "error",
                        subject,
                        f"carried sensor {ref.element}.{ref.quantity} not at source",
                    )
                )

    out_degree = {n.id: 0 for n in topology.nodes}
    for link in topology.links:
        if link.source in out_degree:
            out_degree[link.source] += 1
    for node in topology.nodes:
        if node.sensors and out_degree.get(node.id, 0) == 0:
            out.append(
                Diagnostic("warning", node.id, "sensed data goes nowhere (out-degree 0)")
            )
    return out


# --- JSON snapshot interchange ---------------------------------------------

def _sensor_to_json(ref: SensorRef) -> dict[str, str]:
    return {"element": ref.element, "quantity": ref.quantity}


def _sensor_from_json(obj: Any) -> SensorRef:
    if not isinstance(obj, Mapping) or "element" not in obj or "quantity" not in obj:
        raise ValueError(f"bad sensor reference {obj!r}")
    return SensorRef(str(obj["element"]), str(obj["quantity"]))


def topology_to_json_dict(topology: CyberTopology) -> dict[str, Any]:
    return {
        "provenance": topology.provenance,
        "nodes": [
            {
                "id": n.id,
                "sensors": [_sensor_to_json(r) for r in sorted(n.sensors)],
                "actuators": sorted(n.actuators),
                "controls": sorted(n.controls),
            }
            for n in topology.nodes
        ],
        "links": [
            {
                "source": l.source,
                "destination": l.destination,
                "sensors": [_sensor_to_json(r) for r in sorted(l.sensors)],
            }
            for l in topology.links
        ],
    }


def topology_from_json_dict(data: Mapping[str, Any]) -> CyberTopology:
    """Load a topology snapshot; missing per-node fields default to empty."""
    nodes = tuple(
        CyberNode(
            id=str(n["id"]),
            sensors=frozenset(_sensor_from_json(s) for s in n.get("sensors", [])),
            actuators=frozenset(str(a) for a in n.get("actuators", [])),
            controls=frozenset(int(c) for c in n.get("controls", [])),
        )
        for n in data.get("nodes", [])
    )
    links = tuple(
        CyberLink(
            source=str(l["source"]),
            destination=str(l["destination"]),
            sensors=frozenset(_sensor_from_json(s) for s in l.get("sensors", [])),
        )
        for l in data.get("links", [])
    )
    topology = CyberTopology(
        nodes=nodes, links=links, provenance=str(data.get("provenance", ""))
    )
    problems = [d for d in validate(topology) if d.severity == "error"]
    if problems:
        raise ValidationFailed(problems)
    return topology


def topology_to_json(topology: CyberTopology) -> str:
    return json.dumps(topology_to_json_dict(topology), indent=2, sort_keys=False) + "\n"


def topology_from_json(text: str) -> CyberTopology:
    return topology_from_json_dict(json.loads(text))
