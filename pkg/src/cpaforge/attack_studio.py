"""Build cyber-attack specifications and render/parse ``.cpa`` scenario files.

Four attack kinds are supported:

* ``communication`` - intercept a cyber link and replace the values it carries
* ``control``       - swap one control rule for an attacker-supplied rule
* ``sensor``        - falsify the readings of one sensed quantity
* ``actuator``      - force a physical link element into a chosen state

The ``.cpa`` document grammar is line-oriented with ``;`` comments and four
fixed-order sections. Rendering is canonical: LF line endings, uppercase
section headers, single-space token separators, sets serialised sorted. Two
renders of equal values are byte-identical, and ``parse_cpa`` inverts
``render_cpa`` exactly.

Section rows::

    [CYBERNODES]   <id> {<elem>.<QTY>,...} {<actuator>,...} {<rule-index>,...}
    [CYBERLINKS]   <source> <destination> {<elem>.<QTY>,...}
    [CYBERATTACKS] <id> <KIND> <target> <start> <end> <payload>
    [CYBEROPTIONS] <KEY> <value...>

Conditions are ``TIME <hours>``, ``<elem>.<QTY> <ABOVE|BELOW> <value>``, or
the open-ended sentinel ``END``. Payloads are ``VALUE <n>`` / ``OFFSET <n>``
(sensor, communication), ``OPEN`` / ``CLOSED`` / ``SETTING <n>`` (actuator),
or a full replacement control statement (control).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Sequence, Union

from .cyber_topology import (
    CyberLink,
    CyberNode,
    CyberTopology,
    Diagnostic,
    SensorRef,
    _sensor_resolves,
    add_cyber_link,
    add_cyber_node,
    validate as validate_topology,
)
from .errors import (
    IncompleteParams,
    InvalidWindow,
    MalformedControl,
    MalformedSection,
    UnknownAttackKind,
    UnknownTarget,
    ValidationFailed,
)
from .inp_model import (
    ACTUATABLE_KINDS,
    LINK_KINDS,
    NODE_KINDS,
    QUANTITIES,
    ControlRule,
    InpModel,
    LinkAction,
    AtTimeTrigger,
    ClockTimeTrigger,
    NodeLevelTrigger,
    _parse_control_line,
    format_action,
    format_number,
    format_trigger,
    is_valid_identifier,
    parse_number,
)

KIND_COMMUNICATION = "communication"
KIND_CONTROL = "control"
KIND_SENSOR = "sensor"
KIND_ACTUATOR = "actuator"
ATTACK_KINDS = (KIND_COMMUNICATION, KIND_CONTROL, KIND_SENSOR, KIND_ACTUATOR)

_SECTION_ORDER = ("CYBERNODES", "CYBERLINKS", "CYBERATTACKS", "CYBEROPTIONS")
_ATTACK_ID_RE = re.compile(r"^ATK(\d+)$")
_RULE_TOKEN_RE = re.compile(r"^RULE(\d+)$")


# --- window conditions -------------------------------------------------------

@dataclass(frozen=True)
class TimeCondition:
    """Simulation-time trigger in hours; ``math.inf`` means open-ended."""

    hours: float


@dataclass(frozen=True)
class ValueCondition:
    sensor: SensorRef
    relation: str  # "above" | "below"
    threshold: float


Condition = Union[TimeCondition, ValueCondition]


@dataclass(frozen=True)
class AttackWindow:
    start: Condition
    end: Condition


@dataclass(frozen=True)
class InjectionPayload:
    """Replacement reading: an absolute value or an offset on the true one."""

    mode: str  # "value" | "offset"
    amount: float


Payload = Union[InjectionPayload, LinkAction, ControlRule]
Target = Union[SensorRef, tuple, str, int]


@dataclass(frozen=True)
class AttackSpec:
    id: str
    kind: str
    target: Target
    window: AttackWindow
    payload: Payload


@dataclass(frozen=True)
class CpaDocument:
    """Tokenised scenario document: one tuple of text fields per row."""

    cybernodes: tuple[tuple[str, ...], ...]
    cyberlinks: tuple[tuple[str, ...], ...]
    cyberattacks: tuple[tuple[str, ...], ...]
    cyberoptions: tuple[tuple[str, ...], ...]


@dataclass(frozen=True)
class ParsedCpa:
    topology: CyberTopology
    attacks: tuple[AttackSpec, ...]
    options: tuple[tuple[str, str], ...] = ()


# --- token helpers -----------------------------------------------------------

def _sensor_token(ref: SensorRef) -> str:
    return f"{ref.element}.{ref.quantity.upper()}"


def _sensor_from_token(token: str) -> SensorRef:
    element, _, quantity = token.rpartition(".")
    if not element or quantity.lower() not in QUANTITIES:
        raise ValueError(f"bad sensor token {token!r}")
    return SensorRef(element.upper(), quantity.lower())


def _set_token(tokens: Iterable[str]) -> str:
    return "{" + ",".join(sorted(tokens)) + "}"


def _set_from_token(token: str) -> list[str]:
    if not (token.startswith("{") and token.endswith("}")):
        raise ValueError(f"expected brace-set token, got {token!r}")
    inner = token[1:-1]
    return inner.split(",") if inner else []


def _int_set_token(values: Iterable[int]) -> str:
    return "{" + ",".join(str(v) for v in sorted(values)) + "}"


def _int_set_from_token(token: str) -> frozenset[int]:
    out = set()
    for item in _set_from_token(token):
        if not item.isdigit():
            raise ValueError(f"bad rule index {item!r}")
        out.add(int(item))
    return frozenset(out)


def _condition_tokens(cond: Condition) -> list[str]:
    if isinstance(cond, TimeCondition):
        if cond.hours == math.inf:
            return ["END"]
        return ["TIME", format_number(cond.hours)]
    return [
        _sensor_token(cond.sensor),
        cond.relation.upper(),
        format_number(cond.threshold),
    ]


def _consume_condition(fields: Sequence[str], i: int) -> tuple[Condition, int]:
    head = fields[i].upper()
    if head == "END":
        return TimeCondition(math.inf), i + 1
    if head == "TIME":
        if i + 1 >= len(fields):
            raise ValueError("TIME condition missing its hour value")
        hours = parse_number(fields[i + 1])
        if hours is None:
            raise ValueError(f"bad TIME value {fields[i + 1]!r}")
        return TimeCondition(hours), i + 2
    if i + 2 >= len(fields):
        raise ValueError(f"incomplete value condition at {fields[i]!r}")
    sensor = _sensor_from_token(fields[i])
    relation = fields[i + 1].upper()
    if relation not in ("ABOVE", "BELOW"):
        raise ValueError(f"expected ABOVE or BELOW, got {fields[i + 1]!r}")
    threshold = parse_number(fields[i + 2])
    if threshold is None:
        raise ValueError(f"bad threshold {fields[i + 2]!r}")
    return ValueCondition(sensor, relation.lower(), threshold), i + 3


def parse_condition_text(text: str) -> Condition:
    """Parse a condition written as CLI/HTTP text.

    Accepts the document grammar (``TIME 10``, ``END``, ``T1.LEVEL ABOVE 4``)
    plus a bare number as shorthand for ``TIME <number>``.
    """
    fields = text.split()
    if not fields:
        raise ValueError("empty condition")
    if len(fields) == 1 and parse_number(fields[0]) is not None:
        return TimeCondition(parse_number(fields[0]))  # type: ignore[arg-type]
    cond, used = _consume_condition(fields, 0)
    if used != len(fields):
        raise ValueError(f"trailing tokens in condition {text!r}")
    return cond


def _target_token(kind: str, target: Target) -> str:
    if kind == KIND_SENSOR:
        return _sensor_token(target)  # type: ignore[arg-type]
    if kind == KIND_COMMUNICATION:
        source, destination = target  # type: ignore[misc]
        return f"{source}->{destination}"
    if kind == KIND_ACTUATOR:
        return str(target)
    return f"RULE{target}"


def parse_target_text(kind: str, text: str) -> Target:
    """Interpret a target token for the given attack kind."""
    token = text.strip()
    if kind == KIND_SENSOR:
        return _sensor_from_token(token.upper())
    if kind == KIND_COMMUNICATION:
        source, sep, destination = token.upper().partition("->")
        if not sep or not source or not destination:
            raise ValueError(f"expected '<source>-><destination>', got {text!r}")
        return (source, destination)
    if kind == KIND_ACTUATOR:
        return token.upper()
    if kind == KIND_CONTROL:
        match = _RULE_TOKEN_RE.match(token.upper())
        if not match:
            raise ValueError(f"expected 'RULE<index>', got {text!r}")
        return int(match.group(1))
    raise UnknownAttackKind(f"unknown attack kind {kind!r}")


def _payload_tokens(kind: str, payload: Payload) -> list[str]:
    if kind in (KIND_SENSOR, KIND_COMMUNICATION):
        assert isinstance(payload, InjectionPayload)
        return [payload.mode.upper(), format_number(payload.amount)]
    if kind == KIND_ACTUATOR:
        assert isinstance(payload, LinkAction)
        if payload.status == "setting":
            return ["SETTING", format_number(payload.value or 0.0)]
        return [format_action(payload)]
    assert isinstance(payload, ControlRule)
    return (
        f"LINK {payload.target_link} {format_action(payload.action)} "
        f"{format_trigger(payload.trigger)}"
    ).split()


def _payload_from_fields(
    kind: str, fields: Sequence[str], rule_index: int, line: int | None
) -> Payload:
    if kind in (KIND_SENSOR, KIND_COMMUNICATION):
        if len(fields) != 2 or fields[0].upper() not in ("VALUE", "OFFSET"):
            raise ValueError("expected 'VALUE <n>' or 'OFFSET <n>' payload")
        amount = parse_number(fields[1])
        if amount is None:
            raise ValueError(f"bad payload amount {fields[1]!r}")
        return InjectionPayload(fields[0].lower(), amount)
    if kind == KIND_ACTUATOR:
        head = fields[0].upper() if fields else ""
        if head in ("OPEN", "CLOSED") and len(fields) == 1:
            return LinkAction(head.lower())
        if head == "SETTING" and len(fields) == 2:
            value = parse_number(fields[1])
            if value is None:
                raise ValueError(f"bad setting value {fields[1]!r}")
            return LinkAction("setting", value)
        raise ValueError("expected 'OPEN', 'CLOSED' or 'SETTING <n>' payload")
    return _parse_control_line(list(fields), rule_index, line or 0)


# --- attack construction -----------------------------------------------------

def next_attack_id(existing: Iterable[AttackSpec]) -> str:
    highest = 0
    for attack in existing:
        match = _ATTACK_ID_RE.match(attack.id)
        if match:
            highest = max(highest, int(match.group(1)))
    return f"ATK{highest + 1}"


def _coerce_condition(value: Any, which: str) -> Condition:
    if isinstance(value, (TimeCondition, ValueCondition)):
        return value
    if isinstance(value, (int, float)):
        return TimeCondition(float(value))
    if isinstance(value, str):
        try:
            return parse_condition_text(value)
        except ValueError as exc:
            raise InvalidWindow(f"bad {which} condition: {exc}") from exc
    raise InvalidWindow(f"bad {which} condition: {value!r}")


def _coerce_target(kind: str, value: Any) -> Target:
    try:
        if kind == KIND_SENSOR and isinstance(value, SensorRef):
            return value
        if kind == KIND_SENSOR and isinstance(value, Mapping):
            return SensorRef(str(value["element"]).upper(), str(value["quantity"]).lower())
        if kind == KIND_COMMUNICATION and isinstance(value, (tuple, list)):
            return (str(value[0]).upper(), str(value[1]).upper())
        if kind == KIND_COMMUNICATION and isinstance(value, Mapping):
            return (str(value["source"]).upper(), str(value["destination"]).upper())
        if kind == KIND_CONTROL and isinstance(value, int) and not isinstance(value, bool):
            return value
        if isinstance(value, str):
            return parse_target_text(kind, value)
    except (ValueError, KeyError) as exc:
        raise UnknownTarget(f"bad {kind} target {value!r}: {exc}") from exc
    raise UnknownTarget(f"bad {kind} target {value!r}")


def _coerce_rule_payload(value: Any, rule_index: int) -> ControlRule:
    if isinstance(value, ControlRule):
        return ControlRule(rule_index, value.target_link, value.action, value.trigger)
    if isinstance(value, str):
        try:
            return _parse_control_line(value.split(), rule_index, 0)
        except MalformedControl as exc:
            raise IncompleteParams(f"bad replacement rule: {exc.message}") from exc
    raise IncompleteParams(f"bad replacement rule {value!r}")


def _coerce_state_payload(value: Any) -> LinkAction:
    if isinstance(value, LinkAction):
        return value
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return LinkAction("setting", float(value))
    if isinstance(value, str):
        upper = value.strip().upper()
        if upper == "OPEN":
            return LinkAction("open")
        if upper == "CLOSED":
            return LinkAction("closed")
        number = parse_number(upper)
        if number is not None:
            return LinkAction("setting", number)
    raise IncompleteParams(f"bad forced state {value!r}")


def build_attack(
    kind: str,
    params: Mapping[str, Any],
    topology: CyberTopology,
    model: InpModel | None = None,
    existing: Sequence[AttackSpec] = (),
) -> AttackSpec:
    """Construct and validate one attack; ids run ``ATK1``, ``ATK2``, ...

    ``params`` carries ``target``, ``start``, ``end`` plus the kind-specific
    payload key: ``value`` or ``offset`` (sensor, communication), ``state``
    (actuator), ``rule`` (control). Values may be structured objects or the
    text tokens the CLI and HTTP layers receive.
    """
    if kind not in ATTACK_KINDS:
        raise UnknownAttackKind(f"unknown attack kind {kind!r}")
    if "target" not in params:
        raise IncompleteParams(f"{kind} attack needs a target")
    target = _coerce_target(kind, params["target"])

    start = _coerce_condition(params.get("start", 0.0), "start")
    end = _coerce_condition(params.get("end", math.inf), "end")
    window = AttackWindow(start, end)

    if kind in (KIND_SENSOR, KIND_COMMUNICATION):
        has_value = params.get("value") is not None
        has_offset = params.get("offset") is not None
        if has_value == has_offset:
            raise IncompleteParams(
                f"{kind} attack needs exactly one of 'value' or 'offset'"
            )
        raw = params["value"] if has_value else params["offset"]
        amount = parse_number(str(raw))
        if amount is None:
            raise IncompleteParams(f"bad injected amount {raw!r}")
        payload: Payload = InjectionPayload("value" if has_value else "offset", amount)
    elif kind == KIND_ACTUATOR:
        if params.get("state") is None:
            raise IncompleteParams("actuator attack needs 'state'")
        payload = _coerce_state_payload(params["state"])
    else:
        if params.get("rule") is None:
            raise IncompleteParams("control attack needs a replacement 'rule'")
        payload = _coerce_rule_payload(params["rule"], int(target))  # type: ignore[arg-type]

    spec = AttackSpec(
        id=next_attack_id(existing),
        kind=kind,
        target=target,
        window=window,
        payload=payload,
    )
    validate_attack(spec, topology, model)
    return spec


def _check_condition(cond: Condition, model: InpModel | None, which: str) -> None:
    if isinstance(cond, TimeCondition):
        if cond.hours < 0:
            raise InvalidWindow(f"{which} time must be nonnegative")
        return
    if not math.isfinite(cond.threshold):
        raise InvalidWindow(f"{which} threshold must be finite")
    if model is not None:
        if not _sensor_resolves(model, cond.sensor):
            raise InvalidWindow(
                f"{which} condition references unknown sensor "
                f"{cond.sensor.element}.{cond.sensor.quantity}"
            )


def validate_attack(
    attack: AttackSpec, topology: CyberTopology, model: InpModel | None = None
) -> None:
    """Raise if the attack does not resolve against topology (and model)."""
    if attack.kind not in ATTACK_KINDS:
        raise UnknownAttackKind(f"unknown attack kind {attack.kind!r}")

    _check_condition(attack.window.start, model, "start")
    _check_condition(attack.window.end, model, "end")
    start, end = attack.window.start, attack.window.end
    if isinstance(start, TimeCondition) and isinstance(end, TimeCondition):
        if not start.hours < end.hours:
            raise InvalidWindow(
                f"window start {format_number(start.hours)} must precede "
                f"end {format_number(end.hours)}"
            )

    if attack.kind == KIND_SENSOR:
        if attack.target not in topology.sensed():
            ref = attack.target
            raise UnknownTarget(
                f"no node senses {ref.element}.{ref.quantity}"  # type: ignore[union-attr]
            )
    elif attack.kind == KIND_COMMUNICATION:
        source, destination = attack.target  # type: ignore[misc]
        if topology.find_link(source, destination) is None:
            raise UnknownTarget(f"no link {source}->{destination}")
    elif attack.kind == KIND_ACTUATOR:
        element = str(attack.target)
        if element not in topology.actuated():
            raise UnknownTarget(f"no node actuates {element!r}")
        if model is not None and not model.has(element, ACTUATABLE_KINDS):
            raise UnknownTarget(f"{element!r} is not an actuatable element")
    else:
        index = int(attack.target)  # type: ignore[arg-type]
        if index not in topology.owned_controls():
            raise UnknownTarget(f"no node owns control rule {index}")
        if model is not None:
            if not 0 <= index < len(model.controls):
                raise UnknownTarget(f"control rule index {index} out of range")
            rule = attack.payload
            assert isinstance(rule, ControlRule)
            if not model.has(rule.target_link, LINK_KINDS):
                raise UnknownTarget(
                    f"replacement rule targets unknown link {rule.target_link!r}"
                )
            trig = rule.trigger
            if isinstance(trig, NodeLevelTrigger) and not model.has(trig.node, NODE_KINDS):
                raise UnknownTarget(
                    f"replacement rule references unknown node {trig.node!r}"
                )


# --- rendering ---------------------------------------------------------------

def build_cpa_document(
    topology: CyberTopology,
    attacks: Sequence[AttackSpec] = (),
    options: Mapping[str, str] | None = None,
) -> CpaDocument:
    """Validate state and lay it out as document rows (no text yet)."""
    diagnostics = [d for d in validate_topology(topology) if d.severity == "error"]

    seen_ids: set[str] = set()
    for attack in attacks:
        if attack.id in seen_ids:
            diagnostics.append(
                Diagnostic("error", attack.id, "duplicate attack id")
            )
        seen_ids.add(attack.id)
        try:
            validate_attack(attack, topology)
        except (UnknownTarget, InvalidWindow, UnknownAttackKind) as exc:
            diagnostics.append(Diagnostic("error", attack.id, exc.message))

    option_rows: list[tuple[str, ...]] = []
    if topology.provenance:
        option_rows.append(("SOURCE", topology.provenance))
    for key, value in (options or {}).items():
        upper = key.upper()
        if upper == "SOURCE":
            diagnostics.append(
                Diagnostic("error", key, "option SOURCE is reserved for provenance")
            )
            continue
        option_rows.append((upper, *str(value).split()))

    if diagnostics:
        raise ValidationFailed(diagnostics)

    node_rows = tuple(
        (
            node.id,
            _set_token(_sensor_token(r) for r in node.sensors),
            _set_token(node.actuators),
            _int_set_token(node.controls),
        )
        for node in topology.nodes
    )
    link_rows = tuple(
        (
            link.source,
            link.destination,
            _set_token(_sensor_token(r) for r in link.sensors),
        )
        for link in topology.links
    )
    attack_rows = tuple(
        (
            attack.id,
            attack.kind.upper(),
            _target_token(attack.kind, attack.target),
            *_condition_tokens(attack.window.start),
            *_condition_tokens(attack.window.end),
            *_payload_tokens(attack.kind, attack.payload),
        )
        for attack in attacks
    )
    return CpaDocument(
        cybernodes=node_rows,
        cyberlinks=link_rows,
        cyberattacks=attack_rows,
        cyberoptions=tuple(option_rows),
    )


def document_to_text(document: CpaDocument) -> str:
    sections = zip(
        _SECTION_ORDER,
        (
            document.cybernodes,
            document.cyberlinks,
            document.cyberattacks,
            document.cyberoptions,
        ),
    )
    blocks = []
    for header, rows in sections:
        lines = [f"[{header}]"] + [" ".join(row) for row in rows]
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def render_cpa(
    topology: CyberTopology,
    attacks: Sequence[AttackSpec] = (),
    options: Mapping[str, str] | None = None,
) -> str:
    """Canonical scenario text; identical inputs give byte-identical output."""
    return document_to_text(build_cpa_document(topology, attacks, options))


# --- parsing -----------------------------------------------------------------

def _interpret_node_row(fields: tuple[str, ...], line: int) -> CyberNode:
    if len(fields) != 4:
        raise MalformedSection(
            f"node row needs 'id sensors actuators controls', got {len(fields)} fields",
            line=line,
        )
    try:
        sensors = frozenset(
            _sensor_from_token(t.upper()) for t in _set_from_token(fields[1])
        )
        actuators = frozenset(t.upper() for t in _set_from_token(fields[2]))
        controls = _int_set_from_token(fields[3])
    except ValueError as exc:
        raise MalformedSection(str(exc), line=line) from exc
    return CyberNode(
        id=fields[0].upper(), sensors=sensors, actuators=actuators, controls=controls
    )


def _interpret_link_row(fields: tuple[str, ...], line: int) -> CyberLink:
    if len(fields) != 3:
        raise MalformedSection(
            f"link row needs 'source destination sensors', got {len(fields)} fields",
            line=line,
        )
    try:
        sensors = frozenset(
            _sensor_from_token(t.upper()) for t in _set_from_token(fields[2])
        )
    except ValueError as exc:
        raise MalformedSection(str(exc), line=line) from exc
    return CyberLink(
        source=fields[0].upper(), destination=fields[1].upper(), sensors=sensors
    )


def _interpret_attack_row(fields: tuple[str, ...], line: int) -> AttackSpec:
    if len(fields) < 5:
        raise MalformedSection("attack row too short", line=line)
    attack_id = fields[0].upper()
    kind = fields[1].lower()
    if kind not in ATTACK_KINDS:
        raise UnknownAttackKind(f"unknown attack kind {fields[1]!r}", line=line)
    try:
        target = parse_target_text(kind, fields[2])
        start, i = _consume_condition(fields, 3)
        end, i = _consume_condition(fields, i)
        rule_index = int(target) if kind == KIND_CONTROL else 0
        payload = _payload_from_fields(kind, fields[i:], rule_index, line)
    except MalformedControl as exc:
        raise MalformedSection(exc.message, line=line) from exc
    except ValueError as exc:
        raise MalformedSection(str(exc), line=line) from exc
    return AttackSpec(
        id=attack_id, kind=kind, target=target,
        window=AttackWindow(start, end), payload=payload,
    )


def parse_cpa(text: str) -> ParsedCpa:
    """Parse scenario text rendered by this module.

    Returns the topology, the attack list, and any scenario options.
    Inverts ``render_cpa`` structurally.
    """
    section: str | None = None
    seen: list[str] = []
    topology = CyberTopology()
    attacks: list[AttackSpec] = []
    options: list[tuple[str, str]] = []
    provenance = ""

    for line_no, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split(";", 1)[0].strip()
        if not stripped:
            continue
        if stripped.startswith("["):
            name = stripped.strip("[]").upper()
            if f"[{name}]" != stripped or name not in _SECTION_ORDER:
                raise MalformedSection(f"bad section header {stripped!r}", line=line_no)
            expected = _SECTION_ORDER[len(seen)] if len(seen) < 4 else None
            if name != expected:
                raise MalformedSection(
                    f"section [{name}] out of order; expected [{expected}]",
                    line=line_no,
                )
            seen.append(name)
            section = name
            continue
        if section is None:
            raise MalformedSection("content before first section header", line=line_no)

        fields = tuple(stripped.split())
        try:
            if section == "CYBERNODES":
                topology = add_cyber_node(topology, _interpret_node_row(fields, line_no))
            elif section == "CYBERLINKS":
                topology = add_cyber_link(topology, _interpret_link_row(fields, line_no))
            elif section == "CYBERATTACKS":
                attacks.append(_interpret_attack_row(fields, line_no))
            else:
                key = fields[0].upper()
                value = " ".join(fields[1:])
                if key == "SOURCE":
                    provenance = value
                else:
                    options.append((key, value))
        except (MalformedSection, UnknownAttackKind):
            raise
        except ValueError as exc:
            raise MalformedSection(str(exc), line=line_no) from exc
        except Exception as exc:
            message = getattr(exc, "message", str(exc))
            raise MalformedSection(message, line=line_no) from exc

    if len(seen) != len(_SECTION_ORDER):
        missing = [s for s in _SECTION_ORDER if s not in seen]
        raise MalformedSection(f"missing sections: {', '.join(missing)}")

    if provenance:
        topology = CyberTopology(
            nodes=topology.nodes, links=topology.links, provenance=provenance
        )
    return ParsedCpa(
        topology=topology, attacks=tuple(attacks), options=tuple(options)
    )


# --- JSON codecs (session snapshots and the HTTP surface) --------------------

def _condition_to_json(cond: Condition) -> dict[str, Any]:
    if isinstance(cond, TimeCondition):
        return {"type": "time", "hours": None if cond.hours == math.inf else cond.hours}
    return {
        "type": "value",
        "element": cond.sensor.element,
        "quantity": cond.sensor.quantity,
        "relation": cond.relation,
        "threshold": cond.threshold,
    }


def _condition_from_json(obj: Mapping[str, Any]) -> Condition:
    if obj["type"] == "time":
        hours = obj.get("hours")
        return TimeCondition(math.inf if hours is None else float(hours))
    return ValueCondition(
        SensorRef(str(obj["element"]), str(obj["quantity"])),
        str(obj["relation"]),
        float(obj["threshold"]),
    )


def control_rule_to_json_dict(rule: ControlRule) -> dict[str, Any]:
    trigger: dict[str, Any]
    if isinstance(rule.trigger, NodeLevelTrigger):
        trigger = {
            "type": "node_level",
            "node": rule.trigger.node,
            "relation": rule.trigger.relation,
            "threshold": rule.trigger.threshold,
        }
    elif isinstance(rule.trigger, AtTimeTrigger):
        trigger = {"type": "at_time", "hours": rule.trigger.hours}
    else:
        trigger = {"type": "clock_time", "hour": rule.trigger.hour}
    return {
        "index": rule.index,
        "target_link": rule.target_link,
        "action": {"status": rule.action.status, "value": rule.action.value},
        "trigger": trigger,
        "text": f"LINK {rule.target_link} {format_action(rule.action)} "
        + format_trigger(rule.trigger),
    }


def control_rule_from_json_dict(obj: Mapping[str, Any]) -> ControlRule:
    trig = obj["trigger"]
    trigger: Any
    if trig["type"] == "node_level":
        trigger = NodeLevelTrigger(
            str(trig["node"]), str(trig["relation"]), float(trig["threshold"])
        )
    elif trig["type"] == "at_time":
        trigger = AtTimeTrigger(float(trig["hours"]))
    else:
        trigger = ClockTimeTrigger(float(trig["hour"]))
    action = obj["action"]
    return ControlRule(
        index=int(obj["index"]),
        target_link=str(obj["target_link"]),
        action=LinkAction(
            str(action["status"]),
            None if action.get("value") is None else float(action["value"]),
        ),
        trigger=trigger,
    )


def attack_to_json_dict(attack: AttackSpec) -> dict[str, Any]:
    target: Any
    if attack.kind == KIND_SENSOR:
        ref = attack.target
        target = {"element": ref.element, "quantity": ref.quantity}  # type: ignore[union-attr]
    elif attack.kind == KIND_COMMUNICATION:
        source, destination = attack.target  # type: ignore[misc]
        target = {"source": source, "destination": destination}
    elif attack.kind == KIND_ACTUATOR:
        target = str(attack.target)
    else:
        target = int(attack.target)  # type: ignore[arg-type]

    payload: dict[str, Any]
    if isinstance(attack.payload, InjectionPayload):
        payload = {"mode": attack.payload.mode, "amount": attack.payload.amount}
    elif isinstance(attack.payload, LinkAction):
        payload = {"status": attack.payload.status, "value": attack.payload.value}
    else:
        payload = {"rule": control_rule_to_json_dict(attack.payload)}

    return {
        "id": attack.id,
        "kind": attack.kind,
        "target": target,
        "window": {
            "start": _condition_to_json(attack.window.start),
            "end": _condition_to_json(attack.window.end),
        },
        "payload": payload,
    }


def attack_from_json_dict(obj: Mapping[str, Any]) -> AttackSpec:
    kind = str(obj["kind"])
    if kind not in ATTACK_KINDS:
        raise UnknownAttackKind(f"unknown attack kind {kind!r}")
    raw_target = obj["target"]
    target: Target
    if kind == KIND_SENSOR:
        target = SensorRef(str(raw_target["element"]), str(raw_target["quantity"]))
    elif kind == KIND_COMMUNICATION:
        target = (str(raw_target["source"]), str(raw_target["destination"]))
    elif kind == KIND_ACTUATOR:
        target = str(raw_target)
    else:
        target = int(raw_target)

    raw_payload = obj["payload"]
    payload: Payload
    if kind in (KIND_SENSOR, KIND_COMMUNICATION):
        payload = InjectionPayload(str(raw_payload["mode"]), float(raw_payload["amount"]))
    elif kind == KIND_ACTUATOR:
        payload = LinkAction(
            str(raw_payload["status"]),
            None if raw_payload.get("value") is None else float(raw_payload["value"]),
        )
    else:
        payload = control_rule_from_json_dict(raw_payload["rule"])

    window = obj["window"]
    return AttackSpec(
        id=str(obj["id"]),
        kind=kind,
        target=target,
        window=AttackWindow(
            _condition_from_json(window["start"]), _condition_from_json(window["end"])
        ),
        payload=payload,
    )
