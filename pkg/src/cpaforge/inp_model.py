"""Parse EPANET-style ``.inp`` text into a structured water-network model.

Only the sections this toolkit consumes are parsed structurally: ``[TITLE]``,
the six element inventories, and ``[CONTROLS]``. Every other section is kept
as an opaque block of raw lines so nothing is silently lost. Identifiers are
case-insensitive and stored uppercase.

Supported control grammar (one statement per line)::

    LINK <id> <OPEN|CLOSED|number> IF NODE <id> <ABOVE|BELOW> <number>
    LINK <id> <OPEN|CLOSED|number> AT TIME <number>
    LINK <id> <OPEN|CLOSED|number> AT CLOCKTIME <number> [AM|PM]
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Union

from .errors import DanglingReference, DuplicateId, MalformedControl, MalformedSection

# Element kinds, in the canonical order used when listing or re-serialising.
JUNCTION = "junction"
RESERVOIR = "reservoir"
TANK = "tank"
PIPE = "pipe"
PUMP = "pump"
VALVE = "valve"

KINDS = (JUNCTION, RESERVOIR, TANK, PIPE, PUMP, VALVE)
NODE_KINDS = frozenset({JUNCTION, RESERVOIR, TANK})
LINK_KINDS = frozenset({PIPE, PUMP, VALVE})

# Attackability classes: which elements can be actuated, and which physical
# quantities can be read off each element kind.
ACTUATABLE_KINDS = frozenset({PUMP, VALVE})
SENSABLE_QUANTITIES = {
    JUNCTION: frozenset({"pressure"}),
    TANK: frozenset({"level"}),
    PIPE: frozenset({"flow", "status"}),
    PUMP: frozenset({"flow", "status"}),
}
QUANTITIES = frozenset({"pressure", "level", "flow", "status"})

_SECTION_FOR_KIND = {
    JUNCTION: "JUNCTIONS",
    RESERVOIR: "RESERVOIRS",
    TANK: "TANKS",
    PIPE: "PIPES",
    PUMP: "PUMPS",
    VALVE: "VALVES",
}
_KIND_FOR_SECTION = {v: k for k, v in _SECTION_FOR_KIND.items()}
_KIND_RANK = {kind: i for i, kind in enumerate(KINDS)}

_ID_RE = re.compile(r"^[A-Z0-9_.\-]+$")
_NUMBER_RE = re.compile(r"^[-+]?(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?$")
_HEADER_RE = re.compile(r"^\[([A-Za-z][A-Za-z0-9 _-]*)\]$")


@dataclass(frozen=True)
class NetworkElement:
    id: str
    kind: str


@dataclass(frozen=True)
class LinkAction:
    """What a control does to its link: open, close, or apply a setting."""

    status: str  # "open" | "closed" | "setting"
    value: float | None = None


@dataclass(frozen=True)
class NodeLevelTrigger:
    node: str
    relation: str  # "above" | "below"
    threshold: float


@dataclass(frozen=True)
class AtTimeTrigger:
    hours: float


@dataclass(frozen=True)
class ClockTimeTrigger:
    hour: float  # hour-of-day in [0, 24)


Trigger = Union[NodeLevelTrigger, AtTimeTrigger, ClockTimeTrigger]


@dataclass(frozen=True)
class ControlRule:
    """One [CONTROLS] statement; ``index`` is its position in source order."""

    index: int
    target_link: str
    action: LinkAction
    trigger: Trigger


@dataclass(frozen=True)
class InpModel:
    title: str
    elements: tuple[NetworkElement, ...]
    controls: tuple[ControlRule, ...]
    source_name: str = ""
    extra_sections: tuple[tuple[str, tuple[str, ...]], ...] = ()

    def kinds_of(self, element_id: str) -> frozenset[str]:
        """All kinds the identifier is declared as (ids are per-kind unique,
        but a node and a link may share an id)."""
        ident = element_id.upper()
        return frozenset(e.kind for e in self.elements if e.id == ident)

    def kind_of(self, element_id: str) -> str | None:
        """Single kind for the id; on a cross-kind collision the kind earliest
        in canonical order wins."""
        kinds = self.kinds_of(element_id)
        return min(kinds, key=_KIND_RANK.__getitem__) if kinds else None

    def has(self, element_id: str, kinds: Iterable[str] | None = None) -> bool:
        found = self.kinds_of(element_id)
        if not found:
            return False
        return kinds is None or bool(found & set(kinds))


def is_valid_identifier(token: str) -> bool:
    return bool(_ID_RE.match(token))


def parse_number(token: str) -> float | None:
    """Decimal with optional exponent; None when the token is not a number."""
    if not _NUMBER_RE.match(token):
        return None
    value = float(token)
    if not math.isfinite(value):
        return None
    return value


def _strip_comment(line: str) -> str:
    return line.split(";", 1)[0].rstrip()


def _parse_action(token: str, line_no: int) -> LinkAction:
    upper = token.upper()
    if upper == "OPEN":
        return LinkAction("open")
    if upper == "CLOSED":
        return LinkAction("closed")
    value = parse_number(token)
    if value is None:
        raise MalformedControl(
            f"expected OPEN, CLOSED or a numeric setting, got {token!r}", line=line_no
        )
    return LinkAction("setting", value)


def _parse_clock_hour(tokens: list[str], line_no: int) -> float:
    value = parse_number(tokens[0])
    if value is None:
        raise MalformedControl(f"bad clock time {tokens[0]!r}", line=line_no)
    if len(tokens) == 2:
        meridiem = tokens[1].upper()
        if meridiem not in ("AM", "PM"):
            raise MalformedControl(f"expected AM or PM, got {tokens[1]!r}", line=line_no)
        if not 0 < value <= 12:
            raise MalformedControl(f"clock hour {value} out of 1-12 range", line=line_no)
        if meridiem == "AM":
            value = 0.0 if value == 12 else value
        else:
            value = 12.0 if value == 12 else value + 12.0
    if not 0 <= value < 24:
        raise MalformedControl(f"clock hour {value} outside [0, 24)", line=line_no)
    return value


def _parse_control_line(tokens: list[str], index: int, line_no: int) -> ControlRule:
    if tokens[0].upper() != "LINK" or len(tokens) < 4:
        raise MalformedControl(
            "control must start with 'LINK <id> <action>'", line=line_no
        )
    link_id = tokens[1].upper()
    if not is_valid_identifier(link_id):
        raise MalformedControl(f"invalid link identifier {tokens[1]!r}", line=line_no)
    action = _parse_action(tokens[2], line_no)
    rest = tokens[3:]
    head = rest[0].upper()

    if head == "IF":
        if len(rest) != 5 or rest[1].upper() != "NODE":
            raise MalformedControl(
                "expected 'IF NODE <id> <ABOVE|BELOW> <number>'", line=line_no
            )
        node_id = rest[2].upper()
        if not is_valid_identifier(node_id):
            raise MalformedControl(f"invalid node identifier {rest[2]!r}", line=line_no)
        relation = rest[3].upper()
        if relation not in ("ABOVE", "BELOW"):
            raise MalformedControl(f"expected ABOVE or BELOW, got {rest[3]!r}", line=line_no)
        threshold = parse_number(rest[4])
        if threshold is None:
            raise MalformedControl(f"bad threshold {rest[4]!r}", line=line_no)
        trigger: Trigger = NodeLevelTrigger(node_id, relation.lower(), threshold)
    elif head == "AT":
        if len(rest) >= 2 and rest[1].upper() == "TIME":
            if len(rest) != 3:
                raise MalformedControl("expected 'AT TIME <number>'", line=line_no)
            hours = parse_number(rest[2])
            if hours is None or hours < 0:
                raise MalformedControl(f"bad time {rest[2]!r}", line=line_no)
            trigger = AtTimeTrigger(hours)
        elif len(rest) >= 2 and rest[1].upper() == "CLOCKTIME":
            if len(rest) not in (3, 4):
                raise MalformedControl(
                    "expected 'AT CLOCKTIME <number> [AM|PM]'", line=line_no
                )
            trigger = ClockTimeTrigger(_parse_clock_hour(rest[2:], line_no))
        else:
            raise MalformedControl("expected 'AT TIME' or 'AT CLOCKTIME'", line=line_no)
    else:
        # Multi-clause [RULES]-style statements land here as well.
        raise MalformedControl(f"unsupported control clause {rest[0]!r}", line=line_no)

    return ControlRule(index=index, target_link=link_id, action=action, trigger=trigger)


def parse_inp(text: str, source_name: str = "") -> InpModel:
    """Parse ``.inp`` file contents into an :class:`InpModel`.

    Unknown sections are preserved verbatim as opaque blocks; comments
    (``;`` to end of line) are stripped; control statements keep their
    source order. Raises :class:`MalformedSection`, :class:`MalformedControl`
    or :class:`DanglingReference`, each carrying the offending line number.
    """
    title_lines: list[str] = []
    elements: list[NetworkElement] = []
    seen: set[tuple[str, str]] = set()
    raw_controls: list[tuple[list[str], int]] = []
    extra: list[tuple[str, list[str]]] = []

    section: str | None = None
    current_extra: list[str] | None = None

    for line_no, raw in enumerate(text.splitlines(), start=1):
        stripped = _strip_comment(raw).strip()
        if not stripped:
            continue
        if stripped.startswith("["):
            match = _HEADER_RE.match(stripped)
            if not match:
                raise MalformedSection(f"bad section header {stripped!r}", line=line_no)
            section = match.group(1).upper().strip()
            current_extra = None
            if section != "TITLE" and section != "CONTROLS" and section not in _KIND_FOR_SECTION:
                current_extra = []
                extra.append((section, current_extra))
            continue
        if section is None:
            raise MalformedSection("content before first section header", line=line_no)

        if section == "TITLE":
            title_lines.append(stripped)
        elif section in _KIND_FOR_SECTION:
            kind = _KIND_FOR_SECTION[section]
            ident = stripped.split()[0].upper()
            if not is_valid_identifier(ident):
                raise MalformedSection(f"invalid element identifier {ident!r}", line=line_no)
            if (kind, ident) in seen:
                raise DuplicateId(f"duplicate {kind} id {ident!r}", line=line_no)
            seen.add((kind, ident))
            elements.append(NetworkElement(ident, kind))
        elif section == "CONTROLS":
            raw_controls.append((stripped.split(), line_no))
        else:
            assert current_extra is not None
            current_extra.append(stripped)

    controls = tuple(
        _parse_control_line(tokens, index, line_no)
        for index, (tokens, line_no) in enumerate(raw_controls)
    )

    model = InpModel(
        title="\n".join(title_lines),
        elements=tuple(sorted(elements, key=lambda e: (_KIND_RANK[e.kind], e.id))),
        controls=controls,
        source_name=source_name,
        extra_sections=tuple((name, tuple(lines)) for name, lines in extra),
    )
    _check_references(model, {line for _, line in raw_controls})
    return model


def _check_references(model: InpModel, control_lines: set[int]) -> None:
    lines = sorted(control_lines)
    for rule in model.controls:
        line = lines[rule.index] if rule.index < len(lines) else None
        if not model.has(rule.target_link, LINK_KINDS):
            raise DanglingReference(
                f"control targets unknown link {rule.target_link!r}", line=line
            )
        if isinstance(rule.trigger, NodeLevelTrigger):
            if not model.has(rule.trigger.node, NODE_KINDS):
                raise DanglingReference(
                    f"control trigger references unknown node {rule.trigger.node!r}",
                    line=line,
                )


def extract_control_rules(model: InpModel) -> tuple[ControlRule, ...]:
    """The model's control rules, in source order."""
    return model.controls


def inventory(model: InpModel, kind: str) -> list[str]:
    """Identifiers of all elements of ``kind``, sorted."""
    if kind not in KINDS:
        raise ValueError(f"unknown element kind {kind!r}")
    return sorted(e.id for e in model.elements if e.kind == kind)


def format_number(value: float) -> str:
    """Canonical numeric text: integers without a decimal point."""
    if value == math.inf:
        return "inf"
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def format_action(action: LinkAction) -> str:
    if action.status == "open":
        return "OPEN"
    if action.status == "closed":
        return "CLOSED"
    return format_number(action.value if action.value is not None else 0.0)


def format_trigger(trigger: Trigger) -> str:
    if isinstance(trigger, NodeLevelTrigger):
        return (
            f"IF NODE {trigger.node} {trigger.relation.upper()} "
            f"{format_number(trigger.threshold)}"
        )
    if isinstance(trigger, AtTimeTrigger):
        return f"AT TIME {format_number(trigger.hours)}"
    return f"AT CLOCKTIME {format_number(trigger.hour)}"


def format_control(rule: ControlRule) -> str:
    return f"LINK {rule.target_link} {format_action(rule.action)} {format_trigger(rule.trigger)}"


def to_inp_text(model: InpModel) -> str:
    """Serialise the recognised subset back to ``.inp`` text.

    Re-parsing the result yields a model equal to the input; element
    attributes beyond identifiers are not retained, by design.
    """
    out: list[str] = ["[TITLE]"]
    out.extend(model.title.splitlines())
    for kind in KINDS:
        ids = [e.id for e in model.elements if e.kind == kind]
        if not ids:
            continue
        out.append("")
        out.append(f"[{_SECTION_FOR_KIND[kind]}]")
        out.extend(ids)
    out.append("")
    out.append("[CONTROLS]")
    out.extend(format_control(rule) for rule in model.controls)
    for name, lines in model.extra_sections:
        out.append("")
        out.append(f"[{name}]")
        out.extend(lines)
    return "\n".join(out) + "\n"
