"""Stateful editing sessions over the whole pipeline, exposed over HTTP.

A session wraps one parsed network model plus the evolving cyber topology,
attack list and metric parameters. Every applied command produces a new
immutable :class:`Session` value with ``revision + 1``; rejected commands
leave the stored state untouched. Mutations within one session are
serialized by a per-session lock, and each accepted revision is written
through to a JSON snapshot so a restarted process can restore its sessions.

HTTP surface (see :func:`create_app`)::

    POST /sessions                      upload .inp text, returns the session
    GET  /sessions/{id}                 full state + revision
    POST /sessions/{id}/commands        apply one command
    GET  /sessions/{id}/report          resilience report, ?lambda=0.2,1,5
    GET  /sessions/{id}/export.cpa      scenario file attachment

Errors cross the wire as ``{"code", "message", "line"?}``.
"""

from __future__ import annotations

import dataclasses
import json
import os
import secrets
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

from .attack_studio import (
    AttackSpec,
    attack_from_json_dict,
    attack_to_json_dict,
    build_attack,
    control_rule_to_json_dict,
    render_cpa,
)
from .cyber_topology import (
    CyberLink,
    CyberNode,
    CyberTopology,
    SensorRef,
    add_cyber_link,
    add_cyber_node,
    derive_baseline_topology,
    remove_cyber_link,
    remove_cyber_node,
    to_logical_graph,
    topology_from_json_dict,
    topology_to_json_dict,
    validate as validate_topology,
)
from .errors import (
    IncompleteParams,
    ToolError,
    UnknownCommand,
    UnknownSession,
    UnknownTarget,
    ValidationFailed,
)
from .inp_model import InpModel, parse_inp
from .resilience import (
    DiversityParams,
    ResilienceReport,
    report_to_json_dict,
    resilience_report,
)

COMMAND_KINDS = (
    "add_node",
    "remove_node",
    "add_link",
    "remove_link",
    "add_attack",
    "remove_attack",
    "set_params",
)


@dataclass(frozen=True)
class Command:
    kind: str
    payload: Mapping[str, Any] = dataclasses.field(default_factory=dict)


@dataclass(frozen=True)
class Session:
    """One editing session; immutable, replaced wholesale on every mutation."""

    id: str
    model: InpModel
    topology: CyberTopology
    attacks: tuple[AttackSpec, ...]
    params: DiversityParams
    revision: int
    inp_text: str = ""


def create_session(inp_text: str, name: str = "", session_id: str | None = None) -> Session:
    """Parse ``inp_text`` and start a session at revision 0.

    The baseline topology is derived from the model's control rules; parse
    errors propagate with their line numbers and no session is created.
    """
    model = parse_inp(inp_text, source_name=name)
    topology = derive_baseline_topology(model.controls, model)
    return Session(
        id=session_id or secrets.token_hex(16),
        model=model,
        topology=topology,
        attacks=(),
        params=DiversityParams(),
        revision=0,
        inp_text=inp_text,
    )


# --- command payload coercion -------------------------------------------------

def _require(payload: Mapping[str, Any], key: str, kind: str) -> Any:
    if key not in payload or payload[key] is None:
        raise IncompleteParams(f"{kind} needs {key!r}")
    return payload[key]


def _sensor_ref_from_any(value: Any) -> SensorRef:
    if isinstance(value, SensorRef):
        return value
    if isinstance(value, Mapping):
        return SensorRef(str(value["element"]).upper(), str(value["quantity"]).lower())
    if isinstance(value, str):
        element, _, quantity = value.rpartition(".")
        if element and quantity:
            return SensorRef(element.upper(), quantity.lower())
    raise IncompleteParams(f"bad sensor reference {value!r}")


def _node_from_payload(payload: Mapping[str, Any]) -> CyberNode:
    node_id = str(_require(payload, "id", "add_node")).upper()
    try:
        sensors = frozenset(
            _sensor_ref_from_any(s) for s in payload.get("sensors", ())
        )
        actuators = frozenset(str(a).upper() for a in payload.get("actuators", ()))
        controls = frozenset(int(c) for c in payload.get("controls", ()))
    except (KeyError, TypeError, ValueError) as exc:
        raise IncompleteParams(f"bad add_node payload: {exc}") from exc
    return CyberNode(id=node_id, sensors=sensors, actuators=actuators, controls=controls)


def _link_from_payload(payload: Mapping[str, Any]) -> CyberLink:
    source = str(_require(payload, "source", "add_link")).upper()
    destination = str(_require(payload, "destination", "add_link")).upper()
    try:
        sensors = frozenset(
            _sensor_ref_from_any(s) for s in payload.get("sensors", ())
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise IncompleteParams(f"bad add_link payload: {exc}") from exc
    return CyberLink(source=source, destination=destination, sensors=sensors)


def _params_from_payload(
    current: DiversityParams, payload: Mapping[str, Any]
) -> DiversityParams:
    changes: dict[str, Any] = {}
    if "lambdas" in payload and payload["lambdas"] is not None:
        raw = payload["lambdas"]
        if isinstance(raw, str):
            raw = [part for part in raw.split(",") if part.strip()]
        try:
            changes["lambdas"] = tuple(float(v) for v in raw)
        except (TypeError, ValueError) as exc:
            raise IncompleteParams(f"bad lambdas {payload['lambdas']!r}") from exc
    if "lambda" in payload and payload["lambda"] is not None:
        try:
            changes["lambda_"] = float(payload["lambda"])
        except (TypeError, ValueError) as exc:
            raise IncompleteParams(f"bad lambda {payload['lambda']!r}") from exc
    for key, cast in (
        ("t_ksd", float),
        ("mode", str),
        ("k_paths", int),
        ("max_paths", int),
    ):
        if key in payload and payload[key] is not None:
            try:
                changes[key] = cast(payload[key])
            except (TypeError, ValueError) as exc:
                raise IncompleteParams(f"bad {key} {payload[key]!r}") from exc
    if "max_hops" in payload:
        raw = payload["max_hops"]
        try:
            changes["max_hops"] = None if raw is None else int(raw)
        except (TypeError, ValueError) as exc:
            raise IncompleteParams(f"bad max_hops {raw!r}") from exc
    if not changes:
        raise IncompleteParams("set_params changed nothing")
    try:
        return dataclasses.replace(current, **changes)
    except ValueError as exc:
        raise IncompleteParams(str(exc)) from exc


def apply(session: Session, command: Command) -> Session:
    """New session value with the command applied and ``revision + 1``.

    Errors from the underlying modules keep their type and line but gain
    the command kind as message context.
    """
    kind = command.kind
    payload = command.payload or {}
    if kind not in COMMAND_KINDS:
        raise UnknownCommand(f"unknown command {kind!r}")
    if not isinstance(payload, Mapping):
        raise IncompleteParams(f"{kind} payload must be an object")

    try:
        topology, attacks, params = session.topology, session.attacks, session.params
        if kind == "add_node":
            topology = add_cyber_node(topology, _node_from_payload(payload), session.model)
        elif kind == "remove_node":
            node_id = str(_require(payload, "id", kind)).upper()
            topology = remove_cyber_node(topology, node_id)
        elif kind == "add_link":
            topology = add_cyber_link(topology, _link_from_payload(payload))
        elif kind == "remove_link":
            source = str(_require(payload, "source", kind)).upper()
            destination = str(_require(payload, "destination", kind)).upper()
            topology = remove_cyber_link(topology, source, destination)
        elif kind == "add_attack":
            attack_kind = str(_require(payload, "kind", kind))
            attack_params = payload.get("params")
            if not isinstance(attack_params, Mapping):
                raise IncompleteParams("add_attack needs a 'params' object")
            attack = build_attack(
                attack_kind, attack_params, topology, session.model, existing=attacks
            )
            attacks = attacks + (attack,)
        elif kind == "remove_attack":
            attack_id = str(_require(payload, "id", kind)).upper()
            kept = tuple(a for a in attacks if a.id != attack_id)
            if len(kept) == len(attacks):
                raise UnknownTarget(f"no attack {attack_id!r}")
            attacks = kept
        else:
            params = _params_from_payload(params, payload)
    except ValidationFailed:
        raise
    except ToolError as exc:
        raise type(exc)(f"{kind}: {exc.message}", line=exc.line) from exc

    return dataclasses.replace(
        session, topology=topology, attacks=attacks, params=params,
        revision=session.revision + 1,
    )


def report(session: Session, lambdas: tuple[float, ...] | None = None) -> ResilienceReport:
    """Resilience report for the session's current logical graph."""
    graph = to_logical_graph(session.topology)
    return resilience_report(graph, lambdas=lambdas, params=session.params)


def export(session: Session) -> str:
    """Scenario text for the current state; byte-identical to ``render_cpa``."""
    return render_cpa(session.topology, session.attacks)


# --- JSON views ---------------------------------------------------------------

def params_to_json_dict(params: DiversityParams) -> dict[str, Any]:
    return {
        "lambda": params.lambda_,
        "lambdas": list(params.lambdas),
        "t_ksd": params.t_ksd,
        "mode": params.mode,
        "k_paths": params.k_paths,
        "max_paths": params.max_paths,
        "max_hops": params.max_hops,
    }


def _params_from_json_dict(obj: Mapping[str, Any]) -> DiversityParams:
    return DiversityParams(
        lambda_=float(obj.get("lambda", 1.0)),
        t_ksd=float(obj.get("t_ksd", 0.0)),
        mode=str(obj.get("mode", "max")),
        k_paths=int(obj.get("k_paths", 3)),
        max_paths=int(obj.get("max_paths", 10_000)),
        max_hops=None if obj.get("max_hops") is None else int(obj["max_hops"]),
        lambdas=tuple(float(v) for v in obj.get("lambdas", (0.2, 1.0, 5.0))),
    )


def session_view(session: Session) -> dict[str, Any]:
    """Full state document served by ``GET /sessions/{id}``."""
    diagnostics = validate_topology(session.topology, session.model)
    return {
        "id": session.id,
        "revision": session.revision,
        "name": session.model.source_name,
        "model": {
            "title": session.model.title,
            "elements": [
                {"id": e.id, "kind": e.kind} for e in session.model.elements
            ],
            "controls": [control_rule_to_json_dict(r) for r in session.model.controls],
        },
        "topology": topology_to_json_dict(session.topology),
        "attacks": [attack_to_json_dict(a) for a in session.attacks],
        "params": params_to_json_dict(session.params),
        "diagnostics": [
            {"severity": d.severity, "subject": d.subject, "message": d.message}
            for d in diagnostics
        ],
    }


def _session_to_snapshot(session: Session) -> dict[str, Any]:
    return {
        "id": session.id,
        "revision": session.revision,
        "name": session.model.source_name,
        "inp_text": session.inp_text,
        "topology": topology_to_json_dict(session.topology),
        "attacks": [attack_to_json_dict(a) for a in session.attacks],
        "params": params_to_json_dict(session.params),
    }


def _session_from_snapshot(obj: Mapping[str, Any]) -> Session:
    model = parse_inp(str(obj.get("inp_text", "")), source_name=str(obj.get("name", "")))
    return Session(
        id=str(obj["id"]),
        model=model,
        topology=topology_from_json_dict(obj["topology"]),
        attacks=tuple(attack_from_json_dict(a) for a in obj.get("attacks", ())),
        params=_params_from_json_dict(obj.get("params", {})),
        revision=int(obj["revision"]),
        inp_text=str(obj.get("inp_text", "")),
    )


# --- the store ----------------------------------------------------------------

class SessionStore:
    """In-memory session registry with optional write-through snapshots.

    All mutations for one session run under that session's lock, so any
    sequence of revisions a client observes is gap-free.
    """

    def __init__(self, snapshot_dir: str | os.PathLike | None = None):
        self._sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()
        self._snapshot_dir = Path(snapshot_dir) if snapshot_dir is not None else None
        if self._snapshot_dir is not None:
            self._snapshot_dir.mkdir(parents=True, exist_ok=True)
            self.restore()

    def ids(self) -> list[str]:
        with self._registry_lock:
            return sorted(self._sessions)

    def create(self, inp_text: str, name: str = "") -> Session:
        session = create_session(inp_text, name=name)
        with self._registry_lock:
            self._sessions[session.id] = session
            self._locks[session.id] = threading.Lock()
        self._write_snapshot(session)
        return session

    def get(self, session_id: str) -> Session:
        with self._registry_lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise UnknownSession(f"no session {session_id!r}")
        return session

    def apply(self, session_id: str, command: Command) -> Session:
        with self._registry_lock:
            lock = self._locks.get(session_id)
        if lock is None:
            raise UnknownSession(f"no session {session_id!r}")
        with lock:
            current = self.get(session_id)
            updated = apply(current, command)
            with self._registry_lock:
                self._sessions[session_id] = updated
            self._write_snapshot(updated)
        return updated

    def delete(self, session_id: str) -> None:
        with self._registry_lock:
            self._sessions.pop(session_id, None)
            self._locks.pop(session_id, None)
        if self._snapshot_dir is not None:
            path = self._snapshot_dir / f"{session_id}.json"
            if path.exists():
                path.unlink()

    def restore(self) -> int:
        """Load every readable snapshot in the snapshot directory."""
        if self._snapshot_dir is None:
            return 0
        count = 0
        for path in sorted(self._snapshot_dir.glob("*.json")):
            try:
                session = _session_from_snapshot(json.loads(path.read_text()))
            except (ValueError, KeyError, ToolError, ValidationFailed):
                continue  # a corrupt snapshot must not block startup
            with self._registry_lock:
                self._sessions[session.id] = session
                self._locks.setdefault(session.id, threading.Lock())
            count += 1
        return count

    def _write_snapshot(self, session: Session) -> None:
        if self._snapshot_dir is None:
            return
        path = self._snapshot_dir / f"{session.id}.json"
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(_session_to_snapshot(session), indent=2) + "\n")
        os.replace(tmp, path)


# --- HTTP app -----------------------------------------------------------------

def _parse_lambda_query(raw: str | None) -> tuple[float, ...] | None:
    if raw is None or not raw.strip():
        return None
    try:
        return tuple(float(part) for part in raw.split(",") if part.strip())
    except ValueError as exc:
        raise IncompleteParams(f"bad lambda list {raw!r}") from exc


def create_app(store: SessionStore | None = None):
    """FastAPI application serving the session endpoints."""
    from fastapi import Body, FastAPI, Query
    from fastapi.middleware.cors import CORSMiddleware
    from fastapi.responses import JSONResponse, PlainTextResponse

    from . import __version__

    app = FastAPI(title="cpaforge", version=__version__)
    app.state.store = store if store is not None else SessionStore()
    # the UI is served from its own dev server; this tool binds to localhost
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def _error_response(exc: ToolError) -> JSONResponse:
        status = 404 if isinstance(exc, UnknownSession) else 400
        body: dict[str, Any] = {"code": exc.code, "message": exc.message}
        if exc.line is not None:
            body["line"] = exc.line
        return JSONResponse(status_code=status, content=body)

    @app.exception_handler(ToolError)
    async def _on_tool_error(request, exc: ToolError):
        return _error_response(exc)

    @app.post("/sessions", status_code=201)
    def create(body: dict = Body(...)) -> dict:
        inp_text = body.get("inp")
        if not isinstance(inp_text, str):
            raise IncompleteParams("body must carry 'inp' text")
        name = str(body.get("name", ""))
        session = app.state.store.create(inp_text, name=name)
        return session_view(session)

    @app.get("/sessions/{session_id}")
    def show(session_id: str) -> dict:
        return session_view(app.state.store.get(session_id))

    @app.post("/sessions/{session_id}/commands")
    def command(session_id: str, body: dict = Body(...)) -> dict:
        kind = body.get("kind")
        if not isinstance(kind, str):
            raise UnknownCommand("command needs a 'kind'")
        payload = body.get("payload") or {}
        session = app.state.store.apply(session_id, Command(kind, payload))
        return session_view(session)

    @app.get("/sessions/{session_id}/report")
    def report_endpoint(
        session_id: str,
        lambda_: str | None = Query(default=None, alias="lambda"),
    ) -> dict:
        session = app.state.store.get(session_id)
        result = report(session, lambdas=_parse_lambda_query(lambda_))
        return {"revision": session.revision, **report_to_json_dict(result)}

    @app.get("/sessions/{session_id}/export.cpa")
    def export_endpoint(session_id: str) -> PlainTextResponse:
        session = app.state.store.get(session_id)
        return PlainTextResponse(
            export(session),
            headers={"Content-Disposition": 'attachment; filename="scenario.cpa"'},
        )

    return app
