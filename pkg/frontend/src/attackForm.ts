// Attack-form field model: client-side checks mirror the server's
// build_attack preconditions so most mistakes never leave the browser.
// The server stays authoritative; anything it rejects is mapped back
// onto the offending field via mapServerError.

import type { ApiError } from "./api.js";
import type { AttackKind } from "./types.js";

export const ATTACK_KINDS: AttackKind[] = [
  "communication",
  "control",
  "sensor",
  "actuator",
];

export interface AttackFields {
  target: string;
  start: string;
  end: string;
  value: string; // sensor/communication: injected absolute value
  offset: string; // sensor/communication: injected offset
  state: string; // actuator: open | closed | setting
  settingValue: string; // actuator: number when state == setting
  rule: string; // control: replacement statement text
}

export type FieldName = keyof AttackFields;

export const EMPTY_FIELDS: AttackFields = {
  target: "",
  start: "0",
  end: "END",
  value: "",
  offset: "",
  state: "closed",
  settingValue: "",
  rule: "",
};

const TARGET_HINTS: Record<AttackKind, string> = {
  sensor: "ELEMENT.QUANTITY, e.g. T1.LEVEL",
  communication: "SOURCE->DESTINATION, e.g. PLC_T1->SCADA",
  actuator: "element id, e.g. PU1",
  control: "RULE<n>, e.g. RULE0",
};

export function targetHint(kind: AttackKind): string {
  return TARGET_HINTS[kind];
}

const NUMBER = /^[-+]?(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?$/;
const SENSOR = /^[A-Za-z0-9_.\-]+\.(pressure|level|flow|status)$/i;
const CONDITION =
  /^(END|TIME\s+\S+|[-+]?(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?|\S+\.(pressure|level|flow|status)\s+(above|below)\s+\S+)$/i;

function checkCondition(text: string, field: FieldName, errors: Partial<Record<FieldName, string>>) {
  const token = text.trim();
  if (!token) {
    errors[field] = "required";
    return;
  }
  if (!CONDITION.test(token)) {
    errors[field] = "expected TIME <hours>, END, or ELEMENT.QUANTITY ABOVE|BELOW <value>";
  }
}

/** Empty object means the form may be submitted. */
export function validateAttackFields(
  kind: AttackKind,
  fields: AttackFields,
): Partial<Record<FieldName, string>> {
  const errors: Partial<Record<FieldName, string>> = {};
  const target = fields.target.trim();

  if (!target) {
    errors.target = "required";
  } else if (kind === "sensor" && !SENSOR.test(target)) {
    errors.target = `expected ${TARGET_HINTS.sensor}`;
  } else if (kind === "communication" && !/^\S+->\S+$/.test(target)) {
    errors.target = `expected ${TARGET_HINTS.communication}`;
  } else if (kind === "control" && !/^RULE\d+$/i.test(target)) {
    errors.target = `expected ${TARGET_HINTS.control}`;
  }

  checkCondition(fields.start, "start", errors);
  checkCondition(fields.end, "end", errors);

  if (kind === "sensor" || kind === "communication") {
    const hasValue = fields.value.trim() !== "";
    const hasOffset = fields.offset.trim() !== "";
    if (hasValue === hasOffset) {
      errors.value = "exactly one of value or offset";
    } else if (hasValue && !NUMBER.test(fields.value.trim())) {
      errors.value = "not a number";
    } else if (hasOffset && !NUMBER.test(fields.offset.trim())) {
      errors.offset = "not a number";
    }
  } else if (kind === "actuator") {
    const state = fields.state.trim().toLowerCase();
    if (!["open", "closed", "setting"].includes(state)) {
      errors.state = "open, closed, or setting";
    } else if (state === "setting" && !NUMBER.test(fields.settingValue.trim())) {
      errors.settingValue = "setting needs a numeric value";
    }
  } else if (kind === "control" && !fields.rule.trim()) {
    errors.rule = "replacement control statement required";
  }

  return errors;
}

/** The add_attack command payload for validated fields. */
export function attackPayload(kind: AttackKind, fields: AttackFields): Record<string, unknown> {
  const params: Record<string, string> = {
    target: fields.target.trim(),
    start: fields.start.trim(),
    end: fields.end.trim(),
  };
  if (kind === "sensor" || kind === "communication") {
    if (fields.value.trim() !== "") {
      params.value = fields.value.trim();
    } else {
      params.offset = fields.offset.trim();
    }
  } else if (kind === "actuator") {
    const state = fields.state.trim().toLowerCase();
    params.state = state === "setting" ? `setting ${fields.settingValue.trim()}` : state;
  } else {
    params.rule = fields.rule.trim();
  }
  return { kind, params };
}

/** Best-effort mapping of a server rejection onto the field that caused it. */
export function mapServerError(error: ApiError): { field: FieldName | null; message: string } {
  const message = error.message.replace(/^add_attack: /, "");
  const lower = message.toLowerCase();
  if (error.code === "InvalidWindow") {
    return { field: lower.includes("end") && !lower.includes("start") ? "end" : "start", message };
  }
  if (error.code === "UnknownTarget") {
    if (lower.includes("replacement rule")) {
      return { field: "rule", message };
    }
    return { field: "target", message };
  }
  if (error.code === "IncompleteParams") {
    if (lower.includes("'value' or 'offset'")) {
      return { field: "value", message };
    }
    if (lower.includes("state")) {
      return { field: "state", message };
    }
    if (lower.includes("rule")) {
      return { field: "rule", message };
    }
    if (lower.includes("target")) {
      return { field: "target", message };
    }
  }
  if (error.code === "MalformedControl") {
    return { field: "rule", message };
  }
  return { field: null, message };
}
