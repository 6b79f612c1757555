// Wire types, mirroring the session service's JSON exactly.

export type ElementKind =
  | "junction"
  | "reservoir"
  | "tank"
  | "pipe"
  | "pump"
  | "valve";

export type AttackKind = "communication" | "control" | "sensor" | "actuator";

export interface SensorRef {
  element: string;
  quantity: string;
}

export interface CyberNode {
  id: string;
  sensors: SensorRef[];
  actuators: string[];
  controls: number[];
}

export interface CyberLink {
  source: string;
  destination: string;
  sensors: SensorRef[];
}

export interface Topology {
  provenance: string;
  nodes: CyberNode[];
  links: CyberLink[];
}

export interface ControlTrigger {
  type: "node_level" | "at_time" | "clock_time";
  node?: string;
  relation?: string;
  threshold?: number;
  hours?: number;
  hour?: number;
}

export interface ControlRule {
  index: number;
  target_link: string;
  action: { status: string; value: number | null };
  trigger: ControlTrigger;
  text: string;
}

export interface Condition {
  type: "time" | "value";
  hours?: number | null;
  element?: string;
  quantity?: string;
  relation?: string;
  threshold?: number;
}

export interface Attack {
  id: string;
  kind: AttackKind;
  target:
    | { element: string; quantity: string }
    | { source: string; destination: string }
    | string
    | number;
  window: { start: Condition; end: Condition };
  payload: Record<string, unknown>;
}

export interface Params {
  lambda: number;
  lambdas: number[];
  t_ksd: number;
  mode: "max" | "cumulative";
  k_paths: number;
  max_paths: number;
  max_hops: number | null;
}

export interface Diagnostic {
  severity: "error" | "warning";
  subject: string;
  message: string;
}

export interface SessionView {
  id: string;
  revision: number;
  name: string;
  model: {
    title: string;
    elements: { id: string; kind: ElementKind }[];
    controls: ControlRule[];
  };
  topology: Topology;
  attacks: Attack[];
  params: Params;
  diagnostics: Diagnostic[];
}

export interface PairDiversity {
  source: string;
  destination: string;
  k_sd: number;
  epd: Record<string, number>;
}

export interface Report {
  revision: number;
  lambdas: number[];
  tgd: Record<string, number>;
  pairs: PairDiversity[];
  params: Record<string, unknown>;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  line?: number;
}

export type CommandKind =
  | "add_node"
  | "remove_node"
  | "add_link"
  | "remove_link"
  | "add_attack"
  | "remove_attack"
  | "set_params";

export interface CommandBody {
  kind: CommandKind;
  payload: Record<string, unknown>;
}
