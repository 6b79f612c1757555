// Node positions are presentation-only: seeded on a circle, nudged by
// dragging, and persisted per session in the browser. The server never
// sees them.

export interface Point {
  x: number;
  y: number;
}

export type Layout = Record<string, Point>;

export function circleLayout(ids: string[], width: number, height: number): Layout {
  const cx = width / 2;
  const cy = height / 2;
  const r = Math.max(60, Math.min(width, height) / 2 - 70);
  const layout: Layout = {};
  ids.forEach((id, i) => {
    const angle = (2 * Math.PI * i) / Math.max(ids.length, 1) - Math.PI / 2;
    layout[id] = { x: cx + r * Math.cos(angle), y: cy + r * Math.sin(angle) };
  });
  return layout;
}

/** Keep dragged positions, seed only ids that lack one. */
export function mergeLayout(existing: Layout, ids: string[], width: number, height: number): Layout {
  const missing = ids.filter((id) => !(id in existing));
  if (!missing.length) {
    return pick(existing, ids);
  }
  const seeded = circleLayout(ids, width, height);
  const merged: Layout = {};
  for (const id of ids) {
    merged[id] = existing[id] ?? seeded[id];
  }
  return merged;
}

function pick(layout: Layout, ids: string[]): Layout {
  const out: Layout = {};
  for (const id of ids) {
    if (layout[id]) {
      out[id] = layout[id];
    }
  }
  return out;
}

const KEY_PREFIX = "cpaforge.layout.";

export function loadLayout(sessionId: string): Layout {
  if (typeof localStorage === "undefined") {
    return {};
  }
  try {
    return JSON.parse(localStorage.getItem(KEY_PREFIX + sessionId) ?? "{}") as Layout;
  } catch {
    return {};
  }
}

export function saveLayout(sessionId: string, layout: Layout) {
  if (typeof localStorage === "undefined") {
    return;
  }
  localStorage.setItem(KEY_PREFIX + sessionId, JSON.stringify(layout));
}
