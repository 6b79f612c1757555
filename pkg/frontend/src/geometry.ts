// Hit-testing math for the canvas, kept DOM-free.

import type { Point } from "./layout.js";

export const NODE_RADIUS = 26;

export function hitNode(layout: Record<string, Point>, p: Point, radius = NODE_RADIUS): string | null {
  // Later entries draw on top, so scan in reverse insertion order.
  const ids = Object.keys(layout);
  for (let i = ids.length - 1; i >= 0; i--) {
    const c = layout[ids[i]];
    if ((c.x - p.x) ** 2 + (c.y - p.y) ** 2 <= radius * radius) {
      return ids[i];
    }
  }
  return null;
}

export function distanceToSegment(p: Point, a: Point, b: Point): number {
  const dx = b.x - a.x;
  const dy = b.y - a.y;
  const lengthSq = dx * dx + dy * dy;
  if (lengthSq === 0) {
    return Math.hypot(p.x - a.x, p.y - a.y);
  }
  let t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / lengthSq;
  t = Math.max(0, Math.min(1, t));
  return Math.hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

export function hitLink(
  layout: Record<string, Point>,
  links: { source: string; destination: string }[],
  p: Point,
  tolerance = 7,
): { source: string; destination: string } | null {
  for (let i = links.length - 1; i >= 0; i--) {
    const a = layout[links[i].source];
    const b = layout[links[i].destination];
    if (a && b && distanceToSegment(p, a, b) <= tolerance) {
      return links[i];
    }
  }
  return null;
}

/** Point on the edge of the destination circle, for arrowheads. */
export function arrowTip(from: Point, to: Point, radius = NODE_RADIUS): Point {
  const dx = to.x - from.x;
  const dy = to.y - from.y;
  const length = Math.hypot(dx, dy) || 1;
  return { x: to.x - (dx / length) * radius, y: to.y - (dy / length) * radius };
}
