// Topology canvas: draw the cyber graph, let the user drag nodes
// (presentation only) and wire links by clicking source then target.
// Structural edits always round-trip through the controller.

import { Controller } from "./controller.js";
import { arrowTip, hitLink, hitNode, NODE_RADIUS } from "./geometry.js";
import { loadLayout, mergeLayout, saveLayout, type Layout, type Point } from "./layout.js";
import { Store } from "./state.js";

export type CanvasMode = "select" | "link";

export class TopologyCanvas {
  private layout: Layout = {};
  private mode: CanvasMode = "select";
  private linkSource: string | null = null;
  private dragging: string | null = null;
  private dragOffset: Point = { x: 0, y: 0 };
  private readonly ctx: CanvasRenderingContext2D;

  constructor(
    private readonly canvas: HTMLCanvasElement,
    private readonly store: Store,
    private readonly controller: Controller,
    private readonly onError: (message: string) => void,
  ) {
    this.ctx = canvas.getContext("2d")!;
    canvas.addEventListener("pointerdown", (e) => this.pointerDown(e));
    canvas.addEventListener("pointermove", (e) => this.pointerMove(e));
    canvas.addEventListener("pointerup", () => this.pointerUp());
    store.subscribe(() => this.sync());
  }

  setMode(mode: CanvasMode) {
    this.mode = mode;
    this.linkSource = null;
    this.draw();
  }

  getMode(): CanvasMode {
    return this.mode;
  }

  private point(e: PointerEvent): Point {
    const rect = this.canvas.getBoundingClientRect();
    return { x: e.clientX - rect.left, y: e.clientY - rect.top };
  }

  private sync() {
    const session = this.store.get().session;
    if (!session) {
      return;
    }
    const ids = session.topology.nodes.map((n) => n.id);
    const stored = Object.keys(this.layout).length ? this.layout : loadLayout(session.id);
    this.layout = mergeLayout(stored, ids, this.canvas.width, this.canvas.height);
    this.draw();
  }

  private pointerDown(e: PointerEvent) {
    const session = this.store.get().session;
    if (!session) {
      return;
    }
    const p = this.point(e);
    const nodeId = hitNode(this.layout, p);

    if (this.mode === "link") {
      if (!nodeId) {
        this.linkSource = null;
        this.draw();
        return;
      }
      if (this.linkSource === null) {
        this.linkSource = nodeId;
        this.draw();
        return;
      }
      const source = this.linkSource;
      this.linkSource = null;
      this.controller.addLink(source, nodeId).catch((err) => this.onError(String(err.message ?? err)));
      return;
    }

    if (nodeId) {
      this.store.setSelection({ kind: "node", id: nodeId });
      this.dragging = nodeId;
      const c = this.layout[nodeId];
      this.dragOffset = { x: p.x - c.x, y: p.y - c.y };
      return;
    }
    const link = hitLink(this.layout, session.topology.links, p);
    this.store.setSelection(link ? { kind: "link", ...link } : null);
  }

  private pointerMove(e: PointerEvent) {
    if (!this.dragging) {
      return;
    }
    const p = this.point(e);
    this.layout[this.dragging] = { x: p.x - this.dragOffset.x, y: p.y - this.dragOffset.y };
    this.draw();
  }

  private pointerUp() {
    if (this.dragging) {
      const session = this.store.get().session;
      if (session) {
        saveLayout(session.id, this.layout);
      }
      this.dragging = null;
    }
  }

  draw() {
    const { ctx, canvas } = this;
    const state = this.store.get();
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    const session = state.session;
    if (!session) {
      return;
    }

    for (const link of session.topology.links) {
      const a = this.layout[link.source];
      const b = this.layout[link.destination];
      if (!a || !b) {
        continue;
      }
      const selected =
        state.selection?.kind === "link" &&
        state.selection.source === link.source &&
        state.selection.destination === link.destination;
      this.drawArrow(a, b, selected, link.sensors.length > 0);
    }

    for (const node of session.topology.nodes) {
      const c = this.layout[node.id];
      if (!c) {
        continue;
      }
      const selected = state.selection?.kind === "node" && state.selection.id === node.id;
      const isLinkSource = this.linkSource === node.id;
      ctx.beginPath();
      ctx.arc(c.x, c.y, NODE_RADIUS, 0, 2 * Math.PI);
      ctx.fillStyle = selected ? "#dbeafe" : "#f8fafc";
      ctx.fill();
      ctx.lineWidth = selected || isLinkSource ? 3 : 1.5;
      ctx.strokeStyle = isLinkSource ? "#d97706" : selected ? "#2563eb" : "#475569";
      ctx.stroke();

      ctx.fillStyle = "#0f172a";
      ctx.font = "11px system-ui, sans-serif";
      ctx.textAlign = "center";
      ctx.fillText(node.id, c.x, c.y - NODE_RADIUS - 6);
      ctx.fillStyle = "#64748b";
      ctx.font = "10px system-ui, sans-serif";
      ctx.fillText(`${node.sensors.length}s ${node.actuators.length}a`, c.x, c.y + 4);
    }
  }

  private drawArrow(a: Point, b: Point, selected: boolean, carriesSensors: boolean) {
    const { ctx } = this;
    const tip = arrowTip(a, b);
    const start = arrowTip(b, a);
    ctx.beginPath();
    ctx.moveTo(start.x, start.y);
    ctx.lineTo(tip.x, tip.y);
    ctx.lineWidth = selected ? 3 : 1.5;
    ctx.strokeStyle = selected ? "#2563eb" : carriesSensors ? "#0d9488" : "#94a3b8";
    ctx.stroke();

    const angle = Math.atan2(tip.y - start.y, tip.x - start.x);
    ctx.beginPath();
    ctx.moveTo(tip.x, tip.y);
    ctx.lineTo(tip.x - 9 * Math.cos(angle - 0.45), tip.y - 9 * Math.sin(angle - 0.45));
    ctx.lineTo(tip.x - 9 * Math.cos(angle + 0.45), tip.y - 9 * Math.sin(angle + 0.45));
    ctx.closePath();
    ctx.fillStyle = ctx.strokeStyle;
    ctx.fill();
  }
}
