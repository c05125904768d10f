// Layered left-to-right DAG layout for call-graph panels. The server
// ships topology only, so positions are computed here; determinism is
// nice for tests but not a contract.

import type { GraphModel } from './models.js';

export interface NodeBox {
  id: string;
  x: number;
  y: number;
  width: number;
  height: number;
}

export interface Layout {
  boxes: Map<string, NodeBox>;
  width: number;
  height: number;
}

export const NODE_HEIGHT = 34;
const CHAR_WIDTH = 7.5;
const H_GAP = 90;
const V_GAP = 26;
const MARGIN = 24;

function nodeWidth(label: string): number {
  return Math.max(60, Math.round(label.length * CHAR_WIDTH) + 24);
}

/**
 * Assign every node the length of the longest path reaching it from an
 * in-degree-zero node. Call graphs can contain cycles (recursion), so
 * edges closing a cycle are ignored while layering.
 */
export function layerNodes(model: GraphModel): Map<string, number> {
  const successors = new Map<string, string[]>();
  const indegree = new Map<string, number>();
  for (const node of model.nodes) {
    successors.set(node.id, []);
    indegree.set(node.id, 0);
  }
  for (const edge of model.edges) {
    if (edge.source === edge.target) continue;
    if (!successors.has(edge.source) || !indegree.has(edge.target)) continue;
    successors.get(edge.source)!.push(edge.target);
    indegree.set(edge.target, indegree.get(edge.target)! + 1);
  }

  const layer = new Map<string, number>();
  const onStack = new Set<string>();

  const visit = (id: string, depth: number): void => {
    if (onStack.has(id)) return; // cycle edge, skip
    const known = layer.get(id);
    if (known !== undefined && known >= depth) return;
    layer.set(id, depth);
    onStack.add(id);
    for (const next of successors.get(id) ?? []) visit(next, depth + 1);
    onStack.delete(id);
  };

  for (const node of model.nodes) {
    if (indegree.get(node.id) === 0) visit(node.id, 0);
  }
  // components that are pure cycles have no in-degree-zero entry
  for (const node of model.nodes) {
    if (!layer.has(node.id)) visit(node.id, 0);
  }
  return layer;
}

function orderWithinLayers(
  model: GraphModel,
  layer: Map<string, number>,
): string[][] {
  const count = Math.max(0, ...[...layer.values()].map((l) => l + 1));
  const layers: string[][] = Array.from({ length: count }, () => []);
  for (const node of model.nodes) layers[layer.get(node.id)!]!.push(node.id);

  // one barycenter sweep: order each layer by the mean slot of its
  // predecessors in the previous layer
  const slot = new Map<string, number>();
  for (const ids of layers) ids.forEach((id, i) => slot.set(id, i));
  const preds = new Map<string, string[]>();
  for (const edge of model.edges) {
    if (!preds.has(edge.target)) preds.set(edge.target, []);
    preds.get(edge.target)!.push(edge.source);
  }
  for (let i = 1; i < layers.length; i++) {
    const keyed = layers[i]!.map((id, index) => {
      const sources = (preds.get(id) ?? []).filter(
        (s) => layer.get(s) === i - 1,
      );
      const mean = sources.length
        ? sources.reduce((acc, s) => acc + slot.get(s)!, 0) / sources.length
        : index;
      return { id, mean, index };
    });
    keyed.sort((a, b) => a.mean - b.mean || a.index - b.index);
    layers[i] = keyed.map((k) => k.id);
    layers[i]!.forEach((id, index) => slot.set(id, index));
  }
  return layers;
}

/** Compute pixel boxes for every node plus the overall canvas size. */
export function layoutGraph(model: GraphModel): Layout {
  const labels = new Map(model.nodes.map((n) => [n.id, n.label]));
  const layers = orderWithinLayers(model, layerNodes(model));

  const boxes = new Map<string, NodeBox>();
  let x = MARGIN;
  let height = 0;
  for (const ids of layers) {
    const widest = Math.max(0, ...ids.map((id) => nodeWidth(labels.get(id)!)));
    let y = MARGIN;
    for (const id of ids) {
      boxes.set(id, {
        id,
        x,
        y,
        width: nodeWidth(labels.get(id)!),
        height: NODE_HEIGHT,
      });
      y += NODE_HEIGHT + V_GAP;
    }
    height = Math.max(height, y - V_GAP + MARGIN);
    x += widest + H_GAP;
  }
  return {
    boxes,
    width: Math.max(x - H_GAP + MARGIN, MARGIN * 2),
    height: Math.max(height, MARGIN * 2),
  };
}
