// Graph panel renderer: SVG boxes and edges from the layered layout.
// Emphasized nodes get the `emphasized` class, bound 1:1 to the model
// flag; expandable nodes carry a [+] button wired to the pending action.

import type { Action, GraphModel } from '../models.js';
import { layoutGraph, NODE_HEIGHT } from '../layout.js';

export type Dispatch = (action: Action) => void;
export type SelectNode = (nodeId: string) => void;

const SVG_NS = 'http://www.w3.org/2000/svg';

function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string>,
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) el.setAttribute(key, value);
  return el;
}

function edgePath(
  from: { x: number; y: number; width: number; height: number },
  to: { x: number; y: number; width: number; height: number },
): string {
  if (from === to) {
    // recursion: a small loop over the node's top-right corner
    const x = from.x + from.width;
    const y = from.y + 6;
    return `M ${x - 14} ${from.y} C ${x + 18} ${from.y - 26}, ${x + 26} ${y + 8}, ${x} ${y}`;
  }
  const x1 = from.x + from.width;
  const y1 = from.y + from.height / 2;
  const x2 = to.x;
  const y2 = to.y + to.height / 2;
  const mid = (x1 + x2) / 2;
  return `M ${x1} ${y1} C ${mid} ${y1}, ${mid} ${y2}, ${x2} ${y2}`;
}

export function renderGraph(
  model: GraphModel,
  dispatch: Dispatch,
  selectNode?: SelectNode,
): HTMLElement {
  const wrapper = document.createElement('div');
  wrapper.className = 'graph-panel';

  const layout = layoutGraph(model);
  const svg = svgEl('svg', {
    width: String(layout.width),
    height: String(layout.height),
    viewBox: `0 0 ${layout.width} ${layout.height}`,
    class: 'graph-svg',
  });
  wrapper.appendChild(svg);

  const marker = svgEl('marker', {
    id: 'arrow',
    viewBox: '0 0 10 10',
    refX: '9',
    refY: '5',
    markerWidth: '7',
    markerHeight: '7',
    orient: 'auto-start-reverse',
  });
  marker.appendChild(svgEl('path', { d: 'M 0 0 L 10 5 L 0 10 z', class: 'edge-head' }));
  const defs = svgEl('defs', {});
  defs.appendChild(marker);
  svg.appendChild(defs);

  for (const edge of model.edges) {
    const from = layout.boxes.get(edge.source);
    const to = layout.boxes.get(edge.target);
    if (!from || !to) continue;
    svg.appendChild(
      svgEl('path', {
        d: edgePath(from, to),
        class: `graph-edge edge-${edge.kind}`,
        fill: 'none',
        'marker-end': 'url(#arrow)',
        'data-source': edge.source,
        'data-target': edge.target,
      }),
    );
  }

  for (const node of model.nodes) {
    const box = layout.boxes.get(node.id)!;
    const group = svgEl('g', {
      class: `graph-node${node.emphasized ? ' emphasized' : ''}${
        node.expandable ? ' expandable' : ''
      }`,
      'data-node-id': node.id,
      transform: `translate(${box.x}, ${box.y})`,
    });
    svg.appendChild(group);

    const rect = svgEl('rect', {
      width: String(box.width),
      height: String(NODE_HEIGHT),
      rx: '6',
      class: 'node-box',
    });
    group.appendChild(rect);

    const title = svgEl('title', {});
    title.textContent = node.id;
    group.appendChild(title);

    const text = svgEl('text', {
      x: String(box.width / 2),
      y: String(NODE_HEIGHT / 2 + 4),
      'text-anchor': 'middle',
      class: 'node-label',
    });
    text.textContent = node.label;
    group.appendChild(text);

    if (selectNode) {
      rect.addEventListener('click', () => selectNode(node.id));
      text.addEventListener('click', () => selectNode(node.id));
    }

    const pending = model.pendingActions[node.id];
    if (node.expandable && pending) {
      const plus = svgEl('g', {
        class: 'expand-button',
        'data-action-id': pending.id,
        transform: `translate(${box.width - 1}, 1)`,
      });
      plus.appendChild(svgEl('circle', { r: '9', class: 'expand-circle' }));
      const label = svgEl('text', {
        'text-anchor': 'middle',
        y: '4',
        class: 'expand-plus',
      });
      label.textContent = '+';
      plus.appendChild(label);
      plus.addEventListener('click', (event) => {
        event.stopPropagation();
        dispatch(pending);
      });
      group.appendChild(plus);
    }
  }
  return wrapper;
}
