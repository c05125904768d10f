// Source pane: numbered lines with the navigation target highlighted.

import type { SourceView } from '../viewstate.js';

export function renderSource(view: SourceView | null): HTMLElement {
  const pane = document.createElement('div');
  pane.className = 'source-pane';
  if (!view) {
    const hint = document.createElement('p');
    hint.className = 'source-hint';
    hint.textContent = 'Click a navigation item to view source here.';
    pane.appendChild(hint);
    return pane;
  }

  const header = document.createElement('div');
  header.className = 'source-file';
  header.textContent = `${view.file}:${view.highlight}`;
  pane.appendChild(header);

  const code = document.createElement('pre');
  code.className = 'source-code';
  pane.appendChild(code);

  view.lines.forEach((text, index) => {
    const lineNo = view.from + index;
    const row = document.createElement('div');
    row.className = lineNo === view.highlight ? 'source-line highlight' : 'source-line';
    row.dataset.line = String(lineNo);

    const gutter = document.createElement('span');
    gutter.className = 'line-no';
    gutter.textContent = String(lineNo).padStart(4, ' ');
    row.appendChild(gutter);

    const body = document.createElement('span');
    body.className = 'line-text';
    body.textContent = text;
    row.appendChild(body);

    code.appendChild(row);
  });
  return pane;
}
