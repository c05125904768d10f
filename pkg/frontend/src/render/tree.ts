// Tree panel renderer: one nested list, one button per model action.

import type { Action, TreeItem, TreeModel } from '../models.js';

export type Dispatch = (action: Action) => void;

function renderItem(item: TreeItem, dispatch: Dispatch): HTMLLIElement {
  const li = document.createElement('li');
  li.className = 'tree-item';

  const row = document.createElement('div');
  row.className = 'tree-row';
  li.appendChild(row);

  if (item.action) {
    const button = document.createElement('button');
    button.type = 'button';
    button.className = `tree-action act-${item.action.kind}`;
    button.dataset.actionId = item.action.id;
    button.textContent =
      item.action.kind === 'expand' ? `${item.label} ▸` : item.label;
    if (item.action.kind === 'navigate') {
      button.title = `${item.action.file}:${item.action.line}`;
    }
    const action = item.action;
    button.addEventListener('click', () => dispatch(action));
    row.appendChild(button);
  } else {
    const span = document.createElement('span');
    span.className = 'tree-label';
    span.textContent = item.label;
    row.appendChild(span);
  }
  if (item.elementId) li.dataset.elementId = item.elementId;

  if (item.children.length > 0) {
    const ul = document.createElement('ul');
    ul.className = 'tree-children';
    for (const child of item.children) ul.appendChild(renderItem(child, dispatch));
    li.appendChild(ul);
  }
  return li;
}

export function renderTree(model: TreeModel, dispatch: Dispatch): HTMLElement {
  const root = document.createElement('ul');
  root.className = 'tree-root';
  for (const item of model.items) root.appendChild(renderItem(item, dispatch));
  return root;
}
