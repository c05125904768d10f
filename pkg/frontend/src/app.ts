// Application shell: wires the API client, the view state, and the
// panel renderers together. Rendering is server-authoritative: a panel
// shows exactly the last model the service returned for its tool.

import { ApiError, Client } from './api.js';
import type { ToolScript } from './api.js';
import type { Action, ToolModel, TreeItem } from './models.js';
import { isGraphModel, isTreeModel } from './models.js';
import { renderGraph } from './render/graph.js';
import { renderSource } from './render/source.js';
import { renderTree } from './render/tree.js';
import { createReachForm } from './reachform.js';
import type { ReachForm } from './reachform.js';
import {
  addPanel,
  emptyState,
  panelById,
  removePanel,
  updatePanel,
  withSource,
} from './viewstate.js';
import type { Panel, ViewState } from './viewstate.js';

const SOURCE_CONTEXT_BEFORE = 3;
const SOURCE_CONTEXT_AFTER = 8;

function findItemByActionId(items: TreeItem[], id: string): TreeItem | null {
  for (const item of items) {
    if (item.action?.id === id) return item;
    const nested = findItemByActionId(item.children, id);
    if (nested) return nested;
  }
  return null;
}

/** Status reported by a reachability result model, if this is one. */
function reachStatus(model: ToolModel): string | null {
  if (!isTreeModel(model)) return null;
  const first = model.items[0];
  if (!first || !first.label.startsWith('status: ')) return null;
  return first.label.slice('status: '.length);
}

export class App {
  private state: ViewState = emptyState();
  readonly client: Client;

  private readonly panelsBox: HTMLElement;
  private readonly sourceBox: HTMLElement;
  private readonly statusBox: HTMLElement;
  private readonly creatorError: HTMLElement;
  private readonly reachForm: ReachForm;
  private readonly cgEntry: HTMLInputElement;
  private readonly cgParam: HTMLInputElement;
  private readonly cgCollapsed: HTMLInputElement;
  private readonly projectInput: HTMLInputElement;
  private readonly toolButtons: HTMLButtonElement[] = [];

  constructor(root: HTMLElement, serverBase: string) {
    this.client = new Client(serverBase.replace(/\/$/, ''));
    root.innerHTML = '';
    root.className = 'app';

    // --- header: project selection
    const header = document.createElement('header');
    header.className = 'app-header';
    root.appendChild(header);

    const brand = document.createElement('span');
    brand.className = 'brand';
    brand.textContent = 'pcw';
    header.appendChild(brand);

    this.projectInput = document.createElement('input');
    this.projectInput.className = 'project-path';
    this.projectInput.placeholder = 'project directory on the server host';
    header.appendChild(this.projectInput);

    const open = document.createElement('button');
    open.type = 'button';
    open.className = 'project-open';
    open.textContent = 'Open project';
    open.addEventListener('click', () => {
      void this.openProject(this.projectInput.value.trim());
    });
    header.appendChild(open);

    this.statusBox = document.createElement('span');
    this.statusBox.className = 'status';
    header.appendChild(this.statusBox);

    // --- main: creators | panels | source
    const main = document.createElement('div');
    main.className = 'app-main';
    root.appendChild(main);

    const creators = document.createElement('aside');
    creators.className = 'creators';
    main.appendChild(creators);

    const mkButton = (label: string, onClick: () => void) => {
      const button = document.createElement('button');
      button.type = 'button';
      button.textContent = label;
      button.disabled = true;
      button.addEventListener('click', onClick);
      creators.appendChild(button);
      this.toolButtons.push(button);
      return button;
    };
    mkButton('Structure browser', () => {
      void this.createPanel('Structure', { tool: 'structureBrowser' });
    });
    mkButton('Endpoint catalog', () => {
      void this.createPanel('Endpoints', { tool: 'apiEndpointCatalog' });
    });

    const cgBox = document.createElement('div');
    cgBox.className = 'callgraph-form';
    creators.appendChild(cgBox);
    const cgTitle = document.createElement('h3');
    cgTitle.textContent = 'Call graph';
    cgBox.appendChild(cgTitle);
    this.cgEntry = document.createElement('input');
    this.cgEntry.className = 'cg-entry';
    this.cgEntry.placeholder = 'entry method';
    cgBox.appendChild(this.cgEntry);
    this.cgParam = document.createElement('input');
    this.cgParam.className = 'cg-param';
    this.cgParam.placeholder = 'emphasize param # (optional)';
    this.cgParam.inputMode = 'numeric';
    cgBox.appendChild(this.cgParam);
    const collapsedLabel = document.createElement('label');
    collapsedLabel.className = 'cg-collapsed-label';
    this.cgCollapsed = document.createElement('input');
    this.cgCollapsed.type = 'checkbox';
    this.cgCollapsed.className = 'cg-collapsed';
    collapsedLabel.appendChild(this.cgCollapsed);
    collapsedLabel.appendChild(document.createTextNode(' start collapsed'));
    cgBox.appendChild(collapsedLabel);
    const cgCreate = document.createElement('button');
    cgCreate.type = 'button';
    cgCreate.className = 'cg-create';
    cgCreate.textContent = 'Create call graph';
    cgCreate.disabled = true;
    cgCreate.addEventListener('click', () => {
      void this.createCallGraph();
    });
    cgBox.appendChild(cgCreate);
    this.toolButtons.push(cgCreate);

    this.creatorError = document.createElement('p');
    this.creatorError.className = 'creator-error';
    this.creatorError.hidden = true;
    creators.appendChild(this.creatorError);

    this.reachForm = createReachForm((script) => {
      void this.createPanel('Reachability', script);
    });
    creators.appendChild(this.reachForm.element);

    this.panelsBox = document.createElement('section');
    this.panelsBox.className = 'panels';
    main.appendChild(this.panelsBox);

    this.sourceBox = document.createElement('aside');
    this.sourceBox.className = 'source-box';
    main.appendChild(this.sourceBox);

    this.render();
  }

  // --- state plumbing

  private setState(next: ViewState): void {
    this.state = next;
    this.render();
  }

  getState(): ViewState {
    return this.state;
  }

  private setStatus(text: string, isError = false): void {
    this.statusBox.textContent = text;
    this.statusBox.classList.toggle('error', isError);
  }

  private creatorFail(message: string | null): void {
    this.creatorError.hidden = message === null;
    this.creatorError.textContent = message ?? '';
  }

  // --- project lifecycle

  async openProject(path: string): Promise<void> {
    if (!path) {
      this.setStatus('enter a project directory', true);
      return;
    }
    this.setStatus('opening…');
    try {
      const opened = await this.client.openProject(path);
      const roots = await this.client.roots(opened.projectId);
      const name = String(roots.elements[0]?.attrs.name ?? opened.projectId);
      this.setState({
        ...emptyState(),
        projectId: opened.projectId,
        projectName: name,
      });
      for (const button of this.toolButtons) button.disabled = false;
      this.setStatus(`project ${name} (${opened.projectId})`);
    } catch (err) {
      if (err instanceof ApiError && err.kind === 'ParseFailed') {
        const diags = Array.isArray(err.body.diagnostics)
          ? (err.body.diagnostics as { file: string; line: number; message: string }[])
          : [];
        const first = diags[0];
        this.setStatus(
          first
            ? `parse failed: ${first.file}:${first.line} ${first.message}`
            : 'parse failed',
          true,
        );
      } else {
        this.setStatus(err instanceof Error ? err.message : String(err), true);
      }
    }
  }

  // --- panel lifecycle

  async createPanel(title: string, script: ToolScript): Promise<void> {
    if (!this.state.projectId) {
      this.creatorFail('open a project first');
      return;
    }
    this.creatorFail(null);
    try {
      const created = await this.client.createTool(this.state.projectId, script);
      this.setState(
        addPanel(this.state, {
          title,
          toolId: created.toolId,
          toolKind: created.kind,
          script,
          model: created.model,
        }),
      );
    } catch (err) {
      this.creatorFail(err instanceof Error ? err.message : String(err));
    }
  }

  private async createCallGraph(): Promise<void> {
    const entry = this.cgEntry.value.trim();
    if (!entry) {
      this.creatorFail('call graph needs an entry method');
      return;
    }
    const script: ToolScript = { tool: 'callGraphExplorer', roots: [entry] };
    const paramText = this.cgParam.value.trim();
    if (paramText) {
      if (!/^\d+$/.test(paramText)) {
        this.creatorFail('emphasize param must be a non-negative integer');
        return;
      }
      script.emphasize = { entry, param: parseInt(paramText, 10) };
    }
    if (this.cgCollapsed.checked) script.preExpand = [];
    await this.createPanel('Call graph', script);
  }

  async dispatch(panelId: number, action: Action): Promise<void> {
    const panel = panelById(this.state, panelId);
    if (!panel || panel.pending) return;
    this.setState(updatePanel(this.state, panelId, { pending: true, error: null }));
    try {
      const result = await this.client.applyAction(panel.toolId, action.id);
      if ('navigate' in result) {
        await this.showSource(result.navigate.file, result.navigate.line);
        this.setState(updatePanel(this.state, panelId, { pending: false }));
      } else {
        this.setState(
          updatePanel(this.state, panelId, {
            toolId: result.toolId,
            model: result.model,
            pending: false,
          }),
        );
      }
    } catch (err) {
      if (err instanceof ApiError && err.stale) {
        this.setState(updatePanel(this.state, panelId, { pending: false, stale: true }));
      } else {
        this.setState(
          updatePanel(this.state, panelId, {
            pending: false,
            error: err instanceof Error ? err.message : String(err),
          }),
        );
      }
    }
  }

  /** Re-run a panel's originating script after its model went stale. */
  async refreshPanel(panelId: number): Promise<void> {
    const panel = panelById(this.state, panelId);
    if (!panel || !this.state.projectId) return;
    try {
      const created = await this.client.createTool(this.state.projectId, panel.script);
      this.setState(
        updatePanel(this.state, panelId, {
          toolId: created.toolId,
          model: created.model,
          stale: false,
          error: null,
        }),
      );
    } catch (err) {
      this.setState(
        updatePanel(this.state, panelId, {
          error: err instanceof Error ? err.message : String(err),
        }),
      );
    }
  }

  private async showSource(file: string, line: number): Promise<void> {
    if (!this.state.projectId) return;
    const from = Math.max(1, line - SOURCE_CONTEXT_BEFORE);
    const range = await this.client.source(
      this.state.projectId,
      file,
      from,
      line + SOURCE_CONTEXT_AFTER,
    );
    this.setState(
      withSource(this.state, {
        file: range.file,
        from: range.from,
        lines: range.lines,
        highlight: line,
      }),
    );
  }

  /** Remember a method selection and prefill the query forms. */
  selectMethod(qualifiedName: string): void {
    this.reachForm.setMethod(qualifiedName);
    if (!this.cgEntry.value.trim()) this.cgEntry.value = qualifiedName;
  }

  // --- rendering

  private render(): void {
    this.panelsBox.innerHTML = '';
    for (const panel of this.state.panels) {
      this.panelsBox.appendChild(this.renderPanel(panel));
    }
    this.sourceBox.innerHTML = '';
    this.sourceBox.appendChild(renderSource(this.state.source));
  }

  private renderPanel(panel: Panel): HTMLElement {
    const box = document.createElement('section');
    box.className = `panel kind-${panel.toolKind}${panel.pending ? ' pending' : ''}`;
    box.dataset.panelId = String(panel.id);
    box.dataset.toolId = panel.toolId;

    const bar = document.createElement('header');
    bar.className = 'panel-bar';
    box.appendChild(bar);

    const title = document.createElement('span');
    title.className = 'panel-title';
    title.textContent = panel.title;
    bar.appendChild(title);

    const tool = document.createElement('span');
    tool.className = 'panel-tool';
    tool.textContent = panel.toolId;
    bar.appendChild(tool);

    const close = document.createElement('button');
    close.type = 'button';
    close.className = 'panel-close';
    close.textContent = 'x';
    close.title = 'close panel';
    close.addEventListener('click', () => {
      this.setState(removePanel(this.state, panel.id));
    });
    bar.appendChild(close);

    if (panel.stale) {
      const banner = document.createElement('div');
      banner.className = 'stale-banner';
      const note = document.createElement('span');
      note.textContent = 'The model changed on the server; this view is stale.';
      banner.appendChild(note);
      const refresh = document.createElement('button');
      refresh.type = 'button';
      refresh.className = 'panel-refresh';
      refresh.textContent = 'Refresh';
      refresh.addEventListener('click', () => {
        void this.refreshPanel(panel.id);
      });
      banner.appendChild(refresh);
      box.appendChild(banner);
    }

    if (panel.error) {
      const error = document.createElement('p');
      error.className = 'panel-error';
      error.textContent = panel.error;
      box.appendChild(error);
    }

    const status = reachStatus(panel.model);
    if (status !== null) {
      const banner = document.createElement('div');
      banner.className = `reach-status status-${status}`;
      banner.textContent =
        status === 'ProvenUnreachable' ? 'Proven unreachable' : status;
      box.appendChild(banner);
    }

    box.appendChild(this.renderModel(panel));
    return box;
  }

  private renderModel(panel: Panel): HTMLElement {
    const model: ToolModel = panel.model;
    const dispatch = (action: Action) => {
      if (isTreeModel(model)) {
        const item = findItemByActionId(model.items, action.id);
        if (item?.elementId && item.elementId.split('.').length >= 3) {
          this.selectMethod(item.elementId);
        }
      }
      void this.dispatch(panel.id, action);
    };
    if (isGraphModel(model)) {
      return renderGraph(model, dispatch, (nodeId) => this.selectMethod(nodeId));
    }
    return renderTree(model, dispatch);
  }
}
