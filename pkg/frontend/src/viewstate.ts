// Client view state. Panels hold the last server model verbatim, the
// originating script (for refresh and the script-editing loop), and the
// per-panel in-flight flag; updates are pure so renders stay a function
// of state.

import type { ToolModel } from './models.js';
import type { ToolScript } from './api.js';

export interface SourceView {
  file: string;
  from: number;
  lines: string[];
  highlight: number;
}

export interface Panel {
  id: number;
  title: string;
  toolId: string;
  toolKind: string;
  script: ToolScript;
  model: ToolModel;
  pending: boolean;
  stale: boolean;
  error: string | null;
}

export interface ViewState {
  projectId: string | null;
  projectName: string | null;
  panels: Panel[];
  source: SourceView | null;
  nextPanelId: number;
}

export function emptyState(): ViewState {
  return {
    projectId: null,
    projectName: null,
    panels: [],
    source: null,
    nextPanelId: 1,
  };
}

export function addPanel(
  state: ViewState,
  panel: Omit<Panel, 'id' | 'pending' | 'stale' | 'error'>,
): ViewState {
  const complete: Panel = {
    ...panel,
    id: state.nextPanelId,
    pending: false,
    stale: false,
    error: null,
  };
  return {
    ...state,
    panels: [...state.panels, complete],
    nextPanelId: state.nextPanelId + 1,
  };
}

export function updatePanel(
  state: ViewState,
  id: number,
  patch: Partial<Omit<Panel, 'id'>>,
): ViewState {
  return {
    ...state,
    panels: state.panels.map((p) => (p.id === id ? { ...p, ...patch } : p)),
  };
}

export function removePanel(state: ViewState, id: number): ViewState {
  return { ...state, panels: state.panels.filter((p) => p.id !== id) };
}

export function panelById(state: ViewState, id: number): Panel | undefined {
  return state.panels.find((p) => p.id === id);
}

export function withSource(state: ViewState, source: SourceView | null): ViewState {
  return { ...state, source };
}
