// Wire types for the tool models served by the pcw HTTP API. The client
// never derives analysis results of its own: panels render these objects
// exactly as received, so the shapes here mirror the server JSON 1:1.

export interface NavigateAction {
  id: string;
  kind: 'navigate';
  file: string;
  line: number;
}

export interface ExpandAction {
  id: string;
  kind: 'expand';
  node: string;
}

export interface RunQueryAction {
  id: string;
  kind: 'runQuery';
  query: string;
}

export type Action = NavigateAction | ExpandAction | RunQueryAction;

export interface TreeItem {
  label: string;
  elementId?: string;
  action?: Action;
  children: TreeItem[];
}

export interface TreeModel {
  kind: 'tree';
  items: TreeItem[];
}

export interface GraphNode {
  id: string;
  label: string;
  emphasized: boolean;
  expandable: boolean;
}

export interface GraphEdge {
  source: string;
  target: string;
  kind: string;
}

export interface GraphModel {
  kind: 'graph';
  nodes: GraphNode[];
  edges: GraphEdge[];
  pendingActions: Record<string, Action>;
}

export type ToolModel = TreeModel | GraphModel;

export function isTreeModel(model: ToolModel): model is TreeModel {
  return model.kind === 'tree';
}

export function isGraphModel(model: ToolModel): model is GraphModel {
  return model.kind === 'graph';
}

/** All action ids currently offered by a model, in render order. */
export function actionIds(model: ToolModel): string[] {
  const ids: string[] = [];
  if (isTreeModel(model)) {
    const walk = (items: TreeItem[]) => {
      for (const item of items) {
        if (item.action) ids.push(item.action.id);
        walk(item.children);
      }
    };
    walk(model.items);
  } else {
    for (const node of model.nodes) {
      const action = model.pendingActions[node.id];
      if (action) ids.push(action.id);
    }
  }
  return ids;
}
