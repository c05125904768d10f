// Thin typed client for the pcw service. Every method maps to one HTTP
// call; error bodies are surfaced as ApiError so the UI can render the
// server's own reason strings inline.

import type { Action, ToolModel } from './models.js';

export interface Diagnostic {
  file: string;
  line: number;
  message: string;
}

export interface OpenProjectResult {
  projectId: string;
  diagnostics: Diagnostic[];
}

export interface SliceElement {
  id: string;
  kind: string;
  attrs: Record<string, unknown>;
}

export interface SliceLink {
  id: string;
  kind: string;
  source: string;
  target: string;
  attrs: Record<string, unknown>;
}

export interface ChildrenResult {
  elements: SliceElement[];
  links: SliceLink[];
}

export interface SourceRange {
  file: string;
  from: number;
  to: number;
  lines: string[];
}

export interface ToolCreated {
  toolId: string;
  kind: string;
  model: ToolModel;
}

export type ActionResult =
  | { toolId: string; model: ToolModel }
  | { toolId: string; navigate: { file: string; line: number } };

/** A tool script as posted to /api/tools. */
export type ToolScript = { tool: string } & Record<string, unknown>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly kind: string,
    readonly reason: string,
    readonly body: Record<string, unknown>,
  ) {
    super(`${kind}: ${reason}`);
    this.name = 'ApiError';
  }

  get stale(): boolean {
    return this.status === 409;
  }
}

export class Client {
  constructor(readonly base: string) {}

  private async request(path: string, init?: RequestInit): Promise<unknown> {
    let response: Response;
    try {
      response = await fetch(this.base + path, init);
    } catch (err) {
      throw new ApiError(0, 'Unreachable', String(err), {});
    }
    if (response.ok) {
      return response.json();
    }
    let body: Record<string, unknown> = {};
    try {
      body = (await response.json()) as Record<string, unknown>;
    } catch {
      // non-JSON error body; keep the status alone
    }
    throw new ApiError(
      response.status,
      typeof body.error === 'string' ? body.error : `HTTP ${response.status}`,
      typeof body.reason === 'string' ? body.reason : '',
      body,
    );
  }

  private post(path: string, payload: unknown): Promise<unknown> {
    return this.request(path, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(payload),
    });
  }

  openProject(path: string): Promise<OpenProjectResult> {
    return this.post('/api/projects', { path }) as Promise<OpenProjectResult>;
  }

  roots(projectId: string): Promise<{ elements: SliceElement[] }> {
    return this.request(`/api/projects/${projectId}/slice/roots`) as Promise<{
      elements: SliceElement[];
    }>;
  }

  children(projectId: string, elementId: string): Promise<ChildrenResult> {
    const eid = encodeURIComponent(elementId);
    return this.request(
      `/api/projects/${projectId}/elements/${eid}/children`,
    ) as Promise<ChildrenResult>;
  }

  source(
    projectId: string,
    file: string,
    from: number,
    to: number,
  ): Promise<SourceRange> {
    const query = new URLSearchParams({
      file,
      from: String(from),
      to: String(to),
    });
    return this.request(
      `/api/projects/${projectId}/source?${query}`,
    ) as Promise<SourceRange>;
  }

  createTool(projectId: string, script: ToolScript): Promise<ToolCreated> {
    return this.post('/api/tools', { projectId, script }) as Promise<ToolCreated>;
  }

  applyAction(toolId: string, actionId: string): Promise<ActionResult> {
    return this.post(
      `/api/tools/${encodeURIComponent(toolId)}/actions`,
      { actionId },
    ) as Promise<ActionResult>;
  }

  exportModel(toolId: string, format: 'json' | 'dot'): Promise<unknown> {
    if (format === 'dot') {
      return fetch(
        `${this.base}/api/tools/${encodeURIComponent(toolId)}/export?format=dot`,
      ).then((r) => {
        if (!r.ok) throw new ApiError(r.status, `HTTP ${r.status}`, '', {});
        return r.text();
      });
    }
    return this.request(
      `/api/tools/${encodeURIComponent(toolId)}/export?format=json`,
    );
  }
}

export type { Action };
