// Browser entry point. The backend address defaults to the page origin
// and can be overridden with ?server=http://host:port for development,
// where the static files and the analysis service run on different ports.

import { App } from './app.js';

function serverBase(): string {
  const params = new URLSearchParams(window.location.search);
  return params.get('server') ?? window.location.origin;
}

const root = document.getElementById('app');
if (!root) throw new Error('missing #app mount point');
const app = new App(root, serverBase());

const params = new URLSearchParams(window.location.search);
const project = params.get('project');
if (project) {
  const input = root.querySelector<HTMLInputElement>('.project-path');
  if (input) input.value = project;
  void app.openProject(project);
}
