// Reachability query form. Rows of (symbol, operator, value) compile to
// the reachabilityInspector tool script; the same script is mirrored in
// an editable text area so a query can be tweaked and re-run directly.

import { compileRow, OPERATORS, validateRow, validateScriptText } from './constraints.js';
import type { ConstraintRow } from './constraints.js';
import type { ToolScript } from './api.js';

export interface ReachForm {
  element: HTMLElement;
  /** Prefill the method field (called when a method is selected elsewhere). */
  setMethod(qualifiedName: string): void;
}

type Submit = (script: ToolScript) => void;

function rowEditor(onRemove: () => void): {
  element: HTMLElement;
  read(): ConstraintRow;
} {
  const wrap = document.createElement('div');
  wrap.className = 'constraint-row';

  const symbol = document.createElement('input');
  symbol.placeholder = 'name or len(name)';
  symbol.className = 'row-symbol';
  wrap.appendChild(symbol);

  const op = document.createElement('select');
  op.className = 'row-op';
  for (const o of OPERATORS) {
    const option = document.createElement('option');
    option.value = o;
    option.textContent = o;
    op.appendChild(option);
  }
  wrap.appendChild(op);

  const value = document.createElement('input');
  value.placeholder = 'value';
  value.className = 'row-value';
  wrap.appendChild(value);

  const remove = document.createElement('button');
  remove.type = 'button';
  remove.className = 'row-remove';
  remove.textContent = 'x';
  remove.title = 'remove constraint';
  remove.addEventListener('click', onRemove);
  wrap.appendChild(remove);

  return {
    element: wrap,
    read: () => ({ symbol: symbol.value, op: op.value, value: value.value }),
  };
}

export function createReachForm(onSubmit: Submit): ReachForm {
  const form = document.createElement('form');
  form.className = 'reach-form';
  form.noValidate = true;

  const title = document.createElement('h3');
  title.textContent = 'Reachability query';
  form.appendChild(title);

  const method = document.createElement('input');
  method.className = 'reach-method';
  method.placeholder = 'entry method (Namespace.Class.Method)';
  form.appendChild(labelled('Method', method));

  const target = document.createElement('input');
  target.className = 'reach-target';
  target.placeholder = 'call:Ns.Cls.Method or stmt:s1';
  form.appendChild(labelled('Target', target));

  const rowsBox = document.createElement('div');
  rowsBox.className = 'constraint-rows';
  form.appendChild(labelled('Constraints', rowsBox));

  const editors: { element: HTMLElement; read(): ConstraintRow }[] = [];
  const addRow = () => {
    const editor = rowEditor(() => {
      const at = editors.indexOf(editor);
      if (at >= 0) editors.splice(at, 1);
      editor.element.remove();
    });
    editors.push(editor);
    rowsBox.appendChild(editor.element);
  };

  const add = document.createElement('button');
  add.type = 'button';
  add.className = 'row-add';
  add.textContent = '+ constraint';
  add.addEventListener('click', addRow);
  form.appendChild(add);

  const retRow = document.createElement('input');
  retRow.className = 'reach-return';
  retRow.placeholder = 'optional, e.g. ret == true';
  form.appendChild(labelled('Return constraint', retRow));

  const errorBox = document.createElement('p');
  errorBox.className = 'form-error';
  errorBox.hidden = true;
  form.appendChild(errorBox);

  const run = document.createElement('button');
  run.type = 'submit';
  run.className = 'reach-run';
  run.textContent = 'Run query';
  form.appendChild(run);

  // script-editing loop: the compiled script is shown and can be edited
  // and run as-is
  const scriptArea = document.createElement('textarea');
  scriptArea.className = 'script-area';
  scriptArea.rows = 6;
  scriptArea.spellcheck = false;
  form.appendChild(labelled('Script', scriptArea));

  const runScript = document.createElement('button');
  runScript.type = 'button';
  runScript.className = 'script-run';
  runScript.textContent = 'Run script as written';
  form.appendChild(runScript);

  const fail = (message: string) => {
    errorBox.textContent = message;
    errorBox.hidden = false;
  };

  const buildScript = (): ToolScript | null => {
    errorBox.hidden = true;
    if (!method.value.trim() || !target.value.trim()) {
      fail('method and target are required');
      return null;
    }
    const constraints: string[] = [];
    for (const editor of editors) {
      const row = editor.read();
      const problem = validateRow(row);
      if (problem) {
        fail(problem);
        return null;
      }
      constraints.push(compileRow(row));
    }
    const script: ToolScript = {
      tool: 'reachabilityInspector',
      method: method.value.trim(),
      target: target.value.trim(),
    };
    if (constraints.length > 0) script.constraints = constraints;
    const ret = retRow.value.trim();
    if (ret) {
      if (!/^len\(\s*ret\s*\)|^ret\b/.test(ret)) {
        fail('return constraints refer to "ret"');
        return null;
      }
      script.returnConstraint = ret;
    }
    return script;
  };

  form.addEventListener('submit', (event) => {
    event.preventDefault();
    const script = buildScript();
    if (!script) return;
    scriptArea.value = JSON.stringify(script, null, 2);
    onSubmit(script);
  });

  runScript.addEventListener('click', () => {
    errorBox.hidden = true;
    const text = scriptArea.value.trim();
    if (!text) {
      const script = buildScript();
      if (!script) return;
      scriptArea.value = JSON.stringify(script, null, 2);
      onSubmit(script);
      return;
    }
    const problem = validateScriptText(text);
    if (problem) {
      fail(problem);
      return;
    }
    onSubmit(JSON.parse(text) as ToolScript);
  });

  return {
    element: form,
    setMethod(qualifiedName: string) {
      method.value = qualifiedName;
      if (!target.value.trim()) target.value = 'call:';
    },
  };
}

function labelled(text: string, control: HTMLElement): HTMLElement {
  const label = document.createElement('label');
  label.className = 'form-field';
  const caption = document.createElement('span');
  caption.className = 'field-name';
  caption.textContent = text;
  label.appendChild(caption);
  label.appendChild(control);
  return label;
}
