// Client-side validation and assembly of the constraint mini-syntax.
// The server is the authority; this mirrors its grammar closely enough
// to catch typos before a round trip:
//
//   name ~ "regex"     name !~ "regex"
//   name == "literal"  name != "literal"
//   len(name) <= 64    (any of < <= > >= == != with a non-negative int)
//   x > 5              flag == true
//
// In a return constraint the left-hand atom must be `ret`.

export interface ConstraintRow {
  symbol: string;
  op: string;
  value: string;
}

export const OPERATORS = ['==', '!=', '<', '<=', '>', '>=', '~', '!~'] as const;

const ATOM = /^(?:len\(\s*([A-Za-z_]\w*)\s*\)|([A-Za-z_]\w*))$/;
const INT = /^-?\d+$/;

function isQuoted(value: string): boolean {
  return value.length >= 2 && value.startsWith('"') && value.endsWith('"');
}

/**
 * Check one row; returns an error message or null. `returnContext`
 * additionally requires the atom to be `ret`.
 */
export function validateRow(
  row: ConstraintRow,
  returnContext = false,
): string | null {
  const symbol = row.symbol.trim();
  const value = row.value.trim();
  const match = ATOM.exec(symbol);
  if (!match) {
    return symbol === ''
      ? 'symbol is required'
      : `bad symbol ${JSON.stringify(symbol)} (use a name or len(name))`;
  }
  const [, lenName, plainName] = match;
  const atom = lenName ?? plainName!;
  if (returnContext && atom !== 'ret') {
    return 'return constraints refer to "ret"';
  }
  if (!(OPERATORS as readonly string[]).includes(row.op)) {
    return `unknown operator ${JSON.stringify(row.op)}`;
  }
  if (value === '') return 'value is required';

  if (row.op === '~' || row.op === '!~') {
    if (lenName !== undefined) return 'len(...) cannot be matched against a regex';
    return null; // any text is a regex candidate; the server parses it
  }
  if (lenName !== undefined) {
    if (!INT.test(value)) return 'len(...) compares against an integer';
    if (parseInt(value, 10) < 0) return 'length bound must be non-negative';
    return null;
  }
  if (value === 'true' || value === 'false') {
    return row.op === '==' || row.op === '!='
      ? null
      : 'booleans support == and != only';
  }
  if (INT.test(value)) return null;
  // anything else is treated as a string literal
  return row.op === '==' || row.op === '!=' || isQuoted(value)
    ? null
    : 'strings support ==, !=, ~, !~ only';
}

/** Quote a value as a JSON string literal unless it already is one. */
function quote(value: string): string {
  return isQuoted(value) ? value : JSON.stringify(value);
}

/** Render a validated row as mini-syntax text for the tool script. */
export function compileRow(row: ConstraintRow): string {
  const symbol = row.symbol.trim();
  const value = row.value.trim();
  if (row.op === '~' || row.op === '!~') {
    return `${symbol} ${row.op} ${quote(value)}`;
  }
  if (symbol.startsWith('len(') || INT.test(value) || value === 'true' || value === 'false') {
    return `${symbol} ${row.op} ${value}`;
  }
  return `${symbol} ${row.op} ${quote(value)}`;
}

/** Validate a raw script document typed into the script editor. */
export function validateScriptText(text: string): string | null {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch (err) {
    return `not valid JSON: ${(err as Error).message}`;
  }
  if (typeof doc !== 'object' || doc === null || Array.isArray(doc)) {
    return 'a script is a JSON object';
  }
  if (typeof (doc as Record<string, unknown>).tool !== 'string') {
    return 'a script needs a "tool" name';
  }
  return null;
}
