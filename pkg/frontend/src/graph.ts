/** Program graph: parse a serialized logic_str and render it as nested
 * markup, function nodes styled distinctly from text nodes. */

export type ProgramNode =
  | { kind: "func"; name: string; children: ProgramNode[] }
  | { kind: "text"; text: string };

export class GraphParseError extends Error {
  constructor(message: string, readonly offset: number) {
    super(`${message} (at token offset ${offset})`);
    this.name = "GraphParseError";
  }
}

export function parseProgram(logicStr: string): ProgramNode {
  let toks = logicStr.split(/\s+/).filter((t) => t.length > 0);
  if (toks[toks.length - 2] === "=" && toks[toks.length - 1] === "true") {
    toks = toks.slice(0, -2);
  }
  let pos = 0;

  function expr(): ProgramNode {
    if (pos + 1 < toks.length && toks[pos + 1] === "{") {
      const name = toks[pos]!;
      if (name === "{" || name === "}" || name === ";") {
        throw new GraphParseError("function name expected", pos);
      }
      pos += 2;
      const children = [expr()];
      while (pos < toks.length && toks[pos] === ";") {
        pos += 1;
        children.push(expr());
      }
      if (toks[pos] !== "}") {
        throw new GraphParseError("unbalanced braces", pos);
      }
      pos += 1;
      return { kind: "func", name, children };
    }
    const atoms: string[] = [];
    while (pos < toks.length && toks[pos] !== ";" && toks[pos] !== "}") {
      if (toks[pos] === "{") throw new GraphParseError("unexpected '{'", pos);
      atoms.push(toks[pos]!);
      pos += 1;
    }
    return { kind: "text", text: atoms.join(" ") };
  }

  const root = expr();
  if (pos !== toks.length) {
    throw new GraphParseError("trailing tokens after program", pos);
  }
  if (root.kind !== "func") {
    throw new GraphParseError("a bare text node is not a program", 0);
  }
  return root;
}

export interface NodeCounts {
  total: number;
  func: number;
  text: number;
}

export function countNodes(node: ProgramNode): NodeCounts {
  if (node.kind === "text") return { total: 1, func: 0, text: 1 };
  const out = { total: 1, func: 1, text: 0 };
  for (const child of node.children) {
    const c = countNodes(child);
    out.total += c.total;
    out.func += c.func;
    out.text += c.text;
  }
  return out;
}

function escapeHtml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function renderNode(node: ProgramNode): string {
  if (node.kind === "text") {
    return `<li><span class="node text-node">${escapeHtml(node.text || "∅")}</span></li>`;
  }
  const children = node.children.map(renderNode).join("");
  return (
    `<li><span class="node func-node">${escapeHtml(node.name)}</span>` +
    `<ul>${children}</ul></li>`
  );
}

/** Render a program (or the empty-preview placeholder) to HTML.  The
 * count label next to the tree must agree with the service's node_stats
 * for the same program. */
export function renderGraph(logicStr: string | null): string {
  if (logicStr === null || logicStr.trim() === "") {
    return `<div class="program-graph empty">answer the questions to see the program</div>`;
  }
  const root = parseProgram(logicStr);
  const counts = countNodes(root);
  return (
    `<div class="program-graph">` +
    `<span class="node-counts">${counts.total} nodes ` +
    `(${counts.func} function, ${counts.text} text)</span>` +
    `<ul class="tree">${renderNode(root)}</ul></div>`
  );
}
