#!/usr/bin/env node
// Stdio SMT-LIB v2 runner backed by the Z3 WebAssembly build.
//
// Reads SMT-LIB commands from stdin, evaluates each complete top-level form
// as it arrives, and writes solver output to stdout immediately. State
// persists across forms until a (reset); EOF exits. This mirrors how a
// native SMT solver behaves with `-in`, so drivers written against this
// process also work against a real solver binary.

const { init } = require('z3-solver');

function* completeForms(buf) {
  // Yields [form, rest] slices of buf that contain balanced parens.
  let depth = 0;
  let start = 0;
  let inComment = false;
  for (let i = 0; i < buf.length; i++) {
    const ch = buf[i];
    if (inComment) {
      if (ch === '\n') inComment = false;
      continue;
    }
    if (ch === ';') {
      inComment = true;
      continue;
    }
    if (ch === '(') depth += 1;
    else if (ch === ')') {
      depth -= 1;
      if (depth === 0) {
        yield buf.slice(start, i + 1);
        start = i + 1;
      }
      if (depth < 0) {
        yield buf.slice(start, i + 1);  // let Z3 report the syntax error
        depth = 0;
        start = i + 1;
      }
    }
  }
  return;
}

async function main() {
  const { Z3 } = await init();
  const cfg = Z3.mk_config();
  const ctx = Z3.mk_context(cfg);

  let pending = '';
  process.stdin.setEncoding('utf8');

  const evalForm = async (form) => {
    if (!form.trim()) return;
    let out;
    try {
      out = await Z3.eval_smtlib2_string(ctx, form);
    } catch (err) {
      out = `(error "runner: ${String(err).replace(/"/g, "'")}")\n`;
    }
    if (out && out.length) process.stdout.write(out);
  };

  for await (const chunk of process.stdin) {
    pending += chunk;
    let consumed = 0;
    for (const form of completeForms(pending)) {
      await evalForm(form);
      consumed += form.length;
    }
    pending = pending.slice(consumed);
  }
  await evalForm(pending);
  process.exit(0);
}

main().catch((err) => {
  process.stderr.write(`runner failed: ${err}\n`);
  process.exit(3);
});
