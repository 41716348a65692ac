import init, { align, restaurant_demo, compare_literals, functionality } from "./pkg/ontalign_wasm.js";

const FIRST = `alice\tname\t"Alice Smith"
alice\temail\t"alice@example.org"
alice\tlivesIn\tparis
bob\tname\t"Bob Jones"
bob\temail\t"bob@example.org"
bob\tlivesIn\tlyon
paris\tlabel\t"Paris"
lyon\tlabel\t"Lyon"`;

const SECOND = `p1\tfullName\t"Alice Smith"
p1\tmbox\t"alice@example.org"
p1\tresidence\tc1
p2\tfullName\t"Bob Jones"
p2\tmbox\t"bob@example.org"
p2\tresidence\tc2
c1\ttitle\t"Paris"
c2\ttitle\t"Lyon"`;

const pct = (v) => (v === null ? "undefined" : (100 * v).toFixed(2) + "%");
const num = (v) => Number(v.toFixed(4));

function table(headers, rows, limit = 50) {
  const t = document.createElement("table");
  const head = t.insertRow();
  for (const h of headers) {
    const th = document.createElement("th");
    th.textContent = h;
    head.appendChild(th);
  }
  for (const row of rows.slice(0, limit)) {
    const tr = t.insertRow();
    for (const cell of row) tr.insertCell().textContent = cell;
  }
  return t;
}

function para(text, cls) {
  const p = document.createElement("p");
  p.textContent = text;
  if (cls) p.className = cls;
  return p;
}

function show(target, nodes) {
  target.replaceChildren(...nodes);
}

function run(target, f) {
  try {
    f();
  } catch (e) {
    show(target, [para(String(e.message ?? e), "error")]);
  }
}

function alignmentNodes(a) {
  const steps = a.iterations.map((i) => `${i.iteration}: ${pct(i.changed_fraction)} changed`).join(", ");
  return [
    para(`${a.converged ? "Converged" : "Stopped"} after ${a.iterations.length} iterations (${steps}).`),
    table(["first", "second", "score"], a.matches.map((m) => [m.first, m.second, num(m.score)])),
    table(["relation", "", "relation", "score"], a.relations.map((r) => [r.first, r.direction, r.second, num(r.score)])),
    table(["class", "", "class", "score"], a.classes.map((c) => [c.first, c.direction, c.second, num(c.score)])),
  ];
}

await init();

const restaurants = document.getElementById("restaurants");
restaurants.addEventListener("submit", (ev) => {
  ev.preventDefault();
  const f = restaurants.elements;
  const out = document.getElementById("restaurants-out");
  run(out, () => {
    const r = JSON.parse(
      restaurant_demo(+f.noisy.value, +f.fully.value, +f.seed.value, +f.theta.value, f.sim.value, f.negative.checked),
    );
    const m = r.metrics;
    show(out, [
      para(`Precision ${pct(m.precision)}, recall ${pct(m.recall)}, F ${pct(m.f_measure)} (${m.true_positives} of ${m.gold} gold pairs, ${m.predicted} predicted)`, "metrics"),
      para(`${r.wrong.length} wrong matches.`),
      table(["wrong first", "wrong second", "score"], r.wrong.map((w) => [w.first, w.second, num(w.score)])),
      ...alignmentNodes(r.alignment),
    ]);
  });
});

const custom = document.getElementById("custom");
custom.elements.first.value = FIRST;
custom.elements.second.value = SECOND;
custom.addEventListener("submit", (ev) => {
  ev.preventDefault();
  const f = custom.elements;
  const out = document.getElementById("custom-out");
  run(out, () => {
    const a = JSON.parse(align(f.first.value, f.second.value, f.format.value, +f.theta.value, f.sim.value, false));
    show(out, alignmentNodes(a));
  });
});
document.getElementById("fun").addEventListener("click", () => {
  const f = custom.elements;
  const out = document.getElementById("custom-out");
  run(out, () => {
    const rows = JSON.parse(functionality(f.first.value, f.format.value, "harmonic"));
    show(out, [table(["relation", "fun", "inverse fun", "statements"], rows.map((r) => [r.relation, num(r.fun), num(r.inverse_fun), r.statements]))]);
  });
});

const literals = document.getElementById("literals");
literals.addEventListener("submit", (ev) => {
  ev.preventDefault();
  const f = literals.elements;
  const out = document.getElementById("literals-out");
  run(out, () => {
    const s = JSON.parse(compare_literals(f.a.value, f.b.value, +f.cutoff.value));
    show(out, [table(["exact", "normalized", "edit"], [[s.exact, s.normalized, num(s.edit)]])]);
  });
});
