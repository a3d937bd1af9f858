// Build the module first:
//   cargo build --release --target wasm32-unknown-unknown -p rareperm-demo
//   wasm-bindgen --target web --out-dir crates/demo/www/pkg \
//     target/wasm32-unknown-unknown/release/rareperm_demo.wasm
import init, { run_aisp, cb_coverage, compare_small } from "./pkg/rareperm_demo.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);
const big = (id) => BigInt($(id).value || "0");
const fmt = (x) => (x === 0 ? "0" : x.toExponential(3));

function fail(el, err) {
  el.className = "error";
  el.textContent = String(err);
}

function drawMarginals(canvas, steps) {
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (!steps.length) return;
  const n = steps[0].marginals.length;
  const left = 70;
  const w = (canvas.width - left) / n;
  const h = Math.min(40, canvas.height / steps.length);
  steps.forEach((s, row) => {
    s.marginals.forEach((p, i) => {
      const shade = Math.round(255 * (1 - p));
      ctx.fillStyle = `rgb(${shade}, ${shade}, 255)`;
      ctx.fillRect(left + i * w, row * h, w - 1, h - 1);
    });
    ctx.fillStyle = "#222";
    ctx.font = "12px system-ui";
    ctx.fillText(`γ ${s.gamma_k.toFixed(3)}`, 2, row * h + h / 2 + 4);
  });
}

function drawCoverage(canvas, exact, sampled) {
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const n = exact.length;
  const slot = canvas.width / n;
  const base = canvas.height - 20;
  ctx.font = "12px system-ui";
  exact.forEach((p, i) => {
    const x = i * slot;
    ctx.fillStyle = "#335";
    ctx.fillRect(x + slot * 0.15, base - p * (base - 10), slot * 0.3, p * (base - 10));
    ctx.fillStyle = "#9ad";
    ctx.fillRect(x + slot * 0.5, base - sampled[i] * (base - 10), slot * 0.3, sampled[i] * (base - 10));
    ctx.fillStyle = "#222";
    ctx.fillText(String(i + 1), x + slot * 0.45, canvas.height - 5);
  });
}

function runAisp() {
  const out = $("aisp-out");
  out.className = "";
  try {
    const r = JSON.parse(run_aisp($("aisp-values").value, num("aisp-k"), big("aisp-seed"),
      num("aisp-n"), num("aisp-m"), num("aisp-rho")));
    out.textContent = `${r.method}: p ≈ ${fmt(r.p_hat)} ± ${fmt(r.se)} from ${r.samples} draws, ` +
      `${r.steps.length} iteration(s)` + (r.reached ? "" : " (threshold not reached; estimate unreliable)");
    drawMarginals($("aisp-canvas"), r.steps);
  } catch (e) {
    fail(out, e);
  }
}

function runCoverage() {
  const out = $("cb-out");
  try {
    const r = JSON.parse(cb_coverage($("cb-w").value, num("cb-k"), num("cb-draws"), big("cb-seed")));
    const worst = Math.max(...r.exact.map((p, i) => Math.abs(p - r.sampled[i])));
    out.className = "note";
    out.textContent = `Dark: exact. Light: ${r.draws} draws. Largest gap ${worst.toFixed(4)}.`;
    drawCoverage($("cb-canvas"), r.exact, r.sampled);
  } catch (e) {
    fail(out, e);
  }
}

function runCompare() {
  const out = $("cmp-out");
  try {
    const rows = JSON.parse(compare_small($("cmp-values").value, num("cmp-k"), big("cmp-seed")));
    out.className = "";
    out.innerHTML = "<table><tr><th>method</th><th>p</th><th>se</th><th>draws</th></tr>" +
      rows.map((r) => `<tr><td>${r.method}</td><td>${fmt(r.p)}</td><td>${fmt(r.se)}</td><td>${r.samples}</td></tr>`).join("") +
      "</table>";
  } catch (e) {
    fail(out, e);
  }
}

await init();
$("aisp-go").addEventListener("click", runAisp);
$("cb-go").addEventListener("click", runCoverage);
$("cmp-go").addEventListener("click", runCompare);
runCoverage();
