import init, { classify_config, psi_curve, ruin_curve } from "./pkg/levy_ruin_wasm.js";

const PRESETS = {
  A: "premium = 1\nsigma2 = 1\njump_family = exponential_negative\njump_beta = 2\njump_alpha = 1\n",
  B: "premium = 2\nsigma2 = 0\njump_family = exponential_negative\njump_beta = 1\njump_alpha = 1\n",
  P: "premium = 2\nsigma2 = 1\njump_family = exponential_negative\njump_beta = 1\njump_alpha = 1\n",
  C: "premium = 3\nsigma2 = 0\njump_family = none\n",
  D: "# premium chosen so the mean drift is 1\npremium = 1.1484955067759220\nsigma2 = 0\n" +
     "jump_family = tempered_pareto_negative\ntp_scale = 1\ntp_alpha = 1\ntp_power = 3\ntp_cutoff = 1\n",
};

const $ = (id) => document.getElementById(id);

function parseCsv(text) {
  const [head, ...lines] = text.trim().split("\n");
  const keys = head.split(",");
  return lines.map((l) => {
    const cells = l.split(",");
    return Object.fromEntries(keys.map((k, i) => [k, isNaN(Number(cells[i])) ? cells[i] : Number(cells[i])]));
  });
}

// Minimal line/point plot: series = [{points: [[x, y]], color, dots, bars}]
function plot(canvas, series, { xLabel, yLabel, yMin, yMax }) {
  const ctx = canvas.getContext("2d");
  const W = canvas.width, H = canvas.height, pad = 48;
  ctx.clearRect(0, 0, W, H);
  const all = series.flatMap((s) => s.points).filter(([x, y]) => isFinite(x) && isFinite(y));
  if (all.length === 0) return;
  const x0 = Math.min(...all.map((p) => p[0])), x1 = Math.max(...all.map((p) => p[0]));
  const y0 = yMin ?? Math.min(...all.map((p) => p[1])), y1 = yMax ?? Math.max(...all.map((p) => p[1]));
  const sx = (x) => pad + ((x - x0) / (x1 - x0 || 1)) * (W - 2 * pad);
  const sy = (y) => H - pad - ((y - y0) / (y1 - y0 || 1)) * (H - 2 * pad);
  ctx.strokeStyle = "#999"; ctx.fillStyle = "#444"; ctx.font = "12px sans-serif";
  ctx.strokeRect(pad, pad, W - 2 * pad, H - 2 * pad);
  if (y0 < 0 && y1 > 0) {
    ctx.beginPath(); ctx.moveTo(pad, sy(0)); ctx.lineTo(W - pad, sy(0)); ctx.stroke();
  }
  ctx.fillText(xLabel, W / 2, H - 12);
  ctx.fillText(yLabel, 6, pad - 10);
  ctx.fillText(x0.toPrecision(3), pad, H - pad + 16);
  ctx.fillText(x1.toPrecision(3), W - pad - 30, H - pad + 16);
  ctx.fillText(y0.toPrecision(3), 4, H - pad);
  ctx.fillText(y1.toPrecision(3), 4, pad + 4);
  for (const s of series) {
    ctx.strokeStyle = ctx.fillStyle = s.color;
    const pts = s.points.filter(([x, y]) => isFinite(x) && isFinite(y));
    if (s.dots) {
      for (const [x, y, e] of pts) {
        ctx.beginPath(); ctx.arc(sx(x), sy(y), 3, 0, 2 * Math.PI); ctx.fill();
        if (e) { ctx.beginPath(); ctx.moveTo(sx(x), sy(y - e)); ctx.lineTo(sx(x), sy(y + e)); ctx.stroke(); }
      }
    } else {
      ctx.beginPath();
      pts.forEach(([x, y], i) => (i ? ctx.lineTo(sx(x), sy(y)) : ctx.moveTo(sx(x), sy(y))));
      ctx.stroke();
    }
  }
}

function guarded(fn) {
  return () => {
    $("status").textContent = "";
    $("status").className = "";
    try { fn(); } catch (e) { $("status").textContent = String(e.message ?? e); $("status").className = "error"; }
  };
}

function classifyModel() {
  $("report").textContent = classify_config($("model").value);
}

function plotPsi() {
  const rows = parseCsv(psi_curve($("model").value, Number($("n").value)));
  // the last rows can blow up near a finite critical exponent; clip the view
  const psis = rows.map((r) => r.psi).sort((a, b) => a - b);
  const yMax = Math.max(psis[Math.floor(0.9 * (psis.length - 1))], 0.1);
  const shown = rows.filter((r) => r.psi <= yMax * 1.5);
  plot($("psi"), [{ points: shown.map((r) => [r.gamma, r.psi]), color: "#1565c0" }],
       { xLabel: "γ", yLabel: "Ψ(γ)", yMax: yMax * 1.5 });
}

function simulate() {
  const t0 = performance.now();
  const csv = ruin_curve($("model").value, Number($("umax").value), Number($("nu").value),
    Number($("paths").value), Number($("horizon").value), Number($("dt").value), Number($("seed").value));
  const rows = parseCsv(csv);
  plot($("ruin"), [
    { points: rows.map((r) => [r.u, r.bound]), color: "#c62828" },
    { points: rows.map((r) => [r.u, r.estimate, 3 * r.stderr]), color: "#1565c0", dots: true },
  ], { xLabel: "initial capital u", yLabel: "P(ruin)", yMin: 0, yMax: 1 });
  const verdicts = rows.map((r) => r.verdict);
  $("status").textContent = `${rows.length} levels in ${((performance.now() - t0) / 1000).toFixed(2)} s; ` +
    `${verdicts.filter((v) => v === "certified").length} certified, ` +
    `${verdicts.filter((v) => v === "violation").length} violations`;
}

await init();
$("model").value = PRESETS.B;
$("preset").onchange = () => { $("model").value = PRESETS[$("preset").value]; };
$("classify").onclick = guarded(classifyModel);
$("curve").onclick = guarded(plotPsi);
$("simulate").onclick = guarded(simulate);
guarded(classifyModel)();
