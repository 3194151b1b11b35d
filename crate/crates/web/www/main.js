import init, { trace, projection, membership } from "./pkg/elcone_web.js";

const $ = (id) => document.getElementById(id);
const fmt = (v) => v.map((t) => t.toFixed(6)).join(", ");

function call(f, ...args) {
  const out = JSON.parse(f(...args));
  if (out.error) throw new Error(out.error);
  return out;
}

// plot of log10 residual against n
function drawResiduals(canvas, rows) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 36;
  ctx.clearRect(0, 0, w, h);
  const logs = rows.map((r) => Math.log10(Math.max(r.residual, 1e-18)));
  const lo = Math.floor(Math.min(...logs));
  const hi = Math.ceil(Math.max(...logs, lo + 1));
  const nmax = Math.max(rows.length - 1, 1);
  const px = (n) => pad + ((w - 2 * pad) * n) / nmax;
  const py = (v) => h - pad - ((h - 2 * pad) * (v - lo)) / (hi - lo);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#333";
  ctx.font = "11px sans-serif";
  ctx.fillText(`1e${hi}`, 2, py(hi) + 4);
  ctx.fillText(`1e${lo}`, 2, py(lo) + 4);
  ctx.fillText("n", w - pad + 6, h - pad + 4);
  ctx.fillText(String(nmax), px(nmax) - 6, h - pad + 14);
  ctx.strokeStyle = "#1f5fa8";
  ctx.beginPath();
  logs.forEach((v, n) => (n ? ctx.lineTo(px(n), py(v)) : ctx.moveTo(px(n), py(v))));
  ctx.stroke();
  ctx.fillStyle = "#1f5fa8";
  logs.forEach((v, n) => ctx.fillRect(px(n) - 2, py(v) - 2, 4, 4));
}

function runTrace() {
  const start = ["x1", "x2", "u1", "u2"].map((id) => Number($(id).value));
  try {
    const r = call(trace, new Float64Array(start), Number($("maxit").value));
    drawResiduals($("resid"), r.rows);
    const lines = [
      `start in Omega   ${r.start_in_omega}`,
      `start in Gamma   ${r.start_in_gamma}`,
      `termination      ${r.termination} after ${r.iterations} iterations`,
      `residual         ${r.residual.toExponential(3)}`,
      `direction        ${r.direction ?? "none"}`,
      `monotone         ${r.monotone}`,
      `below start      ${r.below_start}`,
      `solution         (${fmt(r.solution)})`,
      "",
      "n   z",
      ...r.rows.map((row) => `${String(row.n).padEnd(3)} (${fmt(row.z)})`),
    ];
    $("trace-out").textContent = lines.join("\n");
  } catch (e) {
    $("trace-out").textContent = e.message;
  }
}

const SCALE = 40; // pixels per unit on the square canvases

function toPixel(canvas, [a, b]) {
  return [canvas.width / 2 + a * SCALE, canvas.height / 2 - b * SCALE];
}

function axes(ctx, canvas) {
  ctx.strokeStyle = "#ccc";
  ctx.beginPath();
  ctx.moveTo(0, canvas.height / 2);
  ctx.lineTo(canvas.width, canvas.height / 2);
  ctx.moveTo(canvas.width / 2, 0);
  ctx.lineTo(canvas.width / 2, canvas.height);
  ctx.stroke();
}

let projPoint = [3, 1];

function runProjection() {
  const canvas = $("proj");
  const ctx = canvas.getContext("2d");
  const cone = $("cone").value;
  try {
    const r = call(projection, cone, projPoint[0], projPoint[1]);
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    const far = canvas.width / SCALE;
    const [r1, r2] = r.rays;
    ctx.fillStyle = "#dbe8f7";
    ctx.beginPath();
    ctx.moveTo(...toPixel(canvas, [0, 0]));
    ctx.lineTo(...toPixel(canvas, [r1[0] * far, r1[1] * far]));
    ctx.lineTo(...toPixel(canvas, [(r1[0] + r2[0]) * far, (r1[1] + r2[1]) * far]));
    ctx.lineTo(...toPixel(canvas, [r2[0] * far, r2[1] * far]));
    ctx.closePath();
    ctx.fill();
    axes(ctx, canvas);
    ctx.strokeStyle = "#c03";
    ctx.beginPath();
    ctx.moveTo(...toPixel(canvas, projPoint));
    ctx.lineTo(...toPixel(canvas, r.point));
    ctx.stroke();
    ctx.fillStyle = "#c03";
    ctx.fillRect(...toPixel(canvas, projPoint).map((t) => t - 3), 6, 6);
    ctx.fillStyle = "#1f5fa8";
    ctx.fillRect(...toPixel(canvas, r.point).map((t) => t - 3), 6, 6);
    $("proj-out").textContent = [
      `v          (${fmt(projPoint)})`,
      `P(v)       (${fmt(r.point)})`,
      `distance   ${r.distance.toFixed(6)}`,
      `active set [${r.active_set.join(", ")}]`,
    ].join("\n");
  } catch (e) {
    $("proj-out").textContent = e.message;
  }
}

function runSlice() {
  const canvas = $("slice");
  const ctx = canvas.getContext("2d");
  const unorm = Number($("unorm").value);
  $("unorm-val").textContent = unorm.toFixed(2);
  const half = canvas.width / (2 * SCALE);
  const n = 200;
  try {
    const r = call(membership, unorm, half, n);
    const img = ctx.createImageData(n, n);
    const colours = [[255, 255, 255], [170, 200, 235], [31, 95, 168]];
    r.cells.forEach((code, i) => {
      img.data.set([...colours[code], 255], 4 * i);
    });
    const off = new OffscreenCanvas(n, n);
    off.getContext("2d").putImageData(img, 0, 0);
    ctx.imageSmoothingEnabled = false;
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    ctx.drawImage(off, 0, 0, canvas.width, canvas.height);
    axes(ctx, canvas);
    $("slice-out").textContent = [
      `|u|        ${unorm.toFixed(2)}`,
      `grid       ${n} x ${n} over [-${half}, ${half}]^2`,
      `in L       ${r.in_l}`,
      `in M       ${r.in_m}`,
      "",
      "L is the corner x >= |u| (1, 1);",
      "M adds the wedge x >= 0, x_1 + x_2 >= |u|.",
    ].join("\n");
  } catch (e) {
    $("slice-out").textContent = e.message;
  }
}

await init();

$("run").addEventListener("click", runTrace);
$("omega").addEventListener("click", () => {
  [31, 31, 3, 4].forEach((v, i) => ($(["x1", "x2", "u1", "u2"][i]).value = v));
  runTrace();
});
$("cone").addEventListener("change", runProjection);
$("proj").addEventListener("click", (ev) => {
  const canvas = $("proj");
  const rect = canvas.getBoundingClientRect();
  projPoint = [
    (ev.clientX - rect.left - canvas.width / 2) / SCALE,
    (canvas.height / 2 - (ev.clientY - rect.top)) / SCALE,
  ];
  runProjection();
});
$("unorm").addEventListener("input", runSlice);

runTrace();
runProjection();
runSlice();
