import init, { productSweep, distanceSweep, ablogdetSweep } from "./pkg/specbound_wasm.js";

const STEPS = 241;
const COLORS = ["#1f77b4", "#000", "#d62728"];
const canvas = document.getElementById("plot");
const ctx = canvas.getContext("2d");
const status = document.getElementById("status");

const num = (id) => parseFloat(document.getElementById(id).value);

function compute() {
  const op = document.querySelector("input[name=op]:checked").value;
  const a = new Float64Array([num("a1"), num("a2")]);
  const b = new Float64Array([num("b1"), num("b2")]);
  switch (op) {
    case "product": return productSweep(a, b, num("q"), STEPS);
    case "distance": return distanceSweep(a, b, num("q"), STEPS);
    default: return ablogdetSweep(a, b, num("alpha"), num("beta"), STEPS);
  }
}

function draw(flat) {
  const rows = [];
  for (let i = 0; i < flat.length; i += 4) rows.push(flat.slice(i, i + 4));
  const finite = rows.flatMap((r) => r.slice(1)).filter(Number.isFinite);
  const { width: w, height: h } = canvas;
  const pad = 60;
  ctx.clearRect(0, 0, w, h);
  if (finite.length === 0) return;
  let lo = Math.min(...finite);
  let hi = Math.max(...finite);
  if (hi - lo < 1e-12) { lo -= 1; hi += 1; }
  const x = (t) => pad + ((w - 2 * pad) * t) / Math.PI;
  const y = (v) => h - pad - ((h - 2 * pad) * (v - lo)) / (hi - lo);

  ctx.strokeStyle = "#999";
  ctx.fillStyle = "#444";
  ctx.font = "22px system-ui";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  for (const [t, label] of [[0, "0"], [Math.PI / 2, "π/2"], [Math.PI, "π"]]) {
    ctx.fillText(label, x(t) - 10, h - pad + 30);
  }
  ctx.fillText(hi.toPrecision(4), 4, pad + 8);
  ctx.fillText(lo.toPrecision(4), 4, h - pad);

  ctx.lineWidth = 3;
  for (let k = 0; k < 3; k++) {
    ctx.strokeStyle = COLORS[k];
    ctx.beginPath();
    let pen = false;
    for (const r of rows) {
      const v = r[k + 1];
      if (!Number.isFinite(v)) { pen = false; continue; }
      if (pen) ctx.lineTo(x(r[0]), y(v)); else ctx.moveTo(x(r[0]), y(v));
      pen = true;
    }
    ctx.stroke();
  }
  const gaps = rows.filter((r) => Number.isNaN(r[2])).length;
  status.textContent = gaps ? `${gaps} of ${rows.length} angles are outside the domain` : "";
}

function update() {
  try {
    draw(compute());
  } catch (e) {
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    status.textContent = String(e.message ?? e);
  }
}

await init();
document.querySelectorAll("input").forEach((el) => el.addEventListener("input", update));
update();
