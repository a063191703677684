import init, { Setup, riemann_profile, delta_v_curve, stability_curve } from "./pkg/tomflow_web.js";

const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#ff7f0e"];
const num = (id) => parseFloat(document.getElementById(id).value);

function plot(canvas, x, series, colors) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 40;
  ctx.clearRect(0, 0, w, h);
  const ys = series.flat().filter(Number.isFinite);
  if (x.length === 0 || ys.length === 0) {
    ctx.fillText("nothing to show", pad, h / 2);
    return;
  }
  let [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  if (y1 - y0 < 1e-12) { y0 -= 0.5; y1 += 0.5; }
  const [x0, x1] = [x[0], x[x.length - 1]];
  const sx = (v) => pad + ((v - x0) / (x1 - x0)) * (w - 2 * pad);
  const sy = (v) => h - pad + ((v - y0) / (y1 - y0)) * (2 * pad - h);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#333";
  ctx.fillText(y1.toPrecision(3), 2, pad + 4);
  ctx.fillText(y0.toPrecision(3), 2, h - pad);
  ctx.fillText(x0.toPrecision(3), pad, h - pad + 14);
  ctx.fillText(x1.toPrecision(3), w - pad - 24, h - pad + 14);
  if (y0 < 0 && y1 > 0) {
    ctx.strokeStyle = "#ddd";
    ctx.beginPath();
    ctx.moveTo(pad, sy(0));
    ctx.lineTo(w - pad, sy(0));
    ctx.stroke();
  }
  series.forEach((s, k) => {
    ctx.strokeStyle = colors[k];
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    s.forEach((v, i) => (i === 0 ? ctx.moveTo(sx(x[i]), sy(v)) : ctx.lineTo(sx(x[i]), sy(v))));
    ctx.stroke();
  });
}

function refresh() {
  const err = document.getElementById("error");
  err.textContent = "";
  const setup = new Setup(num("qexp"), num("hexp"), num("heqexp"), num("rhol"), num("vl"), num("rhor"), num("vr"));
  const t = num("time");
  try {
    const p = riemann_profile(setup, t, -1, 1, 801);
    document.getElementById("summary").textContent = p.summary;
    plot(document.getElementById("profile"), p.x, [p.rho, p.v, p.h], COLORS);
  } catch (e) {
    err.textContent = `riemann: ${e.message ?? e}`;
  }
  try {
    const c = delta_v_curve(setup, t, 200);
    plot(document.getElementById("deltav"), c.x, [c.y], [COLORS[1]]);
  } catch (e) {
    plot(document.getElementById("deltav"), [], [], []);
  }
  try {
    const s = stability_curve(num("qexp"), num("hexp"), num("heqexp"), num("vstab"), 0.02, 1, 99);
    plot(document.getElementById("stability"), s.rho, [s.mu, s.gamma, s.lam1_frozen, s.lam1_arz],
      [COLORS[0], COLORS[5], COLORS[3], COLORS[4]]);
  } catch (e) {
    err.textContent += ` stability: ${e.message ?? e}`;
  }
}

await init();
document.getElementById("controls").addEventListener("input", refresh);
refresh();
