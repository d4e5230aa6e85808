import init, { classify, stationary_profile, decay_run } from "./pkg/micropolar_wasm_demo.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);
const out = $("out");
const canvas = $("plot");
const ctx = canvas.getContext("2d");

function inputs() {
  return [num("mach"), num("chi0"), num("gamma"), num("omega_b")];
}

function show(text, isError = false) {
  out.textContent = text;
  out.className = isError ? "err" : "";
}

// Plots each series against xs; logY plots log10 of positive values.
function plot(xs, series, { logY = false, xLabel = "" } = {}) {
  const w = canvas.width, h = canvas.height, pad = 40;
  ctx.clearRect(0, 0, w, h);
  const tf = (v) => (logY ? Math.log10(Math.max(v, 1e-300)) : v);
  let lo = Infinity, hi = -Infinity;
  for (const s of series) for (const v of s.ys) { lo = Math.min(lo, tf(v)); hi = Math.max(hi, tf(v)); }
  if (hi - lo < 1e-12) { lo -= 1; hi += 1; }
  const x0 = xs[0], x1 = xs[xs.length - 1];
  const px = (x) => pad + ((x - x0) / (x1 - x0)) * (w - 2 * pad);
  const py = (y) => h - pad - ((tf(y) - lo) / (hi - lo)) * (h - 2 * pad);

  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#333";
  ctx.font = "11px system-ui";
  ctx.fillText((logY ? "1e" : "") + hi.toPrecision(3), 2, pad + 4);
  ctx.fillText((logY ? "1e" : "") + lo.toPrecision(3), 2, h - pad);
  ctx.fillText(`${x0.toPrecision(3)}`, pad, h - pad + 14);
  ctx.fillText(`${x1.toPrecision(3)} ${xLabel}`, w - pad - 60, h - pad + 14);

  series.forEach((s, k) => {
    ctx.strokeStyle = s.color;
    ctx.beginPath();
    s.ys.forEach((y, i) => (i ? ctx.lineTo(px(xs[i]), py(y)) : ctx.moveTo(px(xs[i]), py(y))));
    ctx.stroke();
    ctx.fillStyle = s.color;
    ctx.fillText(s.name, w - pad - 120, pad + 14 + 14 * k);
  });
}

function guard(fn) {
  return () => {
    try {
      fn();
    } catch (e) {
      show(String(e), true);
    }
  };
}

await init();
show("ready");

$("btn-classify").onclick = guard(() => show(classify(...inputs())));

$("btn-profile").onclick = guard(() => {
  const p = stationary_profile(...inputs(), num("cells"));
  const x = p.x;
  // normalise so the three fields share one axis
  const omega = Array.from(p.omega);
  const ob = Math.abs(omega[0]) || 1;
  plot(x, [
    { name: "rho", ys: Array.from(p.rho), color: "#1f77b4" },
    { name: "-u", ys: Array.from(p.u, (v) => -v), color: "#d62728" },
    { name: "omega / omega_b", ys: omega.map((v) => v / ob), color: "#2ca02c" },
  ], { xLabel: "x" });
  show(`${p.regime} profile on [0, ${x[x.length - 1].toPrecision(4)}], ${x.length - 1} cells`);
  p.free();
});

$("btn-decay").onclick = guard(() => {
  show("running…");
  // let the status paint before the blocking run
  setTimeout(guard(() => {
    const c = decay_run(...inputs(), num("amp"), num("t_end"), num("cells"));
    const t = Array.from(c.times);
    plot(t, [{ name: "sup |perturbation|", ys: Array.from(c.sup_norms), color: "#9467bd" }], { logY: true, xLabel: "t" });
    show(`fitted decay exponent (1+t)^-k after burn-in: k = ${c.exponent.toFixed(3)}`);
    c.free();
  }), 10);
});
