import init, { survey, profile, diracSpectrum } from "./pkg/fintriple_web.js";

const $ = (id) => document.getElementById(id);

function fail(target, e) {
  target.innerHTML = `<span class="err">${e.message ?? e}</span>`;
}

// Scatter/line plot on a canvas. series: [{xs, ys, color, dots}]
function plot(canvas, series) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 36;
  ctx.clearRect(0, 0, w, h);
  const all = series.flatMap((s) => s.xs.map((x, i) => [x, s.ys[i]])).filter(([, y]) => Number.isFinite(y));
  if (all.length === 0) return;
  let [x0, x1] = [Math.min(...all.map((p) => p[0])), Math.max(...all.map((p) => p[0]))];
  let [y0, y1] = [Math.min(0, ...all.map((p) => p[1])), Math.max(...all.map((p) => p[1]))];
  if (x1 === x0) x1 = x0 + 1;
  if (y1 === y0) y1 = y0 + 1;
  const sx = (x) => pad + ((x - x0) / (x1 - x0)) * (w - 2 * pad);
  const sy = (y) => h - pad - ((y - y0) / (y1 - y0)) * (h - 2 * pad);

  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(pad, sy(0));
  ctx.lineTo(w - pad, sy(0));
  ctx.stroke();
  ctx.fillStyle = "#555";
  ctx.font = "11px sans-serif";
  ctx.fillText(y1.toFixed(3), 2, sy(y1) + 4);
  ctx.fillText(y0.toFixed(3), 2, sy(y0));

  for (const s of series) {
    ctx.strokeStyle = ctx.fillStyle = s.color;
    if (s.dots) {
      s.xs.forEach((x, i) => {
        ctx.beginPath();
        ctx.arc(sx(x), sy(s.ys[i]), 3, 0, 2 * Math.PI);
        ctx.fill();
      });
    } else {
      ctx.beginPath();
      s.xs.forEach((x, i) => (i ? ctx.lineTo(sx(x), sy(s.ys[i])) : ctx.moveTo(sx(x), sy(s.ys[i]))));
      ctx.stroke();
    }
  }
}

function runSurvey() {
  const out = $("sv-out");
  try {
    const rows = JSON.parse(survey($("sv-shape").value, Number($("sv-max").value)));
    const body = rows
      .map((r) => `<tr class="${r.det === 0 ? "zero" : ""}"><td>${r.n}</td><td>${r.det}</td><td>${r.kernel_dim}</td></tr>`)
      .join("");
    out.innerHTML = `<table><tr><th>n</th><th>det q</th><th>dim ker q</th></tr>${body}</table>`;
  } catch (e) {
    fail(out, e);
  }
}

function runProfile() {
  const info = $("pr-info");
  try {
    const p = JSON.parse(
      profile($("pr-shape").value, Number($("pr-n").value), $("pr-fn").value, Number($("pr-k").value), $("pr-norm").value),
    );
    const gap = Math.max(...p.nu.map((v, i) => (Number.isFinite(p.reference[i]) ? Math.abs(v - p.reference[i]) : 0)));
    info.textContent =
      `ν per point (dots) against the continuum value (line); max gap ${gap.toExponential(2)}, ` +
      `off-block residual ${p.off_block_residual.toExponential(1)}` +
      (p.degenerate ? "; warning: det q = 0 at this size" : "");
    plot($("pr-plot"), [
      { xs: p.x, ys: p.reference, color: "#888" },
      { xs: p.x, ys: p.nu, color: "#1f5fbf", dots: true },
    ]);
  } catch (e) {
    fail(info, e);
  }
}

function runSpectrum() {
  const info = $("sp-info");
  try {
    const s = JSON.parse(diracSpectrum($("sp-shape").value, Number($("sp-n").value), $("sp-norm").value));
    const failing = s.axioms.checks.filter((c) => !c.pass).map((c) => c.check_name);
    info.textContent =
      `${s.eigenvalues.length} eigenvalues, ${s.kernel_dim} zero, ` +
      `λ ↔ −λ residual ${s.symmetry_residual.toExponential(1)}; ` +
      (failing.length ? `failing axioms: ${failing.join(", ")}` : "all axiom checks pass");
    plot($("sp-plot"), [{ xs: s.eigenvalues.map((_, i) => i), ys: s.eigenvalues, color: "#b05a00", dots: true }]);
  } catch (e) {
    fail(info, e);
  }
}

await init();
$("sv-run").onclick = runSurvey;
$("pr-run").onclick = runProfile;
$("sp-run").onclick = runSpectrum;
runSurvey();
runProfile();
runSpectrum();
