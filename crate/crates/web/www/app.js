import init, { tropical, study, solve } from "./pkg/convexma_web.js";

const TROPICAL = {
  domain: { vertices: [["-2", "-2"], ["-2", "2"], ["2", "-2"], ["2", "2"]] },
  pieces: [
    { slope: ["0", "0"], intercept: "0" },
    { slope: ["1", "0"], intercept: "0" },
    { slope: ["0", "1"], intercept: "0" },
    { slope: ["-1", "-1"], intercept: "-1" },
  ],
};

function frame(canvas, lo, hi) {
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const pad = 12;
  const sx = (canvas.width - 2 * pad) / (hi[0] - lo[0]);
  const sy = (canvas.height - 2 * pad) / (hi[1] - lo[1]);
  const map = ([x, y]) => [pad + (x - lo[0]) * sx, canvas.height - pad - (y - lo[1]) * sy];
  return { ctx, map, scale: Math.min(sx, sy) };
}

function drawAtoms(f, atoms, color) {
  const max = Math.max(...atoms.map((a) => Number(a.mass_decimal)), 1e-9);
  for (const a of atoms) {
    const [px, py] = f.map(a.x.length === 1 ? [a.x[0], 0] : a.x);
    const r = 2 + 10 * Math.sqrt(Number(a.mass_decimal) / max);
    f.ctx.beginPath();
    f.ctx.arc(px, py, r, 0, 2 * Math.PI);
    f.ctx.fillStyle = color;
    f.ctx.fill();
  }
}

function bounds(points) {
  const lo = [Infinity, Infinity];
  const hi = [-Infinity, -Infinity];
  for (const p of points) {
    for (let i = 0; i < 2; i++) {
      lo[i] = Math.min(lo[i], p[i]);
      hi[i] = Math.max(hi[i], p[i]);
    }
  }
  return [lo, hi];
}

function runTropical() {
  const out = document.getElementById("pa-out");
  out.className = "";
  try {
    const view = JSON.parse(tropical(document.getElementById("pa").value));
    out.textContent = `total mass ${view.total}\n` + view.atoms.map((a) => `(${a.x.join(", ")})  ${a.mass}`).join("\n");
    const canvas = document.getElementById("pa-canvas");
    const pts = view.cells.flat();
    if (pts.length === 0 || pts[0].length !== 2) {
      canvas.getContext("2d").clearRect(0, 0, canvas.width, canvas.height);
      return;
    }
    const [lo, hi] = bounds(pts);
    const f = frame(canvas, lo, hi);
    f.ctx.strokeStyle = "#555";
    for (const cell of view.cells) {
      f.ctx.beginPath();
      cell.forEach((v, i) => {
        const [px, py] = f.map(v);
        i === 0 ? f.ctx.moveTo(px, py) : f.ctx.lineTo(px, py);
      });
      f.ctx.closePath();
      f.ctx.stroke();
    }
    drawAtoms(f, view.atoms, "rgba(200, 40, 40, 0.8)");
  } catch (e) {
    out.className = "error";
    out.textContent = String(e);
  }
}

function runStudy() {
  const table = document.getElementById("study-table");
  try {
    const ds = document.getElementById("steps").value.split(",").map((s) => parseInt(s.trim(), 10));
    const view = JSON.parse(study(new Uint32Array(ds)));
    const rows = view.report.rows;
    table.innerHTML =
      "<tr><th>step</th><th>uniform error</th><th>box mass</th><th>atoms</th></tr>" +
      rows.map((r, i) => `<tr><td>${r.step}</td><td>${r.error}</td><td>${view.window_mass[i]}</td><td>${r.atoms}</td></tr>`).join("");
    const f = frame(document.getElementById("study-canvas"), [-1, -1], [1, 1]);
    f.ctx.strokeStyle = "#999";
    const [a, b] = [f.map([-0.5, -0.5]), f.map([0.5, 0.5])];
    f.ctx.strokeRect(a[0], b[1], b[0] - a[0], a[1] - b[1]);
    drawAtoms(f, view.finest_atoms, "rgba(40, 80, 200, 0.7)");
  } catch (e) {
    table.innerHTML = `<tr><td class="error">${e}</td></tr>`;
  }
}

function runSolve() {
  const out = document.getElementById("solve-out");
  out.className = "";
  try {
    const view = JSON.parse(
      solve(document.getElementById("density").value, parseInt(document.getElementById("degs").value, 10), document.getElementById("anchor").value),
    );
    out.textContent =
      view.rendering +
      `regularity checks: ${view.regularity_ok ? "pass" : "FAIL"}\n` +
      `phi'' jumps at: ${view.second_derivative_jumps.join(", ") || "none"}\n` +
      JSON.stringify(view.phi);
    const [lo, hi] = bounds(view.samples);
    if (hi[1] === lo[1]) hi[1] = lo[1] + 1;
    const f = frame(document.getElementById("solve-canvas"), lo, hi);
    f.ctx.strokeStyle = "#282";
    f.ctx.beginPath();
    view.samples.forEach((p, i) => {
      const [px, py] = f.map(p);
      i === 0 ? f.ctx.moveTo(px, py) : f.ctx.lineTo(px, py);
    });
    f.ctx.stroke();
  } catch (e) {
    out.className = "error";
    out.textContent = String(e);
  }
}

await init();
document.getElementById("pa").value = JSON.stringify(TROPICAL, null, 1);
document.getElementById("pa-run").onclick = runTropical;
document.getElementById("study-run").onclick = runStudy;
document.getElementById("solve-run").onclick = runSolve;
runTropical();
