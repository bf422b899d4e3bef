import init, { simulate, labelDiversity, betweenVariation, categories } from "./pkg/ideadiv_wasm.js";

const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];
const $ = (id) => document.getElementById(id);

function drawCurve(canvas, curve) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 34, maxY = 28;
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, 8, w - pad - 8, h - pad - 8);
  ctx.fillStyle = "#555";
  ctx.font = "11px sans-serif";
  for (let y = 0; y <= maxY; y += 7) {
    const py = h - pad - (y / maxY) * (h - pad - 8);
    ctx.fillText(String(y), 8, py + 4);
  }
  ctx.fillText("idea number", w / 2 - 25, h - 8);
  const x = (k) => pad + ((k - 1) / (curve.length - 1)) * (w - pad - 16) + 4;
  const y = (v) => h - pad - (v / maxY) * (h - pad - 8);
  ctx.strokeStyle = COLORS[0];
  ctx.lineWidth = 2;
  ctx.beginPath();
  curve.forEach((v, i) => (i ? ctx.lineTo(x(i + 1), y(v)) : ctx.moveTo(x(1), y(v))));
  ctx.stroke();
  ctx.fillStyle = COLORS[0];
  curve.forEach((v, i) => ctx.fillRect(x(i + 1) - 2, y(v) - 2, 4, 4));
}

function runSimulation() {
  for (const id of ["rho", "phi", "collapse"]) $(`${id}-v`).textContent = $(id).value;
  try {
    const r = JSON.parse(simulate(+$("rho").value, +$("phi").value, +$("collapse").value,
      +$("agents").value, +$("seed").value));
    drawCurve($("curve"), r.mean_curve);
    $("sim-out").textContent =
      `mean slope (beta)        ${r.mean_beta.toFixed(3)}\n` +
      `first ideas: categories  ${r.first_t_cat}, combinations ${r.first_t_comb}\n` +
      `all ideas:   categories  ${r.pooled_t_cat}, combinations ${r.pooled_t_comb}\n` +
      `between-agent variation  ${r.s_between.toFixed(4)}\n\n` +
      r.sample_ideas.join("\n");
  } catch (e) {
    $("sim-out").textContent = String(e);
  }
}

const labels = [];

function renderLabels() {
  $("label-list").innerHTML = "";
  for (const l of labels) {
    const li = document.createElement("li");
    li.textContent = l.join(" / ");
    $("label-list").appendChild(li);
  }
  if (!labels.length) {
    $("label-out").textContent = "";
    return;
  }
  try {
    const r = JSON.parse(labelDiversity(JSON.stringify(labels)));
    const d = r.d_mean === null ? "n/a" : r.d_mean.toFixed(3);
    $("label-out").textContent =
      `total categories ${r.t_cat}\nunique combinations ${r.t_comb}\nmean distance ${d}\n` +
      `consecutive distances ${r.steps.join(", ")}`;
  } catch (e) {
    $("label-out").textContent = String(e);
  }
}

const points = [[], [], []];

function drawPlane() {
  const canvas = $("plane");
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  points.forEach((ps, p) => {
    ctx.fillStyle = ctx.strokeStyle = COLORS[p];
    for (const [x, y] of ps) {
      ctx.beginPath();
      ctx.arc(x, y, 4, 0, 2 * Math.PI);
      ctx.fill();
    }
    if (ps.length) {
      const cx = ps.reduce((s, q) => s + q[0], 0) / ps.length;
      const cy = ps.reduce((s, q) => s + q[1], 0) / ps.length;
      ctx.lineWidth = 2;
      ctx.beginPath();
      ctx.moveTo(cx - 7, cy - 7); ctx.lineTo(cx + 7, cy + 7);
      ctx.moveTo(cx + 7, cy - 7); ctx.lineTo(cx - 7, cy + 7);
      ctx.stroke();
    }
  });
  const filled = points.filter((ps) => ps.length);
  if (filled.length < 2) {
    $("spread-out").textContent = "place ideas for at least two participants";
    return;
  }
  try {
    $("spread-out").textContent = `s_between = ${betweenVariation(JSON.stringify(filled)).toFixed(2)} px`;
  } catch (e) {
    $("spread-out").textContent = String(e);
  }
}

async function main() {
  await init();
  const dims = JSON.parse(categories());
  dims.forEach((d, i) => {
    const sel = $(`dim${i}`);
    sel.title = d.name;
    for (const c of d.categories) sel.add(new Option(c, c));
  });
  points.forEach((_, p) => $("participant").add(new Option(`participant ${p + 1}`, p)));

  for (const id of ["rho", "phi", "collapse", "agents", "seed"]) $(id).addEventListener("input", runSimulation);
  $("add-label").onclick = () => {
    labels.push([0, 1, 2].map((i) => $(`dim${i}`).value));
    renderLabels();
  };
  $("clear-labels").onclick = () => {
    labels.length = 0;
    renderLabels();
  };
  $("plane").addEventListener("click", (ev) => {
    const rect = ev.target.getBoundingClientRect();
    points[+$("participant").value].push([ev.clientX - rect.left, ev.clientY - rect.top]);
    drawPlane();
  });
  $("clear-points").onclick = () => {
    points.forEach((ps) => (ps.length = 0));
    drawPlane();
  };
  runSimulation();
  drawPlane();
}

main();
