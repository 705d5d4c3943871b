import init, { lamination, code_point, orbit_points } from "./pkg/hdcoding_web.js";

const VIEW = 4;
const canvas = document.getElementById("plot");
const ctx = canvas.getContext("2d");
const out = document.getElementById("out");
const $ = (id) => document.getElementById(id);

let curves = null;
let orbit = null;

const toPx = ([x, y]) => [((x + VIEW) / (2 * VIEW)) * canvas.width, ((VIEW - y) / (2 * VIEW)) * canvas.height];
const fromPx = (px, py) => [(px / canvas.width) * 2 * VIEW - VIEW, VIEW - (py / canvas.height) * 2 * VIEW];

function polyline(points, color, width) {
  ctx.strokeStyle = color;
  ctx.lineWidth = width;
  ctx.beginPath();
  points.forEach((p, k) => {
    const [u, v] = toPx(p);
    k === 0 ? ctx.moveTo(u, v) : ctx.lineTo(u, v);
  });
  ctx.stroke();
}

function render() {
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  polyline([[-VIEW, 0], [VIEW, 0]], "#ddd", 1);
  polyline([[0, -VIEW], [0, VIEW]], "#ddd", 1);
  if (curves) {
    for (const line of curves.R) polyline(line.points, "rgba(192,57,43,0.7)", 1);
    for (const line of curves.L) polyline(line.points, "rgba(36,113,163,0.7)", 1);
  }
  if (orbit) {
    ctx.fillStyle = "#1e8449";
    for (const [t, x, y] of orbit.points) {
      const [u, v] = toPx([x, y]);
      ctx.beginPath();
      ctx.arc(u, v, t === 0 ? 4 : 2, 0, 2 * Math.PI);
      ctx.fill();
    }
  }
}

function guarded(f) {
  try {
    f();
  } catch (e) {
    out.textContent = "error: " + (e.message ?? e);
  }
}

function draw() {
  guarded(() => {
    curves = JSON.parse(lamination(Number($("level").value), Number($("samples").value), VIEW));
    render();
  });
}

function code() {
  guarded(() => {
    const v = JSON.parse(code_point($("px").value, $("py").value, Number($("depth").value)));
    out.textContent = [
      `point  (${v.point[0]}, ${v.point[1]})`,
      `i-word ${v.i_word}`,
      `j-word ${v.j_word}`,
      `h_i    ${v.h_i}`,
      `h_j    ${v.h_j}`,
    ].join("\n");
  });
}

function iterate() {
  guarded(() => {
    orbit = JSON.parse(orbit_points($("px").value, $("py").value, Number($("fwd").value), Number($("bwd").value)));
    render();
  });
}

canvas.addEventListener("click", (ev) => {
  const r = canvas.getBoundingClientRect();
  const [x, y] = fromPx(ev.clientX - r.left, ev.clientY - r.top);
  // three decimals keep the typed value short and exact
  $("px").value = x.toFixed(3);
  $("py").value = y.toFixed(3);
  code();
  iterate();
});
$("draw").addEventListener("click", draw);
$("code").addEventListener("click", code);
$("orbit").addEventListener("click", iterate);

await init();
draw();
code();
iterate();
