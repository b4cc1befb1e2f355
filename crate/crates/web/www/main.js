import init, { secantSet, upperLimit, nullLagrangian } from "./pkg/tangentlab_web.js";

function toCanvas(canvas) {
  const s = canvas.width / 2;
  return (x, y) => [s * (x + 1), s * (1 - y)];
}

function clear(ctx, canvas) {
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.strokeStyle = "#eee";
  ctx.beginPath();
  ctx.moveTo(canvas.width / 2, 0);
  ctx.lineTo(canvas.width / 2, canvas.height);
  ctx.moveTo(0, canvas.height / 2);
  ctx.lineTo(canvas.width, canvas.height / 2);
  ctx.stroke();
}

function dots(ctx, canvas, flat, color, size) {
  const map = toCanvas(canvas);
  ctx.fillStyle = color;
  for (let i = 0; i < flat.length; i += 2) {
    const [u, v] = map(flat[i], flat[i + 1]);
    ctx.fillRect(u - size / 2, v - size / 2, size, size);
  }
}

function report(form, text, isError) {
  const pre = form.querySelector(".status");
  pre.textContent = text;
  pre.className = isError ? "status err" : "status";
}

function num(form, name) {
  return Number(form.elements[name].value);
}

function secant() {
  const section = document.getElementById("secant");
  const form = section.querySelector("form");
  const canvas = section.querySelector("canvas");
  const ctx = canvas.getContext("2d");
  const draw = () => {
    form.elements.cxv.value = num(form, "cx").toFixed(2);
    form.elements.cyv.value = num(form, "cy").toFixed(2);
    clear(ctx, canvas);
    try {
      const pts = secantSet(form.elements.f.value, num(form, "bx"), num(form, "by"),
        num(form, "cx"), num(form, "cy"), num(form, "grid"));
      dots(ctx, canvas, pts, "#1f5fa8", 2);
      dots(ctx, canvas, [num(form, "bx"), num(form, "by")], "#d33", 6);
      report(form, `${pts.length / 2} points`, false);
    } catch (e) {
      report(form, String(e.message ?? e), true);
    }
  };
  form.addEventListener("input", draw);
  form.addEventListener("submit", (e) => { e.preventDefault(); draw(); });
  draw();
}

function limsup() {
  const section = document.getElementById("limsup");
  const form = section.querySelector("form");
  const canvas = section.querySelector("canvas");
  const ctx = canvas.getContext("2d");
  form.addEventListener("submit", (e) => {
    e.preventDefault();
    clear(ctx, canvas);
    try {
      const t = num(form, "theta") * Math.PI / 180;
      const r = JSON.parse(upperLimit(form.elements.f.value, num(form, "bx"), num(form, "by"),
        Math.cos(t), Math.sin(t), num(form, "nmax"), num(form, "grid")));
      dots(ctx, canvas, r.tangent_points, "#bbb", 3);
      dots(ctx, canvas, r.limsup_points, "#1f5fa8", 2);
      const w = r.witnesses[1].point;
      dots(ctx, canvas, w, "#d33", 8);
      report(form,
        `inclusion: ${r.inclusion} (d = ${r.d_limsup_to_tangent.toFixed(4)}, tol ${r.inclusion_tolerance.toFixed(4)})\n` +
        `proper gap: ${r.proper_gap.toFixed(4)} at (${w.map((v) => v.toFixed(3)).join(", ")})\n` +
        `grey: tangent set, blue: upper limit`, false);
    } catch (err) {
      report(form, String(err.message ?? err), true);
    }
  });
}

function mechanics() {
  const section = document.getElementById("mechanics");
  const form = section.querySelector("form");
  const canvas = section.querySelector("canvas");
  const ctx = canvas.getContext("2d");
  form.addEventListener("submit", (e) => {
    e.preventDefault();
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    try {
      const el = form.elements;
      const r = JSON.parse(nullLagrangian(el.f.value, el.g.value, el.h.value,
        el.x.value, el.y.value, el.z.value, num(form, "a"), num(form, "b"), 400));
      // log10 of the residual, floored at 1e-18
      const logs = r.residual.map((v) => Math.log10(Math.max(v, 1e-18)));
      const lo = -18, hi = Math.max(0, ...logs);
      ctx.strokeStyle = "#1f5fa8";
      ctx.beginPath();
      logs.forEach((v, i) => {
        const u = (i / (logs.length - 1)) * canvas.width;
        const w = canvas.height * (1 - (v - lo) / (hi - lo));
        if (i === 0) ctx.moveTo(u, w); else ctx.lineTo(u, w);
      });
      ctx.stroke();
      report(form,
        `max EL residual ${r.max_residual.toExponential(2)}\n` +
        `action ${r.action} (Richardson delta ${r.richardson_delta.toExponential(2)})\n` +
        `endpoint formula ${r.endpoint_action}\nP = ${r.lagrangian.P}`, false);
    } catch (err) {
      report(form, String(err.message ?? err), true);
    }
  });
}

await init();
secant();
limsup();
mechanics();
