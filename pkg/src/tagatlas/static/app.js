"use strict";
(() => {
  // src/api.ts
  function isNeighbor(value) {
    const p = value;
    return typeof p === "object" && p !== null && typeof p.tag === "string" && typeof p.similarity === "number" && typeof p.x === "number" && typeof p.y === "number";
  }
  function parseResponse(value) {
    const r = value;
    if (typeof r !== "object" || r === null) return null;
    if (typeof r.query !== "string") return null;
    if (typeof r.x !== "number" || typeof r.y !== "number") return null;
    if (!Array.isArray(r.neighbors) || !r.neighbors.every(isNeighbor)) return null;
    return r;
  }
  var NeighborsClient = class {
    constructor(baseUrl = "", fetchFn = (url, init) => fetch(url, init)) {
      this.baseUrl = baseUrl;
      this.fetchFn = fetchFn;
      this.inflight = null;
    }
    /** GET /api/neighbors for a tag, cancelling any request still running. */
    async submit(tag) {
      this.inflight?.abort();
      const controller = new AbortController();
      this.inflight = controller;
      const url = `${this.baseUrl}/api/neighbors?tag=${encodeURIComponent(tag)}`;
      try {
        const resp = await this.fetchFn(url, { signal: controller.signal });
        if (resp.status === 404) {
          return { kind: "unknown-hashtag" };
        }
        if (!resp.ok) {
          return { kind: "error", message: `service error ${resp.status}` };
        }
        const data = parseResponse(await resp.json());
        if (data === null) {
          return { kind: "error", message: "malformed response" };
        }
        return { kind: "ok", data };
      } catch (err) {
        if (controller.signal.aborted || err.name === "AbortError") {
          return { kind: "aborted" };
        }
        return { kind: "error", message: "network failure" };
      } finally {
        if (this.inflight === controller) {
          this.inflight = null;
        }
      }
    }
    /** GET /api/health; true when the service reports ok. */
    async healthy() {
      try {
        const controller = new AbortController();
        const resp = await this.fetchFn(
          `${this.baseUrl}/api/health`,
          { signal: controller.signal }
        );
        if (!resp.ok) return false;
        const body = await resp.json();
        return body !== null && body.status === "ok";
      } catch {
        return false;
      }
    }
  };

  // src/viewport.ts
  var FIT_MARGIN = 0.05;
  var MIN_ZOOM_AREA_PX = 16;
  function dataToScreen(view, size2, x, y) {
    const sx = (x - view.xmin) / (view.xmax - view.xmin) * size2.width;
    const sy = size2.height - (y - view.ymin) / (view.ymax - view.ymin) * size2.height;
    return [sx, sy];
  }
  function screenToData(view, size2, sx, sy) {
    const x = view.xmin + sx / size2.width * (view.xmax - view.xmin);
    const y = view.ymin + (size2.height - sy) / size2.height * (view.ymax - view.ymin);
    return [x, y];
  }
  function fitViewport(points, margin = FIT_MARGIN) {
    if (points.length === 0) {
      return { xmin: -1, xmax: 1, ymin: -1, ymax: 1 };
    }
    let xmin = Infinity, xmax = -Infinity, ymin = Infinity, ymax = -Infinity;
    for (const p of points) {
      xmin = Math.min(xmin, p.x);
      xmax = Math.max(xmax, p.x);
      ymin = Math.min(ymin, p.y);
      ymax = Math.max(ymax, p.y);
    }
    const padX = xmax > xmin ? (xmax - xmin) * margin : 1;
    const padY = ymax > ymin ? (ymax - ymin) * margin : 1;
    return { xmin: xmin - padX, xmax: xmax + padX, ymin: ymin - padY, ymax: ymax + padY };
  }
  function boxZoom(view, size2, rect) {
    let rw = Math.abs(rect.x1 - rect.x0);
    let rh = Math.abs(rect.y1 - rect.y0);
    if (rw * rh <= MIN_ZOOM_AREA_PX) {
      return view;
    }
    const cx = (rect.x0 + rect.x1) / 2;
    const cy = (rect.y0 + rect.y1) / 2;
    const aspect = size2.width / size2.height;
    if (rw / rh < aspect) {
      rw = rh * aspect;
    } else {
      rh = rw / aspect;
    }
    const [xmin, ymax] = screenToData(view, size2, cx - rw / 2, cy - rh / 2);
    const [xmax, ymin] = screenToData(view, size2, cx + rw / 2, cy + rh / 2);
    return { xmin, xmax, ymin, ymax };
  }
  function pan(view, size2, dxPx, dyPx) {
    const shiftX = dxPx / size2.width * (view.xmax - view.xmin);
    const shiftY = dyPx / size2.height * (view.ymax - view.ymin);
    return {
      xmin: view.xmin - shiftX,
      xmax: view.xmax - shiftX,
      ymin: view.ymin + shiftY,
      ymax: view.ymax + shiftY
    };
  }

  // src/scene.ts
  var QUERY_COLOR = "#c0392b";
  var POINT_COLOR = "#33506e";
  var LABEL_COLOR = "#1c2430";
  var MARKER_RADIUS = 3;
  var QUERY_RING_RADIUS = 8;
  var LABEL_MAX_CHARS = 24;
  var HIT_RADIUS_PX = 8;
  var LABEL_CHAR_W = 6.6;
  var LABEL_H = 12;
  var LABEL_GAP = 6;
  function ellipsize(tag) {
    if (tag.length <= LABEL_MAX_CHARS) {
      return tag;
    }
    return tag.slice(0, LABEL_MAX_CHARS - 1) + "\u2026";
  }
  function labelBox(sx, sy, text) {
    const x0 = sx + LABEL_GAP;
    const y0 = sy - LABEL_H / 2;
    return { x0, y0, x1: x0 + text.length * LABEL_CHAR_W, y1: y0 + LABEL_H };
  }
  function overlaps(a, b) {
    return a.x0 < b.x1 && b.x0 < a.x1 && a.y0 < b.y1 && b.y0 < a.y1;
  }
  function placeLabels(labels) {
    const kept = [];
    const decisions = [];
    for (const label of labels) {
      const box = labelBox(label.sx, label.sy, label.text);
      const free = !kept.some((other) => overlaps(box, other));
      if (label.required || free) {
        kept.push(box);
        decisions.push(true);
      } else {
        decisions.push(false);
      }
    }
    return decisions;
  }
  function inside(size2, sx, sy) {
    return sx >= 0 && sx <= size2.width && sy >= 0 && sy <= size2.height;
  }
  function render(ctx, size2, points, view, dragRect2 = null) {
    ctx.clearRect(0, 0, size2.width, size2.height);
    if (points === null || view === null) {
      return;
    }
    const neighbors = points.neighbors.map((nb) => {
      const [sx, sy] = dataToScreen(view, size2, nb.x, nb.y);
      return { sx, sy, text: ellipsize(nb.tag) };
    });
    const [qx, qy] = dataToScreen(view, size2, points.x, points.y);
    const labels = [
      { sx: qx, sy: qy, text: points.query, required: true },
      ...neighbors
    ];
    const keep = placeLabels(labels);
    ctx.font = `${LABEL_H - 1}px system-ui, sans-serif`;
    neighbors.forEach((nb, i) => {
      if (!inside(size2, nb.sx, nb.sy)) {
        return;
      }
      ctx.fillStyle = POINT_COLOR;
      ctx.beginPath();
      ctx.arc(nb.sx, nb.sy, MARKER_RADIUS, 0, 2 * Math.PI);
      ctx.fill();
      if (keep[i + 1]) {
        ctx.fillStyle = LABEL_COLOR;
        ctx.fillText(nb.text, nb.sx + LABEL_GAP, nb.sy + LABEL_H / 2 - 2);
      }
    });
    if (inside(size2, qx, qy)) {
      ctx.fillStyle = QUERY_COLOR;
      ctx.beginPath();
      ctx.arc(qx, qy, MARKER_RADIUS, 0, 2 * Math.PI);
      ctx.fill();
      ctx.strokeStyle = QUERY_COLOR;
      ctx.lineWidth = 2;
      ctx.beginPath();
      ctx.arc(qx, qy, QUERY_RING_RADIUS, 0, 2 * Math.PI);
      ctx.stroke();
      ctx.fillStyle = QUERY_COLOR;
      ctx.fillText(points.query, qx + LABEL_GAP, qy + LABEL_H / 2 - 2);
    }
    if (dragRect2 !== null) {
      ctx.strokeStyle = POINT_COLOR;
      ctx.lineWidth = 1;
      ctx.setLineDash([4, 3]);
      ctx.strokeRect(
        Math.min(dragRect2.x0, dragRect2.x1),
        Math.min(dragRect2.y0, dragRect2.y1),
        Math.abs(dragRect2.x1 - dragRect2.x0),
        Math.abs(dragRect2.y1 - dragRect2.y0)
      );
      ctx.setLineDash([]);
    }
  }
  function hitTest(points, view, size2, sx, sy) {
    if (points === null || view === null) {
      return null;
    }
    let best = null;
    let bestD2 = HIT_RADIUS_PX * HIT_RADIUS_PX;
    const candidates = [
      { tag: points.query, similarity: null, x: points.x, y: points.y },
      ...points.neighbors.map((nb) => ({ tag: nb.tag, similarity: nb.similarity, x: nb.x, y: nb.y }))
    ];
    for (const c of candidates) {
      const [px, py] = dataToScreen(view, size2, c.x, c.y);
      const d2 = (px - sx) * (px - sx) + (py - sy) * (py - sy);
      if (d2 <= bestD2) {
        bestD2 = d2;
        best = { tag: c.tag, similarity: c.similarity, sx: px, sy: py };
      }
    }
    return best;
  }

  // src/state.ts
  function initialState() {
    return { query: null, points: null, viewport: null, mode: "idle", banner: null };
  }
  function allPoints(data) {
    return [{ x: data.x, y: data.y }, ...data.neighbors];
  }
  function applyResult(state2, tag, result) {
    switch (result.kind) {
      case "ok":
        return {
          query: result.data.query,
          points: result.data,
          viewport: fitViewport(allPoints(result.data)),
          mode: "idle",
          banner: null
        };
      case "unknown-hashtag":
        return { ...state2, banner: { kind: "warn", text: `unknown hashtag: ${tag}` } };
      case "error":
        return { ...state2, banner: { kind: "error", text: `${result.message} (retry?)` } };
      case "aborted":
        return state2;
    }
  }
  function applyBoxZoom(state2, size2, rect) {
    if (state2.viewport === null) {
      return state2;
    }
    return { ...state2, viewport: boxZoom(state2.viewport, size2, rect) };
  }
  function applyPan(state2, size2, dxPx, dyPx) {
    if (state2.viewport === null) {
      return state2;
    }
    return { ...state2, viewport: pan(state2.viewport, size2, dxPx, dyPx) };
  }
  function applyFit(state2) {
    if (state2.points === null) {
      return state2;
    }
    return { ...state2, viewport: fitViewport(allPoints(state2.points)) };
  }
  function setMode(state2, mode) {
    return state2.mode === mode ? state2 : { ...state2, mode };
  }

  // src/app.ts
  var canvas = document.getElementById("plot");
  var form = document.getElementById("query-form");
  var input = document.getElementById("query-input");
  var bannerEl = document.getElementById("banner");
  var tooltipEl = document.getElementById("tooltip");
  var client = new NeighborsClient();
  var state = initialState();
  var size = { width: 0, height: 0 };
  var dragRect = null;
  var panLast = null;
  function resize() {
    const dpr = window.devicePixelRatio || 1;
    size = { width: canvas.clientWidth, height: canvas.clientHeight };
    canvas.width = Math.round(size.width * dpr);
    canvas.height = Math.round(size.height * dpr);
    const ctx = canvas.getContext("2d");
    ctx?.setTransform(dpr, 0, 0, dpr, 0, 0);
    draw();
  }
  function draw() {
    const ctx = canvas.getContext("2d");
    if (ctx !== null) {
      render(ctx, size, state.points, state.viewport, dragRect);
    }
  }
  function syncBanner() {
    if (state.banner === null) {
      bannerEl.classList.add("hidden");
      bannerEl.textContent = "";
    } else {
      bannerEl.classList.remove("hidden");
      bannerEl.classList.toggle("info", state.banner.kind === "warn");
      bannerEl.textContent = state.banner.text;
    }
  }
  function hideTooltip() {
    tooltipEl.classList.add("hidden");
  }
  function canvasPos(ev) {
    const box = canvas.getBoundingClientRect();
    return [ev.clientX - box.left, ev.clientY - box.top];
  }
  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    const tag = input.value.trim();
    if (tag === "") {
      return;
    }
    void client.submit(tag).then((result) => {
      state = applyResult(state, tag, result);
      syncBanner();
      draw();
    });
  });
  canvas.addEventListener("mousedown", (ev) => {
    if (state.viewport === null) {
      return;
    }
    ev.preventDefault();
    hideTooltip();
    const [sx, sy] = canvasPos(ev);
    if (ev.shiftKey) {
      state = setMode(state, "panning");
      panLast = [sx, sy];
    } else {
      state = setMode(state, "box-select");
      dragRect = { x0: sx, y0: sy, x1: sx, y1: sy };
    }
  });
  canvas.addEventListener("mousemove", (ev) => {
    const [sx, sy] = canvasPos(ev);
    if (state.mode === "panning" && panLast !== null) {
      state = applyPan(state, size, sx - panLast[0], sy - panLast[1]);
      panLast = [sx, sy];
      draw();
    } else if (state.mode === "box-select" && dragRect !== null) {
      dragRect = { ...dragRect, x1: sx, y1: sy };
      draw();
    } else {
      const hit = hitTest(state.points, state.viewport, size, sx, sy);
      if (hit === null) {
        hideTooltip();
      } else {
        tooltipEl.textContent = hit.similarity === null ? `${hit.tag} (query)` : `${hit.tag}  sim ${hit.similarity.toFixed(4)}`;
        tooltipEl.style.left = `${hit.sx + 12}px`;
        tooltipEl.style.top = `${hit.sy + 12}px`;
        tooltipEl.classList.remove("hidden");
      }
    }
  });
  function finishInteraction() {
    if (state.mode === "box-select" && dragRect !== null) {
      state = applyBoxZoom(state, size, dragRect);
    }
    dragRect = null;
    panLast = null;
    state = setMode(state, "idle");
    draw();
  }
  canvas.addEventListener("mouseup", finishInteraction);
  canvas.addEventListener("mouseleave", () => {
    hideTooltip();
    if (state.mode !== "idle") {
      finishInteraction();
    }
  });
  canvas.addEventListener("dblclick", () => {
    state = applyFit(state);
    draw();
  });
  window.addEventListener("resize", resize);
  resize();
  input.focus();
  void client.healthy().then((ok) => {
    if (!ok) {
      state = {
        ...state,
        banner: { kind: "error", text: "service is not ready yet, retry shortly" }
      };
      syncBanner();
    }
  });
})();
