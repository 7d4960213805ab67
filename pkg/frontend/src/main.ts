// Dashboard entry point: WebSocket wiring, DOM bindings, render loop.

import { drawStrip } from "./charts.js";
import { ForceCommander } from "./commands.js";
import { parseServerMessage } from "./protocol.js";
import { drawRobotView } from "./robot_view.js";
import { SessionView } from "./state.js";

const view = new SessionView(900);
const commander = new ForceCommander();

const $ = (id: string) => document.getElementById(id)!;
const canvasRobot = $("robot") as HTMLCanvasElement;
const canvasOmega = $("omega") as HTMLCanvasElement;
const canvasDelta = $("delta") as HTMLCanvasElement;
const canvasForce = $("force") as HTMLCanvasElement;
const canvasZ = $("posez") as HTMLCanvasElement;

const sliderIds = ["fx", "fz", "my", "mz"] as const;
const sliders = sliderIds.map((id) => $(id) as HTMLInputElement);
const readouts = sliderIds.map((id) => $(`${id}-value`) as HTMLElement);

let ws: WebSocket | null = null;
let lastFrameArrival = 0;

function connect(): void {
  const url = `${location.protocol === "https:" ? "wss" : "ws"}://${location.host}/ws?role=pilot`;
  ws = new WebSocket(url);
  ws.onopen = () => {
    view.connection = "connecting"; // live once hello arrives
  };
  ws.onmessage = (event) => {
    const message = parseServerMessage(String(event.data));
    if (!message) return;
    view.apply(message);
    if (message.type === "telemetry") lastFrameArrival = performance.now();
  };
  ws.onclose = () => {
    view.markClosed();
    setTimeout(connect, 1500);
  };
  ws.onerror = () => {
    // onclose follows and handles the retry
  };
}

function sliderValues(): number[] {
  return sliders.map((s) => Number(s.value));
}

sliders.forEach((slider, i) => {
  slider.addEventListener("input", () => {
    readouts[i].textContent = Number(slider.value).toFixed(1);
    commander.update(sliderValues());
  });
});

($("release") as HTMLButtonElement).addEventListener("click", () => {
  sliders.forEach((s, i) => {
    s.value = "0";
    readouts[i].textContent = "0.0";
  });
  commander.releaseToZero();
});

($("pause") as HTMLButtonElement).addEventListener("click", () => {
  ws?.send(JSON.stringify({ type: view.paused ? "resume" : "pause" }));
});

($("reset") as HTMLButtonElement).addEventListener("click", () => {
  ws?.send(JSON.stringify({ type: "reset" }));
  view.resetBuffers();
});

function renderBadges(): void {
  const badge = $("badge-avoidance");
  badge.classList.toggle("lit", view.avoidanceActive);
  const alarm = $("badge-breach");
  alarm.classList.toggle("alarm", view.breachAlarm);
  const conn = $("badge-connection");
  conn.textContent = view.connection + (view.paused ? " (paused)" : "");
  conn.className = `badge conn-${view.connection}`;
  $("banner").classList.toggle(
    "hidden",
    !view.schemaMismatch && view.lastError === null
  );
  if (view.schemaMismatch) {
    $("banner").textContent =
      "schema version mismatch: update the dashboard; rendering stopped";
  } else if (view.lastError) {
    $("banner").textContent = `server: ${view.lastError}`;
  }
  const pairInfo = view.latest
    ? `pair ${view.latest.pair}  min ref ${view.latest.min_omega_ref.toFixed(2)}°  min meas ${view.latest.min_omega_meas.toFixed(2)}°`
    : "";
  $("pair-info").textContent = pairInfo;
}

function renderFrame(): void {
  // Outgoing: at most one force command per animation frame.
  const command = commander.flush();
  if (command && ws && ws.readyState === WebSocket.OPEN) {
    ws.send(JSON.stringify(command));
  }
  if (performance.now() - lastFrameArrival > 500) view.markStale();

  drawRobotView(canvasRobot, view.latest, view.avoidanceActive, view.breachAlarm);
  drawStrip(
    canvasOmega,
    [
      { buffer: view.minOmegaRef, color: "#69d2e7", label: "min omega (reference)" },
      { buffer: view.minOmegaMeas, color: "#ffb347", label: "min omega (measured)", dashed: true },
    ],
    {
      yMin: 0.05,
      yMax: 96,
      logFloor: 0.05,
      yLabel: "deg (log)",
      guideline: { value: view.omegaLimit, color: "#ff5566", label: "limit" },
    }
  );
  drawStrip(
    canvasDelta,
    view.deltaSteps.map((buffer, i) => ({
      buffer,
      color: ["#9bc53d", "#69d2e7", "#c77dff", "#ffb347"][i],
      label: `actuator ${i + 1}`,
    })),
    { yLabel: "deviation steps" }
  );
  drawStrip(
    canvasForce,
    view.forces.map((buffer, i) => ({
      buffer,
      color: ["#9bc53d", "#69d2e7", "#c77dff", "#ffb347"][i],
      label: ["Fx [N]", "Fz [N]", "My [N·m]", "Mz [N·m]"][i],
    })),
    { yLabel: "patient force" }
  );
  drawStrip(
    canvasZ,
    [{ buffer: view.poseZ, color: "#e8eef4", label: "platform z [m]" }],
    { yLabel: "m" }
  );
  renderBadges();
  requestAnimationFrame(renderFrame);
}

connect();
requestAnimationFrame(renderFrame);
