/**
 * Composition root: connect to the session service, build the scene from the
 * model message, and run the render loop. Dragging a keypoint target streams
 * coalesced frames; each returned state repositions the hand and recolors
 * the safety overlay.
 */

import * as THREE from "three";

import { FrameCoalescer } from "./coalescer";
import { SessionConnection } from "./connection";
import { intersectDragPlane } from "./drag";
import { clampConfiguration, forwardKinematics, transform } from "./kinematics";
import { formatClearance, minClearance } from "./overlay";
import { buildPanel } from "./panel";
import {
  encodeFrame,
  ModelMessage,
  StateMessage,
  Vec3,
} from "./protocol";
import { HandScene } from "./scene";

const SEND_RATE_HZ = 60;
const DEFAULT_THRESHOLDS = { safety: 0.01, activation: 0.011 };

const params = new URLSearchParams(window.location.search);
const url = params.get("ws") ?? "ws://127.0.0.1:8765";

const renderer = new THREE.WebGLRenderer({ antialias: true });
renderer.setSize(window.innerWidth, window.innerHeight);
document.body.appendChild(renderer.domElement);

const connection = new SessionConnection(url);
const panel = buildPanel({
  send: (encoded) => connection.send(encoded),
  reconnect: () => connection.connect(),
});
document.body.appendChild(panel.root);
connection.onStatus = (s) => {
  panel.status.textContent = s;
  panel.status.dataset.state = s;
};

let scene: HandScene | null = null;
let frameClock = 0;

const coalescer = new FrameCoalescer<Vec3[]>(1 / SEND_RATE_HZ, (kp) => {
  frameClock += 1 / SEND_RATE_HZ;
  connection.send(encodeFrame(frameClock, kp));
});

function buildScene(msg: ModelMessage): void {
  scene = new HandScene(msg, window.innerWidth / window.innerHeight);
  const q0 = clampConfiguration(msg, new Array(msg.joints.length).fill(0));
  const poses = forwardKinematics(msg, q0);
  scene.setConfiguration(q0);
  scene.setTargets(
    msg.keypoints.map((k) => transform(poses.get(k.link)!, k.offset)),
  );
  coalescer.reset();
  attachDragHandlers();
}

function applyState(state: StateMessage): void {
  if (!scene) return;
  scene.setConfiguration(state.q);
  scene.setRobotKeypoints(state.kp_robot);
  scene.setOverlay(state.h, DEFAULT_THRESHOLDS);
  const worst = minClearance(state.h);
  panel.readout.textContent =
    worst === null
      ? "h_min: --"
      : `h_min: ${formatClearance(worst.h)}  [${worst.pair}]  ` +
        `${(state.latency_s * 1e3).toFixed(2)} ms  ${state.qp_status}`;
}

// ---------------------------------------------------------------------------
// dragging
// ---------------------------------------------------------------------------
const raycaster = new THREE.Raycaster();
let dragging: { target: THREE.Mesh; grab: Vec3 } | null = null;

function pointerRay(ev: PointerEvent): { origin: Vec3; dir: Vec3 } {
  const ndc = new THREE.Vector2(
    (ev.clientX / window.innerWidth) * 2 - 1,
    -(ev.clientY / window.innerHeight) * 2 + 1,
  );
  raycaster.setFromCamera(ndc, scene!.camera);
  const o = raycaster.ray.origin, d = raycaster.ray.direction;
  return { origin: [o.x, o.y, o.z], dir: [d.x, d.y, d.z] };
}

function attachDragHandlers(): void {
  const dom = renderer.domElement;
  dom.onpointerdown = (ev: PointerEvent) => {
    if (!scene) return;
    const { origin, dir } = pointerRay(ev);
    raycaster.set(
      new THREE.Vector3(...origin),
      new THREE.Vector3(...dir),
    );
    const hits = raycaster.intersectObjects(scene.targets, false);
    if (hits.length > 0) {
      const target = hits[0].object as THREE.Mesh;
      dragging = {
        target,
        grab: [target.position.x, target.position.y, target.position.z],
      };
      dom.setPointerCapture(ev.pointerId);
    }
  };
  dom.onpointermove = (ev: PointerEvent) => {
    if (!dragging || !scene) return;
    const { origin, dir } = pointerRay(ev);
    const normal = new THREE.Vector3();
    scene.camera.getWorldDirection(normal);
    const hit = intersectDragPlane(origin, dir, dragging.grab, [
      normal.x,
      normal.y,
      normal.z,
    ]);
    if (hit) {
      dragging.target.position.set(hit[0], hit[1], hit[2]);
      coalescer.offer(scene.targetPositions(), performance.now() / 1000);
    }
  };
  const release = () => {
    dragging = null;
  };
  dom.onpointerup = release;
  dom.onpointercancel = () => {
    release();
    coalescer.reset(); // mid-drag disconnects discard pending frames
  };
}

// ---------------------------------------------------------------------------
// render loop: latest-wins per message type, one apply per tick
// ---------------------------------------------------------------------------
function tick(): void {
  requestAnimationFrame(tick);
  const modelMsg = connection.mailbox.take("model");
  if (modelMsg && modelMsg.type === "model") buildScene(modelMsg);
  const stateMsg = connection.mailbox.take("state");
  if (stateMsg && stateMsg.type === "state") applyState(stateMsg);
  const errMsg = connection.mailbox.take("error");
  if (errMsg && errMsg.type === "error") console.warn("server:", errMsg.msg);
  coalescer.tick(performance.now() / 1000);
  if (scene) renderer.render(scene.scene, scene.camera);
}

window.onresize = () => {
  renderer.setSize(window.innerWidth, window.innerHeight);
  if (scene) {
    scene.camera.aspect = window.innerWidth / window.innerHeight;
    scene.camera.updateProjectionMatrix();
  }
};

connection.connect();
tick();
