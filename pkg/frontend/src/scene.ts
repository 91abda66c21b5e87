/**
 * three.js view of the hand: capsules per link, draggable keypoint targets,
 * robot keypoint markers, and the per-pair risk overlay.
 */

import * as THREE from "three";

import { forwardKinematics, transform } from "./kinematics";
import { classifyClearance, RISK_RGB, Thresholds } from "./overlay";
import { ModelMessage, PairClearance, Vec3 } from "./protocol";

const TARGET_RADIUS = 0.004;
const MARKER_RADIUS = 0.002;

export class HandScene {
  readonly scene = new THREE.Scene();
  readonly camera: THREE.PerspectiveCamera;
  readonly targets: THREE.Mesh[] = [];

  private capsuleMeshes: { mesh: THREE.Mesh; capsule: number }[] = [];
  private markerMeshes: THREE.Mesh[] = [];
  private pairLines: THREE.Line[] = [];
  private capsuleMidpoints: Vec3[] = [];

  constructor(private readonly model: ModelMessage, aspect: number) {
    this.camera = new THREE.PerspectiveCamera(40, aspect, 0.01, 10);
    this.camera.position.set(0.25, -0.18, 0.18);
    this.camera.up.set(0, 0, 1);
    this.camera.lookAt(0.08, 0, -0.02);

    this.scene.background = new THREE.Color(0x10141a);
    this.scene.add(new THREE.AmbientLight(0xffffff, 0.55));
    const key = new THREE.DirectionalLight(0xffffff, 1.4);
    key.position.set(0.5, -0.6, 0.8);
    this.scene.add(key);
    this.scene.add(new THREE.AxesHelper(0.05));

    for (let c = 0; c < model.capsules.length; c++) {
      const spec = model.capsules[c];
      const len = dist(spec.a, spec.b);
      const geo = new THREE.CapsuleGeometry(spec.radius, len, 6, 14);
      const mat = new THREE.MeshStandardMaterial({
        color: 0x8899aa,
        roughness: 0.55,
      });
      const mesh = new THREE.Mesh(geo, mat);
      this.scene.add(mesh);
      this.capsuleMeshes.push({ mesh, capsule: c });
      this.capsuleMidpoints.push([0, 0, 0]);
    }

    for (let i = 0; i < model.keypoints.length; i++) {
      const target = new THREE.Mesh(
        new THREE.SphereGeometry(TARGET_RADIUS, 14, 10),
        new THREE.MeshStandardMaterial({ color: 0xff8c42, roughness: 0.3 }),
      );
      target.userData.keypoint = i;
      this.scene.add(target);
      this.targets.push(target);

      const marker = new THREE.Mesh(
        new THREE.SphereGeometry(MARKER_RADIUS, 10, 8),
        new THREE.MeshStandardMaterial({
          color: 0x55bbff,
          emissive: 0x113355,
        }),
      );
      this.scene.add(marker);
      this.markerMeshes.push(marker);
    }

    for (const _pair of model.collision_pairs) {
      const geo = new THREE.BufferGeometry().setFromPoints([
        new THREE.Vector3(),
        new THREE.Vector3(),
      ]);
      const line = new THREE.Line(
        geo,
        new THREE.LineBasicMaterial({ color: RISK_RGB.green }),
      );
      this.scene.add(line);
      this.pairLines.push(line);
    }
  }

  /** Place every capsule from the configuration. */
  setConfiguration(q: number[]): void {
    const poses = forwardKinematics(this.model, q);
    for (const { mesh, capsule } of this.capsuleMeshes) {
      const spec = this.model.capsules[capsule];
      const pose = poses.get(spec.link)!;
      const a = transform(pose, spec.a);
      const b = transform(pose, spec.b);
      const mid: Vec3 = [(a[0] + b[0]) / 2, (a[1] + b[1]) / 2, (a[2] + b[2]) / 2];
      mesh.position.set(mid[0], mid[1], mid[2]);
      const axis = new THREE.Vector3(b[0] - a[0], b[1] - a[1], b[2] - a[2]);
      if (axis.lengthSq() < 1e-16) {
        mesh.quaternion.identity();
      } else {
        mesh.quaternion.setFromUnitVectors(
          new THREE.Vector3(0, 1, 0),
          axis.normalize(),
        );
      }
      this.capsuleMidpoints[capsule] = mid;
    }
  }

  setRobotKeypoints(kp: Vec3[]): void {
    for (let i = 0; i < Math.min(kp.length, this.markerMeshes.length); i++) {
      this.markerMeshes[i].position.set(kp[i][0], kp[i][1], kp[i][2]);
    }
  }

  setTargets(kp: Vec3[]): void {
    for (let i = 0; i < Math.min(kp.length, this.targets.length); i++) {
      this.targets[i].position.set(kp[i][0], kp[i][1], kp[i][2]);
    }
  }

  targetPositions(): Vec3[] {
    return this.targets.map((m) => [m.position.x, m.position.y, m.position.z]);
  }

  /** Color each monitored pair's tether by clearance; bold when active. */
  setOverlay(entries: PairClearance[], thresholds: Thresholds): void {
    for (let k = 0; k < entries.length && k < this.pairLines.length; k++) {
      const { pair, h, active } = entries[k];
      const color = RISK_RGB[classifyClearance(h, thresholds)];
      const line = this.pairLines[k];
      (line.material as THREE.LineBasicMaterial).color.setHex(color);
      (line.material as THREE.LineBasicMaterial).transparent = !active;
      (line.material as THREE.LineBasicMaterial).opacity = active ? 1.0 : 0.45;
      const a = this.capsuleMidpoints[pair[0]];
      const b = this.capsuleMidpoints[pair[1]];
      line.geometry.setFromPoints([
        new THREE.Vector3(a[0], a[1], a[2]),
        new THREE.Vector3(b[0], b[1], b[2]),
      ]);
    }
  }
}

function dist(a: Vec3, b: Vec3): number {
  const dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return Math.sqrt(dx * dx + dy * dy + dz * dz);
}
