/**
 * Canvas viewport renderer: inverse perspective projection sampling from an
 * equirectangular source (video element or per-second frame images).
 */

import { Vec3 } from "./geometry";

const DEG = Math.PI / 180;

export class ViewportRenderer {
  private readonly ctx: CanvasRenderingContext2D;
  private readonly out: ImageData;
  private rays: Float32Array; // unit ray per output pixel, camera frame
  private source = document.createElement("canvas");
  private readonly sourceCtx: CanvasRenderingContext2D;

  constructor(
    private readonly canvas: HTMLCanvasElement,
    private hFovDeg = 120,
    private vFovDeg = 90,
  ) {
    const ctx = canvas.getContext("2d");
    if (!ctx) throw new Error("2d canvas context unavailable");
    this.ctx = ctx;
    this.out = ctx.createImageData(canvas.width, canvas.height);
    this.rays = this.buildRays();
    this.sourceCtx = this.source.getContext("2d", { willReadFrequently: true })!;
  }

  setFov(hFovDeg: number, vFovDeg: number): void {
    if (hFovDeg === this.hFovDeg && vFovDeg === this.vFovDeg) return;
    this.hFovDeg = hFovDeg;
    this.vFovDeg = vFovDeg;
    this.rays = this.buildRays();
  }

  private buildRays(): Float32Array {
    const { width, height } = this.canvas;
    const rays = new Float32Array(width * height * 3);
    const tanH = Math.tan((this.hFovDeg / 2) * DEG);
    const tanV = Math.tan((this.vFovDeg / 2) * DEG);
    let k = 0;
    for (let j = 0; j < height; j++) {
      const up = -((j + 0.5) / height - 0.5) * 2 * tanV;
      for (let i = 0; i < width; i++) {
        const right = ((i + 0.5) / width - 0.5) * 2 * tanH;
        const norm = Math.sqrt(1 + right * right + up * up);
        rays[k++] = 1 / norm; // forward
        rays[k++] = right / norm;
        rays[k++] = up / norm;
      }
    }
    return rays;
  }

  /** Draw the viewport centered on `center` from an equirectangular frame. */
  render(frame: CanvasImageSource, frameW: number, frameH: number, center: Vec3): void {
    if (this.source.width !== frameW || this.source.height !== frameH) {
      this.source.width = frameW;
      this.source.height = frameH;
    }
    this.sourceCtx.drawImage(frame, 0, 0, frameW, frameH);
    const src = this.sourceCtx.getImageData(0, 0, frameW, frameH).data;

    const yaw = Math.atan2(center[1], center[0]);
    const pitch = Math.asin(Math.min(1, Math.max(-1, center[2])));
    const cy = Math.cos(pitch);
    const sy = Math.sin(pitch);
    const cz = Math.cos(yaw);
    const sz = Math.sin(yaw);

    const data = this.out.data;
    const rays = this.rays;
    const n = this.canvas.width * this.canvas.height;
    for (let p = 0, k = 0; p < n; p++, k += 3) {
      // camera ray (forward, right, up) -> world: pitch about y, then yaw about z
      const f = rays[k];
      const r = rays[k + 1];
      const u = rays[k + 2];
      const x1 = cy * f - sy * u;
      const z1 = sy * f + cy * u;
      const wx = cz * x1 - sz * r;
      const wy = sz * x1 + cz * r;
      const wz = z1;
      const lon = Math.atan2(wy, wx); // yaw in [-pi, pi)
      const lat = Math.asin(Math.min(1, Math.max(-1, wz)));
      let sx = Math.floor((lon / (2 * Math.PI) + 0.5) * frameW);
      let sy2 = Math.floor((0.5 - lat / Math.PI) * frameH);
      sx = Math.min(frameW - 1, Math.max(0, sx));
      sy2 = Math.min(frameH - 1, Math.max(0, sy2));
      const s = (sy2 * frameW + sx) * 4;
      const d = p * 4;
      data[d] = src[s];
      data[d + 1] = src[s + 1];
      data[d + 2] = src[s + 2];
      data[d + 3] = 255;
    }
    this.ctx.putImageData(this.out, 0, 0);
  }
}
