/**
 * Pointer-gesture assembly: one continuous drag becomes one stroke.
 *
 * Screen positions map back through the viewport transform to slice pixels
 * and are sent as integers, so the server stamps exactly the voxels the
 * brush preview covered (the server treats integer points as-is).
 */

import { screenToSlice, type ViewTransform } from './coords';
import type { BrushMode, Plane, StrokePayload } from './types';

export class GestureBuilder {
  private points: Array<[number, number]> = [];

  constructor(
    readonly plane: Plane,
    readonly sliceIndex: number,
    readonly mode: Exclude<BrushMode, 'navigate'>,
    readonly radiusPx: number,
  ) {}

  /** Add one pointer sample (screen coordinates relative to the viewport). */
  add(screenX: number, screenY: number, t: ViewTransform): void {
    const { u, v } = screenToSlice(t, screenX, screenY);
    const point: [number, number] = [Math.round(u), Math.round(v)];
    const last = this.points[this.points.length - 1];
    if (last && last[0] === point[0] && last[1] === point[1]) {
      return;
    }
    this.points.push(point);
  }

  get isEmpty(): boolean {
    return this.points.length === 0;
  }

  /** The slice-pixel trace collected so far (for live feedback drawing). */
  trace(): ReadonlyArray<[number, number]> {
    return this.points;
  }

  finish(): StrokePayload | null {
    if (this.points.length === 0) {
      return null;
    }
    return {
      plane: this.plane,
      slice_index: this.sliceIndex,
      points: this.points,
      radius_px: this.radiusPx,
      mode: this.mode,
    };
  }
}

/** Disc footprint of a single-point stroke, for the brush preview; matches
 * the server's rasterization of integer points exactly. */
export function discFootprint(radiusPx: number): Array<[number, number]> {
  const out: Array<[number, number]> = [];
  for (let du = 0 - radiusPx; du <= radiusPx; du++) {
    for (let dv = 0 - radiusPx; dv <= radiusPx; dv++) {
      if (du * du + dv * dv <= radiusPx * radiusPx) {
        out.push([du, dv]);
      }
    }
  }
  return out;
}
