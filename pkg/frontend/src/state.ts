/** Application state: session, three viewports, brush, crosshair, seeds. */

import { clampSliceIndex, PLANES } from './coords';
import type {
  BrushState,
  Plane,
  SessionDescriptor,
  ViewportState,
} from './types';
import { DEFAULT_WINDOW_CENTER, DEFAULT_WINDOW_WIDTH, MAX_BRUSH_RADIUS } from './types';

export function initialViewport(plane: Plane, dims: readonly number[]): ViewportState {
  return {
    plane,
    sliceIndex: clampSliceIndex(Math.floor(sliceCountOf(dims, plane) / 2), dims, plane),
    windowCenter: DEFAULT_WINDOW_CENTER,
    windowWidth: DEFAULT_WINDOW_WIDTH,
    zoom: 1,
    panX: 0,
    panY: 0,
    overlayOn: true,
  };
}

function sliceCountOf(dims: readonly number[], plane: Plane): number {
  return plane === 'axial' ? dims[2]! : plane === 'coronal' ? dims[1]! : dims[0]!;
}

export class AppState {
  session: SessionDescriptor | null = null;
  viewports = new Map<Plane, ViewportState>();
  brush: BrushState = { mode: 'navigate', radiusPx: 4 };
  crosshair: [number, number, number] = [0, 0, 0];
  seedCounts = { left: 0, right: 0 };
  /** bumped after every mask mutation so slice URLs bypass the image cache */
  maskRevision = 0;

  openSession(descriptor: SessionDescriptor): void {
    this.session = descriptor;
    this.viewports.clear();
    for (const plane of PLANES) {
      this.viewports.set(plane, initialViewport(plane, descriptor.dims));
    }
    this.crosshair = [
      Math.floor(descriptor.dims[0] / 2),
      Math.floor(descriptor.dims[1] / 2),
      Math.floor(descriptor.dims[2] / 2),
    ];
    this.seedCounts = { left: 0, right: 0 };
    this.maskRevision = 0;
  }

  viewport(plane: Plane): ViewportState {
    const state = this.viewports.get(plane);
    if (!state) {
      throw new Error(`no viewport for ${plane}; open a session first`);
    }
    return state;
  }

  setBrushRadius(radiusPx: number): void {
    this.brush.radiusPx = Math.min(Math.max(Math.round(radiusPx), 0), MAX_BRUSH_RADIUS);
  }

  /** Move the shared crosshair; every viewport follows on its own axis. */
  setCrosshair(voxel: [number, number, number]): void {
    if (!this.session) {
      return;
    }
    const dims = this.session.dims;
    this.crosshair = [
      Math.min(Math.max(voxel[0], 0), dims[0] - 1),
      Math.min(Math.max(voxel[1], 0), dims[1] - 1),
      Math.min(Math.max(voxel[2], 0), dims[2] - 1),
    ];
    this.viewport('axial').sliceIndex = this.crosshair[2];
    this.viewport('coronal').sliceIndex = this.crosshair[1];
    this.viewport('sagittal').sliceIndex = this.crosshair[0];
  }

  stepSlice(plane: Plane, delta: number): void {
    if (!this.session) {
      return;
    }
    const view = this.viewport(plane);
    view.sliceIndex = clampSliceIndex(view.sliceIndex + delta, this.session.dims, plane);
  }
}
