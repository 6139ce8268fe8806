/** Shared types mirroring the annotation service's wire formats. */

export type Plane = 'axial' | 'coronal' | 'sagittal';

export type BrushMode = 'navigate' | 'add' | 'delete' | 'seed-left' | 'seed-right';

export interface SessionDescriptor {
  session_id: string;
  dims: [number, number, number];
  spacing: [number, number, number];
  hu_min: number;
  hu_max: number;
}

export interface VolumesMl {
  left: number;
  right: number;
  combined: number;
}

export interface SeedOut {
  side: 'left' | 'right';
  voxel: [number, number, number];
  hu: number;
}

export interface SegmentParams {
  mean: number;
  sigma: number;
  theta: number;
  adjacency: 6 | 26;
}

export interface SegmentResponse {
  volumes_ml: VolumesMl;
  seeds: SeedOut[];
  elapsed_ms: number;
}

export interface StrokePayload {
  plane: Plane;
  slice_index: number;
  points: Array<[number, number]>;
  radius_px: number;
  mode: Exclude<BrushMode, 'navigate'>;
}

export interface StrokeResponse {
  changed: number;
  volume_ml: number;
  seeds?: { left: number; right: number };
}

export interface UndoResponse {
  changed: number;
  volume_ml: number;
}

export interface ErrorPayload {
  code: string;
  message: string;
  side?: 'left' | 'right';
  hint?: string;
}

export interface BrushState {
  mode: BrushMode;
  radiusPx: number;
}

export interface ViewportState {
  plane: Plane;
  sliceIndex: number;
  windowCenter: number;
  windowWidth: number;
  zoom: number;
  panX: number;
  panY: number;
  overlayOn: boolean;
}

export const DEFAULT_WINDOW_CENTER = -500;
export const DEFAULT_WINDOW_WIDTH = 1400;

export const DEFAULT_PARAMS: SegmentParams = {
  mean: -550,
  sigma: 150,
  theta: 0.5,
  adjacency: 6,
};

export const MAX_BRUSH_RADIUS = 64;
