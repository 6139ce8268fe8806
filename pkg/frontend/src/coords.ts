/**
 * Coordinate mapping between screen pixels, slice pixels, and voxels.
 *
 * A slice is addressed by two in-plane axes (u, v): axial uses (x, y),
 * coronal (x, z), sagittal (y, z). On screen the slice is scaled by zoom
 * horizontally and zoom * aspect vertically, where aspect = spacing_v /
 * spacing_u, so anisotropic voxels display with true proportions.
 */

import type { Plane, ViewportState } from './types';

/** Volume axis that a plane's slice index walks along. */
export const PLANE_AXIS: Record<Plane, 0 | 1 | 2> = {
  axial: 2,
  coronal: 1,
  sagittal: 0,
};

/** The two volume axes spanning a plane's slice, in (u, v) order. */
export const PLANE_UV: Record<Plane, [number, number]> = {
  axial: [0, 1],
  coronal: [0, 2],
  sagittal: [1, 2],
};

export const PLANES: Plane[] = ['axial', 'coronal', 'sagittal'];

export interface SliceShape {
  width: number;
  height: number;
  sliceCount: number;
}

export function sliceShape(dims: readonly number[], plane: Plane): SliceShape {
  const [u, v] = PLANE_UV[plane];
  return {
    width: dims[u]!,
    height: dims[v]!,
    sliceCount: dims[PLANE_AXIS[plane]]!,
  };
}

/** Display aspect: how much taller one slice pixel is than it is wide. */
export function planeAspect(spacing: readonly number[], plane: Plane): number {
  const [u, v] = PLANE_UV[plane];
  return spacing[v]! / spacing[u]!;
}

export interface ViewTransform {
  zoom: number;
  panX: number;
  panY: number;
  aspect: number;
}

export function viewTransform(state: ViewportState, spacing: readonly number[]): ViewTransform {
  return {
    zoom: state.zoom,
    panX: state.panX,
    panY: state.panY,
    aspect: planeAspect(spacing, state.plane),
  };
}

export function sliceToScreen(
  t: ViewTransform,
  u: number,
  v: number,
): { x: number; y: number } {
  return { x: u * t.zoom + t.panX, y: v * t.zoom * t.aspect + t.panY };
}

export function screenToSlice(
  t: ViewTransform,
  x: number,
  y: number,
): { u: number; v: number } {
  return { u: (x - t.panX) / t.zoom, v: (y - t.panY) / (t.zoom * t.aspect) };
}

/** Voxel under an in-plane pixel of the given slice. */
export function sliceToVoxel(
  plane: Plane,
  sliceIndex: number,
  u: number,
  v: number,
): [number, number, number] {
  const voxel: [number, number, number] = [0, 0, 0];
  const [ua, va] = PLANE_UV[plane];
  voxel[PLANE_AXIS[plane]] = sliceIndex;
  voxel[ua] = u;
  voxel[va] = v;
  return voxel;
}

/** In-plane pixel plus slice index of a voxel viewed through a plane. */
export function voxelToSlice(
  plane: Plane,
  voxel: readonly [number, number, number],
): { u: number; v: number; sliceIndex: number } {
  const [ua, va] = PLANE_UV[plane];
  return { u: voxel[ua]!, v: voxel[va]!, sliceIndex: voxel[PLANE_AXIS[plane]] };
}

export function clampSliceIndex(
  index: number,
  dims: readonly number[],
  plane: Plane,
): number {
  const count = dims[PLANE_AXIS[plane]]!;
  return Math.min(Math.max(Math.round(index), 0), count - 1);
}
