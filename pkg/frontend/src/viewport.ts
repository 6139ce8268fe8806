/**
 * One canvas viewport: draws the server-rendered slice PNG (scaled for voxel
 * anisotropy), the crosshair, the brush cursor, and live stroke feedback.
 * All mask state lives on the server; every edit triggers a slice re-fetch.
 */

import type { AnnotationApi } from './api';
import {
  screenToSlice,
  sliceShape,
  sliceToVoxel,
  viewTransform,
  voxelToSlice,
  type ViewTransform,
} from './coords';
import { GestureBuilder } from './gesture';
import type { AppState } from './state';
import type { Plane, StrokePayload } from './types';

const STROKE_COLORS: Record<string, string> = {
  add: 'rgba(0, 200, 80, 0.9)',
  delete: 'rgba(230, 40, 40, 0.9)',
  'seed-left': 'rgba(80, 160, 255, 0.9)',
  'seed-right': 'rgba(255, 170, 40, 0.9)',
};

export interface ViewportCallbacks {
  onStroke: (stroke: StrokePayload) => void;
  onCrosshair: (voxel: [number, number, number]) => void;
}

export class SliceViewport {
  readonly canvas: HTMLCanvasElement;
  private readonly ctx: CanvasRenderingContext2D;
  private image = new Image();
  private imageReady = false;
  private gesture: GestureBuilder | null = null;
  private cursor: { x: number; y: number } | null = null;
  private lastUrl = '';

  constructor(
    readonly plane: Plane,
    private readonly state: AppState,
    private readonly api: AnnotationApi,
    private readonly callbacks: ViewportCallbacks,
    container: HTMLElement,
  ) {
    this.canvas = document.createElement('canvas');
    this.canvas.className = 'viewport-canvas';
    container.appendChild(this.canvas);
    const ctx = this.canvas.getContext('2d');
    if (!ctx) {
      throw new Error('2d canvas context unavailable');
    }
    this.ctx = ctx;
    this.image.onload = () => {
      this.imageReady = true;
      this.draw();
    };
    this.bindPointerEvents();
  }

  private transform(): ViewTransform {
    const session = this.state.session!;
    return viewTransform(this.state.viewport(this.plane), session.spacing);
  }

  /** Re-request the slice PNG if the view or mask changed, then repaint. */
  refresh(): void {
    const session = this.state.session;
    if (!session) {
      return;
    }
    const view = this.state.viewport(this.plane);
    const shape = sliceShape(session.dims, this.plane);
    const t = this.transform();
    this.canvas.width = Math.max(1, Math.round(shape.width * t.zoom));
    this.canvas.height = Math.max(1, Math.round(shape.height * t.zoom * t.aspect));

    const url = this.api.sliceUrl(
      session.session_id,
      this.plane,
      view.sliceIndex,
      view.windowCenter,
      view.windowWidth,
      view.overlayOn,
      this.state.maskRevision,
    );
    if (url !== this.lastUrl) {
      this.lastUrl = url;
      this.imageReady = false;
      this.image.src = url;
    } else {
      this.draw();
    }
  }

  private draw(): void {
    const session = this.state.session;
    if (!session) {
      return;
    }
    const t = this.transform();
    this.ctx.fillStyle = '#000';
    this.ctx.fillRect(0, 0, this.canvas.width, this.canvas.height);
    if (this.imageReady) {
      this.ctx.imageSmoothingEnabled = t.zoom < 1;
      this.ctx.drawImage(this.image, 0, 0, this.canvas.width, this.canvas.height);
    }
    this.drawCrosshair(t);
    this.drawGesture(t);
    this.drawBrushCursor(t);
  }

  private drawCrosshair(t: ViewTransform): void {
    const { u, v } = voxelToSlice(this.plane, this.state.crosshair);
    const x = (u + 0.5) * t.zoom;
    const y = (v + 0.5) * t.zoom * t.aspect;
    this.ctx.strokeStyle = 'rgba(255, 255, 0, 0.5)';
    this.ctx.lineWidth = 1;
    this.ctx.beginPath();
    this.ctx.moveTo(x, 0);
    this.ctx.lineTo(x, this.canvas.height);
    this.ctx.moveTo(0, y);
    this.ctx.lineTo(this.canvas.width, y);
    this.ctx.stroke();
  }

  private drawGesture(t: ViewTransform): void {
    if (!this.gesture || this.gesture.isEmpty) {
      return;
    }
    const color = STROKE_COLORS[this.gesture.mode] ?? 'white';
    this.ctx.strokeStyle = color;
    this.ctx.fillStyle = color;
    this.ctx.lineCap = 'round';
    this.ctx.lineJoin = 'round';
    this.ctx.lineWidth = Math.max(1, (2 * this.gesture.radiusPx + 1) * t.zoom);
    const trace = this.gesture.trace();
    this.ctx.beginPath();
    trace.forEach(([u, v], i) => {
      const x = (u + 0.5) * t.zoom;
      const y = (v + 0.5) * t.zoom * t.aspect;
      if (i === 0) {
        this.ctx.moveTo(x, y);
      } else {
        this.ctx.lineTo(x, y);
      }
    });
    if (trace.length === 1) {
      const [u, v] = trace[0]!;
      const r = Math.max(0.5, (this.gesture.radiusPx + 0.5) * t.zoom);
      this.ctx.arc((u + 0.5) * t.zoom, (v + 0.5) * t.zoom * t.aspect, r, 0, 2 * Math.PI);
      this.ctx.fill();
    } else {
      this.ctx.stroke();
    }
  }

  private drawBrushCursor(t: ViewTransform): void {
    if (!this.cursor || this.state.brush.mode === 'navigate') {
      return;
    }
    // preview radius equals radius_px at zoom 1 and scales with zoom
    const radius = (this.state.brush.radiusPx + 0.5) * t.zoom;
    this.ctx.strokeStyle = STROKE_COLORS[this.state.brush.mode] ?? 'white';
    this.ctx.lineWidth = 1;
    this.ctx.beginPath();
    this.ctx.arc(this.cursor.x, this.cursor.y, radius, 0, 2 * Math.PI);
    this.ctx.stroke();
  }

  private canvasPosition(event: PointerEvent): { x: number; y: number } {
    const rect = this.canvas.getBoundingClientRect();
    return { x: event.clientX - rect.left, y: event.clientY - rect.top };
  }

  private bindPointerEvents(): void {
    this.canvas.addEventListener('pointerdown', (event) => {
      if (!this.state.session) {
        return;
      }
      const { x, y } = this.canvasPosition(event);
      const t = this.transform();
      if (this.state.brush.mode === 'navigate') {
        const { u, v } = screenToSlice(t, x, y);
        const view = this.state.viewport(this.plane);
        this.callbacks.onCrosshair(
          sliceToVoxel(this.plane, view.sliceIndex, Math.round(u), Math.round(v)),
        );
        return;
      }
      this.canvas.setPointerCapture(event.pointerId);
      const view = this.state.viewport(this.plane);
      this.gesture = new GestureBuilder(
        this.plane,
        view.sliceIndex,
        this.state.brush.mode,
        this.state.brush.radiusPx,
      );
      this.gesture.add(x, y, t);
      this.draw();
    });

    this.canvas.addEventListener('pointermove', (event) => {
      const { x, y } = this.canvasPosition(event);
      this.cursor = { x, y };
      if (this.gesture) {
        this.gesture.add(x, y, this.transform());
      }
      this.draw();
    });

    const endGesture = () => {
      if (!this.gesture) {
        return;
      }
      const stroke = this.gesture.finish();
      this.gesture = null;
      if (stroke) {
        this.callbacks.onStroke(stroke);
      }
    };
    this.canvas.addEventListener('pointerup', endGesture);
    this.canvas.addEventListener('pointercancel', endGesture);
    this.canvas.addEventListener('pointerleave', () => {
      this.cursor = null;
      this.draw();
    });

    this.canvas.addEventListener(
      'wheel',
      (event) => {
        event.preventDefault();
        this.state.stepSlice(this.plane, event.deltaY > 0 ? 1 : -1);
        this.refresh();
      },
      { passive: false },
    );
  }
}
