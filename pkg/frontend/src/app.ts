/**
 * Application shell: toolbar, parameter panel, three synchronized viewports,
 * volume readout. One mutating request is in flight at a time (buttons
 * disable while pending); slice fetches overlap freely.
 */

import { AnnotationApi, ApiError } from './api';
import { PLANES } from './coords';
import { AppState } from './state';
import type { BrushMode, Plane, SegmentParams, StrokePayload, VolumesMl } from './types';
import { DEFAULT_PARAMS, MAX_BRUSH_RADIUS } from './types';
import { SliceViewport } from './viewport';

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = '',
  text = '',
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text) {
    node.textContent = text;
  }
  return node;
}

export class App {
  private readonly api: AnnotationApi;
  private readonly state = new AppState();
  private viewports = new Map<Plane, SliceViewport>();
  private pending = false;

  private toolbar = el('div', 'toolbar');
  private viewportRow = el('div', 'viewport-row');
  private statusBar = el('div', 'status-bar');
  private volumeReadout = el('span', 'volume-readout', 'no session');
  private toast = el('div', 'toast hidden');
  private paramsPanel = el('div', 'params-panel hidden');
  private brushButtons = new Map<BrushMode, HTMLButtonElement>();
  private mutatingButtons: HTMLButtonElement[] = [];
  private paramInputs = new Map<keyof SegmentParams, HTMLInputElement>();

  constructor(root: HTMLElement, apiBase = '') {
    this.api = new AnnotationApi(apiBase);
    root.append(this.toolbar, this.paramsPanel, this.viewportRow, this.statusBar, this.toast);
    this.buildToolbar();
    this.buildParamsPanel();
    this.statusBar.appendChild(this.volumeReadout);
  }

  private buildToolbar(): void {
    const fileInput = el('input') as HTMLInputElement;
    fileInput.type = 'file';
    fileInput.accept = '.nii,.gz,.hdr,.img';
    fileInput.addEventListener('change', () => {
      const file = fileInput.files?.[0];
      if (file) {
        void this.openFile(file);
      }
    });
    this.toolbar.appendChild(fileInput);

    const segmentButton = el('button', 'primary', 'Segment lungs');
    segmentButton.addEventListener('click', () => void this.runSegmentation('auto'));
    this.toolbar.appendChild(segmentButton);
    this.mutatingButtons.push(segmentButton);

    const seededButton = el('button', '', 'Segment from seed strokes');
    seededButton.addEventListener('click', () => void this.runSegmentation('seeded'));
    this.toolbar.appendChild(seededButton);
    this.mutatingButtons.push(seededButton);

    const advancedToggle = el('button', '', 'Parameters');
    advancedToggle.addEventListener('click', () => this.paramsPanel.classList.toggle('hidden'));
    this.toolbar.appendChild(advancedToggle);

    for (const mode of ['navigate', 'add', 'delete', 'seed-left', 'seed-right'] as BrushMode[]) {
      const button = el('button', `brush brush-${mode}`, mode);
      button.addEventListener('click', () => this.setBrushMode(mode));
      this.brushButtons.set(mode, button);
      this.toolbar.appendChild(button);
    }
    this.setBrushMode('navigate');

    const radius = el('input') as HTMLInputElement;
    radius.type = 'range';
    radius.min = '0';
    radius.max = String(MAX_BRUSH_RADIUS);
    radius.value = String(this.state.brush.radiusPx);
    radius.title = 'brush radius (px)';
    radius.addEventListener('input', () => this.state.setBrushRadius(Number(radius.value)));
    this.toolbar.appendChild(radius);

    const overlayToggle = el('button', '', 'Overlay on/off');
    overlayToggle.addEventListener('click', () => {
      for (const plane of PLANES) {
        const view = this.state.viewport(plane);
        view.overlayOn = !view.overlayOn;
      }
      this.refreshAll();
    });
    this.toolbar.appendChild(overlayToggle);

    const undoButton = el('button', '', 'Undo');
    undoButton.addEventListener('click', () => void this.undo());
    this.toolbar.appendChild(undoButton);
    this.mutatingButtons.push(undoButton);

    const exportButton = el('button', '', 'Export mask');
    exportButton.addEventListener('click', () => void this.exportMask());
    this.toolbar.appendChild(exportButton);
  }

  private buildParamsPanel(): void {
    const fields: Array<[keyof SegmentParams, string]> = [
      ['mean', 'mean HU'],
      ['sigma', 'sigma HU'],
      ['theta', 'theta'],
      ['adjacency', 'adjacency'],
    ];
    for (const [key, label] of fields) {
      const wrap = el('label', 'param-field', label + ' ');
      const input = el('input') as HTMLInputElement;
      input.type = 'number';
      input.value = String(DEFAULT_PARAMS[key]);
      wrap.appendChild(input);
      this.paramInputs.set(key, input);
      this.paramsPanel.appendChild(wrap);
    }
    const reset = el('button', '', 'Reset defaults');
    reset.addEventListener('click', () => {
      for (const [key, input] of this.paramInputs) {
        input.value = String(DEFAULT_PARAMS[key]);
      }
    });
    this.paramsPanel.appendChild(reset);
  }

  private currentParams(): SegmentParams {
    const read = (key: keyof SegmentParams) => Number(this.paramInputs.get(key)!.value);
    return {
      mean: read('mean'),
      sigma: read('sigma'),
      theta: read('theta'),
      adjacency: read('adjacency') === 26 ? 26 : 6,
    };
  }

  private setBrushMode(mode: BrushMode): void {
    this.state.brush.mode = mode;
    for (const [name, button] of this.brushButtons) {
      button.classList.toggle('active', name === mode);
    }
  }

  private setPending(pending: boolean): void {
    this.pending = pending;
    for (const button of this.mutatingButtons) {
      button.disabled = pending;
    }
  }

  private showToast(message: string): void {
    this.toast.textContent = message;
    this.toast.classList.remove('hidden');
    setTimeout(() => this.toast.classList.add('hidden'), 4000);
  }

  private async openFile(file: File): Promise<void> {
    try {
      const descriptor = await this.api.createSessionFromFile(file, file.name);
      this.state.openSession(descriptor);
      this.viewportRow.replaceChildren();
      this.viewports.clear();
      for (const plane of PLANES) {
        const cell = el('div', 'viewport-cell');
        cell.appendChild(el('div', 'viewport-label', plane));
        this.viewportRow.appendChild(cell);
        this.viewports.set(
          plane,
          new SliceViewport(plane, this.state, this.api, {
            onStroke: (stroke) => void this.sendStroke(stroke),
            onCrosshair: (voxel) => {
              this.state.setCrosshair(voxel);
              this.refreshAll();
            },
          }, cell),
        );
      }
      this.volumeReadout.textContent = 'no annotation yet';
      this.refreshAll();
    } catch (err) {
      this.reportError(err);
    }
  }

  private refreshAll(): void {
    for (const viewport of this.viewports.values()) {
      viewport.refresh();
    }
  }

  private updateReadout(volumes: VolumesMl): void {
    this.volumeReadout.textContent =
      `left ${volumes.left.toFixed(1)} mL | right ${volumes.right.toFixed(1)} mL | ` +
      `combined ${volumes.combined.toFixed(1)} mL`;
  }

  private async runSegmentation(mode: 'auto' | 'seeded'): Promise<void> {
    const session = this.state.session;
    if (!session || this.pending) {
      return;
    }
    this.setPending(true);
    try {
      const result = await this.api.segment(session.session_id, mode, this.currentParams());
      this.state.maskRevision++;
      this.updateReadout(result.volumes_ml);
      this.refreshAll();
    } catch (err) {
      if (err instanceof ApiError && err.code === 'missing_side' && err.side) {
        this.highlightSeedTool(err.side);
      }
      this.reportError(err);
    } finally {
      this.setPending(false);
    }
  }

  private highlightSeedTool(side: 'left' | 'right'): void {
    const button = this.brushButtons.get(`seed-${side}` as BrushMode);
    button?.classList.add('needs-attention');
    setTimeout(() => button?.classList.remove('needs-attention'), 6000);
  }

  private async sendStroke(stroke: StrokePayload): Promise<void> {
    const session = this.state.session;
    if (!session || this.pending) {
      return;
    }
    this.setPending(true);
    try {
      const result = await this.api.submitStroke(session.session_id, stroke);
      if (result.seeds) {
        this.state.seedCounts = result.seeds;
        this.showToast(`seeds: left ${result.seeds.left}, right ${result.seeds.right}`);
      } else {
        this.state.maskRevision++;
        const volumes = await this.api.metrics(session.session_id);
        this.updateReadout(volumes);
      }
      this.refreshAll();
    } catch (err) {
      this.reportError(err);
    } finally {
      this.setPending(false);
    }
  }

  private async undo(): Promise<void> {
    const session = this.state.session;
    if (!session || this.pending) {
      return;
    }
    this.setPending(true);
    try {
      await this.api.undo(session.session_id);
      this.state.maskRevision++;
      this.updateReadout(await this.api.metrics(session.session_id));
      this.refreshAll();
    } catch (err) {
      this.reportError(err);
    } finally {
      this.setPending(false);
    }
  }

  private async exportMask(): Promise<void> {
    const session = this.state.session;
    if (!session) {
      return;
    }
    try {
      const bytes = await this.api.exportMask(session.session_id);
      const blob = new Blob([bytes], { type: 'application/gzip' });
      const link = el('a') as HTMLAnchorElement;
      link.href = URL.createObjectURL(blob);
      link.download = 'mask.nii.gz';
      link.click();
      URL.revokeObjectURL(link.href);
    } catch (err) {
      this.reportError(err);
    }
  }

  private reportError(err: unknown): void {
    if (err instanceof ApiError) {
      this.showToast(`${err.code}: ${err.payload.message}`);
    } else {
      this.showToast(String(err));
    }
  }
}
