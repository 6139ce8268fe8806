import { describe, expect, it } from 'vitest';

import type { ViewTransform } from '../src/coords';
import { discFootprint, GestureBuilder } from '../src/gesture';

const t = (zoom: number, aspect = 1): ViewTransform => ({ zoom, panX: 0, panY: 0, aspect });

describe('gesture to stroke', () => {
  it('a click becomes a single-point stroke', () => {
    const gesture = new GestureBuilder('axial', 5, 'add', 0);
    gesture.add(10, 12, t(1));
    const stroke = gesture.finish();
    expect(stroke).toEqual({
      plane: 'axial',
      slice_index: 5,
      points: [[10, 12]],
      radius_px: 0,
      mode: 'add',
    });
  });

  it('screen pixels at zoom 2 become halved slice points', () => {
    const gesture = new GestureBuilder('axial', 0, 'delete', 1);
    gesture.add(10, 10, t(2));
    gesture.add(20, 10, t(2));
    expect(gesture.finish()?.points).toEqual([
      [5, 5],
      [10, 5],
    ]);
  });

  it('drops consecutive duplicate pixels from slow drags', () => {
    const gesture = new GestureBuilder('coronal', 3, 'add', 2);
    gesture.add(4, 4, t(1));
    gesture.add(4.2, 4.1, t(1)); // rounds to the same pixel
    gesture.add(5, 4, t(1));
    expect(gesture.finish()?.points).toEqual([
      [4, 4],
      [5, 4],
    ]);
  });

  it('accounts for anisotropic display scaling on v', () => {
    const gesture = new GestureBuilder('coronal', 0, 'add', 0);
    gesture.add(6, 12, t(1, 2)); // v displayed twice as tall
    expect(gesture.finish()?.points).toEqual([[6, 6]]);
  });

  it('returns null for an empty gesture', () => {
    expect(new GestureBuilder('axial', 0, 'add', 0).finish()).toBeNull();
  });
});

describe('brush preview footprint', () => {
  it('radius 0 is one pixel', () => {
    expect(discFootprint(0)).toEqual([[0, 0]]);
  });

  it('radius 2 covers the 13-pixel Euclidean disc', () => {
    const disc = discFootprint(2);
    expect(disc).toHaveLength(13);
    for (const [du, dv] of disc) {
      expect(du * du + dv * dv).toBeLessThanOrEqual(4);
    }
  });
});
