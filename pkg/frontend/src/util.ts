/** Small helpers: debouncing, color interpolation, stale-response guards. */

export interface Debounced<A extends unknown[]> {
  (...args: A): void;
  cancel(): void;
  flush(): void;
}

/** Trailing-edge debounce; `flush` fires a pending call immediately. */
export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  waitMs: number,
): Debounced<A> {
  let timer: ReturnType<typeof setTimeout> | null = null;
  let pending: A | null = null;

  const debounced = (...args: A): void => {
    pending = args;
    if (timer !== null) {
      clearTimeout(timer);
    }
    timer = setTimeout(() => {
      timer = null;
      const args2 = pending as A;
      pending = null;
      fn(...args2);
    }, waitMs);
  };
  debounced.cancel = (): void => {
    if (timer !== null) {
      clearTimeout(timer);
      timer = null;
    }
    pending = null;
  };
  debounced.flush = (): void => {
    if (timer !== null && pending !== null) {
      clearTimeout(timer);
      timer = null;
      const args = pending;
      pending = null;
      fn(...args);
    }
  };
  return debounced;
}

const LOW_COLOR: readonly [number, number, number] = [244, 204, 204];
const HIGH_COLOR: readonly [number, number, number] = [109, 158, 235];

/** Map a frequency onto a red (rare) to blue (common) hex color.
 *
 * Interpolation runs on a log scale so mid colors track orders of
 * magnitude; a degenerate range paints everything with the high color.
 */
export function frequencyTint(f: number, fMin: number, fMax: number): string {
  let rel: number;
  if (!(fMax > fMin) || fMin <= 0) {
    rel = 1.0;
  } else {
    const clamped = Math.min(fMax, Math.max(fMin, f));
    rel = (Math.log(clamped) - Math.log(fMin)) / (Math.log(fMax) - Math.log(fMin));
  }
  const channels = LOW_COLOR.map((low, i) => {
    const high = HIGH_COLOR[i] as number;
    return Math.round(low + rel * (high - low));
  });
  return "#" + channels.map((c) => c.toString(16).padStart(2, "0")).join("");
}

/** Monotonic ticket counter used to drop stale async responses.
 *
 * Take a ticket before starting a request; apply the result only if the
 * ticket is still current when it lands (last write wins).
 */
export class LastWrite {
  private latest = 0;

  take(): number {
    this.latest += 1;
    return this.latest;
  }

  isCurrent(ticket: number): boolean {
    return ticket === this.latest;
  }
}
