/** Viva countdown: pure time arithmetic plus a thin interval driver.
 *
 * The server is the authority on expiry (answers after the limit come
 * back as session_expired); the client timer only displays remaining
 * time and fires a callback once so the UI can stop accepting input.
 */

export interface Countdown {
  /** milliseconds remaining, floored at zero */
  remainingMs(nowMs: number): number;
  /** whole seconds remaining, floored at zero */
  remainingSeconds(nowMs: number): number;
  expired(nowMs: number): boolean;
}

export function createCountdown(startMs: number, durationMinutes: number): Countdown {
  const endsAt = startMs + durationMinutes * 60_000;
  return {
    remainingMs: (nowMs) => Math.max(0, endsAt - nowMs),
    remainingSeconds: (nowMs) => Math.max(0, Math.ceil((endsAt - nowMs) / 1000)),
    expired: (nowMs) => nowMs >= endsAt,
  };
}

export function formatClock(totalSeconds: number): string {
  const minutes = Math.floor(totalSeconds / 60);
  const seconds = totalSeconds % 60;
  return `${String(minutes).padStart(2, "0")}:${String(seconds).padStart(2, "0")}`;
}

export interface TickerHandle {
  stop(): void;
}

/** Drive a countdown with callbacks; onExpire fires exactly once. */
export function startTicker(
  countdown: Countdown,
  onTick: (display: string) => void,
  onExpire: () => void,
  now: () => number = Date.now,
  schedule: (fn: () => void, ms: number) => ReturnType<typeof setInterval> = setInterval,
  cancel: (handle: ReturnType<typeof setInterval>) => void = clearInterval,
): TickerHandle {
  let fired = false;
  const step = () => {
    const seconds = countdown.remainingSeconds(now());
    onTick(formatClock(seconds));
    if (countdown.expired(now()) && !fired) {
      fired = true;
      cancel(handle);
      onExpire();
    }
  };
  const handle = schedule(step, 1000);
  step();
  return { stop: () => cancel(handle) };
}
