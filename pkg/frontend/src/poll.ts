/** Poll a job until it reaches a terminal state; resolves with the final
 * state on success, rejects when the job fails or the timeout elapses.
 */
import type { ApiClient } from "./api.js";
import type { JobState } from "./types.js";

export interface PollOptions {
  intervalMs?: number;
  timeoutMs?: number;
  onProgress?: (state: JobState) => void;
  sleep?: (ms: number) => Promise<void>;
}

const defaultSleep = (ms: number) => new Promise<void>((r) => setTimeout(r, ms));

export async function pollJob(
  api: ApiClient,
  jobId: string,
  opts: PollOptions = {}
): Promise<JobState> {
  const interval = opts.intervalMs ?? 1000;
  const timeout = opts.timeoutMs ?? 10 * 60 * 1000;
  const sleep = opts.sleep ?? defaultSleep;
  const t0 = Date.now();
  for (;;) {
    const state = await api.jobState(jobId);
    opts.onProgress?.(state);
    if (state.status === "done") return state;
    if (state.status === "failed") {
      throw new Error(state.error ?? `job ${jobId} failed`);
    }
    if (Date.now() - t0 > timeout) {
      throw new Error(`job ${jobId} timed out after ${timeout} ms`);
    }
    await sleep(interval);
  }
}
