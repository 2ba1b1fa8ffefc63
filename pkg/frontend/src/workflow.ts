/** Operator workflows: submit a draft, run the optimization to completion,
 * and fetch+render the result.  Server errors leave the draft intact in the
 * session store.
 */
import { ApiClient, ApiError } from "./api.js";
import { pollJob, type PollOptions } from "./poll.js";
import { buildResultView, type ResultView } from "./render.js";
import { SessionStore } from "./store.js";
import type { FieldError, ResultBundle, ScenarioDraft } from "./types.js";
import { validateDraft } from "./validation.js";

export class DraftRejected extends Error {
  constructor(public fieldErrors: FieldError[]) {
    super(fieldErrors.map((e) => `${e.loc}: ${e.msg}`).join("; "));
  }
}

export async function submitScenario(
  api: ApiClient,
  store: SessionStore,
  draft: ScenarioDraft
): Promise<string> {
  store.keepDraft(draft);
  const clientErrors = validateDraft(draft);
  if (clientErrors.length > 0) {
    throw new DraftRejected(clientErrors);
  }
  try {
    return await api.createScenario(draft);
  } catch (err) {
    if (err instanceof ApiError && err.status === 422) {
      throw new DraftRejected(err.fieldErrors());
    }
    throw err;
  }
}

export interface RunOutcome {
  scenarioId: string;
  bundle: ResultBundle;
  view: ResultView;
}

export async function runAndPoll(
  api: ApiClient,
  store: SessionStore,
  scenarioId: string,
  label: string,
  poll: PollOptions = {}
): Promise<RunOutcome> {
  try {
    const jobId = await api.startOptimize(scenarioId);
    await pollJob(api, jobId, poll);
    const bundle = await api.result(scenarioId);
    store.retain({ scenarioId, label, bundle });
    store.lastError = null;
    return { scenarioId, bundle, view: buildResultView(bundle) };
  } catch (err) {
    store.lastError = err instanceof Error ? err.message : String(err);
    throw err;
  }
}
