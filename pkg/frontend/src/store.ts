/** Session store for the what-if loop: keeps the operator's draft across
 * failures and retains a bounded set of completed results for comparison.
 */
import type { ResultBundle, ScenarioDraft } from "./types.js";

export const MAX_RETAINED_RESULTS = 4;

export interface RetainedResult {
  scenarioId: string;
  label: string;
  bundle: ResultBundle;
}

export class SessionStore {
  draft: ScenarioDraft | null = null;
  results: RetainedResult[] = [];
  lastError: string | null = null;

  /** Drafts survive submit/optimize failures so edits are never lost. */
  keepDraft(draft: ScenarioDraft): void {
    this.draft = draft;
  }

  retain(result: RetainedResult): void {
    this.results.push(result);
    while (this.results.length > MAX_RETAINED_RESULTS) {
      this.results.shift();
    }
  }
}
