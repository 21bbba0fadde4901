/** Session orchestration. Holds only what the service reported: the phase,
 * the current bootstrap request or batch, the last trigger outcome, and the
 * latest metrics. Never derives protocol state locally. */

import type { ApiClient } from "./api.js";
import type {
  BatchEntry,
  CreateSessionRequest,
  MetricsResponse,
  Phase,
  SubmitLabelsResponse,
  TriggerOutcome,
  TrainingStat,
} from "./types.js";

export class SessionController {
  sessionId: string | null = null;
  phase: Phase | null = null;
  bootstrapIds: string[] = [];
  batchEntries: BatchEntry[] = [];
  iteration = 0;
  lastOutcome: TriggerOutcome | null = null;
  lastTraining: TrainingStat[] = [];
  metrics: MetricsResponse | null = null;
  classes: string[] = [];

  constructor(private readonly api: ApiClient) {}

  async create(request: CreateSessionRequest): Promise<void> {
    const created = await this.api.createSession(request);
    this.sessionId = created.session_id;
    this.phase = created.phase;
    this.bootstrapIds = created.bootstrap_ids;
    this.batchEntries = [];
    this.lastOutcome = null;
    this.lastTraining = [];
  }

  private requireSession(): string {
    if (this.sessionId === null) throw new Error("no session created");
    return this.sessionId;
  }

  private applySubmitResponse(response: SubmitLabelsResponse): SubmitLabelsResponse {
    this.phase = response.phase;
    this.lastOutcome = response.outcome;
    this.lastTraining = response.training;
    this.iteration = response.iteration;
    this.bootstrapIds = response.bootstrap_ids ?? [];
    this.batchEntries = [];
    return response;
  }

  async submitLabels(labels: Record<string, string>): Promise<SubmitLabelsResponse> {
    const response = await this.api.submitLabels(this.requireSession(), labels);
    return this.applySubmitResponse(response);
  }

  async fetchBatch(): Promise<BatchEntry[]> {
    const batch = await this.api.nextBatch(this.requireSession());
    this.phase = batch.phase;
    this.batchEntries = batch.entries;
    return batch.entries;
  }

  async refreshMetrics(): Promise<MetricsResponse> {
    this.metrics = await this.api.metrics(this.requireSession());
    return this.metrics;
  }

  async addClass(classLabel: string): Promise<string[]> {
    const result = await this.api.addClass(this.requireSession(), classLabel);
    this.classes = result.classes;
    return result.classes;
  }

  /** Poll the status endpoint until an async training run finishes. */
  async waitForTraining(pollMs = 250, maxPolls = 2400): Promise<SubmitLabelsResponse | null> {
    const sessionId = this.requireSession();
    for (let i = 0; i < maxPolls; i++) {
      const status = await this.api.sessionStatus(sessionId);
      if (!status.training_in_progress) {
        if (status.error) throw new Error(status.error);
        this.phase = status.phase;
        if (status.bootstrap_ids) this.bootstrapIds = status.bootstrap_ids;
        if (status.classes) this.classes = status.classes;
        if (status.last_result) return this.applySubmitResponse(status.last_result);
        return null;
      }
      await new Promise((resolve) => setTimeout(resolve, pollMs));
    }
    throw new Error("training did not finish within the polling budget");
  }
}
