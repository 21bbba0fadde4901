/** Wire types mirroring the labelling service's JSON payloads. */

export type Phase = "Bootstrap" | "BulkEdit" | "AwaitCorrections" | "Done" | "Training";

export interface TrainConfigBody {
  batch_size?: number;
  epochs?: number;
  learning_rate?: number;
  seed?: number;
}

export interface SessionConfigBody {
  bootstrap_size?: number;
  batch_size?: number;
  mistake_threshold?: number;
  buffer_per_class?: number;
  select_per_class?: number;
  balancing?: boolean;
  sort_direction?: "HighToLow" | "LowToHigh";
  train_config?: TrainConfigBody;
  seed?: number;
}

export interface CreateSessionRequest {
  dataset_path?: string;
  samples?: Array<{ id: string; features: number[]; label?: string | null }>;
  dataset_name?: string;
  config?: SessionConfigBody;
  async_training?: boolean;
}

export interface CreateSessionResponse {
  session_id: string;
  phase: Phase;
  bootstrap_ids: string[];
}

export interface TriggerOutcome {
  kind: "None" | "BufferFull" | "TooManyMistakes";
  retrained_classes: string[];
}

export interface TrainingStat {
  class_label: string;
  duration_seconds: number;
  final_loss: number;
  epochs_run: number;
}

export interface SubmitLabelsResponse {
  phase: Phase;
  outcome: TriggerOutcome | null;
  training: TrainingStat[];
  iteration: number;
  bootstrap_ids?: string[];
}

export interface BatchEntry {
  sample_id: string;
  predicted_class: string;
  predicted_confidence: number;
}

export interface BatchResponse {
  phase: Phase;
  iteration: number;
  entries: BatchEntry[];
}

export interface IterationRecord {
  iteration: number;
  kind: "bootstrap" | "bulk";
  batch_len: number;
  correct_by_model: number;
  corrected_by_user: number;
}

export interface TrainingRecord {
  event_index: number;
  duration_seconds: number;
  classes_trained: string[];
}

export interface MetricsResponse {
  dataset_name: string;
  sample_count: number;
  class_count: number;
  balancing: boolean;
  model_contribution_percent: number;
  training_minutes: number;
  iteration_series: IterationRecord[];
  training_series: TrainingRecord[];
}

export interface SessionStatusResponse {
  session_id: string;
  phase: Phase;
  training_in_progress: boolean;
  last_result: SubmitLabelsResponse | null;
  error: string | null;
  classes?: string[];
  iteration?: number;
  bootstrap_ids?: string[];
}
