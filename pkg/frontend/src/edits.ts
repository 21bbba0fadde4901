/** Local edit state for the two labelling grids.
 *
 * Bulk-edit semantics: every item starts on the model's prediction; only
 * overrides that differ from the prediction are posted as corrections, and
 * reverting an override (or re-picking the predicted class) drops it from
 * the submission entirely.
 */

import type { BatchEntry } from "./types.js";

export class EditSet {
  private readonly predicted = new Map<string, string>();
  private readonly overrides = new Map<string, string>();
  readonly order: string[] = [];

  constructor(entries: BatchEntry[]) {
    for (const entry of entries) {
      this.predicted.set(entry.sample_id, entry.predicted_class);
      this.order.push(entry.sample_id);
    }
  }

  get size(): number {
    return this.order.length;
  }

  predictionFor(sampleId: string): string {
    const value = this.predicted.get(sampleId);
    if (value === undefined) throw new Error(`unknown sample ${sampleId}`);
    return value;
  }

  /** Effective label shown for an item: override if present, else prediction. */
  labelFor(sampleId: string): string {
    return this.overrides.get(sampleId) ?? this.predictionFor(sampleId);
  }

  isOverridden(sampleId: string): boolean {
    return this.overrides.has(sampleId);
  }

  override(sampleId: string, classLabel: string): void {
    if (!this.predicted.has(sampleId)) throw new Error(`unknown sample ${sampleId}`);
    if (classLabel === this.predicted.get(sampleId)) {
      this.overrides.delete(sampleId); // picking the prediction back is a revert
    } else {
      this.overrides.set(sampleId, classLabel);
    }
  }

  revert(sampleId: string): void {
    this.overrides.delete(sampleId);
  }

  acceptAll(): void {
    this.overrides.clear();
  }

  /** Only overridden items are submitted as corrections. */
  corrections(): Record<string, string> {
    return Object.fromEntries(this.overrides);
  }

  overrideCount(): number {
    return this.overrides.size;
  }
}

/** Form state for the bootstrap grid: free-form class entry per item. */
export class BootstrapForm {
  private readonly assignments = new Map<string, string>();
  readonly order: string[];

  constructor(ids: string[]) {
    this.order = [...ids];
  }

  assign(sampleId: string, classLabel: string): void {
    if (!this.order.includes(sampleId)) throw new Error(`unknown sample ${sampleId}`);
    const trimmed = classLabel.trim();
    if (trimmed === "") {
      this.assignments.delete(sampleId);
    } else {
      this.assignments.set(sampleId, trimmed);
    }
  }

  labelFor(sampleId: string): string | undefined {
    return this.assignments.get(sampleId);
  }

  /** Distinct labels entered so far, in first-use order (the class palette). */
  palette(): string[] {
    const seen = new Set<string>();
    const out: string[] = [];
    for (const id of this.order) {
      const label = this.assignments.get(id);
      if (label !== undefined && !seen.has(label)) {
        seen.add(label);
        out.push(label);
      }
    }
    return out;
  }

  labelledCount(): number {
    return this.assignments.size;
  }

  /** Submission is allowed only once every requested item has a label. */
  isComplete(): boolean {
    return this.assignments.size === this.order.length;
  }

  labels(): Record<string, string> {
    if (!this.isComplete()) throw new Error("bootstrap form is incomplete");
    return Object.fromEntries(this.order.map((id) => [id, this.assignments.get(id)!]));
  }
}
