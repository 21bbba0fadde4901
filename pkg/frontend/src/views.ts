/** DOM builders for the three screens. Each render replaces the container's
 * content from the given model; protocol state always arrives from outside. */

import {
  buildContributionChart,
  buildModelVsUserChart,
  buildTrainingTimeChart,
  renderBars,
  renderStacked,
} from "./charts.js";
import type { BootstrapForm, EditSet } from "./edits.js";
import type { MetricsResponse, TriggerOutcome } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export interface BootstrapHandlers {
  onAssign(sampleId: string, label: string): void;
  onSubmit(): void;
}

export function renderBootstrapView(
  container: HTMLElement,
  form: BootstrapForm,
  cursorIndex: number,
  handlers: BootstrapHandlers,
): void {
  container.replaceChildren();
  container.appendChild(el("h2", "view-title", "Bootstrap: label every item"));

  const palette = el("div", "palette");
  form.palette().forEach((label, i) => {
    const chip = el("button", "chip", `${i + 1} ${label}`);
    chip.dataset.label = label;
    chip.type = "button";
    palette.appendChild(chip);
  });
  container.appendChild(palette);

  const grid = el("div", "grid");
  form.order.forEach((sampleId, index) => {
    const row = el("div", index === cursorIndex ? "row cursor" : "row");
    row.dataset.sampleId = sampleId;
    row.appendChild(el("span", "sample-id", sampleId));
    const input = el("input", "label-input");
    input.type = "text";
    input.placeholder = "class label";
    input.value = form.labelFor(sampleId) ?? "";
    input.addEventListener("change", () => handlers.onAssign(sampleId, input.value));
    row.appendChild(input);
    grid.appendChild(row);
  });
  container.appendChild(grid);

  const status = el(
    "p",
    "status",
    `${form.labelledCount()} / ${form.order.length} labelled`,
  );
  container.appendChild(status);

  const submit = el("button", "submit", "Submit bootstrap labels");
  submit.type = "button";
  submit.disabled = !form.isComplete();
  submit.addEventListener("click", handlers.onSubmit);
  container.appendChild(submit);
}

export interface BulkEditHandlers {
  onOverride(sampleId: string, label: string): void;
  onRevert(sampleId: string): void;
  onAcceptAll(): void;
  onSubmit(): void;
  onRetry(): void;
}

export function renderBulkEditView(
  container: HTMLElement,
  edits: EditSet,
  palette: string[],
  cursorIndex: number,
  retryMessage: string | null,
  handlers: BulkEditHandlers,
): void {
  container.replaceChildren();
  container.appendChild(el("h2", "view-title", "Review predictions"));

  if (retryMessage !== null) {
    const banner = el("div", "retry-banner");
    banner.appendChild(el("span", undefined, `Submission failed: ${retryMessage}. Your edits are kept.`));
    const retry = el("button", "retry", "Retry");
    retry.type = "button";
    retry.addEventListener("click", handlers.onRetry);
    banner.appendChild(retry);
    container.appendChild(banner);
  }

  const acceptAll = el("button", "accept-all", "Accept all");
  acceptAll.type = "button";
  acceptAll.addEventListener("click", handlers.onAcceptAll);
  container.appendChild(acceptAll);

  const grid = el("div", "grid");
  edits.order.forEach((sampleId, index) => {
    const row = el("div", index === cursorIndex ? "row cursor" : "row");
    row.dataset.sampleId = sampleId;
    if (edits.isOverridden(sampleId)) row.classList.add("overridden");
    row.appendChild(el("span", "sample-id", sampleId));
    row.appendChild(el("span", "predicted", edits.predictionFor(sampleId)));

    const select = el("select", "class-select");
    for (const label of palette) {
      const option = el("option", undefined, label);
      option.value = label;
      option.selected = label === edits.labelFor(sampleId);
      select.appendChild(option);
    }
    select.addEventListener("change", () => handlers.onOverride(sampleId, select.value));
    row.appendChild(select);

    const revert = el("button", "revert", "accept");
    revert.type = "button";
    revert.addEventListener("click", () => handlers.onRevert(sampleId));
    row.appendChild(revert);
    grid.appendChild(row);
  });
  container.appendChild(grid);

  const status = el("p", "status", `${edits.overrideCount()} overrides`);
  container.appendChild(status);

  const submit = el("button", "submit", "Submit corrections");
  submit.type = "button";
  submit.addEventListener("click", handlers.onSubmit);
  container.appendChild(submit);
}

export function renderOutcomeBanner(container: HTMLElement, outcome: TriggerOutcome | null): void {
  container.replaceChildren();
  if (outcome === null || outcome.kind === "None") return;
  const text =
    outcome.kind === "BufferFull"
      ? `Buffer full: retrained ${outcome.retrained_classes.join(", ")}`
      : "Too many mistakes: falling back to a fresh bootstrap round";
  container.appendChild(el("div", `outcome ${outcome.kind}`, text));
}

export function renderProgressView(container: HTMLElement, metrics: MetricsResponse): void {
  container.replaceChildren();
  container.appendChild(el("h2", "view-title", "Progress"));

  if (metrics.iteration_series.length === 0) {
    container.appendChild(el("p", "empty", "No iterations yet."));
    return;
  }

  const headline = el(
    "p",
    "headline",
    `${metrics.dataset_name}: ${metrics.model_contribution_percent.toFixed(2)}% labelled by the model ` +
      `across ${metrics.iteration_series.length} iterations (${metrics.class_count} classes)`,
  );
  container.appendChild(headline);

  const sections: Array<[string, string]> = [
    ["Model contribution per iteration", renderBars(buildContributionChart(metrics))],
    ["Training time per event", renderBars(buildTrainingTimeChart(metrics))],
    ["Model vs user labelling", renderStacked(buildModelVsUserChart(metrics))],
  ];
  for (const [title, svg] of sections) {
    const section = el("section", "chart");
    section.appendChild(el("h3", undefined, title));
    const holder = el("div", "chart-svg");
    holder.innerHTML = svg;
    section.appendChild(holder);
    container.appendChild(section);
  }
}
