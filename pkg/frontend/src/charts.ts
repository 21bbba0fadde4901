/** Chart models and SVG rendering for the progress view.
 *
 * The builders are pure mappings of the metrics payload: every bar value is
 * a field straight out of GET /metrics, so tests can diff chart data against
 * the API response field for field.
 */

import type { MetricsResponse } from "./types.js";

export interface Bar {
  label: string;
  value: number;
}

export interface StackedBar {
  label: string;
  model: number;
  user: number;
}

export interface ContributionChart {
  kind: "contribution";
  maxValue: number;
  bars: Bar[];
}

export interface TrainingTimeChart {
  kind: "training-time";
  maxValue: number;
  bars: Bar[];
}

export interface ModelVsUserChart {
  kind: "model-vs-user";
  bars: StackedBar[];
  totalModel: number;
  totalUser: number;
}

export function buildContributionChart(metrics: MetricsResponse): ContributionChart {
  const bars = metrics.iteration_series.map((record) => ({
    label: String(record.iteration),
    value: record.correct_by_model,
  }));
  const maxValue = Math.max(1, ...metrics.iteration_series.map((r) => r.batch_len));
  return { kind: "contribution", maxValue, bars };
}

export function buildTrainingTimeChart(metrics: MetricsResponse): TrainingTimeChart {
  const bars = metrics.training_series.map((record) => ({
    label: String(record.event_index),
    value: record.duration_seconds,
  }));
  const maxValue = Math.max(1e-9, ...bars.map((b) => b.value));
  return { kind: "training-time", maxValue, bars };
}

export function buildModelVsUserChart(metrics: MetricsResponse): ModelVsUserChart {
  const bars = metrics.iteration_series.map((record) => ({
    label: String(record.iteration),
    model: record.correct_by_model,
    user: record.corrected_by_user,
  }));
  return {
    kind: "model-vs-user",
    bars,
    totalModel: bars.reduce((acc, b) => acc + b.model, 0),
    totalUser: bars.reduce((acc, b) => acc + b.user, 0),
  };
}

const WIDTH = 640;
const HEIGHT = 180;
const PAD = 24;

function barGeometry(count: number): { step: number; width: number } {
  const step = (WIDTH - 2 * PAD) / Math.max(count, 1);
  return { step, width: Math.max(1, step * 0.7) };
}

export function renderBars(chart: ContributionChart | TrainingTimeChart): string {
  const { step, width } = barGeometry(chart.bars.length);
  const inner = chart.bars
    .map((bar, index) => {
      const h = chart.maxValue > 0 ? (bar.value / chart.maxValue) * (HEIGHT - 2 * PAD) : 0;
      const x = PAD + index * step;
      const y = HEIGHT - PAD - h;
      return (
        `<rect class="bar" x="${x.toFixed(1)}" y="${y.toFixed(1)}" ` +
        `width="${width.toFixed(1)}" height="${h.toFixed(1)}" data-value="${bar.value}" ` +
        `data-label="${bar.label}"><title>${bar.label}: ${bar.value}</title></rect>`
      );
    })
    .join("");
  return svg(chart.kind, inner);
}

export function renderStacked(chart: ModelVsUserChart): string {
  const { step, width } = barGeometry(chart.bars.length);
  const maxTotal = Math.max(1, ...chart.bars.map((b) => b.model + b.user));
  const scale = (HEIGHT - 2 * PAD) / maxTotal;
  const inner = chart.bars
    .map((bar, index) => {
      const x = PAD + index * step;
      const modelH = bar.model * scale;
      const userH = bar.user * scale;
      const modelY = HEIGHT - PAD - modelH;
      const userY = modelY - userH;
      return (
        `<rect class="bar model" x="${x.toFixed(1)}" y="${modelY.toFixed(1)}" ` +
        `width="${width.toFixed(1)}" height="${modelH.toFixed(1)}" data-value="${bar.model}"></rect>` +
        `<rect class="bar user" x="${x.toFixed(1)}" y="${userY.toFixed(1)}" ` +
        `width="${width.toFixed(1)}" height="${userH.toFixed(1)}" data-value="${bar.user}"></rect>`
      );
    })
    .join("");
  return svg(chart.kind, inner);
}

function svg(kind: string, inner: string): string {
  return (
    `<svg viewBox="0 0 ${WIDTH} ${HEIGHT}" role="img" data-chart="${kind}" ` +
    `xmlns="http://www.w3.org/2000/svg">${inner}</svg>`
  );
}
