// Client-side session state is a pure projection of the stream: feed it the
// server's messages and it accumulates the latest frame plus the full plot
// history. Replaying the same backlog (e.g. after a reconnect, where the
// server resends the epoch from tick 0) reproduces the identical chart
// because already-seen ticks are skipped.

import { StepMessage, StreamMessage, isReset } from "./wire";

export type Applied = "step" | "reset" | "stale";

export class SessionView {
  epoch = 0;
  tick = -1;
  /** latest draw list; rendering may skip frames, this only keeps the newest */
  frame: StepMessage | null = null;
  /** plot history; one point per label per step message, never dropped */
  ticks: number[] = [];
  series: Record<string, number[]> = {};

  applyMessage(msg: StreamMessage): Applied {
    if (isReset(msg)) {
      this.epoch = msg.epoch;
      this.tick = -1;
      this.frame = null;
      this.ticks = [];
      this.series = {};
      return "reset";
    }
    if (msg.tick <= this.tick) return "stale"; // reconnect replay overlap
    this.tick = msg.tick;
    this.frame = msg;
    this.ticks.push(msg.tick);
    for (const [label, value] of Object.entries(msg.plots)) {
      (this.series[label] ??= []).push(value);
    }
    return "step";
  }

  /** Copy of the chart data, for comparisons and exports in tests. */
  chart(): { ticks: number[]; series: Record<string, number[]> } {
    const series: Record<string, number[]> = {};
    for (const [label, values] of Object.entries(this.series)) {
      series[label] = [...values];
    }
    return { ticks: [...this.ticks], series };
  }
}
