/** Navigation logic: what gets fetched when, and what may commit to state.
 *
 * Concurrency rule: each navigation takes a new generation from the gate;
 * responses belonging to an older generation are discarded before touching
 * state, so rapid navigation can never interleave panels from two dates.
 */

import { ApiClient, ApiError } from "./api";
import { GenerationGate, initialState } from "./state";
import { SENTIMENTS, type CountryPanel, type ViewState } from "./types";

export class App {
  state: ViewState = initialState();

  private gate = new GenerationGate();
  private countryGate = new GenerationGate();

  constructor(
    private api: ApiClient,
    private onRender: (state: ViewState) => void = () => {},
  ) {}

  private commit(update: Partial<ViewState>): void {
    this.state = { ...this.state, ...update };
    this.onRender(this.state);
  }

  async init(): Promise<void> {
    try {
      const summary = await this.api.summary();
      this.commit({ summary });
      await this.onDateChange(summary.date_max);
    } catch (err) {
      this.commit({ error: describe(err) });
    }
  }

  /** Date navigation: one map fetch plus one topics fetch per sentiment. */
  async onDateChange(date: string): Promise<void> {
    const generation = this.gate.next();
    const [mapResult, ...topicResults] = await Promise.allSettled([
      this.api.map(date),
      ...SENTIMENTS.map((s) => this.api.topics({ date, sentiment: s })),
    ]);
    if (!this.gate.isCurrent(generation)) {
      return; // superseded by a later navigation: drop everything
    }
    if (mapResult.status === "rejected") {
      // keep the previous map on screen, surface the failure inline
      this.commit({ error: describe(mapResult.reason) });
      return;
    }
    const topics = { ...this.state.topics };
    SENTIMENTS.forEach((sentiment, i) => {
      const result = topicResults[i];
      topics[sentiment] = result.status === "fulfilled" ? result.value : [];
    });
    this.commit({
      selectedDate: date,
      map: mapResult.value,
      topics,
      countryPanel: null,
      selectedCountry: null,
      error: null,
    });
  }

  /** Country drill-down; clicking a country without data is a no-op. */
  async onCountryClick(code: string): Promise<void> {
    if (!this.state.map || !(code in this.state.map) || !this.state.selectedDate) {
      return;
    }
    const generation = this.countryGate.next();
    const date = this.state.selectedDate;
    try {
      const [topics, series] = await Promise.all([
        this.api.topics({ date, country: code }),
        this.api.timeseries({ country: code }),
      ]);
      if (!this.countryGate.isCurrent(generation)) {
        return;
      }
      const panel: CountryPanel = { code, topics, series };
      this.commit({ selectedCountry: code, countryPanel: panel, error: null });
    } catch (err) {
      if (this.countryGate.isCurrent(generation)) {
        this.commit({ error: describe(err) });
      }
    }
  }

  closeCountry(): void {
    this.commit({ selectedCountry: null, countryPanel: null });
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) {
    return `request failed (${err.status}): ${err.message}`;
  }
  if (err instanceof Error) {
    return err.message;
  }
  return String(err);
}
