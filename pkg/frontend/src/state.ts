import type { ViewState } from "./types";

export function initialState(): ViewState {
  return {
    summary: null,
    selectedDate: null,
    selectedCountry: null,
    map: null,
    topics: { POS: null, NEU: null, NEG: null },
    countryPanel: null,
    error: null,
  };
}

/** Monotonic request generations: only the latest generation may commit.
 * Every navigation bumps the counter; an async result tagged with an older
 * generation is stale and must be dropped on arrival.
 */
export class GenerationGate {
  private current = 0;

  next(): number {
    return ++this.current;
  }

  isCurrent(generation: number): boolean {
    return generation === this.current;
  }
}
