export type SentimentName = "POS" | "NEU" | "NEG";

export interface SummaryPayload {
  records: number;
  date_min: string;
  date_max: string;
  distribution: Record<SentimentName, number>;
}

export interface MapCell {
  score: number;
  count: number;
}

export type MapPayload = Record<string, MapCell>;

export interface TopicPayload {
  topic: number;
  words: [string, number][];
}

export interface SeriesPoint {
  date: string;
  count: number;
}

export interface CountryPanel {
  code: string;
  topics: TopicPayload[];
  series: SeriesPoint[];
}

/** Everything the UI renders is a pure function of this state. */
export interface ViewState {
  summary: SummaryPayload | null;
  selectedDate: string | null;
  selectedCountry: string | null;
  map: MapPayload | null;
  topics: Record<SentimentName, TopicPayload[] | null>;
  countryPanel: CountryPanel | null;
  error: string | null;
}

export interface WorldFeature {
  type: "Feature";
  id: string; // ISO-3166 alpha-2
  properties: { name: string };
  geometry: {
    type: "Polygon" | "MultiPolygon";
    coordinates: number[][][] | number[][][][];
  };
}

export interface WorldGeo {
  type: "FeatureCollection";
  features: WorldFeature[];
}

export const SENTIMENTS: SentimentName[] = ["POS", "NEU", "NEG"];
