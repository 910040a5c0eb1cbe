/** Payloads recorded from a real engine run on the bundled sample corpus
 * (seed 42). The UI tests replay these through a mock fetch, so no engine
 * is ever built or contacted.
 */

import type { MapPayload, SeriesPoint, SummaryPayload, TopicPayload } from "../src/types";

export const SUMMARY: SummaryPayload = {
  date_max: "2022-01-30",
  date_min: "2022-01-01",
  distribution: { NEG: 0.5, NEU: 0.4, POS: 0.1 },
  records: 1000,
};

export const MAP_JAN24: MapPayload = {
  DE: { count: 6, score: -0.3333333333333333 },
  FR: { count: 7, score: 0.0 },
  GB: { count: 6, score: -0.6666666666666666 },
  IN: { count: 6, score: -0.16666666666666666 },
  PL: { count: 7, score: -0.5714285714285714 },
  RU: { count: 6, score: -0.6666666666666666 },
  UA: { count: 14, score: -0.2857142857142857 },
  US: { count: 14, score: -0.42857142857142855 },
};

export const MAP_JAN10: MapPayload = {
  UA: { count: 14, score: -0.14285714285714285 },
  US: { count: 13, score: -0.38461538461538464 },
};

export const TOPICS_NEG_JAN24: TopicPayload[] = [
  {
    topic: 0,
    words: [
      ["convoy", 0.19608163265306122],
      ["putin", 0.17975510204081632],
      ["tanks", 0.17975510204081632],
      ["threat", 0.16342857142857142],
      ["russian", 0.14710204081632652],
      ["poland", 0.08179591836734694],
    ],
  },
  {
    topic: 1,
    words: [
      ["buildup", 0.23981566820276498],
      ["offensive", 0.23981566820276498],
      ["crisis", 0.20294930875576037],
      ["shelling", 0.16608294930875575],
      ["nato", 0.05548387096774193],
    ],
  },
];

export const TOPICS_NEU_JAN24: TopicPayload[] = [
  {
    topic: 0,
    words: [
      ["briefing", 0.11546706241240004],
      ["statement", 0.10310000824470278],
      ["talks", 0.09897765685547036],
      ["minister", 0.09073295407700553],
    ],
  },
];

export const TOPICS_POS_JAN24: TopicPayload[] = []; // slice skipped for size

export const TOPICS_UA: TopicPayload[] = [
  {
    topic: 0,
    words: [
      ["putin", 0.3825940431733309],
      ["attack", 0.14577830403497585],
      ["fear", 0.10023681573913835],
      ["press", 0.10023681573913835],
    ],
  },
];

export const SERIES_UA: SeriesPoint[] = [
  { count: 6, date: "2022-01-01" },
  { count: 4, date: "2022-01-02" },
  { count: 6, date: "2022-01-03" },
  { count: 4, date: "2022-01-04" },
  { count: 6, date: "2022-01-05" },
  { count: 4, date: "2022-01-06" },
  { count: 6, date: "2022-01-07" },
  { count: 4, date: "2022-01-08" },
  { count: 6, date: "2022-01-09" },
  { count: 14, date: "2022-01-10" },
  { count: 4, date: "2022-01-11" },
  { count: 6, date: "2022-01-12" },
  { count: 4, date: "2022-01-13" },
  { count: 6, date: "2022-01-14" },
  { count: 4, date: "2022-01-15" },
  { count: 6, date: "2022-01-16" },
  { count: 4, date: "2022-01-17" },
  { count: 6, date: "2022-01-18" },
  { count: 4, date: "2022-01-19" },
  { count: 6, date: "2022-01-20" },
  { count: 4, date: "2022-01-21" },
  { count: 6, date: "2022-01-22" },
  { count: 4, date: "2022-01-23" },
  { count: 14, date: "2022-01-24" },
  { count: 4, date: "2022-01-25" },
  { count: 6, date: "2022-01-26" },
  { count: 4, date: "2022-01-27" },
  { count: 6, date: "2022-01-28" },
  { count: 4, date: "2022-01-29" },
  { count: 6, date: "2022-01-30" },
];

/** Minimal world geometry for render tests: three countries, one absent from
 * most payloads. Shapes are simple boxes; ids are real alpha-2 codes. */
export const WORLD_FIXTURE = {
  type: "FeatureCollection" as const,
  features: [
    {
      type: "Feature" as const,
      id: "UA",
      properties: { name: "Ukraine" },
      geometry: {
        type: "Polygon" as const,
        coordinates: [
          [
            [30, 50],
            [35, 50],
            [35, 45],
            [30, 45],
            [30, 50],
          ],
        ],
      },
    },
    {
      type: "Feature" as const,
      id: "US",
      properties: { name: "United States" },
      geometry: {
        type: "Polygon" as const,
        coordinates: [
          [
            [-120, 45],
            [-80, 45],
            [-80, 30],
            [-120, 30],
            [-120, 45],
          ],
        ],
      },
    },
    {
      type: "Feature" as const,
      id: "JP",
      properties: { name: "Japan" },
      geometry: {
        type: "MultiPolygon" as const,
        coordinates: [
          [
            [
              [138, 38],
              [141, 38],
              [141, 35],
              [138, 35],
              [138, 38],
            ],
          ],
        ],
      },
    },
  ],
};
