import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { App } from "../src/app";
import { MAP_JAN10, MAP_JAN24, SUMMARY, TOPICS_NEG_JAN24, TOPICS_UA } from "./fixtures";
import { MockApi, settle } from "./mock-api";

function makeApp(mock: MockApi): App {
  return new App(new ApiClient(mock.fetch));
}

describe("date navigation", () => {
  it("issues exactly four fetches: one map, three sentiment topic slices", async () => {
    const mock = new MockApi();
    const app = makeApp(mock);
    await app.onDateChange("2022-01-24");
    expect(mock.calls.length).toBe(4);
    expect(mock.callsTo("/api/map").length).toBe(1);
    const topicCalls = mock.callsTo("/api/topics");
    expect(topicCalls.length).toBe(3);
    expect(topicCalls.some((u) => u.includes("sentiment=POS"))).toBe(true);
    expect(topicCalls.some((u) => u.includes("sentiment=NEU"))).toBe(true);
    expect(topicCalls.some((u) => u.includes("sentiment=NEG"))).toBe(true);
  });

  it("commits map and panels for the requested date", async () => {
    const mock = new MockApi();
    const app = makeApp(mock);
    await app.onDateChange("2022-01-24");
    expect(app.state.selectedDate).toBe("2022-01-24");
    expect(app.state.map).toEqual(MAP_JAN24);
    expect(app.state.topics.NEG).toEqual(TOPICS_NEG_JAN24);
    expect(app.state.topics.POS).toEqual([]); // skipped slice renders as no data
    expect(app.state.error).toBeNull();
  });

  it("drops stale responses: rapid double change commits only the last date", async () => {
    const mock = new MockApi(true); // hold responses
    const app = makeApp(mock);
    const first = app.onDateChange("2022-01-24");
    const second = app.onDateChange("2022-01-10");
    // Release the *first* navigation's responses only after the second landed.
    const firstBatch = mock.pending.splice(0, 4);
    mock.releaseAll(); // second navigation resolves first
    await second;
    expect(app.state.map).toEqual(MAP_JAN10);
    for (const call of firstBatch) {
      call.release(); // stale responses arrive late
    }
    await first;
    await settle();
    expect(app.state.selectedDate).toBe("2022-01-10");
    expect(app.state.map).toEqual(MAP_JAN10); // stale payload never committed
  });

  it("keeps the previous map and surfaces a banner when the fetch fails", async () => {
    const mock = new MockApi();
    const app = makeApp(mock);
    await app.onDateChange("2022-01-24");
    const before = app.state.map;
    mock.failNext = 4;
    await app.onDateChange("2022-01-10");
    expect(app.state.map).toBe(before); // previous map retained
    expect(app.state.selectedDate).toBe("2022-01-24"); // state unchanged
    expect(app.state.error).toContain("network unreachable");
  });

  it("a 400 from the API becomes an inline message with state unchanged", async () => {
    const mock = new MockApi();
    const app = makeApp(mock);
    await app.onDateChange("2022-01-24");
    await app.onDateChange("garbage-date");
    expect(app.state.selectedDate).toBe("2022-01-24");
    expect(app.state.map).toEqual(MAP_JAN24);
    expect(app.state.error).toContain("400");
  });
});

describe("country drill-down", () => {
  async function appOnJan24(mock: MockApi): Promise<App> {
    const app = makeApp(mock);
    await app.onDateChange("2022-01-24");
    mock.calls.length = 0;
    return app;
  }

  it("fetches country topics and series on click", async () => {
    const mock = new MockApi();
    const app = await appOnJan24(mock);
    await app.onCountryClick("UA");
    expect(mock.calls.length).toBe(2);
    expect(mock.calls[0]).toContain("/api/topics?");
    expect(mock.calls[0]).toContain("country=UA");
    expect(mock.calls[0]).toContain("date=2022-01-24");
    expect(mock.calls[1]).toContain("/api/timeseries?country=UA");
    expect(app.state.selectedCountry).toBe("UA");
    expect(app.state.countryPanel?.series.length).toBe(30);
  });

  it("clicking a country with no data is a no-op", async () => {
    const mock = new MockApi();
    const app = await appOnJan24(mock);
    await app.onCountryClick("JP");
    expect(mock.calls.length).toBe(0);
    expect(app.state.selectedCountry).toBeNull();
    expect(app.state.countryPanel).toBeNull();
  });

  it("closing the drill-down leaves map state unchanged", async () => {
    const mock = new MockApi();
    const app = await appOnJan24(mock);
    await app.onCountryClick("UA");
    const mapBefore = app.state.map;
    app.closeCountry();
    expect(app.state.countryPanel).toBeNull();
    expect(app.state.selectedCountry).toBeNull();
    expect(app.state.map).toBe(mapBefore);
    expect(app.state.selectedDate).toBe("2022-01-24");
  });
});

describe("init", () => {
  it("loads the summary then navigates to the newest date", async () => {
    const mock = new MockApi();
    const app = makeApp(mock);
    await app.init();
    expect(app.state.summary).toEqual(SUMMARY);
    expect(app.state.selectedDate).toBe(SUMMARY.date_max);
    expect(mock.callsTo("/api/summary").length).toBe(1);
  });

  it("only ever calls the four known endpoints", async () => {
    const mock = new MockApi();
    const app = makeApp(mock);
    await app.init();
    await app.onDateChange("2022-01-24");
    await app.onCountryClick("UA");
    const allowed = ["/api/summary", "/api/map", "/api/topics", "/api/timeseries"];
    for (const url of mock.calls) {
      expect(allowed.some((p) => url.split("?")[0].endsWith(p))).toBe(true);
    }
  });
});

describe("country topics fixture", () => {
  it("country-only topics payload round-trips through the client", async () => {
    const mock = new MockApi();
    const client = new ApiClient(mock.fetch);
    const topics = await client.topics({ country: "UA" });
    expect(topics).toEqual(TOPICS_UA);
  });
});
