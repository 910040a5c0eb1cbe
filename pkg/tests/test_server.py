"""Read-only API routing, error contracts, and live-server behavior."""

import json
import threading
import urllib.error
import urllib.request
from concurrent.futures import ThreadPoolExecutor
from datetime import date, timedelta

import pytest

from helpers import make_labeled
from oatlas.labeling import Sentiment
from oatlas.server import make_server, render_body, route
from oatlas.snapshot import build_snapshot, load_snapshot, save_snapshot
from oatlas.timeseries import volume_series
from oatlas.topicmodel import TopicSummary

POS, NEU, NEG = Sentiment.POS, Sentiment.NEU, Sentiment.NEG
D0 = date(2022, 1, 1)


@pytest.fixture(scope="module")
def labeled_fixture():
    labeled = []
    spec = [
        (D0, "UA", [POS, POS, NEG, NEU]),
        (D0, "US", [NEG, NEG]),
        (D0, None, [NEU]),
        (D0 + timedelta(days=1), "UA", [NEG, NEU, NEU]),
        (D0 + timedelta(days=2), "DE", [POS]),
    ]
    i = 0
    for day, country, sentiments in spec:
        for s in sentiments:
            labeled.append(make_labeled(f"r{i}", day, s, country=country))
            i += 1
    return labeled


@pytest.fixture(scope="module")
def snapshot(labeled_fixture):
    topics = {
        "date=2022-01-01|sentiment=NEG": [
            TopicSummary(0, (("escalation", 0.4), ("tension", 0.3)))
        ],
        "country=UA": [TopicSummary(0, (("resolve", 0.5),))],
        "all": [TopicSummary(0, (("corpus", 0.2),))],
    }
    return build_snapshot(
        labeled_fixture,
        vocab_size=57,
        topics=topics,
        skipped=[{"key": "date=2022-01-03|sentiment=POS", "docs": 2, "reason": "too small"}],
    )


class TestSummary:
    def test_fixture_stats(self, snapshot):
        status, body = route(snapshot, "/api/summary", {})
        assert status == 200
        assert body["records"] == 11
        assert body["date_min"] == "2022-01-01"
        assert body["date_max"] == "2022-01-03"
        assert sum(body["distribution"].values()) == pytest.approx(1.0, abs=1e-9)

    def test_no_snapshot_503(self):
        status, body = route(None, "/api/summary", {})
        assert status == 503
        assert "error" in body

    def test_unknown_path_404(self, snapshot):
        status, _ = route(snapshot, "/api/nope", {})
        assert status == 404


class TestMap:
    def test_only_countries_with_data_present(self, snapshot):
        status, body = route(snapshot, "/api/map", {"date": "2022-01-03"})
        assert status == 200
        assert set(body) == {"DE"}
        assert body["DE"]["count"] == 1 and body["DE"]["score"] == 1.0

    def test_unresolved_not_a_map_country(self, snapshot):
        _, body = route(snapshot, "/api/map", {"date": "2022-01-01"})
        assert set(body) == {"UA", "US"}

    def test_values_match_aggregation(self, snapshot, labeled_fixture):
        _, body = route(snapshot, "/api/map", {"date": "2022-01-01"})
        day_ua = [
            lr for lr in labeled_fixture
            if lr.record.date == D0 and lr.country == "UA"
        ]
        n_pos = sum(1 for lr in day_ua if lr.sentiment is POS)
        n_neg = sum(1 for lr in day_ua if lr.sentiment is NEG)
        assert body["UA"]["count"] == len(day_ua)
        assert body["UA"]["score"] == pytest.approx((n_pos - n_neg) / len(day_ua))

    def test_scores_bounded_and_dates_in_range(self, snapshot):
        day = date.fromisoformat(snapshot.date_min)
        while day.isoformat() <= snapshot.date_max:
            status, body = route(snapshot, "/api/map", {"date": day.isoformat()})
            assert status == 200
            for cell in body.values():
                assert -1.0 <= cell["score"] <= 1.0
                assert cell["count"] > 0
            day += timedelta(days=1)

    def test_garbage_date_400(self, snapshot):
        for garbage in ("garbage", "2022-13-45", "01/02/2022", ""):
            status, body = route(snapshot, "/api/map", {"date": garbage})
            assert status == 400
            assert "error" in body

    def test_out_of_range_400(self, snapshot):
        status, _ = route(snapshot, "/api/map", {"date": "2021-12-31"})
        assert status == 400
        status, _ = route(snapshot, "/api/map", {"date": "2022-02-01"})
        assert status == 400


class TestTopics:
    def test_stored_partition_served(self, snapshot):
        status, body = route(
            snapshot, "/api/topics", {"date": "2022-01-01", "sentiment": "NEG"}
        )
        assert status == 200
        assert body[0]["words"][0] == ["escalation", 0.4]

    def test_skipped_partition_empty_list_not_error(self, snapshot):
        status, body = route(
            snapshot, "/api/topics", {"date": "2022-01-03", "sentiment": "POS"}
        )
        assert status == 200
        assert body == []

    def test_conflicting_filters_400(self, snapshot):
        status, body = route(
            snapshot, "/api/topics", {"country": "UA", "keyword": "putin"}
        )
        assert status == 400
        assert "mutually exclusive" in body["error"]

    def test_country_drilldown(self, snapshot):
        status, body = route(snapshot, "/api/topics", {"country": "UA"})
        assert status == 200
        assert body[0]["words"][0][0] == "resolve"

    def test_no_filters_serves_whole_corpus_topics(self, snapshot):
        status, body = route(snapshot, "/api/topics", {})
        assert status == 200
        assert body[0]["words"][0][0] == "corpus"

    def test_bad_sentiment_400(self, snapshot):
        status, _ = route(snapshot, "/api/topics", {"sentiment": "HAPPY"})
        assert status == 400


class TestTimeseries:
    def test_totals_series(self, snapshot):
        status, body = route(snapshot, "/api/timeseries", {})
        assert status == 200
        assert [row["count"] for row in body] == [7, 3, 1]
        assert [row["date"] for row in body] == ["2022-01-01", "2022-01-02", "2022-01-03"]

    def test_filtered_series_matches_module_output(self, snapshot, labeled_fixture):
        status, body = route(snapshot, "/api/timeseries", {"sentiment": "POS"})
        assert status == 200
        module_series = volume_series(labeled_fixture, sentiment=POS)
        assert [row["count"] for row in body] == list(module_series.counts)

    def test_country_filter(self, snapshot):
        _, body = route(snapshot, "/api/timeseries", {"country": "UA", "sentiment": "NEG"})
        assert [row["count"] for row in body] == [1, 1, 0]

    def test_unknown_country_400(self, snapshot):
        status, body = route(snapshot, "/api/timeseries", {"country": "ZZ"})
        assert status == 400
        assert "ZZ" in body["error"]

    def test_unresolved_bucket_is_queryable(self, snapshot):
        status, body = route(snapshot, "/api/timeseries", {"country": "UNRESOLVED"})
        assert status == 200
        assert [row["count"] for row in body] == [1, 0, 0]


class TestDeterminism:
    def test_identical_requests_identical_bytes(self, snapshot):
        for path, params in [
            ("/api/summary", {}),
            ("/api/map", {"date": "2022-01-01"}),
            ("/api/topics", {"country": "UA"}),
            ("/api/timeseries", {"country": "UA"}),
        ]:
            _, b1 = render_body(route(snapshot, path, dict(params)))
            _, b2 = render_body(route(snapshot, path, dict(params)))
            assert b1 == b2

    def test_snapshot_save_load_preserves_api(self, snapshot, tmp_path):
        path = tmp_path / "snap.json"
        save_snapshot(snapshot, path)
        loaded = load_snapshot(path)
        for api_path, params in [
            ("/api/summary", {}),
            ("/api/map", {"date": "2022-01-02"}),
            ("/api/topics", {"date": "2022-01-01", "sentiment": "NEG"}),
            ("/api/timeseries", {"sentiment": "NEU"}),
        ]:
            assert render_body(route(snapshot, api_path, dict(params))) == render_body(
                route(loaded, api_path, dict(params))
            )


@pytest.fixture
def live_server(snapshot):
    httpd = make_server(snapshot, port=0, cors_origin="http://localhost:5173")
    thread = threading.Thread(target=httpd.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{httpd.server_address[1]}"
    httpd.shutdown()
    httpd.server_close()


class TestLiveServer:
    def test_get_summary_over_http(self, live_server):
        with urllib.request.urlopen(f"{live_server}/api/summary") as resp:
            assert resp.status == 200
            assert resp.headers["Access-Control-Allow-Origin"] == "http://localhost:5173"
            body = json.loads(resp.read())
        assert body["records"] == 11

    def test_error_status_over_http(self, live_server):
        with pytest.raises(urllib.error.HTTPError) as err:
            urllib.request.urlopen(f"{live_server}/api/map?date=garbage")
        assert err.value.code == 400
        assert "error" in json.loads(err.value.read())

    def test_concurrent_identical_requests_identical_bodies(self, live_server):
        url = f"{live_server}/api/map?date=2022-01-01"

        def fetch(_):
            with urllib.request.urlopen(url) as resp:
                return resp.read()

        with ThreadPoolExecutor(max_workers=8) as pool:
            bodies = list(pool.map(fetch, range(24)))
        assert len(set(bodies)) == 1

    def test_reload_swaps_snapshot(self, snapshot, tmp_path):
        path = tmp_path / "snap.json"
        save_snapshot(snapshot, path)
        httpd = make_server(None, port=0)
        try:
            thread = threading.Thread(target=httpd.serve_forever, daemon=True)
            thread.start()
            base = f"http://127.0.0.1:{httpd.server_address[1]}"
            with pytest.raises(urllib.error.HTTPError) as err:
                urllib.request.urlopen(f"{base}/api/summary")
            assert err.value.code == 503
            httpd.reload_snapshot(path)
            with urllib.request.urlopen(f"{base}/api/summary") as resp:
                assert json.loads(resp.read())["records"] == 11
        finally:
            httpd.shutdown()
            httpd.server_close()
