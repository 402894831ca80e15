#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "vlcalloc/error.hpp"
#include "vlcalloc/radiometry.hpp"
#include "vlcalloc/report.hpp"

using namespace vlcalloc;

namespace {

AllocationProblem lone_user(double signal) {
    AllocationProblem p;
    p.users = p.aps = p.wavelengths = p.branches = 1;
    p.signal = {signal};
    p.background = {0.0};
    p.receiver_noise = 1e-13;
    p.threshold = db_to_linear(15.6);
    p.electrical_bandwidth = 5e9;
    p.wavelength_names = {"red"};
    return p;
}

std::size_t occurrences(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
    return n;
}

std::vector<UserReportRow> sample_rows() {
    UserReportRow a;
    a.user_id = 1;
    a.label = "desk, \"north\"";
    a.location = {0.5, 0.5, 1.0};
    a.access_point = 2;
    a.wavelength = "red";
    a.branch = 3;
    a.sinr_db = 21.73;
    a.bandwidth_hz = 5e10;
    a.bandwidth_at_least = true;
    a.rate_bps = 7123000000;
    UserReportRow b = a;
    b.user_id = 2;
    b.label = "rack 0.1";
    b.location = {0.1, 2.0 / 3.0, 1.0 / 7.0};
    b.wavelength = "yellow";
    b.sinr_db = 16.66;
    b.bandwidth_hz = 8.123456789e9;
    b.bandwidth_at_least = false;
    b.rate_bps = 0;
    return {a, b};
}

}  // namespace

TEST_CASE("data rate") {
    SUBCASE("bandwidth-limited") {
        const auto p = lone_user(1e-9);
        const auto s = Assignment::from_choices(p, {{0, 0, 0}});
        CHECK(data_rate(p, s, 0, {8e9, false}) == 8e9);
        CHECK(data_rate(p, s, 0, {8.0000005e9, false}) == 8e9);
    }
    SUBCASE("noise-limited crossing at 7.2 GHz") {
        // Receiver noise grows linearly with bandwidth, so the threshold is
        // met up to B = P * 5e9 / (sigma * threshold).
        const auto p0 = lone_user(1.0);
        const double signal = p0.threshold * p0.receiver_noise * 7.2e9 / 5e9;
        const auto p = lone_user(signal);
        const auto s = Assignment::from_choices(p, {{0, 0, 0}});
        const double crossing = signal * 5e9 / (p.receiver_noise * p.threshold);
        CHECK(std::abs(crossing - 7.2e9) < 1.0);
        CHECK(std::abs(data_rate(p, s, 0, {20e9, false}) - 7.2e9) <= 1e6);
        CHECK(std::abs(data_rate(p, s, 0, {5e10, true}) - 7.2e9) <= 1e6);
    }
    SUBCASE("threshold never met") {
        // Below threshold even with the noise of a 1 MHz band.
        const auto p = lone_user(1e-19);
        const auto s = Assignment::from_choices(p, {{0, 0, 0}});
        CHECK(data_rate(p, s, 0, {8e9, false}) == 0.0);
    }
    SUBCASE("monotone in signal power") {
        double last = 0.0;
        for (double sig : {1e-13, 1e-12, 3e-12, 5e-12, 1e-11}) {
            const auto p = lone_user(sig);
            const double r = data_rate(p, Assignment::from_choices(p, {{0, 0, 0}}), 0, {2e10, false});
            CHECK(r >= last);
            last = r;
        }
    }
    SUBCASE("unassigned user") {
        const auto p = lone_user(1e-12);
        CHECK_THROWS_AS(data_rate(p, Assignment::for_problem(p), 0, {8e9, false}), Error);
    }
}

TEST_CASE("table round trips") {
    const auto rows = sample_rows();
    CHECK(rows_from_csv(rows_to_csv(rows)) == rows);
    CHECK(rows_from_json(rows_to_json(rows)) == rows);
    CHECK(rows_to_csv({}) ==
          "user_id,label,x,y,z,access_point,wavelength,branch,sinr_db,bandwidth_hz,bandwidth_at_least,rate_bps\n");
    CHECK(rows_from_csv(rows_to_csv({})).empty());
    CHECK(rows_from_json(rows_to_json({})).empty());
    CHECK_THROWS_AS(rows_from_csv("user,label\n"), Error);
    CHECK_THROWS_AS(rows_from_json("{\"rows\": 1}"), Error);
}

TEST_CASE("charts") {
    const auto rows = sample_rows();
    const auto svg = svg_chart(rows, Metric::Sinr, 15.6);
    CHECK(svg.find("viewBox=\"0 0 800 400\"") != std::string::npos);
    CHECK(occurrences(svg, "fill=\"#4a78b5\"") == rows.size());
    CHECK(svg.find("stroke-dasharray") != std::string::npos);
    CHECK(svg.find("desk, &quot;north&quot;") != std::string::npos);
    CHECK(occurrences(svg_chart({}, Metric::Rate), "fill=\"#4a78b5\"") == 0);
}

TEST_CASE("emitted files are byte-deterministic") {
    const auto rows = sample_rows();
    const auto a = fixtures::scratch_dir("report-a");
    const auto b = fixtures::scratch_dir("report-b");
    const std::vector<ReportFormat> all{ReportFormat::Csv, ReportFormat::Json, ReportFormat::Svg};
    const auto wa = emit_report(rows, all, a, 15.6);
    const auto wb = emit_report(rows, all, b, 15.6);
    REQUIRE(wa.size() == 5);
    for (std::size_t i = 0; i < wa.size(); ++i) {
        CHECK(wa[i].filename() == wb[i].filename());
        CHECK(fixtures::slurp(wa[i]) == fixtures::slurp(wb[i]));
    }
    CHECK(emit_report(rows, {ReportFormat::Json}, a).size() == 1);
    CHECK_THROWS_AS(parse_report_format("pdf"), Error);
    std::filesystem::remove_all(a);
    std::filesystem::remove_all(b);
}

TEST_CASE("office rows mirror the solver result") {
    const auto& t = fixtures::traced("office");
    const auto result = solve_bnb(t.problem);
    REQUIRE(result.feasible);
    const auto doc = make_result_document(t.config, t.channel, t.problem, result);
    REQUIRE(doc.rows.size() == 8);
    for (std::size_t us = 0; us < 8; ++us) {
        const auto& r = doc.rows[us];
        CHECK(r.access_point == result.choices[us].ap + 1);
        CHECK(r.branch == result.choices[us].branch + 1);
        CHECK(r.wavelength == t.config.wavelengths[result.choices[us].wavelength].name);
        CHECK(r.sinr_db == round_db(linear_to_db(result.sinr_linear[us])));
        CHECK(r.rate_bps > 0);
        CHECK(r.location == t.config.stations[us].position);
    }
    CHECK(parse_result(serialize_result(doc)) == doc);
    CHECK(serialize_result(parse_result(serialize_result(doc))) == serialize_result(doc));
    CHECK_THROWS_AS(parse_result("{"), Error);
    CHECK_THROWS_AS(load_result_file("/nonexistent/result.json"), Error);
}
