#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "vlcalloc/channel.hpp"
#include "vlcalloc/error.hpp"
#include "vlcalloc/radiometry.hpp"

using namespace vlcalloc;

namespace {

constexpr double kPiTest = 3.14159265358979323846;
constexpr double kC = 299792458.0;

TransmitterUnit unit_source(Vec3 pos, Vec3 dir, double order) {
    TransmitterUnit t;
    t.position = pos;
    t.orientation = dir;
    t.lambertian_order = order;
    t.power = {1.0};
    t.ld_count = 1;
    return t;
}

ReceiverBranch up_branch(double fov = 90.0) { return {0.0, 90.0, fov, 1e-5}; }

ImpulseResponse ir_with(double bin_width, std::initializer_list<std::pair<std::size_t, double>> bins,
                        std::size_t size = 64) {
    ImpulseResponse ir;
    ir.bin_width = bin_width;
    ir.bins.assign(size, 0.0);
    for (auto [i, v] : bins) ir.bins[i] = v;
    return ir;
}

// Small empty room with one transmitter and one upward-looking receiver.
ScenarioConfig dark_room(double reflectance) {
    ScenarioConfig c;
    c.name = "dark";
    c.room = {4.0, 4.0, 3.0, reflectance, reflectance, reflectance, 60.0};
    c.first_order_element_area = 0.04;
    c.second_order_element_area = 0.16;
    c.wavelengths = {{"red", 1.0, 0.4}};
    c.transmitters = {{{2, 2, 3}, {0, 0, -1}, 1, 60.0}};
    c.stations = {{1, "rx", {1.5, 2.0, 1.0}, {up_branch()}}};
    return c;
}

std::size_t nonzero_bins(const ImpulseResponse& ir) {
    std::size_t n = 0;
    for (double b : ir.bins) n += b > 0.0;
    return n;
}

}  // namespace

TEST_CASE("LOS link equation") {
    const auto tx = unit_source({0, 0, 2}, {0, 0, -1}, 1.0);
    const double axial = los_power(tx, 0, {0, 0, 0}, up_branch());
    CHECK(std::abs(axial - 7.9577e-7) < 1e-11);
    CHECK(axial == doctest::Approx(2.0 / (2.0 * kPiTest) * 1e-5 / 4.0).epsilon(1e-14));

    // Boresight 25 degrees off the arrival direction, FOV 21 degrees.
    CHECK(los_power(tx, 0, {0, 0, 0}, {0.0, 65.0, 21.0, 1e-5}) == 0.0);
    CHECK(los_power(tx, 0, {0, 0, 0}, {0.0, 65.0, 26.0, 1e-5}) > 0.0);

    // Emission and incidence both at 30 degrees.
    const auto tilted = unit_source({0, 0, 2}, {std::sin(kPiTest / 6), 0, -std::cos(kPiTest / 6)}, 1.0);
    const double oblique = los_power(tilted, 0, {0, 0, 0}, {0.0, 60.0, 90.0, 1e-5});
    CHECK(std::abs(oblique - 5.9683e-7) < 1e-11);
    CHECK(oblique == doctest::Approx(axial * std::cos(kPiTest / 6) * std::cos(kPiTest / 6)).epsilon(1e-12));

    CHECK_THROWS_AS(los_power(tx, 0, {0, 0, 2}, up_branch()), Error);

    Blocker wall;
    wall.kind = Blocker::Kind::Plane;
    wall.lo = {-1, -1, 1};
    wall.hi = {1, 1, 1};
    CHECK(los_power(tx, 0, {0, 0, 0}, up_branch(), {wall}) == 0.0);
}

TEST_CASE("received optical power sums bins") {
    CHECK(received_optical_power(ir_with(1e-11, {{3, 1e-6}})) == 1e-6);
    CHECK(received_optical_power(ir_with(1e-11, {})) == 0.0);
    CHECK(received_optical_power(ir_with(1e-11, {{1, 3e-7}, {9, 2e-7}})) == doctest::Approx(5e-7).epsilon(1e-15));
}

TEST_CASE("3-dB bandwidth") {
    const double step10 = 1.0 / (static_cast<double>(kBandwidthGridPoints) * 10e-12);
    SUBCASE("single bin is flat") {
        const auto bw = bandwidth_3db(ir_with(10e-12, {{7, 1e-6}}));
        CHECK(bw.at_least);
        CHECK(bw.hz == doctest::Approx(0.5 / 10e-12));
    }
    SUBCASE("two equal paths 50 ps apart") {
        // |H|^2 = 2 + 2 cos(2 pi f tau) halves at f = 1 / (4 tau).
        const auto bw = bandwidth_3db(ir_with(10e-12, {{2, 1e-6}, {7, 1e-6}}));
        CHECK_FALSE(bw.at_least);
        CHECK(std::abs(bw.hz - 1.0 / (4.0 * 50e-12)) <= step10);
        CHECK(std::abs(bw.hz - 5.0e9) <= step10);
    }
    SUBCASE("two equal paths 25 ps apart") {
        const double step5 = 1.0 / (static_cast<double>(kBandwidthGridPoints) * 5e-12);
        const auto bw = bandwidth_3db(ir_with(5e-12, {{0, 1e-6}, {5, 1e-6}}));
        CHECK_FALSE(bw.at_least);
        CHECK(std::abs(bw.hz - 10.0e9) <= step5);
    }
    CHECK_THROWS_AS(bandwidth_3db(ir_with(10e-12, {})), Error);
}

TEST_CASE("RMS delay spread") {
    CHECK(rms_delay_spread(ir_with(10e-12, {{4, 1e-6}})) == 0.0);
    const double tau = 50e-12;
    const double two = rms_delay_spread(ir_with(10e-12, {{2, 1e-6}, {7, 1e-6}}));
    CHECK(two == doctest::Approx(tau / 2.0).epsilon(1e-9));
    const double scaled = rms_delay_spread(ir_with(10e-12, {{2, 7e-3}, {7, 7e-3}}));
    CHECK(scaled == doctest::Approx(two).epsilon(1e-12));
    CHECK_THROWS_AS(rms_delay_spread(ir_with(10e-12, {})), Error);
}

TEST_CASE("non-reflecting room leaves only the LOS bin") {
    const auto scene = build_scene(dark_room(0.0));
    const auto t = trace_impulse_response(scene, 0, 0, 0, 0, TraceParams{});
    CHECK(nonzero_bins(t.ir) == 1);
    const Vec3 d = scene.config.stations[0].position - scene.transmitters[0].position;
    const auto bin = static_cast<std::size_t>(std::floor(d.norm() / kC / 10e-12));
    CHECK(t.ir.bins[bin] == doctest::Approx(los_power(scene.transmitters[0], 0, scene.config.stations[0].position,
                                                      up_branch()))
                                .epsilon(1e-12));
}

TEST_CASE("a single reflecting element adds one hand-computable bin") {
    auto scene = build_scene(dark_room(0.0));
    // Pick a wall element on the x = 0 wall at mid height.
    std::size_t pick = scene.first_order_elements.size();
    for (std::size_t i = 0; i < scene.first_order_elements.size(); ++i) {
        const auto& e = scene.first_order_elements[i];
        if (e.normal.x > 0.5 && std::abs(e.centre.y - 2.1) < 1e-9 && std::abs(e.centre.z - 2.1) < 1e-9) pick = i;
    }
    REQUIRE(pick < scene.first_order_elements.size());
    scene.first_order_elements[pick].reflectance = 0.8;
    TraceParams params;
    params.max_order = 1;
    const auto t = trace_impulse_response(scene, 0, 0, 0, 0, params);
    REQUIRE(nonzero_bins(t.ir) == 2);

    const auto& e = scene.first_order_elements[pick];
    const Vec3 tx = scene.transmitters[0].position;
    const Vec3 rx = scene.config.stations[0].position;
    // Hop 1: order-1 source pointing down onto the element.
    const Vec3 a = e.centre - tx;
    const double d1 = a.norm();
    const double cos_emit = -a.z / d1;
    const double cos_hit = -a.x / d1;
    const double incident = 2.0 / (2.0 * kPiTest) * cos_emit * cos_hit * e.area / (d1 * d1);
    // Hop 2: the element re-emits (order 1) towards the upward detector.
    const Vec3 b = rx - e.centre;
    const double d2 = b.norm();
    const double cos_out = b.x / d2;
    const double cos_in = -b.z / d2;
    const double received = incident * 0.8 * 2.0 / (2.0 * kPiTest) * cos_out * cos_in * 1e-5 / (d2 * d2);

    const auto bin = static_cast<std::size_t>(std::floor((d1 + d2) / kC / 10e-12));
    CHECK(t.ir.bins[bin] == doctest::Approx(received).epsilon(1e-12));
    CHECK(t.order_power[1] == doctest::Approx(received).epsilon(1e-12));
}

TEST_CASE("tracing rejects unmeshed scenes and grows short windows") {
    auto scene = build_scene(dark_room(0.8));
    auto bare = scene;
    bare.second_order_elements.clear();
    CHECK_THROWS_AS(ChannelTracer(bare, TraceParams{}), Error);
    TraceParams los_only;
    los_only.max_order = 0;
    CHECK_NOTHROW(ChannelTracer(bare, los_only));

    TraceParams shortw;
    shortw.window = 5e-9;  // LOS at ~6.8 ns is beyond it
    const auto t = trace_impulse_response(scene, 0, 0, 0, 0, shortw);
    CHECK(t.window_extended);
    CHECK(received_optical_power(t.ir) > 0.0);
    const auto m = compute_channel_matrix(scene, shortw, 1);
    CHECK_FALSE(m.warnings.empty());
}

TEST_CASE("binning conserves power") {
    const auto scene = build_scene(dark_room(0.8));
    for (int order = 0; order <= 2; ++order) {
        TraceParams p;
        p.max_order = order;
        const auto t = trace_impulse_response(scene, 0, 0, 0, 0, p);
        CHECK(std::abs(received_optical_power(t.ir) - t.direct_total) <= 1e-9 * t.direct_total);
        double parts = 0.0;
        for (double o : t.order_power) parts += o;
        CHECK(parts == doctest::Approx(t.direct_total).epsilon(1e-12));
        for (double b : t.ir.bins) CHECK(b >= 0.0);
    }
}

TEST_CASE("widening the field of view never lowers received power") {
    auto narrow = builtin_scenario("office");
    narrow.first_order_element_area = 0.04;
    narrow.second_order_element_area = 0.16;
    narrow.stations.resize(3);
    auto wide = narrow;
    for (auto& s : wide.stations)
        for (auto& b : s.branches) b.fov_deg = 40.0;
    const auto a = compute_channel_matrix(build_scene(narrow), TraceParams{}, 1);
    const auto b = compute_channel_matrix(build_scene(wide), TraceParams{}, 1);
    REQUIRE(a.received_power.size() == b.received_power.size());
    for (std::size_t i = 0; i < a.received_power.size(); ++i) CHECK(b.received_power[i] >= a.received_power[i]);
}

TEST_CASE("channel matrix does not depend on the worker count") {
    auto c = builtin_scenario("cabin");
    c.first_order_element_area = 0.01;
    c.second_order_element_area = 0.09;
    const auto scene = build_scene(c);
    const auto one = compute_channel_matrix(scene, TraceParams{}, 1);
    const auto four = compute_channel_matrix(scene, TraceParams{}, 4);
    CHECK(one.received_power == four.received_power);
    CHECK(one.delay_spread == four.delay_spread);
    CHECK(one.bandwidth == four.bandwidth);
    CHECK(one.scenario_hash == four.scenario_hash);
}

TEST_CASE("office channel") {
    const auto& t = fixtures::traced("office");
    CHECK(t.channel.users == 8);
    CHECK(t.channel.aps == 4);
    CHECK(t.channel.wavelengths == 4);
    CHECK(t.channel.branches == 4);
    for (double p : t.channel.received_power) CHECK(p >= 0.0);

    // AP1 to the user at (0.5, 0.5, 1) on the branch facing it.
    const ChannelTracer tracer(t.scene, TraceParams{});
    const auto link = tracer.trace(0, 0, 0);
    CHECK(link.order_power[0] > 0.0);
    CHECK(link.order_power[1] + link.order_power[2] < link.order_power[0]);
    CHECK(std::abs(received_optical_power(link.ir) - link.direct_total) <= 1e-9 * link.direct_total);

    // Received power per wavelength scales with the unit's emitted power.
    const double red = t.channel.po(0, 0, 0, 0);
    const double yellow = t.channel.po(0, 0, 1, 0);
    CHECK(yellow / red == doctest::Approx(0.5 / 0.8).epsilon(1e-12));
    CHECK(red == doctest::Approx(link.direct_total * 9 * 0.8).epsilon(1e-12));
}

TEST_CASE("per-element energy conservation in the office") {
    const auto& t = fixtures::traced("office");
    const ChannelTracer tracer(t.scene, TraceParams{});
    for (std::size_t ap = 0; ap < t.scene.transmitters.size(); ++ap) {
        std::size_t violations = 0;
        for (const auto& e : tracer.element_balance(ap)) {
            if (e.re_emitted > e.reflectance * e.incident * (1.0 + 1e-12)) ++violations;
        }
        CHECK(violations == 0);
    }
}
