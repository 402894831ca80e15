#include <string>
#include <vector>

#include "vlcalloc/error.hpp"
#include "vlcalloc/scene.hpp"

namespace vlcalloc {

namespace {

std::vector<Wavelength> rygb() {
    // Per-LD optical power and photodetector responsivity.
    return {
        {"red", 0.8, 0.4},
        {"yellow", 0.5, 0.35},
        {"green", 0.3, 0.3},
        {"blue", 0.3, 0.2},
    };
}

ReceiverStation station(int id, std::string label, Vec3 pos) {
    return {id, std::move(label), pos, default_adr_branches()};
}

ScenarioConfig office() {
    ScenarioConfig c;
    c.name = "office";
    c.room = {4.0, 4.0, 3.0, 0.8, 0.8, 0.3, 60.0};
    c.wavelengths = rygb();
    for (Vec3 p : {Vec3{1, 1, 3}, Vec3{1, 3, 3}, Vec3{3, 1, 3}, Vec3{3, 3, 3}}) {
        c.transmitters.push_back({p, {0, 0, -1}, 9, 60.0});
    }
    const Vec3 users[] = {{0.5, 0.5, 1}, {0.5, 2.5, 1}, {1.5, 1.5, 1}, {1.5, 3.5, 1},
                          {2.5, 0.5, 1}, {2.5, 2.5, 1}, {3.5, 1.5, 1}, {3.5, 3.5, 1}};
    int id = 1;
    for (const auto& u : users) {
        c.stations.push_back(station(id, "user " + std::to_string(id), u));
        ++id;
    }
    return c;
}

// Six-seat section (two rows of three) of a single-aisle cabin. The cabin is
// 3.63 m wide along y; rows are spaced by the seat pitch along x and the
// passengers face +x. Device 1 sits at the seat centre, devices 2 and 3 at
// the two front corners. Device 2 takes the -y corner in the first row and
// the +y corner in the second.
ScenarioConfig cabin() {
    constexpr double pitch = 0.81;
    constexpr double seat_width = 0.45;
    constexpr double seat_height = 0.45;
    constexpr double window_gap = 0.30;  // wall to first seat edge
    constexpr double ceiling = 2.10;
    constexpr double rlu_height = 1.20;      // reading-light panel, 0.75 m above the cushion
    constexpr double corner_offset = 0.175;  // along x and y from the seat centre

    ScenarioConfig c;
    c.name = "cabin";
    c.room = {2.0 * pitch, 3.63, ceiling, 0.8, 0.8, 0.3, 60.0};
    c.wavelengths = rygb();

    int id = 1;
    for (int row = 0; row < 2; ++row) {
        const double xc = pitch * (row + 0.5);
        const double side = row == 0 ? -1.0 : 1.0;
        for (int seat = 0; seat < 3; ++seat) {
            const double yc = window_gap + seat_width * (seat + 0.5);
            const int passenger = row * 3 + seat + 1;
            c.transmitters.push_back({{xc, yc, rlu_height}, {0, 0, -1}, 3, 19.0});
            const Vec3 devices[] = {
                {xc, yc, seat_height},
                {xc + corner_offset, yc + side * corner_offset, seat_height},
                {xc + corner_offset, yc - side * corner_offset, seat_height},
            };
            for (int d = 0; d < 3; ++d) {
                c.stations.push_back(station(
                    id++, "passenger " + std::to_string(passenger) + " device " + std::to_string(d + 1), devices[d]));
            }
        }
        Blocker seats;
        seats.kind = Blocker::Kind::Box;
        seats.lo = {xc - 0.5 * seat_width, window_gap, 0.0};
        seats.hi = {xc + 0.5 * seat_width, window_gap + 3 * seat_width, seat_height};
        seats.label = "seat row " + std::to_string(row + 1);
        c.blockers.push_back(seats);
    }
    return c;
}

// One pod: 6 m (x) by 5 m (y) by 3 m, two rows of five racks under the two
// lines of access points, receivers on the centre of each rack top.
ScenarioConfig datacentre() {
    constexpr double rack_depth = 1.0;  // along x
    constexpr double rack_width = 0.6;  // along y
    constexpr double rack_height = 2.0;
    constexpr double first_rack_y = 1.0;

    ScenarioConfig c;
    c.name = "datacentre";
    c.room = {6.0, 5.0, 3.0, 0.8, 0.8, 0.3, 60.0};
    c.wavelengths = rygb();
    for (double x : {1.6, 4.4}) {
        for (double y : {1.5, 2.5, 3.5}) c.transmitters.push_back({{x, y, 3.0}, {0, 0, -1}, 9, 60.0});
    }
    int id = 1;
    for (double x : {1.6, 4.4}) {
        for (int r = 0; r < 5; ++r) {
            const double y = first_rack_y + rack_width * (r + 0.5);
            c.stations.push_back(station(id, "rack " + std::to_string(id), {x, y, rack_height}));
            Blocker rack;
            rack.kind = Blocker::Kind::Box;
            rack.lo = {x - 0.5 * rack_depth, y - 0.5 * rack_width, 0.0};
            rack.hi = {x + 0.5 * rack_depth, y + 0.5 * rack_width, rack_height};
            rack.label = "rack " + std::to_string(id);
            c.blockers.push_back(rack);
            ++id;
        }
    }
    return c;
}

}  // namespace

std::vector<std::string> builtin_scenario_names() { return {"office", "cabin", "datacentre"}; }

ScenarioConfig builtin_scenario(const std::string& name) {
    if (name == "office") return office();
    if (name == "cabin") return cabin();
    if (name == "datacentre") return datacentre();
    std::string valid;
    for (const auto& n : builtin_scenario_names()) valid += (valid.empty() ? "" : ", ") + n;
    throw Error("unknown scenario '" + name + "' (valid: " + valid + ")");
}

}  // namespace vlcalloc
