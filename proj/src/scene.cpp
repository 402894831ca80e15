#include "vlcalloc/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "vlcalloc/error.hpp"
#include "vlcalloc/radiometry.hpp"

namespace vlcalloc {

namespace {

bool inside_room(const Vec3& p, const RoomSpec& room) {
    constexpr double tol = 1e-9;
    return p.x >= -tol && p.x <= room.length_x + tol && p.y >= -tol && p.y <= room.width_y + tol &&
           p.z >= -tol && p.z <= room.height_z + tol;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw Error(what);
}

struct Span {
    double start;
    double width;
};

// Full-pitch spans followed by one narrower remainder span when the edge is
// not an integer multiple of the pitch.
std::vector<Span> tile_edge(double length, double pitch) {
    std::vector<Span> spans;
    const auto full = static_cast<long>(std::floor(length / pitch + 1e-9));
    spans.reserve(static_cast<std::size_t>(full) + 1);
    for (long i = 0; i < full; ++i) spans.push_back({static_cast<double>(i) * pitch, pitch});
    const double covered = static_cast<double>(full) * pitch;
    const double rest = length - covered;
    if (rest > 1e-9 * length) spans.push_back({covered, rest});
    if (spans.empty()) spans.push_back({0.0, length});
    return spans;
}

}  // namespace

Vec3 ReceiverBranch::boresight() const {
    const double el = deg2rad(elevation_deg);
    const double az = deg2rad(azimuth_deg);
    return {std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
}

std::vector<ReceiverBranch> default_adr_branches() {
    std::vector<ReceiverBranch> branches;
    for (double az : {45.0, 135.0, 225.0, 315.0}) {
        branches.push_back({az, 70.0, 21.0, 10e-6});
    }
    return branches;
}

void ScenarioConfig::validate() const {
    require(!name.empty(), "scenario name must not be empty");
    require(room.length_x > 0 && room.width_y > 0 && room.height_z > 0, "room dimensions must be positive");
    for (double rho : {room.wall_reflectance, room.ceiling_reflectance, room.floor_reflectance}) {
        require(rho >= 0.0 && rho <= 1.0, "surface reflection coefficients must lie in [0, 1]");
    }
    require(room.surface_semi_angle_deg > 0 && room.surface_semi_angle_deg < 90,
            "surface semi-angle must lie in (0, 90) degrees");
    require(first_order_element_area > 0 && second_order_element_area > 0, "element areas must be positive");

    require(!wavelengths.empty(), "at least one wavelength is required");
    std::set<std::string> names;
    for (const auto& w : wavelengths) {
        require(!w.name.empty(), "wavelength name must not be empty");
        require(names.insert(w.name).second, "duplicate wavelength '" + w.name + "'");
        require(w.ld_power >= 0.0, "wavelength '" + w.name + "' needs a non-negative transmit power");
        require(w.responsivity > 0.0 && w.responsivity <= 1.0,
                "wavelength '" + w.name + "' needs a responsivity in (0, 1] A/W");
    }

    require(!transmitters.empty(), "at least one transmitter is required");
    for (std::size_t i = 0; i < transmitters.size(); ++i) {
        const auto& t = transmitters[i];
        const std::string tag = "transmitter " + std::to_string(i + 1);
        require(t.position.finite() && inside_room(t.position, room), tag + " lies outside the room");
        require(t.orientation.finite() && t.orientation.norm() > 0, tag + " has no orientation");
        require(t.ld_count > 0, tag + " needs at least one laser diode");
        require(t.semi_angle_deg > 0 && t.semi_angle_deg < 90, tag + " semi-angle must lie in (0, 90)");
    }

    std::set<int> ids;
    for (const auto& s : stations) {
        const std::string tag = "station " + std::to_string(s.user_id);
        require(ids.insert(s.user_id).second, "duplicate user id " + std::to_string(s.user_id));
        require(s.position.finite() && inside_room(s.position, room), tag + " lies outside the room");
        require(!s.branches.empty(), tag + " has no receiver branches");
        for (const auto& b : s.branches) {
            require(b.fov_deg > 0 && b.fov_deg <= 90, tag + " branch FOV must lie in (0, 90]");
            require(b.area > 0, tag + " branch detector area must be positive");
            require(std::isfinite(b.azimuth_deg) && std::isfinite(b.elevation_deg), tag + " branch angles must be finite");
        }
        require(s.branches.size() == stations.front().branches.size(),
                "all stations must have the same number of branches");
    }
    require(transmitters.size() * wavelengths.size() >= stations.size(),
            "need at least as many (access point, wavelength) pairs as users");

    for (const auto& b : blockers) {
        require(b.lo.finite() && b.hi.finite(), "blocker '" + b.label + "' must have finite extent");
        require(b.lo.x <= b.hi.x && b.lo.y <= b.hi.y && b.lo.z <= b.hi.z,
                "blocker '" + b.label + "' has inverted bounds");
        if (b.kind == Blocker::Kind::Plane) {
            require(b.lo.z == b.hi.z, "plane blocker '" + b.label + "' must be horizontal");
        }
    }

    const auto& r = radiometry;
    require(r.noise_current_density > 0 && r.electrical_bandwidth > 0 && r.optical_filter_factor > 0,
            "noise parameters must be positive");
    require(r.ook_swing > 0, "OOK swing must be positive");
    require(std::isfinite(r.sinr_threshold_db), "SINR threshold must be finite");
}

std::vector<Surface> room_surfaces(const ScenarioConfig& config) {
    const auto& r = config.room;
    const double L = r.length_x;
    const double W = r.width_y;
    const double H = r.height_z;
    const double order = lambertian_order(r.surface_semi_angle_deg);
    const Vec3 ex{L, 0, 0};
    const Vec3 ey{0, W, 0};
    const Vec3 ez{0, 0, H};
    return {
        {"floor", {0, 0, 0}, ex, ey, {0, 0, 1}, r.floor_reflectance, order},
        {"ceiling", {0, 0, H}, ex, ey, {0, 0, -1}, r.ceiling_reflectance, order},
        {"wall_y0", {0, 0, 0}, ex, ez, {0, 1, 0}, r.wall_reflectance, order},
        {"wall_y1", {0, W, 0}, ex, ez, {0, -1, 0}, r.wall_reflectance, order},
        {"wall_x0", {0, 0, 0}, ey, ez, {1, 0, 0}, r.wall_reflectance, order},
        {"wall_x1", {L, 0, 0}, ey, ez, {-1, 0, 0}, r.wall_reflectance, order},
    };
}

std::vector<Element> mesh_surfaces(const std::vector<Surface>& surfaces, double element_area) {
    if (!(element_area > 0.0)) throw Error("element area must be positive");
    double smallest = std::numeric_limits<double>::infinity();
    for (const auto& s : surfaces) smallest = std::min(smallest, s.area());
    if (element_area > smallest) throw Error("element area exceeds the smallest surface");

    const double pitch = std::sqrt(element_area);
    std::vector<Element> elements;
    for (std::size_t si = 0; si < surfaces.size(); ++si) {
        const auto& s = surfaces[si];
        const double lu = s.edge_u.norm();
        const double lv = s.edge_v.norm();
        const Vec3 du = s.edge_u * (1.0 / lu);
        const Vec3 dv = s.edge_v * (1.0 / lv);
        const auto cols = tile_edge(lu, pitch);
        const auto rows = tile_edge(lv, pitch);
        for (const auto& row : rows) {
            for (const auto& col : cols) {
                Element e;
                e.centre = s.origin + du * (col.start + 0.5 * col.width) + dv * (row.start + 0.5 * row.width);
                e.area = col.width * row.width;
                e.normal = s.normal;
                e.reflectance = s.reflectance;
                e.lambertian_order = s.lambertian_order;
                e.surface = static_cast<int>(si);
                elements.push_back(e);
            }
        }
    }
    return elements;
}

std::vector<Element> mesh_surfaces(const ScenarioConfig& config, double element_area) {
    return mesh_surfaces(room_surfaces(config), element_area);
}

std::vector<TransmitterUnit> build_transmitters(const ScenarioConfig& config) {
    std::vector<TransmitterUnit> units;
    for (const auto& t : config.transmitters) {
        TransmitterUnit u;
        u.position = t.position;
        u.orientation = t.orientation.normalized();
        u.lambertian_order = lambertian_order(t.semi_angle_deg);
        u.ld_count = t.ld_count;
        for (const auto& w : config.wavelengths) u.power.push_back(w.ld_power * t.ld_count);
        units.push_back(std::move(u));
    }
    return units;
}

Scene build_scene(const ScenarioConfig& config) {
    config.validate();
    Scene scene;
    scene.config = config;
    scene.surfaces = room_surfaces(config);
    scene.transmitters = build_transmitters(config);
    scene.first_order_elements = mesh_surfaces(scene.surfaces, config.first_order_element_area);
    scene.second_order_elements = mesh_surfaces(scene.surfaces, config.second_order_element_area);
    return scene;
}

namespace {

bool crosses_box(const Vec3& a, const Vec3& b, const Blocker& box) {
    const double pa[3] = {a.x, a.y, a.z};
    const double pb[3] = {b.x, b.y, b.z};
    const double lo[3] = {box.lo.x, box.lo.y, box.lo.z};
    const double hi[3] = {box.hi.x, box.hi.y, box.hi.z};
    double t0 = 0.0;
    double t1 = 1.0;
    for (int i = 0; i < 3; ++i) {
        const double d = pb[i] - pa[i];
        if (d == 0.0) {
            if (!(pa[i] > lo[i] && pa[i] < hi[i])) return false;
            continue;
        }
        double ta = (lo[i] - pa[i]) / d;
        double tb = (hi[i] - pa[i]) / d;
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (!(t0 < t1)) return false;
    }
    return t0 < t1;
}

bool crosses_plane(const Vec3& a, const Vec3& b, const Blocker& plane) {
    const double z = plane.lo.z;
    if (!((a.z - z) * (b.z - z) < 0.0)) return false;
    const double t = (z - a.z) / (b.z - a.z);
    const double x = a.x + t * (b.x - a.x);
    const double y = a.y + t * (b.y - a.y);
    return x > plane.lo.x && x < plane.hi.x && y > plane.lo.y && y < plane.hi.y;
}

}  // namespace

bool occluded(const Vec3& a, const Vec3& b, const std::vector<Blocker>& blockers) {
    for (const auto& blk : blockers) {
        const bool hit = blk.kind == Blocker::Kind::Box ? crosses_box(a, b, blk) : crosses_plane(a, b, blk);
        if (hit) return true;
    }
    return false;
}

}  // namespace vlcalloc
