#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vlcalloc/vec3.hpp"

namespace vlcalloc {

/// Planar rectangular room surface spanned by two orthogonal edges.
struct Surface {
    std::string name;
    Vec3 origin;
    Vec3 edge_u;
    Vec3 edge_v;
    Vec3 normal;  // unit, pointing into the room
    double reflectance = 0.0;
    double lambertian_order = 1.0;

    [[nodiscard]] double area() const { return edge_u.cross(edge_v).norm(); }
};

/// Reflection element: a small patch of a surface acting as a secondary emitter.
struct Element {
    Vec3 centre;
    double area = 0.0;
    Vec3 normal;
    double reflectance = 0.0;
    double lambertian_order = 1.0;
    int surface = -1;
};

/// One optical carrier of the RYGB source.
struct Wavelength {
    std::string name;
    double ld_power = 0.0;      // W per laser diode
    double responsivity = 0.0;  // A/W at the photodetector
};

struct TransmitterSpec {
    Vec3 position;
    Vec3 orientation{0.0, 0.0, -1.0};
    int ld_count = 1;
    double semi_angle_deg = 60.0;
};

/// Access point after conversion: the unit's laser diodes are collapsed into
/// one point source per wavelength.
struct TransmitterUnit {
    Vec3 position;
    Vec3 orientation;
    double lambertian_order = 1.0;
    std::vector<double> power;  // W, indexed like ScenarioConfig::wavelengths
    int ld_count = 1;
};

/// One branch of an angle diversity receiver.
///
/// Elevation is measured up from the horizontal plane and azimuth
/// counter-clockwise from +x, so (az 45, el 70) tilts the boresight 20 degrees
/// off zenith towards (+x, +y).
struct ReceiverBranch {
    double azimuth_deg = 0.0;
    double elevation_deg = 90.0;
    double fov_deg = 90.0;  // half-angle
    double area = 1e-5;     // m^2

    [[nodiscard]] Vec3 boresight() const;
    bool operator==(const ReceiverBranch&) const = default;
};

struct ReceiverStation {
    int user_id = 0;
    std::string label;
    Vec3 position;
    std::vector<ReceiverBranch> branches;
};

/// Opaque obstacle. A box blocks segments through its open interior; a plane
/// (lo.z == hi.z) blocks segments crossing the rectangle strictly inside.
struct Blocker {
    enum class Kind { Box, Plane };
    Kind kind = Kind::Box;
    Vec3 lo;
    Vec3 hi;
    std::string label;
};

struct RoomSpec {
    double length_x = 4.0;
    double width_y = 4.0;
    double height_z = 3.0;
    double wall_reflectance = 0.8;
    double ceiling_reflectance = 0.8;
    double floor_reflectance = 0.3;
    double surface_semi_angle_deg = 60.0;
};

/// Receiver and link-budget parameters consumed by the channel-to-SINR step.
struct RadiometrySpec {
    double noise_current_density = 4.47e-12;  // A/sqrt(Hz)
    double electrical_bandwidth = 5e9;        // Hz
    double optical_filter_factor = 1.0;
    // Photocurrent swing between OOK "one" and "zero" levels relative to the
    // mean received power; 2 for OOK with full extinction.
    double ook_swing = 2.0;
    double sinr_threshold_db = 15.6;
};

struct ScenarioConfig {
    std::string name;
    RoomSpec room;
    double first_order_element_area = 0.05 * 0.05;   // m^2
    double second_order_element_area = 0.20 * 0.20;  // m^2
    std::vector<Wavelength> wavelengths;
    std::vector<TransmitterSpec> transmitters;
    std::vector<ReceiverStation> stations;
    std::vector<Blocker> blockers;
    RadiometrySpec radiometry;

    /// Throws Error describing the first violated invariant.
    void validate() const;
};

/// Built scene; immutable after construction.
struct Scene {
    ScenarioConfig config;
    std::vector<Surface> surfaces;
    std::vector<TransmitterUnit> transmitters;
    std::vector<Element> first_order_elements;
    std::vector<Element> second_order_elements;
};

std::vector<std::string> builtin_scenario_names();
/// office | cabin | datacentre
ScenarioConfig builtin_scenario(const std::string& name);

/// The six inward-facing surfaces of the box-shaped room.
std::vector<Surface> room_surfaces(const ScenarioConfig& config);

/// Tiles every surface into square elements of the requested area. Surfaces
/// whose edge is not a multiple of the pitch get a narrower last row/column.
std::vector<Element> mesh_surfaces(const std::vector<Surface>& surfaces, double element_area);
std::vector<Element> mesh_surfaces(const ScenarioConfig& config, double element_area);

std::vector<TransmitterUnit> build_transmitters(const ScenarioConfig& config);

Scene build_scene(const ScenarioConfig& config);

/// True iff the open segment a-b passes through the interior of any blocker.
/// Touching or grazing a blocker boundary does not count.
bool occluded(const Vec3& a, const Vec3& b, const std::vector<Blocker>& blockers);

/// Four-branch ADR used by every built-in scenario.
std::vector<ReceiverBranch> default_adr_branches();

}  // namespace vlcalloc
