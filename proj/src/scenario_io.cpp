#include "vlcalloc/scenario_io.hpp"

#include <fstream>
#include <sstream>

#include "json_util.hpp"

namespace vlcalloc {

using namespace detail;

namespace {

constexpr const char* kSchema = "vlcalloc-scenario/1";

json branch_to_json(const ReceiverBranch& b) {
    return {{"azimuth_deg", b.azimuth_deg}, {"elevation_deg", b.elevation_deg}, {"fov_deg", b.fov_deg}, {"area", b.area}};
}

ReceiverBranch branch_from_json(const json& j, const std::string& path) {
    return {number(j, "azimuth_deg", path), number(j, "elevation_deg", path), number(j, "fov_deg", path),
            number(j, "area", path)};
}

json to_document(const ScenarioConfig& c) {
    json doc;
    doc["schema"] = kSchema;
    doc["name"] = c.name;
    doc["room"] = {{"length_x", c.room.length_x},
                   {"width_y", c.room.width_y},
                   {"height_z", c.room.height_z},
                   {"wall_reflectance", c.room.wall_reflectance},
                   {"ceiling_reflectance", c.room.ceiling_reflectance},
                   {"floor_reflectance", c.room.floor_reflectance},
                   {"surface_semi_angle_deg", c.room.surface_semi_angle_deg}};
    doc["element_area"] = {{"first_order", c.first_order_element_area},
                           {"second_order", c.second_order_element_area}};
    doc["wavelengths"] = json::array();
    for (const auto& w : c.wavelengths) {
        doc["wavelengths"].push_back({{"name", w.name}, {"ld_power", w.ld_power}, {"responsivity", w.responsivity}});
    }
    doc["transmitters"] = json::array();
    for (const auto& t : c.transmitters) {
        doc["transmitters"].push_back({{"position", to_json(t.position)},
                                       {"orientation", to_json(t.orientation)},
                                       {"ld_count", t.ld_count},
                                       {"semi_angle_deg", t.semi_angle_deg}});
    }
    doc["stations"] = json::array();
    for (const auto& s : c.stations) {
        json branches = json::array();
        for (const auto& b : s.branches) branches.push_back(branch_to_json(b));
        doc["stations"].push_back(
            {{"user_id", s.user_id}, {"label", s.label}, {"position", to_json(s.position)}, {"branches", branches}});
    }
    doc["blockers"] = json::array();
    for (const auto& b : c.blockers) {
        doc["blockers"].push_back({{"kind", b.kind == Blocker::Kind::Box ? "box" : "plane"},
                                   {"lo", to_json(b.lo)},
                                   {"hi", to_json(b.hi)},
                                   {"label", b.label}});
    }
    const auto& r = c.radiometry;
    doc["radiometry"] = {{"noise_current_density", r.noise_current_density},
                         {"electrical_bandwidth", r.electrical_bandwidth},
                         {"optical_filter_factor", r.optical_filter_factor},
                         {"ook_swing", r.ook_swing},
                         {"sinr_threshold_db", r.sinr_threshold_db}};
    return doc;
}

ScenarioConfig from_document(const json& doc) {
    ScenarioConfig c;
    const std::string root = "$";
    if (doc.contains("schema") && doc.at("schema") != kSchema) {
        throw Error("field '$.schema': unsupported schema " + doc.at("schema").dump());
    }
    c.name = text(doc, "name", root);

    const auto& room = field(doc, "room", root);
    const std::string rp = root + ".room";
    c.room.length_x = number(room, "length_x", rp);
    c.room.width_y = number(room, "width_y", rp);
    c.room.height_z = number(room, "height_z", rp);
    c.room.wall_reflectance = number(room, "wall_reflectance", rp);
    c.room.ceiling_reflectance = number(room, "ceiling_reflectance", rp);
    c.room.floor_reflectance = number(room, "floor_reflectance", rp);
    c.room.surface_semi_angle_deg = number_or(room, "surface_semi_angle_deg", 60.0, rp);

    if (doc.contains("element_area")) {
        const auto& ea = doc.at("element_area");
        c.first_order_element_area = number(ea, "first_order", root + ".element_area");
        c.second_order_element_area = number(ea, "second_order", root + ".element_area");
    }

    const auto& wl = array(doc, "wavelengths", root);
    for (std::size_t i = 0; i < wl.size(); ++i) {
        const std::string p = root + ".wavelengths[" + std::to_string(i) + "]";
        c.wavelengths.push_back({text(wl[i], "name", p), number(wl[i], "ld_power", p), number(wl[i], "responsivity", p)});
    }

    const auto& tx = array(doc, "transmitters", root);
    for (std::size_t i = 0; i < tx.size(); ++i) {
        const std::string p = root + ".transmitters[" + std::to_string(i) + "]";
        TransmitterSpec t;
        t.position = vec3(field(tx[i], "position", p), p + ".position");
        if (tx[i].contains("orientation")) t.orientation = vec3(tx[i].at("orientation"), p + ".orientation");
        t.ld_count = static_cast<int>(integer(tx[i], "ld_count", p));
        t.semi_angle_deg = number(tx[i], "semi_angle_deg", p);
        c.transmitters.push_back(t);
    }

    const auto& st = array(doc, "stations", root);
    for (std::size_t i = 0; i < st.size(); ++i) {
        const std::string p = root + ".stations[" + std::to_string(i) + "]";
        ReceiverStation s;
        s.user_id = static_cast<int>(integer(st[i], "user_id", p));
        if (st[i].contains("label")) s.label = text(st[i], "label", p);
        s.position = vec3(field(st[i], "position", p), p + ".position");
        if (st[i].contains("branches")) {
            const auto& br = array(st[i], "branches", p);
            for (std::size_t b = 0; b < br.size(); ++b) {
                s.branches.push_back(branch_from_json(br[b], p + ".branches[" + std::to_string(b) + "]"));
            }
        } else {
            s.branches = default_adr_branches();
        }
        c.stations.push_back(std::move(s));
    }

    if (doc.contains("blockers")) {
        const auto& bl = array(doc, "blockers", root);
        for (std::size_t i = 0; i < bl.size(); ++i) {
            const std::string p = root + ".blockers[" + std::to_string(i) + "]";
            Blocker b;
            const auto kind = text(bl[i], "kind", p);
            if (kind == "box") {
                b.kind = Blocker::Kind::Box;
            } else if (kind == "plane") {
                b.kind = Blocker::Kind::Plane;
            } else {
                throw Error("field '" + p + ".kind': expected \"box\" or \"plane\"");
            }
            b.lo = vec3(field(bl[i], "lo", p), p + ".lo");
            b.hi = vec3(field(bl[i], "hi", p), p + ".hi");
            if (bl[i].contains("label")) b.label = text(bl[i], "label", p);
            c.blockers.push_back(b);
        }
    }

    if (doc.contains("radiometry")) {
        const auto& r = doc.at("radiometry");
        const std::string p = root + ".radiometry";
        RadiometrySpec d;
        c.radiometry.noise_current_density = number_or(r, "noise_current_density", d.noise_current_density, p);
        c.radiometry.electrical_bandwidth = number_or(r, "electrical_bandwidth", d.electrical_bandwidth, p);
        c.radiometry.optical_filter_factor = number_or(r, "optical_filter_factor", d.optical_filter_factor, p);
        c.radiometry.ook_swing = number_or(r, "ook_swing", d.ook_swing, p);
        c.radiometry.sinr_threshold_db = number_or(r, "sinr_threshold_db", d.sinr_threshold_db, p);
    }
    return c;
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& text) {
    auto config = from_document(parse_document(text, "scenario"));
    config.validate();
    return config;
}

std::string serialize_scenario(const ScenarioConfig& config) { return to_document(config).dump(2) + "\n"; }

ScenarioConfig load_scenario_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open scenario file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_scenario(ss.str());
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

void save_scenario_file(const ScenarioConfig& config, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write scenario file " + path.string());
    out << serialize_scenario(config);
    if (!out) throw Error("failed writing scenario file " + path.string());
}

}  // namespace vlcalloc
