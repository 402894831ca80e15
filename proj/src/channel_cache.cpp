#include "vlcalloc/channel_cache.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "json_util.hpp"
#include "vlcalloc/scenario_io.hpp"

namespace vlcalloc {

using namespace detail;

namespace {

constexpr const char* kFormat = "vlcalloc-channel";

json trace_to_json(const TraceParams& p) {
    return {{"bin_width", p.bin_width}, {"window", p.window}, {"max_order", p.max_order}};
}

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 digest failed");
    }
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
    return hex.str();
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

std::string channel_content_hash(const ScenarioConfig& config, const TraceParams& params) {
    return sha256_hex(serialize_scenario(config) + trace_to_json(params).dump());
}

std::string serialize_channel_matrix(const ChannelMatrix& m) {
    json doc;
    doc["format"] = kFormat;
    doc["version"] = kChannelCacheVersion;
    doc["hash"] = m.scenario_hash;
    doc["dims"] = {{"users", m.users}, {"aps", m.aps}, {"wavelengths", m.wavelengths}, {"branches", m.branches}};
    doc["trace"] = trace_to_json(m.trace);
    doc["received_power"] = m.received_power;
    json bw = json::array();
    json at_least = json::array();
    for (const auto& b : m.bandwidth) {
        bw.push_back(b.hz);
        at_least.push_back(b.at_least);
    }
    doc["bandwidth_3db"] = bw;
    doc["bandwidth_at_least"] = at_least;
    doc["rms_delay_spread"] = m.delay_spread;
    doc["warnings"] = m.warnings;
    return doc.dump(1) + "\n";
}

ChannelMatrix parse_channel_matrix(const std::string& document) {
    const json doc = parse_document(document, "channel cache");
    const std::string root = "$";
    if (doc.value("format", std::string{}) != kFormat) throw Error("channel cache: not a " + std::string(kFormat) + " document");
    if (integer(doc, "version", root) != kChannelCacheVersion) throw Error("channel cache: unsupported version");

    ChannelMatrix m;
    m.scenario_hash = text(doc, "hash", root);
    const auto& dims = field(doc, "dims", root);
    m.users = static_cast<std::size_t>(integer(dims, "users", "$.dims"));
    m.aps = static_cast<std::size_t>(integer(dims, "aps", "$.dims"));
    m.wavelengths = static_cast<std::size_t>(integer(dims, "wavelengths", "$.dims"));
    m.branches = static_cast<std::size_t>(integer(dims, "branches", "$.dims"));
    const auto& tr = field(doc, "trace", root);
    m.trace.bin_width = number(tr, "bin_width", "$.trace");
    m.trace.window = number(tr, "window", "$.trace");
    m.trace.max_order = static_cast<int>(integer(tr, "max_order", "$.trace"));

    const auto& po = array(doc, "received_power", root);
    const auto& bw = array(doc, "bandwidth_3db", root);
    const auto& al = array(doc, "bandwidth_at_least", root);
    const auto& ds = array(doc, "rms_delay_spread", root);
    if (po.size() != m.users * m.aps * m.wavelengths * m.branches) throw Error("channel cache: received_power size mismatch");
    const std::size_t links = m.users * m.aps * m.branches;
    if (bw.size() != links || al.size() != links || ds.size() != links) throw Error("channel cache: link array size mismatch");
    for (std::size_t i = 0; i < po.size(); ++i) m.received_power.push_back(number(po[i], "$.received_power"));
    for (std::size_t i = 0; i < links; ++i) {
        if (!al[i].is_boolean()) throw Error("field '$.bandwidth_at_least': expected booleans");
        m.bandwidth.push_back({number(bw[i], "$.bandwidth_3db"), al[i].get<bool>()});
        m.delay_spread.push_back(number(ds[i], "$.rms_delay_spread"));
    }
    if (doc.contains("warnings")) m.warnings = doc.at("warnings").get<std::vector<std::string>>();
    return m;
}

void save_channel_matrix(const ChannelMatrix& matrix, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write channel cache " + path.string());
    out << serialize_channel_matrix(matrix);
    if (!out) throw Error("failed writing channel cache " + path.string());
}

ChannelMatrix load_channel_matrix(const std::filesystem::path& path) {
    try {
        return parse_channel_matrix(read_file(path));
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

std::optional<ChannelMatrix> load_cached_channel(const std::filesystem::path& path, const std::string& expected_hash) {
    if (!std::filesystem::exists(path)) return std::nullopt;
    try {
        auto m = load_channel_matrix(path);
        if (m.scenario_hash != expected_hash) return std::nullopt;
        return m;
    } catch (const Error&) {
        return std::nullopt;
    }
}

}  // namespace vlcalloc
