#include "vlcalloc/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json_util.hpp"
#include "vlcalloc/radiometry.hpp"

namespace vlcalloc {

using namespace detail;

namespace {

constexpr double kRateStep = 1e6;  // bps

std::string fmt_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

double parse_double(const std::string& s, const std::string& what) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw Error(what + ": not a number: '" + s + "'");
    return v;
}

long long parse_int(const std::string& s, const std::string& what) {
    long long v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw Error(what + ": not an integer: '" + s + "'");
    return v;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted) throw Error("csv line " + std::to_string(line_no) + ": unterminated quote");
    cells.push_back(std::move(cur));
    return cells;
}

const char* const kCsvHeader =
    "user_id,label,x,y,z,access_point,wavelength,branch,sinr_db,bandwidth_hz,bandwidth_at_least,rate_bps";

json row_to_json(const UserReportRow& r) {
    return {{"user_id", r.user_id},
            {"label", r.label},
            {"location", to_json(r.location)},
            {"access_point", r.access_point},
            {"wavelength", r.wavelength},
            {"branch", r.branch},
            {"sinr_db", r.sinr_db},
            {"bandwidth_hz", r.bandwidth_hz},
            {"bandwidth_at_least", r.bandwidth_at_least},
            {"rate_bps", r.rate_bps}};
}

UserReportRow row_from_json(const json& j, const std::string& path) {
    UserReportRow r;
    r.user_id = static_cast<int>(integer(j, "user_id", path));
    r.label = text(j, "label", path);
    r.location = vec3(field(j, "location", path), path + ".location");
    r.access_point = static_cast<std::size_t>(integer(j, "access_point", path));
    r.wavelength = text(j, "wavelength", path);
    r.branch = static_cast<std::size_t>(integer(j, "branch", path));
    r.sinr_db = number(j, "sinr_db", path);
    r.bandwidth_hz = number(j, "bandwidth_hz", path);
    const auto& al = field(j, "bandwidth_at_least", path);
    if (!al.is_boolean()) throw Error("field '" + path + ".bandwidth_at_least': expected a boolean");
    r.bandwidth_at_least = al.get<bool>();
    r.rate_bps = integer(j, "rate_bps", path);
    return r;
}

std::vector<UserReportRow> rows_from_array(const json& arr, const std::string& path) {
    std::vector<UserReportRow> rows;
    for (std::size_t i = 0; i < arr.size(); ++i) rows.push_back(row_from_json(arr[i], path + "[" + std::to_string(i) + "]"));
    return rows;
}

// Smallest 1, 2 or 5 times a power of ten that is >= v.
double nice_ceiling(double v) {
    if (!(v > 0.0)) return 1.0;
    const double mag = std::pow(10.0, std::floor(std::log10(v)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (m * mag >= v) return m * mag;
    }
    return 10.0 * mag;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

double data_rate(const AllocationProblem& problem, const Assignment& assignment, std::size_t us,
                 const Bandwidth& channel_bandwidth) {
    if (!(channel_bandwidth.hz > 0.0)) throw Error("channel bandwidth must be positive");
    auto meets = [&](double steps) {
        return sinr_at_bandwidth(problem, assignment, us, steps * kRateStep) >= problem.threshold;
    };
    const double cap = std::floor(channel_bandwidth.hz / kRateStep);
    if (cap < 1.0 || !meets(1.0)) return 0.0;
    if (meets(cap)) return cap * kRateStep;
    double lo = 1.0, hi = cap;  // meets(lo) holds, meets(hi) fails
    while (hi - lo > 1.0) {
        const double mid = std::floor((lo + hi) / 2.0);
        (meets(mid) ? lo : hi) = mid;
    }
    return lo * kRateStep;
}

double round_db(double db) { return std::round(db * 100.0) / 100.0; }

std::vector<UserReportRow> build_report_rows(const ScenarioConfig& config, const ChannelMatrix& channel,
                                             const AllocationProblem& problem, const AllocationResult& result) {
    std::vector<UserReportRow> rows;
    if (!result.feasible) return rows;
    for (std::size_t us = 0; us < problem.users; ++us) {
        const auto& c = result.choices.at(us);
        const auto& st = config.stations.at(us);
        UserReportRow r;
        r.user_id = st.user_id;
        r.label = st.label;
        r.location = st.position;
        r.access_point = c.ap + 1;
        r.wavelength = config.wavelengths.at(c.wavelength).name;
        r.branch = c.branch + 1;
        r.sinr_db = round_db(result.sinr_db.at(us));
        const auto bw = channel.bandwidth.at(channel.link_index(us, c.ap, c.branch));
        r.bandwidth_hz = bw.hz;
        r.bandwidth_at_least = bw.at_least;
        r.rate_bps = bw.hz > 0.0 ? static_cast<std::int64_t>(data_rate(problem, result.assignment, us, bw)) : 0;
        rows.push_back(std::move(r));
    }
    return rows;
}

ResultDocument make_result_document(const ScenarioConfig& config, const ChannelMatrix& channel,
                                    const AllocationProblem& problem, const AllocationResult& result) {
    ResultDocument d;
    d.scenario = config.name;
    d.scenario_hash = channel.scenario_hash;
    d.solver = result.solver;
    d.feasible = result.feasible;
    d.objective = result.objective;
    d.nodes = result.stats.nodes;
    d.certificate = result.certificate;
    d.threshold_db = config.radiometry.sinr_threshold_db;
    d.sinr_linear = result.sinr_linear;
    d.rows = build_report_rows(config, channel, problem, result);
    return d;
}

std::string serialize_result(const ResultDocument& d) {
    json doc;
    doc["format"] = "vlcalloc-result";
    doc["version"] = 1;
    doc["scenario"] = d.scenario;
    doc["scenario_hash"] = d.scenario_hash;
    doc["solver"] = d.solver;
    doc["feasible"] = d.feasible;
    doc["objective"] = d.objective;
    doc["nodes"] = d.nodes;
    doc["certificate"] = d.certificate;
    doc["threshold_db"] = d.threshold_db;
    doc["sinr_linear"] = d.sinr_linear;
    doc["users"] = json::array();
    for (const auto& r : d.rows) doc["users"].push_back(row_to_json(r));
    return doc.dump(2) + "\n";
}

ResultDocument parse_result(const std::string& text_in) {
    const auto doc = parse_document(text_in, "result");
    const std::string root = "$";
    if (text(doc, "format", root) != "vlcalloc-result") throw Error("field '$.format': not a result document");
    if (integer(doc, "version", root) != 1) throw Error("field '$.version': unsupported version");
    ResultDocument d;
    d.scenario = text(doc, "scenario", root);
    d.scenario_hash = text(doc, "scenario_hash", root);
    d.solver = text(doc, "solver", root);
    const auto& f = field(doc, "feasible", root);
    if (!f.is_boolean()) throw Error("field '$.feasible': expected a boolean");
    d.feasible = f.get<bool>();
    d.objective = number(doc, "objective", root);
    d.nodes = static_cast<std::uint64_t>(integer(doc, "nodes", root));
    d.certificate = text(doc, "certificate", root);
    d.threshold_db = number(doc, "threshold_db", root);
    const auto& s = array(doc, "sinr_linear", root);
    for (std::size_t i = 0; i < s.size(); ++i) d.sinr_linear.push_back(number(s[i], "$.sinr_linear[" + std::to_string(i) + "]"));
    d.rows = rows_from_array(array(doc, "users", root), "$.users");
    return d;
}

ResultDocument load_result_file(const std::filesystem::path& path) {
    try {
        return parse_result(read_text_file(path));
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

std::string rows_to_csv(const std::vector<UserReportRow>& rows) {
    std::string out = kCsvHeader;
    out += '\n';
    for (const auto& r : rows) {
        out += std::to_string(r.user_id) + ',' + csv_field(r.label) + ',' + fmt_double(r.location.x) + ',' +
               fmt_double(r.location.y) + ',' + fmt_double(r.location.z) + ',' + std::to_string(r.access_point) + ',' +
               csv_field(r.wavelength) + ',' + std::to_string(r.branch) + ',' + fixed(r.sinr_db, 2) + ',' +
               fmt_double(r.bandwidth_hz) + ',' + (r.bandwidth_at_least ? "true" : "false") + ',' +
               std::to_string(r.rate_bps) + '\n';
    }
    return out;
}

std::vector<UserReportRow> rows_from_csv(const std::string& text_in) {
    std::istringstream in(text_in);
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) throw Error("csv: missing or unexpected header");
    std::vector<UserReportRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto c = split_csv_line(line, line_no);
        const std::string where = "csv line " + std::to_string(line_no);
        if (c.size() != 12) throw Error(where + ": expected 12 columns");
        UserReportRow r;
        r.user_id = static_cast<int>(parse_int(c[0], where));
        r.label = c[1];
        r.location = {parse_double(c[2], where), parse_double(c[3], where), parse_double(c[4], where)};
        r.access_point = static_cast<std::size_t>(parse_int(c[5], where));
        r.wavelength = c[6];
        r.branch = static_cast<std::size_t>(parse_int(c[7], where));
        r.sinr_db = parse_double(c[8], where);
        r.bandwidth_hz = parse_double(c[9], where);
        if (c[10] != "true" && c[10] != "false") throw Error(where + ": bandwidth_at_least must be true or false");
        r.bandwidth_at_least = c[10] == "true";
        r.rate_bps = parse_int(c[11], where);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string rows_to_json(const std::vector<UserReportRow>& rows) {
    json doc = json::array();
    for (const auto& r : rows) doc.push_back(row_to_json(r));
    return doc.dump(2) + "\n";
}

std::vector<UserReportRow> rows_from_json(const std::string& text_in) {
    const auto doc = parse_document(text_in, "report");
    if (!doc.is_array()) throw Error("report: expected an array of rows");
    return rows_from_array(doc, "$");
}

std::string svg_chart(const std::vector<UserReportRow>& rows, Metric metric, double threshold_db) {
    constexpr double width = 800, height = 400, left = 70, right = 20, top = 40, bottom = 60;
    constexpr double plot_w = width - left - right, plot_h = height - top - bottom;

    std::string title, unit;
    std::vector<double> values;
    for (const auto& r : rows) {
        switch (metric) {
            case Metric::Bandwidth: values.push_back(r.bandwidth_hz / 1e9); break;
            case Metric::Sinr: values.push_back(r.sinr_db); break;
            case Metric::Rate: values.push_back(static_cast<double>(r.rate_bps) / 1e9); break;
        }
    }
    switch (metric) {
        case Metric::Bandwidth: title = "Channel bandwidth"; unit = "GHz"; break;
        case Metric::Sinr: title = "SINR"; unit = "dB"; break;
        case Metric::Rate: title = "Data rate"; unit = "Gbps"; break;
    }
    double vmax = 0.0;
    for (double v : values) vmax = std::max(vmax, v);
    if (metric == Metric::Sinr) vmax = std::max(vmax, threshold_db);
    const double ymax = nice_ceiling(vmax * 1.05);
    auto y_of = [&](double v) { return top + plot_h * (1.0 - std::clamp(v, 0.0, ymax) / ymax); };

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 400\" width=\"800\" height=\"400\">\n";
    s += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"400\" fill=\"white\"/>\n";
    s += "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" + title +
         " (" + unit + ")</text>\n";
    for (int i = 0; i <= 5; ++i) {
        const double v = ymax * i / 5.0;
        const std::string y = fixed(y_of(v), 2);
        s += "<line x1=\"" + fixed(left, 2) + "\" y1=\"" + y + "\" x2=\"" + fixed(left + plot_w, 2) + "\" y2=\"" + y +
             "\" stroke=\"#dddddd\"/>\n";
        s += "<text x=\"" + fixed(left - 6, 2) + "\" y=\"" + fixed(y_of(v) + 4, 2) +
             "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + fixed(v, 2) + "</text>\n";
    }
    s += "<line x1=\"" + fixed(left, 2) + "\" y1=\"" + fixed(top, 2) + "\" x2=\"" + fixed(left, 2) + "\" y2=\"" +
         fixed(top + plot_h, 2) + "\" stroke=\"black\"/>\n";
    s += "<line x1=\"" + fixed(left, 2) + "\" y1=\"" + fixed(top + plot_h, 2) + "\" x2=\"" + fixed(left + plot_w, 2) +
         "\" y2=\"" + fixed(top + plot_h, 2) + "\" stroke=\"black\"/>\n";

    const double slot = rows.empty() ? plot_w : plot_w / static_cast<double>(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double x = left + slot * (static_cast<double>(i) + 0.2);
        const double y = y_of(values[i]);
        const std::string label = metric == Metric::Bandwidth && rows[i].bandwidth_at_least ? "&gt;=" : "";
        s += "<rect x=\"" + fixed(x, 2) + "\" y=\"" + fixed(y, 2) + "\" width=\"" + fixed(slot * 0.6, 2) +
             "\" height=\"" + fixed(top + plot_h - y, 2) + "\" fill=\"#4a78b5\"><title>" +
             xml_escape(rows[i].label) + ": " + fixed(values[i], 2) + " " + unit + "</title></rect>\n";
        s += "<text x=\"" + fixed(x + slot * 0.3, 2) + "\" y=\"" + fixed(y - 4, 2) +
             "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" + label + fixed(values[i], 2) +
             "</text>\n";
        s += "<text x=\"" + fixed(x + slot * 0.3, 2) + "\" y=\"" + fixed(top + plot_h + 16, 2) +
             "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
             std::to_string(rows[i].user_id) + "</text>\n";
    }
    if (metric == Metric::Sinr && threshold_db > 0.0) {
        const std::string y = fixed(y_of(threshold_db), 2);
        s += "<line x1=\"" + fixed(left, 2) + "\" y1=\"" + y + "\" x2=\"" + fixed(left + plot_w, 2) + "\" y2=\"" + y +
             "\" stroke=\"#c0392b\" stroke-dasharray=\"6 4\"/>\n";
    }
    s += "<text x=\"400\" y=\"" + fixed(height - 16, 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">User</text>\n";
    s += "</svg>\n";
    return s;
}

ReportFormat parse_report_format(const std::string& name) {
    if (name == "csv") return ReportFormat::Csv;
    if (name == "json") return ReportFormat::Json;
    if (name == "svg") return ReportFormat::Svg;
    throw Error("unknown report format '" + name + "' (valid: csv, json, svg)");
}

std::vector<std::filesystem::path> emit_report(const std::vector<UserReportRow>& rows,
                                               const std::vector<ReportFormat>& formats,
                                               const std::filesystem::path& dir, double threshold_db) {
    std::vector<std::filesystem::path> written;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("cannot create directory " + dir.string() + ": " + ec.message());
    auto put = [&](const std::string& name, const std::string& content) {
        const auto path = dir / name;
        write_text_file(path, content);
        written.push_back(path);
    };
    for (auto f : formats) {
        switch (f) {
            case ReportFormat::Csv: put("report.csv", rows_to_csv(rows)); break;
            case ReportFormat::Json: put("report.json", rows_to_json(rows)); break;
            case ReportFormat::Svg:
                put("bandwidth.svg", svg_chart(rows, Metric::Bandwidth));
                put("sinr.svg", svg_chart(rows, Metric::Sinr, threshold_db));
                put("rate.svg", svg_chart(rows, Metric::Rate));
                break;
        }
    }
    return written;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
    out.close();
    if (!out) throw Error("failed writing " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace vlcalloc
