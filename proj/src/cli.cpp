#include "vlcalloc/cli.hpp"

#include <CLI11.hpp>

#include <iomanip>
#include <iostream>
#include <sstream>

#include "vlcalloc/allocation.hpp"
#include "vlcalloc/channel_cache.hpp"
#include "vlcalloc/error.hpp"
#include "vlcalloc/milp.hpp"
#include "vlcalloc/parallel.hpp"
#include "vlcalloc/radiometry.hpp"
#include "vlcalloc/scenario_io.hpp"

namespace vlcalloc {

namespace fs = std::filesystem;

namespace {

std::vector<ReportFormat> parse_formats(const std::string& list) {
    std::vector<ReportFormat> formats;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto f = parse_report_format(item);
        if (std::find(formats.begin(), formats.end(), f) == formats.end()) formats.push_back(f);
    }
    if (formats.empty()) throw Error("no report format given");
    return formats;
}

fs::path cache_path(const RunManifest& m) { return m.out / "channel.json"; }

void print_rows(const std::vector<UserReportRow>& rows, std::ostream& out) {
    out << std::left << std::setw(6) << "user" << std::setw(5) << "AP" << std::setw(11) << "wavelength"
        << std::setw(8) << "branch" << std::setw(11) << "SINR dB" << std::setw(14) << "bandwidth GHz"
        << "rate Gbps\n";
    for (const auto& r : rows) {
        std::ostringstream bw, rate, sinr;
        bw << (r.bandwidth_at_least ? ">=" : "") << std::fixed << std::setprecision(2) << r.bandwidth_hz / 1e9;
        rate << std::fixed << std::setprecision(3) << static_cast<double>(r.rate_bps) / 1e9;
        sinr << std::fixed << std::setprecision(2) << r.sinr_db;
        out << std::setw(6) << r.user_id << std::setw(5) << r.access_point << std::setw(11) << r.wavelength
            << std::setw(8) << r.branch << std::setw(11) << sinr.str() << std::setw(14) << bw.str() << rate.str()
            << '\n';
    }
    out << std::right;
}

bool same_path(const fs::path& a, const fs::path& b) {
    std::error_code ec;
    const auto ca = fs::weakly_canonical(a, ec);
    if (ec) return false;
    const auto cb = fs::weakly_canonical(b, ec);
    if (ec) return false;
    return ca == cb;
}

}  // namespace

SolverChoice parse_solver_choice(const std::string& name) {
    if (name == "exhaustive") return SolverChoice::Exhaustive;
    if (name == "bnb") return SolverChoice::Bnb;
    if (name == "export-only") return SolverChoice::ExportOnly;
    throw Error("unknown solver '" + name + "' (valid: exhaustive, bnb, export-only)");
}

void RunManifest::validate() const {
    if (builtin.empty() == config.empty()) throw Error("give exactly one of --scenario or --config");
    if (out.empty()) throw Error("output directory must not be empty");
    if (!config.empty()) {
        const auto dir = config.has_parent_path() ? config.parent_path() : fs::path(".");
        if (same_path(out, config) || same_path(out, dir)) {
            throw Error("output directory " + out.string() + " must differ from the scenario source " +
                        config.string());
        }
    }
    trace.validate();
    if (alpha < 0.0) throw Error("--alpha must be positive");
}

ScenarioConfig load_manifest_scenario(const RunManifest& m) {
    return m.builtin.empty() ? load_scenario_file(m.config) : builtin_scenario(m.builtin);
}

ChannelMatrix obtain_channel(const RunManifest& m, const ScenarioConfig& config, std::ostream& log) {
    const auto hash = channel_content_hash(config, m.trace);
    const auto path = cache_path(m);
    if (m.use_cache) {
        if (auto cached = load_cached_channel(path, hash)) {
            log << "channel cache up to date: " << path.string() << " (tracing skipped)\n";
            return std::move(*cached);
        }
    }
    const auto scene = build_scene(config);
    auto matrix = compute_channel_matrix(scene, m.trace, m.workers);
    for (const auto& w : matrix.warnings) log << "warning: " << w << '\n';
    if (m.use_cache) {
        std::error_code ec;
        fs::create_directories(m.out, ec);
        if (ec) throw Error("cannot create directory " + m.out.string() + ": " + ec.message());
        save_channel_matrix(matrix, path);
        log << "channel cache written: " << path.string() << '\n';
    }
    return matrix;
}

int cmd_trace(const RunManifest& m, std::ostream& out, std::ostream& err) {
    m.validate();
    if (!m.use_cache) {
        err << "error: trace with --no-cache has nothing to write\n";
        return kExitError;
    }
    const auto config = load_manifest_scenario(m);
    const auto matrix = obtain_channel(m, config, out);
    out << "channel matrix " << matrix.users << "x" << matrix.aps << "x" << matrix.wavelengths << "x"
        << matrix.branches << " (users x access points x wavelengths x branches)\n";
    return kExitOk;
}

int cmd_allocate(const RunManifest& m, std::ostream& out, std::ostream& err) {
    m.validate();
    const auto config = load_manifest_scenario(m);
    const auto channel = obtain_channel(m, config, out);
    const auto problem = build_problem(config, channel);

    std::error_code ec;
    fs::create_directories(m.out, ec);
    if (ec) throw Error("cannot create directory " + m.out.string() + ": " + ec.message());

    if (m.solver == SolverChoice::ExportOnly) {
        const double alpha = m.alpha > 0.0 ? m.alpha : default_big_m(problem);
        const auto model = build_milp(problem, alpha);
        const auto path = m.out / "model.lp";
        write_text_file(path, export_lp(model));
        out << "wrote " << path.string() << " (" << model.variables.size() << " variables, "
            << model.binary_count() << " binary, " << model.constraints.size() << " constraints)\n";
        return kExitOk;
    }

    const auto result = m.solver == SolverChoice::Exhaustive ? solve_exhaustive(problem) : solve_bnb(problem);
    const auto doc = make_result_document(config, channel, problem, result);
    const auto result_path = m.out / "result.json";
    write_text_file(result_path, serialize_result(doc));
    out << "solver " << result.solver << ": " << result.stats.nodes << " nodes in " << std::fixed
        << std::setprecision(2) << result.stats.wall_seconds << " s\n"
        << std::defaultfloat;
    if (!result.feasible) {
        err << "infeasible: " << result.certificate << '\n';
        out << "wrote " << result_path.string() << '\n';
        return kExitInfeasible;
    }
    print_rows(doc.rows, out);
    out << "objective (sum of linear SINR): " << std::setprecision(10) << result.objective << std::defaultfloat
        << '\n';
    for (const auto& p : emit_report(doc.rows, m.formats, m.out, doc.threshold_db)) {
        out << "wrote " << p.string() << '\n';
    }
    out << "wrote " << result_path.string() << '\n';
    return kExitOk;
}

int cmd_report(const fs::path& result, const fs::path& out_dir, const std::vector<ReportFormat>& formats,
               std::ostream& out, std::ostream&) {
    const auto doc = load_result_file(result);
    if (!doc.feasible) throw Error(result.string() + ": result is infeasible, nothing to report");
    const auto dir = out_dir.empty() ? (result.has_parent_path() ? result.parent_path() : fs::path(".")) : out_dir;
    for (const auto& p : emit_report(doc.rows, formats, dir, doc.threshold_db)) out << "wrote " << p.string() << '\n';
    return kExitOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Indoor VLC/WDMA planning: channel tracing and SINR-optimal resource allocation"};
    app.require_subcommand(1);

    RunManifest m;
    std::string solver = "bnb";
    std::string formats = "csv,json,svg";
    double bin_width_ps = m.trace.bin_width * 1e12;
    bool no_cache = false;

    auto add_common = [&](CLI::App* sub) {
        auto* s = sub->add_option("--scenario", m.builtin, "Built-in scenario: office, cabin or datacentre");
        auto* c = sub->add_option("--config", m.config, "Scenario file")->check(CLI::ExistingFile);
        s->excludes(c);
        sub->add_option("--out", m.out, "Output directory")->capture_default_str();
        sub->add_option("--bin-width", bin_width_ps, "Impulse-response bin width in ps")->capture_default_str();
        sub->add_flag("--no-cache", no_cache, "Ignore and do not write the channel cache");
    };

    auto* trace = app.add_subcommand("trace", "Trace the channel and write <out>/channel.json");
    add_common(trace);
    auto* allocate = app.add_subcommand("allocate", "Trace (or reuse the cache), solve and write reports");
    add_common(allocate);
    allocate->add_option("--solver", solver, "exhaustive, bnb or export-only")->capture_default_str();
    allocate->add_option("--formats", formats, "Comma-separated report formats: csv, json, svg")
        ->capture_default_str();
    allocate->add_option("--alpha", m.alpha, "Big-M constant for the exported model (default: automatic)");

    fs::path result_path, report_out;
    auto* report = app.add_subcommand("report", "Regenerate report files from a stored result");
    report->add_option("--result", result_path, "Result file written by allocate")->required();
    report->add_option("--out", report_out, "Output directory (default: the result's directory)");
    report->add_option("--formats", formats, "Comma-separated report formats: csv, json, svg")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o, e2;
        const int code = app.exit(e, o, e2);
        out << o.str();
        err << e2.str();
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        m.trace.bin_width = bin_width_ps * 1e-12;
        m.use_cache = !no_cache;
        m.formats = parse_formats(formats);
        m.workers = worker_count_from_env();
        if (*trace) return cmd_trace(m, out, err);
        if (*allocate) {
            m.solver = parse_solver_choice(solver);
            return cmd_allocate(m, out, err);
        }
        return cmd_report(result_path, report_out, m.formats, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
}

}  // namespace vlcalloc
