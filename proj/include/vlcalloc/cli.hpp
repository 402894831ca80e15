#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "vlcalloc/channel.hpp"
#include "vlcalloc/report.hpp"

namespace vlcalloc {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInfeasible = 2;

enum class SolverChoice { Exhaustive, Bnb, ExportOnly };
SolverChoice parse_solver_choice(const std::string& name);

/// Everything one CLI invocation needs.
struct RunManifest {
    std::string builtin;              // built-in scenario name, or empty
    std::filesystem::path config;     // scenario file, or empty
    TraceParams trace;
    SolverChoice solver = SolverChoice::Bnb;
    std::filesystem::path out = "out";
    bool use_cache = true;
    std::vector<ReportFormat> formats{ReportFormat::Csv, ReportFormat::Json, ReportFormat::Svg};
    double alpha = 0.0;  // 0 = default big-M
    unsigned workers = 0;

    /// Exactly one scenario source; output directory distinct from the
    /// scenario file and its directory; valid trace parameters.
    void validate() const;
};

ScenarioConfig load_manifest_scenario(const RunManifest& manifest);

/// Returns the channel matrix from `<out>/channel.json` when its hash
/// matches, otherwise traces and writes the cache. Notices go to `log`.
ChannelMatrix obtain_channel(const RunManifest& manifest, const ScenarioConfig& config, std::ostream& log);

int cmd_trace(const RunManifest& manifest, std::ostream& out, std::ostream& err);
int cmd_allocate(const RunManifest& manifest, std::ostream& out, std::ostream& err);
int cmd_report(const std::filesystem::path& result, const std::filesystem::path& out_dir,
               const std::vector<ReportFormat>& formats, std::ostream& out, std::ostream& err);

/// Entry point of the vlcalloc executable.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace vlcalloc
