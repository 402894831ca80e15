#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vlcalloc/allocation.hpp"
#include "vlcalloc/channel.hpp"
#include "vlcalloc/scene.hpp"

namespace vlcalloc {

/// Largest bit rate, at 1 Mbps granularity and no higher than the channel
/// 3-dB bandwidth, at which the user's SINR with every noise term evaluated
/// over that bandwidth still meets the threshold. Zero when even 1 Mbps fails.
double data_rate(const AllocationProblem& problem, const Assignment& assignment, std::size_t us,
                 const Bandwidth& channel_bandwidth);

struct UserReportRow {
    int user_id = 0;
    std::string label;
    Vec3 location;
    std::size_t access_point = 0;  // 1-based
    std::string wavelength;
    std::size_t branch = 0;  // 1-based
    double sinr_db = 0.0;    // rounded to 0.01 dB
    double bandwidth_hz = 0.0;
    bool bandwidth_at_least = false;
    std::int64_t rate_bps = 0;
    bool operator==(const UserReportRow&) const = default;
};

/// SINR in dB rounded to two decimals.
double round_db(double db);

std::vector<UserReportRow> build_report_rows(const ScenarioConfig& config, const ChannelMatrix& channel,
                                             const AllocationProblem& problem, const AllocationResult& result);

/// Stored outcome of an allocation run; everything needed to regenerate the
/// report without re-solving. Deliberately excludes wall time.
struct ResultDocument {
    std::string scenario;
    std::string scenario_hash;
    std::string solver;
    bool feasible = false;
    double objective = 0.0;
    std::uint64_t nodes = 0;
    std::string certificate;
    double threshold_db = 0.0;
    std::vector<double> sinr_linear;
    std::vector<UserReportRow> rows;
    bool operator==(const ResultDocument&) const = default;
};

ResultDocument make_result_document(const ScenarioConfig& config, const ChannelMatrix& channel,
                                    const AllocationProblem& problem, const AllocationResult& result);
std::string serialize_result(const ResultDocument& doc);
ResultDocument parse_result(const std::string& text);
ResultDocument load_result_file(const std::filesystem::path& path);

/// Fixed columns: user_id,label,x,y,z,access_point,wavelength,branch,sinr_db,
/// bandwidth_hz,bandwidth_at_least,rate_bps.
std::string rows_to_csv(const std::vector<UserReportRow>& rows);
std::vector<UserReportRow> rows_from_csv(const std::string& text);
std::string rows_to_json(const std::vector<UserReportRow>& rows);
std::vector<UserReportRow> rows_from_json(const std::string& text);

enum class Metric { Bandwidth, Sinr, Rate };
/// Bar chart with one bar per user on an 800x400 view box.
std::string svg_chart(const std::vector<UserReportRow>& rows, Metric metric, double threshold_db = 0.0);

enum class ReportFormat { Csv, Json, Svg };
ReportFormat parse_report_format(const std::string& name);

/// Writes report.csv, report.json and/or bandwidth.svg, sinr.svg, rate.svg
/// into `dir` and returns the paths written.
std::vector<std::filesystem::path> emit_report(const std::vector<UserReportRow>& rows,
                                               const std::vector<ReportFormat>& formats,
                                               const std::filesystem::path& dir, double threshold_db = 0.0);

/// Writes `content` to `path` byte for byte; errors carry the path.
void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace vlcalloc
