#pragma once

#include <cstdint>
#include <filesystem>
#include <random>

#include "vlcalloc/allocation.hpp"
#include "vlcalloc/channel.hpp"
#include "vlcalloc/scene.hpp"

namespace fixtures {

/// Built scene, default-trace channel matrix and problem of a built-in
/// scenario, computed once per process.
struct Traced {
    vlcalloc::ScenarioConfig config;
    vlcalloc::Scene scene;
    vlcalloc::ChannelMatrix channel;
    vlcalloc::AllocationProblem problem;
};
const Traced& traced(const std::string& name);

/// Random problem with log-uniform powers over six decades.
vlcalloc::AllocationProblem random_problem(std::mt19937_64& rng, std::size_t users, std::size_t aps,
                                           std::size_t wavelengths, std::size_t branches,
                                           bool background_below_signal = false);

/// Published assignments as (ap, wavelength, branch), 1-based, wavelength
/// 0 = red, 1 = yellow, 2 = green.
std::vector<vlcalloc::Choice> published_assignment(const std::string& scenario);

/// Fresh empty directory under the system temp directory.
std::filesystem::path scratch_dir(const std::string& tag);

/// Whole file as bytes.
std::string slurp(const std::filesystem::path& path);

}  // namespace fixtures
