#include "fixtures.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <unistd.h>
#include <mutex>

namespace fixtures {

using namespace vlcalloc;

const Traced& traced(const std::string& name) {
    static std::mutex mutex;
    static std::map<std::string, Traced> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(name);
    if (it == cache.end()) {
        Traced t;
        t.config = builtin_scenario(name);
        t.scene = build_scene(t.config);
        t.channel = compute_channel_matrix(t.scene, TraceParams{});
        t.problem = build_problem(t.config, t.channel);
        it = cache.emplace(name, std::move(t)).first;
    }
    return it->second;
}

AllocationProblem random_problem(std::mt19937_64& rng, std::size_t users, std::size_t aps, std::size_t wavelengths,
                                 std::size_t branches, bool background_below_signal) {
    std::uniform_real_distribution<double> exponent(-15.0, -9.0);
    AllocationProblem p;
    p.users = users;
    p.aps = aps;
    p.wavelengths = wavelengths;
    p.branches = branches;
    const std::size_t n = users * aps * wavelengths * branches;
    for (std::size_t i = 0; i < n; ++i) {
        const double s = std::pow(10.0, exponent(rng));
        double b = std::pow(10.0, exponent(rng));
        if (background_below_signal) b = std::min(b, s);
        p.signal.push_back(s);
        p.background.push_back(b);
    }
    p.receiver_noise = 1e-13;
    p.threshold = std::pow(10.0, std::uniform_real_distribution<double>(0.0, 2.0)(rng));
    p.electrical_bandwidth = 5e9;
    for (std::size_t w = 0; w < wavelengths; ++w) p.wavelength_names.push_back("w" + std::to_string(w + 1));
    return p;
}

std::vector<Choice> published_assignment(const std::string& scenario) {
    struct Row {
        int ap, wavelength, branch;
    };
    constexpr int R = 0, Y = 1, G = 2;
    std::vector<Row> rows;
    if (scenario == "office") {
        rows = {{1, Y, 1}, {2, R, 1}, {1, R, 3}, {2, Y, 3}, {3, R, 1}, {4, Y, 1}, {3, Y, 3}, {4, R, 3}};
    } else if (scenario == "cabin") {
        rows = {{1, R, 4}, {1, G, 2}, {1, Y, 3}, {2, R, 2}, {2, Y, 2}, {2, G, 3}, {3, R, 3}, {3, G, 2}, {3, Y, 3},
                {4, R, 3}, {4, Y, 3}, {4, G, 2}, {5, R, 2}, {5, G, 3}, {5, Y, 2}, {6, R, 4}, {6, Y, 3}, {6, G, 2}};
    } else if (scenario == "datacentre") {
        rows = {{1, R, 1}, {1, Y, 4}, {2, R, 2}, {3, Y, 2}, {3, R, 3},
                {4, R, 2}, {4, Y, 3}, {5, R, 1}, {6, Y, 2}, {6, R, 4}};
    }
    std::vector<Choice> out;
    for (const auto& r : rows) {
        out.push_back({static_cast<std::size_t>(r.ap - 1), static_cast<std::size_t>(r.wavelength),
                       static_cast<std::size_t>(r.branch - 1)});
    }
    return out;
}

std::filesystem::path scratch_dir(const std::string& tag) {
    const auto dir = std::filesystem::temp_directory_path() /
                     ("vlcalloc-test-" + std::to_string(::getpid()) + "-" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace fixtures
