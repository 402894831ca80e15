#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vlcalloc/channel.hpp"
#include "vlcalloc/scene.hpp"

namespace vlcalloc {

/// Inputs of the assignment problem: electrical signal powers, per-link
/// background shot noise and receiver noise, all in A^2.
struct AllocationProblem {
    std::size_t users = 0;
    std::size_t aps = 0;
    std::size_t wavelengths = 0;
    std::size_t branches = 0;
    std::vector<double> signal;      // [us][ap][w][b]
    std::vector<double> background;  // [us][cp][w][b], shot noise if cp stays unmodulated on w
    double receiver_noise = 0.0;
    double threshold = 0.0;             // linear SINR
    double electrical_bandwidth = 0.0;  // Hz at which the noise terms were evaluated
    std::vector<std::string> wavelength_names;

    [[nodiscard]] std::size_t index(std::size_t us, std::size_t ap, std::size_t w, std::size_t b) const {
        return ((us * aps + ap) * wavelengths + w) * branches + b;
    }
    [[nodiscard]] double p(std::size_t us, std::size_t ap, std::size_t w, std::size_t b) const {
        return signal[index(us, ap, w, b)];
    }
    [[nodiscard]] double bg(std::size_t us, std::size_t ap, std::size_t w, std::size_t b) const {
        return background[index(us, ap, w, b)];
    }
    /// Number of (ap, wavelength, branch) options per user.
    [[nodiscard]] std::size_t choices() const { return aps * wavelengths * branches; }

    void validate() const;
};

/// Converts traced optical powers into an allocation problem.
AllocationProblem build_problem(const ScenarioConfig& config, const ChannelMatrix& channel);

/// One user's (ap, wavelength, branch) selection.
struct Choice {
    std::size_t ap = 0;
    std::size_t wavelength = 0;
    std::size_t branch = 0;
    bool operator==(const Choice&) const = default;
};

/// Binary selector S[us][ap][w][b].
class Assignment {
public:
    Assignment() = default;
    Assignment(std::size_t users, std::size_t aps, std::size_t wavelengths, std::size_t branches);
    static Assignment for_problem(const AllocationProblem& problem);
    static Assignment from_choices(const AllocationProblem& problem, const std::vector<Choice>& choices);

    void set(std::size_t us, std::size_t ap, std::size_t w, std::size_t b, bool on = true);
    [[nodiscard]] bool get(std::size_t us, std::size_t ap, std::size_t w, std::size_t b) const;
    /// Number of ones in the user's block.
    [[nodiscard]] std::size_t count(std::size_t us) const;
    /// The user's selection when exactly one entry is set.
    [[nodiscard]] std::optional<Choice> choice_of(std::size_t us) const;
    /// Users other than `us` selecting (ap, w) on any branch.
    [[nodiscard]] std::size_t others_on(std::size_t us, std::size_t ap, std::size_t w) const;

    [[nodiscard]] std::size_t users() const { return users_; }
    [[nodiscard]] const std::vector<std::uint8_t>& flat() const { return s_; }
    bool operator==(const Assignment&) const = default;

private:
    [[nodiscard]] std::size_t index(std::size_t us, std::size_t ap, std::size_t w, std::size_t b) const {
        return ((us * aps_ + ap) * wavelengths_ + w) * branches_ + b;
    }
    std::size_t users_ = 0, aps_ = 0, wavelengths_ = 0, branches_ = 0;
    std::vector<std::uint8_t> s_;
};

/// SINR of tuple (us, ap, w, b) under selector S: the signal term times S over
/// interference from (cp, w) pairs other users hold, plus background noise
/// from the (cp, w) pairs nobody else holds, plus receiver noise.
double tuple_sinr(const AllocationProblem& problem, const Assignment& s, std::size_t us, std::size_t ap, std::size_t w,
                  std::size_t b);

/// SINR of user `us` at its selected tuple. Throws if the user has no (or
/// more than one) selection.
double sinr(const AllocationProblem& problem, const Assignment& s, std::size_t us);

/// Same, with every noise term rescaled to `bandwidth_hz`.
double sinr_at_bandwidth(const AllocationProblem& problem, const Assignment& s, std::size_t us, double bandwidth_hz);

/// Sum of user SINRs. Throws when a user is not assigned exactly once or an
/// (ap, wavelength) pair is reused.
double objective(const AllocationProblem& problem, const Assignment& s);

enum class ConstraintFamily { ChannelReuse, SingleAssignment, SinrThreshold };
std::string to_string(ConstraintFamily family);

struct Violation {
    ConstraintFamily family;
    std::string detail;
};

struct FeasibilityReport {
    bool feasible = true;
    std::vector<Violation> violations;
};

FeasibilityReport check_feasible(const AllocationProblem& problem, const Assignment& s);

struct SolverStats {
    std::uint64_t nodes = 0;
    double wall_seconds = 0.0;
};

struct AllocationResult {
    bool feasible = false;
    std::string solver;
    Assignment assignment;
    std::vector<Choice> choices;
    std::vector<double> sinr_linear;
    std::vector<double> sinr_db;
    double objective = 0.0;
    SolverStats stats;
    /// Why the instance is infeasible, or empty.
    std::string certificate;
};

/// Enumerates every selection; exact but exponential. Throws if the number of
/// candidate assignments exceeds `max_assignments`.
AllocationResult solve_exhaustive(const AllocationProblem& problem, double max_assignments = 5e7);

/// Depth-first branch and bound over users with an interference-free bound.
/// Returns the same optimum as solve_exhaustive, including tie-breaks.
AllocationResult solve_bnb(const AllocationProblem& problem);

/// Tie-break order: true when `a` precedes `b` as flattened selector vectors
/// (user-major), i.e. at the first user whose selections differ `a` selects
/// the later tuple.
bool selector_less(const AllocationProblem& problem, const std::vector<Choice>& a, const std::vector<Choice>& b);

}  // namespace vlcalloc
