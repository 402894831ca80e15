#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "vlcalloc/allocation.hpp"
#include "vlcalloc/error.hpp"
#include "vlcalloc/radiometry.hpp"

namespace vlcalloc {

namespace {

constexpr int kFree = -1;
constexpr double kForbidden = -1.0;
constexpr double kForbiddenCost = 1e300;
// Relative slack on bounds so rounding never discards an optimal or tied leaf.
constexpr double kBoundSlack = 1e-9;

using Clock = std::chrono::steady_clock;

Choice decode(const AllocationProblem& pr, std::size_t c) {
    return {c / (pr.wavelengths * pr.branches), (c / pr.branches) % pr.wavelengths, c % pr.branches};
}

// Shared leaf evaluation. `occ[ap * W + w]` holds the user on that channel.
// The arithmetic mirrors tuple_sinr term by term so both give identical bits.
class LeafEvaluator {
public:
    explicit LeafEvaluator(const AllocationProblem& pr) : pr_(pr), sinr_(pr.users) {}

    // Returns false when some user misses the threshold.
    bool evaluate(const std::vector<Choice>& choices, const std::vector<int>& occ, double& total) {
        for (std::size_t us = 0; us < pr_.users; ++us) {
            const auto& c = choices[us];
            double interference = 0.0;
            double background = 0.0;
            for (std::size_t cp = 0; cp < pr_.aps; ++cp) {
                if (cp == c.ap) continue;
                if (occ[cp * pr_.wavelengths + c.wavelength] != kFree) {
                    interference += pr_.p(us, cp, c.wavelength, c.branch);
                } else {
                    background += pr_.bg(us, cp, c.wavelength, c.branch);
                }
            }
            sinr_[us] = pr_.p(us, c.ap, c.wavelength, c.branch) / (interference + background + pr_.receiver_noise);
            if (sinr_[us] < pr_.threshold) return false;
        }
        total = 0.0;
        for (double v : sinr_) total += v;
        return true;
    }

private:
    const AllocationProblem& pr_;
    std::vector<double> sinr_;
};

struct Incumbent {
    bool found = false;
    double value = -std::numeric_limits<double>::infinity();
    std::vector<Choice> choices;

    void offer(const AllocationProblem& pr, const std::vector<Choice>& c, double v) {
        if (!found || v > value || (v == value && selector_less(pr, c, choices))) {
            found = true;
            value = v;
            choices = c;
        }
    }
};

AllocationResult finish(const AllocationProblem& pr, const Incumbent& inc, std::string solver, std::uint64_t nodes,
                        Clock::time_point start, std::string certificate) {
    AllocationResult r;
    r.solver = std::move(solver);
    r.stats.nodes = nodes;
    if (inc.found) {
        r.feasible = true;
        r.choices = inc.choices;
        r.assignment = Assignment::from_choices(pr, inc.choices);
        for (std::size_t us = 0; us < pr.users; ++us) {
            const double v = sinr(pr, r.assignment, us);
            r.sinr_linear.push_back(v);
            r.sinr_db.push_back(linear_to_db(v));
        }
        r.objective = objective(pr, r.assignment);
    } else {
        r.certificate = std::move(certificate);
    }
    r.stats.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return r;
}

// Best SINR a tuple can reach: every other access point contributes at most
// min(P, sigma_bg) whether or not it ends up modulated on that wavelength.
double free_bound(const AllocationProblem& pr, std::size_t us, const Choice& c) {
    double d = 0.0;
    for (std::size_t cp = 0; cp < pr.aps; ++cp) {
        if (cp == c.ap) continue;
        d += std::min(pr.p(us, cp, c.wavelength, c.branch), pr.bg(us, cp, c.wavelength, c.branch));
    }
    return pr.p(us, c.ap, c.wavelength, c.branch) / (d + pr.receiver_noise);
}

std::string unreachable_certificate(const AllocationProblem& pr, std::size_t us) {
    double best = 0.0;
    for (std::size_t c = 0; c < pr.choices(); ++c) best = std::max(best, free_bound(pr, us, decode(pr, c)));
    std::ostringstream os;
    os << to_string(ConstraintFamily::SinrThreshold) << ": user index " << us << " cannot reach "
       << linear_to_db(pr.threshold) << " dB on any tuple even without co-channel interference (best "
       << (best > 0.0 ? linear_to_db(best) : -std::numeric_limits<double>::infinity()) << " dB)";
    return os.str();
}

std::string exhausted_certificate(std::uint64_t nodes) {
    std::ostringstream os;
    os << to_string(ConstraintFamily::SinrThreshold) << " with " << to_string(ConstraintFamily::ChannelReuse)
       << ": search of " << nodes << " nodes found no assignment meeting the threshold for every user";
    return os.str();
}

class BranchAndBound {
public:
    explicit BranchAndBound(const AllocationProblem& pr)
        : pr_(pr), occ_(pr.aps * pr.wavelengths, kFree), choice_(pr.users), assigned_(pr.users, false),
          eval_(pr), floor_(pr.threshold * (1.0 - kBoundSlack)) {
        cand_.resize(pr.users);
        for (std::size_t us = 0; us < pr.users; ++us) {
            std::vector<std::pair<double, std::size_t>> scored;
            for (std::size_t c = 0; c < pr.choices(); ++c) {
                const double ub = free_bound(pr, us, decode(pr, c));
                if (ub >= floor_) scored.emplace_back(ub, c);
            }
            std::stable_sort(scored.begin(), scored.end(), [](auto& a, auto& b) { return a.first > b.first; });
            for (auto& [ub, c] : scored) cand_[us].push_back(decode(pr, c));
        }
        order_.resize(pr.users);
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        // Users with the largest attainable SINR first: they dominate the
        // objective, so fixing them early tightens the bound fastest.
        std::vector<double> top(pr.users, 0.0);
        for (std::size_t us = 0; us < pr.users; ++us)
            if (!cand_[us].empty()) top[us] = free_bound(pr, us, cand_[us].front());
        std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) { return top[a] > top[b]; });
    }

    AllocationResult run() {
        const auto start = Clock::now();
        for (std::size_t us = 0; us < pr_.users; ++us) {
            if (cand_[us].empty()) return finish(pr_, inc_, "bnb", 0, start, unreachable_certificate(pr_, us));
        }
        descend(0);
        return finish(pr_, inc_, "bnb", nodes_, start, exhausted_certificate(nodes_));
    }

private:
    // Upper bound on the SINR of `us` at `c` given the channels occupied so far.
    double bound(std::size_t us, const Choice& c) const {
        double d = 0.0;
        for (std::size_t cp = 0; cp < pr_.aps; ++cp) {
            if (cp == c.ap) continue;
            const double p = pr_.p(us, cp, c.wavelength, c.branch);
            d += occ_[cp * pr_.wavelengths + c.wavelength] != kFree ? p
                                                                   : std::min(p, pr_.bg(us, cp, c.wavelength, c.branch));
        }
        return pr_.p(us, c.ap, c.wavelength, c.branch) / (d + pr_.receiver_noise);
    }

    bool prune() {
        double total = 0.0;
        free_users_.clear();
        for (std::size_t us = 0; us < pr_.users; ++us) {
            if (assigned_[us]) {
                const double ub = bound(us, choice_[us]);
                if (ub < floor_) return true;
                total += ub;
            } else {
                free_users_.push_back(us);
            }
        }
        if (free_users_.empty()) return false;

        // Unassigned users still need distinct channels, so the best
        // completion is bounded by a maximum-weight matching of users to
        // free (ap, wavelength) pairs.
        const std::size_t channels = pr_.aps * pr_.wavelengths;
        weight_.assign(free_users_.size() * channels, kForbidden);
        for (std::size_t i = 0; i < free_users_.size(); ++i) {
            const std::size_t us = free_users_[i];
            bool any = false;
            for (const auto& c : cand_[us]) {
                const std::size_t ch = c.ap * pr_.wavelengths + c.wavelength;
                if (occ_[ch] != kFree) continue;
                const double ub = bound(us, c);
                if (ub < floor_) continue;
                double& w = weight_[i * channels + ch];
                w = std::max(w, ub);
                any = true;
            }
            if (!any) return true;
        }
        const double matched = max_weight_matching(free_users_.size(), channels);
        if (matched < 0.0) return true;
        total += matched;
        return inc_.found && total < inc_.value * (1.0 - kBoundSlack);
    }

    // Hungarian algorithm on rows = free users, columns = channels. Returns
    // the maximum total weight, or -1 when every complete matching needs a
    // forbidden edge.
    double max_weight_matching(std::size_t n, std::size_t m) {
        constexpr double inf = std::numeric_limits<double>::infinity();
        double top = 0.0;
        for (double w : weight_) top = std::max(top, w);
        auto cost = [&](std::size_t i, std::size_t j) {
            const double w = weight_[(i - 1) * m + (j - 1)];
            return w == kForbidden ? kForbiddenCost : top - w;
        };
        std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
        std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
        std::vector<bool> used(m + 1);
        for (std::size_t i = 1; i <= n; ++i) {
            p[0] = i;
            std::size_t j0 = 0;
            std::fill(minv.begin(), minv.end(), inf);
            std::fill(used.begin(), used.end(), false);
            do {
                used[j0] = true;
                const std::size_t i0 = p[j0];
                double delta = inf;
                std::size_t j1 = 0;
                for (std::size_t j = 1; j <= m; ++j) {
                    if (used[j]) continue;
                    const double cur = cost(i0, j) - u[i0] - v[j];
                    if (cur < minv[j]) {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if (minv[j] < delta) {
                        delta = minv[j];
                        j1 = j;
                    }
                }
                for (std::size_t j = 0; j <= m; ++j) {
                    if (used[j]) {
                        u[p[j]] += delta;
                        v[j] -= delta;
                    } else {
                        minv[j] -= delta;
                    }
                }
                j0 = j1;
            } while (p[j0] != 0);
            do {
                const std::size_t j1 = way[j0];
                p[j0] = p[j1];
                j0 = j1;
            } while (j0 != 0);
        }
        double total = 0.0;
        for (std::size_t j = 1; j <= m; ++j) {
            if (p[j] == 0) continue;
            const double w = weight_[(p[j] - 1) * m + (j - 1)];
            if (w == kForbidden) return -1.0;
            total += w;
        }
        return total;
    }

    void descend(std::size_t depth) {
        ++nodes_;
        if (depth == pr_.users) {
            double total = 0.0;
            if (eval_.evaluate(choice_, occ_, total)) inc_.offer(pr_, choice_, total);
            return;
        }
        if (prune()) return;
        const std::size_t us = order_[depth];
        for (const auto& c : cand_[us]) {
            int& slot = occ_[c.ap * pr_.wavelengths + c.wavelength];
            if (slot != kFree) continue;
            slot = static_cast<int>(us);
            choice_[us] = c;
            assigned_[us] = true;
            descend(depth + 1);
            assigned_[us] = false;
            slot = kFree;
        }
    }

    const AllocationProblem& pr_;
    std::vector<std::vector<Choice>> cand_;
    std::vector<std::size_t> order_;
    std::vector<int> occ_;
    std::vector<Choice> choice_;
    std::vector<bool> assigned_;
    LeafEvaluator eval_;
    Incumbent inc_;
    double floor_;
    std::uint64_t nodes_ = 0;
    std::vector<std::size_t> free_users_;
    std::vector<double> weight_;
};

}  // namespace

AllocationResult solve_exhaustive(const AllocationProblem& problem, double max_assignments) {
    problem.validate();
    const auto start = Clock::now();
    // Assignments respecting channel reuse: ordered picks of distinct
    // (ap, wavelength) pairs, times a branch per user.
    double space = 1.0;
    const auto channels = static_cast<double>(problem.aps * problem.wavelengths);
    for (std::size_t us = 0; us < problem.users; ++us) space *= (channels - static_cast<double>(us)) * problem.branches;
    if (space > max_assignments) {
        std::ostringstream os;
        os << "exhaustive search over " << space << " assignments exceeds the cap of " << max_assignments;
        throw Error(os.str());
    }

    std::vector<int> occ(problem.aps * problem.wavelengths, kFree);
    std::vector<Choice> choice(problem.users);
    LeafEvaluator eval(problem);
    Incumbent inc;
    std::uint64_t leaves = 0;

    auto recurse = [&](auto& self, std::size_t us) -> void {
        if (us == problem.users) {
            ++leaves;
            double total = 0.0;
            if (eval.evaluate(choice, occ, total)) inc.offer(problem, choice, total);
            return;
        }
        for (std::size_t c = 0; c < problem.choices(); ++c) {
            const Choice ch = decode(problem, c);
            int& slot = occ[ch.ap * problem.wavelengths + ch.wavelength];
            if (slot != kFree) continue;
            slot = static_cast<int>(us);
            choice[us] = ch;
            self(self, us + 1);
            slot = kFree;
        }
    };
    recurse(recurse, 0);
    return finish(problem, inc, "exhaustive", leaves, start, exhausted_certificate(leaves));
}

AllocationResult solve_bnb(const AllocationProblem& problem) {
    problem.validate();
    return BranchAndBound(problem).run();
}

}  // namespace vlcalloc
