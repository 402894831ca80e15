#include "vlcalloc/allocation.hpp"

#include <cmath>
#include <sstream>

#include "vlcalloc/error.hpp"
#include "vlcalloc/radiometry.hpp"

namespace vlcalloc {

void AllocationProblem::validate() const {
    if (users == 0 || aps == 0 || wavelengths == 0 || branches == 0) throw Error("allocation problem has an empty dimension");
    const std::size_t n = users * aps * wavelengths * branches;
    if (signal.size() != n || background.size() != n) throw Error("allocation problem tensors have the wrong size");
    if (aps * wavelengths < users) {
        throw Error("infeasible: " + std::to_string(users) + " users but only " + std::to_string(aps * wavelengths) +
                    " (access point, wavelength) channels");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(signal[i]) || signal[i] < 0.0) throw Error("signal power must be finite and non-negative");
        if (!std::isfinite(background[i]) || background[i] < 0.0) {
            throw Error("background noise must be finite and non-negative");
        }
    }
    if (!(receiver_noise > 0.0) || !std::isfinite(receiver_noise)) throw Error("receiver noise must be positive");
    if (!(threshold > 0.0) || !std::isfinite(threshold)) throw Error("SINR threshold must be positive");
    if (!(electrical_bandwidth > 0.0)) throw Error("electrical bandwidth must be positive");
}

AllocationProblem build_problem(const ScenarioConfig& config, const ChannelMatrix& channel) {
    if (channel.users != config.stations.size() || channel.aps != config.transmitters.size() ||
        channel.wavelengths != config.wavelengths.size()) {
        throw Error("channel matrix does not match the scenario dimensions");
    }
    const auto& r = config.radiometry;
    NoiseParams noise{r.noise_current_density * r.noise_current_density, r.electrical_bandwidth,
                      r.optical_filter_factor};
    noise.validate();

    AllocationProblem p;
    p.users = channel.users;
    p.aps = channel.aps;
    p.wavelengths = channel.wavelengths;
    p.branches = channel.branches;
    p.signal.resize(channel.received_power.size());
    p.background.resize(channel.received_power.size());
    for (std::size_t us = 0; us < p.users; ++us) {
        for (std::size_t ap = 0; ap < p.aps; ++ap) {
            for (std::size_t w = 0; w < p.wavelengths; ++w) {
                const double resp = config.wavelengths[w].responsivity;
                for (std::size_t b = 0; b < p.branches; ++b) {
                    const double po = channel.po(us, ap, w, b);
                    const std::size_t i = p.index(us, ap, w, b);
                    // OOK: signal and interference power follow the on/off
                    // swing, shot noise follows the mean level.
                    p.signal[i] = electrical_power(resp, r.ook_swing * po);
                    p.background[i] = shot_noise(resp, po, noise);
                }
            }
        }
    }
    p.receiver_noise = receiver_noise(noise);
    p.threshold = db_to_linear(r.sinr_threshold_db);
    p.electrical_bandwidth = r.electrical_bandwidth;
    for (const auto& w : config.wavelengths) p.wavelength_names.push_back(w.name);
    p.validate();
    return p;
}

Assignment::Assignment(std::size_t users, std::size_t aps, std::size_t wavelengths, std::size_t branches)
    : users_(users), aps_(aps), wavelengths_(wavelengths), branches_(branches),
      s_(users * aps * wavelengths * branches, 0) {}

Assignment Assignment::for_problem(const AllocationProblem& problem) {
    return {problem.users, problem.aps, problem.wavelengths, problem.branches};
}

Assignment Assignment::from_choices(const AllocationProblem& problem, const std::vector<Choice>& choices) {
    if (choices.size() != problem.users) throw Error("one choice per user required");
    auto s = for_problem(problem);
    for (std::size_t us = 0; us < choices.size(); ++us) {
        const auto& c = choices[us];
        if (c.ap >= problem.aps || c.wavelength >= problem.wavelengths || c.branch >= problem.branches) {
            throw Error("choice of user index " + std::to_string(us) + " is out of range");
        }
        s.set(us, c.ap, c.wavelength, c.branch);
    }
    return s;
}

void Assignment::set(std::size_t us, std::size_t ap, std::size_t w, std::size_t b, bool on) {
    s_.at(index(us, ap, w, b)) = on ? 1 : 0;
}

bool Assignment::get(std::size_t us, std::size_t ap, std::size_t w, std::size_t b) const {
    return s_[index(us, ap, w, b)] != 0;
}

std::size_t Assignment::count(std::size_t us) const {
    const std::size_t block = aps_ * wavelengths_ * branches_;
    std::size_t n = 0;
    for (std::size_t i = us * block; i < (us + 1) * block; ++i) n += s_[i];
    return n;
}

std::optional<Choice> Assignment::choice_of(std::size_t us) const {
    if (count(us) != 1) return std::nullopt;
    for (std::size_t ap = 0; ap < aps_; ++ap)
        for (std::size_t w = 0; w < wavelengths_; ++w)
            for (std::size_t b = 0; b < branches_; ++b)
                if (get(us, ap, w, b)) return Choice{ap, w, b};
    return std::nullopt;
}

std::size_t Assignment::others_on(std::size_t us, std::size_t ap, std::size_t w) const {
    std::size_t n = 0;
    for (std::size_t ui = 0; ui < users_; ++ui) {
        if (ui == us) continue;
        for (std::size_t f = 0; f < branches_; ++f) n += s_[index(ui, ap, w, f)];
    }
    return n;
}

namespace {

double tuple_sinr_scaled(const AllocationProblem& pr, const Assignment& s, std::size_t us, std::size_t ap,
                         std::size_t w, std::size_t b, double noise_scale) {
    double interference = 0.0;
    double background = 0.0;
    for (std::size_t cp = 0; cp < pr.aps; ++cp) {
        if (cp == ap) continue;
        const auto held = static_cast<double>(s.others_on(us, cp, w));
        interference += pr.p(us, cp, w, b) * held;
        background += pr.bg(us, cp, w, b) * noise_scale * (1.0 - held);
    }
    const double numerator = pr.p(us, ap, w, b) * (s.get(us, ap, w, b) ? 1.0 : 0.0);
    return numerator / (interference + background + pr.receiver_noise * noise_scale);
}

void check_shape(const AllocationProblem& pr, const Assignment& s) {
    if (s.flat().size() != pr.signal.size()) throw Error("assignment does not match the problem dimensions");
}

}  // namespace

double tuple_sinr(const AllocationProblem& problem, const Assignment& s, std::size_t us, std::size_t ap, std::size_t w,
                  std::size_t b) {
    check_shape(problem, s);
    return tuple_sinr_scaled(problem, s, us, ap, w, b, 1.0);
}

double sinr(const AllocationProblem& problem, const Assignment& s, std::size_t us) {
    return sinr_at_bandwidth(problem, s, us, problem.electrical_bandwidth);
}

double sinr_at_bandwidth(const AllocationProblem& problem, const Assignment& s, std::size_t us, double bandwidth_hz) {
    check_shape(problem, s);
    if (us >= problem.users) throw Error("user index out of range");
    if (!(bandwidth_hz > 0.0)) throw Error("bandwidth must be positive");
    const auto c = s.choice_of(us);
    if (!c) throw Error("user index " + std::to_string(us) + " is not assigned exactly once");
    return tuple_sinr_scaled(problem, s, us, c->ap, c->wavelength, c->branch,
                             bandwidth_hz / problem.electrical_bandwidth);
}

double objective(const AllocationProblem& problem, const Assignment& s) {
    check_shape(problem, s);
    for (std::size_t ap = 0; ap < problem.aps; ++ap) {
        for (std::size_t w = 0; w < problem.wavelengths; ++w) {
            std::size_t n = 0;
            for (std::size_t us = 0; us < problem.users; ++us)
                for (std::size_t b = 0; b < problem.branches; ++b) n += s.get(us, ap, w, b);
            if (n > 1) throw Error("infeasible assignment: access point and wavelength pair reused");
        }
    }
    double total = 0.0;
    for (std::size_t us = 0; us < problem.users; ++us) total += sinr(problem, s, us);
    return total;
}

std::string to_string(ConstraintFamily family) {
    switch (family) {
        case ConstraintFamily::ChannelReuse:
            return "channel-reuse";
        case ConstraintFamily::SingleAssignment:
            return "single-assignment";
        case ConstraintFamily::SinrThreshold:
            return "sinr-threshold";
    }
    return "unknown";
}

FeasibilityReport check_feasible(const AllocationProblem& problem, const Assignment& s) {
    check_shape(problem, s);
    FeasibilityReport rep;
    auto add = [&](ConstraintFamily f, std::string detail) {
        rep.feasible = false;
        rep.violations.push_back({f, std::move(detail)});
    };
    for (std::size_t ap = 0; ap < problem.aps; ++ap) {
        for (std::size_t w = 0; w < problem.wavelengths; ++w) {
            std::size_t n = 0;
            for (std::size_t us = 0; us < problem.users; ++us)
                for (std::size_t b = 0; b < problem.branches; ++b) n += s.get(us, ap, w, b);
            if (n > 1) {
                add(ConstraintFamily::ChannelReuse, "access point " + std::to_string(ap + 1) + " wavelength " +
                                                        std::to_string(w + 1) + " carries " + std::to_string(n) +
                                                        " users");
            }
        }
    }
    for (std::size_t us = 0; us < problem.users; ++us) {
        const auto n = s.count(us);
        if (n != 1) {
            add(ConstraintFamily::SingleAssignment,
                "user index " + std::to_string(us) + " has " + std::to_string(n) + " selections");
        }
    }
    // The threshold applies to every selected tuple, so it is checked even
    // when the structural constraints already fail.
    for (std::size_t us = 0; us < problem.users; ++us)
        for (std::size_t ap = 0; ap < problem.aps; ++ap)
            for (std::size_t w = 0; w < problem.wavelengths; ++w)
                for (std::size_t b = 0; b < problem.branches; ++b) {
                    if (!s.get(us, ap, w, b)) continue;
                    const double v = tuple_sinr(problem, s, us, ap, w, b);
                    if (v < problem.threshold) {
                        std::ostringstream os;
                        os << "user index " << us << " SINR " << linear_to_db(v) << " dB below "
                           << linear_to_db(problem.threshold) << " dB";
                        add(ConstraintFamily::SinrThreshold, os.str());
                    }
                }
    return rep;
}

bool selector_less(const AllocationProblem& problem, const std::vector<Choice>& a, const std::vector<Choice>& b) {
    for (std::size_t us = 0; us < a.size() && us < b.size(); ++us) {
        const std::size_t ia = problem.index(0, a[us].ap, a[us].wavelength, a[us].branch);
        const std::size_t ib = problem.index(0, b[us].ap, b[us].wavelength, b[us].branch);
        if (ia != ib) return ia > ib;  // the earlier 1 makes the flattened vector larger
    }
    return false;
}

}  // namespace vlcalloc
