#include "vlcalloc/channel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>
#include <numeric>

#include <fftw3.h>

#include "vlcalloc/channel_cache.hpp"
#include "vlcalloc/error.hpp"
#include "vlcalloc/parallel.hpp"

namespace vlcalloc {

void TraceParams::validate() const {
    if (!(bin_width > 0.0)) throw Error("bin width must be positive");
    if (!(window > bin_width)) throw Error("trace window must exceed one bin");
    if (max_order < 0 || max_order > 2) throw Error("reflection order must be 0, 1 or 2");
}

double received_optical_power(const ImpulseResponse& ir) {
    return std::accumulate(ir.bins.begin(), ir.bins.end(), 0.0);
}

Bandwidth bandwidth_3db(const ImpulseResponse& ir) {
    const double total = received_optical_power(ir);
    if (!(total > 0.0)) throw Error("bandwidth of an all-zero impulse response is undefined");
    const double nyquist = 0.5 / ir.bin_width;

    // |H(f)| >= peak - (total - peak) for every f; when that floor already
    // sits above the half-power level no crossing can exist.
    const double peak = *std::max_element(ir.bins.begin(), ir.bins.end());
    const double floor = 2.0 * peak - total;
    if (floor > 0.0 && floor * floor > 0.5 * total * total) return {nyquist, true};

    const std::size_t n = std::max(kBandwidthGridPoints, std::bit_ceil(ir.bins.size()));
    static std::mutex fftw_mutex;  // FFTW planning is not thread-safe
    std::lock_guard lock(fftw_mutex);
    auto* in = static_cast<double*>(fftw_malloc(sizeof(double) * n));
    auto* out = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
    std::fill(in, in + n, 0.0);
    std::copy(ir.bins.begin(), ir.bins.end(), in);
    fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);
    fftw_execute(plan);

    const double dc = out[0][0] * out[0][0] + out[0][1] * out[0][1];
    Bandwidth result{nyquist, true};
    for (std::size_t k = 1; k <= n / 2; ++k) {
        const double mag2 = out[k][0] * out[k][0] + out[k][1] * out[k][1];
        if (mag2 <= 0.5 * dc) {
            result = {static_cast<double>(k) / (static_cast<double>(n) * ir.bin_width), false};
            break;
        }
    }
    fftw_destroy_plan(plan);
    fftw_free(in);
    fftw_free(out);
    return result;
}

double rms_delay_spread(const ImpulseResponse& ir) {
    const double total = received_optical_power(ir);
    if (!(total > 0.0)) throw Error("delay spread of an all-zero impulse response is undefined");
    double mean = 0.0;
    for (std::size_t i = 0; i < ir.bins.size(); ++i) mean += ir.delay_of(i) * ir.bins[i];
    mean /= total;
    double var = 0.0;
    for (std::size_t i = 0; i < ir.bins.size(); ++i) {
        const double dt = ir.delay_of(i) - mean;
        var += dt * dt * ir.bins[i];
    }
    return std::sqrt(var / total);
}

double lambertian_transfer(const Vec3& src, const Vec3& src_normal, double order, const Vec3& dst,
                           const Vec3& dst_normal, double area) {
    const Vec3 v = dst - src;
    const double d2 = v.norm2();
    const double d = std::sqrt(d2);
    const double cos_src = v.dot(src_normal) / d;
    const double cos_dst = -v.dot(dst_normal) / d;
    if (!(cos_src > 0.0) || !(cos_dst > 0.0)) return 0.0;
    return (order + 1.0) / (2.0 * kPi) * std::pow(cos_src, order) * cos_dst * area / d2;
}

namespace {

// Transfer onto a detector branch with a hard field-of-view cutoff.
double detector_transfer(const Vec3& src, const Vec3& src_normal, double order, const Vec3& rx,
                         const ReceiverBranch& branch) {
    const Vec3 v = rx - src;
    const double d = v.norm();
    if (d == 0.0) return 0.0;
    const double cos_in = -v.dot(branch.boresight()) / d;
    if (cos_in < std::cos(deg2rad(branch.fov_deg))) return 0.0;
    return lambertian_transfer(src, src_normal, order, rx, branch.boresight(), branch.area);
}

// Largest possible share an element can send to a detector of this area,
// whatever the detector orientation.
double detector_bound(const Element& e, const Vec3& rx, double area) {
    const Vec3 v = rx - e.centre;
    const double d2 = v.norm2();
    const double cos_src = v.dot(e.normal) / std::sqrt(d2);
    if (!(cos_src > 0.0)) return 0.0;
    return (e.lambertian_order + 1.0) / (2.0 * kPi) * std::pow(cos_src, e.lambertian_order) * area / d2;
}

void deposit(LinkTrace& t, double delay, double power, int order) {
    const auto bin = static_cast<std::size_t>(std::floor((delay - t.ir.origin_delay) / t.ir.bin_width));
    if (bin >= t.ir.bins.size()) {
        t.ir.bins.resize(bin + 1, 0.0);
        t.window_extended = true;
    }
    t.ir.bins[bin] += power;
    t.direct_total += power;
    t.order_power[static_cast<std::size_t>(order)] += power;
}

// Fraction of element i's exitance landing on element j.
double element_transfer(const Element& from, const Element& to, const std::vector<Blocker>& blockers) {
    const double f = lambertian_transfer(from.centre, from.normal, from.lambertian_order, to.centre, to.normal, to.area);
    if (f == 0.0 || occluded(from.centre, to.centre, blockers)) return 0.0;
    return f;
}

}  // namespace

double los_power(const TransmitterUnit& tx, std::size_t wavelength, const Vec3& rx_position,
                 const ReceiverBranch& branch, const std::vector<Blocker>& blockers) {
    if ((rx_position - tx.position).norm2() == 0.0) throw Error("access point and receiver coincide");
    const double g = detector_transfer(tx.position, tx.orientation, tx.lambertian_order, rx_position, branch);
    if (g == 0.0 || occluded(tx.position, rx_position, blockers)) return 0.0;
    return tx.power.at(wavelength) * g;
}

ChannelTracer::ChannelTracer(const Scene& scene, TraceParams params, unsigned workers)
    : scene_(scene), params_(params) {
    params_.validate();
    if (params_.max_order >= 1 && scene_.first_order_elements.empty()) {
        throw Error("scene is not meshed for first-order reflections");
    }
    if (params_.max_order >= 2 && scene_.second_order_elements.empty()) {
        throw Error("scene is not meshed for second-order reflections");
    }
    const auto& blockers = scene_.config.blockers;
    if (workers == 0) workers = worker_count_from_env();

    auto illuminate = [&](const std::vector<Element>& mesh, std::vector<std::vector<double>>& incident,
                          std::vector<std::vector<double>>& distance) {
        incident.assign(scene_.transmitters.size(), std::vector<double>(mesh.size(), 0.0));
        distance.assign(scene_.transmitters.size(), std::vector<double>(mesh.size(), 0.0));
        for (std::size_t ap = 0; ap < scene_.transmitters.size(); ++ap) {
            const auto& tx = scene_.transmitters[ap];
            for (std::size_t e = 0; e < mesh.size(); ++e) {
                const auto& el = mesh[e];
                distance[ap][e] = (el.centre - tx.position).norm();
                const double f =
                    lambertian_transfer(tx.position, tx.orientation, tx.lambertian_order, el.centre, el.normal, el.area);
                if (f > 0.0 && !occluded(tx.position, el.centre, blockers)) incident[ap][e] = f;
            }
        }
    };

    auto detector_share = [&](const Element& e) {
        double sum = 0.0;
        for (const auto& st : scene_.config.stations) {
            for (const auto& br : st.branches) sum += detector_bound(e, st.position, br.area);
        }
        return sum;
    };

    if (params_.max_order >= 1) {
        illuminate(scene_.first_order_elements, first_incident_, first_distance_);
        const auto& mesh = scene_.first_order_elements;
        first_scale_.assign(mesh.size(), 1.0);
        for (std::size_t i = 0; i < mesh.size(); ++i) {
            const double share = detector_share(mesh[i]);
            if (share > 1.0) first_scale_[i] = 1.0 / share;
        }
    }
    if (params_.max_order >= 2) {
        illuminate(scene_.second_order_elements, second_incident_, second_distance_);
        // Point-to-patch transfers overestimate coupling between adjacent
        // patches (corners, edges); rows whose outgoing shares sum above one
        // are scaled back so no element re-emits more than it receives.
        const auto& mesh = scene_.second_order_elements;
        second_scale_.assign(mesh.size(), 1.0);
        parallel_for(mesh.size(), workers, [&](std::size_t i) {
            double sum = detector_share(mesh[i]);
            for (std::size_t j = 0; j < mesh.size(); ++j) {
                if (j != i) sum += element_transfer(mesh[i], mesh[j], blockers);
            }
            if (sum > 1.0) second_scale_[i] = 1.0 / sum;
        });
    }
}

std::vector<ChannelTracer::Visible> ChannelTracer::visible_elements(const std::vector<Element>& mesh,
                                                                    const std::vector<double>& scale,
                                                                    const Vec3& rx,
                                                                    const ReceiverBranch& branch) const {
    std::vector<Visible> out;
    for (std::size_t e = 0; e < mesh.size(); ++e) {
        const auto& el = mesh[e];
        const double g = detector_transfer(el.centre, el.normal, el.lambertian_order, rx, branch);
        if (g > 0.0 && !occluded(el.centre, rx, scene_.config.blockers)) {
            out.push_back({e, el.reflectance * scale[e] * g, (rx - el.centre).norm()});
        }
    }
    return out;
}

std::vector<LinkTrace> ChannelTracer::trace_branch(std::size_t station, std::size_t branch) const {
    const auto& st = scene_.config.stations.at(station);
    const auto& br = st.branches.at(branch);
    const Vec3 rx = st.position;
    const auto& blockers = scene_.config.blockers;
    const std::size_t n_ap = scene_.transmitters.size();

    std::vector<LinkTrace> traces(n_ap);
    const auto bins = static_cast<std::size_t>(std::ceil(params_.window / params_.bin_width));
    for (auto& t : traces) {
        t.ir.bin_width = params_.bin_width;
        t.ir.origin_delay = 0.0;
        t.ir.bins.assign(bins, 0.0);
    }

    for (std::size_t ap = 0; ap < n_ap; ++ap) {
        const auto& tx = scene_.transmitters[ap];
        const double d = (rx - tx.position).norm();
        if (d == 0.0) throw Error("access point and receiver coincide");
        const double g = detector_transfer(tx.position, tx.orientation, tx.lambertian_order, rx, br);
        if (g > 0.0 && !occluded(tx.position, rx, blockers)) deposit(traces[ap], d / kSpeedOfLight, g, 0);
    }

    if (params_.max_order >= 1) {
        for (const auto& v : visible_elements(scene_.first_order_elements, first_scale_, rx, br)) {
            for (std::size_t ap = 0; ap < n_ap; ++ap) {
                const double p = first_incident_[ap][v.element] * v.gain;
                if (p > 0.0) {
                    deposit(traces[ap], (first_distance_[ap][v.element] + v.distance) / kSpeedOfLight, p, 1);
                }
            }
        }
    }

    if (params_.max_order >= 2) {
        const auto& mesh = scene_.second_order_elements;
        std::vector<double> coupling(mesh.size());
        std::vector<double> hop(mesh.size());
        for (const auto& v : visible_elements(mesh, second_scale_, rx, br)) {
            const auto& last = mesh[v.element];
            for (std::size_t e = 0; e < mesh.size(); ++e) {
                coupling[e] = 0.0;
                if (e == v.element) continue;
                const double f = element_transfer(mesh[e], last, blockers);
                if (f > 0.0) {
                    coupling[e] = mesh[e].reflectance * second_scale_[e] * f;
                    hop[e] = (last.centre - mesh[e].centre).norm();
                }
            }
            for (std::size_t ap = 0; ap < n_ap; ++ap) {
                const auto& incident = second_incident_[ap];
                const auto& dist = second_distance_[ap];
                for (std::size_t e = 0; e < mesh.size(); ++e) {
                    const double p = incident[e] * coupling[e] * v.gain;
                    if (p > 0.0) deposit(traces[ap], (dist[e] + hop[e] + v.distance) / kSpeedOfLight, p, 2);
                }
            }
        }
    }
    return traces;
}

LinkTrace ChannelTracer::trace(std::size_t ap, std::size_t station, std::size_t branch) const {
    auto all = trace_branch(station, branch);
    return std::move(all.at(ap));
}

std::vector<ElementBalance> ChannelTracer::element_balance(std::size_t ap) const {
    std::vector<ElementBalance> out;
    const auto& blockers = scene_.config.blockers;
    auto to_detectors = [&](const Element& e) {
        double sum = 0.0;
        for (const auto& st : scene_.config.stations) {
            for (const auto& br : st.branches) {
                const double g = detector_transfer(e.centre, e.normal, e.lambertian_order, st.position, br);
                if (g > 0.0 && !occluded(e.centre, st.position, blockers)) sum += g;
            }
        }
        return sum;
    };
    if (params_.max_order >= 2) {
        const auto& mesh = scene_.second_order_elements;
        for (std::size_t i = 0; i < mesh.size(); ++i) {
            double share = to_detectors(mesh[i]);
            for (std::size_t j = 0; j < mesh.size(); ++j) {
                if (j != i) share += element_transfer(mesh[i], mesh[j], blockers);
            }
            const double in = second_incident_.at(ap)[i];
            out.push_back({in, mesh[i].reflectance * second_scale_[i] * in * share, mesh[i].reflectance});
        }
    }
    if (params_.max_order >= 1) {
        const auto& mesh = scene_.first_order_elements;
        for (std::size_t i = 0; i < mesh.size(); ++i) {
            const double in = first_incident_.at(ap)[i];
            out.push_back({in, mesh[i].reflectance * first_scale_[i] * in * to_detectors(mesh[i]), mesh[i].reflectance});
        }
    }
    return out;
}

LinkTrace trace_impulse_response(const Scene& scene, std::size_t ap, std::size_t station, std::size_t branch,
                                 std::size_t wavelength, const TraceParams& params) {
    const ChannelTracer tracer(scene, params);
    LinkTrace t = tracer.trace(ap, station, branch);
    const double p = scene.transmitters.at(ap).power.at(wavelength);
    for (auto& b : t.ir.bins) b *= p;
    t.direct_total *= p;
    for (auto& o : t.order_power) o *= p;
    return t;
}

ChannelMatrix compute_channel_matrix(const Scene& scene, const TraceParams& params, unsigned workers,
                                     bool keep_responses) {
    if (workers == 0) workers = worker_count_from_env();
    const ChannelTracer tracer(scene, params, workers);

    ChannelMatrix m;
    m.users = scene.config.stations.size();
    m.aps = scene.transmitters.size();
    m.wavelengths = scene.config.wavelengths.size();
    m.branches = m.users ? scene.config.stations.front().branches.size() : 0;
    m.trace = params;
    m.scenario_hash = channel_content_hash(scene.config, params);
    m.received_power.assign(m.users * m.aps * m.wavelengths * m.branches, 0.0);
    m.bandwidth.assign(m.users * m.aps * m.branches, Bandwidth{});
    m.delay_spread.assign(m.users * m.aps * m.branches, 0.0);
    if (keep_responses) m.unit_responses.resize(m.users * m.aps * m.branches);

    std::vector<std::uint8_t> extended(m.users * m.branches, 0);
    parallel_for(m.users * m.branches, workers, [&](std::size_t item) {
        const std::size_t us = item / m.branches;
        const std::size_t b = item % m.branches;
        auto traces = tracer.trace_branch(us, b);
        for (std::size_t ap = 0; ap < m.aps; ++ap) {
            auto& t = traces[ap];
            const double gain = received_optical_power(t.ir);
            for (std::size_t w = 0; w < m.wavelengths; ++w) {
                m.received_power[m.index(us, ap, w, b)] = scene.transmitters[ap].power[w] * gain;
            }
            const std::size_t li = m.link_index(us, ap, b);
            if (gain > 0.0) {
                m.bandwidth[li] = bandwidth_3db(t.ir);
                m.delay_spread[li] = rms_delay_spread(t.ir);
            }
            if (t.window_extended) extended[item] = 1;
            if (keep_responses) m.unit_responses[li] = std::move(t.ir);
        }
    });
    for (std::size_t item = 0; item < extended.size(); ++item) {
        if (extended[item]) {
            m.warnings.push_back("trace window extended for user " + std::to_string(item / m.branches + 1) +
                                 " branch " + std::to_string(item % m.branches + 1));
        }
    }
    return m;
}

}  // namespace vlcalloc
