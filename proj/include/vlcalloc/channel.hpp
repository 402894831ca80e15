#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "vlcalloc/scene.hpp"

namespace vlcalloc {

struct TraceParams {
    double bin_width = 10e-12;  // s
    double window = 100e-9;     // s; grown on demand when a path arrives later
    int max_order = 2;          // 0 = LOS only

    void validate() const;
};

/// Received optical power binned by arrival time.
struct ImpulseResponse {
    double bin_width = 10e-12;
    double origin_delay = 0.0;
    std::vector<double> bins;  // W per bin

    [[nodiscard]] double delay_of(std::size_t bin) const { return origin_delay + static_cast<double>(bin) * bin_width; }
};

/// Sum of all bins.
double received_optical_power(const ImpulseResponse& ir);

/// 3-dB bandwidth of |H(f)|^2 normalised to DC. When the response never falls
/// to half power below the Nyquist frequency of the binning, `hz` holds that
/// Nyquist frequency and `at_least` is set.
struct Bandwidth {
    double hz = 0.0;
    bool at_least = false;
    bool operator==(const Bandwidth&) const = default;
};

inline constexpr std::size_t kBandwidthGridPoints = std::size_t{1} << 20;

Bandwidth bandwidth_3db(const ImpulseResponse& ir);
double rms_delay_spread(const ImpulseResponse& ir);

/// Lambertian point-to-area transfer from `src` (pattern order `order`,
/// facing `src_normal`) onto a receiving patch of `area` at `dst` facing
/// `dst_normal`. Zero when either side faces away. No occlusion test.
double lambertian_transfer(const Vec3& src, const Vec3& src_normal, double order, const Vec3& dst,
                           const Vec3& dst_normal, double area);

/// Line-of-sight optical power at one receiver branch: zero outside the field
/// of view or when the path is blocked. Throws on coincident positions.
double los_power(const TransmitterUnit& tx, std::size_t wavelength, const Vec3& rx_position,
                 const ReceiverBranch& branch, const std::vector<Blocker>& blockers = {});

/// Output of tracing one (access point, station, branch) link for 1 W emitted.
struct LinkTrace {
    ImpulseResponse ir;
    double direct_total = 0.0;           // running sum of every path power
    std::array<double, 3> order_power{};  // LOS, first, second order
    bool window_extended = false;
};

struct ElementBalance {
    double incident = 0.0;    // W reaching the element
    double re_emitted = 0.0;  // W delivered onward to other elements and detectors
    double reflectance = 0.0;
};

/// Precomputes per-scene quantities (access-point illumination of every
/// element, energy normalisation of the second-order mesh) and traces links
/// against the immutable scene. Const member functions are safe to call
/// concurrently.
class ChannelTracer {
public:
    /// `workers` threads build the energy normalisation (0 = from the environment).
    ChannelTracer(const Scene& scene, TraceParams params, unsigned workers = 0);

    /// Impulse responses of every access point at one branch, per watt emitted.
    [[nodiscard]] std::vector<LinkTrace> trace_branch(std::size_t station, std::size_t branch) const;
    [[nodiscard]] LinkTrace trace(std::size_t ap, std::size_t station, std::size_t branch) const;

    /// Energy bookkeeping for each element of the second-order mesh, then each
    /// element of the first-order mesh, for access point `ap` emitting 1 W.
    [[nodiscard]] std::vector<ElementBalance> element_balance(std::size_t ap) const;

    [[nodiscard]] const Scene& scene() const { return scene_; }
    [[nodiscard]] const TraceParams& params() const { return params_; }

private:
    struct Visible {
        std::size_t element;
        double gain;      // fraction of element exitance reaching the detector
        double distance;  // element to detector
    };

    [[nodiscard]] std::vector<Visible> visible_elements(const std::vector<Element>& mesh,
                                                        const std::vector<double>& scale, const Vec3& rx,
                                                        const ReceiverBranch& branch) const;

    const Scene& scene_;
    TraceParams params_;
    // [ap][element] incident fraction and path length from the access point.
    std::vector<std::vector<double>> first_incident_;
    std::vector<std::vector<double>> first_distance_;
    std::vector<std::vector<double>> second_incident_;
    std::vector<std::vector<double>> second_distance_;
    std::vector<double> first_scale_;
    std::vector<double> second_scale_;
};

/// Convenience wrapper tracing a single link; builds a tracer each call.
LinkTrace trace_impulse_response(const Scene& scene, std::size_t ap, std::size_t station, std::size_t branch,
                                 std::size_t wavelength, const TraceParams& params);

/// Received optical power and link metrics for every (user, AP, wavelength,
/// branch). Bandwidth and delay spread do not depend on wavelength because
/// surface reflectances are wavelength-independent.
struct ChannelMatrix {
    std::size_t users = 0;
    std::size_t aps = 0;
    std::size_t wavelengths = 0;
    std::size_t branches = 0;
    std::vector<double> received_power;  // [us][ap][w][b], W
    std::vector<Bandwidth> bandwidth;    // [us][ap][b]
    std::vector<double> delay_spread;    // [us][ap][b], s
    std::vector<ImpulseResponse> unit_responses;  // [us][ap][b] per watt; empty unless requested
    std::string scenario_hash;
    TraceParams trace;
    std::vector<std::string> warnings;

    [[nodiscard]] std::size_t index(std::size_t us, std::size_t ap, std::size_t w, std::size_t b) const {
        return ((us * aps + ap) * wavelengths + w) * branches + b;
    }
    [[nodiscard]] std::size_t link_index(std::size_t us, std::size_t ap, std::size_t b) const {
        return (us * aps + ap) * branches + b;
    }
    [[nodiscard]] double po(std::size_t us, std::size_t ap, std::size_t w, std::size_t b) const {
        return received_power[index(us, ap, w, b)];
    }
};

/// Traces every link with `workers` threads (0 = from the environment). The
/// result does not depend on the worker count.
ChannelMatrix compute_channel_matrix(const Scene& scene, const TraceParams& params, unsigned workers = 0,
                                     bool keep_responses = false);

}  // namespace vlcalloc
