#include "vlcalloc/radiometry.hpp"

#include <cmath>

#include "vlcalloc/error.hpp"
#include "vlcalloc/vec3.hpp"

namespace vlcalloc {

ResponsivityTable builtin_responsivities() {
    return {{"red", 0.4}, {"yellow", 0.35}, {"green", 0.3}, {"blue", 0.2}};
}

void validate_responsivities(const ResponsivityTable& table) {
    for (const auto& [name, r] : table) {
        if (!(r > 0.0 && r <= 1.0)) {
            throw Error("responsivity for '" + name + "' must lie in (0, 1] A/W");
        }
    }
}

void NoiseParams::validate() const {
    if (!(receiver_noise_density > 0.0)) throw Error("receiver noise density must be positive");
    if (!(electrical_bandwidth > 0.0)) throw Error("electrical bandwidth must be positive");
    if (!(optical_filter_factor > 0.0)) throw Error("optical filter factor must be positive");
}

NoiseParams NoiseParams::with_bandwidth(double bandwidth_hz) const {
    NoiseParams copy = *this;
    copy.electrical_bandwidth = bandwidth_hz;
    return copy;
}

double lambertian_order(double semi_angle_half_power_deg) {
    if (!(semi_angle_half_power_deg > 0.0 && semi_angle_half_power_deg < 90.0)) {
        throw Error("semi-angle at half power must lie in (0, 90) degrees");
    }
    const double n = -std::log(2.0) / std::log(std::cos(deg2rad(semi_angle_half_power_deg)));
    // cos(60 deg) is 0.5000000000000001 in binary; snap orders that are an
    // integer up to rounding so the diffuse case yields exactly 1.
    const double nearest = std::round(n);
    if (std::abs(n - nearest) <= 1e-12 * nearest) return nearest;
    return n;
}

double electrical_power(double responsivity, double optical_power) {
    const double current = responsivity * optical_power;
    return current * current;
}

double shot_noise(double responsivity, double unmodulated_power, const NoiseParams& params) {
    return 2.0 * kElectronCharge * (responsivity * unmodulated_power) * params.optical_filter_factor *
           params.electrical_bandwidth;
}

double receiver_noise(const NoiseParams& params) {
    return params.receiver_noise_density * params.electrical_bandwidth;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

}  // namespace vlcalloc
