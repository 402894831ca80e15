#pragma once

#include <map>
#include <string>

namespace vlcalloc {

inline constexpr double kElectronCharge = 1.602176634e-19;  // C, exact SI value

/// Photodetector responsivity per wavelength name, in A/W.
using ResponsivityTable = std::map<std::string, double>;

/// Red/yellow/green/blue responsivities of the ADR photodetectors.
ResponsivityTable builtin_responsivities();
void validate_responsivities(const ResponsivityTable& table);

/// Receiver noise model parameters.
///
/// `optical_filter_factor` is the dimensionless pass-through applied to the
/// background shot-noise term. With the default of 1 the term reduces to the
/// textbook 2 e I B.
struct NoiseParams {
    double receiver_noise_density = 0.0;  // A^2/Hz
    double electrical_bandwidth = 0.0;    // Hz
    double optical_filter_factor = 1.0;

    void validate() const;
    /// Copy with a different electrical bandwidth.
    [[nodiscard]] NoiseParams with_bandwidth(double bandwidth_hz) const;
};

/// Lambertian order n with cos^n(semi_angle) = 1/2. Angle in degrees, (0, 90).
double lambertian_order(double semi_angle_half_power_deg);

/// Electrical signal power (R * PO)^2 in A^2.
double electrical_power(double responsivity, double optical_power);

/// Shot noise 2 e (R * PO) B_o B_e from unmodulated optical power, in A^2.
double shot_noise(double responsivity, double unmodulated_power, const NoiseParams& params);

/// Receiver (preamplifier) noise N_R * B_E, in A^2.
double receiver_noise(const NoiseParams& params);

double db_to_linear(double db);
double linear_to_db(double linear);

}  // namespace vlcalloc
