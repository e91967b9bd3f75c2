#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "usv/random.hpp"
#include "usv/time_series.hpp"

namespace usv::wave {

// Long-crested sea described by the two ITTC spectrum inputs.
struct SeaStateConfig {
    double significant_wave_height = 5.0;  // m
    double wind_speed = 10.0;              // m/s
    double gravity = 9.8;                  // m/s^2, fixed

    void validate() const {
        if (!(significant_wave_height > 0.0))
            throw std::invalid_argument("significant wave height must be positive");
        if (gravity != 9.8)
            throw std::invalid_argument("gravity is fixed at 9.8 m/s^2 in this model");
    }
};

// Vessel parameters for the linear sway/roll response and the encounter
// transform.
struct VesselConfig {
    double natural_frequency = 1.57;  // rad/s
    double damping_ratio = 0.06;
    double correction = 0.4;          // response magnitude correction factor
    double speed = 15.0;              // m/s
    double heading_angle = 0.0;       // wave heading relative to course, degrees

    void validate() const {
        if (!(natural_frequency > 0.0))
            throw std::invalid_argument("natural frequency must be positive");
        if (!(damping_ratio > 0.0))
            throw std::invalid_argument("damping ratio must be positive");
        if (!(correction > 0.0))
            throw std::invalid_argument("correction factor must be positive");
        if (!(speed >= 0.0))
            throw std::invalid_argument("vessel speed must be non-negative");
    }
};

enum class SpectrumKind { wave, encounter, response };

struct SpectralLine {
    double frequency = 0.0;  // rad/s
    double density = 0.0;    // m^2·s
    double phase = 0.0;      // rad, in [0, 2*pi)
};

struct SpectralLineSet {
    std::vector<SpectralLine> lines;
    double delta_omega = 0.0;
    SpectrumKind kind = SpectrumKind::wave;

    void validate() const {
        if (lines.empty())
            throw std::invalid_argument("spectral line set must contain at least one line");
        if (!(delta_omega > 0.0))
            throw std::invalid_argument("frequency spacing must be positive");
        constexpr double two_pi = 2.0 * std::numbers::pi;
        for (std::size_t k = 0; k < lines.size(); ++k) {
            const SpectralLine& ln = lines[k];
            if (!(ln.frequency > 0.0))
                throw std::invalid_argument("spectral line frequencies must be positive");
            if (!(ln.density >= 0.0) || !std::isfinite(ln.density))
                throw std::invalid_argument("spectral densities must be finite and non-negative");
            if (!(ln.phase >= 0.0) || !(ln.phase < two_pi))
                throw std::invalid_argument("spectral phases must lie in [0, 2*pi)");
            if (k > 0) {
                double gap = ln.frequency - lines[k - 1].frequency;
                if (!(gap > 0.0))
                    throw std::invalid_argument("spectral line frequencies must be increasing");
                if (std::abs(gap - delta_omega) > 1e-9 * std::max(1.0, delta_omega))
                    throw std::invalid_argument("spectral line spacing must be uniform");
            }
        }
    }
};

// ITTC wave energy density at circular frequency omega.
inline double ittc_spectrum(double omega, const SeaStateConfig& sea) {
    sea.validate();
    if (!(omega > 0.0))
        throw std::domain_error("spectrum frequency must be positive, got " +
                                std::to_string(omega));
    const double g = sea.gravity;
    const double h = sea.significant_wave_height;
    const double w2 = omega * omega;
    return 0.74 / (w2 * w2 * omega) * std::exp(-(g * g) / (6.28 * 6.28 * h * w2));
}

struct SamplingBand {
    double omega_min = 0.0;  // open lower bound
    double omega_max = 0.0;  // inclusive upper bound
    double delta_omega = 0.0;
};

// Frequency band that carries essentially all spectral energy for the given
// significant wave height.
inline SamplingBand sampling_band(const SeaStateConfig& sea) {
    sea.validate();
    const double h = sea.significant_wave_height;
    if (h <= 2.5) return {0.3, 3.0, 0.1};
    if (h <= 5.0) return {0.25, 2.5, 0.08};
    return {0.1, 1.7, 0.06};
}

// Discretizes the ITTC spectrum over its sampling band and draws one random
// phase per line from a dedicated sub-stream of the given seed.
inline SpectralLineSet make_wave_lines(const SeaStateConfig& sea, std::uint64_t seed) {
    const SamplingBand band = sampling_band(sea);
    Rng rng = Rng::substream(seed, {fnv1a64("wave-phases")});
    constexpr double two_pi = 2.0 * std::numbers::pi;

    SpectralLineSet out;
    out.delta_omega = band.delta_omega;
    out.kind = SpectrumKind::wave;
    for (int k = 1;; ++k) {
        const double omega = band.omega_min + static_cast<double>(k) * band.delta_omega;
        if (omega > band.omega_max + 1e-9) break;
        SpectralLine ln;
        ln.frequency = omega;
        ln.density = ittc_spectrum(omega, sea);
        ln.phase = rng.uniform01() * two_pi;
        out.lines.push_back(ln);
    }
    out.validate();
    return out;
}

// Cosine of an angle given in degrees, exact at the quadrant angles so that
// beam seas (90 degrees) leave the encounter transform an identity.
inline double cos_degrees(double deg) {
    double r = std::fmod(deg, 360.0);
    if (r < 0.0) r += 360.0;
    if (r == 0.0) return 1.0;
    if (r == 90.0 || r == 270.0) return 0.0;
    if (r == 180.0) return -1.0;
    return std::cos(deg * std::numbers::pi / 180.0);
}

// Maps a wave spectrum onto the encounter frequency axis of a moving vessel.
// Densities are rescaled; the frequency grid and phases are reused unchanged.
inline SpectralLineSet encounter_spectrum(const SpectralLineSet& waves, const VesselConfig& vessel,
                                          const SeaStateConfig& sea) {
    waves.validate();
    vessel.validate();
    sea.validate();
    if (waves.kind != SpectrumKind::wave)
        throw std::invalid_argument("encounter transform expects a wave spectrum");

    const double cos_beta = cos_degrees(vessel.heading_angle);
    SpectralLineSet out = waves;
    out.kind = SpectrumKind::encounter;
    for (SpectralLine& ln : out.lines) {
        const double denom = 1.0 + 2.0 * ln.frequency * vessel.speed * cos_beta / sea.gravity;
        if (!(denom > 0.0))
            throw std::domain_error("encounter transform degenerate at frequency " +
                                    std::to_string(ln.frequency) + " rad/s (denominator " +
                                    std::to_string(denom) + ")");
        ln.density /= denom;
    }
    return out;
}

// Squared magnitude of the linear sway response at circular frequency omega.
inline double response_gain(double omega, const VesselConfig& vessel) {
    vessel.validate();
    if (!(omega >= 0.0))
        throw std::domain_error("response frequency must be non-negative");
    const double lambda = omega / vessel.natural_frequency;
    const double one_minus = 1.0 - lambda * lambda;
    const double damp = 2.0 * vessel.damping_ratio * lambda;
    const double chi = vessel.correction;
    return chi * chi / (one_minus * one_minus + damp * damp);
}

// Applies the sway response gain to an encounter spectrum.
inline SpectralLineSet sway_response_spectrum(const SpectralLineSet& encounter,
                                              const VesselConfig& vessel) {
    encounter.validate();
    if (encounter.kind != SpectrumKind::encounter)
        throw std::invalid_argument("response transform expects an encounter spectrum");
    SpectralLineSet out = encounter;
    out.kind = SpectrumKind::response;
    for (SpectralLine& ln : out.lines) ln.density *= response_gain(ln.frequency, vessel);
    return out;
}

// Area under the discretized spectrum; equals the variance of the synthesized
// signal in expectation.
inline double spectral_moment0(const SpectralLineSet& lines) {
    lines.validate();
    double m0 = 0.0;
    for (const SpectralLine& ln : lines.lines) m0 += ln.density * lines.delta_omega;
    return m0;
}

// Harmonic superposition: one cosine per spectral line with amplitude
// sqrt(2*S*delta_omega) and the line's stored phase, sampled at t = j*dt.
inline TimeSeries synthesize_series(const SpectralLineSet& lines, std::size_t samples, double dt,
                                    std::uint64_t seed) {
    lines.validate();
    if (samples == 0)
        throw std::invalid_argument("sample count must be positive");
    if (!(dt > 0.0))
        throw std::invalid_argument("sample interval must be positive");

    std::vector<double> amplitude(lines.lines.size());
    for (std::size_t k = 0; k < lines.lines.size(); ++k)
        amplitude[k] = std::sqrt(2.0 * lines.lines[k].density * lines.delta_omega);

    TimeSeries out;
    out.dt = dt;
    out.seed = seed;
    out.values.resize(samples);
    for (std::size_t j = 0; j < samples; ++j) {
        const double t = static_cast<double>(j) * dt;
        double y = 0.0;
        for (std::size_t k = 0; k < lines.lines.size(); ++k)
            y += amplitude[k] * std::cos(lines.lines[k].frequency * t + lines.lines[k].phase);
        out.values[j] = y;
    }
    return out;
}

// Full chain from sea state to a sampled roll-motion record: wave spectrum,
// encounter transform, sway response, harmonic synthesis. Phases come from a
// sub-stream of `seed`, so equal seeds give bit-identical output.
inline TimeSeries simulate_roll(const SeaStateConfig& sea, const VesselConfig& vessel,
                                std::size_t samples, double dt, std::uint64_t seed) {
    const SpectralLineSet waves = make_wave_lines(sea, seed);
    const SpectralLineSet enc = encounter_spectrum(waves, vessel, sea);
    const SpectralLineSet resp = sway_response_spectrum(enc, vessel);
    return synthesize_series(resp, samples, dt, seed);
}

}  // namespace usv::wave
