#pragma once

// Forward models for synthetic measurement records, used for fixtures,
// round-trip tests and the acceptance checks.

#include "fpcavity/scan_analysis.hpp"

#include <functional>
#include <random>
#include <vector>

namespace fpcavity::synthetic
{
struct Resonance
{
    double center = 0.0;
    double fwhm = 1.0;
    double amplitude = 1.0;  // peak height (dip depth in reflection)
};

// Uniform grid of `samples` points over [lo, hi].
std::vector<double> linspace(double lo, double hi, std::size_t samples);

// offset + sum of Lorentzian peaks; reflection traces subtract them.
scan::ScanTrace lorentzian_trace(const std::vector<double> &abscissa, const std::vector<Resonance> &peaks,
                                 double offset, scan::Channel channel);

// Two resonances `spacing` abscissa units apart with FWHM spacing / finesse,
// centred in a window of 2 * spacing.
scan::ScanTrace cavity_length_scan(double finesse, double spacing, std::size_t samples, scan::Channel channel,
                                   double offset = 0.05, double amplitude = 1.0);

// Flat up to pulse_end, then background + amplitude * exp(-(t - pulse_end)/tau).
scan::ScanTrace decay_trace(double tau_ns, double amplitude, double background, double pulse_end_ns, double dt_ns,
                            std::size_t samples);

void add_gaussian_noise(scan::ScanTrace &trace, double sigma, std::mt19937_64 &rng);
// Replaces each ordinate by a Poisson draw with that mean.
void add_poisson_noise(scan::ScanTrace &trace, std::mt19937_64 &rng);

// One fluorescence length scan per excitation wavelength: a cavity resonance
// whose height is `response(excitation_nm)` on top of `background` counts.
std::vector<scan::PleScan> ple_scans(const std::vector<double> &excitation_nm,
                                     const std::function<double(double)> &response, const Resonance &cavity,
                                     double background, std::size_t samples);
} // namespace fpcavity::synthetic
