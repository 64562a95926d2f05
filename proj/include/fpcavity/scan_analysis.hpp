#pragma once

// Fitting of measured records: cavity length scans, fluorescence decays,
// PLE sweeps, ZPL spectra, and fringe-count thickness mapping.

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fpcavity::scan
{
enum class Channel
{
    kTransmission,
    kReflection,
    kFluorescence,
};

std::string to_string(Channel c);
Channel channel_from_string(const std::string &s);

struct TraceMetadata
{
    std::string units = "au";  // abscissa units: nm, ns, au, ...
    std::optional<double> temperature_k;
    std::optional<double> excitation_nm;
    Channel channel = Channel::kTransmission;
    std::map<std::string, std::string> extra;
};

struct ScanTrace
{
    std::vector<double> abscissa;
    std::vector<double> ordinate;
    TraceMetadata meta;

    // Equal lengths, >= 16 samples, strictly monotone finite abscissa.
    void validate() const;
    // Copy with increasing abscissa.
    ScanTrace ascending() const;
};

struct Window
{
    double lo = 0.0;
    double hi = 0.0;
};

struct ResonanceFit
{
    double center = 0.0;
    double fwhm = 0.0;
    double amplitude = 0.0;  // negative for reflection dips
    double offset = 0.0;
    double center_err = 0.0;
    double fwhm_err = 0.0;
    double amplitude_err = 0.0;
    double offset_err = 0.0;
    double reduced_chi2 = 0.0;
    int iterations = 0;
    std::vector<std::string> warnings;
};

// Least-squares Lorentzian. Reflection traces are inverted before fitting.
// Initialization: centre at the extremum, FWHM from the half-height
// crossings, offset from the median of the outer quartiles.
ResonanceFit fit_lorentzian(const ScanTrace &trace, std::optional<Window> window = std::nullopt);

struct FinesseResult
{
    double finesse = 0.0;
    double finesse_err = 0.0;
    ResonanceFit first;
    ResonanceFit second;
    double nm_per_unit = 0.0;  // abscissa calibration from the lambda/2 spacing
    double fwhm_nm = 0.0;      // mean calibrated linewidth
};

// Finds exactly two dominant resonances, calibrates their spacing to
// lambda/2 and returns F = (lambda/2) / mean(FWHM).
FinesseResult extract_finesse(const ScanTrace &trace, double wavelength_nm);

// L = pi (1/F_siv - 1/F_exp), in ppm.
double emitter_loss_ppm(double finesse_with_emitters, double finesse_reference);

// sigma_ens = L * A
double ensemble_cross_section_cm2(double loss_ppm, double mode_area_um2);

// sigma_single = sigma_ens / N
double single_cross_section_cm2(double ensemble_cross_section_cm2, double emitter_count);

struct LifetimeFit
{
    double tau_ns = 0.0;
    double tau_err = 0.0;
    double amplitude = 0.0;  // at the start of the fit window
    double background = 0.0;
    double background_err = 0.0;
    double fit_start_ns = 0.0;
    double reduced_chi2 = 0.0;
    std::vector<std::string> warnings;
};

// A exp(-(t - t0)/tau) + B fitted from t0 = pulse_end + guard_samples sample
// periods; tau is initialized by log-linear regression on the upper half of
// the decay.
LifetimeFit fit_lifetime(const ScanTrace &trace, double pulse_end_ns, int guard_samples = 2);

// One cavity length scan recorded at a fixed excitation wavelength.
struct PleScan
{
    double excitation_nm = 0.0;
    ScanTrace trace;
};

struct PleLineshape
{
    std::vector<double> excitation_nm;  // ascending
    std::vector<double> detuning_ghz;   // relative to reference_ghz
    std::vector<double> summed_counts;
    std::vector<double> normalized;     // peak 1, or all zero
    std::vector<double> cavity_center;  // resonance used for each window
    std::vector<double> cavity_fwhm;
    double reference_ghz = 0.0;
};

// Sums fluorescence within +-window_fwhm fitted linewidths of the cavity
// resonance in every scan and normalizes to the peak. Scans whose resonance
// cannot be fitted reuse the median resonance of the others.
PleLineshape aggregate_ple(std::span<const PleScan> scans, double window_fwhm = 1.0);

struct InhomogeneousFit
{
    double center_nm = 0.0;
    double center_detuning_ghz = 0.0;
    double sigma_ghz = 0.0;
    double fwhm_ghz = 0.0;
    double fwhm_nm = 0.0;
    double amplitude = 0.0;
    double offset = 0.0;
    double reduced_chi2 = 0.0;
};

// Gaussian fit of the aggregated PLE curve.
InhomogeneousFit fit_inhomogeneous_linewidth(const PleLineshape &shape);

struct FineStructureFit
{
    double line_a_thz = 0.0;
    double line_b_thz = 0.0;
    double line_c_thz = 0.0;
    double line_d_thz = 0.0;
    double ground_splitting_ghz = 0.0;
    double excited_splitting_ghz = 0.0;
    double reduced_chi2 = 0.0;
};

// Four-Lorentzian fit of a single-class ZPL spectrum. Lines are ordered by
// frequency, so the assignment assumes Delta_es > Delta_gs.
FineStructureFit fit_fine_structure(std::span<const double> wavelengths_nm, std::span<const double> intensity);

// Thickness change for a number of interference fringes: N lambda / (2 n).
double thickness_from_fringes(double fringe_count, double wavelength_nm, double refractive_index);
} // namespace fpcavity::scan
