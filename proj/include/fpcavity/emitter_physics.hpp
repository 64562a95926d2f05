#pragma once

// Group-IV colour-centre fine structure under strain, ensemble ZPL spectra,
// strain line scans, phonon-limited coherence, and emitter bookkeeping.
//
// Frequencies: THz for absolute line positions, GHz for splittings and
// shifts, MHz for homogeneous linewidths.

#include <array>
#include <span>
#include <string>
#include <vector>

namespace fpcavity::emitter
{
struct GroupIVLevels
{
    // Centre of the four-line manifold of an unstrained emitter. The default
    // puts the unstrained SiV C-line at 737.0 nm.
    double zpl_center_thz = 406.879527137;
    double spin_orbit_ground_ghz = 48.0;
    double spin_orbit_excited_ghz = 259.0;

    void validate() const;
};

struct StrainState
{
    double axial_shift_ghz = 0.0;         // common-mode shift of all four lines
    double transverse_ground_ghz = 0.0;   // Upsilon_g
    double transverse_excited_ghz = 0.0;  // Upsilon_e
    int orientation_class = 1;            // 1 or 2

    void validate() const;
};

// Lines are named by transition: A and B start in the upper excited branch,
// C and D in the lower one; A and C end in the lower ground branch. Their
// frequencies are ordered A > B > C > D whenever Delta_es > Delta_gs.
struct FineStructure
{
    double line_a_thz = 0.0;
    double line_b_thz = 0.0;
    double line_c_thz = 0.0;
    double line_d_thz = 0.0;
    double ground_splitting_ghz = 0.0;
    double excited_splitting_ghz = 0.0;

    std::array<double, 4> lines_thz() const { return {line_a_thz, line_b_thz, line_c_thz, line_d_thz}; }
};

// Delta = sqrt(lambda_SO^2 + Upsilon^2) for each manifold; lines at
// centre + axial +- Delta_es/2 -+ Delta_gs/2.
FineStructure splittings_from_strain(const GroupIVLevels &levels, const StrainState &strain);

// Upsilon = sqrt(Delta^2 - lambda_SO^2); throws when Delta < lambda_SO.
double strain_from_splitting(double spin_orbit_ghz, double observed_splitting_ghz);

// Delta_lambda = lambda^2 * Delta_nu / c
double splitting_ghz_to_nm(double splitting_ghz, double wavelength_nm);

struct EnsembleSpec
{
    double homogeneous_linewidth_mhz = 92.5;   // FWHM at T = 0
    double inhomogeneous_sigma_ghz = 5.0;      // Gaussian standard deviation
    double temperature_k = 4.0;
    double emitter_density_per_cm2 = 3e10;
    double class_mix = 0.5;                    // share of orientation class 1
    double thermal_broadening_ghz_per_k3 = 0.0;  // a in Gamma(T) = Gamma_0 + a T^3
    std::array<double, 4> line_amplitude{1.0, 1.0, 1.0, 1.0};  // per-line overrides, A..D

    void validate() const;
};

// Gamma(T) in GHz.
double homogeneous_fwhm_ghz(const EnsembleSpec &spec);

// Strain of the two orientation classes at one location.
struct ClassStrain
{
    StrainState first{0.0, 0.0, 0.0, 1};
    StrainState second{0.0, 0.0, 0.0, 2};
};

struct SpectralLine
{
    char label = 'C';
    int orientation_class = 1;
    double center_thz = 0.0;
    double area = 0.0;  // integrated intensity
};

// Lines of both classes. Each line's area is class share x thermal
// population of its excited branch x per-line override, with the upper
// branch populated by exp(-h Delta_es / kT) relative to the lower.
std::vector<SpectralLine> ensemble_lines(const GroupIVLevels &levels, const ClassStrain &strain,
                                         const EnsembleSpec &spec);

// Spectral density (per GHz) of the ensemble at one optical frequency.
double ensemble_intensity(std::span<const SpectralLine> lines, const EnsembleSpec &spec, double frequency_thz);

// Intensity on a wavelength grid. Throws when the grid misses any line.
std::vector<double> synthesize_zpl_spectrum(const GroupIVLevels &levels, const ClassStrain &strain,
                                            const EnsembleSpec &spec, std::span<const double> wavelengths_nm);

struct StrainSample
{
    double position_um = 0.0;
    ClassStrain strain;
};

struct LineScanMap
{
    std::vector<double> position_um;
    std::vector<double> wavelength_nm;
    std::vector<std::vector<double>> intensity;  // [position][wavelength]
};

LineScanMap synthesize_linescan(const GroupIVLevels &levels, std::span<const StrainSample> path,
                                const EnsembleSpec &spec, std::span<const double> wavelengths_nm);

// Saturation value returned by t2_phonon_limit when the thermal phonon
// population underflows (T -> 0 or Delta >> kT/h).
inline constexpr double kT2SaturationCapS = 1.0e9;

// Order-of-magnitude T2 (s) from a direct one-phonon process between the
// ground branches: T2 = K / (Delta^3 * n(Delta, T)), n the Bose occupation.
// `calibration_s_ghz3` is K in s*GHz^3.
double t2_phonon_limit(double ground_splitting_ghz, double temperature_k, double calibration_s_ghz3);

// h * Delta / k_B in kelvin.
double phonon_temperature_k(double splitting_ghz);

double emitter_count(double density_per_cm2, double area_um2);
double density_from_fluence(double fluence_per_cm2, double creation_yield);
} // namespace fpcavity::emitter
