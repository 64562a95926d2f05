#pragma once

// Project configuration. Every numeric key carries its unit as a suffix
// (_nm, _um, _ghz, _mhz, _k, _ppm, _ns, _per_cm2, ...) and unknown keys are
// rejected so a misspelt or unitless key cannot be silently ignored.

#include "fpcavity/cavity_geometry.hpp"
#include "fpcavity/cqed_metrics.hpp"
#include "fpcavity/emitter_physics.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace fpcavity::config
{
struct OpticsConfig
{
    std::filesystem::path stack_file;  // mirror: incidence | coating | substrate
    double spectrum_min_nm = 550.0;
    double spectrum_max_nm = 850.0;
    double spectrum_step_nm = 0.5;
    double design_wavelength_nm = 737.0;
    double field_step_nm = 1.0;
    double field_depth_nm = 500.0;       // how far into the membrane the profile extends
    double ion_depth_min_nm = 25.0;
    double ion_depth_max_nm = 75.0;
};

struct DispersionConfig
{
    double diamond_index = 2.417;
    double diamond_thickness_nm = 3000.0;  // 0 for a bare cavity
    double bonding_gap_nm = 0.0;
    cavity::SweepRange wavelength_nm{700.0, 780.0, 0.5};
    cavity::SweepRange air_gap_nm{2000.0, 5000.0, 0.0};
};

struct EmitterConfig
{
    emitter::GroupIVLevels levels;
    emitter::EnsembleSpec ensemble;
    double implantation_fluence_per_cm2 = 3e11;
    double creation_yield = 0.1;
    double t2_calibration_s_ghz3 = 5.7e-3;       // placeholder, see README
    double excited_to_ground_strain_ratio = 1.38;
};

struct CavityConfig
{
    std::vector<double> mirror_transmission_ppm{1000.0, 1000.0};
    std::vector<double> extra_loss_ppm;
    cqed::PurcellIndex purcell_index = cqed::PurcellIndex::kDiamond;
    cqed::GammaConvention gamma_convention = cqed::GammaConvention::kDecayRate;
};

struct AnalysisConfig
{
    int lifetime_guard_samples = 2;
    double lifetime_pulse_end_ns = 0.0;
    double ple_window_fwhm = 1.0;
};

struct ProjectConfig
{
    OpticsConfig optics;
    cavity::CavityGeometry geometry;
    DispersionConfig dispersion;
    EmitterConfig emitter;
    CavityConfig cavity;
    AnalysisConfig analysis;
    std::filesystem::path output_dir = "out";

    void validate() const;
};

// Relative stack_file and output_dir entries resolve against `base_dir`.
ProjectConfig config_from_json(const nlohmann::json &doc, const std::filesystem::path &base_dir);
ProjectConfig load_config(const std::filesystem::path &path);
nlohmann::json config_to_json(const ProjectConfig &config);
} // namespace fpcavity::config
