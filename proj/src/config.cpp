#include "fpcavity/config.hpp"

#include "fpcavity/errors.hpp"

#include <fstream>
#include <set>

namespace fpcavity::config
{
namespace
{
using nlohmann::json;

// Reads keys from one JSON object and rejects anything left unread.
class Section
{
public:
    Section(const json &doc, std::string name) : name_(std::move(name))
    {
        if (!doc.is_object())
        {
            throw ValidationError("config section '" + name_ + "' must be an object");
        }
        doc_ = &doc;
    }

    void number(const char *key, double &out)
    {
        if (const json *v = find(key))
        {
            if (!v->is_number())
            {
                throw ValidationError(path(key) + " must be a number");
            }
            out = v->get<double>();
        }
    }

    void integer(const char *key, int &out)
    {
        if (const json *v = find(key))
        {
            if (!v->is_number_integer())
            {
                throw ValidationError(path(key) + " must be an integer");
            }
            out = v->get<int>();
        }
    }

    void numbers(const char *key, std::vector<double> &out)
    {
        if (const json *v = find(key))
        {
            if (!v->is_array())
            {
                throw ValidationError(path(key) + " must be an array of numbers");
            }
            out.clear();
            for (const auto &e : *v)
            {
                if (!e.is_number())
                {
                    throw ValidationError(path(key) + " must be an array of numbers");
                }
                out.push_back(e.get<double>());
            }
        }
    }

    bool string(const char *key, std::string &out)
    {
        if (const json *v = find(key))
        {
            if (!v->is_string())
            {
                throw ValidationError(path(key) + " must be a string");
            }
            out = v->get<std::string>();
            return true;
        }
        return false;
    }

    const json *object(const char *key) { return find(key); }

    void finish() const
    {
        for (const auto &[key, value] : doc_->items())
        {
            (void)value;
            if (!seen_.count(key))
            {
                throw ValidationError("unknown config key " + path(key.c_str()) +
                                      " (numeric keys carry a unit suffix such as _nm or _ghz)");
            }
        }
    }

private:
    const json *find(const char *key)
    {
        seen_.insert(key);
        return doc_->contains(key) ? &doc_->at(key) : nullptr;
    }

    std::string path(const char *key) const { return name_.empty() ? key : name_ + "." + key; }

    const json *doc_ = nullptr;
    std::string name_;
    std::set<std::string> seen_;
};

std::filesystem::path resolve(const std::filesystem::path &p, const std::filesystem::path &base)
{
    return p.is_absolute() || base.empty() ? p : base / p;
}
} // namespace

void ProjectConfig::validate() const
{
    geometry.validate();
    emitter.levels.validate();
    emitter.ensemble.validate();
    if (!(optics.spectrum_min_nm > 0.0) || !(optics.spectrum_max_nm >= optics.spectrum_min_nm) ||
        !(optics.spectrum_step_nm > 0.0))
    {
        throw ValidationError("optics spectrum range needs 0 < min <= max and step > 0");
    }
    if (!(optics.ion_depth_max_nm > optics.ion_depth_min_nm) || optics.ion_depth_min_nm < 0.0)
    {
        throw ValidationError("ion depth range needs 0 <= min < max");
    }
    if (!(optics.field_depth_nm >= optics.ion_depth_max_nm))
    {
        throw ValidationError("field depth must cover the ion depth range");
    }
    if (!(dispersion.diamond_index >= 1.0) || dispersion.diamond_thickness_nm < 0.0 || dispersion.bonding_gap_nm < 0.0)
    {
        throw ValidationError("dispersion needs diamond index >= 1 and non-negative thicknesses");
    }
    if (!(emitter.creation_yield > 0.0 && emitter.creation_yield <= 1.0))
    {
        throw ValidationError("creation yield must lie in (0, 1]");
    }
    if (!(emitter.t2_calibration_s_ghz3 > 0.0))
    {
        throw ValidationError("T2 calibration constant must be positive");
    }
    if (analysis.lifetime_guard_samples < 0)
    {
        throw ValidationError("lifetime guard must be non-negative");
    }
    if (!(analysis.ple_window_fwhm > 0.0))
    {
        throw ValidationError("PLE window must be positive");
    }
}

ProjectConfig config_from_json(const json &doc, const std::filesystem::path &base_dir)
{
    ProjectConfig cfg;
    Section root(doc, "");

    if (const json *o = root.object("optics"))
    {
        Section s(*o, "optics");
        std::string stack;
        if (s.string("stack_file", stack))
        {
            cfg.optics.stack_file = resolve(stack, base_dir);
        }
        s.number("spectrum_min_nm", cfg.optics.spectrum_min_nm);
        s.number("spectrum_max_nm", cfg.optics.spectrum_max_nm);
        s.number("spectrum_step_nm", cfg.optics.spectrum_step_nm);
        s.number("design_wavelength_nm", cfg.optics.design_wavelength_nm);
        s.number("field_step_nm", cfg.optics.field_step_nm);
        s.number("field_depth_nm", cfg.optics.field_depth_nm);
        s.number("ion_depth_min_nm", cfg.optics.ion_depth_min_nm);
        s.number("ion_depth_max_nm", cfg.optics.ion_depth_max_nm);
        s.finish();
    }
    if (const json *o = root.object("geometry"))
    {
        Section s(*o, "geometry");
        s.number("effective_length_um", cfg.geometry.effective_length_um);
        s.number("roc_x_um", cfg.geometry.roc_x_um);
        s.number("roc_y_um", cfg.geometry.roc_y_um);
        s.number("wavelength_nm", cfg.geometry.wavelength_nm);
        s.number("numerical_aperture", cfg.geometry.numerical_aperture);
        s.finish();
    }
    if (const json *o = root.object("dispersion"))
    {
        Section s(*o, "dispersion");
        s.number("diamond_index", cfg.dispersion.diamond_index);
        s.number("diamond_thickness_nm", cfg.dispersion.diamond_thickness_nm);
        s.number("bonding_gap_nm", cfg.dispersion.bonding_gap_nm);
        s.number("wavelength_min_nm", cfg.dispersion.wavelength_nm.min);
        s.number("wavelength_max_nm", cfg.dispersion.wavelength_nm.max);
        s.number("wavelength_step_nm", cfg.dispersion.wavelength_nm.step);
        s.number("air_gap_min_nm", cfg.dispersion.air_gap_nm.min);
        s.number("air_gap_max_nm", cfg.dispersion.air_gap_nm.max);
        s.finish();
    }
    if (const json *o = root.object("emitter"))
    {
        Section s(*o, "emitter");
        s.number("zpl_center_thz", cfg.emitter.levels.zpl_center_thz);
        s.number("spin_orbit_ground_ghz", cfg.emitter.levels.spin_orbit_ground_ghz);
        s.number("spin_orbit_excited_ghz", cfg.emitter.levels.spin_orbit_excited_ghz);
        s.number("homogeneous_linewidth_mhz", cfg.emitter.ensemble.homogeneous_linewidth_mhz);
        s.number("inhomogeneous_sigma_ghz", cfg.emitter.ensemble.inhomogeneous_sigma_ghz);
        s.number("temperature_k", cfg.emitter.ensemble.temperature_k);
        s.number("class_mix", cfg.emitter.ensemble.class_mix);
        s.number("thermal_broadening_ghz_per_k3", cfg.emitter.ensemble.thermal_broadening_ghz_per_k3);
        std::vector<double> amps(cfg.emitter.ensemble.line_amplitude.begin(), cfg.emitter.ensemble.line_amplitude.end());
        s.numbers("line_amplitude", amps);
        if (amps.size() != 4)
        {
            throw ValidationError("emitter.line_amplitude needs four entries (A, B, C, D)");
        }
        std::copy(amps.begin(), amps.end(), cfg.emitter.ensemble.line_amplitude.begin());
        s.number("implantation_fluence_per_cm2", cfg.emitter.implantation_fluence_per_cm2);
        s.number("creation_yield", cfg.emitter.creation_yield);
        s.number("t2_calibration_s_ghz3", cfg.emitter.t2_calibration_s_ghz3);
        s.number("excited_to_ground_strain_ratio", cfg.emitter.excited_to_ground_strain_ratio);
        const bool explicit_density = o->contains("emitter_density_per_cm2");
        s.number("emitter_density_per_cm2", cfg.emitter.ensemble.emitter_density_per_cm2);
        s.finish();
        if (!explicit_density)
        {
            cfg.emitter.ensemble.emitter_density_per_cm2 =
                emitter::density_from_fluence(cfg.emitter.implantation_fluence_per_cm2, cfg.emitter.creation_yield);
        }
    }
    if (const json *o = root.object("cavity"))
    {
        Section s(*o, "cavity");
        s.numbers("mirror_transmission_ppm", cfg.cavity.mirror_transmission_ppm);
        s.numbers("extra_loss_ppm", cfg.cavity.extra_loss_ppm);
        std::string index;
        if (s.string("purcell_index", index))
        {
            if (index == "diamond")
            {
                cfg.cavity.purcell_index = cqed::PurcellIndex::kDiamond;
            }
            else if (index == "vacuum")
            {
                cfg.cavity.purcell_index = cqed::PurcellIndex::kVacuum;
            }
            else
            {
                throw ValidationError("cavity.purcell_index must be 'diamond' or 'vacuum'");
            }
        }
        std::string gamma;
        if (s.string("gamma_convention", gamma))
        {
            if (gamma == "decay_rate")
            {
                cfg.cavity.gamma_convention = cqed::GammaConvention::kDecayRate;
            }
            else if (gamma == "linewidth")
            {
                cfg.cavity.gamma_convention = cqed::GammaConvention::kLinewidth;
            }
            else
            {
                throw ValidationError("cavity.gamma_convention must be 'decay_rate' or 'linewidth'");
            }
        }
        s.finish();
    }
    if (const json *o = root.object("analysis"))
    {
        Section s(*o, "analysis");
        s.integer("lifetime_guard_samples", cfg.analysis.lifetime_guard_samples);
        s.number("lifetime_pulse_end_ns", cfg.analysis.lifetime_pulse_end_ns);
        s.number("ple_window_fwhm", cfg.analysis.ple_window_fwhm);
        s.finish();
    }
    std::string out_dir;
    if (root.string("output_dir", out_dir))
    {
        cfg.output_dir = resolve(out_dir, base_dir);
    }
    root.finish();
    cfg.validate();
    return cfg;
}

ProjectConfig load_config(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw IoError("cannot open config " + path.string());
    }
    json doc;
    try
    {
        doc = json::parse(in);
    }
    catch (const json::exception &e)
    {
        throw IoError(path.string() + ": " + e.what());
    }
    return config_from_json(doc, path.parent_path());
}

json config_to_json(const ProjectConfig &c)
{
    const auto &amp = c.emitter.ensemble.line_amplitude;
    return {
        {"optics",
         {{"stack_file", c.optics.stack_file.string()},
          {"spectrum_min_nm", c.optics.spectrum_min_nm},
          {"spectrum_max_nm", c.optics.spectrum_max_nm},
          {"spectrum_step_nm", c.optics.spectrum_step_nm},
          {"design_wavelength_nm", c.optics.design_wavelength_nm},
          {"field_step_nm", c.optics.field_step_nm},
          {"field_depth_nm", c.optics.field_depth_nm},
          {"ion_depth_min_nm", c.optics.ion_depth_min_nm},
          {"ion_depth_max_nm", c.optics.ion_depth_max_nm}}},
        {"geometry",
         {{"effective_length_um", c.geometry.effective_length_um},
          {"roc_x_um", c.geometry.roc_x_um},
          {"roc_y_um", c.geometry.roc_y_um},
          {"wavelength_nm", c.geometry.wavelength_nm},
          {"numerical_aperture", c.geometry.numerical_aperture}}},
        {"dispersion",
         {{"diamond_index", c.dispersion.diamond_index},
          {"diamond_thickness_nm", c.dispersion.diamond_thickness_nm},
          {"bonding_gap_nm", c.dispersion.bonding_gap_nm},
          {"wavelength_min_nm", c.dispersion.wavelength_nm.min},
          {"wavelength_max_nm", c.dispersion.wavelength_nm.max},
          {"wavelength_step_nm", c.dispersion.wavelength_nm.step},
          {"air_gap_min_nm", c.dispersion.air_gap_nm.min},
          {"air_gap_max_nm", c.dispersion.air_gap_nm.max}}},
        {"emitter",
         {{"zpl_center_thz", c.emitter.levels.zpl_center_thz},
          {"spin_orbit_ground_ghz", c.emitter.levels.spin_orbit_ground_ghz},
          {"spin_orbit_excited_ghz", c.emitter.levels.spin_orbit_excited_ghz},
          {"homogeneous_linewidth_mhz", c.emitter.ensemble.homogeneous_linewidth_mhz},
          {"inhomogeneous_sigma_ghz", c.emitter.ensemble.inhomogeneous_sigma_ghz},
          {"temperature_k", c.emitter.ensemble.temperature_k},
          {"emitter_density_per_cm2", c.emitter.ensemble.emitter_density_per_cm2},
          {"class_mix", c.emitter.ensemble.class_mix},
          {"thermal_broadening_ghz_per_k3", c.emitter.ensemble.thermal_broadening_ghz_per_k3},
          {"line_amplitude", {amp[0], amp[1], amp[2], amp[3]}},
          {"implantation_fluence_per_cm2", c.emitter.implantation_fluence_per_cm2},
          {"creation_yield", c.emitter.creation_yield},
          {"t2_calibration_s_ghz3", c.emitter.t2_calibration_s_ghz3},
          {"excited_to_ground_strain_ratio", c.emitter.excited_to_ground_strain_ratio}}},
        {"cavity",
         {{"mirror_transmission_ppm", c.cavity.mirror_transmission_ppm},
          {"extra_loss_ppm", c.cavity.extra_loss_ppm},
          {"purcell_index", c.cavity.purcell_index == cqed::PurcellIndex::kDiamond ? "diamond" : "vacuum"},
          {"gamma_convention", c.cavity.gamma_convention == cqed::GammaConvention::kDecayRate ? "decay_rate" : "linewidth"}}},
        {"analysis",
         {{"lifetime_guard_samples", c.analysis.lifetime_guard_samples},
          {"lifetime_pulse_end_ns", c.analysis.lifetime_pulse_end_ns},
          {"ple_window_fwhm", c.analysis.ple_window_fwhm}}},
        {"output_dir", c.output_dir.string()},
    };
}
} // namespace fpcavity::config
