#include "cli.hpp"

#include "fpcavity/cavity_geometry.hpp"
#include "fpcavity/config.hpp"
#include "fpcavity/constants.hpp"
#include "fpcavity/cqed_metrics.hpp"
#include "fpcavity/emitter_physics.hpp"
#include "fpcavity/errors.hpp"
#include "fpcavity/io.hpp"
#include "fpcavity/layered_optics.hpp"
#include "fpcavity/scan_analysis.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fpcavity::cli
{
namespace
{
using nlohmann::json;
namespace fs = std::filesystem;

struct Globals
{
    std::string config_path;
    std::string out_dir;
    std::string format;
};

config::ProjectConfig load(const Globals &g)
{
    config::ProjectConfig cfg = g.config_path.empty() ? config::ProjectConfig{} : config::load_config(g.config_path);
    if (!g.out_dir.empty())
    {
        cfg.output_dir = g.out_dir;
    }
    return cfg;
}

// The configured mirror, or the default quarter-wave design when the config
// names no stack file.
optics::LayerStack load_mirror(const config::ProjectConfig &cfg, const std::string &override_path)
{
    const fs::path path = override_path.empty() ? cfg.optics.stack_file : fs::path(override_path);
    if (path.empty())
    {
        optics::LayerStack m = optics::design_quarter_wave_dbr(2.1, 1.45, 1.45, cfg.optics.design_wavelength_nm, 1e-3);
        m.label = "default quarter-wave mirror";
        return m;
    }
    if (!fs::exists(path))
    {
        throw IoError("stack file not found: " + path.string());
    }
    return io::read_stack_json(path);
}

std::string format_or(const Globals &g, const std::string &fallback, std::initializer_list<const char *> allowed)
{
    const std::string f = g.format.empty() ? fallback : g.format;
    for (const char *a : allowed)
    {
        if (f == a)
        {
            return f;
        }
    }
    std::string list;
    for (const char *a : allowed)
    {
        list += list.empty() ? a : std::string("|") + a;
    }
    throw ValidationError("--format " + f + " is not supported here (use " + list + ")");
}

fs::path emit(const config::ProjectConfig &cfg, const std::string &name, const std::string &content, std::ostream &out)
{
    const fs::path path = cfg.output_dir / name;
    io::write_text_atomic(path, content);
    out << "wrote " << path.string() << "\n";
    return path;
}

std::string dump(const json &j) { return j.dump(2) + "\n"; }

std::vector<double> grid(double lo, double hi, double step)
{
    if (!(step > 0.0) || !(hi >= lo))
    {
        throw ValidationError("grid needs step > 0 and max >= min");
    }
    std::vector<double> g;
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
    for (std::size_t i = 0; i <= n; ++i)
    {
        g.push_back(lo + step * static_cast<double>(i));
    }
    return g;
}

json fit_json(const scan::ResonanceFit &f)
{
    return {{"center", f.center},       {"center_err", f.center_err}, {"fwhm", f.fwhm},
            {"fwhm_err", f.fwhm_err},   {"amplitude", f.amplitude},   {"amplitude_err", f.amplitude_err},
            {"offset", f.offset},       {"offset_err", f.offset_err}, {"reduced_chi2", f.reduced_chi2},
            {"iterations", f.iterations}, {"warnings", f.warnings}};
}

optics::FieldProfile membrane_profile(const config::ProjectConfig &cfg, const optics::LayerStack &mirror)
{
    const optics::LayerStack stack =
        cavity::membrane_on_mirror(mirror, cfg.dispersion.diamond_index, cfg.dispersion.bonding_gap_nm);
    const optics::FieldProfile full = optics::field_profile(stack, cfg.optics.design_wavelength_nm,
                                                            cfg.optics.field_step_nm, {1, true}, cfg.optics.field_depth_nm);
    return optics::clip_profile(full, 0.0, cfg.optics.field_depth_nm);
}

// ---- stack ----

struct StackOptions
{
    bool spectrum = false;
    bool field = false;
    bool overlap = false;
    std::string stack_path;
};

int cmd_stack(const Globals &g, const StackOptions &o, std::ostream &out)
{
    const config::ProjectConfig cfg = load(g);
    const optics::LayerStack mirror = load_mirror(cfg, o.stack_path);
    const bool spectrum = o.spectrum || (!o.field && !o.overlap);
    const std::string fmt = format_or(g, "csv", {"csv", "json"});

    if (spectrum)
    {
        const auto wl = grid(cfg.optics.spectrum_min_nm, cfg.optics.spectrum_max_nm, cfg.optics.spectrum_step_nm);
        const optics::SpectralResponse resp = optics::stack_spectrum(mirror, wl);
        if (fmt == "csv")
        {
            std::ostringstream os;
            os << "wavelength_nm,R,T,A\n";
            for (const auto &p : resp)
            {
                os << io::format_number(p.wavelength_nm) << "," << io::format_number(p.reflectance) << ","
                   << io::format_number(p.transmittance) << "," << io::format_number(p.absorptance) << "\n";
            }
            emit(cfg, "spectrum.csv", os.str(), out);
        }
        else
        {
            json j = {{"stack", mirror.label}, {"wavelength_nm", json::array()}, {"R", json::array()},
                      {"T", json::array()}, {"A", json::array()}};
            for (const auto &p : resp)
            {
                j["wavelength_nm"].push_back(p.wavelength_nm);
                j["R"].push_back(p.reflectance);
                j["T"].push_back(p.transmittance);
                j["A"].push_back(p.absorptance);
            }
            emit(cfg, "spectrum.json", dump(j), out);
        }
        const optics::Response design = optics::stack_response(mirror, cfg.optics.design_wavelength_nm);
        out << "T(" << cfg.optics.design_wavelength_nm << " nm) = " << design.transmittance * 1e6 << " ppm\n";
    }
    if (o.field || o.overlap)
    {
        const optics::FieldProfile profile = membrane_profile(cfg, mirror);
        if (o.field)
        {
            if (fmt == "csv")
            {
                std::ostringstream os;
                os << "depth_nm,intensity\n";
                for (std::size_t i = 0; i < profile.depth_nm.size(); ++i)
                {
                    os << io::format_number(profile.depth_nm[i]) << "," << io::format_number(profile.intensity[i])
                       << "\n";
                }
                emit(cfg, "field.csv", os.str(), out);
            }
            else
            {
                emit(cfg, "field.json", dump({{"depth_nm", profile.depth_nm}, {"intensity", profile.intensity}}), out);
            }
        }
        if (o.overlap)
        {
            const double step = std::min(1.0, (cfg.optics.ion_depth_max_nm - cfg.optics.ion_depth_min_nm) / 50.0);
            const optics::DepthDistribution ions =
                optics::uniform_depth_distribution(cfg.optics.ion_depth_min_nm, cfg.optics.ion_depth_max_nm, step);
            const optics::OverlapResult r = optics::field_overlap(profile, ions);
            const json j = {
                {"overlap", r.overlap},
                {"mode_depth_nm", r.mode_depth_nm},
                {"mode_intensity", r.mode_intensity},
                {"ion_depth_min_nm", cfg.optics.ion_depth_min_nm},
                {"ion_depth_max_nm", cfg.optics.ion_depth_max_nm},
                {"wavelength_nm", cfg.optics.design_wavelength_nm},
                {"diamond_index", cfg.dispersion.diamond_index},
                {"bonding_gap_nm", cfg.dispersion.bonding_gap_nm},
                {"stack", mirror.label},
                {"note", "coating design is representative"},
            };
            emit(cfg, "overlap.json", dump(j), out);
            out << "overlap = " << r.overlap << ", intensity at " << r.mode_depth_nm << " nm = " << r.mode_intensity
                << "\n";
        }
    }
    return kOk;
}

// ---- dispersion ----

struct DispersionOptions
{
    bool no_membrane = false;
    std::optional<double> wavelength_min_nm;
    std::optional<double> wavelength_max_nm;
    std::optional<double> wavelength_step_nm;
    std::string stack_path;
};

int cmd_dispersion(const Globals &g, const DispersionOptions &o, std::ostream &out, std::ostream &err)
{
    const config::ProjectConfig cfg = load(g);
    const optics::LayerStack mirror = load_mirror(cfg, o.stack_path);
    cavity::SweepRange wl = cfg.dispersion.wavelength_nm;
    wl.min = o.wavelength_min_nm.value_or(wl.min);
    wl.max = o.wavelength_max_nm.value_or(wl.max);
    wl.step = o.wavelength_step_nm.value_or(wl.step);
    if (!(wl.max > wl.min))
    {
        throw ValidationError("empty wavelength range: max must exceed min");
    }
    const cavity::HybridCavity hc{mirror, mirror, cfg.dispersion.diamond_index,
                                  o.no_membrane ? 0.0 : cfg.dispersion.diamond_thickness_nm,
                                  o.no_membrane ? 0.0 : cfg.dispersion.bonding_gap_nm};
    const cavity::ModeChart chart = cavity::resonance_dispersion(hc, wl, cfg.dispersion.air_gap_nm);
    if (chart.empty())
    {
        err << "warning: " << chart.diagnostic << "\n";
    }
    const std::string fmt = format_or(g, "csv", {"csv", "json"});
    std::size_t air = 0;
    std::size_t diamond = 0;
    if (fmt == "csv")
    {
        std::ostringstream os;
        os << "branch_id,m,wavelength_nm,air_gap_nm,classification\n";
        for (const auto &b : chart.branches)
        {
            for (const auto &p : b.points)
            {
                (p.classification == cavity::ModeClass::kAirLike ? air : diamond)++;
                os << b.id << "," << b.mode_number << "," << io::format_number(p.wavelength_nm) << ","
                   << io::format_number(p.air_gap_nm) << "," << cavity::to_string(p.classification) << "\n";
            }
        }
        emit(cfg, "mode_chart.csv", os.str(), out);
    }
    else
    {
        json branches = json::array();
        for (const auto &b : chart.branches)
        {
            json pts = json::array();
            for (const auto &p : b.points)
            {
                (p.classification == cavity::ModeClass::kAirLike ? air : diamond)++;
                pts.push_back({{"wavelength_nm", p.wavelength_nm},
                               {"air_gap_nm", p.air_gap_nm},
                               {"air_fraction", p.air_fraction},
                               {"classification", cavity::to_string(p.classification)}});
            }
            branches.push_back({{"branch_id", b.id}, {"m", b.mode_number}, {"points", pts}});
        }
        emit(cfg, "mode_chart.json", dump({{"branches", branches}, {"diagnostic", chart.diagnostic}}), out);
    }
    out << chart.branches.size() << " branches, " << air << " air-like and " << diamond << " diamond-like points\n";
    return kOk;
}

// ---- report ----

struct ReportOptions
{
    double finesse = 0.0;
    double tau_free_ns = 0.0;
    double tau_cavity_ns = 0.0;
    std::optional<int> mode_number;
};

int cmd_report(const Globals &g, const ReportOptions &o, std::ostream &out)
{
    const config::ProjectConfig cfg = load(g);
    cqed::ReportInputs in;
    in.wavelength_nm = cfg.geometry.wavelength_nm;
    in.effective_length_um = cfg.geometry.effective_length_um;
    in.roc_x_um = cfg.geometry.roc_x_um;
    in.roc_y_um = cfg.geometry.roc_y_um;
    in.diamond_index = cfg.dispersion.diamond_index;
    in.mirror_transmission_ppm = cfg.cavity.mirror_transmission_ppm;
    in.extra_loss_ppm = cfg.cavity.extra_loss_ppm;
    in.finesse_experimental = o.finesse;
    in.mode_number = o.mode_number;
    in.tau_free_ns = o.tau_free_ns;
    in.tau_cavity_ns = o.tau_cavity_ns;
    in.purcell_index = cfg.cavity.purcell_index;
    in.gamma_convention = cfg.cavity.gamma_convention;
    const cqed::CqedReport report = cqed::assemble_report(in);

    const std::string fmt = format_or(g, "json", {"json", "text"});
    if (fmt == "json")
    {
        emit(cfg, "report.json", dump(report.to_json()), out);
    }
    else
    {
        const std::string table = report.to_table();
        emit(cfg, "report.txt", table, out);
        out << table;
    }
    return kOk;
}

// ---- analyze ----

struct AnalyzeOptions
{
    std::vector<std::string> inputs;
    std::optional<double> wavelength_nm;
    std::string reference;
    bool single = false;
    std::optional<double> pulse_end_ns;
    std::optional<int> guard_samples;
    std::optional<double> window_fwhm;
};

json constants_json(const config::ProjectConfig &cfg, double wavelength_nm)
{
    return {{"wavelength_nm", wavelength_nm},
            {"speed_of_light_m_per_s", constants::kSpeedOfLight},
            {"effective_length_um", cfg.geometry.effective_length_um},
            {"roc_x_um", cfg.geometry.roc_x_um},
            {"roc_y_um", cfg.geometry.roc_y_um},
            {"emitter_density_per_cm2", cfg.emitter.ensemble.emitter_density_per_cm2}};
}

int analyze_scan(const Globals &g, const AnalyzeOptions &o, std::ostream &out)
{
    const config::ProjectConfig cfg = load(g);
    const double lambda = o.wavelength_nm.value_or(cfg.geometry.wavelength_nm);
    const scan::ScanTrace trace = io::read_scan_csv(o.inputs.at(0));
    json j;
    if (o.single)
    {
        const scan::ResonanceFit f = scan::fit_lorentzian(trace);
        j = {{"resonance", fit_json(f)}, {"channel", scan::to_string(trace.meta.channel)}, {"units", trace.meta.units}};
        out << "centre " << f.center << " +- " << f.center_err << ", FWHM " << f.fwhm << " +- " << f.fwhm_err << "\n";
    }
    else
    {
        const scan::FinesseResult f = scan::extract_finesse(trace, lambda);
        j = {{"finesse", f.finesse},
             {"finesse_err", f.finesse_err},
             {"nm_per_unit", f.nm_per_unit},
             {"fwhm_nm", f.fwhm_nm},
             {"resonances", {fit_json(f.first), fit_json(f.second)}},
             {"channel", scan::to_string(trace.meta.channel)}};
        out << "finesse " << f.finesse << " +- " << f.finesse_err << "\n";
        if (!o.reference.empty())
        {
            const scan::FinesseResult ref = scan::extract_finesse(io::read_scan_csv(o.reference), lambda);
            const double loss = scan::emitter_loss_ppm(f.finesse, ref.finesse);
            const cavity::CavityGeometry geom = cfg.geometry;
            const double area = cavity::mode_area_um2(geom);
            const double sigma = scan::ensemble_cross_section_cm2(loss, area);
            const double count = emitter::emitter_count(cfg.emitter.ensemble.emitter_density_per_cm2, area);
            j["absorption"] = {{"finesse_reference", ref.finesse},
                               {"finesse_reference_err", ref.finesse_err},
                               {"emitter_loss_ppm", loss},
                               {"mode_area_um2", area},
                               {"ensemble_cross_section_cm2", sigma},
                               {"emitter_count", count},
                               {"single_cross_section_cm2", scan::single_cross_section_cm2(sigma, count)}};
            out << "emitter loss " << loss << " ppm, ensemble cross-section " << sigma << " cm^2\n";
        }
    }
    j["constants"] = constants_json(cfg, lambda);
    emit(cfg, "scan.json", dump(j), out);
    return kOk;
}

int analyze_lifetime(const Globals &g, const AnalyzeOptions &o, std::ostream &out)
{
    const config::ProjectConfig cfg = load(g);
    const scan::ScanTrace trace = io::read_scan_csv(o.inputs.at(0));
    const double pulse_end = o.pulse_end_ns.value_or(cfg.analysis.lifetime_pulse_end_ns);
    const int guard = o.guard_samples.value_or(cfg.analysis.lifetime_guard_samples);
    const scan::LifetimeFit f = scan::fit_lifetime(trace, pulse_end, guard);
    const json j = {{"tau_ns", f.tau_ns},
                    {"tau_err_ns", f.tau_err},
                    {"amplitude", f.amplitude},
                    {"background", f.background},
                    {"background_err", f.background_err},
                    {"fit_start_ns", f.fit_start_ns},
                    {"reduced_chi2", f.reduced_chi2},
                    {"pulse_end_ns", pulse_end},
                    {"guard_samples", guard},
                    {"warnings", f.warnings}};
    emit(cfg, "lifetime.json", dump(j), out);
    out << "tau " << f.tau_ns << " +- " << f.tau_err << " ns\n";
    return kOk;
}

int analyze_ple(const Globals &g, const AnalyzeOptions &o, std::ostream &out)
{
    const config::ProjectConfig cfg = load(g);
    std::vector<scan::PleScan> scans;
    for (const std::string &path : o.inputs)
    {
        scan::ScanTrace t = io::read_scan_csv(path);
        if (!t.meta.excitation_nm)
        {
            throw IoError(path + ": missing '#meta excitation_nm=' header");
        }
        scans.push_back({*t.meta.excitation_nm, std::move(t)});
    }
    const double window = o.window_fwhm.value_or(cfg.analysis.ple_window_fwhm);
    const scan::PleLineshape shape = scan::aggregate_ple(scans, window);
    const scan::InhomogeneousFit fit = scan::fit_inhomogeneous_linewidth(shape);
    const json j = {{"lineshape",
                     {{"excitation_nm", shape.excitation_nm},
                      {"detuning_ghz", shape.detuning_ghz},
                      {"summed_counts", shape.summed_counts},
                      {"normalized", shape.normalized},
                      {"reference_ghz", shape.reference_ghz}}},
                    {"inhomogeneous",
                     {{"center_nm", fit.center_nm},
                      {"sigma_ghz", fit.sigma_ghz},
                      {"fwhm_ghz", fit.fwhm_ghz},
                      {"fwhm_nm", fit.fwhm_nm},
                      {"reduced_chi2", fit.reduced_chi2}}},
                    {"window_fwhm", window}};
    emit(cfg, "ple.json", dump(j), out);
    out << "inhomogeneous FWHM " << fit.fwhm_ghz << " GHz at " << fit.center_nm << " nm\n";
    return kOk;
}

int analyze_spectrum(const Globals &g, const AnalyzeOptions &o, std::ostream &out)
{
    const config::ProjectConfig cfg = load(g);
    const io::Spectrum s = io::read_spectrum_csv(o.inputs.at(0));
    const scan::FineStructureFit f = scan::fit_fine_structure(s.wavelength_nm, s.intensity);
    const auto &lv = cfg.emitter.levels;
    json j = {{"lines_thz", {f.line_a_thz, f.line_b_thz, f.line_c_thz, f.line_d_thz}},
              {"ground_splitting_ghz", f.ground_splitting_ghz},
              {"excited_splitting_ghz", f.excited_splitting_ghz},
              {"ground_splitting_nm", emitter::splitting_ghz_to_nm(f.ground_splitting_ghz, cfg.geometry.wavelength_nm)},
              {"reduced_chi2", f.reduced_chi2},
              {"spin_orbit_ground_ghz", lv.spin_orbit_ground_ghz},
              {"spin_orbit_excited_ghz", lv.spin_orbit_excited_ghz}};
    if (f.ground_splitting_ghz >= lv.spin_orbit_ground_ghz)
    {
        j["transverse_ground_ghz"] = emitter::strain_from_splitting(lv.spin_orbit_ground_ghz, f.ground_splitting_ghz);
    }
    if (f.excited_splitting_ghz >= lv.spin_orbit_excited_ghz)
    {
        j["transverse_excited_ghz"] = emitter::strain_from_splitting(lv.spin_orbit_excited_ghz, f.excited_splitting_ghz);
    }
    emit(cfg, "fine_structure.json", dump(j), out);
    out << "ground splitting " << f.ground_splitting_ghz << " GHz, excited splitting " << f.excited_splitting_ghz
        << " GHz\n";
    return kOk;
}

// ---- emitter ----

struct EmitterOptions
{
    std::string strain_path;
    std::optional<double> step_nm;
};

int cmd_emitter(const Globals &g, const EmitterOptions &o, std::ostream &out)
{
    const config::ProjectConfig cfg = load(g);
    const auto &lv = cfg.emitter.levels;
    const auto &spec = cfg.emitter.ensemble;

    std::vector<emitter::StrainSample> path;
    if (o.strain_path.empty())
    {
        path.push_back({0.0, {}});
    }
    else
    {
        path = io::read_strain_csv(o.strain_path, cfg.emitter.excited_to_ground_strain_ratio);
    }

    // Wavelength window covering every line along the path.
    double lo = 1e300;
    double hi = 0.0;
    for (const auto &s : path)
    {
        for (const auto &line : emitter::ensemble_lines(lv, s.strain, spec))
        {
            const double w = constants::ghz_to_wavelength_nm(line.center_thz * 1e3);
            lo = std::min(lo, w);
            hi = std::max(hi, w);
        }
    }
    const double margin = emitter::splitting_ghz_to_nm(6.0 * spec.inhomogeneous_sigma_ghz + 50.0, 0.5 * (lo + hi));
    const double step = o.step_nm.value_or(2e-3);
    const std::vector<double> wl = grid(lo - margin, hi + margin, step);
    const emitter::LineScanMap map = emitter::synthesize_linescan(lv, path, spec, wl);

    const std::string fmt = format_or(g, "csv", {"csv", "json"});
    if (fmt == "csv")
    {
        std::ostringstream os;
        if (o.strain_path.empty())
        {
            os << "wavelength_nm,intensity\n";
            for (std::size_t k = 0; k < wl.size(); ++k)
            {
                os << io::format_number(wl[k]) << "," << io::format_number(map.intensity[0][k]) << "\n";
            }
            emit(cfg, "zpl_spectrum.csv", os.str(), out);
        }
        else
        {
            os << "position_um,wavelength_nm,intensity\n";
            for (std::size_t i = 0; i < map.position_um.size(); ++i)
            {
                for (std::size_t k = 0; k < wl.size(); ++k)
                {
                    os << io::format_number(map.position_um[i]) << "," << io::format_number(wl[k]) << ","
                       << io::format_number(map.intensity[i][k]) << "\n";
                }
            }
            emit(cfg, "linescan.csv", os.str(), out);
        }
    }
    else
    {
        emit(cfg, o.strain_path.empty() ? "zpl_spectrum.json" : "linescan.json",
             dump({{"position_um", map.position_um}, {"wavelength_nm", map.wavelength_nm}, {"intensity", map.intensity}}),
             out);
    }

    const double area_cav = cavity::mode_area_um2(cfg.geometry);
    const double area_conf =
        cavity::mode_area_um2(cavity::confocal_waist_um(cfg.geometry.wavelength_nm, cfg.geometry.numerical_aperture));
    const double t2 = emitter::t2_phonon_limit(lv.spin_orbit_ground_ghz, spec.temperature_k, cfg.emitter.t2_calibration_s_ghz3);
    const json summary = {
        {"emitter_density_per_cm2", spec.emitter_density_per_cm2},
        {"emitters_in_cavity_mode", emitter::emitter_count(spec.emitter_density_per_cm2, area_cav)},
        {"emitters_in_confocal_spot", emitter::emitter_count(spec.emitter_density_per_cm2, area_conf)},
        {"cavity_mode_area_um2", area_cav},
        {"confocal_area_um2", area_conf},
        {"homogeneous_fwhm_ghz", emitter::homogeneous_fwhm_ghz(spec)},
        {"phonon_temperature_k", emitter::phonon_temperature_k(lv.spin_orbit_ground_ghz)},
        {"t2_unstrained_s", t2},
        {"t2_note", "order of magnitude only; scales with the configured calibration constant"},
        {"temperature_k", spec.temperature_k},
    };
    emit(cfg, "emitter.json", dump(summary), out);
    return kOk;
}
} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
    CLI::App app{"Open Fabry-Perot microcavity modelling and scan analysis", "fpcav"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config_path, "Project configuration JSON")->check(CLI::ExistingFile);
    app.add_option("--out", g.out_dir, "Output directory (overrides the config)");
    app.add_option("--format", g.format, "Output format: csv, json or text (per command)")
        ->check(CLI::IsMember({"csv", "json", "text"}));

    StackOptions so;
    auto *stack = app.add_subcommand("stack", "Mirror spectra, membrane field profile and ion overlap");
    stack->add_flag("--spectrum", so.spectrum, "R/T/A spectrum (default)");
    stack->add_flag("--field", so.field, "|E|^2 profile into the bonded membrane");
    stack->add_flag("--overlap", so.overlap, "Overlap of the implantation depth range with the field");
    stack->add_option("--stack", so.stack_path, "Stack JSON (overrides the config)");

    DispersionOptions dopt;
    auto *disp = app.add_subcommand("dispersion", "Hybrid-cavity resonance chart");
    disp->add_flag("--no-membrane", dopt.no_membrane, "Bare cavity without the diamond membrane");
    disp->add_option("--wavelength-min-nm", dopt.wavelength_min_nm);
    disp->add_option("--wavelength-max-nm", dopt.wavelength_max_nm);
    disp->add_option("--wavelength-step-nm", dopt.wavelength_step_nm);
    disp->add_option("--stack", dopt.stack_path, "Mirror stack JSON (overrides the config)");

    ReportOptions ropt;
    auto *report = app.add_subcommand("report", "Cavity parameter table");
    report->add_option("--finesse", ropt.finesse, "Experimental finesse")->required();
    report->add_option("--tau-free-ns", ropt.tau_free_ns, "Free-space lifetime")->required();
    report->add_option("--tau-cavity-ns", ropt.tau_cavity_ns, "Lifetime in the cavity")->required();
    report->add_option("--mode-number", ropt.mode_number, "Longitudinal mode number (default from L_eff)");

    AnalyzeOptions aopt;
    auto *analyze = app.add_subcommand("analyze", "Fit measured records");
    analyze->require_subcommand(1);
    auto *a_scan = analyze->add_subcommand("scan", "Length scan: finesse, or one resonance with --single");
    a_scan->add_option("input", aopt.inputs, "Scan CSV")->required()->expected(1);
    a_scan->add_option("--wavelength-nm", aopt.wavelength_nm);
    a_scan->add_option("--reference", aopt.reference, "Scan without emitters, for the absorption loss");
    a_scan->add_flag("--single", aopt.single);
    auto *a_life = analyze->add_subcommand("lifetime", "Fluorescence decay");
    a_life->add_option("input", aopt.inputs, "Decay CSV")->required()->expected(1);
    a_life->add_option("--pulse-end-ns", aopt.pulse_end_ns);
    a_life->add_option("--guard-samples", aopt.guard_samples);
    auto *a_ple = analyze->add_subcommand("ple", "PLE sweep aggregation");
    a_ple->add_option("inputs", aopt.inputs, "One scan CSV per excitation wavelength")->required();
    a_ple->add_option("--window-fwhm", aopt.window_fwhm);
    auto *a_spec = analyze->add_subcommand("spectrum", "Four-line ZPL spectrum");
    a_spec->add_option("input", aopt.inputs, "Spectrum CSV")->required()->expected(1);

    EmitterOptions eopt;
    auto *emit_cmd = app.add_subcommand("emitter", "ZPL spectrum or strain line scan synthesis");
    emit_cmd->add_option("--strain", eopt.strain_path, "Strain-field CSV");
    emit_cmd->add_option("--step-nm", eopt.step_nm);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try
    {
        app.parse(reversed);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsageError;
    }

    try
    {
        if (*stack)
        {
            return cmd_stack(g, so, out);
        }
        if (*disp)
        {
            return cmd_dispersion(g, dopt, out, err);
        }
        if (*report)
        {
            return cmd_report(g, ropt, out);
        }
        if (*emit_cmd)
        {
            return cmd_emitter(g, eopt, out);
        }
        if (*a_scan)
        {
            return analyze_scan(g, aopt, out);
        }
        if (*a_life)
        {
            return analyze_lifetime(g, aopt, out);
        }
        if (*a_ple)
        {
            return analyze_ple(g, aopt, out);
        }
        if (*a_spec)
        {
            return analyze_spectrum(g, aopt, out);
        }
    }
    catch (const FitError &e)
    {
        err << "analysis failed: " << e.what();
        if (e.iterations() > 0)
        {
            err << " (iterations " << e.iterations() << ", residual norm " << e.residual_norm() << ")";
        }
        err << "\n";
        return kAnalysisFailure;
    }
    catch (const ValidationError &e)
    {
        err << "invalid input: " << e.what() << "\n";
        return kUsageError;
    }
    catch (const IoError &e)
    {
        err << "i/o error: " << e.what() << "\n";
        return kUsageError;
    }
    catch (const std::exception &e)
    {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    }
    err << "no command given\n";
    return kUsageError;
}
} // namespace fpcavity::cli
