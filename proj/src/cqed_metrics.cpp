#include "fpcavity/cqed_metrics.hpp"

#include "fpcavity/cavity_geometry.hpp"
#include "fpcavity/constants.hpp"
#include "fpcavity/errors.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace fpcavity::cqed
{
double finesse_from_losses(std::span<const double> per_pass_losses_ppm)
{
    double total = 0.0;
    for (double l : per_pass_losses_ppm)
    {
        if (!(l >= 0.0))
        {
            throw ValidationError("losses must be non-negative");
        }
        total += l;
    }
    if (!(total > 0.0))
    {
        throw ValidationError("total loss is zero: finesse diverges");
    }
    return 2.0 * constants::kPi / (total * 1e-6);
}

double quality_factor(int mode_number, double finesse)
{
    if (mode_number < 1 || !(finesse > 0.0))
    {
        throw ValidationError("quality factor needs m >= 1 and F > 0");
    }
    return static_cast<double>(mode_number) * finesse;
}

double purcell_theoretical(double quality_factor, double mode_volume_cubic_wavelengths, double refractive_index)
{
    if (!(quality_factor > 0.0) || !(mode_volume_cubic_wavelengths > 0.0) || !(refractive_index > 0.0))
    {
        throw ValidationError("Purcell factor needs positive Q, V and n");
    }
    const double n3 = refractive_index * refractive_index * refractive_index;
    return 3.0 / (4.0 * constants::kPi * constants::kPi) * quality_factor / (mode_volume_cubic_wavelengths * n3);
}

PurcellEffective purcell_effective(double tau_free_ns, double tau_cavity_ns)
{
    if (!(tau_free_ns > 0.0) || !(tau_cavity_ns > 0.0))
    {
        throw ValidationError("lifetimes must be positive");
    }
    PurcellEffective out;
    out.purcell = tau_free_ns / tau_cavity_ns;
    out.cooperativity = out.purcell - 1.0;
    out.beta = out.cooperativity / (1.0 + out.cooperativity);
    out.enhanced = tau_cavity_ns <= tau_free_ns;
    return out;
}

double implied_branching_ratio(double purcell_effective, double purcell_theoretical)
{
    if (!(purcell_theoretical > 0.0))
    {
        throw ValidationError("theoretical Purcell factor must be positive");
    }
    return (purcell_effective - 1.0) / purcell_theoretical;
}

double coupling_from_cooperativity(double cooperativity, double kappa, double gamma)
{
    if (!(cooperativity >= 0.0) || !(kappa > 0.0) || !(gamma > 0.0))
    {
        throw ValidationError("coupling needs C >= 0 and positive kappa, gamma");
    }
    return 0.5 * std::sqrt(cooperativity * kappa * gamma);
}

double cooperativity_from_coupling(double coupling, double kappa, double gamma)
{
    if (!(kappa > 0.0) || !(gamma > 0.0))
    {
        throw ValidationError("cooperativity needs positive kappa, gamma");
    }
    return 4.0 * coupling * coupling / (kappa * gamma);
}

double gamma_over_2pi_ghz(double tau_free_ns, GammaConvention convention)
{
    if (!(tau_free_ns > 0.0))
    {
        throw ValidationError("lifetime must be positive");
    }
    return convention == GammaConvention::kDecayRate ? 1.0 / (2.0 * constants::kPi * tau_free_ns) : 1.0 / tau_free_ns;
}

void ReportInputs::validate() const
{
    if (!(finesse_experimental > 1.0))
    {
        throw ValidationError("experimental finesse must exceed 1");
    }
    if (!(tau_free_ns > 0.0) || !(tau_cavity_ns > 0.0))
    {
        throw ValidationError("free-space and cavity lifetimes must be positive");
    }
    if (mode_number && *mode_number < 1)
    {
        throw ValidationError("mode number must be >= 1");
    }
}

CqedReport assemble_report(const ReportInputs &in)
{
    in.validate();
    const cavity::CavityGeometry geometry{in.effective_length_um, in.roc_x_um, in.roc_y_um, in.wavelength_nm, 0.55};

    CqedReport r;
    std::vector<double> losses = in.mirror_transmission_ppm;
    losses.insert(losses.end(), in.extra_loss_ppm.begin(), in.extra_loss_ppm.end());
    r.finesse_theoretical = finesse_from_losses(losses);
    r.finesse_experimental = in.finesse_experimental;
    r.mode_number = in.mode_number.value_or(cavity::longitudinal_mode_number(in.effective_length_um, in.wavelength_nm));
    r.quality_factor = quality_factor(r.mode_number, r.finesse_experimental);
    r.fsr_ghz = cavity::free_spectral_range_ghz(in.effective_length_um);
    r.kappa_over_2pi_ghz = cavity::linewidth_from_finesse_ghz(in.effective_length_um, r.finesse_experimental);
    r.beam_waist_um = cavity::beam_waist_um(geometry);
    r.mode_volume_cubic_wavelengths = cavity::mode_volume(geometry).cubic_wavelengths;
    r.mode_area_um2 = cavity::mode_area_um2(r.beam_waist_um);

    const double n = in.purcell_index == PurcellIndex::kDiamond ? in.diamond_index : 1.0;
    r.purcell_theoretical = purcell_theoretical(r.quality_factor, r.mode_volume_cubic_wavelengths, n);

    const PurcellEffective eff = purcell_effective(in.tau_free_ns, in.tau_cavity_ns);
    r.purcell_effective = eff.purcell;
    r.cooperativity = eff.cooperativity;
    r.beta = eff.beta;
    r.implied_branching_ratio = implied_branching_ratio(eff.purcell, r.purcell_theoretical);
    r.gamma_over_2pi_ghz = gamma_over_2pi_ghz(in.tau_free_ns, in.gamma_convention);
    if (eff.enhanced)
    {
        r.coupling_g_over_2pi_ghz = coupling_from_cooperativity(r.cooperativity, r.kappa_over_2pi_ghz, r.gamma_over_2pi_ghz);
    }
    else
    {
        r.warnings.push_back("cavity lifetime exceeds free-space lifetime: no Purcell enhancement");
    }
    if (r.finesse_experimental > r.finesse_theoretical)
    {
        r.warnings.push_back("experimental finesse exceeds the loss-budget finesse");
    }
    return r;
}

std::vector<ReportRow> CqedReport::rows() const
{
    return {
        {"finesse_theoretical", "Theoretical finesse", "F_theo", finesse_theoretical, "", "mirror transmission and loss budget"},
        {"finesse_experimental", "Experimental finesse", "F_exp", finesse_experimental, "", "cavity length scan"},
        {"mode_number", "Longitudinal mode number", "m", static_cast<double>(mode_number), "", "L_eff = m lambda / 2"},
        {"quality_factor", "Quality factor", "Q", quality_factor, "", "F_exp and m"},
        {"free_spectral_range", "Free spectral range", "FSR", fsr_ghz, "GHz", "L_eff"},
        {"kappa_over_2pi", "Cavity linewidth", "kappa/2pi", kappa_over_2pi_ghz, "GHz", "F_exp and L_eff"},
        {"beam_waist", "Beam waist", "w0", beam_waist_um, "um", "L_eff and RoC"},
        {"mode_volume", "Mode volume", "V", mode_volume_cubic_wavelengths, "lambda^3", "w0 and L_eff"},
        {"mode_area", "Mode area", "A", mode_area_um2, "um^2", "w0"},
        {"purcell_theoretical", "Theoretical Purcell factor", "f_P", purcell_theoretical, "", "Q, V and n"},
        {"purcell_effective", "Effective Purcell factor", "F_P,eff", purcell_effective, "", "fitted lifetime data"},
        {"branching_ratio_implied", "Implied branching ratio", "xi", implied_branching_ratio, "", "F_P,eff and f_P"},
        {"beta", "Beta factor", "beta", beta, "", "F_P,eff"},
        {"cooperativity", "Cooperativity", "C", cooperativity, "", "F_P,eff"},
        {"gamma_over_2pi", "Emitter decay rate", "gamma/2pi", gamma_over_2pi_ghz, "GHz", "free-space lifetime"},
        {"g_over_2pi", "Coupling strength", "g/2pi", coupling_g_over_2pi_ghz, "GHz", "C, kappa and gamma"},
    };
}

nlohmann::json CqedReport::to_json() const
{
    nlohmann::json out = nlohmann::json::object();
    nlohmann::json params = nlohmann::json::object();
    for (const ReportRow &row : rows())
    {
        params[row.key] = {{"value", row.value}, {"unit", row.unit}, {"origin", row.origin}, {"symbol", row.symbol}};
    }
    out["parameters"] = params;
    out["warnings"] = warnings;
    return out;
}

std::string CqedReport::to_table() const
{
    std::ostringstream os;
    char line[160];
    std::snprintf(line, sizeof line, "%-28s %-10s %14s %-9s %s\n", "Parameter", "Symbol", "Value", "Unit", "Origin");
    os << line;
    for (const ReportRow &row : rows())
    {
        std::snprintf(line, sizeof line, "%-28s %-10s %14.6g %-9s %s\n", row.label.c_str(), row.symbol.c_str(),
                      row.value, row.unit.c_str(), row.origin.c_str());
        os << line;
    }
    for (const std::string &w : warnings)
    {
        os << "warning: " << w << "\n";
    }
    return os.str();
}
} // namespace fpcavity::cqed
