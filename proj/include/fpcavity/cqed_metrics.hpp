#pragma once

// Scalar cavity-QED figures of merit and the cavity parameter report.

#include <json.hpp>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fpcavity::cqed
{
// F = 2 pi / sum(losses). Throws when the total loss is not positive.
double finesse_from_losses(std::span<const double> per_pass_losses_ppm);

// Q = m * F
double quality_factor(int mode_number, double finesse);

// f_P = 3/(4 pi^2) * (lambda/n)^3 * Q / V with V in cubic free-space
// wavelengths, so the wavelength cancels to 3 Q / (4 pi^2 n^3 V).
double purcell_theoretical(double quality_factor, double mode_volume_cubic_wavelengths, double refractive_index);

struct PurcellEffective
{
    double purcell = 1.0;       // F_P,eff = tau_fs / tau_cav
    double cooperativity = 0.0; // C = F_P,eff - 1
    double beta = 0.0;          // C / (1 + C)
    bool enhanced = true;       // false when tau_cav > tau_fs
};

PurcellEffective purcell_effective(double tau_free_ns, double tau_cavity_ns);

// xi such that F_P,eff = 1 + xi * f_P.
double implied_branching_ratio(double purcell_effective, double purcell_theoretical);

// g = sqrt(C kappa gamma) / 2, inverse of C = 4 g^2 / (kappa gamma). All
// rates share one unit (GHz for the /2pi values used here).
double coupling_from_cooperativity(double cooperativity, double kappa, double gamma);
double cooperativity_from_coupling(double coupling, double kappa, double gamma);

// gamma / 2pi derived from the free-space lifetime.
enum class GammaConvention
{
    kDecayRate,  // gamma = 1 / tau, so gamma/2pi = 1 / (2 pi tau)
    kLinewidth,  // gamma/2pi = 1 / tau
};

double gamma_over_2pi_ghz(double tau_free_ns, GammaConvention convention);

// Which index enters f_P.
enum class PurcellIndex
{
    kDiamond,
    kVacuum,
};

struct ReportInputs
{
    double wavelength_nm = 737.0;
    double effective_length_um = 10.7;
    double roc_x_um = 20.3;
    double roc_y_um = 20.3;
    double diamond_index = 2.417;
    std::vector<double> mirror_transmission_ppm{1000.0, 1000.0};
    std::vector<double> extra_loss_ppm{};
    double finesse_experimental = 0.0;
    std::optional<int> mode_number;  // defaults to round(2 L_eff / lambda)
    double tau_free_ns = 0.0;
    double tau_cavity_ns = 0.0;
    PurcellIndex purcell_index = PurcellIndex::kDiamond;
    GammaConvention gamma_convention = GammaConvention::kDecayRate;

    void validate() const;
};

struct ReportRow
{
    std::string key;
    std::string label;
    std::string symbol;
    double value = 0.0;
    std::string unit;
    std::string origin;
};

struct CqedReport
{
    double finesse_theoretical = 0.0;
    double finesse_experimental = 0.0;
    int mode_number = 0;
    double quality_factor = 0.0;
    double fsr_ghz = 0.0;
    double kappa_over_2pi_ghz = 0.0;
    double beam_waist_um = 0.0;
    double mode_volume_cubic_wavelengths = 0.0;
    double mode_area_um2 = 0.0;
    double purcell_theoretical = 0.0;
    double purcell_effective = 0.0;
    double implied_branching_ratio = 0.0;
    double beta = 0.0;
    double cooperativity = 0.0;
    double gamma_over_2pi_ghz = 0.0;
    double coupling_g_over_2pi_ghz = 0.0;
    std::vector<std::string> warnings;

    std::vector<ReportRow> rows() const;
    nlohmann::json to_json() const;
    std::string to_table() const;
};

CqedReport assemble_report(const ReportInputs &inputs);
} // namespace fpcavity::cqed
