#include "fpcavity/cavity_geometry.hpp"
#include "fpcavity/cqed_metrics.hpp"
#include "fpcavity/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace fpcavity;
using namespace fpcavity::cqed;

TEST_CASE("finesse from the loss budget")
{
    const std::vector<double> two{1000.0, 1000.0};
    CHECK(finesse_from_losses(two) == doctest::Approx(3141.59).epsilon(1e-5));
    CHECK(std::abs(finesse_from_losses(two) - 3142.0) <= 1.0);
    const std::vector<double> low{160.0};
    CHECK(finesse_from_losses(low) == doctest::Approx(39270.0).epsilon(1e-4));
    CHECK(finesse_from_losses(low) > 40000.0 * 0.95);
    const std::vector<double> none{0.0, 0.0};
    CHECK_THROWS_AS(finesse_from_losses(none), ValidationError);
    const std::vector<double> negative{-1.0, 100.0};
    CHECK_THROWS_AS(finesse_from_losses(negative), ValidationError);
}

TEST_CASE("quality factor and theoretical Purcell factor")
{
    CHECK(quality_factor(29, 820.0) == doctest::Approx(23780.0));
    CHECK_THROWS_AS(quality_factor(0, 820.0), ValidationError);

    // f_P = 3 Q / (4 pi^2 n^3 V)
    CHECK(purcell_theoretical(91100.0, 50.0, 2.417) == doctest::Approx(9.8).epsilon(0.01));

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> q(1e3, 1e6), v(1.0, 500.0), n(1.0, 3.0);
    for (int i = 0; i < 1000; ++i)
    {
        const double qq = q(rng), vv = v(rng), nn = n(rng);
        // Recomputed with the wavelength kept explicit (lambda = 0.737 um).
        const double lambda = 0.737;
        const double expected = 3.0 / (4.0 * std::numbers::pi * std::numbers::pi) * std::pow(lambda / nn, 3) * qq /
                                (vv * lambda * lambda * lambda);
        CHECK(purcell_theoretical(qq, vv, nn) == doctest::Approx(expected).epsilon(1e-12));
    }
    CHECK_THROWS_AS(purcell_theoretical(0.0, 50.0, 2.4), ValidationError);
}

TEST_CASE("effective Purcell factor, beta and cooperativity")
{
    const PurcellEffective e = purcell_effective(1.72, 0.78);
    CHECK(e.purcell == doctest::Approx(2.21).epsilon(0.01 / 2.21));
    CHECK(e.cooperativity == doctest::Approx(1.21).epsilon(0.01 / 1.21));
    CHECK(e.beta == doctest::Approx(0.546).epsilon(0.005 / 0.546));
    CHECK(e.enhanced);

    const PurcellEffective equal = purcell_effective(1.0, 1.0);
    CHECK(equal.cooperativity == 0.0);
    CHECK(equal.beta == 0.0);

    const PurcellEffective slower = purcell_effective(1.0, 2.0);
    CHECK_FALSE(slower.enhanced);
    CHECK_THROWS_AS(purcell_effective(0.0, 1.0), ValidationError);

    CHECK(implied_branching_ratio(2.205, 9.8) == doctest::Approx(1.205 / 9.8));
}

TEST_CASE("coupling and cooperativity are inverse")
{
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> c(0.0, 100.0), rate(1e-3, 50.0);
    for (int i = 0; i < 1000; ++i)
    {
        const double cc = c(rng), kappa = rate(rng), gamma = rate(rng);
        const double g = coupling_from_cooperativity(cc, kappa, gamma);
        CHECK(4.0 * g * g / (kappa * gamma) == doctest::Approx(cc).epsilon(1e-12));
        CHECK(cooperativity_from_coupling(g, kappa, gamma) == doctest::Approx(cc).epsilon(1e-12));
    }
    CHECK_THROWS_AS(coupling_from_cooperativity(-0.1, 1.0, 1.0), ValidationError);
}

TEST_CASE("emitter rate conventions")
{
    CHECK(gamma_over_2pi_ghz(1.72, GammaConvention::kDecayRate) ==
          doctest::Approx(1.0 / (2.0 * std::numbers::pi * 1.72)));
    CHECK(gamma_over_2pi_ghz(1.72, GammaConvention::kLinewidth) == doctest::Approx(1.0 / 1.72));
}

TEST_CASE("cavity report")
{
    ReportInputs in;
    in.finesse_experimental = 820.0;
    in.tau_free_ns = 1.72;
    in.tau_cavity_ns = 0.78;
    const CqedReport r = assemble_report(in);

    CHECK(r.mode_number == 29);
    CHECK(r.finesse_theoretical == doctest::Approx(finesse_from_losses(in.mirror_transmission_ppm)));
    CHECK(r.quality_factor == doctest::Approx(29.0 * 820.0));
    CHECK(r.cooperativity == doctest::Approx(1.72 / 0.78 - 1.0));
    CHECK(r.fsr_ghz == doctest::Approx(cavity::free_spectral_range_ghz(10.7)));
    CHECK(r.kappa_over_2pi_ghz == doctest::Approx(r.fsr_ghz / 820.0));
    CHECK(r.mode_volume_cubic_wavelengths == doctest::Approx(49.9).epsilon(0.01));
    CHECK(r.purcell_theoretical == doctest::Approx(purcell_theoretical(r.quality_factor, r.mode_volume_cubic_wavelengths, 2.417)));
    const double g = r.coupling_g_over_2pi_ghz;
    CHECK(4.0 * g * g / (r.kappa_over_2pi_ghz * r.gamma_over_2pi_ghz) == doctest::Approx(r.cooperativity));
    CHECK(r.warnings.empty());

    const auto rows = r.rows();
    CHECK(rows.size() == 16);
    for (const auto &row : rows)
    {
        CHECK_FALSE(row.origin.empty());
        CHECK_FALSE(row.key.empty());
    }

    const nlohmann::json j = r.to_json();
    REQUIRE(j.contains("parameters"));
    for (const auto &row : rows)
    {
        REQUIRE(j["parameters"].contains(row.key));
        const auto &p = j["parameters"][row.key];
        CHECK(p["value"].get<double>() == doctest::Approx(row.value));
        CHECK(p["origin"].get<std::string>() == row.origin);
        CHECK(p.contains("unit"));
    }
    CHECK(j["warnings"].is_array());

    const std::string table = r.to_table();
    CHECK(table.find("Cooperativity") != std::string::npos);

    SUBCASE("vacuum index raises f_P by n^3")
    {
        ReportInputs vac = in;
        vac.purcell_index = PurcellIndex::kVacuum;
        CHECK(assemble_report(vac).purcell_theoretical == doctest::Approx(r.purcell_theoretical * std::pow(2.417, 3)));
    }
    SUBCASE("no enhancement is flagged")
    {
        ReportInputs slow = in;
        slow.tau_cavity_ns = 2.0;
        const CqedReport s = assemble_report(slow);
        CHECK(s.coupling_g_over_2pi_ghz == 0.0);
        CHECK_FALSE(s.warnings.empty());
    }
    SUBCASE("invalid inputs")
    {
        ReportInputs bad = in;
        bad.finesse_experimental = 0.5;
        CHECK_THROWS_AS(assemble_report(bad), ValidationError);
        bad = in;
        bad.tau_free_ns = 0.0;
        CHECK_THROWS_AS(assemble_report(bad), ValidationError);
    }
}
