#include "field_oracles.hpp"

#include "fpcavity/cavity_geometry.hpp"
#include "fpcavity/errors.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace fpcavity;
using namespace fpcavity::cavity;

namespace
{
// Closed-form waist in 50-digit arithmetic, SI units throughout.
double waist_high_precision(double l_um, double roc_um, double lambda_nm)
{
    using Big = boost::multiprecision::cpp_bin_float_50;
    const Big l = Big(l_um) * Big("1e-6");
    const Big roc = Big(roc_um) * Big("1e-6");
    const Big lambda = Big(lambda_nm) * Big("1e-9");
    const Big pi = boost::math::constants::pi<Big>();
    const Big w = sqrt(lambda / pi) * pow(l * roc - l * l, Big("0.25"));
    return static_cast<double>(w * Big("1e6"));
}

HybridCavity default_cavity(double diamond_nm)
{
    const optics::LayerStack m = optics::design_quarter_wave_dbr(2.1, 1.45, 1.45, 737.0, 1e-3);
    return {m, m, 2.417, diamond_nm, 0.0};
}
} // namespace

TEST_CASE("beam waist closed form")
{
    CHECK(beam_waist_um(10.0, 40.0, 737.0) == doctest::Approx(waist_high_precision(10.0, 40.0, 737.0)).epsilon(1e-13));
    CHECK(beam_waist_um(10.0, 40.0, 737.0) == doctest::Approx(2.02).epsilon(5e-3));
    CHECK(beam_waist_um(1e-3, 20.3, 737.0) < beam_waist_um(1.0, 20.3, 737.0));
    CHECK(beam_waist_um(10.7, 20.3, 737.0) == doctest::Approx(1.542).epsilon(1e-3));
}

TEST_CASE("stability guard")
{
    CHECK_THROWS_AS(beam_waist_um(20.3, 20.3, 737.0), ValidationError);
    CHECK_THROWS_AS(beam_waist_um(25.0, 20.3, 737.0), ValidationError);
    CavityGeometry g;
    g.roc_y_um = 10.0;
    CHECK_THROWS_AS(g.validate(), ValidationError);
    CHECK_THROWS_AS(mode_volume(g), ValidationError);
}

TEST_CASE("elliptic mirrors use per-axis waists and their geometric mean")
{
    CavityGeometry g;
    g.roc_x_um = 18.0;
    g.roc_y_um = 24.0;
    const WaistAxes axes = beam_waist_axes(g);
    CHECK(axes.x_um == doctest::Approx(beam_waist_um(10.7, 18.0, 737.0)));
    CHECK(axes.y_um == doctest::Approx(beam_waist_um(10.7, 24.0, 737.0)));
    CHECK(beam_waist_um(g) == doctest::Approx(std::sqrt(axes.x_um * axes.y_um)));
}

TEST_CASE("mode volume and area")
{
    const CavityGeometry g;
    const ModeVolume v = mode_volume(g);
    CHECK(v.cubic_wavelengths == doctest::Approx(49.9).epsilon(2e-3));
    CHECK(v.cubic_um == doctest::Approx(std::numbers::pi / 4.0 * 10.7 * std::pow(beam_waist_um(g), 2)));
    CHECK(mode_area_um2(2.0) == doctest::Approx(std::numbers::pi));
    CHECK(mode_area_um2(g) == doctest::Approx(1.868).epsilon(1e-3));

    // L = 10 um, RoC = 40 um: about 3.2e-17 m^3, 80 cubic wavelengths.
    const CavityGeometry wide{10.0, 40.0, 40.0, 737.0, 0.55};
    CHECK(mode_volume(wide).cubic_um * 1e-18 == doctest::Approx(3.2e-17).epsilon(0.01));
    CHECK(mode_volume(wide).cubic_wavelengths == doctest::Approx(80.0).epsilon(0.01));
    CHECK(mode_area_um2(wide) == doctest::Approx(3.2).epsilon(0.01));
}

TEST_CASE("mode volume scales with the waist squared")
{
    // At fixed L, w0^2 is proportional to sqrt(L RoC - L^2); pick RoC values
    // that double w0.
    const double l = 5.0;
    const double roc1 = 10.0;
    const double target = 16.0 * (l * roc1 - l * l);  // (L RoC - L^2) grows 16x
    const double roc2 = (target + l * l) / l;
    const CavityGeometry a{l, roc1, roc1, 737.0, 0.55};
    const CavityGeometry b{l, roc2, roc2, 737.0, 0.55};
    CHECK(beam_waist_um(b) == doctest::Approx(2.0 * beam_waist_um(a)));
    CHECK(mode_volume(b).cubic_um == doctest::Approx(4.0 * mode_volume(a).cubic_um));
}

TEST_CASE("confocal waist")
{
    CHECK(confocal_waist_um(737.0, 0.55) == doctest::Approx(0.853).epsilon(1e-3));
    CHECK(confocal_waist_um(std::numbers::pi / 2.0 * 1000.0, 1.0) == doctest::Approx(1.0));
    CHECK(confocal_waist_um(1474.0, 0.55) == doctest::Approx(2.0 * confocal_waist_um(737.0, 0.55)));
    const double ratio = mode_area_um2(CavityGeometry{}) / mode_area_um2(confocal_waist_um(737.0, 0.55));
    CHECK(ratio > 3.0);
    CHECK(ratio == doctest::Approx(3.27).epsilon(0.01));
}

TEST_CASE("free spectral range, linewidth and mode number")
{
    CHECK(free_spectral_range_ghz(10.7) == doctest::Approx(14009.0).epsilon(1e-4));
    CHECK(linewidth_from_finesse_ghz(10.7, 3141.0) == doctest::Approx(4.46).epsilon(2e-3));
    CHECK(linewidth_from_finesse_ghz(10.7, 1e12) < 1e-7);
    CHECK(longitudinal_mode_number(10.7, 737.0) == 29);
    CHECK(29 * 737.0 / 2.0 == doctest::Approx(10686.5));
}

TEST_CASE("bare cavity resonances are spaced by lambda / 2")
{
    const HybridCavity bare = default_cavity(0.0);
    for (double lambda : {700.0, 737.0, 780.0})
    {
        const std::vector<double> gaps = resonant_gaps(bare, lambda, 2000.0, 5000.0);
        REQUIRE(gaps.size() >= 7);
        for (std::size_t i = 1; i < gaps.size(); ++i)
        {
            CHECK(gaps[i] - gaps[i - 1] == doctest::Approx(lambda / 2.0).epsilon(1e-8));
        }
    }
    const ModeChart chart = resonance_dispersion(bare, {730.0, 740.0, 1.0}, {2000.0, 5000.0, 0.0});
    for (const ModeBranch &b : chart.branches)
    {
        for (const ModePoint &p : b.points)
        {
            CHECK(p.classification == ModeClass::kAirLike);
        }
    }
}

TEST_CASE("empty gap range gives an empty chart with a diagnostic")
{
    const ModeChart chart = resonance_dispersion(default_cavity(0.0), {737.0, 737.0, 1.0}, {2000.0, 2010.0, 0.0});
    CHECK(chart.empty());
    CHECK_FALSE(chart.diagnostic.empty());
    CHECK_THROWS_AS(resonance_dispersion(default_cavity(0.0), {740.0, 730.0, 1.0}, {2000.0, 5000.0, 0.0}),
                    ValidationError);
}

TEST_CASE("membrane cavity branches alternate between air-like and diamond-like")
{
    const HybridCavity hc = default_cavity(3000.0);
    const ModeChart chart = resonance_dispersion(hc, {700.0, 780.0, 1.0}, {2000.0, 5000.0, 0.0});
    int checked = 0;
    for (const ModeBranch &b : chart.branches)
    {
        if (b.points.size() < 60)
        {
            continue;
        }
        std::size_t air = 0;
        std::size_t flips = 0;
        double air_slope = 0.0;
        double dia_slope = 0.0;
        std::size_t air_n = 0;
        std::size_t dia_n = 0;
        for (std::size_t i = 0; i < b.points.size(); ++i)
        {
            const ModePoint &p = b.points[i];
            air += p.classification == ModeClass::kAirLike;
            if (i > 0)
            {
                flips += p.classification != b.points[i - 1].classification;
                const double slope = std::abs((p.air_gap_nm - b.points[i - 1].air_gap_nm) /
                                              (p.wavelength_nm - b.points[i - 1].wavelength_nm));
                if (p.classification == b.points[i - 1].classification)
                {
                    (p.classification == ModeClass::kAirLike ? air_slope : dia_slope) += slope;
                    (p.classification == ModeClass::kAirLike ? air_n : dia_n)++;
                }
            }
        }
        CHECK(air > 0);
        CHECK(air < b.points.size());
        CHECK(flips >= 2);
        REQUIRE(air_n > 0);
        REQUIRE(dia_n > 0);
        // Air-like modes follow the gap closely, so their wavelength moves fast
        // with the gap: steep in lambda(L), shallow in dL/dlambda.
        CHECK(air_slope / static_cast<double>(air_n) < dia_slope / static_cast<double>(dia_n));

        // Classification agrees with the sampled field away from the threshold.
        for (std::size_t i = 0; i < b.points.size(); i += 7)
        {
            const ModePoint &p = b.points[i];
            const double sampled = oracle::sampled_air_fraction(hc, p.air_gap_nm, p.wavelength_nm);
            CHECK(sampled == doctest::Approx(p.air_fraction).epsilon(1e-3));
            if (std::abs(sampled - kAirLikeThreshold) > 0.02)
            {
                CHECK((sampled > kAirLikeThreshold) == (p.classification == ModeClass::kAirLike));
            }
        }
        ++checked;
    }
    CHECK(checked >= 3);
}

TEST_CASE("air fraction limits for a node and an antinode at the membrane surface")
{
    // Fractions are bounded by the pure standing-wave values.
    const HybridCavity hc = default_cavity(3000.0);
    for (double gap : resonant_gaps(hc, 737.0, 2000.0, 5000.0))
    {
        const double f = air_gap_intensity_fraction(hc, gap, 737.0);
        CHECK(f >= 1.0 / 3.417 - 0.02);
        CHECK(f <= 2.417 / 3.417 + 0.02);
    }
    CHECK(air_gap_intensity_fraction(default_cavity(0.0), 3000.0, 737.0) == 1.0);
}

TEST_CASE("membrane on mirror stack layout")
{
    const optics::LayerStack m = optics::design_quarter_wave_dbr(2.1, 1.45, 1.45, 737.0, 1e-3);
    const optics::LayerStack bonded = membrane_on_mirror(m, 2.417, 0.0);
    CHECK(bonded.size() == m.size());
    CHECK(bonded.layers.front().index.real() == doctest::Approx(2.417));
    const optics::LayerStack gapped = membrane_on_mirror(m, 2.417, 10.0);
    CHECK(gapped.size() == m.size() + 1);
    CHECK(gapped.layers[1].thickness_nm == doctest::Approx(10.0));
}
