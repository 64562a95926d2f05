#include "oracles.hpp"

#include "fpcavity/errors.hpp"
#include "fpcavity/layered_optics.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace fpcavity;
using namespace fpcavity::optics;

namespace
{
LayerStack make_stack(double n0, const std::vector<oracle::Film> &films, double ns)
{
    LayerStack s;
    s.layers.push_back(OpticalLayer::boundary(n0));
    for (const auto &f : films)
    {
        s.layers.push_back(OpticalLayer::film(f.n, f.d_nm));
    }
    s.layers.push_back(OpticalLayer::boundary(ns));
    return s;
}

LayerStack default_mirror() { return design_quarter_wave_dbr(2.1, 1.45, 1.45, 737.0, 1e-3); }

LayerStack diamond_on(const LayerStack &mirror)
{
    LayerStack s = mirror;
    s.layers.front() = OpticalLayer::boundary(2.417);
    return s;
}

struct RandomStack
{
    double n0;
    std::vector<oracle::Film> films;
    double ns;
    double lambda;
};

RandomStack random_stack(std::mt19937_64 &rng, bool lossy)
{
    std::uniform_real_distribution<double> nre(1.0, 3.0);
    std::uniform_real_distribution<double> nim(0.0, 0.5);
    std::uniform_real_distribution<double> d(1.0, 500.0);
    std::uniform_real_distribution<double> nb(1.0, 2.5);
    std::uniform_real_distribution<double> lam(400.0, 1000.0);
    std::uniform_int_distribution<int> count(1, 12);
    RandomStack r{nb(rng), {}, nb(rng), lam(rng)};
    const int n = count(rng);
    for (int i = 0; i < n; ++i)
    {
        r.films.push_back({{nre(rng), lossy ? nim(rng) : 0.0}, d(rng)});
    }
    return r;
}
} // namespace

TEST_CASE("stack validation rejects malformed stacks")
{
    LayerStack one;
    one.layers.push_back(OpticalLayer::boundary(1.0));
    CHECK_THROWS_AS(one.validate(), ValidationError);
    CHECK_THROWS_AS(stack_response(make_stack(1.0, {{2.0, 0.0}}, 1.5), 737.0), ValidationError);
    CHECK_THROWS_AS(stack_response(make_stack(1.0, {{2.0, -1.0}}, 1.5), 737.0), ValidationError);
    CHECK_THROWS_AS(stack_response(make_stack(1.0, {{0.5, 100.0}}, 1.5), 737.0), ValidationError);

    LayerStack lossy_exit = make_stack(1.0, {{2.0, 100.0}}, 1.5);
    lossy_exit.layers.back().index = {1.5, 0.1};
    CHECK_THROWS_AS(lossy_exit.validate(), ValidationError);

    LayerStack unflagged = make_stack(1.0, {{2.0, 100.0}}, 1.5);
    unflagged.layers.back().semi_infinite = false;
    CHECK_THROWS_AS(unflagged.validate(), ValidationError);
}

TEST_CASE("bare interface gives the Fresnel reflectance")
{
    const Response r = stack_response(make_stack(1.0, {}, 1.5), 600.0);
    CHECK(r.reflectance == doctest::Approx(0.04).epsilon(1e-12));
    CHECK(r.transmittance == doctest::Approx(0.96).epsilon(1e-12));
    CHECK(r.absorptance == 0.0);
}

TEST_CASE("energy conservation on random stacks")
{
    std::mt19937_64 rng(7);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i)
    {
        const RandomStack s = random_stack(rng, i % 2 == 1);
        const Response r = stack_response(make_stack(s.n0, s.films, s.ns), s.lambda);
        worst = std::max(worst, std::abs(r.reflectance + r.transmittance + r.absorptance - 1.0));
        CHECK(r.reflectance >= 0.0);
        CHECK(r.transmittance >= 0.0);
        CHECK(r.absorptance >= -1e-15);
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("reflectance and transmittance match the characteristic-matrix oracle")
{
    std::mt19937_64 rng(11);
    for (int i = 0; i < 300; ++i)
    {
        const RandomStack s = random_stack(rng, true);
        const Response r = stack_response(make_stack(s.n0, s.films, s.ns), s.lambda);
        const oracle::Rt o = oracle::characteristic_matrix(s.n0, s.films, s.ns, s.lambda);
        CHECK(std::abs(r.reflectance - o.R) < 1e-10);
        CHECK(std::abs(r.transmittance - o.T) < 1e-10);
    }
}

TEST_CASE("transmittance is reciprocal under stack reversal")
{
    std::mt19937_64 rng(13);
    for (int i = 0; i < 200; ++i)
    {
        const RandomStack s = random_stack(rng, true);
        std::vector<oracle::Film> rev(s.films.rbegin(), s.films.rend());
        const double t1 = stack_response(make_stack(s.n0, s.films, s.ns), s.lambda).transmittance;
        const double t2 = stack_response(make_stack(s.ns, rev, s.n0), s.lambda).transmittance;
        CHECK(std::abs(t1 - t2) < 1e-10);
    }
}

TEST_CASE("half-wave layer is invisible at its design wavelength")
{
    for (double n : {1.45, 2.1, 2.417, 3.5})
    {
        const double bare = stack_response(make_stack(1.0, {}, 1.45), 737.0).reflectance;
        const double half = stack_response(make_stack(1.0, {{n, 737.0 / (2.0 * n)}}, 1.45), 737.0).reflectance;
        CHECK(std::abs(half - bare) < 1e-9);
    }
}

TEST_CASE("quarter-wave mirror matches the closed-form reflectance")
{
    for (int pairs = 0; pairs <= 15; ++pairs)
    {
        std::vector<oracle::Film> films;
        for (int p = 0; p < pairs; ++p)
        {
            films.push_back({2.1, 737.0 / (4 * 2.1)});
            films.push_back({1.45, 737.0 / (4 * 1.45)});
        }
        const double r = stack_response(make_stack(1.0, films, 1.45), 737.0).reflectance;
        CHECK(std::abs(r - oracle::quarter_wave_reflectance(1.0, 2.1, 1.45, 1.45, pairs)) < 1e-10);
    }
}

TEST_CASE("quarter-wave design picks the smallest sufficient pair count")
{
    const LayerStack m = default_mirror();
    const std::size_t n = quarter_wave_pair_count(m);
    CHECK(n == 11);
    CHECK(stack_response(m, 737.0).transmittance <= 1e-3);
    CHECK(1.0 - oracle::quarter_wave_reflectance(1.0, 2.1, 1.45, 1.45, static_cast<int>(n) - 1) > 1e-3);

    CHECK(quarter_wave_pair_count(design_quarter_wave_dbr(2.1, 1.45, 1.45, 737.0, 1.0)) == 0);
    CHECK_THROWS_AS(design_quarter_wave_dbr(1.45, 2.1, 1.45, 737.0, 1e-3), ValidationError);
    CHECK_THROWS_AS(design_quarter_wave_dbr(2.1, 1.45, 1.45, 737.0, 0.0), ValidationError);

    // Stopband with T < 10 x target around the design wavelength.
    double lo = 737.0;
    double hi = 737.0;
    while (stack_response(m, lo - 0.5).transmittance < 1e-2)
    {
        lo -= 0.5;
    }
    while (stack_response(m, hi + 0.5).transmittance < 1e-2)
    {
        hi += 0.5;
    }
    CHECK(hi - lo >= 100.0);
}

TEST_CASE("tabulated dispersion is interpolated and clamped")
{
    OpticalLayer l = OpticalLayer::film(2.0, 100.0);
    l.dispersion = {{600.0, {2.0, 0.0}}, {800.0, {2.2, 0.0}}};
    CHECK(l.index_at(700.0).real() == doctest::Approx(2.1));
    CHECK(l.index_at(500.0).real() == doctest::Approx(2.0));
    CHECK(l.index_at(900.0).real() == doctest::Approx(2.2));
}

TEST_CASE("electric field is continuous across interfaces")
{
    std::mt19937_64 rng(17);
    for (int i = 0; i < 100; ++i)
    {
        const RandomStack s = random_stack(rng, true);
        for (const InterfaceIntensity &e : interface_intensities(make_stack(s.n0, s.films, s.ns), s.lambda))
        {
            CHECK(std::abs(e.left - e.right) <= 1e-8 * std::max(1.0, e.left));
        }
    }
}

TEST_CASE("field profile shapes")
{
    SUBCASE("matched media give a flat profile")
    {
        const FieldProfile p = field_profile(make_stack(1.0, {{1.0, 400.0}}, 1.0), 737.0, 1.0, {}, 300.0);
        const auto [lo, hi] = std::minmax_element(p.intensity.begin(), p.intensity.end());
        CHECK(*hi - *lo < 1e-9);
    }
    SUBCASE("very high-index terminator puts a node at the interface")
    {
        const FieldProfile p = field_profile(make_stack(1.0, {{1.0, 400.0}}, 1e5), 737.0, 0.5, {2, true});
        CHECK(p.depth_nm.front() == doctest::Approx(0.0));
        CHECK(p.intensity.front() < 1e-3);
        CHECK(*std::max_element(p.intensity.begin(), p.intensity.end()) == doctest::Approx(1.0));
    }
    SUBCASE("standing wave period inside diamond is lambda / 2n")
    {
        const FieldProfile p = clip_profile(field_profile(diamond_on(default_mirror()), 737.0, 0.25, {1, true}, 1000.0),
                                            0.0, 1000.0);
        std::vector<double> peaks;
        for (std::size_t i = 1; i + 1 < p.intensity.size(); ++i)
        {
            if (p.intensity[i] > p.intensity[i - 1] && p.intensity[i] >= p.intensity[i + 1])
            {
                peaks.push_back(p.depth_nm[i]);
            }
        }
        REQUIRE(peaks.size() >= 5);
        const double period = (peaks.back() - peaks.front()) / static_cast<double>(peaks.size() - 1);
        CHECK(period == doctest::Approx(737.0 / (2.0 * 2.417)).epsilon(2e-3));
    }
    SUBCASE("grid limits are enforced")
    {
        CHECK_THROWS_AS(field_profile(default_mirror(), 737.0, 6.0), ValidationError);
        CHECK_THROWS_AS(field_profile(default_mirror(), 737.0, 0.0), ValidationError);
        CHECK_THROWS_AS(field_profile(make_stack(1.0, {{2.0, 8.0}}, 1.5), 737.0, 3.0), ValidationError);
    }
}

TEST_CASE("depth distributions are normalized")
{
    CHECK_NOTHROW(uniform_depth_distribution(25.0, 75.0, 1.0).validate());
    CHECK_NOTHROW(gaussian_depth_distribution(50.0, 10.0, 0.5).validate());
    DepthDistribution bad{{0.0, 1.0}, {1.0, 2.0}};
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    CHECK_THROWS_AS(uniform_depth_distribution(75.0, 25.0, 1.0), ValidationError);
}

TEST_CASE("overlap of ions with the membrane field")
{
    const FieldProfile p =
        clip_profile(field_profile(diamond_on(default_mirror()), 737.0, 0.25, {1, true}, 500.0), 0.0, 500.0);
    const double half = 737.0 / (4.0 * 2.417);

    SUBCASE("delta-like distribution at an antinode and a node")
    {
        // High-index layer against the diamond: a node at the surface and
        // antinodes a quarter period deeper.
        CHECK(field_overlap(p, gaussian_depth_distribution(3.0 * half, 0.2, 0.01)).overlap ==
              doctest::Approx(1.0).epsilon(5e-3));
        CHECK(field_overlap(p, gaussian_depth_distribution(2.0 * half, 0.2, 0.01)).overlap < 5e-3);
    }
    SUBCASE("uniform 25 to 75 nm implantation")
    {
        const OverlapResult r = field_overlap(p, uniform_depth_distribution(25.0, 75.0, 0.5));
        CHECK(r.mode_depth_nm == doctest::Approx(50.0));
        // Representative coating: compare with the reported 80 % within 0.15.
        CHECK(std::abs(r.mode_intensity - 0.80) <= 0.15);
        CHECK(r.overlap > 0.5);
        CHECK(r.overlap < 1.0);
    }
    SUBCASE("disjoint supports are rejected")
    {
        CHECK_THROWS_AS(field_overlap(p, uniform_depth_distribution(600.0, 700.0, 1.0)), ValidationError);
    }
}
