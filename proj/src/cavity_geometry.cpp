#include "fpcavity/cavity_geometry.hpp"

#include "fpcavity/constants.hpp"
#include "fpcavity/errors.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

namespace fpcavity::cavity
{
namespace
{
constexpr double kGoldenTolNm = 1e-7;

double transmittance_at_gap(const HybridCavity &cavity, double gap_nm, double wavelength_nm)
{
    return optics::stack_response(cavity.build(gap_nm), wavelength_nm).transmittance;
}

// Golden-section search for the maximum of a unimodal function on [lo, hi].
template <typename F> double golden_maximum(F &&f, double lo, double hi)
{
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int i = 0; i < 200 && (b - a) > kGoldenTolNm; ++i)
    {
        if (fc > fd)
        {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        }
        else
        {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}
} // namespace

void CavityGeometry::validate() const
{
    if (!(wavelength_nm > 0.0))
    {
        throw ValidationError("wavelength must be positive");
    }
    if (!(effective_length_um > 0.0))
    {
        throw ValidationError("effective cavity length must be positive");
    }
    if (!(effective_length_um < std::min(roc_x_um, roc_y_um)))
    {
        std::ostringstream msg;
        msg << "unstable cavity: L_eff = " << effective_length_um << " um must be below min(RoC) = "
            << std::min(roc_x_um, roc_y_um) << " um";
        throw ValidationError(msg.str());
    }
    if (!(numerical_aperture > 0.0 && numerical_aperture <= 1.0))
    {
        throw ValidationError("numerical aperture must lie in (0, 1]");
    }
}

double beam_waist_um(double effective_length_um, double roc_um, double wavelength_nm)
{
    if (!(effective_length_um > 0.0) || !(effective_length_um < roc_um))
    {
        throw ValidationError("unstable cavity: need 0 < L_eff < RoC");
    }
    if (!(wavelength_nm > 0.0))
    {
        throw ValidationError("wavelength must be positive");
    }
    const double lambda_um = wavelength_nm * 1e-3;
    const double l = effective_length_um;
    return std::sqrt(lambda_um / constants::kPi) * std::pow(l * roc_um - l * l, 0.25);
}

WaistAxes beam_waist_axes(const CavityGeometry &geometry)
{
    geometry.validate();
    return {beam_waist_um(geometry.effective_length_um, geometry.roc_x_um, geometry.wavelength_nm),
            beam_waist_um(geometry.effective_length_um, geometry.roc_y_um, geometry.wavelength_nm)};
}

double beam_waist_um(const CavityGeometry &geometry)
{
    const WaistAxes w = beam_waist_axes(geometry);
    return std::sqrt(w.x_um * w.y_um);
}

ModeVolume mode_volume(const CavityGeometry &geometry)
{
    const double w0 = beam_waist_um(geometry);
    const double cubic_um = constants::kPi / 4.0 * geometry.effective_length_um * w0 * w0;
    const double lambda_um = geometry.wavelength_nm * 1e-3;
    return {cubic_um, cubic_um / (lambda_um * lambda_um * lambda_um)};
}

double mode_area_um2(double waist_um)
{
    if (!(waist_um >= 0.0))
    {
        throw ValidationError("beam waist must be non-negative");
    }
    return constants::kPi * waist_um * waist_um / 4.0;
}

double mode_area_um2(const CavityGeometry &geometry) { return mode_area_um2(beam_waist_um(geometry)); }

double confocal_waist_um(double wavelength_nm, double numerical_aperture)
{
    if (!(wavelength_nm > 0.0) || !(numerical_aperture > 0.0 && numerical_aperture <= 1.0))
    {
        throw ValidationError("confocal waist needs wavelength > 0 and 0 < NA <= 1");
    }
    return 2.0 * wavelength_nm * 1e-3 / (constants::kPi * numerical_aperture);
}

double free_spectral_range_ghz(double effective_length_um)
{
    if (!(effective_length_um > 0.0))
    {
        throw ValidationError("effective cavity length must be positive");
    }
    return constants::kSpeedOfLight / (2.0 * effective_length_um * 1e-6) * 1e-9;
}

double linewidth_from_finesse_ghz(double effective_length_um, double finesse)
{
    if (!(finesse > 0.0))
    {
        throw ValidationError("finesse must be positive");
    }
    return free_spectral_range_ghz(effective_length_um) / finesse;
}

int longitudinal_mode_number(double effective_length_um, double wavelength_nm)
{
    if (!(effective_length_um > 0.0) || !(wavelength_nm > 0.0))
    {
        throw ValidationError("mode number needs positive length and wavelength");
    }
    return static_cast<int>(std::lround(2.0 * effective_length_um * 1e3 / wavelength_nm));
}

optics::LayerStack HybridCavity::build(double air_gap_nm) const
{
    if (top_mirror.size() < 2 || bottom_mirror.size() < 2)
    {
        throw ValidationError("hybrid cavity needs both mirror stacks");
    }
    optics::LayerStack stack;
    stack.label = "hybrid cavity";
    stack.layers.push_back(optics::OpticalLayer::boundary(top_mirror.layers.back().index));
    for (std::size_t j = top_mirror.size() - 2; j >= 1; --j)
    {
        stack.layers.push_back(top_mirror.layers[j]);
    }
    stack.layers.push_back(optics::OpticalLayer::film(1.0, air_gap_nm));
    if (has_membrane())
    {
        stack.layers.push_back(optics::OpticalLayer::film(diamond_index, diamond_thickness_nm));
        if (bonding_gap_nm > 0.0)
        {
            stack.layers.push_back(optics::OpticalLayer::film(1.0, bonding_gap_nm));
        }
    }
    for (std::size_t j = 1; j + 1 < bottom_mirror.size(); ++j)
    {
        stack.layers.push_back(bottom_mirror.layers[j]);
    }
    stack.layers.push_back(optics::OpticalLayer::boundary(bottom_mirror.layers.back().index));
    return stack;
}

optics::LayerStack membrane_on_mirror(const optics::LayerStack &mirror, double diamond_index, double bonding_gap_nm)
{
    mirror.validate();
    if (!(diamond_index >= 1.0) || bonding_gap_nm < 0.0)
    {
        throw ValidationError("membrane needs n >= 1 and a non-negative bonding gap");
    }
    optics::LayerStack stack;
    stack.label = "membrane on " + (mirror.label.empty() ? std::string("mirror") : mirror.label);
    stack.layers.push_back(optics::OpticalLayer::boundary(diamond_index));
    if (bonding_gap_nm > 0.0)
    {
        stack.layers.push_back(optics::OpticalLayer::film(1.0, bonding_gap_nm));
    }
    stack.layers.insert(stack.layers.end(), mirror.layers.begin() + 1, mirror.layers.end());
    return stack;
}

std::size_t HybridCavity::air_gap_layer() const { return top_mirror.size() - 1; }

std::size_t HybridCavity::diamond_layer() const
{
    if (!has_membrane())
    {
        throw ValidationError("cavity has no diamond membrane");
    }
    return air_gap_layer() + 1;
}

double HybridCavity::optical_membrane_nm() const
{
    return has_membrane() ? diamond_index * diamond_thickness_nm + bonding_gap_nm : 0.0;
}

std::string to_string(ModeClass c) { return c == ModeClass::kAirLike ? "air-like" : "diamond-like"; }

double air_gap_intensity_fraction(const HybridCavity &cavity, double air_gap_nm, double wavelength_nm)
{
    if (!cavity.has_membrane())
    {
        return 1.0;
    }
    const std::vector<double> integrals = optics::layer_intensity_integrals(cavity.build(air_gap_nm), wavelength_nm);
    const double air = integrals[cavity.air_gap_layer()] / air_gap_nm;
    const double diamond = cavity.diamond_index * integrals[cavity.diamond_layer()] / cavity.diamond_thickness_nm;
    return air / (air + diamond);
}

std::vector<double> resonant_gaps(const HybridCavity &cavity, double wavelength_nm, double gap_min_nm,
                                  double gap_max_nm)
{
    if (!(gap_min_nm > 0.0) || !(gap_max_nm > gap_min_nm))
    {
        throw ValidationError("air-gap range needs 0 < min < max");
    }
    const double step = wavelength_nm / 50.0;
    const auto n = static_cast<std::size_t>(std::ceil((gap_max_nm - gap_min_nm) / step));
    std::vector<double> gaps(n + 1);
    std::vector<double> trans(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
    {
        gaps[i] = std::min(gap_min_nm + step * static_cast<double>(i), gap_max_nm);
        trans[i] = transmittance_at_gap(cavity, gaps[i], wavelength_nm);
    }

    std::vector<double> out;
    for (std::size_t i = 1; i < n; ++i)
    {
        if (trans[i] > trans[i - 1] && trans[i] >= trans[i + 1])
        {
            out.push_back(golden_maximum(
                [&](double g) { return transmittance_at_gap(cavity, g, wavelength_nm); }, gaps[i - 1], gaps[i + 1]));
        }
    }
    return out;
}

ModeChart resonance_dispersion(const HybridCavity &cavity, const SweepRange &wavelengths_nm,
                               const SweepRange &air_gap_nm)
{
    if (!(wavelengths_nm.min > 0.0) || !(wavelengths_nm.max >= wavelengths_nm.min) || !(wavelengths_nm.step > 0.0))
    {
        throw ValidationError("wavelength range needs 0 < min <= max and step > 0");
    }

    struct Active
    {
        std::size_t branch;
        double last_gap;
    };
    ModeChart chart;
    std::vector<Active> active;

    const auto count =
        static_cast<std::size_t>(std::floor((wavelengths_nm.max - wavelengths_nm.min) / wavelengths_nm.step + 1e-9));
    for (std::size_t i = 0; i <= count; ++i)
    {
        const double lambda = wavelengths_nm.min + wavelengths_nm.step * static_cast<double>(i);
        const std::vector<double> gaps = resonant_gaps(cavity, lambda, air_gap_nm.min, air_gap_nm.max);
        const double tolerance = lambda / 8.0;

        std::vector<Active> next;
        std::vector<bool> used(active.size(), false);
        for (double gap : gaps)
        {
            std::optional<std::size_t> best;
            for (std::size_t k = 0; k < active.size(); ++k)
            {
                if (!used[k] && std::abs(active[k].last_gap - gap) < tolerance &&
                    (!best || std::abs(active[k].last_gap - gap) < std::abs(active[*best].last_gap - gap)))
                {
                    best = k;
                }
            }
            std::size_t branch;
            if (best)
            {
                used[*best] = true;
                branch = active[*best].branch;
            }
            else
            {
                branch = chart.branches.size();
                chart.branches.push_back({static_cast<int>(branch), 0, {}});
            }

            ModePoint p;
            p.wavelength_nm = lambda;
            p.air_gap_nm = gap;
            p.transmittance = transmittance_at_gap(cavity, gap, lambda);
            p.air_fraction = air_gap_intensity_fraction(cavity, gap, lambda);
            p.classification = p.air_fraction >= kAirLikeThreshold ? ModeClass::kAirLike : ModeClass::kDiamondLike;
            chart.branches[branch].points.push_back(p);
            next.push_back({branch, gap});
        }
        active = std::move(next);
    }

    // Mode number is constant along a continuous branch.
    for (ModeBranch &b : chart.branches)
    {
        double sum = 0.0;
        for (const ModePoint &p : b.points)
        {
            sum += 2.0 * (p.air_gap_nm + cavity.optical_membrane_nm()) / p.wavelength_nm;
        }
        b.mode_number = std::max(1, static_cast<int>(std::lround(sum / static_cast<double>(b.points.size()))));
    }

    if (chart.branches.empty())
    {
        std::ostringstream msg;
        msg << "no transmission maximum for air gaps in [" << air_gap_nm.min << ", " << air_gap_nm.max
            << "] nm and wavelengths in [" << wavelengths_nm.min << ", " << wavelengths_nm.max << "] nm";
        chart.diagnostic = msg.str();
    }
    return chart;
}
} // namespace fpcavity::cavity
