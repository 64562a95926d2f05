#include "fpcavity/emitter_physics.hpp"

#include "fpcavity/constants.hpp"
#include "fpcavity/errors.hpp"
#include "fpcavity/lineshapes.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fpcavity::emitter
{
namespace
{
constexpr std::array<char, 4> kLabels{'A', 'B', 'C', 'D'};

// Relative populations of the (upper, lower) excited branches.
std::array<double, 2> excited_populations(double excited_splitting_ghz, double temperature_k)
{
    if (temperature_k <= 0.0)
    {
        return {0.0, 1.0};
    }
    const double boltzmann = std::exp(-phonon_temperature_k(excited_splitting_ghz) / temperature_k);
    return {boltzmann / (1.0 + boltzmann), 1.0 / (1.0 + boltzmann)};
}
} // namespace

void GroupIVLevels::validate() const
{
    if (!(zpl_center_thz > 0.0) || !(spin_orbit_ground_ghz > 0.0) || !(spin_orbit_excited_ghz > 0.0))
    {
        throw ValidationError("group-IV level parameters must be positive");
    }
}

void StrainState::validate() const
{
    if (!(transverse_ground_ghz >= 0.0) || !(transverse_excited_ghz >= 0.0))
    {
        throw ValidationError("transverse strain magnitudes must be non-negative");
    }
    if (orientation_class != 1 && orientation_class != 2)
    {
        throw ValidationError("orientation class must be 1 or 2");
    }
    if (!std::isfinite(axial_shift_ghz))
    {
        throw ValidationError("axial shift must be finite");
    }
}

FineStructure splittings_from_strain(const GroupIVLevels &levels, const StrainState &strain)
{
    levels.validate();
    strain.validate();
    FineStructure fs;
    fs.ground_splitting_ghz = std::hypot(levels.spin_orbit_ground_ghz, strain.transverse_ground_ghz);
    fs.excited_splitting_ghz = std::hypot(levels.spin_orbit_excited_ghz, strain.transverse_excited_ghz);
    const double center = levels.zpl_center_thz + strain.axial_shift_ghz * 1e-3;
    const double es = 0.5e-3 * fs.excited_splitting_ghz;
    const double gs = 0.5e-3 * fs.ground_splitting_ghz;
    fs.line_a_thz = center + es + gs;
    fs.line_b_thz = center + es - gs;
    fs.line_c_thz = center - es + gs;
    fs.line_d_thz = center - es - gs;
    return fs;
}

double strain_from_splitting(double spin_orbit_ghz, double observed_splitting_ghz)
{
    if (!(spin_orbit_ghz > 0.0))
    {
        throw ValidationError("spin-orbit splitting must be positive");
    }
    if (!(observed_splitting_ghz >= spin_orbit_ghz))
    {
        std::ostringstream msg;
        msg << "observed splitting " << observed_splitting_ghz << " GHz is below the spin-orbit splitting "
            << spin_orbit_ghz << " GHz";
        throw ValidationError(msg.str());
    }
    return std::sqrt((observed_splitting_ghz - spin_orbit_ghz) * (observed_splitting_ghz + spin_orbit_ghz));
}

double splitting_ghz_to_nm(double splitting_ghz, double wavelength_nm)
{
    return wavelength_nm * wavelength_nm * splitting_ghz / constants::kSpeedOfLightNmGhz;
}

void EnsembleSpec::validate() const
{
    if (!(homogeneous_linewidth_mhz > 0.0) || !(inhomogeneous_sigma_ghz > 0.0))
    {
        throw ValidationError("linewidths must be positive");
    }
    if (!(temperature_k >= 0.0) || !(thermal_broadening_ghz_per_k3 >= 0.0) || !(emitter_density_per_cm2 >= 0.0))
    {
        throw ValidationError("temperature, broadening coefficient and density must be non-negative");
    }
    if (!(class_mix >= 0.0 && class_mix <= 1.0))
    {
        throw ValidationError("class mix must lie in [0, 1]");
    }
    for (double a : line_amplitude)
    {
        if (!(a >= 0.0))
        {
            throw ValidationError("line amplitude overrides must be non-negative");
        }
    }
}

double homogeneous_fwhm_ghz(const EnsembleSpec &spec)
{
    const double t = spec.temperature_k;
    return spec.homogeneous_linewidth_mhz * 1e-3 + spec.thermal_broadening_ghz_per_k3 * t * t * t;
}

std::vector<SpectralLine> ensemble_lines(const GroupIVLevels &levels, const ClassStrain &strain,
                                         const EnsembleSpec &spec)
{
    spec.validate();
    std::vector<SpectralLine> out;
    const std::array<const StrainState *, 2> classes{&strain.first, &strain.second};
    const std::array<double, 2> shares{spec.class_mix, 1.0 - spec.class_mix};
    for (std::size_t c = 0; c < 2; ++c)
    {
        const FineStructure fs = splittings_from_strain(levels, *classes[c]);
        const auto pop = excited_populations(fs.excited_splitting_ghz, spec.temperature_k);
        const auto lines = fs.lines_thz();
        for (std::size_t i = 0; i < 4; ++i)
        {
            const double branch = i < 2 ? pop[0] : pop[1];
            out.push_back({kLabels[i], classes[c]->orientation_class, lines[i],
                           shares[c] * branch * spec.line_amplitude[i]});
        }
    }
    return out;
}

double ensemble_intensity(std::span<const SpectralLine> lines, const EnsembleSpec &spec, double frequency_thz)
{
    const double gamma = homogeneous_fwhm_ghz(spec);
    double sum = 0.0;
    for (const SpectralLine &l : lines)
    {
        if (l.area != 0.0)
        {
            sum += l.area * lineshape::voigt((frequency_thz - l.center_thz) * 1e3, gamma, spec.inhomogeneous_sigma_ghz);
        }
    }
    return sum;
}

std::vector<double> synthesize_zpl_spectrum(const GroupIVLevels &levels, const ClassStrain &strain,
                                            const EnsembleSpec &spec, std::span<const double> wavelengths_nm)
{
    if (wavelengths_nm.size() < 2)
    {
        throw ValidationError("spectrum grid needs at least two wavelengths");
    }
    const std::vector<SpectralLine> lines = ensemble_lines(levels, strain, spec);
    const auto [lo, hi] = std::minmax_element(wavelengths_nm.begin(), wavelengths_nm.end());
    std::ostringstream missing;
    for (const SpectralLine &l : lines)
    {
        const double w = constants::ghz_to_wavelength_nm(l.center_thz * 1e3);
        if (l.area > 0.0 && (w < *lo || w > *hi))
        {
            missing << " " << l.label << l.orientation_class << "@" << w << "nm";
        }
    }
    if (!missing.str().empty())
    {
        throw ValidationError("wavelength grid does not cover lines:" + missing.str());
    }

    std::vector<double> out;
    out.reserve(wavelengths_nm.size());
    for (double w : wavelengths_nm)
    {
        out.push_back(ensemble_intensity(lines, spec, constants::wavelength_nm_to_ghz(w) * 1e-3));
    }
    return out;
}

LineScanMap synthesize_linescan(const GroupIVLevels &levels, std::span<const StrainSample> path,
                                const EnsembleSpec &spec, std::span<const double> wavelengths_nm)
{
    LineScanMap map;
    map.wavelength_nm.assign(wavelengths_nm.begin(), wavelengths_nm.end());
    for (const StrainSample &s : path)
    {
        map.position_um.push_back(s.position_um);
        map.intensity.push_back(synthesize_zpl_spectrum(levels, s.strain, spec, wavelengths_nm));
    }
    return map;
}

double phonon_temperature_k(double splitting_ghz)
{
    return constants::kPlanck * splitting_ghz * 1e9 / constants::kBoltzmann;
}

double t2_phonon_limit(double ground_splitting_ghz, double temperature_k, double calibration_s_ghz3)
{
    if (!(ground_splitting_ghz > 0.0) || !(temperature_k > 0.0) || !(calibration_s_ghz3 > 0.0))
    {
        throw ValidationError("T2 model needs positive splitting, temperature and calibration");
    }
    const double x = phonon_temperature_k(ground_splitting_ghz) / temperature_k;
    const double occupation = 1.0 / std::expm1(x);
    const double d3 = ground_splitting_ghz * ground_splitting_ghz * ground_splitting_ghz;
    const double t2 = calibration_s_ghz3 / (d3 * occupation);
    if (!(occupation > 0.0) || !std::isfinite(t2) || t2 > kT2SaturationCapS)
    {
        return kT2SaturationCapS;
    }
    return t2;
}

double emitter_count(double density_per_cm2, double area_um2)
{
    if (!(density_per_cm2 >= 0.0) || !(area_um2 >= 0.0))
    {
        throw ValidationError("density and area must be non-negative");
    }
    return density_per_cm2 * area_um2 * 1e-8;
}

double density_from_fluence(double fluence_per_cm2, double creation_yield)
{
    if (!(fluence_per_cm2 >= 0.0) || !(creation_yield >= 0.0 && creation_yield <= 1.0))
    {
        throw ValidationError("fluence must be non-negative and yield within [0, 1]");
    }
    return fluence_per_cm2 * creation_yield;
}
} // namespace fpcavity::emitter
