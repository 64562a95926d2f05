#pragma once

#include <numbers>

namespace fpcavity::constants
{
inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPlanck = 6.62607015e-34;     // J s
inline constexpr double kBoltzmann = 1.380649e-23;    // J/K
inline constexpr double kPi = std::numbers::pi;

// c expressed in nm*GHz, handy for nu[GHz] = c / lambda[nm].
inline constexpr double kSpeedOfLightNmGhz = kSpeedOfLight;

inline double wavelength_nm_to_ghz(double wavelength_nm) { return kSpeedOfLightNmGhz / wavelength_nm; }
inline double ghz_to_wavelength_nm(double frequency_ghz) { return kSpeedOfLightNmGhz / frequency_ghz; }
} // namespace fpcavity::constants
