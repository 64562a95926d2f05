#pragma once

// Gaussian-mode geometry of a plano-concave (hemispherical) cavity and the
// resonance chart of a hybrid air/diamond cavity.

#include "fpcavity/layered_optics.hpp"

#include <string>
#include <vector>

namespace fpcavity::cavity
{
struct CavityGeometry
{
    double effective_length_um = 10.7;
    double roc_x_um = 20.3;
    double roc_y_um = 20.3;
    double wavelength_nm = 737.0;
    double numerical_aperture = 0.55;

    // 0 < L_eff < min(RoC_x, RoC_y), wavelength > 0, 0 < NA <= 1.
    void validate() const;
};

struct WaistAxes
{
    double x_um = 0.0;
    double y_um = 0.0;
};

// w0 ~ sqrt(lambda/pi) * (L*RoC - L^2)^(1/4) for a single mirror axis.
double beam_waist_um(double effective_length_um, double roc_um, double wavelength_nm);

WaistAxes beam_waist_axes(const CavityGeometry &geometry);

// Geometric mean of the two per-axis waists.
double beam_waist_um(const CavityGeometry &geometry);

struct ModeVolume
{
    double cubic_um = 0.0;
    double cubic_wavelengths = 0.0;
};

// V = (pi/4) * L_eff * w0^2
ModeVolume mode_volume(const CavityGeometry &geometry);

// A = pi * w0^2 / 4
double mode_area_um2(double waist_um);
double mode_area_um2(const CavityGeometry &geometry);

// w_fs ~ 2 lambda / (pi NA)
double confocal_waist_um(double wavelength_nm, double numerical_aperture);

double free_spectral_range_ghz(double effective_length_um);

// kappa / 2pi = FSR / F
double linewidth_from_finesse_ghz(double effective_length_um, double finesse);

// m such that L_eff is closest to m * lambda / 2.
int longitudinal_mode_number(double effective_length_um, double wavelength_nm);

// Air gap bounded by two mirrors, optionally with a diamond membrane bonded
// to the bottom mirror. Mirror stacks are given as "incidence medium |
// coating | substrate" with the incidence side facing the cavity.
struct HybridCavity
{
    optics::LayerStack top_mirror;
    optics::LayerStack bottom_mirror;
    double diamond_index = 2.417;
    double diamond_thickness_nm = 0.0;  // 0: bare cavity
    double bonding_gap_nm = 0.0;        // air between membrane and bottom mirror

    bool has_membrane() const { return diamond_thickness_nm > 0.0; }

    // Full stack: top substrate | top coating (reversed) | air gap | diamond |
    // bonding gap | bottom coating | bottom substrate.
    optics::LayerStack build(double air_gap_nm) const;
    std::size_t air_gap_layer() const;
    std::size_t diamond_layer() const;  // throws when there is no membrane
    double optical_membrane_nm() const;
};

// Mirror with a diamond half-space bonded on its incidence side (through an
// optional air gap). Interface 1 is the diamond surface, so depth into the
// membrane uses DepthFrame{1, true}.
optics::LayerStack membrane_on_mirror(const optics::LayerStack &mirror, double diamond_index, double bonding_gap_nm);

struct SweepRange
{
    double min = 0.0;
    double max = 0.0;
    double step = 0.0;
};

enum class ModeClass
{
    kAirLike,
    kDiamondLike,
};

std::string to_string(ModeClass c);

struct ModePoint
{
    double wavelength_nm = 0.0;
    double air_gap_nm = 0.0;
    double transmittance = 0.0;
    double air_fraction = 1.0;
    ModeClass classification = ModeClass::kAirLike;
};

struct ModeBranch
{
    int id = 0;
    int mode_number = 0;
    std::vector<ModePoint> points;  // ascending wavelength
};

struct ModeChart
{
    std::vector<ModeBranch> branches;
    std::string diagnostic;  // non-empty when no resonance was found

    bool empty() const { return branches.empty(); }
};

// Share of length-averaged n|E|^2 (the counter-propagating wave intensity)
// that sits in the air gap rather than the membrane. Equals n/(n+1) when the
// membrane surface is a field node and 1/(n+1) when it is an antinode.
// A bare cavity reports 1.
double air_gap_intensity_fraction(const HybridCavity &cavity, double air_gap_nm, double wavelength_nm);

inline constexpr double kAirLikeThreshold = 0.5;

// Transmission maxima over the air gap for every wavelength, linked into
// branches. The gap is scanned on a lambda/50 grid and each local maximum is
// refined by golden-section search.
ModeChart resonance_dispersion(const HybridCavity &cavity, const SweepRange &wavelengths_nm,
                               const SweepRange &air_gap_nm);

// Resonant air-gap lengths at a single wavelength, ascending.
std::vector<double> resonant_gaps(const HybridCavity &cavity, double wavelength_nm, double gap_min_nm,
                                  double gap_max_nm);
} // namespace fpcavity::cavity
