#pragma once

// Normal-incidence transfer-matrix optics for planar layer stacks.
//
// Convention: fields vary as exp(-i w t), so an absorbing medium has a
// refractive index with non-negative imaginary part. Layer 0 is the incidence
// medium and the last layer is the exit medium; both are semi-infinite and
// must be lossless. Thicknesses and wavelengths are in nanometres.

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fpcavity::optics
{
using Complex = std::complex<double>;

struct IndexSample
{
    double wavelength_nm = 0.0;
    Complex index{1.0, 0.0};
};

struct OpticalLayer
{
    Complex index{1.0, 0.0};
    double thickness_nm = 0.0;
    bool semi_infinite = false;
    // Optional tabulated n(lambda), sorted by wavelength; linearly
    // interpolated and clamped at the ends. Empty means constant `index`.
    std::vector<IndexSample> dispersion;

    Complex index_at(double wavelength_nm) const;

    static OpticalLayer boundary(Complex index) { return {index, 0.0, true, {}}; }
    static OpticalLayer film(Complex index, double thickness_nm) { return {index, thickness_nm, false, {}}; }
};

struct LayerStack
{
    std::vector<OpticalLayer> layers;
    std::string label;

    // Throws ValidationError: fewer than 2 layers, boundaries not flagged
    // semi-infinite, interior thickness not finite and > 0, Re(n) < 1,
    // Im(n) < 0, or lossy boundary media.
    void validate() const;

    std::size_t size() const { return layers.size(); }
    double interior_thickness_nm() const;
    // z coordinate of interface k (between layers k-1 and k); interface 1 is z = 0.
    double interface_position_nm(std::size_t interface) const;
};

struct Response
{
    double reflectance = 0.0;
    double transmittance = 0.0;
    double absorptance = 0.0;
    Complex r{};
    Complex t{};
};

struct SpectralPoint
{
    double wavelength_nm = 0.0;
    double reflectance = 0.0;
    double transmittance = 0.0;
    double absorptance = 0.0;
};

using SpectralResponse = std::vector<SpectralPoint>;

// R, T and A at one wavelength. A is accumulated from the field absorbed in
// each lossy layer rather than taken as 1 - R - T.
Response stack_response(const LayerStack &stack, double wavelength_nm);

SpectralResponse stack_spectrum(const LayerStack &stack, std::span<const double> wavelengths_nm);

// Per-layer integral of |E|^2 over the layer thickness (nm), with the incident
// amplitude normalized to 1. Boundary layers report 0.
std::vector<double> layer_intensity_integrals(const LayerStack &stack, double wavelength_nm);

// Smallest number of (high, low) quarter-wave pairs between an incidence
// medium and the substrate whose transmission at the design wavelength is at
// most `target_transmission`. The high-index layer faces the incidence medium.
LayerStack design_quarter_wave_dbr(double n_high, double n_low, double n_substrate, double design_wavelength_nm,
                                   double target_transmission, double n_incident = 1.0);

// Number of pairs used by a stack produced by design_quarter_wave_dbr.
std::size_t quarter_wave_pair_count(const LayerStack &stack);

// Depth axis for field profiles: depth 0 sits at `interface`, and depth grows
// toward the incidence side when `toward_incidence` is set.
struct DepthFrame
{
    std::size_t interface = 1;
    bool toward_incidence = false;
};

struct FieldProfile
{
    std::vector<double> depth_nm;
    std::vector<double> intensity;  // normalized to a peak of 1
};

// |E|^2 sampled through all interior layers (plus `outer_margin_nm` into each
// boundary medium) with spacing at most `grid_step_nm`. The grid must satisfy
// 0 < step <= 5 nm and step <= thinnest interior layer / 4.
FieldProfile field_profile(const LayerStack &stack, double wavelength_nm, double grid_step_nm, DepthFrame frame = {},
                           double outer_margin_nm = 0.0);

// Keeps the samples with min <= depth <= max and renormalizes to peak 1.
FieldProfile clip_profile(const FieldProfile &profile, double min_depth_nm, double max_depth_nm);

// |E|^2 on either side of every interior interface, from the layer amplitudes.
struct InterfaceIntensity
{
    double left = 0.0;
    double right = 0.0;
};
std::vector<InterfaceIntensity> interface_intensities(const LayerStack &stack, double wavelength_nm);

struct DepthDistribution
{
    std::vector<double> depth_nm;
    std::vector<double> density;  // 1/nm

    // Non-negative, strictly increasing depth, trapezoid integral 1 +- 1e-6.
    void validate() const;
};

DepthDistribution uniform_depth_distribution(double min_depth_nm, double max_depth_nm, double step_nm);
DepthDistribution gaussian_depth_distribution(double mean_nm, double sigma_nm, double step_nm,
                                              double half_width_sigmas = 6.0);
// Rescales tabulated densities (e.g. an ion-range histogram) to unit area.
DepthDistribution normalized_depth_distribution(std::vector<double> depth_nm, std::vector<double> density);

struct OverlapResult
{
    double overlap = 0.0;          // integral of density * normalized intensity
    double mode_depth_nm = 0.0;    // depth of maximum density (centre of a plateau)
    double mode_intensity = 0.0;   // normalized intensity at that depth
};

OverlapResult field_overlap(const FieldProfile &profile, const DepthDistribution &ions);
} // namespace fpcavity::optics
