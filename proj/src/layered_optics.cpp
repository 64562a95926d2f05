#include "fpcavity/layered_optics.hpp"

#include "fpcavity/constants.hpp"
#include "fpcavity/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fpcavity::optics
{
namespace
{
constexpr std::size_t kMaxDbrPairs = 60;

// Left-edge amplitudes of the forward and backward waves in one layer,
// normalized to a unit incident amplitude.
struct LayerField
{
    Complex forward{};
    Complex backward{};
    Complex wavenumber{};  // 1/nm
    Complex index{};
    double start_nm = 0.0;
    double thickness_nm = 0.0;

    Complex at(double z_nm) const
    {
        const Complex phase = Complex(0.0, 1.0) * wavenumber * (z_nm - start_nm);
        return forward * std::exp(phase) + backward * std::exp(-phase);
    }
};

void require_wavelength(double wavelength_nm)
{
    if (!(wavelength_nm > 0.0) || !std::isfinite(wavelength_nm))
    {
        throw ValidationError("wavelength must be positive and finite");
    }
}

std::vector<LayerField> solve_fields(const LayerStack &stack, double wavelength_nm)
{
    stack.validate();
    require_wavelength(wavelength_nm);

    const std::size_t n = stack.size();
    const double k0 = 2.0 * constants::kPi / wavelength_nm;
    std::vector<LayerField> fields(n);
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j)
    {
        const OpticalLayer &layer = stack.layers[j];
        fields[j].index = layer.index_at(wavelength_nm);
        fields[j].wavenumber = k0 * fields[j].index;
        fields[j].start_nm = z;
        fields[j].thickness_nm = layer.semi_infinite ? 0.0 : layer.thickness_nm;
        if (j > 0)
        {
            z += fields[j].thickness_nm;
        }
    }

    // Back-propagate from a unit transmitted wave using continuity of E and
    // of n*(a - b), which is proportional to the tangential H field.
    fields[n - 1].forward = 1.0;
    fields[n - 1].backward = 0.0;
    for (std::size_t j = n - 1; j-- > 0;)
    {
        const LayerField &next = fields[j + 1];
        const Complex e = next.forward + next.backward;
        const Complex h = next.index * (next.forward - next.backward);
        const Complex right_forward = 0.5 * (e + h / fields[j].index);
        const Complex right_backward = 0.5 * (e - h / fields[j].index);
        if (j == 0)
        {
            fields[j].forward = right_forward;
            fields[j].backward = right_backward;
        }
        else
        {
            const Complex phase = Complex(0.0, 1.0) * fields[j].wavenumber * fields[j].thickness_nm;
            fields[j].forward = right_forward * std::exp(-phase);
            fields[j].backward = right_backward * std::exp(phase);
        }
    }

    const Complex incident = fields[0].forward;
    for (LayerField &f : fields)
    {
        f.forward /= incident;
        f.backward /= incident;
    }
    return fields;
}

// Closed-form integral of |a e^{ikz} + b e^{-ikz}|^2 over [0, d].
double intensity_integral(const LayerField &f)
{
    const double d = f.thickness_nm;
    const double kr = f.wavenumber.real();
    const double ki = f.wavenumber.imag();

    auto grow = [d](double s) {
        const double x = s * d;
        return std::abs(x) < 1e-14 ? d : std::expm1(x) / s;
    };
    const double theta = kr * d;
    const double sinc = std::abs(theta) < 1e-8 ? 1.0 : std::sin(theta) / theta;
    const Complex oscillating = d * std::exp(Complex(0.0, theta)) * sinc;

    return std::norm(f.forward) * grow(-2.0 * ki) + std::norm(f.backward) * grow(2.0 * ki) +
           2.0 * (f.forward * std::conj(f.backward) * oscillating).real();
}

double trapezoid(std::span<const double> x, std::span<const double> y)
{
    double sum = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i)
    {
        sum += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    }
    return sum;
}

double interpolate(std::span<const double> x, std::span<const double> y, double at)
{
    const auto it = std::lower_bound(x.begin(), x.end(), at);
    if (it == x.begin())
    {
        return y.front();
    }
    if (it == x.end())
    {
        return y.back();
    }
    const std::size_t i = static_cast<std::size_t>(it - x.begin());
    const double w = (at - x[i - 1]) / (x[i] - x[i - 1]);
    return y[i - 1] + w * (y[i] - y[i - 1]);
}

void check_index(const Complex &n, std::size_t layer)
{
    if (!std::isfinite(n.real()) || !std::isfinite(n.imag()) || n.real() < 1.0 || n.imag() < 0.0)
    {
        std::ostringstream msg;
        msg << "layer " << layer << ": refractive index " << n.real() << "+" << n.imag()
            << "i outside Re(n) >= 1, Im(n) >= 0";
        throw ValidationError(msg.str());
    }
}
} // namespace

Complex OpticalLayer::index_at(double wavelength_nm) const
{
    if (dispersion.empty())
    {
        return index;
    }
    if (wavelength_nm <= dispersion.front().wavelength_nm)
    {
        return dispersion.front().index;
    }
    if (wavelength_nm >= dispersion.back().wavelength_nm)
    {
        return dispersion.back().index;
    }
    const auto it = std::lower_bound(dispersion.begin(), dispersion.end(), wavelength_nm,
                                     [](const IndexSample &s, double w) { return s.wavelength_nm < w; });
    const IndexSample &hi = *it;
    const IndexSample &lo = *(it - 1);
    const double w = (wavelength_nm - lo.wavelength_nm) / (hi.wavelength_nm - lo.wavelength_nm);
    return lo.index + w * (hi.index - lo.index);
}

void LayerStack::validate() const
{
    if (layers.size() < 2)
    {
        throw ValidationError("layer stack needs at least two layers (incidence and exit media)");
    }
    for (std::size_t j = 0; j < layers.size(); ++j)
    {
        const OpticalLayer &layer = layers[j];
        const bool boundary = (j == 0 || j + 1 == layers.size());
        if (boundary != layer.semi_infinite)
        {
            throw ValidationError(boundary ? "first and last layers must be semi-infinite"
                                           : "only the first and last layers may be semi-infinite");
        }
        if (!boundary && !(layer.thickness_nm > 0.0 && std::isfinite(layer.thickness_nm)))
        {
            std::ostringstream msg;
            msg << "layer " << j << ": thickness must be finite and > 0 nm (got " << layer.thickness_nm << ")";
            throw ValidationError(msg.str());
        }
        check_index(layer.index, j);
        for (const IndexSample &s : layer.dispersion)
        {
            check_index(s.index, j);
        }
        for (std::size_t k = 1; k < layer.dispersion.size(); ++k)
        {
            if (!(layer.dispersion[k].wavelength_nm > layer.dispersion[k - 1].wavelength_nm))
            {
                throw ValidationError("dispersion table wavelengths must be strictly increasing");
            }
        }
        if (boundary)
        {
            bool lossy = layer.index.imag() != 0.0;
            for (const IndexSample &s : layer.dispersion)
            {
                lossy = lossy || s.index.imag() != 0.0;
            }
            if (lossy)
            {
                throw ValidationError("boundary media must be lossless");
            }
        }
    }
}

double LayerStack::interior_thickness_nm() const
{
    double total = 0.0;
    for (std::size_t j = 1; j + 1 < layers.size(); ++j)
    {
        total += layers[j].thickness_nm;
    }
    return total;
}

double LayerStack::interface_position_nm(std::size_t interface) const
{
    if (interface < 1 || interface >= layers.size())
    {
        throw ValidationError("interface index out of range");
    }
    double z = 0.0;
    for (std::size_t j = 1; j < interface; ++j)
    {
        z += layers[j].thickness_nm;
    }
    return z;
}

Response stack_response(const LayerStack &stack, double wavelength_nm)
{
    const std::vector<LayerField> fields = solve_fields(stack, wavelength_nm);
    const double k0 = 2.0 * constants::kPi / wavelength_nm;
    const double n_in = fields.front().index.real();

    Response out;
    out.r = fields.front().backward;
    out.t = fields.back().forward;
    out.reflectance = std::norm(out.r);
    out.transmittance = fields.back().index.real() / n_in * std::norm(out.t);

    double absorbed = 0.0;
    for (std::size_t j = 1; j + 1 < fields.size(); ++j)
    {
        const double loss = (fields[j].index * fields[j].index).imag();
        if (loss != 0.0)
        {
            absorbed += k0 * loss * intensity_integral(fields[j]);
        }
    }
    out.absorptance = absorbed / n_in;
    return out;
}

SpectralResponse stack_spectrum(const LayerStack &stack, std::span<const double> wavelengths_nm)
{
    SpectralResponse out;
    out.reserve(wavelengths_nm.size());
    for (double w : wavelengths_nm)
    {
        const Response r = stack_response(stack, w);
        out.push_back({w, r.reflectance, r.transmittance, r.absorptance});
    }
    return out;
}

std::vector<double> layer_intensity_integrals(const LayerStack &stack, double wavelength_nm)
{
    const std::vector<LayerField> fields = solve_fields(stack, wavelength_nm);
    std::vector<double> out(fields.size(), 0.0);
    for (std::size_t j = 1; j + 1 < fields.size(); ++j)
    {
        out[j] = intensity_integral(fields[j]);
    }
    return out;
}

LayerStack design_quarter_wave_dbr(double n_high, double n_low, double n_substrate, double design_wavelength_nm,
                                   double target_transmission, double n_incident)
{
    if (!(n_high > n_low) || n_low < 1.0 || n_substrate < 1.0 || n_incident < 1.0)
    {
        throw ValidationError("quarter-wave design needs n_high > n_low >= 1 and boundary indices >= 1");
    }
    require_wavelength(design_wavelength_nm);
    if (!(target_transmission > 0.0 && target_transmission <= 1.0))
    {
        throw ValidationError("target transmission must lie in (0, 1]");
    }

    double best = 1.0;
    for (std::size_t pairs = 0; pairs <= kMaxDbrPairs; ++pairs)
    {
        LayerStack stack;
        stack.layers.push_back(OpticalLayer::boundary(n_incident));
        for (std::size_t p = 0; p < pairs; ++p)
        {
            stack.layers.push_back(OpticalLayer::film(n_high, design_wavelength_nm / (4.0 * n_high)));
            stack.layers.push_back(OpticalLayer::film(n_low, design_wavelength_nm / (4.0 * n_low)));
        }
        stack.layers.push_back(OpticalLayer::boundary(n_substrate));
        std::ostringstream label;
        label << "quarter-wave DBR, " << pairs << " pairs @ " << design_wavelength_nm << " nm";
        stack.label = label.str();

        const double t = stack_response(stack, design_wavelength_nm).transmittance;
        best = std::min(best, t);
        if (t <= target_transmission)
        {
            return stack;
        }
    }
    std::ostringstream msg;
    msg << "target transmission " << target_transmission << " unreachable within " << kMaxDbrPairs
        << " pairs; minimum achieved T = " << best;
    throw ValidationError(msg.str());
}

std::size_t quarter_wave_pair_count(const LayerStack &stack) { return stack.size() < 2 ? 0 : (stack.size() - 2) / 2; }

FieldProfile field_profile(const LayerStack &stack, double wavelength_nm, double grid_step_nm, DepthFrame frame,
                           double outer_margin_nm)
{
    const std::vector<LayerField> fields = solve_fields(stack, wavelength_nm);
    if (!(grid_step_nm > 0.0) || grid_step_nm > 5.0)
    {
        throw ValidationError("field grid step must satisfy 0 < step <= 5 nm");
    }
    double thinnest = std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j + 1 < fields.size(); ++j)
    {
        thinnest = std::min(thinnest, fields[j].thickness_nm);
    }
    if (grid_step_nm > thinnest / 4.0)
    {
        std::ostringstream msg;
        msg << "field grid step " << grid_step_nm << " nm is coarser than a quarter of the thinnest layer ("
            << thinnest << " nm)";
        throw ValidationError(msg.str());
    }
    if (outer_margin_nm < 0.0)
    {
        throw ValidationError("outer margin must be non-negative");
    }
    const double z_ref = stack.interface_position_nm(frame.interface);

    struct Region
    {
        std::size_t layer;
        double start;
        double length;
    };
    std::vector<Region> regions;
    if (outer_margin_nm > 0.0)
    {
        regions.push_back({0, -outer_margin_nm, outer_margin_nm});
    }
    for (std::size_t j = 1; j + 1 < fields.size(); ++j)
    {
        regions.push_back({j, fields[j].start_nm, fields[j].thickness_nm});
    }
    if (outer_margin_nm > 0.0)
    {
        regions.push_back({fields.size() - 1, fields.back().start_nm, outer_margin_nm});
    }
    if (regions.empty())
    {
        throw ValidationError("nothing to sample: stack has no interior layers and no outer margin");
    }

    FieldProfile out;
    auto push = [&](std::size_t layer, double z) {
        out.depth_nm.push_back(frame.toward_incidence ? z_ref - z : z - z_ref);
        out.intensity.push_back(std::norm(fields[layer].at(z)));
    };
    for (const Region &r : regions)
    {
        const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(r.length / grid_step_nm)));
        for (std::size_t i = 0; i < steps; ++i)
        {
            push(r.layer, r.start + r.length * static_cast<double>(i) / static_cast<double>(steps));
        }
    }
    push(regions.back().layer, regions.back().start + regions.back().length);

    const double peak = *std::max_element(out.intensity.begin(), out.intensity.end());
    if (!(peak > 0.0))
    {
        throw ValidationError("field intensity vanishes everywhere on the grid");
    }
    for (double &v : out.intensity)
    {
        v /= peak;
    }
    if (frame.toward_incidence)
    {
        std::reverse(out.depth_nm.begin(), out.depth_nm.end());
        std::reverse(out.intensity.begin(), out.intensity.end());
    }
    return out;
}

FieldProfile clip_profile(const FieldProfile &profile, double min_depth_nm, double max_depth_nm)
{
    FieldProfile out;
    for (std::size_t i = 0; i < profile.depth_nm.size(); ++i)
    {
        if (profile.depth_nm[i] >= min_depth_nm && profile.depth_nm[i] <= max_depth_nm)
        {
            out.depth_nm.push_back(profile.depth_nm[i]);
            out.intensity.push_back(profile.intensity[i]);
        }
    }
    if (out.depth_nm.size() < 2)
    {
        throw ValidationError("clip window keeps fewer than two profile samples");
    }
    const double peak = *std::max_element(out.intensity.begin(), out.intensity.end());
    if (!(peak > 0.0))
    {
        throw ValidationError("clipped profile has zero intensity");
    }
    for (double &v : out.intensity)
    {
        v /= peak;
    }
    return out;
}

std::vector<InterfaceIntensity> interface_intensities(const LayerStack &stack, double wavelength_nm)
{
    const std::vector<LayerField> fields = solve_fields(stack, wavelength_nm);
    std::vector<InterfaceIntensity> out;
    for (std::size_t k = 1; k < fields.size(); ++k)
    {
        const LayerField &left = fields[k - 1];
        const double z = fields[k].start_nm;
        out.push_back({std::norm(left.at(z)), std::norm(fields[k].at(z))});
    }
    return out;
}

void DepthDistribution::validate() const
{
    if (depth_nm.size() != density.size() || depth_nm.size() < 2)
    {
        throw ValidationError("depth distribution needs >= 2 samples with matching lengths");
    }
    for (std::size_t i = 0; i < depth_nm.size(); ++i)
    {
        if (!std::isfinite(density[i]) || density[i] < 0.0)
        {
            throw ValidationError("depth density must be finite and non-negative");
        }
        if (i > 0 && !(depth_nm[i] > depth_nm[i - 1]))
        {
            throw ValidationError("depth grid must be strictly increasing");
        }
    }
    const double area = trapezoid(depth_nm, density);
    if (std::abs(area - 1.0) > 1e-6)
    {
        std::ostringstream msg;
        msg << "depth density integrates to " << area << ", expected 1";
        throw ValidationError(msg.str());
    }
}

DepthDistribution uniform_depth_distribution(double min_depth_nm, double max_depth_nm, double step_nm)
{
    if (!(max_depth_nm > min_depth_nm) || !(step_nm > 0.0))
    {
        throw ValidationError("uniform depth distribution needs min < max and step > 0");
    }
    const double width = max_depth_nm - min_depth_nm;
    const auto n = static_cast<std::size_t>(std::ceil(width / step_nm));
    DepthDistribution out;
    for (std::size_t i = 0; i <= n; ++i)
    {
        out.depth_nm.push_back(min_depth_nm + width * static_cast<double>(i) / static_cast<double>(n));
        out.density.push_back(1.0 / width);
    }
    return out;
}

DepthDistribution gaussian_depth_distribution(double mean_nm, double sigma_nm, double step_nm, double half_width_sigmas)
{
    if (!(sigma_nm > 0.0) || !(step_nm > 0.0) || !(half_width_sigmas > 0.0))
    {
        throw ValidationError("gaussian depth distribution needs sigma, step and width > 0");
    }
    const double lo = mean_nm - half_width_sigmas * sigma_nm;
    const double width = 2.0 * half_width_sigmas * sigma_nm;
    const auto n = static_cast<std::size_t>(std::ceil(width / step_nm));
    std::vector<double> depth;
    std::vector<double> density;
    for (std::size_t i = 0; i <= n; ++i)
    {
        const double z = lo + width * static_cast<double>(i) / static_cast<double>(n);
        const double u = (z - mean_nm) / sigma_nm;
        depth.push_back(z);
        density.push_back(std::exp(-0.5 * u * u));
    }
    return normalized_depth_distribution(std::move(depth), std::move(density));
}

DepthDistribution normalized_depth_distribution(std::vector<double> depth_nm, std::vector<double> density)
{
    const double area = trapezoid(depth_nm, density);
    if (!(area > 0.0))
    {
        throw ValidationError("depth density has no positive area");
    }
    for (double &d : density)
    {
        d /= area;
    }
    DepthDistribution out{std::move(depth_nm), std::move(density)};
    out.validate();
    return out;
}

OverlapResult field_overlap(const FieldProfile &profile, const DepthDistribution &ions)
{
    ions.validate();
    if (profile.depth_nm.size() < 2 || profile.depth_nm.size() != profile.intensity.size())
    {
        throw ValidationError("field profile needs >= 2 samples");
    }
    const double p_lo = profile.depth_nm.front();
    const double p_hi = profile.depth_nm.back();

    std::size_t first = ions.density.size();
    std::size_t last = 0;
    for (std::size_t i = 0; i < ions.density.size(); ++i)
    {
        if (ions.density[i] > 0.0)
        {
            first = std::min(first, i);
            last = i;
        }
    }
    if (ions.depth_nm[last] < p_lo || ions.depth_nm[first] > p_hi)
    {
        throw ValidationError("ion distribution and field profile do not overlap in depth");
    }

    std::vector<double> product(ions.depth_nm.size(), 0.0);
    for (std::size_t i = 0; i < product.size(); ++i)
    {
        const double z = ions.depth_nm[i];
        if (z >= p_lo && z <= p_hi)
        {
            product[i] = ions.density[i] * interpolate(profile.depth_nm, profile.intensity, z);
        }
    }

    const auto peak_it = std::max_element(ions.density.begin(), ions.density.end());
    const double peak = *peak_it;
    std::size_t lo = static_cast<std::size_t>(peak_it - ions.density.begin());
    std::size_t hi = lo;
    while (lo > 0 && ions.density[lo - 1] >= peak * (1.0 - 1e-12))
    {
        --lo;
    }
    while (hi + 1 < ions.density.size() && ions.density[hi + 1] >= peak * (1.0 - 1e-12))
    {
        ++hi;
    }

    OverlapResult out;
    out.overlap = trapezoid(ions.depth_nm, product);
    out.mode_depth_nm = 0.5 * (ions.depth_nm[lo] + ions.depth_nm[hi]);
    out.mode_intensity = interpolate(profile.depth_nm, profile.intensity, out.mode_depth_nm);
    return out;
}
} // namespace fpcavity::optics
