#include "fpcavity/scan_analysis.hpp"

#include "fpcavity/constants.hpp"
#include "fpcavity/errors.hpp"
#include "fpcavity/least_squares.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <cmath>
#include <numeric>
#include <sstream>

namespace fpcavity::scan
{
namespace
{
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kFwhmPerSigma = 2.3548200450309493;  // 2 sqrt(2 ln 2)

double median(std::vector<double> v)
{
    if (v.empty())
    {
        throw ValidationError("median of an empty set");
    }
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    double m = v[mid];
    if (v.size() % 2 == 0)
    {
        m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
    }
    return m;
}

// Robust standard deviation from the median absolute deviation.
double mad_sigma(const std::vector<double> &v)
{
    const double m = median(v);
    std::vector<double> dev;
    dev.reserve(v.size());
    for (double x : v)
    {
        dev.push_back(std::abs(x - m));
    }
    return 1.4826 * median(dev);
}

double sign_of(Channel c) { return c == Channel::kReflection ? -1.0 : 1.0; }

struct Samples
{
    std::vector<double> x;
    std::vector<double> y;
};

Samples select(const ScanTrace &trace, std::optional<Window> window, double sign)
{
    Samples s;
    for (std::size_t i = 0; i < trace.abscissa.size(); ++i)
    {
        const double x = trace.abscissa[i];
        if (!window || (x >= window->lo && x <= window->hi))
        {
            s.x.push_back(x);
            s.y.push_back(sign * trace.ordinate[i]);
        }
    }
    return s;
}

// Offset from the median of the outer quartiles of the window.
double outer_quartile_median(const std::vector<double> &y)
{
    const std::size_t q = std::max<std::size_t>(1, y.size() / 4);
    std::vector<double> outer(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(q));
    outer.insert(outer.end(), y.end() - static_cast<std::ptrdiff_t>(q), y.end());
    return median(outer);
}

// Width between the half-height crossings around `peak`, linearly
// interpolated. Falls back to twice the one-sided width when only one side
// crosses.
double half_height_span(const std::vector<double> &x, const std::vector<double> &y, std::size_t peak, double baseline)
{
    const double half = baseline + 0.5 * (y[peak] - baseline);
    std::optional<double> left;
    std::optional<double> right;
    for (std::size_t i = peak; i-- > 0;)
    {
        if (y[i] < half)
        {
            const double w = (half - y[i]) / (y[i + 1] - y[i]);
            left = x[i] + w * (x[i + 1] - x[i]);
            break;
        }
    }
    for (std::size_t i = peak + 1; i < y.size(); ++i)
    {
        if (y[i] < half)
        {
            const double w = (half - y[i]) / (y[i - 1] - y[i]);
            right = x[i] + w * (x[i - 1] - x[i]);
            break;
        }
    }
    if (left && right)
    {
        return *right - *left;
    }
    if (left)
    {
        return 2.0 * (x[peak] - *left);
    }
    if (right)
    {
        return 2.0 * (*right - x[peak]);
    }
    return (x.back() - x.front()) / 4.0;
}

// params: amplitude, center, fwhm, offset
fit::ResidualFn lorentzian_residuals(const Samples &s)
{
    return [&s](const VectorXd &p, VectorXd &r, MatrixXd &j) {
        const double a = p[0];
        const double c = p[1];
        const double w = p[2];
        if (!(w > 0.0))
        {
            return false;
        }
        for (Eigen::Index i = 0; i < r.size(); ++i)
        {
            const double u = 2.0 * (s.x[static_cast<std::size_t>(i)] - c) / w;
            const double d = 1.0 + u * u;
            r[i] = a / d + p[3] - s.y[static_cast<std::size_t>(i)];
            j(i, 0) = 1.0 / d;
            j(i, 1) = a * 4.0 * u / (w * d * d);
            j(i, 2) = a * 2.0 * u * u / (w * d * d);
            j(i, 3) = 1.0;
        }
        return true;
    };
}

double param_err(const fit::LmResult &res, Eigen::Index k) { return std::sqrt(std::max(0.0, res.covariance(k, k))); }

// Largest sample and its index.
std::size_t argmax(const std::vector<double> &y)
{
    return static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
}
} // namespace

std::string to_string(Channel c)
{
    switch (c)
    {
    case Channel::kReflection:
        return "reflection";
    case Channel::kFluorescence:
        return "fluorescence";
    case Channel::kTransmission:
        break;
    }
    return "transmission";
}

Channel channel_from_string(const std::string &s)
{
    if (s == "reflection")
    {
        return Channel::kReflection;
    }
    if (s == "transmission")
    {
        return Channel::kTransmission;
    }
    if (s == "fluorescence")
    {
        return Channel::kFluorescence;
    }
    throw ValidationError("unknown channel '" + s + "' (expected reflection, transmission or fluorescence)");
}

void ScanTrace::validate() const
{
    if (abscissa.size() != ordinate.size())
    {
        throw ValidationError("abscissa and ordinate lengths differ");
    }
    if (abscissa.size() < 16)
    {
        throw ValidationError("scan trace needs at least 16 samples");
    }
    const bool increasing = abscissa[1] > abscissa[0];
    for (std::size_t i = 0; i < abscissa.size(); ++i)
    {
        if (!std::isfinite(abscissa[i]) || !std::isfinite(ordinate[i]))
        {
            throw ValidationError("scan trace contains non-finite values");
        }
        if (i > 0 && (increasing ? !(abscissa[i] > abscissa[i - 1]) : !(abscissa[i] < abscissa[i - 1])))
        {
            throw ValidationError("scan abscissa must be strictly monotone");
        }
    }
}

ScanTrace ScanTrace::ascending() const
{
    validate();
    ScanTrace out = *this;
    if (out.abscissa.front() > out.abscissa.back())
    {
        std::reverse(out.abscissa.begin(), out.abscissa.end());
        std::reverse(out.ordinate.begin(), out.ordinate.end());
    }
    return out;
}

ResonanceFit fit_lorentzian(const ScanTrace &trace, std::optional<Window> window)
{
    const ScanTrace sorted = trace.ascending();
    const double sign = sign_of(trace.meta.channel);
    const Samples s = select(sorted, window, sign);
    if (s.x.size() < 8)
    {
        throw ValidationError("fit window holds fewer than 8 samples");
    }

    const double offset0 = outer_quartile_median(s.y);
    const std::size_t peak = argmax(s.y);
    const double amp0 = s.y[peak] - offset0;
    const std::size_t q = std::max<std::size_t>(1, s.y.size() / 4);
    std::vector<double> outer(s.y.begin(), s.y.begin() + static_cast<std::ptrdiff_t>(q));
    outer.insert(outer.end(), s.y.end() - static_cast<std::ptrdiff_t>(q), s.y.end());
    const double noise = mad_sigma(outer);
    if (!(amp0 > 0.0) || amp0 <= 5.0 * noise)
    {
        std::ostringstream msg;
        msg << "no resonance in window: peak height " << amp0 << " vs noise " << noise;
        throw FitError(msg.str(), 0.0, 0);
    }
    const double fwhm0 = half_height_span(s.x, s.y, peak, offset0);

    VectorXd p0(4);
    p0 << amp0, s.x[peak], fwhm0, offset0;
    const fit::LmResult res = fit::levenberg_marquardt(lorentzian_residuals(s), p0, s.x.size());
    if (!res.converged)
    {
        std::ostringstream msg;
        msg << "Lorentzian fit did not converge after " << res.iterations << " iterations (residual cost "
            << res.cost << ")";
        throw FitError(msg.str(), std::sqrt(2.0 * res.cost), res.iterations);
    }

    ResonanceFit out;
    out.amplitude = sign * res.params[0];
    out.center = res.params[1];
    out.fwhm = res.params[2];
    out.offset = sign * res.params[3];
    out.amplitude_err = param_err(res, 0);
    out.center_err = param_err(res, 1);
    out.fwhm_err = param_err(res, 2);
    out.offset_err = param_err(res, 3);
    out.reduced_chi2 = res.reduced_chi2;
    out.iterations = res.iterations;

    if (out.center < s.x.front() || out.center > s.x.back() || !(res.params[0] > 0.0))
    {
        throw FitError("Lorentzian fit left the window", std::sqrt(2.0 * res.cost), res.iterations);
    }
    for (std::size_t i = 0; i < s.x.size(); ++i)
    {
        if (std::abs(s.x[i] - out.center) > 3.0 * out.fwhm && s.y[i] - res.params[3] > 0.5 * res.params[0])
        {
            std::ostringstream msg;
            msg << "window holds a second peak near " << s.x[i] << "; fitted the dominant one at " << out.center;
            out.warnings.push_back(msg.str());
            break;
        }
    }
    return out;
}

FinesseResult extract_finesse(const ScanTrace &trace, double wavelength_nm)
{
    if (!(wavelength_nm > 0.0))
    {
        throw ValidationError("wavelength must be positive");
    }
    const ScanTrace sorted = trace.ascending();
    const double sign = sign_of(trace.meta.channel);
    const Samples s = select(sorted, std::nullopt, sign);
    const double baseline = median(s.y);
    const double span_total = s.x.back() - s.x.front();

    struct Zone
    {
        double lo;
        double hi;
    };
    std::vector<Zone> excluded;
    auto next_peak = [&]() -> std::optional<std::size_t> {
        std::optional<std::size_t> best;
        for (std::size_t i = 0; i < s.y.size(); ++i)
        {
            const bool blocked = std::any_of(excluded.begin(), excluded.end(),
                                              [&](const Zone &z) { return s.x[i] >= z.lo && s.x[i] <= z.hi; });
            if (!blocked && (!best || s.y[i] > s.y[*best]))
            {
                best = i;
            }
        }
        return best;
    };
    auto exclude = [&](std::size_t i) {
        const double width = half_height_span(s.x, s.y, i, baseline);
        const double half = std::max(10.0 * width, 0.02 * span_total);
        excluded.push_back({s.x[i] - half, s.x[i] + half});
        return width;
    };

    const auto p1 = next_peak();
    const double h1 = s.y[*p1] - baseline;
    if (!(h1 > 0.0))
    {
        throw FitError("no resonance found in the length scan; adjust the scan window");
    }
    const double w1 = exclude(*p1);
    const auto p2 = next_peak();
    if (!p2 || s.y[*p2] - baseline < 0.5 * h1)
    {
        throw FitError("found fewer than two dominant resonances; widen the scan window to cover two");
    }
    const double w2 = exclude(*p2);
    const auto p3 = next_peak();
    if (p3 && s.y[*p3] - baseline >= 0.5 * h1)
    {
        std::ostringstream msg;
        msg << "found more than two dominant resonances (third near " << s.x[*p3]
            << "); narrow the scan window to two";
        throw FitError(msg.str());
    }

    std::array<std::size_t, 2> peaks{*p1, *p2};
    std::array<double, 2> widths{w1, w2};
    if (s.x[peaks[0]] > s.x[peaks[1]])
    {
        std::swap(peaks[0], peaks[1]);
        std::swap(widths[0], widths[1]);
    }
    const double separation = s.x[peaks[1]] - s.x[peaks[0]];
    std::array<ResonanceFit, 2> fits;
    for (std::size_t k = 0; k < 2; ++k)
    {
        const double half = std::min(0.5 * separation, 25.0 * widths[k]);
        fits[k] = fit_lorentzian(sorted, Window{s.x[peaks[k]] - half, s.x[peaks[k]] + half});
    }

    FinesseResult out;
    out.first = fits[0];
    out.second = fits[1];
    const double spacing = std::abs(fits[1].center - fits[0].center);
    const double mean_fwhm = 0.5 * (fits[0].fwhm + fits[1].fwhm);
    out.finesse = spacing / mean_fwhm;
    out.nm_per_unit = 0.5 * wavelength_nm / spacing;
    out.fwhm_nm = mean_fwhm * out.nm_per_unit;
    const double spacing_err = std::hypot(fits[0].center_err, fits[1].center_err);
    const double fwhm_err = 0.5 * std::hypot(fits[0].fwhm_err, fits[1].fwhm_err);
    out.finesse_err = out.finesse * std::hypot(spacing_err / spacing, fwhm_err / mean_fwhm);
    if (!(out.finesse > 1.0))
    {
        throw FitError("extracted finesse is not above 1");
    }
    return out;
}

double emitter_loss_ppm(double finesse_with_emitters, double finesse_reference)
{
    if (!(finesse_with_emitters > 1.0) || !(finesse_reference > 1.0))
    {
        throw ValidationError("finesse values must exceed 1");
    }
    if (finesse_with_emitters > finesse_reference)
    {
        throw ValidationError("emitter-reduced finesse exceeds the reference finesse (negative absorption)");
    }
    return constants::kPi * (1.0 / finesse_with_emitters - 1.0 / finesse_reference) * 1e6;
}

double ensemble_cross_section_cm2(double loss_ppm, double mode_area_um2)
{
    if (!(loss_ppm >= 0.0) || !(mode_area_um2 >= 0.0))
    {
        throw ValidationError("loss and mode area must be non-negative");
    }
    return loss_ppm * 1e-6 * mode_area_um2 * 1e-8;
}

double single_cross_section_cm2(double ensemble_cross_section_cm2, double emitter_count)
{
    if (!(emitter_count > 0.0))
    {
        throw ValidationError("emitter count must be positive");
    }
    return ensemble_cross_section_cm2 / emitter_count;
}

LifetimeFit fit_lifetime(const ScanTrace &trace, double pulse_end_ns, int guard_samples)
{
    if (guard_samples < 0)
    {
        throw ValidationError("guard interval must be non-negative");
    }
    const ScanTrace sorted = trace.ascending();
    std::vector<double> steps;
    for (std::size_t i = 1; i < sorted.abscissa.size(); ++i)
    {
        steps.push_back(sorted.abscissa[i] - sorted.abscissa[i - 1]);
    }
    const double dt = median(steps);
    const double start = pulse_end_ns + guard_samples * dt;
    const Samples s = select(sorted, Window{start, sorted.abscissa.back()}, 1.0);
    if (s.x.size() < 8)
    {
        throw ValidationError("fewer than 8 samples after the pulse end and guard interval");
    }
    const double t0 = s.x.front();

    const std::size_t tail = std::max<std::size_t>(3, s.y.size() / 10);
    const double background0 = median(std::vector<double>(s.y.end() - static_cast<std::ptrdiff_t>(tail), s.y.end()));
    const double top = *std::max_element(s.y.begin(), s.y.end()) - background0;
    if (!(top > 0.0))
    {
        throw FitError("no decay above background after the pulse");
    }

    // Log-linear regression over the upper half of the decay.
    std::vector<double> tx;
    std::vector<double> ly;
    for (std::size_t i = 0; i < s.x.size(); ++i)
    {
        const double v = s.y[i] - background0;
        if (v < 0.5 * top)
        {
            if (tx.size() >= 2)
            {
                break;
            }
            continue;
        }
        tx.push_back(s.x[i]);
        ly.push_back(std::log(v));
    }
    if (tx.size() < 2)
    {
        throw FitError("decay too short to initialize the lifetime");
    }
    const double mx = std::accumulate(tx.begin(), tx.end(), 0.0) / static_cast<double>(tx.size());
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(ly.size());
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < tx.size(); ++i)
    {
        sxy += (tx[i] - mx) * (ly[i] - my);
        sxx += (tx[i] - mx) * (tx[i] - mx);
    }
    const double slope = sxy / sxx;
    if (!(slope < 0.0))
    {
        throw FitError("trace does not decay after the pulse (non-negative log slope)");
    }
    const double tau0 = -1.0 / slope;
    const double amp0 = std::exp(my + slope * (t0 - mx));

    auto residuals = [&s, t0](const VectorXd &p, VectorXd &r, MatrixXd &j) {
        const double a = p[0];
        const double tau = p[1];
        if (!(tau > 0.0))
        {
            return false;
        }
        for (Eigen::Index i = 0; i < r.size(); ++i)
        {
            const double dtau = s.x[static_cast<std::size_t>(i)] - t0;
            const double e = std::exp(-dtau / tau);
            r[i] = a * e + p[2] - s.y[static_cast<std::size_t>(i)];
            j(i, 0) = e;
            j(i, 1) = a * e * dtau / (tau * tau);
            j(i, 2) = 1.0;
        }
        return true;
    };
    VectorXd p0(3);
    p0 << amp0, tau0, background0;
    const fit::LmResult res = fit::levenberg_marquardt(residuals, p0, s.x.size());
    if (!res.converged)
    {
        throw FitError("exponential fit did not converge", std::sqrt(2.0 * res.cost), res.iterations);
    }
    if (!(res.params[1] > 0.0) || !(res.params[0] > 0.0))
    {
        throw FitError("exponential fit returned a non-decaying solution", std::sqrt(2.0 * res.cost), res.iterations);
    }

    LifetimeFit out;
    out.amplitude = res.params[0];
    out.tau_ns = res.params[1];
    out.background = res.params[2];
    out.tau_err = param_err(res, 1);
    out.background_err = param_err(res, 2);
    out.fit_start_ns = t0;
    out.reduced_chi2 = res.reduced_chi2;
    if (s.x.back() - t0 < 3.0 * out.tau_ns)
    {
        out.warnings.push_back("fit window shorter than three lifetimes");
    }
    return out;
}

PleLineshape aggregate_ple(std::span<const PleScan> scans, double window_fwhm)
{
    if (!(window_fwhm > 0.0))
    {
        throw ValidationError("PLE window must be a positive number of cavity linewidths");
    }
    if (scans.empty())
    {
        throw ValidationError("no PLE scans given");
    }
    std::vector<const PleScan *> order;
    for (const PleScan &s : scans)
    {
        order.push_back(&s);
    }
    std::sort(order.begin(), order.end(),
              [](const PleScan *a, const PleScan *b) { return a->excitation_nm < b->excitation_nm; });

    std::vector<std::optional<ResonanceFit>> fits;
    std::vector<double> centers;
    std::vector<double> widths;
    for (const PleScan *s : order)
    {
        if (!(s->excitation_nm > 0.0))
        {
            throw ValidationError("PLE scan without a positive excitation wavelength");
        }
        ScanTrace fluor = s->trace;
        fluor.meta.channel = Channel::kFluorescence;
        try
        {
            const ResonanceFit f = fit_lorentzian(fluor);
            fits.emplace_back(f);
            centers.push_back(f.center);
            widths.push_back(f.fwhm);
        }
        catch (const FitError &)
        {
            fits.emplace_back(std::nullopt);
        }
    }
    if (centers.empty())
    {
        throw FitError("no cavity resonance found in any PLE scan");
    }
    const double fallback_center = median(centers);
    const double fallback_fwhm = median(widths);

    PleLineshape out;
    double reference = 0.0;
    for (const PleScan *s : order)
    {
        reference += constants::wavelength_nm_to_ghz(s->excitation_nm);
    }
    out.reference_ghz = reference / static_cast<double>(order.size());

    for (std::size_t k = 0; k < order.size(); ++k)
    {
        const double center = fits[k] ? fits[k]->center : fallback_center;
        const double fwhm = fits[k] ? fits[k]->fwhm : fallback_fwhm;
        const double half = window_fwhm * fwhm;
        double sum = 0.0;
        const ScanTrace &t = order[k]->trace;
        for (std::size_t i = 0; i < t.abscissa.size(); ++i)
        {
            if (std::abs(t.abscissa[i] - center) <= half)
            {
                sum += t.ordinate[i];
            }
        }
        out.excitation_nm.push_back(order[k]->excitation_nm);
        out.detuning_ghz.push_back(constants::wavelength_nm_to_ghz(order[k]->excitation_nm) - out.reference_ghz);
        out.summed_counts.push_back(sum);
        out.cavity_center.push_back(center);
        out.cavity_fwhm.push_back(fwhm);
    }
    const double peak = *std::max_element(out.summed_counts.begin(), out.summed_counts.end());
    for (double v : out.summed_counts)
    {
        out.normalized.push_back(peak > 0.0 ? v / peak : 0.0);
    }
    return out;
}

InhomogeneousFit fit_inhomogeneous_linewidth(const PleLineshape &shape)
{
    const std::size_t n = shape.detuning_ghz.size();
    if (n < 5 || shape.normalized.size() != n)
    {
        throw ValidationError("PLE lineshape needs at least 5 points");
    }
    Samples s;
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return shape.detuning_ghz[a] < shape.detuning_ghz[b]; });
    for (std::size_t i : idx)
    {
        s.x.push_back(shape.detuning_ghz[i]);
        s.y.push_back(shape.normalized[i]);
    }
    const std::size_t peak = argmax(s.y);
    const double base0 = *std::min_element(s.y.begin(), s.y.end());
    const double amp0 = s.y[peak] - base0;
    if (!(amp0 > 0.0))
    {
        throw FitError("PLE lineshape is flat");
    }
    const double sigma0 = half_height_span(s.x, s.y, peak, base0) / kFwhmPerSigma;

    auto residuals = [&s](const VectorXd &p, VectorXd &r, MatrixXd &j) {
        const double a = p[0];
        const double mu = p[1];
        const double sigma = p[2];
        if (!(sigma > 0.0))
        {
            return false;
        }
        for (Eigen::Index i = 0; i < r.size(); ++i)
        {
            const double d = s.x[static_cast<std::size_t>(i)] - mu;
            const double g = std::exp(-0.5 * d * d / (sigma * sigma));
            r[i] = a * g + p[3] - s.y[static_cast<std::size_t>(i)];
            j(i, 0) = g;
            j(i, 1) = a * g * d / (sigma * sigma);
            j(i, 2) = a * g * d * d / (sigma * sigma * sigma);
            j(i, 3) = 1.0;
        }
        return true;
    };
    VectorXd p0(4);
    p0 << amp0, s.x[peak], sigma0, base0;
    const fit::LmResult res = fit::levenberg_marquardt(residuals, p0, s.x.size());
    if (!res.converged || !(res.params[2] > 0.0))
    {
        throw FitError("Gaussian fit of the PLE lineshape did not converge", std::sqrt(2.0 * res.cost), res.iterations);
    }

    InhomogeneousFit out;
    out.amplitude = res.params[0];
    out.center_detuning_ghz = res.params[1];
    out.sigma_ghz = res.params[2];
    out.offset = res.params[3];
    out.fwhm_ghz = kFwhmPerSigma * out.sigma_ghz;
    out.center_nm = constants::ghz_to_wavelength_nm(shape.reference_ghz + out.center_detuning_ghz);
    out.fwhm_nm = out.center_nm * out.center_nm * out.fwhm_ghz / constants::kSpeedOfLightNmGhz;
    out.reduced_chi2 = res.reduced_chi2;
    return out;
}

FineStructureFit fit_fine_structure(std::span<const double> wavelengths_nm, std::span<const double> intensity)
{
    const std::size_t n = wavelengths_nm.size();
    if (n < 32 || intensity.size() != n)
    {
        throw ValidationError("fine-structure fit needs at least 32 spectrum samples");
    }
    // Work in GHz relative to the mean frequency, ascending.
    std::vector<std::pair<double, double>> pts;
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        if (!(wavelengths_nm[i] > 0.0))
        {
            throw ValidationError("spectrum wavelengths must be positive");
        }
        const double f = constants::wavelength_nm_to_ghz(wavelengths_nm[i]);
        pts.emplace_back(f, intensity[i]);
        mean += f;
    }
    mean /= static_cast<double>(n);
    std::sort(pts.begin(), pts.end());
    Samples s;
    for (const auto &[f, v] : pts)
    {
        s.x.push_back(f - mean);
        s.y.push_back(v);
    }

    const double baseline = median(s.y);
    const std::size_t top = argmax(s.y);
    const double width = half_height_span(s.x, s.y, top, baseline);

    std::vector<std::size_t> maxima;
    for (std::size_t i = 1; i + 1 < n; ++i)
    {
        if (s.y[i] > s.y[i - 1] && s.y[i] >= s.y[i + 1] && s.y[i] > baseline)
        {
            maxima.push_back(i);
        }
    }
    std::sort(maxima.begin(), maxima.end(), [&](std::size_t a, std::size_t b) { return s.y[a] > s.y[b]; });
    std::vector<std::size_t> chosen;
    for (std::size_t i : maxima)
    {
        const bool clear = std::all_of(chosen.begin(), chosen.end(),
                                       [&](std::size_t c) { return std::abs(s.x[c] - s.x[i]) > 2.0 * width; });
        if (clear)
        {
            chosen.push_back(i);
        }
        if (chosen.size() == 4)
        {
            break;
        }
    }
    if (chosen.size() < 4)
    {
        throw FitError("spectrum shows fewer than four resolvable lines");
    }

    auto residuals = [&s](const VectorXd &p, VectorXd &r, MatrixXd &j) {
        for (int k = 0; k < 4; ++k)
        {
            if (!(p[3 * k + 2] > 0.0))
            {
                return false;
            }
        }
        j.setZero();
        for (Eigen::Index i = 0; i < r.size(); ++i)
        {
            const double x = s.x[static_cast<std::size_t>(i)];
            double model = p[12];
            for (int k = 0; k < 4; ++k)
            {
                const double a = p[3 * k];
                const double c = p[3 * k + 1];
                const double w = p[3 * k + 2];
                const double u = 2.0 * (x - c) / w;
                const double d = 1.0 + u * u;
                model += a / d;
                j(i, 3 * k) = 1.0 / d;
                j(i, 3 * k + 1) = a * 4.0 * u / (w * d * d);
                j(i, 3 * k + 2) = a * 2.0 * u * u / (w * d * d);
            }
            j(i, 12) = 1.0;
            r[i] = model - s.y[static_cast<std::size_t>(i)];
        }
        return true;
    };
    VectorXd p0(13);
    for (int k = 0; k < 4; ++k)
    {
        const std::size_t i = chosen[static_cast<std::size_t>(k)];
        p0[3 * k] = s.y[i] - baseline;
        p0[3 * k + 1] = s.x[i];
        p0[3 * k + 2] = width;
    }
    p0[12] = baseline;
    const fit::LmResult res = fit::levenberg_marquardt(residuals, p0, n);
    if (!res.converged)
    {
        throw FitError("four-line fit did not converge", std::sqrt(2.0 * res.cost), res.iterations);
    }

    std::array<double, 4> centers{};
    for (int k = 0; k < 4; ++k)
    {
        centers[static_cast<std::size_t>(k)] = res.params[3 * k + 1];
    }
    std::sort(centers.begin(), centers.end(), std::greater<>());
    FineStructureFit out;
    out.line_a_thz = (mean + centers[0]) * 1e-3;
    out.line_b_thz = (mean + centers[1]) * 1e-3;
    out.line_c_thz = (mean + centers[2]) * 1e-3;
    out.line_d_thz = (mean + centers[3]) * 1e-3;
    out.ground_splitting_ghz = 0.5 * ((centers[0] - centers[1]) + (centers[2] - centers[3]));
    out.excited_splitting_ghz = 0.5 * ((centers[0] - centers[2]) + (centers[1] - centers[3]));
    out.reduced_chi2 = res.reduced_chi2;
    return out;
}

double thickness_from_fringes(double fringe_count, double wavelength_nm, double refractive_index)
{
    if (!(wavelength_nm > 0.0) || !(refractive_index >= 1.0))
    {
        throw ValidationError("fringe mapping needs wavelength > 0 and n >= 1");
    }
    return fringe_count * wavelength_nm / (2.0 * refractive_index);
}
} // namespace fpcavity::scan
