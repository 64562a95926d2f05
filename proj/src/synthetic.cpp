#include "fpcavity/synthetic.hpp"

#include "fpcavity/errors.hpp"

#include <cmath>

namespace fpcavity::synthetic
{
std::vector<double> linspace(double lo, double hi, std::size_t samples)
{
    if (samples < 2)
    {
        throw ValidationError("linspace needs at least 2 samples");
    }
    std::vector<double> out(samples);
    for (std::size_t i = 0; i < samples; ++i)
    {
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(samples - 1);
    }
    return out;
}

scan::ScanTrace lorentzian_trace(const std::vector<double> &abscissa, const std::vector<Resonance> &peaks,
                                 double offset, scan::Channel channel)
{
    const double sign = channel == scan::Channel::kReflection ? -1.0 : 1.0;
    scan::ScanTrace t;
    t.abscissa = abscissa;
    t.meta.channel = channel;
    for (double x : abscissa)
    {
        double y = offset;
        for (const Resonance &p : peaks)
        {
            const double u = 2.0 * (x - p.center) / p.fwhm;
            y += sign * p.amplitude / (1.0 + u * u);
        }
        t.ordinate.push_back(y);
    }
    return t;
}

scan::ScanTrace cavity_length_scan(double finesse, double spacing, std::size_t samples, scan::Channel channel,
                                   double offset, double amplitude)
{
    if (!(finesse > 1.0) || !(spacing > 0.0))
    {
        throw ValidationError("cavity scan needs finesse > 1 and spacing > 0");
    }
    const double fwhm = spacing / finesse;
    const std::vector<Resonance> peaks{{0.5 * spacing, fwhm, amplitude}, {1.5 * spacing, fwhm, amplitude}};
    const double base = channel == scan::Channel::kReflection ? offset + amplitude : offset;
    scan::ScanTrace t = lorentzian_trace(linspace(0.0, 2.0 * spacing, samples), peaks, base, channel);
    t.meta.units = "au";
    return t;
}

scan::ScanTrace decay_trace(double tau_ns, double amplitude, double background, double pulse_end_ns, double dt_ns,
                            std::size_t samples)
{
    if (!(tau_ns > 0.0) || !(dt_ns > 0.0))
    {
        throw ValidationError("decay needs tau > 0 and dt > 0");
    }
    scan::ScanTrace t;
    t.meta.units = "ns";
    t.meta.channel = scan::Channel::kFluorescence;
    for (std::size_t i = 0; i < samples; ++i)
    {
        const double time = static_cast<double>(i) * dt_ns;
        t.abscissa.push_back(time);
        const double y = time < pulse_end_ns ? amplitude : amplitude * std::exp(-(time - pulse_end_ns) / tau_ns);
        t.ordinate.push_back(background + y);
    }
    return t;
}

void add_gaussian_noise(scan::ScanTrace &trace, double sigma, std::mt19937_64 &rng)
{
    std::normal_distribution<double> noise(0.0, sigma);
    for (double &y : trace.ordinate)
    {
        y += noise(rng);
    }
}

void add_poisson_noise(scan::ScanTrace &trace, std::mt19937_64 &rng)
{
    for (double &y : trace.ordinate)
    {
        std::poisson_distribution<long long> draw(std::max(y, 0.0));
        y = static_cast<double>(y > 0.0 ? draw(rng) : 0);
    }
}

std::vector<scan::PleScan> ple_scans(const std::vector<double> &excitation_nm,
                                     const std::function<double(double)> &response, const Resonance &cavity,
                                     double background, std::size_t samples)
{
    std::vector<scan::PleScan> out;
    const std::vector<double> x = linspace(cavity.center - 10.0 * cavity.fwhm, cavity.center + 10.0 * cavity.fwhm, samples);
    for (double lambda : excitation_nm)
    {
        Resonance r = cavity;
        r.amplitude = response(lambda);
        scan::PleScan s{lambda, lorentzian_trace(x, {r}, background, scan::Channel::kFluorescence)};
        s.trace.meta.excitation_nm = lambda;
        out.push_back(std::move(s));
    }
    return out;
}
} // namespace fpcavity::synthetic
