#include "fpcavity/lineshapes.hpp"

#include "fpcavity/constants.hpp"
#include "fpcavity/errors.hpp"

#include <array>
#include <cmath>
#include <complex>

namespace fpcavity::lineshape
{
namespace
{
constexpr int kTerms = 32;

struct WeidemanTable
{
    double scale;
    std::array<double, kTerms> coeff;  // a_1 .. a_N
};

// Coefficients of the expansion, computed by a direct cosine transform of
// f(t) = exp(-t^2)(L^2 + t^2) on the mapped grid t = L tan(theta/2).
const WeidemanTable &table()
{
    static const WeidemanTable t = [] {
        WeidemanTable out{};
        const int m = 2 * kTerms;
        const int m2 = 2 * m;
        out.scale = std::sqrt(kTerms / std::sqrt(2.0));
        const double l = out.scale;
        for (int n = 1; n <= kTerms; ++n)
        {
            double sum = 0.0;
            for (int k = -m + 1; k <= m - 1; ++k)
            {
                const double theta = k * constants::kPi / m;
                const double tt = l * std::tan(theta / 2.0);
                const double f = std::exp(-tt * tt) * (l * l + tt * tt);
                sum += f * std::cos(2.0 * constants::kPi * k * n / m2);
            }
            out.coeff[n - 1] = sum / m2;
        }
        return out;
    }();
    return t;
}
} // namespace

ComplexValue faddeeva(double x, double y)
{
    using C = std::complex<double>;
    const WeidemanTable &t = table();
    const C z(x, y);
    const C iz = C(0.0, 1.0) * z;
    const C denom = t.scale - iz;
    const C ratio = (t.scale + iz) / denom;
    C poly = 0.0;
    for (int n = kTerms; n >= 1; --n)
    {
        poly = poly * ratio + t.coeff[n - 1];
    }
    const C w = 2.0 * poly / (denom * denom) + 1.0 / (std::sqrt(constants::kPi) * denom);
    return {w.real(), w.imag()};
}

double lorentzian(double detuning, double fwhm)
{
    const double hw = 0.5 * fwhm;
    return hw / (constants::kPi * (detuning * detuning + hw * hw));
}

double gaussian(double detuning, double sigma)
{
    const double u = detuning / sigma;
    return std::exp(-0.5 * u * u) / (sigma * std::sqrt(2.0 * constants::kPi));
}

double voigt(double detuning, double lorentz_fwhm, double gauss_sigma)
{
    if (lorentz_fwhm < 0.0 || gauss_sigma < 0.0 || (lorentz_fwhm == 0.0 && gauss_sigma == 0.0))
    {
        throw ValidationError("voigt profile needs non-negative widths, not both zero");
    }
    if (gauss_sigma == 0.0)
    {
        return lorentzian(detuning, lorentz_fwhm);
    }
    if (lorentz_fwhm == 0.0)
    {
        return gaussian(detuning, gauss_sigma);
    }
    const double s = gauss_sigma * std::sqrt(2.0);
    const ComplexValue w = faddeeva(detuning / s, 0.5 * lorentz_fwhm / s);
    return w.re / (gauss_sigma * std::sqrt(2.0 * constants::kPi));
}
} // namespace fpcavity::lineshape
