#pragma once

// Area-normalized spectral line profiles. Widths and detunings share one
// frequency unit; the profiles carry the inverse of that unit.

namespace fpcavity::lineshape
{
double lorentzian(double detuning, double fwhm);
double gaussian(double detuning, double sigma);

// Lorentzian (FWHM) convolved with a Gaussian (standard deviation). Falls back
// to the pure profile when either width is zero.
double voigt(double detuning, double lorentz_fwhm, double gauss_sigma);

// Faddeeva function w(z) = exp(-z^2) erfc(-iz) for Im z >= 0, from Weideman's
// rational expansion with 32 terms.
struct ComplexValue
{
    double re;
    double im;
};
ComplexValue faddeeva(double x, double y);
} // namespace fpcavity::lineshape
