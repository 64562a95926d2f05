#pragma once

#include "fpcavity/cavity_geometry.hpp"
#include "fpcavity/layered_optics.hpp"

namespace oracle
{
using fpcavity::cavity::HybridCavity;

// Trapezoid averages of n|E|^2 over the air gap and the membrane, taken from
// the sampled field profile rather than the closed-form layer integrals.
inline double sampled_air_fraction(const HybridCavity &hc, double gap, double lambda)
{
    const fpcavity::optics::LayerStack s = hc.build(gap);
    const fpcavity::optics::FieldProfile p = fpcavity::optics::field_profile(s, lambda, 0.5);
    const double air_lo = s.interface_position_nm(hc.air_gap_layer());
    const double air_hi = air_lo + gap;
    const double dia_hi = air_hi + hc.diamond_thickness_nm;
    double air = 0.0, dia = 0.0, air_len = 0.0, dia_len = 0.0;
    for (std::size_t i = 1; i < p.depth_nm.size(); ++i)
    {
        const double z0 = p.depth_nm[i - 1];
        const double z1 = p.depth_nm[i];
        const double seg = 0.5 * (p.intensity[i - 1] + p.intensity[i]) * (z1 - z0);
        if (z0 >= air_lo - 1e-9 && z1 <= air_hi + 1e-9)
        {
            air += seg;
            air_len += z1 - z0;
        }
        else if (z0 >= air_hi - 1e-9 && z1 <= dia_hi + 1e-9)
        {
            dia += hc.diamond_index * seg;
            dia_len += z1 - z0;
        }
    }
    air /= air_len;
    dia /= dia_len;
    return air / (air + dia);
}
} // namespace oracle
