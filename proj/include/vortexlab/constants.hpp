#pragma once

#include <numbers>

namespace vortexlab {

/// SI values of the constants used throughout the library (CODATA 2018;
/// h, e and k_B are exact by definition of the SI).
struct PhysicalConstants {
    double h;
    double hbar;
    double e;
    double Phi0;
    double mu0;
    double m_e;
    double k_B;
    double mu_B;
    double R_K;
};

inline constexpr PhysicalConstants make_codata2018() {
    constexpr double h = 6.62607015e-34;
    constexpr double e = 1.602176634e-19;
    return PhysicalConstants{
        .h = h,
        .hbar = h / (2.0 * std::numbers::pi),
        .e = e,
        .Phi0 = h / (2.0 * e),
        .mu0 = 1.25663706212e-6,
        .m_e = 9.1093837015e-31,
        .k_B = 1.380649e-23,
        .mu_B = 9.2740100783e-24,
        .R_K = h / (e * e),
    };
}

inline constexpr PhysicalConstants kConstants = make_codata2018();

}  // namespace vortexlab
