#pragma once

namespace magcav::constants {

inline constexpr double two_pi = 6.283185307179586476925286766559;
inline constexpr double mu0 = 1.25663706127e-6;     // vacuum permeability (T*m/A)
inline constexpr double hbar = 1.054571817e-34;     // reduced Planck (J*s)
inline constexpr double mu_bohr = 9.2740100657e-24; // Bohr magneton (J/T)

}  // namespace magcav::constants
