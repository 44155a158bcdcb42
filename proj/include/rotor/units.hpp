#pragma once

#include <cmath>

// Unit conversions. Internal unit system is atomic units (Hartree, a.u. of
// time and field amplitude) throughout.

namespace rotor::units {

inline constexpr double hartree_per_cm1 = 1.0 / 219474.63;
inline constexpr double fs_per_au_time = 0.0241888;
inline constexpr double boltzmann_hartree_per_K = 3.16681e-6;
// I [W/cm^2] = intensity_au_Wcm2 * E^2 [a.u.]
inline constexpr double intensity_au_Wcm2 = 3.50945e16;

inline double cm1_to_hartree(double v) { return v * hartree_per_cm1; }
inline double hartree_to_cm1(double v) { return v / hartree_per_cm1; }
inline double fs_to_au(double t) { return t / fs_per_au_time; }
inline double au_to_fs(double t) { return t * fs_per_au_time; }
inline double kelvin_to_hartree(double T) { return T * boltzmann_hartree_per_K; }

inline double intensity_to_field_au(double intensity_Wcm2) {
    return std::sqrt(intensity_Wcm2 / intensity_au_Wcm2);
}

} // namespace rotor::units
