#pragma once

// Unit system: all internal quantities are in Hartree atomic units
// (hbar = m_e = e = 4*pi*eps0 = 1).  I/O boundaries speak picoseconds,
// cm^-1, angstrom^3, W/cm^2 and kelvin; conversions happen exactly once
// on the way in and once on the way out.

namespace rotorfluc::units {

// CODATA 2018
inline constexpr double hartree_joule = 4.3597447222071e-18;
inline constexpr double atomic_time_second = 2.4188843265857e-17;  // hbar / E_h
inline constexpr double bohr_meter = 0.529177210903e-10;
inline constexpr double fine_structure = 7.2973525693e-3;
inline constexpr double boltzmann_joule_per_K = 1.380649e-23;      // exact SI
inline constexpr double hartree_wavenumber = 219474.6313632;       // E_h / (h c) in cm^-1

inline constexpr double au_per_ps = 1.0e-12 / atomic_time_second;  // 41341.374...
inline constexpr double ps_per_au = 1.0 / au_per_ps;

inline constexpr double hartree_per_cm1 = 1.0 / hartree_wavenumber;
inline constexpr double cm1_per_hartree = hartree_wavenumber;

inline constexpr double bohr_per_angstrom = 1.0e-10 / bohr_meter;
inline constexpr double bohr3_per_A3 =
    bohr_per_angstrom * bohr_per_angstrom * bohr_per_angstrom;     // 6.748335...

inline constexpr double kB_hartree_per_K = boltzmann_joule_per_K / hartree_joule;

// Atomic unit of intensity E_h / (t_au * a0^2), expressed in W/cm^2.
// Numerically 6.4364e15; the peak coupling for I = 2e12 W/cm^2 and
// delta_alpha = 1 A^3 then comes out at 9.615e-5 hartree.
inline constexpr double bohr_cm = bohr_meter * 1.0e2;
inline constexpr double Wcm2_per_au =
    hartree_joule / (atomic_time_second * bohr_cm * bohr_cm);
inline constexpr double au_per_Wcm2 = 1.0 / Wcm2_per_au;

inline constexpr double pi = 3.14159265358979323846;

}  // namespace rotorfluc::units
