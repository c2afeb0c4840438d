#pragma once

namespace rotorfluc {

// Molecular parameters in atomic units.  B is the rotational constant
// as an energy (hartree), delta_alpha the polarizability anisotropy
// (bohr^3), temperature in kelvin (kelvin is kept as-is; thermal
// weights use k_B in hartree/K).
struct MoleculeSpec {
  double B = 0.0;
  double delta_alpha = 0.0;
  double temperature = 0.0;

  static MoleculeSpec from_io(double B_cm1, double delta_alpha_A3,
                              double temperature_K);

  // Full revival time pi*hbar/B (atomic units); the fundamental
  // rotational period is twice this.
  double revival_time() const;

  // hbar^2 / (2B), the moment of inertia matching the rotor spectrum.
  double moment_of_inertia() const;
};

// Gaussian intensity envelope, truncated to a finite support window
// centered on the peak.  All fields in atomic units.
struct PulseSpec {
  double peak_intensity = 0.0;  // atomic intensity units
  double fwhm = 0.0;
  double center = 0.0;
  double window = 0.0;          // half-width of the support, >= 2*fwhm

  static PulseSpec from_io(double Imax_Wcm2, double fwhm_ps, double center_ps,
                           double window_factor = 2.5);

  double window_start() const { return center - window; }
  double window_end() const { return center + window; }
  bool in_window(double t) const {
    return t >= window_start() && t <= window_end();
  }
};

// I(t): Gaussian inside the window, identically zero outside.  With the
// default window = 2.5*fwhm the step at the edge is I_max * 2^-25; at
// the minimum allowed window = 2*fwhm it is I_max * 2^-16.
double intensity(const PulseSpec& pulse, double t);

// k(t) = 2*pi*alpha_fs*I(t)*delta_alpha, the prefactor of the
// interaction H_int = -k(t) (cos^2 theta - 1/3) in hartree.
double coupling_strength(const MoleculeSpec& mol, const PulseSpec& pulse,
                         double t);

}  // namespace rotorfluc
