#include "rotorfluc/pulse.hpp"

#include <cmath>
#include <stdexcept>

#include "rotorfluc/constants.hpp"

namespace rotorfluc {

MoleculeSpec MoleculeSpec::from_io(double B_cm1, double delta_alpha_A3,
                                   double temperature_K) {
  if (B_cm1 <= 0.0)
    throw std::invalid_argument("molecule: B must be positive");
  if (delta_alpha_A3 < 0.0)
    throw std::invalid_argument("molecule: delta_alpha must be non-negative");
  if (temperature_K < 0.0)
    throw std::invalid_argument("molecule: temperature must be non-negative");
  MoleculeSpec m;
  m.B = B_cm1 * units::hartree_per_cm1;
  m.delta_alpha = delta_alpha_A3 * units::bohr3_per_A3;
  m.temperature = temperature_K;
  return m;
}

double MoleculeSpec::revival_time() const { return units::pi / B; }

double MoleculeSpec::moment_of_inertia() const { return 1.0 / (2.0 * B); }

PulseSpec PulseSpec::from_io(double Imax_Wcm2, double fwhm_ps, double center_ps,
                             double window_factor) {
  if (Imax_Wcm2 < 0.0)
    throw std::invalid_argument("pulse: peak intensity must be non-negative");
  if (fwhm_ps <= 0.0)
    throw std::invalid_argument("pulse: fwhm must be positive");
  if (window_factor < 2.0)
    throw std::invalid_argument("pulse: window must cover at least 2*fwhm");
  PulseSpec p;
  p.peak_intensity = Imax_Wcm2 * units::au_per_Wcm2;
  p.fwhm = fwhm_ps * units::au_per_ps;
  p.center = center_ps * units::au_per_ps;
  p.window = window_factor * p.fwhm;
  return p;
}

double intensity(const PulseSpec& pulse, double t) {
  if (!pulse.in_window(t)) return 0.0;
  const double u = (t - pulse.center) / pulse.fwhm;
  return pulse.peak_intensity * std::exp(-4.0 * M_LN2 * u * u);
}

double coupling_strength(const MoleculeSpec& mol, const PulseSpec& pulse,
                         double t) {
  return 2.0 * units::pi * units::fine_structure * intensity(pulse, t) *
         mol.delta_alpha;
}

}  // namespace rotorfluc
