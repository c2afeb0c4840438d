#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "rotorfluc/constants.hpp"
#include "rotorfluc/pulse.hpp"

using namespace rotorfluc;

TEST_SUITE_BEGIN("pulse");

TEST_CASE("unit conversions round-trip") {
  CHECK(units::au_per_ps * units::ps_per_au == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(units::Wcm2_per_au * units::au_per_Wcm2 ==
        doctest::Approx(1.0).epsilon(1e-15));
  // frozen reference values
  CHECK(units::au_per_ps == doctest::Approx(41341.3733351821).epsilon(1e-12));
  CHECK(units::Wcm2_per_au == doctest::Approx(6.4364099007e15).epsilon(1e-10));
  CHECK(units::kB_hartree_per_K == doctest::Approx(3.166811563e-6).epsilon(1e-9));
  CHECK(units::bohr3_per_A3 == doctest::Approx(6.7483344946).epsilon(1e-9));
  CHECK(units::hartree_per_cm1 ==
        doctest::Approx(1.0 / 219474.6313632).epsilon(1e-12));
}

TEST_CASE("molecule from io units") {
  const MoleculeSpec mol = MoleculeSpec::from_io(0.07941759, 6.70, 0.5);
  CHECK(mol.B == doctest::Approx(0.07941759 / 219474.6313632).epsilon(1e-12));
  CHECK(mol.delta_alpha ==
        doctest::Approx(6.70 * units::bohr3_per_A3).epsilon(1e-12));
  CHECK(mol.temperature == 0.5);
  // tau_rev * B = pi by construction; default B gives 210 ps
  CHECK(mol.revival_time() * mol.B == doctest::Approx(units::pi).epsilon(1e-15));
  CHECK(mol.revival_time() * units::ps_per_au ==
        doctest::Approx(210.00643).epsilon(1e-6));
  CHECK(mol.moment_of_inertia() == doctest::Approx(0.5 / mol.B).epsilon(1e-15));
}

TEST_CASE("molecule validation") {
  CHECK_THROWS_AS(MoleculeSpec::from_io(0.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(MoleculeSpec::from_io(-1.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(MoleculeSpec::from_io(0.1, -1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(MoleculeSpec::from_io(0.1, 1.0, -1.0), std::invalid_argument);
  CHECK_NOTHROW(MoleculeSpec::from_io(0.1, 0.0, 0.0));
}

TEST_CASE("pulse envelope") {
  const PulseSpec pulse = PulseSpec::from_io(2.0e12, 0.5, 10.0);
  const double fwhm = 0.5 * units::au_per_ps;
  CHECK(pulse.fwhm == doctest::Approx(fwhm).epsilon(1e-15));
  CHECK(pulse.center == doctest::Approx(10.0 * units::au_per_ps).epsilon(1e-15));
  CHECK(pulse.window == doctest::Approx(2.5 * fwhm).epsilon(1e-15));

  const double I0 = intensity(pulse, pulse.center);
  CHECK(I0 == doctest::Approx(2.0e12 * units::au_per_Wcm2).epsilon(1e-12));
  // half maximum at +-fwhm/2
  CHECK(intensity(pulse, pulse.center + 0.5 * fwhm) ==
        doctest::Approx(0.5 * I0).epsilon(1e-12));
  CHECK(intensity(pulse, pulse.center - 0.5 * fwhm) ==
        doctest::Approx(0.5 * I0).epsilon(1e-12));
  // edge step at the default window factor 2.5 is 2^-25
  CHECK(intensity(pulse, pulse.window_end()) ==
        doctest::Approx(I0 * std::pow(2.0, -25.0)).epsilon(1e-10));
  CHECK(intensity(pulse, pulse.window_end() + 1.0) == 0.0);
  CHECK(intensity(pulse, pulse.window_start() - 1.0) == 0.0);
  CHECK(pulse.in_window(pulse.center));
  CHECK(!pulse.in_window(pulse.window_end() + 1.0));
}

TEST_CASE("pulse validation") {
  CHECK_THROWS_AS(PulseSpec::from_io(-1.0, 0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(PulseSpec::from_io(1e12, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(PulseSpec::from_io(1e12, 0.5, 0.0, 1.5),
                  std::invalid_argument);
  CHECK_NOTHROW(PulseSpec::from_io(0.0, 0.5, 0.0, 2.0));
}

TEST_CASE("coupling strength fixture") {
  // delta_alpha = 1 A^3 at 2e12 W/cm2: k = 2 pi alpha I dalpha
  const MoleculeSpec mol = MoleculeSpec::from_io(0.07941759, 1.0, 0.5);
  const PulseSpec pulse = PulseSpec::from_io(2.0e12, 0.5, 0.0);
  const double k = coupling_strength(mol, pulse, 0.0);
  CHECK(k == doctest::Approx(9.6145309e-5).epsilon(1e-7));
  CHECK(k / mol.B == doctest::Approx(265.70255).epsilon(1e-7));
  // linear in both I and delta_alpha
  const MoleculeSpec mol2 = MoleculeSpec::from_io(0.07941759, 2.0, 0.5);
  CHECK(coupling_strength(mol2, pulse, 0.0) ==
        doctest::Approx(2.0 * k).epsilon(1e-13));
  CHECK(coupling_strength(mol, pulse, pulse.center + 0.5 * pulse.fwhm) ==
        doctest::Approx(0.5 * k).epsilon(1e-12));
}

TEST_SUITE_END();
