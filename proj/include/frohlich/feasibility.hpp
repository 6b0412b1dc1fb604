#pragma once

namespace frohlich::feasibility {

struct Input {
  double r_ghz = 0.0;
  double frequency_thz = 0.0;
  double wavelength_um = 400.0;
  double cross_section_cm2 = 1e-15;
};

struct Report {
  double per_molecule_power_pw = 0.0;  ///< r h f
  double spot_area_cm2 = 0.0;          ///< lambda^2 / 4
  double photon_count = 0.0;           ///< area / cross section
  double laser_power_w = 0.0;
};

/// RangeError when any input is not positive.
Report estimate(const Input& in);

}  // namespace frohlich::feasibility
