#include "frohlich/feasibility.hpp"

#include "frohlich/error.hpp"
#include "frohlich/params.hpp"

namespace frohlich::feasibility {

Report estimate(const Input& in) {
  if (!(in.r_ghz > 0.0 && in.frequency_thz > 0.0 && in.wavelength_um > 0.0 &&
        in.cross_section_cm2 > 0.0))
    throw RangeError("feasibility inputs must all be > 0");
  Report rep;
  const double watts = in.r_ghz * 1e9 * constants::planck_h * in.frequency_thz * 1e12;
  rep.per_molecule_power_pw = watts * 1e12;
  const double lambda_cm = in.wavelength_um * 1e-4;
  rep.spot_area_cm2 = lambda_cm * lambda_cm / 4.0;
  rep.photon_count = rep.spot_area_cm2 / in.cross_section_cm2;
  rep.laser_power_w = watts * rep.photon_count;
  return rep;
}

}  // namespace frohlich::feasibility
