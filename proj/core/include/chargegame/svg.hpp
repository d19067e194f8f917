#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "chargegame/montecarlo.hpp"

namespace chargegame {

/// Hand-emitted, dependency-free SVG charts: fixed 800x600 viewBox, 12pt
/// sans-serif labels, fixed-precision coordinates. Identical input gives
/// identical bytes. All three throw std::invalid_argument on empty input.

/// Relative-error boxplots over m (log-spaced x axis), mean marked per box,
/// outliers drawn as plus signs.
std::string render_poa_boxplot(const std::vector<SweepRecord>& records);

/// One histogram panel of F/m^2 per m, shared bin range, with a vertical
/// marker at the limit value.
std::string render_hetero_histograms(const std::vector<SweepRecord>& records,
                                     double limit_value);

/// One panel per m with the three profiles; legend entries "social", "nash",
/// "non-PEV".
std::string render_valley_profiles(const std::vector<ValleyFillProfiles>& profiles);

}  // namespace chargegame
