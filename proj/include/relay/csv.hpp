#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "relay/occupancy.hpp"
#include "relay/penalty.hpp"

namespace relay {

// All writers emit 12-significant-digit values and LF line endings.

// Header "offset,retained_fraction", one row per offset.
void write_decay_curve_csv(std::ostream& os, const DecayCurve& curve);

// Header "offset,<label>...", one fraction column per labeled curve.
// Every curve must be sampled on the shared `offsets` grid.
void write_decay_sweep_csv(std::ostream& os,
                           const std::vector<std::string>& labels,
                           std::span<const double> offsets,
                           const std::vector<DecayCurve>& curves);

// Header "frame,<prompt_id>...", one row per latent frame.
void write_occupancy_csv(std::ostream& os, const OccupancyTrace& trace);

// Raw matrix dump, one row per query token; +inf renders as "inf".
void write_penalty_csv(std::ostream& os, const PenaltyMatrix& penalty);

}  // namespace relay
