#include "relay/csv.hpp"

#include <cstdio>

#include "relay/format.hpp"

namespace relay {

namespace {

// Minimal CSV quoting for prompt ids; plain labels pass through as-is.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) {
    return s;
  }
  std::string quoted = "\"";
  for (char ch : s) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  quoted += '"';
  return quoted;
}

}  // namespace

std::string format_sig(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, value);
  return buf;
}

void write_decay_curve_csv(std::ostream& os, const DecayCurve& curve) {
  os << "offset,retained_fraction\n";
  for (const DecayCurve::Point& p : curve.points) {
    os << format_sig(p.offset) << ',' << format_sig(p.retained_fraction)
       << '\n';
  }
}

void write_decay_sweep_csv(std::ostream& os,
                           const std::vector<std::string>& labels,
                           std::span<const double> offsets,
                           const std::vector<DecayCurve>& curves) {
  if (labels.size() != curves.size()) {
    throw ShapeError("sweep has " + std::to_string(labels.size()) +
                     " labels for " + std::to_string(curves.size()) +
                     " curves");
  }
  for (const DecayCurve& curve : curves) {
    if (curve.points.size() != offsets.size()) {
      throw ShapeError("sweep curves must share the offset grid");
    }
  }

  os << "offset";
  for (const std::string& label : labels) {
    os << ',' << csv_field(label);
  }
  os << '\n';
  for (std::size_t row = 0; row < offsets.size(); ++row) {
    os << format_sig(offsets[row]);
    for (const DecayCurve& curve : curves) {
      os << ',' << format_sig(curve.points[row].retained_fraction);
    }
    os << '\n';
  }
}

void write_occupancy_csv(std::ostream& os, const OccupancyTrace& trace) {
  os << "frame";
  for (const std::string& prompt : trace.prompts) {
    os << ',' << csv_field(prompt);
  }
  os << '\n';
  for (std::size_t f = 0; f < trace.frames; ++f) {
    os << f;
    for (std::size_t c = 0; c < trace.mass.cols; ++c) {
      os << ',' << format_sig(trace.mass.at(f, c));
    }
    os << '\n';
  }
}

void write_penalty_csv(std::ostream& os, const PenaltyMatrix& penalty) {
  const DenseMatrix& values = penalty.values();
  for (std::size_t i = 0; i < values.rows; ++i) {
    for (std::size_t j = 0; j < values.cols; ++j) {
      if (j > 0) os << ',';
      os << format_sig(values.at(i, j));
    }
    os << '\n';
  }
}

}  // namespace relay
