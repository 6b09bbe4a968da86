#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "relay/csv.hpp"
#include "relay/format.hpp"
#include "relay/occupancy.hpp"
#include "relay/penalty.hpp"
#include "relay/schedule_io.hpp"

namespace {

using namespace relay;

WindowPolicy parse_window(const std::string& text) {
  if (text == "auto") {
    return WindowPolicy::Auto();
  }
  std::size_t consumed = 0;
  double width = 0.0;
  try {
    width = std::stod(text, &consumed);
  } catch (const std::exception&) {
    consumed = 0;
  }
  if (consumed != text.size()) {
    throw ConfigError("invalid --window value \"" + text +
                      "\" (expected \"auto\" or a number)");
  }
  return WindowPolicy::Explicit(width);
}

PenaltyMode parse_mode(const std::string& text) {
  if (text == "soft") return PenaltyMode::kSoft;
  if (text == "hard") return PenaltyMode::kHard;
  if (text == "off") return PenaltyMode::kOff;
  throw ConfigError("invalid --mode value \"" + text + "\"");
}

LogitProfile parse_profile(const std::string& text, std::uint64_t seed) {
  if (text == "uniform") return LogitProfile::Uniform();
  if (text == "random") return LogitProfile::Random(seed);
  throw ConfigError("invalid --profile value \"" + text + "\"");
}

// Data goes to --out when given, standard output otherwise; diagnostics
// always go to the error stream.
void emit(const std::string& out_path,
          const std::function<void(std::ostream&)>& write) {
  if (out_path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream file(out_path, std::ios::binary);
  if (!file) {
    throw ConfigError("cannot open output file: " + out_path);
  }
  write(file);
}

std::vector<double> curve_offsets(double half_length) {
  // Uniform grid over [-1.5 L, 1.5 L] at step 0.05.
  const auto n = static_cast<long>(std::llround(30.0 * half_length));
  std::vector<double> offsets;
  offsets.reserve(static_cast<std::size_t>(2 * n + 1));
  for (long k = -n; k <= n; ++k) {
    offsets.push_back(static_cast<double>(k) * 0.05);
  }
  return offsets;
}

struct CurvesArgs {
  double half_length = 0.0;
  double epsilon = 0.1;
  std::string window = "auto";
  bool sweep_w = false;
  bool sweep_eps = false;
  std::string out;
};

void run_curves(const CurvesArgs& args) {
  if (!(args.half_length > 0.0)) {
    throw ConfigError("--L must be > 0, got " + format_sig(args.half_length));
  }
  const double L = args.half_length;
  const std::vector<double> offsets = curve_offsets(L);

  if (args.sweep_w) {
    const std::vector<double> windows = {0.0, L / 2.0,
                                         std::max(L - 2.0, 0.0)};
    std::vector<std::string> labels;
    std::vector<DecayCurve> curves;
    for (double w : windows) {
      labels.push_back("w=" + format_sig(w));
      curves.push_back(decay_curve(L, w, args.epsilon, offsets));
    }
    emit(args.out, [&](std::ostream& os) {
      write_decay_sweep_csv(os, labels, offsets, curves);
    });
    return;
  }

  const double window = parse_window(args.window).resolve(L);
  if (args.sweep_eps) {
    const std::vector<double> epsilons = {0.3, 0.1, 0.01};
    std::vector<std::string> labels;
    std::vector<DecayCurve> curves;
    for (double eps : epsilons) {
      labels.push_back("eps=" + format_sig(eps));
      curves.push_back(decay_curve(L, window, eps, offsets));
    }
    emit(args.out, [&](std::ostream& os) {
      write_decay_sweep_csv(os, labels, offsets, curves);
    });
    return;
  }

  const DecayCurve curve = decay_curve(L, window, args.epsilon, offsets);
  emit(args.out,
       [&](std::ostream& os) { write_decay_curve_csv(os, curve); });
}

struct ScheduleArgs {
  std::string schedule_path;
  double epsilon = 0.1;
  std::string window = "auto";
  std::string mode = "soft";
  int tokens_per_frame = 4;
  int tokens_per_prompt = 8;
  int global_tokens = 0;
  std::uint64_t seed = 0;
  std::string profile = "uniform";
  std::string out;
};

SegmentSchedule load(const ScheduleArgs& args) {
  return validate_schedule(load_schedule_file(args.schedule_path));
}

TokenLayout layout_for(const SegmentSchedule& schedule,
                       const ScheduleArgs& args) {
  return build_token_layout(schedule, args.tokens_per_frame,
                            args.tokens_per_prompt, args.global_tokens);
}

PenaltyConfig config_for(const ScheduleArgs& args, PenaltyMode mode) {
  return PenaltyConfig{args.epsilon, parse_window(args.window), mode};
}

void run_validate(const ScheduleArgs& args) {
  const SegmentSchedule schedule = load(args);
  emit(args.out, [&](std::ostream& os) {
    os << "video_frames " << schedule.video_frames << '\n';
    if (schedule.global_prompt) {
      os << "global_prompt " << *schedule.global_prompt << '\n';
    }
    for (const TemporalSegment& seg : schedule.segments) {
      os << "segment " << seg.segment_id << " prompt \"" << seg.prompt_id
         << "\" frames [" << seg.start_frame << "," << seg.end_frame
         << "] midpoint " << format_sig(seg.midpoint) << " half_length "
         << format_sig(seg.half_length) << '\n';
    }
  });
}

void run_penalty(const ScheduleArgs& args) {
  const SegmentSchedule schedule = load(args);
  const TokenLayout layout = layout_for(schedule, args);
  const PenaltyMatrix penalty = build_penalty_matrix(
      schedule, layout, config_for(args, parse_mode(args.mode)));
  emit(args.out,
       [&](std::ostream& os) { write_penalty_csv(os, penalty); });
}

void run_occupancy(const ScheduleArgs& args) {
  const SegmentSchedule schedule = load(args);
  const TokenLayout layout = layout_for(schedule, args);
  const OccupancyTrace trace =
      occupancy(schedule, layout, config_for(args, parse_mode(args.mode)),
                parse_profile(args.profile, args.seed));
  emit(args.out,
       [&](std::ostream& os) { write_occupancy_csv(os, trace); });
}

void run_compare(const ScheduleArgs& args) {
  const SegmentSchedule schedule = load(args);
  const TokenLayout layout = layout_for(schedule, args);
  const LogitProfile profile = parse_profile(args.profile, args.seed);

  const OccupancyTrace soft_trace =
      occupancy(schedule, layout, config_for(args, PenaltyMode::kSoft),
                profile);
  const OccupancyTrace hard_trace =
      occupancy(schedule, layout, config_for(args, PenaltyMode::kHard),
                profile);
  const BoundaryReport soft = boundary_report(soft_trace, schedule);
  const BoundaryReport hard = boundary_report(hard_trace, schedule);

  emit(args.out, [&](std::ostream& os) {
    for (std::size_t b = 0; b < soft.per_boundary_steps.size(); ++b) {
      const int frame = schedule.segments[b].end_frame;
      os << "boundary frames " << frame << "->" << frame + 1 << ": SOFT step "
         << format_sig(soft.per_boundary_steps[b]) << " HARD step "
         << format_sig(hard.per_boundary_steps[b]) << '\n';
    }
    os << "SOFT max_step " << format_sig(soft.max_step) << '\n';
    os << "HARD max_step " << format_sig(hard.max_step) << '\n';
    const char* smoother = soft.max_step < hard.max_step   ? "SOFT"
                           : hard.max_step < soft.max_step ? "HARD"
                                                           : "TIE";
    os << "smoother: " << smoother << '\n';
  });
}

void add_layout_flags(CLI::App* sub, ScheduleArgs& args) {
  sub->add_option("--tokens-per-frame", args.tokens_per_frame,
                  "Spatial query tokens per latent frame")
      ->capture_default_str();
  sub->add_option("--tokens-per-prompt", args.tokens_per_prompt,
                  "Key tokens per scheduled prompt")
      ->capture_default_str();
  sub->add_option("--global-tokens", args.global_tokens,
                  "Key tokens for the global prompt (required > 0 when the "
                  "schedule has one)")
      ->capture_default_str();
}

void add_penalty_flags(CLI::App* sub, ScheduleArgs& args) {
  sub->add_option("--epsilon", args.epsilon,
                  "Decay threshold at segment endpoints, in (0, 1)")
      ->capture_default_str();
  sub->add_option("--window", args.window,
                  "Free-attention half-width: \"auto\" (= L - 2, clamped at "
                  "0) or a number of latent frames")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Temporal cross-attention routing toolkit: decay curves, penalty "
      "matrices, per-frame prompt occupancy, and soft-vs-hard boundary "
      "reports."};
  app.require_subcommand(1);

  CurvesArgs curves_args;
  CLI::App* curves = app.add_subcommand(
      "curves", "Emit retained-attention decay curves as CSV");
  curves->add_option("--L", curves_args.half_length,
                     "Segment half length in latent frames")
      ->required();
  curves->add_option("--epsilon", curves_args.epsilon,
                     "Decay threshold at segment endpoints, in (0, 1)")
      ->capture_default_str();
  curves->add_option("--window", curves_args.window,
                     "Free-attention half-width: \"auto\" or a number")
      ->capture_default_str();
  CLI::Option* sweep_w = curves->add_flag(
      "--sweep-w", curves_args.sweep_w,
      "One column per window in {0, L/2, L-2}");
  curves
      ->add_flag("--sweep-eps", curves_args.sweep_eps,
                 "One column per epsilon in {0.3, 0.1, 0.01}")
      ->excludes(sweep_w);
  curves->add_option("--out", curves_args.out, "Write CSV to this path");

  ScheduleArgs validate_args;
  CLI::App* validate = app.add_subcommand(
      "validate", "Check a schedule file and echo the normalized timeline");
  validate
      ->add_option("schedule", validate_args.schedule_path,
                   "Schedule JSON file")
      ->required();
  validate->add_option("--out", validate_args.out, "Write echo to this path");

  ScheduleArgs penalty_args;
  CLI::App* penalty = app.add_subcommand(
      "penalty", "Emit the query x key penalty matrix as CSV");
  penalty
      ->add_option("schedule", penalty_args.schedule_path,
                   "Schedule JSON file")
      ->required();
  add_penalty_flags(penalty, penalty_args);
  penalty
      ->add_option("--mode", penalty_args.mode,
                   "Penalty mode: soft, hard, or off")
      ->check(CLI::IsMember({"soft", "hard", "off"}))
      ->capture_default_str();
  add_layout_flags(penalty, penalty_args);
  penalty->add_option("--out", penalty_args.out, "Write CSV to this path");

  ScheduleArgs occupancy_args;
  CLI::App* occupancy_cmd = app.add_subcommand(
      "occupancy", "Emit per-frame attention-mass fractions as CSV");
  occupancy_cmd
      ->add_option("schedule", occupancy_args.schedule_path,
                   "Schedule JSON file")
      ->required();
  add_penalty_flags(occupancy_cmd, occupancy_args);
  occupancy_cmd
      ->add_option("--mode", occupancy_args.mode,
                   "Penalty mode: soft, hard, or off")
      ->check(CLI::IsMember({"soft", "hard", "off"}))
      ->capture_default_str();
  add_layout_flags(occupancy_cmd, occupancy_args);
  occupancy_cmd
      ->add_option("--profile", occupancy_args.profile,
                   "Synthetic logits: uniform or random")
      ->check(CLI::IsMember({"uniform", "random"}))
      ->capture_default_str();
  occupancy_cmd
      ->add_option("--seed", occupancy_args.seed,
                   "Seed for the random profile")
      ->capture_default_str();
  occupancy_cmd->add_option("--out", occupancy_args.out,
                            "Write CSV to this path");

  ScheduleArgs compare_args;
  CLI::App* compare = app.add_subcommand(
      "compare", "Report SOFT vs HARD boundary smoothness");
  compare
      ->add_option("schedule", compare_args.schedule_path,
                   "Schedule JSON file")
      ->required();
  add_penalty_flags(compare, compare_args);
  add_layout_flags(compare, compare_args);
  compare
      ->add_option("--profile", compare_args.profile,
                   "Synthetic logits: uniform or random")
      ->check(CLI::IsMember({"uniform", "random"}))
      ->capture_default_str();
  compare
      ->add_option("--seed", compare_args.seed,
                   "Seed for the random profile")
      ->capture_default_str();
  compare->add_option("--out", compare_args.out, "Write report to this path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);  // prints help or the parse diagnostic
    return rc == 0 ? 0 : 2;
  }

  try {
    if (curves->parsed()) run_curves(curves_args);
    if (validate->parsed()) run_validate(validate_args);
    if (penalty->parsed()) run_penalty(penalty_args);
    if (occupancy_cmd->parsed()) run_occupancy(occupancy_args);
    if (compare->parsed()) run_compare(compare_args);
  } catch (const DegenerateRowError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
