#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "idnc/protocol.hpp"

namespace idnc {

enum class ChannelMode { Memoryless, Gec };
enum class FeedbackMode { Perfect, Limited };

struct ExperimentConfig {
  int num_users = 20;
  int num_packets = 30;
  long num_frames = 100;  // independent session iterations
  std::uint64_t master_seed = 1;

  ChannelMode channel = ChannelMode::Memoryless;
  double mean_erasure = 0.25;  // P: memoryless mean / GEC Good-state erasure
  double bad_erasure = 0.8;    // Q: GEC Bad-state erasure
  double mu = 0.2;             // forward memory factor
  double psi = 0.2;            // backward memory factor
  double stationary_bad = 0.5;  // target P_B when solving g, b from mu
  bool per_frame_redraw = true;  // +-50% uniform redraw around the mean

  FeedbackMode feedback = FeedbackMode::Perfect;
  int downlink_slots = 1;
  int uplink_slots = 1;
  BlindPolicy policy = BlindPolicy::Pessimist;

  std::vector<SolverKind> solvers = {SolverKind::DdcGraph};
  BpsoParams bpso;
  long guard_factor = 50;

  void validate() const;
};

/// Flat key = value config text ('#' starts a comment). Unknown keys raise
/// ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical key = value rendering (the hash input and the reproducibility
/// record).
std::string render_config(const ExperimentConfig& config);

/// FNV-1a 64-bit over the canonical rendering.
std::uint64_t config_hash(const ExperimentConfig& config);

struct FrameRecord {
  long frame = 0;
  SolverKind solver = SolverKind::DdcGraph;
  long completion = 0;     // recovery transmissions at overall completion
  double mean_delay = 0.0;  // average decoding delay per user
  long sum_delay = 0;
  long total_slots = 0;
  bool completed = false;
};

struct SolverSummary {
  long frames = 0;
  double mean_ct = 0.0;
  double stderr_ct = 0.0;
  double mean_dd = 0.0;
  double stderr_dd = 0.0;
};

struct RunStats {
  std::vector<FrameRecord> records;  // frame-major, solver-minor
  std::map<SolverKind, SolverSummary> summary;
};

/// Runs num_frames independent sessions per solver. All solvers of a frame
/// share the channel parameter draw and the session seed, so comparisons are
/// paired through common random numbers.
RunStats run_experiment(const ExperimentConfig& config);

enum class SweepAxis { M, N, P, Mu, TBpso };
SweepAxis axis_from_name(const std::string& name);

struct SweepRow {
  double value = 0.0;
  SolverKind solver = SolverKind::DdcGraph;
  SolverSummary summary;
};

/// One run_experiment per axis value with common derived seeds.
std::vector<SweepRow> sweep(const ExperimentConfig& config, SweepAxis axis,
                            const std::vector<double>& values);

std::string per_frame_csv(const RunStats& stats);
std::string sweep_csv(const std::vector<SweepRow>& rows, SweepAxis axis);
std::string json_summary(const ExperimentConfig& config, const RunStats& stats);

/// Mean and standard error of paired differences a[k] - b[k].
struct PairedStats {
  double mean_diff = 0.0;
  double stderr_diff = 0.0;
};
PairedStats paired_stats(const std::vector<double>& a,
                         const std::vector<double>& b);

}  // namespace idnc
