#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "idnc/errors.hpp"
#include "idnc/experiment.hpp"

using namespace idnc;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig config;
  config.num_users = 5;
  config.num_packets = 6;
  config.num_frames = 8;
  config.master_seed = 42;
  config.channel = ChannelMode::Memoryless;
  config.mean_erasure = 0.3;
  config.solvers = {SolverKind::DdcGraph, SolverKind::Ssp};
  return config;
}

}  // namespace

TEST_CASE("config text round trip") {
  ExperimentConfig config = small_config();
  config.channel = ChannelMode::Gec;
  config.bad_erasure = 0.7;
  config.mu = 0.4;
  config.psi = 0.3;
  config.feedback = FeedbackMode::Limited;
  config.downlink_slots = 2;
  config.uplink_slots = 3;
  config.policy = BlindPolicy::Optimist;
  config.per_frame_redraw = false;

  const ExperimentConfig back = parse_config(render_config(config));
  CHECK(render_config(back) == render_config(config));
  CHECK(config_hash(back) == config_hash(config));
  CHECK(back.num_users == 5);
  CHECK(back.channel == ChannelMode::Gec);
  CHECK(back.feedback == FeedbackMode::Limited);
  CHECK(back.policy == BlindPolicy::Optimist);
  CHECK(back.solvers == config.solvers);
}

TEST_CASE("config parsing accepts comments and rejects junk") {
  CHECK_NOTHROW(parse_config("# only a comment\nM = 3\nN = 4\n"));
  CHECK_THROWS_AS(parse_config("bogus_key = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("M\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("M = lots\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("channel = carrier-pigeon\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/path.cfg"), ConfigError);
}

TEST_CASE("config validation") {
  ExperimentConfig config = small_config();
  config.channel = ChannelMode::Gec;
  config.mean_erasure = 0.8;
  config.bad_erasure = 0.2;  // P > Q is inadmissible for a GEC
  CHECK_THROWS_AS(config.validate(), ConfigError);

  config = small_config();
  config.solvers.clear();
  CHECK_THROWS_AS(config.validate(), ConfigError);

  config = small_config();
  config.stationary_bad = 1.0;
  CHECK_THROWS_AS(config.validate(), ConfigError);
}

TEST_CASE("the hash tracks every semantic field") {
  const ExperimentConfig base = small_config();
  ExperimentConfig other = base;
  other.mean_erasure = 0.31;
  CHECK(config_hash(base) != config_hash(other));
  other = base;
  other.master_seed = 43;
  CHECK(config_hash(base) != config_hash(other));
}

TEST_CASE("experiments are bit-for-bit reproducible") {
  const ExperimentConfig config = small_config();
  const RunStats a = run_experiment(config);
  const RunStats b = run_experiment(config);
  CHECK(per_frame_csv(a) == per_frame_csv(b));
  CHECK(json_summary(config, a) == json_summary(config, b));
}

TEST_CASE("per-frame csv shape") {
  const ExperimentConfig config = small_config();
  const RunStats stats = run_experiment(config);
  const std::string csv = per_frame_csv(stats);
  CHECK(csv.rfind("frame,solver,completion,sum_delay,mean_delay,total_slots,"
                  "completed\n", 0) == 0);
  const long lines = std::count(csv.begin(), csv.end(), '\n');
  CHECK(lines == 1 + 8 * 2);  // header + frames * solvers
  CHECK(stats.records.size() == 16);
}

TEST_CASE("summary aggregates match the records") {
  const ExperimentConfig config = small_config();
  const RunStats stats = run_experiment(config);
  for (const auto& [solver, summary] : stats.summary) {
    double sum_ct = 0.0, sum_dd = 0.0;
    long count = 0;
    for (const FrameRecord& r : stats.records) {
      if (r.solver != solver) continue;
      sum_ct += static_cast<double>(r.completion);
      sum_dd += r.mean_delay;
      ++count;
    }
    CHECK(summary.frames == count);
    CHECK(summary.mean_ct ==
          doctest::Approx(sum_ct / count).epsilon(1e-9));
    CHECK(summary.mean_dd ==
          doctest::Approx(sum_dd / count).epsilon(1e-9));
    CHECK(summary.stderr_ct >= 0.0);
  }
}

TEST_CASE("a clean channel needs no recovery phase") {
  ExperimentConfig config = small_config();
  config.mean_erasure = 0.0;
  config.per_frame_redraw = false;
  config.num_frames = 4;
  config.solvers = {SolverKind::DdcGraph};
  const RunStats stats = run_experiment(config);
  for (const FrameRecord& r : stats.records) {
    CHECK(r.completed);
    CHECK(r.completion == 0);
    CHECK(r.sum_delay == 0);
  }
}

TEST_CASE("a memoryless gec equals the memoryless mode statistically") {
  // mu = 0 makes the state i.i.d. per slot, so with PB = 0.5 the per-slot
  // erasure probability is (P + Q) / 2: compare against the dedicated
  // memoryless mode at that rate
  ExperimentConfig gec = small_config();
  gec.channel = ChannelMode::Gec;
  gec.mean_erasure = 0.1;
  gec.bad_erasure = 0.5;
  gec.mu = 0.0;
  gec.psi = 0.0;
  gec.per_frame_redraw = false;
  gec.num_frames = 150;
  gec.solvers = {SolverKind::DdcGraph};

  ExperimentConfig flat = gec;
  flat.channel = ChannelMode::Memoryless;
  flat.mean_erasure = 0.3;
  flat.master_seed = 4242;  // independent draws for a two-sample comparison

  const SolverSummary a =
      run_experiment(gec).summary.at(SolverKind::DdcGraph);
  const SolverSummary b =
      run_experiment(flat).summary.at(SolverKind::DdcGraph);
  const double spread =
      std::sqrt(a.stderr_ct * a.stderr_ct + b.stderr_ct * b.stderr_ct);
  CHECK(std::abs(a.mean_ct - b.mean_ct) <= 3.0 * spread);
}

TEST_CASE("sweep produces one row per value and solver") {
  ExperimentConfig config = small_config();
  config.num_frames = 4;
  const std::vector<SweepRow> rows =
      sweep(config, SweepAxis::P, {0.2, 0.4});
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].value == 0.2);
  CHECK(rows[3].value == 0.4);
  const std::string csv = sweep_csv(rows, SweepAxis::P);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);

  CHECK(axis_from_name("P") == SweepAxis::P);
  CHECK_THROWS_AS(axis_from_name("nope"), ConfigError);
}

TEST_CASE("limited feedback experiment runs end to end") {
  ExperimentConfig config = small_config();
  config.feedback = FeedbackMode::Limited;
  config.channel = ChannelMode::Gec;
  config.bad_erasure = 0.7;
  config.num_frames = 5;
  config.solvers = {SolverKind::DdcGraph, SolverKind::BlindNve};
  const RunStats stats = run_experiment(config);
  CHECK(stats.records.size() == 10);
  for (const FrameRecord& r : stats.records) CHECK(r.completed);
}

TEST_CASE("paired statistics") {
  const PairedStats same = paired_stats({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0});
  CHECK(same.mean_diff == 0.0);
  CHECK(same.stderr_diff == 0.0);
  const PairedStats shift = paired_stats({2.0, 3.0, 4.0}, {1.0, 2.0, 3.0});
  CHECK(shift.mean_diff == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(shift.stderr_diff == doctest::Approx(0.0).epsilon(1e-12));
  const PairedStats mixed = paired_stats({1.0, 5.0}, {0.0, 0.0});
  CHECK(mixed.mean_diff == doctest::Approx(3.0).epsilon(1e-12));
  // sample sd of {1, 5} is 2*sqrt(2); stderr over n = 2 is 2
  CHECK(mixed.stderr_diff == doctest::Approx(2.0).epsilon(1e-12));
}
