#include "idnc/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "idnc/errors.hpp"

namespace idnc {

void ExperimentConfig::validate() const {
  if (num_users < 1) throw ConfigError("config: M must be >= 1");
  if (num_packets < 1) throw ConfigError("config: N must be >= 1");
  if (num_frames < 1) throw ConfigError("config: frames must be >= 1");
  if (mean_erasure < 0.0 || mean_erasure >= 1.0)
    throw ConfigError("config: P must lie in [0, 1)");
  if (bad_erasure < 0.0 || bad_erasure > 1.0)
    throw ConfigError("config: Q must lie in [0, 1]");
  if (channel == ChannelMode::Gec && mean_erasure > bad_erasure)
    throw ConfigError("config: GEC mode needs P <= Q");
  if (mu < 0.0 || mu >= 1.0 || psi < 0.0 || psi >= 1.0)
    throw ConfigError("config: memory factors must lie in [0, 1)");
  if (stationary_bad <= 0.0 || stationary_bad >= 1.0)
    throw ConfigError("config: PB must lie in (0, 1)");
  if (downlink_slots < 1 || uplink_slots < 1)
    throw ConfigError("config: Td and Tu must be >= 1");
  if (solvers.empty()) throw ConfigError("config: at least one solver");
  bpso.validate();
}

namespace {

const char* channel_name(ChannelMode mode) {
  return mode == ChannelMode::Memoryless ? "memoryless" : "gec";
}
const char* feedback_name(FeedbackMode mode) {
  return mode == FeedbackMode::Perfect ? "perfect" : "limited";
}
const char* policy_name(BlindPolicy policy) {
  switch (policy) {
    case BlindPolicy::Pessimist: return "pessimist";
    case BlindPolicy::Optimist: return "optimist";
    case BlindPolicy::Realistic: return "realistic";
  }
  return "?";
}

BlindPolicy policy_from_name(const std::string& name) {
  if (name == "pessimist") return BlindPolicy::Pessimist;
  if (name == "optimist") return BlindPolicy::Optimist;
  if (name == "realistic") return BlindPolicy::Realistic;
  throw ConfigError("unknown policy: " + name);
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig config;
  std::istringstream in(text);
  std::string line;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return std::string();
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: expected key = value, got: " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "M") config.num_users = std::stoi(value);
      else if (key == "N") config.num_packets = std::stoi(value);
      else if (key == "frames") config.num_frames = std::stol(value);
      else if (key == "seed") config.master_seed = std::stoull(value);
      else if (key == "channel") {
        if (value == "memoryless") config.channel = ChannelMode::Memoryless;
        else if (value == "gec") config.channel = ChannelMode::Gec;
        else throw ConfigError("unknown channel mode: " + value);
      } else if (key == "P") config.mean_erasure = std::stod(value);
      else if (key == "Q") config.bad_erasure = std::stod(value);
      else if (key == "mu") config.mu = std::stod(value);
      else if (key == "psi") config.psi = std::stod(value);
      else if (key == "PB") config.stationary_bad = std::stod(value);
      else if (key == "redraw") config.per_frame_redraw = value == "1" || value == "true";
      else if (key == "feedback") {
        if (value == "perfect") config.feedback = FeedbackMode::Perfect;
        else if (value == "limited") config.feedback = FeedbackMode::Limited;
        else throw ConfigError("unknown feedback mode: " + value);
      } else if (key == "Td") config.downlink_slots = std::stoi(value);
      else if (key == "Tu") config.uplink_slots = std::stoi(value);
      else if (key == "policy") config.policy = policy_from_name(value);
      else if (key == "solvers") {
        config.solvers.clear();
        std::istringstream list(value);
        std::string name;
        while (std::getline(list, name, ','))
          config.solvers.push_back(solver_from_name(trim(name)));
      } else if (key == "bpso_particles") config.bpso.num_particles = std::stoi(value);
      else if (key == "bpso_iterations") config.bpso.num_iterations = std::stoi(value);
      else if (key == "bpso_c1") config.bpso.c1 = std::stod(value);
      else if (key == "bpso_c2") config.bpso.c2 = std::stod(value);
      else if (key == "guard") config.guard_factor = std::stol(value);
      else throw ConfigError("config: unknown key: " + key);
    } catch (const std::invalid_argument&) {
      throw ConfigError("config: bad value for " + key + ": " + value);
    } catch (const std::out_of_range&) {
      throw ConfigError("config: value out of range for " + key);
    }
  }
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string render_config(const ExperimentConfig& config) {
  std::ostringstream os;
  os << "M = " << config.num_users << '\n'
     << "N = " << config.num_packets << '\n'
     << "frames = " << config.num_frames << '\n'
     << "seed = " << config.master_seed << '\n'
     << "channel = " << channel_name(config.channel) << '\n'
     << "P = " << format_double(config.mean_erasure) << '\n'
     << "Q = " << format_double(config.bad_erasure) << '\n'
     << "mu = " << format_double(config.mu) << '\n'
     << "psi = " << format_double(config.psi) << '\n'
     << "PB = " << format_double(config.stationary_bad) << '\n'
     << "redraw = " << (config.per_frame_redraw ? 1 : 0) << '\n'
     << "feedback = " << feedback_name(config.feedback) << '\n'
     << "Td = " << config.downlink_slots << '\n'
     << "Tu = " << config.uplink_slots << '\n'
     << "policy = " << policy_name(config.policy) << '\n';
  os << "solvers = ";
  for (std::size_t s = 0; s < config.solvers.size(); ++s) {
    if (s) os << ',';
    os << solver_name(config.solvers[s]);
  }
  os << '\n'
     << "bpso_particles = " << config.bpso.num_particles << '\n'
     << "bpso_iterations = " << config.bpso.num_iterations << '\n'
     << "bpso_c1 = " << format_double(config.bpso.c1) << '\n'
     << "bpso_c2 = " << format_double(config.bpso.c2) << '\n'
     << "guard = " << config.guard_factor << '\n';
  return os.str();
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  const std::string text = render_config(config);
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

namespace {

double truncated(double x) {
  const double lo = 1e-6;
  const double hi = 1.0 - 1e-6;
  return x < lo ? lo : (x > hi ? hi : x);
}

/// Per-frame channel parameters: the mean stays at the configured value, each
/// user's probabilities are redrawn uniformly in +-50% around it.
void draw_channels(const ExperimentConfig& config, SplitMix64& rng,
                   std::vector<GecParams>& forward,
                   std::vector<GecParams>& backward) {
  forward.clear();
  backward.clear();
  for (int i = 0; i < config.num_users; ++i) {
    auto jitter = [&](double mean) {
      if (!config.per_frame_redraw) return truncated(mean);
      return truncated(rng.uniform(0.5 * mean, 1.5 * mean));
    };
    if (config.channel == ChannelMode::Memoryless) {
      const double p = jitter(config.mean_erasure);
      forward.push_back(GecParams{0.5, 0.5, p, p});
      backward.push_back(config.feedback == FeedbackMode::Perfect
                             ? GecParams::lossless()
                             : GecParams{0.5, 0.5, p, p});
    } else {
      double p = jitter(config.mean_erasure);
      double q = jitter(config.bad_erasure);
      if (p > q) p = q;
      const double pg = 1.0 - config.stationary_bad;
      const GecParams fwd{(1.0 - config.mu) * pg,
                          (1.0 - config.mu) * config.stationary_bad, p, q};
      const GecParams bwd{(1.0 - config.psi) * pg,
                          (1.0 - config.psi) * config.stationary_bad, p, q};
      forward.push_back(fwd);
      backward.push_back(config.feedback == FeedbackMode::Perfect
                             ? GecParams::lossless()
                             : bwd);
    }
  }
}

SolverSummary summarize(const std::vector<FrameRecord>& records,
                        SolverKind solver) {
  SolverSummary summary;
  double sum_ct = 0.0, sum_dd = 0.0;
  for (const FrameRecord& rec : records) {
    if (rec.solver != solver) continue;
    ++summary.frames;
    sum_ct += static_cast<double>(rec.completion);
    sum_dd += rec.mean_delay;
  }
  if (summary.frames == 0) return summary;
  summary.mean_ct = sum_ct / static_cast<double>(summary.frames);
  summary.mean_dd = sum_dd / static_cast<double>(summary.frames);
  double var_ct = 0.0, var_dd = 0.0;
  for (const FrameRecord& rec : records) {
    if (rec.solver != solver) continue;
    const double dct = static_cast<double>(rec.completion) - summary.mean_ct;
    const double ddd = rec.mean_delay - summary.mean_dd;
    var_ct += dct * dct;
    var_dd += ddd * ddd;
  }
  if (summary.frames > 1) {
    const double n = static_cast<double>(summary.frames);
    summary.stderr_ct = std::sqrt(var_ct / (n - 1.0) / n);
    summary.stderr_dd = std::sqrt(var_dd / (n - 1.0) / n);
  }
  return summary;
}

}  // namespace

RunStats run_experiment(const ExperimentConfig& config) {
  config.validate();
  RunStats stats;
  for (long frame = 0; frame < config.num_frames; ++frame) {
    SplitMix64 param_rng(derive_seed(config.master_seed, 1,
                                     static_cast<std::uint64_t>(frame)));
    std::vector<GecParams> forward, backward;
    draw_channels(config, param_rng, forward, backward);

    SessionConfig session_cfg;
    session_cfg.num_users = config.num_users;
    session_cfg.num_packets = config.num_packets;
    session_cfg.forward = forward;
    session_cfg.backward = backward;
    session_cfg.limited_feedback = config.feedback == FeedbackMode::Limited;
    if (session_cfg.limited_feedback)
      session_cfg.frame = FrameConfig::make(config.downlink_slots,
                                            config.uplink_slots,
                                            config.num_users);

    const std::uint64_t session_seed =
        derive_seed(config.master_seed, 2, static_cast<std::uint64_t>(frame));
    for (std::size_t s = 0; s < config.solvers.size(); ++s) {
      Session session(session_cfg, session_seed);
      RunnerConfig runner;
      runner.solver = config.solvers[s];
      runner.policy = config.policy;
      runner.bpso = config.bpso;
      runner.guard_factor = config.guard_factor;
      SplitMix64 decision_rng(derive_seed(
          config.master_seed, 3, static_cast<std::uint64_t>(frame), s));
      const RunResult result = run_session(session, runner, decision_rng);

      FrameRecord rec;
      rec.frame = frame;
      rec.solver = config.solvers[s];
      rec.completion = result.completion_transmissions;
      rec.total_slots = result.total_slots;
      rec.completed = result.completed;
      for (long d : result.user_delay) rec.sum_delay += d;
      rec.mean_delay = static_cast<double>(rec.sum_delay) /
                       static_cast<double>(config.num_users);
      stats.records.push_back(rec);
    }
  }
  for (SolverKind solver : config.solvers)
    stats.summary[solver] = summarize(stats.records, solver);
  return stats;
}

SweepAxis axis_from_name(const std::string& name) {
  if (name == "M") return SweepAxis::M;
  if (name == "N") return SweepAxis::N;
  if (name == "P") return SweepAxis::P;
  if (name == "mu") return SweepAxis::Mu;
  if (name == "T_bpso") return SweepAxis::TBpso;
  throw ConfigError("unknown sweep axis: " + name);
}

namespace {

const char* axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::M: return "M";
    case SweepAxis::N: return "N";
    case SweepAxis::P: return "P";
    case SweepAxis::Mu: return "mu";
    case SweepAxis::TBpso: return "T_bpso";
  }
  return "?";
}

ExperimentConfig apply_axis(ExperimentConfig config, SweepAxis axis,
                            double value) {
  switch (axis) {
    case SweepAxis::M: config.num_users = static_cast<int>(value); break;
    case SweepAxis::N: config.num_packets = static_cast<int>(value); break;
    case SweepAxis::P: config.mean_erasure = value; break;
    case SweepAxis::Mu:
      config.mu = value;
      config.psi = value;
      break;
    case SweepAxis::TBpso:
      config.bpso.num_iterations = static_cast<int>(value);
      break;
  }
  return config;
}

}  // namespace

std::vector<SweepRow> sweep(const ExperimentConfig& config, SweepAxis axis,
                            const std::vector<double>& values) {
  std::vector<SweepRow> rows;
  for (double value : values) {
    const ExperimentConfig point = apply_axis(config, axis, value);
    const RunStats stats = run_experiment(point);
    for (SolverKind solver : point.solvers) {
      SweepRow row;
      row.value = value;
      row.solver = solver;
      row.summary = stats.summary.at(solver);
      rows.push_back(row);
    }
  }
  return rows;
}

std::string per_frame_csv(const RunStats& stats) {
  std::string out = "frame,solver,completion,sum_delay,mean_delay,total_slots,completed\n";
  char buf[160];
  for (const FrameRecord& rec : stats.records) {
    std::snprintf(buf, sizeof(buf), "%ld,%s,%ld,%ld,%.9f,%ld,%d\n", rec.frame,
                  solver_name(rec.solver), rec.completion, rec.sum_delay,
                  rec.mean_delay, rec.total_slots, rec.completed ? 1 : 0);
    out += buf;
  }
  return out;
}

std::string sweep_csv(const std::vector<SweepRow>& rows, SweepAxis axis) {
  std::string out = std::string(axis_name(axis)) +
                    ",solver,frames,mean_ct,stderr_ct,mean_dd,stderr_dd\n";
  char buf[200];
  for (const SweepRow& row : rows) {
    std::snprintf(buf, sizeof(buf), "%.9g,%s,%ld,%.9f,%.9f,%.9f,%.9f\n",
                  row.value, solver_name(row.solver), row.summary.frames,
                  row.summary.mean_ct, row.summary.stderr_ct,
                  row.summary.mean_dd, row.summary.stderr_dd);
    out += buf;
  }
  return out;
}

std::string json_summary(const ExperimentConfig& config,
                         const RunStats& stats) {
  nlohmann::json j;
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(config_hash(config)));
  j["config_hash"] = hash;
  nlohmann::json per_solver = nlohmann::json::object();
  for (const auto& [solver, summary] : stats.summary) {
    nlohmann::json s;
    s["frames"] = summary.frames;
    s["mean_ct"] = summary.mean_ct;
    s["stderr_ct"] = summary.stderr_ct;
    s["mean_dd"] = summary.mean_dd;
    s["stderr_dd"] = summary.stderr_dd;
    per_solver[solver_name(solver)] = s;
  }
  j["per_solver"] = per_solver;
  return j.dump(2) + "\n";
}

PairedStats paired_stats(const std::vector<double>& a,
                         const std::vector<double>& b) {
  PairedStats out;
  const std::size_t n = a.size();
  if (n == 0 || n != b.size()) return out;
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) sum += a[k] - b[k];
  out.mean_diff = sum / static_cast<double>(n);
  if (n > 1) {
    double var = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double d = a[k] - b[k] - out.mean_diff;
      var += d * d;
    }
    out.stderr_diff = std::sqrt(var / static_cast<double>(n - 1) /
                                static_cast<double>(n));
  }
  return out;
}

}  // namespace idnc
