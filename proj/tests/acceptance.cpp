// Acceptance suite: one check per shipping criterion, each printing a
// PASS/FAIL line. Run all with no arguments or a single one with
// `acceptance --criterion N`.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "swarmsim/harness.hpp"

using namespace swarmsim;

namespace {

struct Checker {
  bool ok = true;
  std::string detail;

  void require(bool condition, const std::string& what) {
    if (!condition) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

double seconds_since(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// --- criterion 1: frame backlog and throughput reproduction -------------------

bool criterion_backlog(Checker& c) {
  const auto start = std::chrono::steady_clock::now();
  FrameQueue q;
  q.service_time = 0.231;
  const double dt = 1.0 / 30.0;
  std::int64_t processed = 0;
  for (int tick = 0; tick < 300; ++tick) {
    const double now = tick * dt;
    const double arrival = now;
    processed += frame_queue_step(q, {&arrival, 1}, now, dt).processed;
  }
  const double throughput = static_cast<double>(processed) / 10.0;
  const double backlog_rate = static_cast<double>(q.pending.size()) / 10.0;
  const double elapsed = seconds_since(start);
  c.require(std::abs(throughput - 4.33) <= 0.1,
            "throughput " + fmt(throughput) + " outside 4.33 +/- 0.1 fps");
  c.require(std::abs(backlog_rate - 25.7) <= 0.5,
            "backlog growth " + fmt(backlog_rate) + " outside 25.7 +/- 0.5 frames/s");
  c.require(elapsed < 1.0, "runtime " + fmt(elapsed) + "s exceeds 1s");
  c.detail += (c.detail.empty() ? "" : "; ") + std::string("throughput ") + fmt(throughput) +
              " fps, backlog " + fmt(backlog_rate) + " frames/s, " + fmt(elapsed) + "s";
  return c.ok;
}

// --- criterion 2: default experiment end to end ------------------------------

bool criterion_scenario(Checker& c) {
  const auto start = std::chrono::steady_clock::now();
  const Scenario s = load_scenario("{}");
  const RunResult run = run_scenario(s);
  const double elapsed = seconds_since(start);
  c.require(run.summary.first_lock_time_s >= 0.0, "target never acquired");
  c.require(run.summary.lock_ratio_after_first_lock >= 0.95,
            "lock ratio " + fmt(run.summary.lock_ratio_after_first_lock) + " below 0.95");
  c.require(run.summary.final_tracking_error_m < 0.3,
            "final offset distance " + fmt(run.summary.final_tracking_error_m) + " >= 0.3 m");
  c.require(run.summary.min_airborne_z_m >= 0.10 - 1e-9,
            "airborne altitude dipped to " + fmt(run.summary.min_airborne_z_m) + " m");
  c.require(elapsed < 30.0, "runtime " + fmt(elapsed) + "s exceeds 30s");
  c.detail += (c.detail.empty() ? "" : "; ") + std::string("lock ") +
              fmt(run.summary.lock_ratio_after_first_lock) + ", final error " +
              fmt(run.summary.final_tracking_error_m) + " m, min z " +
              fmt(run.summary.min_airborne_z_m) + " m, " + fmt(elapsed) + "s";
  return c.ok;
}

// --- criterion 3: battery endurance ------------------------------------------

bool criterion_endurance(Checker& c) {
  BatteryState battery;  // 1.1 Ah, full
  const double dt = 1.0 / 30.0;
  double t = 0.0;
  bool depleted = false;
  while (!depleted && t < 700.0) {
    std::tie(battery, depleted) = battery_step(battery, 6.6, dt);
    t += dt;
  }
  c.require(depleted, "battery never depleted");
  c.require(std::abs(t - 600.0) <= 1.0, "depletion at " + fmt(t) + "s, expected 600 +/- 1");
  c.detail += (c.detail.empty() ? "" : "; ") + std::string("depleted at ") + fmt(t) + "s";
  return c.ok;
}

// --- criterion 4: imaging oracle equivalence ----------------------------------

bool criterion_imaging_oracles(Checker& c) {
  Rng rng(2024);

  int mec_failures = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_u64() % 12);
    std::vector<Point2> pts;
    for (int i = 0; i < n; ++i) pts.push_back({rng.uniform(0, 100), rng.uniform(0, 100)});
    const Circle fast = min_enclosing_circle(pts);
    const Circle slow = oracles::mec_brute_force(pts);
    if (std::abs(fast.radius - slow.radius) > 1e-9 ||
        std::abs(fast.center.x - slow.center.x) > 1e-9 ||
        std::abs(fast.center.y - slow.center.y) > 1e-9) {
      ++mec_failures;
    }
  }
  c.require(mec_failures == 0,
            std::to_string(mec_failures) + "/200 enclosing-circle mismatches beyond 1e-9");

  int hsv_mismatches = 0;
  for (int r = 0; r < 256; r += 8) {
    for (int g = 0; g < 256; g += 8) {
      for (int b = 0; b < 256; b += 8) {
        ImageBuffer px = ImageBuffer::filled(1, 1, 3, 0);
        px.data = {static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                   static_cast<std::uint8_t>(b)};
        const ImageBuffer hsv = rgb_to_hsv(px);
        int h, sv, vv;
        oracles::hsv_reference(r, g, b, h, sv, vv);
        if (hsv.data[0] != h || hsv.data[1] != sv || hsv.data[2] != vv) ++hsv_mismatches;
      }
    }
  }
  c.require(hsv_mismatches == 0, std::to_string(hsv_mismatches) + " HSV grid mismatches");

  int blur_overruns = 0;
  for (int trial = 0; trial < 4; ++trial) {
    ImageBuffer img = ImageBuffer::filled(40, 30, 3, 0);
    for (auto& v : img.data) v = static_cast<std::uint8_t>(rng.next_u64() & 0xff);
    const ImageBuffer fast = gaussian_blur_5x5(img);
    const ImageBuffer slow = oracles::blur_reference(img);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
      if (std::abs(int(fast.data[i]) - int(slow.data[i])) > 1) ++blur_overruns;
    }
  }
  c.require(blur_overruns == 0, std::to_string(blur_overruns) + " blur pixels off by more than 1");
  return c.ok;
}

// --- criterion 5: architecture comparison over the channel grid ---------------

Scenario sweep_scenario() {
  // Third-resolution replica of the default optics (same 0.66 m equilibrium).
  // The leader bobs vertically for the whole run, so the comparison is driven
  // by how each architecture copes with a continuously moving target: stale
  // telemetry translates directly into pursuit lag, while the vision loop
  // needs no channel at all.
  Scenario s = load_scenario(R"({
    "duration_s": 15,
    "intrinsics": {"fx": 220, "fy": 220, "cx": 160, "cy": 120, "width": 320, "height": 240},
    "scene": {"ball": {"radius_m": 0.045}},
    "agents": {"followers": [{"position": [-0.81, 0, 1.0], "yaw": 0}]},
    "central": {"desired_offset": [-0.81, 0, 0], "staleness_timeout_s": 2.0},
    "leader_plan": {
      "legs": [[0, 0, 0.4], [0, 0, -0.4], [0, 0, 0.4], [0, 0, -0.4], [0, 0, 0.4],
               [0, 0, -0.4], [0, 0, 0.4], [0, 0, -0.4], [0, 0, 0.4]],
      "speed_mps": 0.25
    }
  })");
  return s;
}

bool criterion_comparison(Checker& c) {
  const auto start = std::chrono::steady_clock::now();
  const double losses[] = {0.0, 0.25, 0.5};
  const double latencies[] = {0.0, 0.1, 0.2};
  const std::uint64_t seeds[] = {1, 2, 3, 4, 5};

  int worse_at_worst = 0;
  for (const std::uint64_t seed : seeds) {
    std::map<std::pair<double, double>, double> central_rms;
    std::string decentral_bytes;
    double decentral_rms = -1.0;

    for (const double loss : losses) {
      for (const double latency : latencies) {
        Scenario s = sweep_scenario();
        s.seed = seed;
        s.channel.loss_prob = loss;
        s.channel.latency_s = latency;

        s.mode = SwarmModeKind::centralized;
        const RunResult central = run_scenario(s);
        central_rms[{loss, latency}] = central.summary.rms_tracking_error_m;

        s.mode = SwarmModeKind::decentralized;
        const RunResult decentral = run_scenario(s);
        const std::string bytes = metrics_to_csv(decentral.metrics);
        if (decentral_bytes.empty()) {
          decentral_bytes = bytes;
          decentral_rms = decentral.summary.rms_tracking_error_m;
        } else {
          c.require(bytes == decentral_bytes,
                    "decentralized trace differs at loss " + fmt(loss) + ", latency " +
                        fmt(latency) + ", seed " + std::to_string(seed));
        }
      }
    }

    for (std::size_t i = 0; i + 1 < std::size(losses); ++i) {
      for (const double latency : latencies) {
        const double lo = central_rms[{losses[i], latency}];
        const double hi = central_rms[{losses[i + 1], latency}];
        c.require(hi >= lo - 1e-12, "centralized rms not monotone in loss at latency " +
                                        fmt(latency) + ", seed " + std::to_string(seed));
      }
    }
    for (const double loss : losses) {
      for (std::size_t i = 0; i + 1 < std::size(latencies); ++i) {
        const double lo = central_rms[{loss, latencies[i]}];
        const double hi = central_rms[{loss, latencies[i + 1]}];
        c.require(hi >= lo - 1e-12, "centralized rms not monotone in latency at loss " +
                                        fmt(loss) + ", seed " + std::to_string(seed));
      }
    }
    if (central_rms[{0.5, 0.2}] > decentral_rms) ++worse_at_worst;
  }

  const double elapsed = seconds_since(start);
  c.require(worse_at_worst >= 4, "centralized beat decentralized at (0.5, 0.2s) in " +
                                     std::to_string(5 - worse_at_worst) + "/5 seeds");
  c.require(elapsed < 300.0, "runtime " + fmt(elapsed) + "s exceeds 5 minutes");
  c.detail += (c.detail.empty() ? "" : "; ") + std::string("worse at (0.5,0.2) in ") +
              std::to_string(worse_at_worst) + "/5 seeds, " + fmt(elapsed) + "s";
  return c.ok;
}

// --- criterion 6: localization statistics -------------------------------------

bool criterion_localization(Checker& c) {
  Rng rng(7);
  const double sigma = 0.05;
  const Pose truth{{0.4, -0.2, 1.1}, 0.25};
  double err1 = 0.0;
  double err8 = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<MarkerObservation> obs;
    for (int i = 0; i < 8; ++i) {
      Pose noisy = truth;
      noisy.position += Vec3{rng.normal(), rng.normal(), rng.normal()} * sigma;
      obs.push_back({i, noisy});
    }
    err1 += (estimate_pose({obs.data(), 1}).pose.position - truth.position).norm();
    err8 += (estimate_pose(obs).pose.position - truth.position).norm();
  }
  const double mean1 = err1 / 1000.0;
  const double mean8 = err8 / 1000.0;
  const double expected = mean1 / std::sqrt(8.0);
  c.require(mean8 >= 0.75 * expected && mean8 <= 1.25 * expected,
            "mean error at N=8 is " + fmt(mean8) + ", expected " + fmt(expected) + " +/- 25%");
  c.detail += (c.detail.empty() ? "" : "; ") + std::string("N=1 ") + fmt(mean1) + " m, N=8 " +
              fmt(mean8) + " m, ratio " + fmt(mean1 / mean8);
  return c.ok;
}

// --- criterion 7: failover contract --------------------------------------------

bool criterion_failover(Checker& c) {
  Scenario s = sweep_scenario();
  s.duration_s = 8.0;
  s.failures.push_back({FailureKind::central, 5.0});
  s.central.staleness_timeout_s = 0.5;

  s.mode = SwarmModeKind::centralized;
  const RunResult central = run_scenario(s);
  bool checked_any = false;
  for (const AppliedCommandRecord& rec : central.command_log) {
    if (rec.time_s > 5.5 + 1e-9) {
      checked_any = true;
      if (!rec.command.is_hover()) {
        c.require(false, "non-hover command at t=" + fmt(rec.time_s));
        break;
      }
    }
  }
  c.require(checked_any, "no commands observed after t=5.5");

  s.mode = SwarmModeKind::decentralized;
  const RunResult with_failure = run_scenario(s);
  Scenario clean = s;
  clean.failures.clear();
  const RunResult without_failure = run_scenario(clean);
  c.require(metrics_to_csv(with_failure.metrics) == metrics_to_csv(without_failure.metrics),
            "decentralized trace changed under a central failure");
  return c.ok;
}

// --- criterion 8: determinism ---------------------------------------------------

bool criterion_determinism(Checker& c) {
  const Scenario s = load_scenario("{}");
  const RunResult a = run_scenario(s);
  const RunResult b = run_scenario(s);
  c.require(metrics_to_csv(a.metrics) == metrics_to_csv(b.metrics),
            "metrics.csv bytes differ between identical runs");
  return c.ok;
}

struct Criterion {
  int id;
  const char* name;
  std::function<bool(Checker&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);
  }

  const std::vector<Criterion> criteria = {
      {1, "frame backlog and effective throughput", criterion_backlog},
      {2, "default experiment end-to-end tracking", criterion_scenario},
      {3, "battery endurance", criterion_endurance},
      {4, "imaging oracle equivalence", criterion_imaging_oracles},
      {5, "architecture comparison over the channel grid", criterion_comparison},
      {6, "localization error shrinks with marker count", criterion_localization},
      {7, "failover contract", criterion_failover},
      {8, "byte-identical reruns", criterion_determinism},
  };

  int failures = 0;
  for (const Criterion& criterion : criteria) {
    if (only != 0 && criterion.id != only) continue;
    Checker checker;
    bool ok = false;
    try {
      ok = criterion.run(checker);
    } catch (const std::exception& e) {
      checker.ok = false;
      checker.detail = std::string("exception: ") + e.what();
    }
    ok = ok && checker.ok;
    std::printf("[%s] criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", criterion.id, criterion.name,
                checker.detail.empty() ? "" : " -- ", checker.detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
