#include "fmcwsim/eval.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fmcwsim/errors.hpp"

namespace fmcwsim {
namespace {

constexpr double kTimeTolerance = 1e-6;

struct LinearSolve {
  double a, b, c;  // a sin + b cos + c
  double sse;
};

LinearSolve solve_for_period(std::span<const double> t, std::span<const double> y, double period) {
  const auto n = static_cast<Eigen::Index>(t.size());
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd rhs(n);
  const double omega = 2.0 * std::numbers::pi / period;
  for (Eigen::Index i = 0; i < n; ++i) {
    design(i, 0) = std::sin(omega * t[i]);
    design(i, 1) = std::cos(omega * t[i]);
    design(i, 2) = 1.0;
    rhs(i) = y[i];
  }
  const Eigen::Vector3d x = design.colPivHouseholderQr().solve(rhs);
  const double sse = (design * x - rhs).squaredNorm();
  return {x(0), x(1), x(2), sse};
}

}  // namespace

GroundTruthTrack ground_truth_track(const Scene& scene, std::string_view target_id) {
  const Target* target = scene.find(target_id);
  if (!target) throw UnknownTargetError("no target with id '" + std::string(target_id) + "'");
  GroundTruthTrack track;
  track.target_id = target->id;
  track.samples.reserve(scene.frame_count());
  for (std::uint32_t f = 0; f < scene.frame_count(); ++f) {
    const double t = scene.frame_time(f);
    const Vec3 p = position_at(target->trajectory, t);
    const Vec3 v = velocity_at(target->trajectory, t);
    track.samples.push_back({t, radial_velocity(p, v, scene.sensor().position)});
  }
  return track;
}

double mean_absolute_error(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("mean_absolute_error needs equal-length inputs");
  if (a.empty()) throw NoComparableEntriesError("no entries to compare");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
  return sum / static_cast<double>(a.size());
}

VelocityErrorReport mean_velocity_error(const DopplerTrack& estimate, const GroundTruthTrack& truth) {
  VelocityErrorReport report;
  std::vector<double> est;
  std::vector<double> tru;
  for (const auto& e : estimate.entries) {
    if (e.gap) {
      ++report.gaps;
      continue;
    }
    auto it = std::lower_bound(truth.samples.begin(), truth.samples.end(), e.time - kTimeTolerance,
                               [](const TruthSample& s, double t) { return s.time < t; });
    if (it == truth.samples.end() || std::abs(it->time - e.time) > kTimeTolerance) {
      throw InvalidArgument("track entry at t = " + std::to_string(e.time) + " s has no ground-truth sample");
    }
    est.push_back(e.velocity);
    tru.push_back(it->radial_velocity);
    report.entries.push_back({e.time, e.velocity, it->radial_velocity, std::abs(e.velocity - it->radial_velocity)});
  }
  if (est.empty()) throw NoComparableEntriesError("track has no non-gap entries to compare");
  report.compared = est.size();
  report.mean_error = mean_absolute_error(est, tru);
  return report;
}

SinusoidFit fit_sinusoid(std::span<const double> t, std::span<const double> y, double min_period,
                         double max_period) {
  if (t.size() != y.size()) throw DimensionError("fit_sinusoid needs equal-length inputs");
  if (t.size() < 4) throw InvalidArgument("fit_sinusoid needs at least 4 points");
  if (!(min_period > 0.0) || !(max_period > min_period)) throw InvalidArgument("invalid period search range");

  // Coarse scan in log-period, then golden-section around the best cell.
  constexpr int kGrid = 400;
  const double log_lo = std::log(min_period);
  const double log_hi = std::log(max_period);
  auto period_at = [&](int i) { return std::exp(log_lo + (log_hi - log_lo) * i / kGrid); };
  int best = 0;
  double best_sse = solve_for_period(t, y, period_at(0)).sse;
  for (int i = 1; i <= kGrid; ++i) {
    const double sse = solve_for_period(t, y, period_at(i)).sse;
    if (sse < best_sse) {
      best_sse = sse;
      best = i;
    }
  }
  double lo = period_at(std::max(best - 1, 0));
  double hi = period_at(std::min(best + 1, kGrid));
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - ratio * (hi - lo);
  double x2 = lo + ratio * (hi - lo);
  double f1 = solve_for_period(t, y, x1).sse;
  double f2 = solve_for_period(t, y, x2).sse;
  for (int iter = 0; iter < 100 && (hi - lo) > 1e-12 * hi; ++iter) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = solve_for_period(t, y, x1).sse;
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = solve_for_period(t, y, x2).sse;
    }
  }
  const double period = 0.5 * (lo + hi);
  const LinearSolve s = solve_for_period(t, y, period);

  SinusoidFit fit;
  fit.period = period;
  fit.amplitude = std::hypot(s.a, s.b);
  fit.phase = std::atan2(s.b, s.a);  // a sin x + b cos x = A sin(x + phase)
  fit.offset = s.c;
  fit.rms_residual = std::sqrt(s.sse / static_cast<double>(t.size()));
  return fit;
}

}  // namespace fmcwsim
