#pragma once

// Ground truth and error metrics for Doppler-time tracks.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fmcwsim/dsp.hpp"
#include "fmcwsim/scene.hpp"

namespace fmcwsim {

struct TruthSample {
  double time = 0.0;
  double radial_velocity = 0.0;
};

struct GroundTruthTrack {
  std::string target_id;
  std::vector<TruthSample> samples;  ///< one per scene frame
};

/// Radial velocity of the target's reference point (its trajectory position)
/// at every frame time. Throws UnknownTargetError.
GroundTruthTrack ground_truth_track(const Scene& scene, std::string_view target_id);

/// sum |a_i - b_i| / n. Throws DimensionError on length mismatch and
/// NoComparableEntriesError for empty input.
double mean_absolute_error(std::span<const double> a, std::span<const double> b);

struct VelocityErrorEntry {
  double time;
  double estimated;
  double truth;
  double abs_error;
};

struct VelocityErrorReport {
  double mean_error = 0.0;  ///< m/s
  std::size_t compared = 0;
  std::size_t gaps = 0;
  std::vector<VelocityErrorEntry> entries;
};

/// Mean absolute velocity error over the non-gap track entries. Every
/// estimate is matched to the truth sample with the same time (1e-6 s);
/// a missing match throws InvalidArgument. Gap entries are counted and skipped.
VelocityErrorReport mean_velocity_error(const DopplerTrack& estimate, const GroundTruthTrack& truth);

/// y ~ amplitude sin(2 pi t / period + phase) + offset.
struct SinusoidFit {
  double amplitude = 0.0;  ///< >= 0
  double period = 0.0;
  double phase = 0.0;
  double offset = 0.0;
  double rms_residual = 0.0;
};

/// Nonlinear least-squares sinusoid fit. The period is searched on a dense
/// grid over [min_period, max_period] and refined by golden-section search;
/// amplitude, phase and offset are solved linearly for each trial period.
/// Throws InvalidArgument for fewer than 4 points or a bad period range.
SinusoidFit fit_sinusoid(std::span<const double> t, std::span<const double> y, double min_period,
                         double max_period);

}  // namespace fmcwsim
