#pragma once

#include <cstddef>
#include <vector>

#include "scgan/audio/wav.h"

namespace scgan::audio {

struct EventParams {
  double envelope_ms = 10.0;
  double block_s = 10.0;          // histogram block length
  std::size_t histogram_bins = 1024;
  double threshold_factor = 2.0;  // times the noise floor
  double min_duration_ms = 300.0;
  double padding_ms = 100.0;
};

struct EventSegment {
  std::size_t start = 0;  // sample index, inclusive
  std::size_t end = 0;    // sample index, exclusive
  bool padded_before = true;  // false when the padding was clamped at the clip start
  bool padded_after = true;

  std::size_t length() const { return end - start; }
};

struct EventDetection {
  std::vector<EventSegment> events;  // sorted, disjoint
  std::vector<double> envelope;      // mean |x| per envelope frame
  std::vector<double> block_floor;   // noise floor per envelope frame
  std::size_t frame_samples = 0;
  bool global_fallback = false;      // clip shorter than one block
  bool silent = false;
};

/// Mean-absolute envelope of `frame` samples per value; a trailing partial
/// frame is averaged over its own length.
std::vector<double> envelope(const std::vector<double>& x, std::size_t frame);

/// Centre of the most populated of `bins` equal-width bins spanning
/// [min, max] of `values` (lowest bin on ties).
double histogram_peak(const std::vector<double>& values, std::size_t bins);

/// Runs of envelope frames above threshold_factor x floor lasting at least
/// min_duration become events, padded on both sides, clamped, and merged
/// when the padded spans overlap.
EventDetection detect_events(const AudioClip& clip, const EventParams& params = {});

}  // namespace scgan::audio
