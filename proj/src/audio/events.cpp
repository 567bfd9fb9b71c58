#include "scgan/audio/events.h"

#include <algorithm>
#include <cmath>

#include "scgan/error.h"

namespace scgan::audio {

std::vector<double> envelope(const std::vector<double>& x, std::size_t frame) {
  if (frame == 0) throw ValidationError("envelope: frame length must be positive");
  std::vector<double> env;
  env.reserve(x.size() / frame + 1);
  for (std::size_t s = 0; s < x.size(); s += frame) {
    const std::size_t e = std::min(x.size(), s + frame);
    double acc = 0.0;
    for (std::size_t i = s; i < e; ++i) acc += std::abs(x[i]);
    env.push_back(acc / static_cast<double>(e - s));
  }
  return env;
}

double histogram_peak(const std::vector<double>& values, std::size_t bins) {
  if (values.empty() || bins == 0) throw ValidationError("histogram_peak: empty input");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it, hi = *hi_it;
  if (hi == lo) return lo;
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<std::size_t> count(bins, 0);
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - lo) / width);
    ++count[std::min(b, bins - 1)];
  }
  const auto best = static_cast<std::size_t>(
      std::max_element(count.begin(), count.end()) - count.begin());
  return lo + (static_cast<double>(best) + 0.5) * width;
}

EventDetection detect_events(const AudioClip& clip, const EventParams& p) {
  clip.validate();
  EventDetection out;
  const double sr = static_cast<double>(clip.sample_rate);
  out.frame_samples = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(p.envelope_ms * sr / 1000.0)));
  out.envelope = envelope(clip.samples, out.frame_samples);
  const std::size_t frames = out.envelope.size();

  out.silent = std::all_of(out.envelope.begin(), out.envelope.end(),
                           [](double v) { return v == 0.0; });
  if (out.silent) {
    out.block_floor.assign(frames, 0.0);
    return out;
  }

  // Blocks of block_s; a trailing remainder joins the previous block.
  const auto block_frames = static_cast<std::size_t>(std::lround(p.block_s * 1000.0 / p.envelope_ms));
  std::size_t nblocks = frames / block_frames;
  if (nblocks == 0) {
    nblocks = 1;
    out.global_fallback = true;
  }
  out.block_floor.resize(frames);
  for (std::size_t b = 0; b < nblocks; ++b) {
    const std::size_t s = b * block_frames;
    const std::size_t e = b + 1 == nblocks ? frames : s + block_frames;
    const std::vector<double> block(out.envelope.begin() + static_cast<std::ptrdiff_t>(s),
                                    out.envelope.begin() + static_cast<std::ptrdiff_t>(e));
    const double floor = histogram_peak(block, p.histogram_bins);
    std::fill(out.block_floor.begin() + static_cast<std::ptrdiff_t>(s),
              out.block_floor.begin() + static_cast<std::ptrdiff_t>(e), floor);
  }

  const auto min_frames = static_cast<std::size_t>(std::ceil(p.min_duration_ms / p.envelope_ms - 1e-9));
  const auto pad = static_cast<std::size_t>(std::lround(p.padding_ms * sr / 1000.0));
  const std::size_t n = clip.samples.size();
  std::size_t t = 0;
  while (t < frames) {
    if (!(out.envelope[t] > p.threshold_factor * out.block_floor[t])) {
      ++t;
      continue;
    }
    std::size_t e = t;
    while (e < frames && out.envelope[e] > p.threshold_factor * out.block_floor[e]) ++e;
    if (e - t >= min_frames) {
      const std::size_t s0 = t * out.frame_samples;
      const std::size_t s1 = std::min(n, e * out.frame_samples);
      EventSegment seg;
      seg.padded_before = s0 >= pad;
      seg.padded_after = s1 + pad <= n;
      seg.start = seg.padded_before ? s0 - pad : 0;
      seg.end = std::min(n, s1 + pad);
      if (!out.events.empty() && seg.start <= out.events.back().end) {
        auto& last = out.events.back();
        last.end = seg.end;
        last.padded_after = seg.padded_after;
      } else {
        out.events.push_back(seg);
      }
    }
    t = e;
  }
  return out;
}

}  // namespace scgan::audio
