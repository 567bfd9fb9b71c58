#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace scgan::audio {

struct AudioClip {
  std::vector<double> samples;  // in [-1, 1]
  std::uint32_t sample_rate = 16000;

  double duration() const {
    return static_cast<double>(samples.size()) / static_cast<double>(sample_rate);
  }
  /// Throws ValidationError if empty or non-finite.
  void validate() const;
};

/// 16-bit PCM mono RIFF/WAVE. Samples are scaled by 1/32768.
AudioClip read_wav(const std::filesystem::path& path);
/// Writes 16-bit PCM mono; samples are rounded to the nearest step of
/// 1/32768 and clamped to the PCM range.
void write_wav(const std::filesystem::path& path, const AudioClip& clip);

/// Quantization used by write_wav: value -> PCM integer.
std::int16_t to_pcm16(double v);

}  // namespace scgan::audio
