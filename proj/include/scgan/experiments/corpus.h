#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "scgan/audio/wav.h"
#include "scgan/io/formats.h"

namespace scgan::experiments {

/// Acoustic signature of one class: a pulse train at a fundamental drawn
/// from [f0_low, f0_high] through a two-pole resonator near `formant_hz`.
struct ClassSound {
  double f0_low = 100.0, f0_high = 150.0;
  double formant_hz = 600.0;
  double formant_jitter = 0.15;  // relative spread of the resonance per example
  double bandwidth_hz = 120.0;
  double duration_low = 0.4, duration_high = 0.9;  // seconds
  double amplitude_low = 0.2, amplitude_high = 0.4;  // peak
};

/// Stand-in for the snore corpus: four VOTE classes with the same skew as
/// the original partitions.
struct SyntheticCorpusSpec {
  std::vector<std::string> class_names{"V", "O", "T", "E"};
  std::vector<ClassSound> classes = default_classes();
  /// counts[partition][class] for train, devel, test.
  std::array<std::vector<std::size_t>, 3> counts{
      std::vector<std::size_t>{161, 75, 15, 32}, std::vector<std::size_t>{168, 76, 8, 30},
      std::vector<std::size_t>{155, 65, 16, 27}};
  double clip_seconds = 2.0;
  double noise_floor = 0.005;  // standard deviation of the background noise
  /// Class-independent variation: a second resonance drawn uniformly from
  /// [nuisance_low_hz, nuisance_high_hz] with a random relative gain up to
  /// nuisance_gain.
  double nuisance_low_hz = 1500.0, nuisance_high_hz = 3500.0;
  double nuisance_gain = 0.75;
  std::uint32_t sample_rate = 16000;
  std::uint64_t seed = 0;

  static std::vector<ClassSound> default_classes();
  /// Same classes with `per_class` examples in every partition cell.
  static SyntheticCorpusSpec balanced(std::size_t train, std::size_t devel, std::size_t test);
  void validate() const;
  std::size_t num_classes() const { return class_names.size(); }
};

/// One clip: background noise plus one burst of class `cls`. Burst position
/// (in samples) is written to `burst` when given.
audio::AudioClip render_example(const SyntheticCorpusSpec& spec, std::size_t cls,
                                std::mt19937_64& rng,
                                std::pair<std::size_t, std::size_t>* burst = nullptr);

/// Writes every clip as `<partition>/<class>_<index>.wav` under `dir` plus
/// `manifest.csv`, and returns the manifest rows. Clip i of a cell draws from
/// its own RNG stream, so a clip does not depend on the other cells.
std::vector<io::ManifestRow> gen_synthetic_corpus(const SyntheticCorpusSpec& spec,
                                                  const std::filesystem::path& dir);

}  // namespace scgan::experiments
