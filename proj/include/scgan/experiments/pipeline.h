#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "scgan/audio/boaw.h"
#include "scgan/audio/events.h"
#include "scgan/audio/features.h"
#include "scgan/classifiers/classifiers.h"
#include "scgan/data/dataset.h"
#include "scgan/io/formats.h"

namespace scgan::experiments {

enum class FeatureSystem { functionals_svm, boaw_svm, llds_gru };
const char* to_string(FeatureSystem s);
FeatureSystem feature_system_from_string(const std::string& s);

/// One labelled recording reduced to its main event.
struct Recording {
  std::string source;
  std::size_t label = 0;
  data::Partition partition = data::Partition::train;
  audio::AudioClip segment;       // the longest detected event (whole clip if none)
  bool event_found = false;
  audio::FrameSequence llds;
  std::vector<double> functionals;
};

struct CorpusFeatures {
  std::vector<std::string> class_names;
  std::vector<Recording> recordings;
  std::size_t num_classes() const { return class_names.size(); }
};

struct PipelineParams {
  audio::EventParams events;
  audio::FrameParams frames;
  bool segment = true;  // false: clips are already segmented, use them whole
};

/// Segments and featurizes one clip.
Recording featurize_clip(const audio::AudioClip& clip, const PipelineParams& params);
/// LLDs and functionals of an already segmented clip.
void featurize_segment(Recording& rec, const PipelineParams& params);

/// Reads every manifest entry (paths relative to `root`) and featurizes it.
CorpusFeatures extract_corpus_features(const std::vector<io::ManifestRow>& manifest,
                                       const std::filesystem::path& root,
                                       const std::vector<std::string>& class_names,
                                       const PipelineParams& params = {});

struct BoawParams {
  std::size_t codebook_size = 250;
  std::size_t assignments = 5;
  audio::CodebookMethod method = audio::CodebookMethod::kmeans;
};

/// Per-LLD standardization fitted on training frames.
struct FrameScaler {
  classifiers::Standardizer scaler;
  nn::Matrix apply(const nn::Matrix& frames) const;
};
FrameScaler fit_frame_scaler(const std::vector<const Recording*>& recordings);

/// Features of one feature system, ready for augmentation and training.
/// Static systems are standardized with training statistics; the LLD
/// system holds standardized 40-frame windows with `recording` mapping each
/// window to its recording for voting.
struct SystemData {
  FeatureSystem system = FeatureSystem::functionals_svm;
  std::size_t num_classes = 0;
  data::Dataset train, devel, test;
  std::vector<std::size_t> devel_recording, test_recording;  // window -> recording (LLD system)
  std::vector<std::size_t> devel_labels, test_labels;         // per recording
  classifiers::Standardizer static_scaler;
  FrameScaler frame_scaler;
  audio::Codebook codebook;
  BoawParams boaw;
};

/// Builds the representation of one recording with the fitted scalers.
std::vector<data::FeatureRecord> represent(const SystemData& sys, const Recording& rec,
                                           data::Provenance provenance);

/// A given codebook is used as is instead of being learned from the
/// training frames (BoAW system only).
SystemData prepare_system(const CorpusFeatures& corpus, FeatureSystem system,
                          const BoawParams& boaw, std::uint64_t seed,
                          const audio::Codebook* codebook = nullptr);

}  // namespace scgan::experiments
