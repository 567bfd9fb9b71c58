#include "scgan/experiments/pipeline.h"

#include <algorithm>

#include "scgan/error.h"
#include "scgan/parallel/kernels.h"
#include "scgan/rng.h"

namespace scgan::experiments {

const char* to_string(FeatureSystem s) {
  switch (s) {
    case FeatureSystem::functionals_svm: return "functionals_svm";
    case FeatureSystem::boaw_svm: return "boaw_svm";
    case FeatureSystem::llds_gru: return "llds_gru";
  }
  return "functionals_svm";
}

FeatureSystem feature_system_from_string(const std::string& s) {
  if (s == "functionals_svm") return FeatureSystem::functionals_svm;
  if (s == "boaw_svm") return FeatureSystem::boaw_svm;
  if (s == "llds_gru") return FeatureSystem::llds_gru;
  throw ValidationError("unknown feature system '" + s + "'");
}

void featurize_segment(Recording& rec, const PipelineParams& params) {
  rec.llds = audio::extract_llds(rec.segment, params.frames);
  rec.functionals = audio::functionals(rec.llds);
}

Recording featurize_clip(const audio::AudioClip& clip, const PipelineParams& params) {
  Recording rec;
  if (!params.segment) {
    rec.segment = clip;
    featurize_segment(rec, params);
    return rec;
  }
  const auto det = audio::detect_events(clip, params.events);
  if (det.events.empty()) {
    rec.segment = clip;
  } else {
    const auto best = std::max_element(
        det.events.begin(), det.events.end(),
        [](const auto& a, const auto& b) { return a.length() < b.length(); });
    rec.event_found = true;
    rec.segment.sample_rate = clip.sample_rate;
    rec.segment.samples.assign(clip.samples.begin() + static_cast<std::ptrdiff_t>(best->start),
                               clip.samples.begin() + static_cast<std::ptrdiff_t>(best->end));
  }
  featurize_segment(rec, params);
  return rec;
}

CorpusFeatures extract_corpus_features(const std::vector<io::ManifestRow>& manifest,
                                       const std::filesystem::path& root,
                                       const std::vector<std::string>& class_names,
                                       const PipelineParams& params) {
  CorpusFeatures out;
  out.class_names = class_names;
  out.recordings.resize(manifest.size());
  std::vector<std::size_t> labels(manifest.size());
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    labels[i] = io::class_index(manifest[i].label, class_names);
  }
  parallel::for_each_index(parallel::Exec::omp, manifest.size(), [&](std::size_t i) {
    auto rec = featurize_clip(audio::read_wav(root / manifest[i].file), params);
    rec.source = manifest[i].file;
    rec.label = labels[i];
    rec.partition = manifest[i].partition;
    out.recordings[i] = std::move(rec);
  });
  return out;
}

nn::Matrix FrameScaler::apply(const nn::Matrix& frames) const {
  nn::Matrix out(frames.rows(), frames.cols());
  for (std::size_t t = 0; t < frames.rows(); ++t) {
    const auto r = scaler.apply(frames.row(t));
    std::copy(r.begin(), r.end(), out.row(t).begin());
  }
  return out;
}

FrameScaler fit_frame_scaler(const std::vector<const Recording*>& recordings) {
  std::vector<std::vector<double>> rows;
  for (const auto* r : recordings) {
    for (std::size_t t = 0; t < r->llds.length(); ++t) {
      rows.emplace_back(r->llds.frames.row(t).begin(), r->llds.frames.row(t).end());
    }
  }
  if (rows.empty()) throw ValidationError("no training frames");
  return {classifiers::Standardizer::fit(rows)};
}

namespace {

std::vector<double> raw_static(const SystemData& sys, const Recording& rec) {
  if (sys.system == FeatureSystem::functionals_svm) return rec.functionals;
  const auto frames = sys.frame_scaler.apply(rec.llds.frames);
  return audio::boaw(frames.view(), sys.codebook, sys.boaw.assignments, parallel::Exec::serial);
}

}  // namespace

std::vector<data::FeatureRecord> represent(const SystemData& sys, const Recording& rec,
                                           data::Provenance provenance) {
  std::vector<data::FeatureRecord> out;
  if (sys.system == FeatureSystem::llds_gru) {
    const auto w = audio::window_sequence(sys.frame_scaler.apply(rec.llds.frames));
    for (const auto& m : w.windows) {
      out.push_back({m, rec.label, rec.partition, provenance, rec.source});
    }
    return out;
  }
  auto v = sys.static_scaler.apply(raw_static(sys, rec));
  auto r = data::make_static(std::move(v), rec.label, rec.partition, provenance);
  r.source = rec.source;
  out.push_back(std::move(r));
  return out;
}

SystemData prepare_system(const CorpusFeatures& corpus, FeatureSystem system,
                          const BoawParams& boaw, std::uint64_t seed,
                          const audio::Codebook* codebook) {
  SystemData sys;
  sys.system = system;
  sys.num_classes = corpus.num_classes();
  sys.boaw = boaw;
  std::vector<const Recording*> train;
  for (const auto& r : corpus.recordings) {
    if (r.partition == data::Partition::train) train.push_back(&r);
  }
  if (train.empty()) throw ValidationError("corpus has no training recordings");

  if (system != FeatureSystem::functionals_svm) sys.frame_scaler = fit_frame_scaler(train);
  if (system == FeatureSystem::boaw_svm && codebook) {
    if (codebook->words.cols() != audio::kLlds) {
      throw DimensionError("codebook width " + std::to_string(codebook->words.cols()) +
                           " != " + std::to_string(audio::kLlds) + " LLDs");
    }
    if (boaw.assignments == 0 || boaw.assignments > codebook->words.rows()) {
      throw ValidationError("BoAW assignments must lie in [1, codebook size]");
    }
    sys.codebook = *codebook;
    sys.boaw.codebook_size = codebook->words.rows();
  } else if (system == FeatureSystem::boaw_svm) {
    std::size_t total = 0;
    for (const auto* r : train) total += r->llds.length();
    nn::Matrix frames(total, audio::kLlds);
    std::size_t at = 0;
    for (const auto* r : train) {
      const auto s = sys.frame_scaler.apply(r->llds.frames);
      std::copy(s.values().begin(), s.values().end(), frames.values().begin() + static_cast<std::ptrdiff_t>(at * audio::kLlds));
      at += s.rows();
    }
    if (boaw.codebook_size > total) {
      throw ValidationError("codebook size " + std::to_string(boaw.codebook_size) +
                            " exceeds the " + std::to_string(total) + " training frames");
    }
    auto rng = make_rng(seed, 0xC0DEB00C);
    sys.codebook = audio::build_codebook(frames.view(), boaw.codebook_size, boaw.method, rng);
  }
  if (system != FeatureSystem::llds_gru) {
    std::vector<std::vector<double>> rows;
    for (const auto* r : train) rows.push_back(raw_static(sys, *r));
    sys.static_scaler = classifiers::Standardizer::fit(rows);
  }

  for (auto* set : {&sys.train, &sys.devel, &sys.test}) {
    set->kind = system == FeatureSystem::llds_gru ? data::DataKind::sequence
                                                   : data::DataKind::static_vector;
    set->num_classes = sys.num_classes;
  }
  for (const auto& r : corpus.recordings) {
    auto recs = represent(sys, r, data::Provenance::original);
    data::Dataset* set = &sys.train;
    std::vector<std::size_t>* map = nullptr;
    std::vector<std::size_t>* labels = nullptr;
    if (r.partition == data::Partition::devel) {
      set = &sys.devel;
      map = &sys.devel_recording;
      labels = &sys.devel_labels;
    } else if (r.partition == data::Partition::test) {
      set = &sys.test;
      map = &sys.test_recording;
      labels = &sys.test_labels;
    }
    if (labels) {
      for (std::size_t i = 0; i < recs.size(); ++i) map->push_back(labels->size());
      labels->push_back(r.label);
    }
    for (auto& x : recs) set->records.push_back(std::move(x));
  }
  return sys;
}

}  // namespace scgan::experiments
