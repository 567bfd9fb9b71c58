#include "scgan/experiments/protocol.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "scgan/augment/pool.h"
#include "scgan/error.h"
#include "scgan/parallel/kernels.h"
#include "scgan/rng.h"

namespace scgan::experiments {

using io::Json;

const char* to_string(Augmentation a) {
  switch (a) {
    case Augmentation::none: return "none";
    case Augmentation::transform: return "transform";
    case Augmentation::smote: return "smote";
    case Augmentation::cgan: return "cgan";
    case Augmentation::sgan: return "sgan";
    case Augmentation::scgan_mono: return "scgan_mono";
    case Augmentation::scgan_ensemble: return "scgan_ensemble";
  }
  return "none";
}

Augmentation augmentation_from_string(const std::string& s) {
  for (auto a : {Augmentation::none, Augmentation::transform, Augmentation::smote,
                 Augmentation::cgan, Augmentation::sgan, Augmentation::scgan_mono,
                 Augmentation::scgan_ensemble}) {
    if (s == to_string(a)) return a;
  }
  throw ValidationError("unknown augmentation '" + s + "'");
}

bool is_gan(Augmentation a) {
  return a == Augmentation::cgan || a == Augmentation::sgan || a == Augmentation::scgan_mono ||
         a == Augmentation::scgan_ensemble;
}

gan::ScganConfig RunConfig::default_gan() {
  gan::ScganConfig c;
  c.max_iterations = 30;
  return c;
}

void RunConfig::validate() const {
  if (runs == 0) throw ValidationError("run count must be positive");
  if (jobs == 0) throw ValidationError("jobs must be positive");
  if (augmentation == Augmentation::smote && system == FeatureSystem::llds_gru) {
    throw ValidationError("smote cannot synthesize sequences; use a static feature system");
  }
  if (augmentation == Augmentation::scgan_ensemble && ensemble_sizes.empty()) {
    throw ValidationError("ensemble needs at least one member size");
  }
  if (is_gan(augmentation) && pool_factor == 0) {
    throw ValidationError("pool_factor must be positive");
  }
  if (svm_c < 0.0) throw ValidationError("svm_c must be non-negative");
  if (transform.types.empty() || transform.snrs_db.empty()) {
    throw ValidationError("transform grid must not be empty");
  }
  if (boaw.assignments == 0 || boaw.assignments > boaw.codebook_size) {
    throw ValidationError("BoAW assignments must lie in [1, codebook_size]");
  }
  auto g = gan;
  g.num_classes = std::max<std::size_t>(g.num_classes, 2);
  g.validate();
}

double RunConfig::effective_svm_c() const {
  if (svm_c > 0.0) return svm_c;
  return system == FeatureSystem::boaw_svm ? 1e-3 : 1e-4;
}

namespace {

template <typename T>
void take(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j[key].get<T>();
}

/// Rethrows with the run index prepended, keeping the error category.
[[noreturn]] void rethrow_in_run(std::size_t run) {
  const std::string prefix = "run " + std::to_string(run) + ": ";
  try {
    throw;
  } catch (const DimensionError& e) {
    throw DimensionError(prefix + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(prefix + e.what());
  } catch (const augment::PoolShortfallError& e) {
    throw std::runtime_error(prefix + e.what());
  } catch (const DivergenceError& e) {
    throw DivergenceError(prefix + e.what(), e.iteration());
  } catch (const std::exception& e) {
    throw std::runtime_error(prefix + e.what());
  }
}

}  // namespace

Json to_json(const RunConfig& c) {
  Json types = Json::array();
  for (auto t : c.transform.types) types.push_back(augment::to_string(t));
  return {
      {"system", to_string(c.system)},
      {"augmentation", to_string(c.augmentation)},
      {"m_per_class", c.m_per_class},
      {"runs", c.runs},
      {"seed", c.seed},
      {"jobs", c.jobs},
      {"gan", io::to_json(c.gan)},
      {"ensemble_sizes", c.ensemble_sizes},
      {"pool_factor", c.pool_factor},
      {"max_pool_rounds", c.max_pool_rounds},
      {"filter", c.filter},
      {"smote_k", c.smote_k},
      {"transform", {{"types", types}, {"snrs_db", c.transform.snrs_db}}},
      {"svm_c", c.svm_c},
      {"boaw",
       {{"codebook_size", c.boaw.codebook_size},
        {"assignments", c.boaw.assignments},
        {"method", audio::to_string(c.boaw.method)}}},
      {"gru",
       {{"hidden_size", c.gru.hidden_size},
        {"layers", c.gru.layers},
        {"lr", c.gru.lr},
        {"l2", c.gru.l2},
        {"batch_size", c.gru.batch_size},
        {"steps", c.gru.steps},
        {"init_stddev", c.gru.init_stddev},
        {"seed", c.gru.seed}}},
  };
}

RunConfig run_config_from_json(const Json& j, RunConfig c) {
  io::reject_unknown_keys(j,
                          {"system", "augmentation", "m_per_class", "runs", "seed", "jobs", "gan",
                           "ensemble_sizes", "pool_factor", "max_pool_rounds", "filter",
                           "smote_k", "transform", "svm_c", "boaw", "gru"},
                          "experiment");
  try {
    if (j.contains("system")) c.system = feature_system_from_string(j["system"].get<std::string>());
    if (j.contains("augmentation")) {
      c.augmentation = augmentation_from_string(j["augmentation"].get<std::string>());
    }
    take(j, "m_per_class", c.m_per_class);
    take(j, "runs", c.runs);
    take(j, "seed", c.seed);
    take(j, "jobs", c.jobs);
    if (j.contains("gan")) {
      // Class count and data kind come from the corpus, so a partial GAN
      // block is completed from the template before validation.
      auto g = j["gan"];
      c.gan = io::scgan_config_from_json(g, c.gan);
    }
    take(j, "ensemble_sizes", c.ensemble_sizes);
    take(j, "pool_factor", c.pool_factor);
    take(j, "max_pool_rounds", c.max_pool_rounds);
    take(j, "filter", c.filter);
    take(j, "smote_k", c.smote_k);
    take(j, "svm_c", c.svm_c);
    if (j.contains("transform")) {
      const auto& t = j["transform"];
      io::reject_unknown_keys(t, {"types", "snrs_db"}, "experiment.transform");
      if (t.contains("types")) {
        c.transform.types.clear();
        for (const auto& s : t["types"]) {
          const auto name = s.get<std::string>();
          if (name == "white") c.transform.types.push_back(augment::NoiseType::white);
          else if (name == "pink") c.transform.types.push_back(augment::NoiseType::pink);
          else throw ValidationError("unknown noise type '" + name + "'");
        }
      }
      take(t, "snrs_db", c.transform.snrs_db);
    }
    if (j.contains("boaw")) {
      const auto& b = j["boaw"];
      io::reject_unknown_keys(b, {"codebook_size", "assignments", "method"}, "experiment.boaw");
      take(b, "codebook_size", c.boaw.codebook_size);
      take(b, "assignments", c.boaw.assignments);
      if (b.contains("method")) {
        c.boaw.method = audio::codebook_method_from_string(b["method"].get<std::string>());
      }
    }
    if (j.contains("gru")) {
      const auto& g = j["gru"];
      io::reject_unknown_keys(
          g, {"hidden_size", "layers", "lr", "l2", "batch_size", "steps", "init_stddev", "seed"},
          "experiment.gru");
      take(g, "hidden_size", c.gru.hidden_size);
      take(g, "layers", c.gru.layers);
      take(g, "lr", c.gru.lr);
      take(g, "l2", c.gru.l2);
      take(g, "batch_size", c.gru.batch_size);
      take(g, "steps", c.gru.steps);
      take(g, "init_stddev", c.gru.init_stddev);
      take(g, "seed", c.gru.seed);
    }
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("experiment config: ") + e.what());
  }
  c.validate();
  return c;
}

void EvalReport::summarize() {
  std::vector<double> d, t;
  for (const auto& r : runs) {
    d.push_back(r.dev_uar);
    t.push_back(r.test_uar);
  }
  dev = mean_sd(d);
  test = mean_sd(t);
}

namespace {

constexpr std::uint64_t kRunStream = 0x52554E00;

gan::ScganConfig member_template(const RunConfig& cfg, const SystemData& sys) {
  auto g = cfg.gan;
  g.num_classes = sys.num_classes;
  g.data_kind = sys.train.kind;
  if (sys.system == FeatureSystem::llds_gru) g.sequence_length = 40;
  if (cfg.augmentation == Augmentation::cgan) g.mode = gan::Mode::cgan;
  if (cfg.augmentation == Augmentation::sgan) g.mode = gan::Mode::sgan;
  if (cfg.augmentation == Augmentation::scgan_mono || cfg.augmentation == Augmentation::scgan_ensemble) {
    g.mode = gan::Mode::scgan;
  }
  return g;
}

std::vector<augment::EnsembleMember> train_members(const RunConfig& cfg, const SystemData& sys,
                                                   std::uint64_t seed, parallel::Exec exec,
                                                   std::size_t jobs) {
  const auto g = member_template(cfg, sys);
  if (cfg.augmentation == Augmentation::scgan_ensemble) {
    augment::EnsembleConfig ec;
    ec.hidden_sizes = cfg.ensemble_sizes;
    ec.member = g;
    ec.member.seed = seed;
    return augment::train_ensemble(ec, sys.train, jobs);
  }
  auto mc = g;
  mc.seed = seed;
  std::vector<augment::EnsembleMember> members(1);
  auto res = gan::train(mc, sys.train, exec);
  members[0].model = std::move(res.model);
  members[0].trace = std::move(res.trace);
  return members;
}

/// Filtered pool holding at least `m` survivors per class when reachable.
augment::SynthPool build_pool(const RunConfig& cfg, const std::vector<augment::EnsembleMember>& members,
                              std::size_t m, std::mt19937_64& rng) {
  std::size_t live = 0;
  for (const auto& mb : members) live += !mb.failed;
  if (live == 0) throw std::runtime_error("every GAN member diverged");
  const std::size_t per = (cfg.pool_factor * m + live - 1) / live;
  auto pool = augment::synthesize_pool(members, per, rng);
  if (cfg.filter) pool = augment::filter_by_discriminator(pool, members);
  auto enough = [&] {
    const auto rejected = pool.count(augment::Verdict::rejected);
    std::vector<std::size_t> total(pool.num_classes, 0);
    for (const auto& e : pool.entries) ++total[e.cls];
    for (std::size_t k = 0; k < pool.num_classes; ++k) {
      if (total[k] - rejected[k] < m) return false;
    }
    return true;
  };
  for (std::size_t round = 0; round < cfg.max_pool_rounds && !enough(); ++round) {
    auto more = augment::synthesize_pool(members, per, rng);
    if (cfg.filter) more = augment::filter_by_discriminator(more, members);
    for (auto& e : more.entries) pool.entries.push_back(std::move(e));
  }
  return pool;
}

std::vector<data::FeatureRecord> transform_records(const RunConfig& cfg, const CorpusFeatures& corpus,
                                                   const SystemData& sys, std::mt19937_64& rng) {
  PipelineParams params;
  std::vector<data::FeatureRecord> out;
  for (const auto& rec : corpus.recordings) {
    if (rec.partition != data::Partition::train) continue;
    for (auto type : cfg.transform.types) {
      for (double snr : cfg.transform.snrs_db) {
        const auto noise = augment::make_noise(type, 2 * rec.segment.samples.size(),
                                               rec.segment.sample_rate, rng);
        Recording noisy;
        noisy.segment = augment::noise_transform(rec.segment, noise, snr, rng).clip;
        noisy.label = rec.label;
        noisy.partition = rec.partition;
        noisy.source = rec.source;
        featurize_segment(noisy, params);
        for (auto& r : represent(sys, noisy, data::Provenance::transformed)) {
          out.push_back(std::move(r));
        }
      }
    }
  }
  return out;
}

std::vector<std::vector<double>> rows_of(const data::Dataset& set) {
  std::vector<std::vector<double>> rows;
  rows.reserve(set.size());
  for (const auto& r : set.records) rows.emplace_back(r.vector().begin(), r.vector().end());
  return rows;
}

/// Trains the classifier on `train` and scores dev and test.
RunResult train_and_evaluate(const RunConfig& cfg, const SystemData& sys, const data::Dataset& train,
                             std::uint64_t seed, parallel::Exec exec) {
  RunResult res;
  const std::size_t K = sys.num_classes;
  if (sys.system == FeatureSystem::llds_gru) {
    std::vector<nn::Matrix> windows;
    std::vector<std::size_t> labels;
    for (const auto& r : train.records) {
      windows.push_back(r.payload);
      labels.push_back(r.label);
    }
    auto gc = cfg.gru;
    gc.seed = seed;
    const auto model = classifiers::train_gru_classifier(windows, labels, K, gc, exec);
    auto score = [&](const data::Dataset& set, const std::vector<std::size_t>& map,
                     const std::vector<std::size_t>& rec_labels) {
      std::vector<std::vector<classifiers::Prediction>> per(rec_labels.size());
      for (std::size_t i = 0; i < set.size(); ++i) {
        per[map[i]].push_back(classifiers::gru_predict(model, set.records[i].payload));
      }
      std::vector<std::size_t> pred(rec_labels.size());
      for (std::size_t r = 0; r < per.size(); ++r) pred[r] = classifiers::vote(per[r]).cls;
      return confusion_matrix(pred, rec_labels, K);
    };
    res.dev_confusion = score(sys.devel, sys.devel_recording, sys.devel_labels);
    res.test_confusion = score(sys.test, sys.test_recording, sys.test_labels);
  } else {
    classifiers::SvmParams sp;
    sp.C = cfg.effective_svm_c();
    sp.seed = seed;
    const auto model = classifiers::train_svm(rows_of(train), train.labels(), K, sp, nullptr, exec);
    auto score = [&](const data::Dataset& set) {
      std::vector<std::size_t> pred(set.size());
      for (std::size_t i = 0; i < set.size(); ++i) {
        pred[i] = classifiers::svm_predict(model, set.records[i].vector()).cls;
      }
      return confusion_matrix(pred, set.labels(), K);
    };
    res.dev_confusion = score(sys.devel);
    res.test_confusion = score(sys.test);
  }
  res.dev_uar = uar(res.dev_confusion);
  res.test_uar = uar(res.test_confusion);
  return res;
}

std::vector<EvalReport> evaluate(const RunConfig& cfg, const CorpusFeatures& corpus,
                                 const SystemData& sys, const std::vector<std::size_t>& ms) {
  cfg.validate();
  if (sys.devel.empty() || sys.test.empty()) {
    throw ValidationError("corpus needs train, devel and test partitions");
  }
  const std::size_t R = cfg.runs;
  const auto exec = cfg.jobs > 1 ? parallel::Exec::serial : parallel::Exec::omp;

  // The ensemble is trained once and re-sampled per run.
  std::vector<augment::EnsembleMember> shared;
  if (cfg.augmentation == Augmentation::scgan_ensemble) {
    shared = train_members(cfg, sys, cfg.seed, exec, cfg.jobs);
  }

  std::vector<std::vector<RunResult>> results(ms.size(), std::vector<RunResult>(R));
  parallel::for_each_index_jobs(cfg.jobs, R, [&](std::size_t r) {
    try {
      auto rng = make_rng(cfg.seed, kRunStream + r);
      const std::uint64_t run_seed = rng();
      std::vector<augment::EnsembleMember> own;
      if (is_gan(cfg.augmentation) && cfg.augmentation != Augmentation::scgan_ensemble &&
          *std::max_element(ms.begin(), ms.end()) > 0) {
        own = train_members(cfg, sys, run_seed, exec, 1);
      }
      const auto& members = cfg.augmentation == Augmentation::scgan_ensemble ? shared : own;

      std::vector<data::FeatureRecord> fixed_extra;
      if (cfg.augmentation == Augmentation::transform) {
        fixed_extra = transform_records(cfg, corpus, sys, rng);
      } else if (cfg.augmentation == Augmentation::smote) {
        fixed_extra = augment::smote(sys.train, cfg.smote_k, std::nullopt, rng).records;
      }
      augment::SynthPool pool;
      if (is_gan(cfg.augmentation)) {
        pool = build_pool(cfg, members, *std::max_element(ms.begin(), ms.end()), rng);
      }
      for (std::size_t mi = 0; mi < ms.size(); ++mi) {
        auto mrng = make_rng(run_seed, 1 + mi);
        std::vector<data::FeatureRecord> extra = fixed_extra;
        if (is_gan(cfg.augmentation) && ms[mi] > 0) {
          extra = augment::to_records(augment::select_balanced(pool, ms[mi], mrng));
        }
        const auto merged = augment::merge(sys.train, extra);
        const auto balanced = augment::oversample_replicate(merged, mrng);
        auto res = train_and_evaluate(cfg, sys, balanced, run_seed, exec);
        res.synthetic_added = extra.size();
        results[mi][r] = std::move(res);
      }
    } catch (...) {
      rethrow_in_run(r);
    }
  });

  std::vector<EvalReport> reports(ms.size());
  for (std::size_t mi = 0; mi < ms.size(); ++mi) {
    reports[mi].config = cfg;
    reports[mi].config.m_per_class = ms[mi];
    reports[mi].runs = std::move(results[mi]);
    reports[mi].summarize();
  }
  return reports;
}

}  // namespace

EvalReport run_experiment(const RunConfig& cfg, const CorpusFeatures& corpus,
                          const SystemData& sys) {
  return evaluate(cfg, corpus, sys, {cfg.m_per_class}).front();
}

EvalReport run_experiment(const RunConfig& cfg, const CorpusFeatures& corpus) {
  cfg.validate();
  const auto sys = prepare_system(corpus, cfg.system, cfg.boaw, cfg.seed);
  return run_experiment(cfg, corpus, sys);
}

std::vector<SweepPoint> sweep_augmentation(const RunConfig& cfg, const CorpusFeatures& corpus,
                                           const std::vector<std::size_t>& m_values,
                                           std::vector<EvalReport>* reports) {
  if (m_values.empty()) throw ValidationError("sweep needs at least one m value");
  if (!std::is_sorted(m_values.begin(), m_values.end())) {
    throw ValidationError("sweep m values must be ascending");
  }
  cfg.validate();
  const auto sys = prepare_system(corpus, cfg.system, cfg.boaw, cfg.seed);
  auto reps = evaluate(cfg, corpus, sys, m_values);
  std::vector<SweepPoint> out;
  for (std::size_t i = 0; i < m_values.size(); ++i) {
    out.push_back({m_values[i], reps[i].dev, reps[i].test, reps[i].runs.size()});
  }
  if (reports) *reports = std::move(reps);
  return out;
}

AlternationStats alternation_stats(const gan::TrainTrace& trace, std::size_t final_window,
                                   std::size_t sliding_window) {
  AlternationStats s;
  s.steps = trace.records.size();
  s.turns = trace.turns;
  s.final_window = gan::final_loss_spread(trace, final_window);
  const std::size_t n = trace.records.size();
  if (n >= sliding_window && sliding_window >= 2) {
    double g = 0.0, d = 0.0;
    std::size_t count = 0;
    for (std::size_t start = 0; start + sliding_window <= n; ++start) {
      gan::TrainTrace window;
      window.records.assign(trace.records.begin() + static_cast<std::ptrdiff_t>(start),
                            trace.records.begin() + static_cast<std::ptrdiff_t>(start + sliding_window));
      const auto w = gan::final_loss_spread(window, sliding_window);
      g += w.generator;
      d += w.discriminator;
      ++count;
    }
    s.sliding_mean.generator = g / static_cast<double>(count);
    s.sliding_mean.discriminator = d / static_cast<double>(count);
  }
  return s;
}

AlternationComparison compare_alternation(const gan::ScganConfig& base,
                                          const gan::AlternationPolicy& first,
                                          const gan::AlternationPolicy& second,
                                          const data::Dataset& train_set) {
  AlternationComparison out;
  auto a = base;
  a.alternation = first;
  auto b = base;
  b.alternation = second;
  out.first_trace = gan::train(a, train_set).trace;
  out.second_trace = gan::train(b, train_set).trace;
  out.first = alternation_stats(out.first_trace);
  out.second = alternation_stats(out.second_trace);
  return out;
}

}  // namespace scgan::experiments
