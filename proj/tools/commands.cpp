#include "commands.h"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>

#include "scgan/audio/events.h"
#include "scgan/augment/baselines.h"
#include "scgan/augment/pool.h"
#include "scgan/classifiers/classifiers.h"
#include "scgan/error.h"
#include "scgan/experiments/corpus.h"
#include "scgan/experiments/protocol.h"
#include "scgan/experiments/report.h"
#include "scgan/io/formats.h"
#include "scgan/rng.h"

namespace scgan::cli {

namespace fs = std::filesystem;
namespace ex = scgan::experiments;
using K = Options::Kind;

namespace {

// ----------------------------------------------------------- helpers

std::uint64_t seed_of(const Json& cfg) {
  return cfg.at("seed").is_null() ? 0 : cfg.at("seed").get<std::uint64_t>();
}

std::size_t jobs_of(const Json& cfg) {
  const std::size_t j = cfg.at("jobs").is_null() ? 1 : cfg.at("jobs").get<std::size_t>();
  if (j == 0) throw ValidationError("jobs must be positive");
  return j;
}

/// Resolves the output directory and echoes the configuration into it.
fs::path begin(Json& cfg, const std::string& name) {
  const auto dir = output_dir(cfg, name);
  cfg["out"] = dir.string();
  if (cfg.at("seed").is_null()) cfg["seed"] = 0;
  if (cfg.at("jobs").is_null()) cfg["jobs"] = 1;
  echo_config(dir, cfg);
  return dir;
}

std::vector<std::string> class_names(const Json& cfg) {
  auto names = cfg.at("classes").get<std::vector<std::string>>();
  if (names.size() < 2) throw ValidationError("need at least two class names");
  return names;
}

void add_classes(Options& o) {
  o.add("classes", K::string_list, Json::array({"V", "O", "T", "E"}),
        "class names in index order (comma separated)");
}

void add_corpus(Options& o, bool segmented_flag = true) {
  o.add("manifest", K::string, "", "manifest CSV (file,label,partition)")
      .add("root", K::string, "", "directory the manifest paths are relative to (default: its own)");
  if (segmented_flag) {
    o.add("segmented", K::boolean, false, "clips are already segmented; skip event detection");
  }
  add_classes(o);
}

fs::path manifest_root(const Json& cfg, const fs::path& manifest) {
  const auto root = cfg.at("root").get<std::string>();
  return root.empty() ? manifest.parent_path() : fs::path(root);
}

ex::CorpusFeatures load_corpus(const Json& cfg) {
  const fs::path manifest = require_string(cfg, "manifest");
  ex::PipelineParams params;
  params.segment = !cfg.at("segmented").get<bool>();
  return ex::extract_corpus_features(io::read_manifest(manifest), manifest_root(cfg, manifest),
                                     class_names(cfg), params);
}

fs::path dataset_file(const fs::path& dir, const std::string& stem, data::DataKind kind) {
  return dir / (stem + (kind == data::DataKind::sequence ? ".bin" : ".csv"));
}

data::Dataset read_set(const Json& cfg, const std::string& key) {
  return io::read_dataset(require_string(cfg, key), class_names(cfg).size());
}

void print_counts(const std::string& what, const std::vector<std::size_t>& counts) {
  std::cout << what << ':';
  for (auto c : counts) std::cout << ' ' << c;
  std::cout << '\n';
}

// ------------------------------------------------------ experiments

void add_experiment(Options& o) {
  add_corpus(o);
  o.add("system", K::string, nullptr, "functionals_svm | boaw_svm | llds_gru")
      .add("augmentation", K::string, nullptr,
           "none | transform | smote | cgan | sgan | scgan_mono | scgan_ensemble")
      .add("runs", K::size, nullptr, "independent runs")
      .object("experiment");
}

/// Top-level keys override the nested experiment object; the resolved
/// config is written back into `cfg`.
ex::RunConfig run_config(Json& cfg) {
  auto rc = ex::run_config_from_json(cfg.at("experiment"));
  if (!cfg.at("system").is_null()) {
    rc.system = ex::feature_system_from_string(cfg.at("system").get<std::string>());
  }
  if (!cfg.at("augmentation").is_null()) {
    rc.augmentation = ex::augmentation_from_string(cfg.at("augmentation").get<std::string>());
  }
  if (!cfg.at("runs").is_null()) rc.runs = cfg.at("runs").get<std::size_t>();
  if (cfg.contains("m") && cfg.at("m").is_number()) rc.m_per_class = cfg.at("m").get<std::size_t>();
  if (!cfg.at("seed").is_null()) rc.seed = cfg.at("seed").get<std::uint64_t>();
  if (!cfg.at("jobs").is_null()) rc.jobs = cfg.at("jobs").get<std::size_t>();
  rc.validate();
  cfg["system"] = ex::to_string(rc.system);
  cfg["augmentation"] = ex::to_string(rc.augmentation);
  cfg["runs"] = rc.runs;
  cfg["seed"] = rc.seed;
  cfg["jobs"] = rc.jobs;
  if (cfg.contains("m") && !cfg.at("m").is_array()) cfg["m"] = rc.m_per_class;
  cfg["experiment"] = ex::to_json(rc);
  return rc;
}

void print_summary(const std::string& label, const ex::EvalReport& r) {
  std::cout << label << " dev UAR " << r.dev.mean << " +- " << r.dev.sd << ", test UAR "
            << r.test.mean << " +- " << r.test.sd << " over " << r.runs.size() << " runs\n";
}

// ----------------------------------------------------------- commands

void gen_corpus(Json cfg, const std::string& name) {
  ex::SyntheticCorpusSpec spec;
  const bool any = !cfg.at("train").is_null() || !cfg.at("devel").is_null() ||
                   !cfg.at("test").is_null();
  if (any) {
    if (cfg.at("train").is_null() || cfg.at("devel").is_null() || cfg.at("test").is_null()) {
      throw ValidationError("give train, devel and test per-class counts together");
    }
    spec = ex::SyntheticCorpusSpec::balanced(cfg.at("train").get<std::size_t>(),
                                             cfg.at("devel").get<std::size_t>(),
                                             cfg.at("test").get<std::size_t>());
  }
  spec.nuisance_gain = cfg.at("nuisance_gain").get<double>();
  spec.clip_seconds = cfg.at("clip_seconds").get<double>();
  spec.seed = seed_of(cfg);
  spec.validate();
  cfg["counts"] = spec.counts;
  const auto dir = begin(cfg, name);
  const auto rows = ex::gen_synthetic_corpus(spec, dir);
  std::cout << "wrote " << rows.size() << " clips and " << (dir / "manifest.csv").string() << '\n';
}

void segment(Json cfg, const std::string& name) {
  const fs::path manifest = require_string(cfg, "manifest");
  audio::EventParams ep;
  ep.threshold_factor = cfg.at("threshold_factor").get<double>();
  ep.min_duration_ms = cfg.at("min_duration_ms").get<double>();
  ep.padding_ms = cfg.at("padding_ms").get<double>();
  const auto rows = io::read_manifest(manifest);
  const auto root = manifest_root(cfg, manifest);
  const auto dir = begin(cfg, name);

  std::ofstream events(dir / "events.csv");
  events << "file,event,start_sample,end_sample,longest\n";
  std::vector<io::ManifestRow> out_rows;
  std::size_t without = 0;
  for (const auto& row : rows) {
    const auto clip = audio::read_wav(root / row.file);
    const auto det = audio::detect_events(clip, ep);
    audio::AudioClip seg = clip;
    if (det.events.empty()) {
      ++without;
    } else {
      const auto best = std::max_element(
          det.events.begin(), det.events.end(),
          [](const auto& a, const auto& b) { return a.length() < b.length(); });
      seg.samples.assign(clip.samples.begin() + static_cast<std::ptrdiff_t>(best->start),
                         clip.samples.begin() + static_cast<std::ptrdiff_t>(best->end));
      for (std::size_t e = 0; e < det.events.size(); ++e) {
        events << row.file << ',' << e << ',' << det.events[e].start << ','
               << det.events[e].end << ',' << (&det.events[e] == &*best ? 1 : 0) << '\n';
      }
    }
    const fs::path rel = fs::path("segments") / row.file;
    fs::create_directories((dir / rel).parent_path());
    audio::write_wav(dir / rel, seg);
    out_rows.push_back({rel.generic_string(), row.label, row.partition});
  }
  if (!events) throw IoError("failed writing events.csv");
  io::write_manifest(dir / "manifest.csv", out_rows);
  std::cout << "segmented " << rows.size() << " clips (" << without
            << " without an event, kept whole)\n";
}

void features(Json cfg, const std::string& name) {
  const auto system = ex::feature_system_from_string(cfg.at("system").get<std::string>());
  ex::BoawParams bp;
  bp.codebook_size = cfg.at("codebook_size").get<std::size_t>();
  bp.assignments = cfg.at("assignments").get<std::size_t>();
  bp.method = audio::codebook_method_from_string(cfg.at("codebook_method").get<std::string>());
  std::optional<audio::Codebook> cb;
  if (const auto p = cfg.at("codebook").get<std::string>(); !p.empty()) cb = io::read_codebook(p);
  require_string(cfg, "manifest");
  const auto dir = begin(cfg, name);
  const auto corpus = load_corpus(cfg);
  const auto sys = ex::prepare_system(corpus, system, bp, seed_of(cfg), cb ? &*cb : nullptr);

  io::write_dataset(dataset_file(dir, "train", sys.train.kind), sys.train);
  io::write_dataset(dataset_file(dir, "devel", sys.devel.kind), sys.devel);
  io::write_dataset(dataset_file(dir, "test", sys.test.kind), sys.test);
  if (system == ex::FeatureSystem::boaw_svm) io::write_codebook(dir / "codebook.csv", sys.codebook);

  std::ofstream rec(dir / "recordings.csv");
  rec << "source,label,partition,event_found,segment_samples,frames\n";
  for (const auto& r : corpus.recordings) {
    rec << r.source << ',' << corpus.class_names[r.label] << ',' << data::to_string(r.partition)
        << ',' << (r.event_found ? 1 : 0) << ',' << r.segment.samples.size() << ','
        << r.llds.length() << '\n';
  }
  if (!rec) throw IoError("failed writing recordings.csv");
  print_counts("train per class", sys.train.class_counts());
  print_counts("devel per class", sys.devel.class_counts());
  print_counts("test per class", sys.test.class_counts());
}

void codebook(Json cfg, const std::string& name) {
  ex::BoawParams bp;
  bp.codebook_size = cfg.at("size").get<std::size_t>();
  bp.assignments = 1;
  bp.method = audio::codebook_method_from_string(cfg.at("method").get<std::string>());
  require_string(cfg, "manifest");
  const auto dir = begin(cfg, name);
  const auto corpus = load_corpus(cfg);
  const auto sys = ex::prepare_system(corpus, ex::FeatureSystem::boaw_svm, bp, seed_of(cfg));
  io::write_codebook(dir / "codebook.csv", sys.codebook);
  std::cout << "codebook of " << sys.codebook.size() << " words ("
            << audio::to_string(sys.codebook.method) << ")\n";
}

void train_gan(Json cfg, const std::string& name) {
  const auto set = read_set(cfg, "train");
  if (set.empty()) throw ValidationError("training set is empty");
  auto g = io::scgan_config_from_json(cfg.at("gan"), ex::RunConfig::default_gan());
  if (!cfg.at("mode").is_null()) g.mode = gan::mode_from_string(cfg.at("mode").get<std::string>());
  if (!cfg.at("max_iterations").is_null()) {
    g.max_iterations = cfg.at("max_iterations").get<std::size_t>();
  }
  if (!cfg.at("alternation").is_null()) {
    const auto a = cfg.at("alternation").get<std::string>();
    if (a == "fixed") g.alternation = gan::AlternationPolicy::fixed(1, 1);
    else if (a == "dynamic") g.alternation = gan::AlternationPolicy::dynamic();
    else throw ValidationError("alternation must be 'dynamic' or 'fixed'");
  }
  g.num_classes = set.num_classes;
  g.data_kind = set.kind;
  if (set.kind == data::DataKind::sequence) g.sequence_length = set.records.front().payload.rows();
  g.seed = seed_of(cfg);
  g.validate();

  augment::EnsembleConfig ec;
  ec.member = g;
  ec.hidden_sizes = cfg.at("hidden_sizes").is_null()
                        ? std::vector<std::size_t>{g.hidden_size}
                        : cfg.at("hidden_sizes").get<std::vector<std::size_t>>();
  ec.validate();
  cfg["gan"] = io::to_json(g);
  cfg["hidden_sizes"] = ec.hidden_sizes;
  cfg["mode"] = gan::to_string(g.mode);
  cfg["max_iterations"] = g.max_iterations;
  cfg["alternation"] = g.alternation.kind == gan::AlternationPolicy::Kind::fixed ? "fixed" : "dynamic";
  const auto dir = begin(cfg, name);

  const auto members = augment::train_ensemble(ec, set, jobs_of(cfg));
  std::size_t ok = 0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto stem = "member_" + std::to_string(i);
    ex::export_trace(members[i].trace, dir / (stem + "_trace.csv"));
    if (members[i].failed) {
      std::cerr << stem << " (hidden " << ec.hidden_sizes[i] << ") diverged: " << members[i].error
                << '\n';
      continue;
    }
    io::save_model(dir / (stem + ".json"), members[i].model);
    ++ok;
    std::cout << stem << " (hidden " << ec.hidden_sizes[i] << "): "
              << members[i].trace.records.size() << " steps, " << members[i].trace.turns
              << " turns\n";
  }
  if (ok == 0) throw std::runtime_error("every GAN member diverged");
}

void synth(Json cfg, const std::string& name) {
  const auto paths = cfg.at("models").get<std::vector<std::string>>();
  if (paths.empty()) throw ValidationError("missing required field 'models'");
  std::vector<augment::EnsembleMember> members;
  for (const auto& p : paths) {
    augment::EnsembleMember m;
    m.model = io::load_model(p);
    if (!members.empty()) {
      const auto& a = members.front().model;
      if (a.config().num_classes != m.model.config().num_classes ||
          a.feature_dim() != m.model.feature_dim() || a.config().data_kind != m.model.config().data_kind) {
        throw DimensionError(p + ": model shape differs from " + paths.front());
      }
    }
    members.push_back(std::move(m));
  }
  const auto per_class = cfg.at("per_class").get<std::size_t>();
  const bool filter = cfg.at("filter").get<bool>();
  const auto dir = begin(cfg, name);
  auto rng = make_rng(seed_of(cfg));
  auto pool = augment::synthesize_pool(members, per_class, rng);
  if (filter) pool = augment::filter_by_discriminator(pool, members);
  io::write_pool(dataset_file(dir, "pool", pool.kind), pool);
  print_counts("generated per class", std::vector<std::size_t>(pool.num_classes, per_class * members.size()));
  if (filter) print_counts("kept per class", pool.count(augment::Verdict::kept));
}

void augment_cmd(Json cfg, const std::string& name) {
  const auto set = read_set(cfg, "train");
  const auto method = cfg.at("method").get<std::string>();
  if (method != "pool" && method != "smote" && method != "none") {
    throw ValidationError("method must be pool, smote or none");
  }
  augment::SynthPool pool;
  if (method == "pool") pool = io::read_pool(require_string(cfg, "pool"), set.num_classes);
  const auto dir = begin(cfg, name);
  auto rng = make_rng(seed_of(cfg));
  std::vector<data::FeatureRecord> extra;
  if (method == "pool") {
    extra = augment::to_records(augment::select_balanced(pool, cfg.at("m").get<std::size_t>(), rng));
  } else if (method == "smote") {
    extra = augment::smote(set, cfg.at("smote_k").get<std::size_t>(), std::nullopt, rng).records;
  }
  auto out = augment::merge(set, extra);
  if (cfg.at("replicate").get<bool>()) out = augment::oversample_replicate(out, rng);
  io::write_dataset(dataset_file(dir, "train", out.kind), out);
  print_counts("train per class", out.class_counts());
}

void train_clf(Json cfg, const std::string& name) {
  const auto train = read_set(cfg, "train");
  if (train.empty()) throw ValidationError("training set is empty");
  std::vector<std::pair<std::string, data::Dataset>> evals;
  for (const char* key : {"devel", "test"}) {
    if (!cfg.at(key).get<std::string>().empty()) evals.emplace_back(key, read_set(cfg, key));
  }
  auto kind = cfg.at("classifier").get<std::string>();
  if (kind == "auto") kind = train.kind == data::DataKind::sequence ? "gru" : "svm";
  if (kind != "svm" && kind != "gru") throw ValidationError("classifier must be auto, svm or gru");
  if ((kind == "gru") != (train.kind == data::DataKind::sequence)) {
    throw ValidationError(kind + " does not match the " + data::to_string(train.kind) + " training data");
  }
  cfg["classifier"] = kind;
  const auto dir = begin(cfg, name);
  const std::size_t Kc = train.num_classes;
  const auto names = class_names(cfg);

  std::function<classifiers::Prediction(const data::FeatureRecord&)> predict;
  classifiers::LinearSvmModel svm;
  classifiers::GruClassifierModel gru;
  if (kind == "svm") {
    classifiers::SvmParams sp;
    sp.C = cfg.at("svm_c").get<double>();
    sp.seed = seed_of(cfg);
    std::vector<std::vector<double>> X;
    for (const auto& r : train.records) X.emplace_back(r.vector().begin(), r.vector().end());
    svm = classifiers::train_svm(X, train.labels(), Kc, sp);
    predict = [&](const data::FeatureRecord& r) { return classifiers::svm_predict(svm, r.vector()); };
  } else {
    classifiers::GruClassifierConfig gc;
    gc.hidden_size = cfg.at("gru_hidden").get<std::size_t>();
    gc.layers = cfg.at("gru_layers").get<std::size_t>();
    gc.steps = cfg.at("gru_steps").get<std::size_t>();
    gc.seed = seed_of(cfg);
    std::vector<nn::Matrix> W;
    for (const auto& r : train.records) W.push_back(r.payload);
    gru = classifiers::train_gru_classifier(W, train.labels(), Kc, gc);
    predict = [&](const data::FeatureRecord& r) { return classifiers::gru_predict(gru, r.payload); };
  }

  Json metrics = Json::object();
  for (const auto& [part, set] : evals) {
    // Windows of one recording vote; static records are their own recording.
    std::vector<std::string> order;
    std::map<std::string, std::vector<classifiers::Prediction>> votes;
    std::map<std::string, std::size_t> truth;
    for (std::size_t i = 0; i < set.size(); ++i) {
      const auto& r = set.records[i];
      const auto key = r.source.empty() ? "#" + std::to_string(i) : r.source;
      if (!votes.count(key)) order.push_back(key);
      votes[key].push_back(predict(r));
      truth[key] = r.label;
    }
    std::vector<std::size_t> pred, labels;
    std::ofstream f(dir / ("predictions_" + part + ".csv"));
    f << "source,label,predicted\n";
    for (const auto& key : order) {
      const auto p = classifiers::vote(votes[key]).cls;
      pred.push_back(p);
      labels.push_back(truth[key]);
      f << key << ',' << names.at(truth[key]) << ',' << names.at(p) << '\n';
    }
    if (!f) throw IoError("failed writing predictions_" + part + ".csv");
    std::vector<std::string> warnings;
    const auto conf = ex::confusion_matrix(pred, labels, Kc);
    const double u = ex::uar(conf, &warnings);
    for (const auto& w : warnings) std::cerr << part << ": " << w << '\n';
    metrics[part] = {{"uar", u}, {"confusion", conf}, {"recordings", pred.size()}};
    std::cout << part << " UAR " << u << " (" << pred.size() << " recordings)\n";
  }
  io::write_json(dir / "metrics.json", metrics);
}

void eval(Json cfg, const std::string& name) {
  require_string(cfg, "manifest");
  const auto rc = run_config(cfg);
  const auto dir = begin(cfg, name);
  const auto corpus = load_corpus(cfg);
  const auto report = ex::run_experiment(rc, corpus);
  ex::export_report(report, dir / "report.csv");
  print_summary(std::string(ex::to_string(rc.augmentation)) + " m=" + std::to_string(rc.m_per_class),
                report);
}

void sweep(Json cfg, const std::string& name) {
  require_string(cfg, "manifest");
  const auto ms = cfg.at("m").get<std::vector<std::size_t>>();
  if (ms.empty()) throw ValidationError("missing required field 'm'");
  const auto rc = run_config(cfg);
  const auto dir = begin(cfg, name);
  const auto corpus = load_corpus(cfg);
  std::vector<ex::EvalReport> reports;
  const auto points = ex::sweep_augmentation(rc, corpus, ms, &reports);
  ex::export_sweep(points, dir / "sweep.csv");
  ex::PlotSeries dev{"devel", {}}, test{"test", {}};
  for (std::size_t i = 0; i < points.size(); ++i) {
    ex::export_report(reports[i], dir / ("report_m" + std::to_string(points[i].m) + ".csv"));
    dev.points.push_back({static_cast<double>(points[i].m), points[i].dev.mean, points[i].dev.sd});
    test.points.push_back({static_cast<double>(points[i].m), points[i].test.mean, points[i].test.sd});
    print_summary("m=" + std::to_string(points[i].m), reports[i]);
  }
  ex::PlotOptions po;
  po.title = std::string(ex::to_string(rc.augmentation)) + " on " + ex::to_string(rc.system);
  ex::export_plot({dev, test}, dir / "sweep.svg", po);
}

void compare_alternation(Json cfg, const std::string& name) {
  data::Dataset set;
  if (const auto p = cfg.at("train").get<std::string>(); !p.empty()) {
    set = read_set(cfg, "train");
  } else {
    ex::ToyMixture toy;
    toy.modes_per_class = cfg.at("toy_modes").get<std::size_t>();
    auto rng = make_rng(seed_of(cfg), 0x70F);
    set = toy.sample(cfg.at("toy_per_class").get<std::size_t>(), rng);
  }
  if (set.empty()) throw ValidationError("training set is empty");
  auto g = io::scgan_config_from_json(cfg.at("gan"), ex::RunConfig::default_gan());
  g.max_iterations = cfg.at("max_iterations").get<std::size_t>();
  g.num_classes = set.num_classes;
  g.data_kind = set.kind;
  if (set.kind == data::DataKind::sequence) g.sequence_length = set.records.front().payload.rows();
  g.seed = seed_of(cfg);
  const auto fixed = gan::AlternationPolicy::fixed(cfg.at("fixed_generator_epochs").get<std::size_t>(),
                                                   cfg.at("fixed_discriminator_epochs").get<std::size_t>());
  fixed.validate();
  cfg["gan"] = io::to_json(g);
  const auto dir = begin(cfg, name);

  const auto c = ex::compare_alternation(g, gan::AlternationPolicy::dynamic(), fixed, set);
  ex::export_trace(c.first_trace, dir / "trace_dynamic.csv");
  ex::export_trace(c.second_trace, dir / "trace_fixed.csv");
  auto stats = [](const ex::AlternationStats& s) {
    return Json{{"steps", s.steps},
                {"turns", s.turns},
                {"final_sd_generator", s.final_window.generator},
                {"final_sd_discriminator", s.final_window.discriminator},
                {"sliding_sd_generator", s.sliding_mean.generator},
                {"sliding_sd_discriminator", s.sliding_mean.discriminator}};
  };
  io::write_json(dir / "stats.json", {{"dynamic", stats(c.first)}, {"fixed", stats(c.second)}});

  std::vector<ex::PlotSeries> series;
  for (const auto& [label, trace] : {std::pair{"dynamic", &c.first_trace}, std::pair{"fixed", &c.second_trace}}) {
    ex::PlotSeries lg{std::string("L_G ") + label, {}}, ld{std::string("L_D ") + label, {}};
    for (const auto& r : trace->records) {
      lg.points.push_back({static_cast<double>(r.step), r.generator_loss, 0.0});
      ld.points.push_back({static_cast<double>(r.step), r.discriminator_loss, 0.0});
    }
    series.push_back(std::move(lg));
    series.push_back(std::move(ld));
  }
  ex::PlotOptions po;
  po.title = "losses per training step";
  po.x_label = "step";
  po.y_label = "loss";
  ex::export_plot(series, dir / "losses.svg", po);
  std::cout << "final-window loss SD: dynamic " << c.first.final_window.combined() << ", fixed "
            << c.second.final_window.combined() << '\n';
}

void report(Json cfg, const std::string& name) {
  const auto sweeps = cfg.at("sweeps").get<std::vector<std::string>>();
  auto names = cfg.at("names").get<std::vector<std::string>>();
  const auto pca = cfg.at("pca").get<std::string>();
  const auto metric = cfg.at("metric").get<std::string>();
  if (sweeps.empty() && pca.empty()) throw ValidationError("missing required field 'sweeps' (or 'pca')");
  if (metric != "dev" && metric != "test") throw ValidationError("metric must be dev or test");
  if (!names.empty() && names.size() != sweeps.size()) {
    throw ValidationError("names must match sweeps one to one");
  }
  for (std::size_t i = names.size(); i < sweeps.size(); ++i) {
    names.push_back(fs::path(sweeps[i]).parent_path().filename().string());
  }
  cfg["names"] = names;
  const auto dir = begin(cfg, name);

  if (!sweeps.empty()) {
    std::vector<ex::PlotSeries> series;
    for (std::size_t i = 0; i < sweeps.size(); ++i) {
      ex::PlotSeries s{names[i], {}};
      for (const auto& p : ex::read_sweep(sweeps[i])) {
        const auto& v = metric == "dev" ? p.dev : p.test;
        s.points.push_back({static_cast<double>(p.m), v.mean, v.sd});
      }
      series.push_back(std::move(s));
    }
    ex::PlotOptions po;
    po.title = cfg.at("title").get<std::string>();
    po.y_label = metric == "dev" ? "UAR (devel)" : "UAR (test)";
    ex::export_plot(series, dir / "plot.svg", po);
    std::cout << "wrote " << (dir / "plot.svg").string() << '\n';
  }
  if (!pca.empty()) {
    const auto set = io::read_dataset(pca, class_names(cfg).size());
    if (set.kind != data::DataKind::static_vector) throw ValidationError("pca needs static vectors");
    std::vector<std::vector<double>> rows;
    for (const auto& r : set.records) rows.emplace_back(r.vector().begin(), r.vector().end());
    const auto proj = ex::pca_2d(rows);
    std::ofstream f(dir / "pca.csv");
    f << "source,label,provenance,pc1,pc2\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      f << set.records[i].source << ',' << set.records[i].label << ','
        << data::to_string(set.records[i].provenance) << ',' << io::format_double(proj.points[i][0])
        << ',' << io::format_double(proj.points[i][1]) << '\n';
    }
    if (!f) throw IoError("failed writing pca.csv");
    std::cout << "wrote " << (dir / "pca.csv").string() << '\n';
  }
}

}  // namespace

std::vector<Command> register_commands(CLI::App& app) {
  std::vector<Command> cmds;
  auto make = [&](const std::string& name, const std::string& help,
                  std::function<void(Json, const std::string&)> run) -> Options& {
    auto* sub = app.add_subcommand(name, help);
    auto opts = std::make_unique<Options>(sub);
    add_common(*opts);
    auto& ref = *opts;
    cmds.push_back({name, std::move(opts), [run](const Json& c, const std::string& n) { run(c, n); }});
    return ref;
  };

  make("gen-corpus", "write a synthetic four-class corpus (WAV + manifest)", gen_corpus)
      .add("train", K::size, nullptr, "train examples per class (default: snore corpus skew)")
      .add("devel", K::size, nullptr, "devel examples per class")
      .add("test", K::size, nullptr, "test examples per class")
      .add("nuisance_gain", K::real, 0.75, "maximum relative gain of the nuisance resonance")
      .add("clip_seconds", K::real, 2.0, "clip length");

  add_corpus(make("segment", "detect events and cut each clip to its longest one", segment)
                 .add("threshold_factor", K::real, 2.0, "event threshold in noise-floor multiples")
                 .add("min_duration_ms", K::real, 300.0, "shortest event")
                 .add("padding_ms", K::real, 100.0, "padding on both sides"),
             false);

  add_corpus(make("features", "extract features and write train/devel/test sets", features)
                 .add("system", K::string, "functionals_svm", "functionals_svm | boaw_svm | llds_gru")
                 .add("codebook", K::string, "", "existing codebook CSV (boaw_svm)")
                 .add("codebook_size", K::size, 250, "BoAW codebook size")
                 .add("assignments", K::size, 5, "BoAW assignments per frame")
                 .add("codebook_method", K::string, "kmeans", "kmeans | random"));

  add_corpus(make("codebook", "learn a BoAW codebook from standardized training LLDs", codebook)
                 .add("size", K::size, 250, "codebook size")
                 .add("method", K::string, "kmeans", "kmeans | random"));

  auto& tg = make("train-gan", "train one scGAN or an ensemble on a feature set", train_gan)
                 .add("train", K::string, "", "training set (feature CSV or framed binary)")
                 .add("mode", K::string, nullptr, "scgan | cgan | sgan")
                 .add("hidden_sizes", K::size_list, nullptr, "one hidden width per member")
                 .add("max_iterations", K::size, nullptr, "turn pairs")
                 .add("alternation", K::string, nullptr, "dynamic | fixed")
                 .object("gan");
  add_classes(tg);

  make("synth", "sample a pool from trained models, optionally filtered", synth)
      .add("models", K::string_list, Json::array(), "model JSON files (comma separated)")
      .add("per_class", K::size, 100, "samples per class per model")
      .add("filter", K::boolean, true, "keep only samples the discriminator assigns their class");

  auto& ag = make("augment", "merge synthetic samples into a training set", augment_cmd)
                 .add("train", K::string, "", "training set")
                 .add("method", K::string, "pool", "pool | smote | none")
                 .add("pool", K::string, "", "pool file (method pool)")
                 .add("m", K::size, 250, "samples per class drawn from the pool")
                 .add("smote_k", K::size, 5, "SMOTE neighbours")
                 .add("replicate", K::boolean, true, "balance classes by replication afterwards");
  add_classes(ag);

  auto& tc = make("train-clf", "train a classifier and score held-out sets", train_clf)
                 .add("train", K::string, "", "training set")
                 .add("devel", K::string, "", "devel set")
                 .add("test", K::string, "", "test set")
                 .add("classifier", K::string, "auto", "auto | svm | gru")
                 .add("svm_c", K::real, 1e-4, "SVM complexity")
                 .add("gru_hidden", K::size, 60, "GRU hidden width")
                 .add("gru_layers", K::size, 2, "GRU layers")
                 .add("gru_steps", K::size, 200, "GRU minibatch updates");
  add_classes(tc);

  add_experiment(make("eval", "run the full protocol for one configuration", eval)
                     .add("m", K::size, nullptr, "synthetic samples per class"));

  add_experiment(make("sweep", "run the protocol over increasing m", sweep)
                     .add("m", K::size_list, Json::array({0, 50, 250}), "m values, ascending"));

  auto& ca = make("compare-alternation", "train under dynamic and fixed alternation", compare_alternation)
                 .add("train", K::string, "", "training set (default: 2-D toy mixture)")
                 .add("toy_per_class", K::size, 100, "toy samples per class")
                 .add("toy_modes", K::size, 1, "toy modes per class")
                 .add("max_iterations", K::size, 100, "turn pairs per policy")
                 .add("fixed_generator_epochs", K::size, 1, "fixed policy: generator epochs per turn")
                 .add("fixed_discriminator_epochs", K::size, 1, "fixed policy: discriminator epochs per turn")
                 .object("gan");
  add_classes(ca);

  auto& rp = make("report", "plot sweep curves and project feature sets", report)
                 .add("sweeps", K::string_list, Json::array(), "sweep CSVs")
                 .add("names", K::string_list, Json::array(), "legend names")
                 .add("metric", K::string, "dev", "dev | test")
                 .add("title", K::string, "", "plot title")
                 .add("pca", K::string, "", "static feature set to project onto two principal axes");
  add_classes(rp);
  return cmds;
}

}  // namespace scgan::cli
