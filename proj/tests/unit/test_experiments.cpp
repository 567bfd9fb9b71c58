#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "oracles/oracles.h"
#include "scgan/audio/events.h"
#include "scgan/error.h"
#include "scgan/experiments/corpus.h"
#include "scgan/experiments/report.h"
#include "scgan/rng.h"

using namespace scgan;
using namespace scgan::experiments;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("scgan_exp_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

// Test partition class counts of the snore corpus.
std::vector<std::size_t> table_labels() {
  std::vector<std::size_t> y;
  const std::size_t counts[] = {155, 65, 16, 27};
  for (std::size_t k = 0; k < 4; ++k) y.insert(y.end(), counts[k], k);
  return y;
}

}  // namespace

TEST_CASE("unweighted average recall") {
  const auto y = table_labels();
  CHECK(uar(y, y, 4) == 1.0);
  const std::vector<std::size_t> all_v(y.size(), 0);
  CHECK(uar(all_v, y, 4) == 0.25);
  CHECK(uar(confusion_matrix(all_v, y, 4)) == 0.25);

  auto rng = make_rng(40);
  std::uniform_int_distribution<std::size_t> pick(0, 3);
  double mean = 0.0;
  for (int t = 0; t < 2000; ++t) {
    std::vector<std::size_t> p(y.size());
    for (auto& v : p) v = pick(rng);
    const double u = uar(p, y, 4);
    CHECK(u == doctest::Approx(oracle::counted_uar(p, y, 4)).epsilon(1e-12));
    mean += u / 2000.0;
  }
  CHECK(std::abs(mean - 0.25) < 0.01);

  std::vector<std::string> warnings;
  const std::vector<std::size_t> two{0, 1, 1};
  CHECK(uar(two, two, 3, &warnings) == doctest::Approx(2.0 / 3.0));
  CHECK(warnings.size() == 1);
  CHECK_THROWS(uar(std::vector<std::size_t>{0}, two, 3));
}

TEST_CASE("mean and sample sd") {
  const std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
  const auto s = mean_sd(v);
  CHECK(s.mean == 5.0);
  CHECK(s.sd == doctest::Approx(std::sqrt(32.0 / 7.0)));
  CHECK(mean_sd(std::vector<double>{3.0}).sd == 0.0);
}

TEST_CASE("report and sweep files") {
  TempDir dir;
  EvalReport rep;
  auto rng = make_rng(41);
  std::uniform_real_distribution<double> u(0.2, 0.9);
  for (int r = 0; r < 4; ++r) {
    RunResult res;
    res.dev_uar = u(rng);
    res.test_uar = u(rng);
    res.synthetic_added = 1000 + r;
    res.dev_confusion = {{3, 1}, {0, static_cast<std::size_t>(r)}};
    res.test_confusion = {{1, 2}, {4, 5}};
    rep.runs.push_back(res);
  }
  rep.summarize();
  double m = 0.0;
  for (const auto& r : rep.runs) m += r.dev_uar / 4.0;
  CHECK(rep.dev.mean == doctest::Approx(m).epsilon(1e-14));

  export_report(rep, dir.path / "r.csv");
  const auto back = read_report(dir.path / "r.csv");
  REQUIRE(back.runs.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(back.runs[i].dev_uar == rep.runs[i].dev_uar);
    CHECK(back.runs[i].test_uar == rep.runs[i].test_uar);
    CHECK(back.runs[i].synthetic_added == rep.runs[i].synthetic_added);
    CHECK(back.runs[i].dev_confusion == rep.runs[i].dev_confusion);
    CHECK(back.runs[i].test_confusion == rep.runs[i].test_confusion);
  }
  CHECK(back.dev.mean == rep.dev.mean);
  CHECK(back.test.sd == rep.test.sd);

  std::vector<SweepPoint> pts{{0, {0.5, 0.01}, {0.4, 0.02}, 10}, {250, {0.6, 0.03}, {0.55, 0.0}, 10}};
  export_sweep(pts, dir.path / "s.csv");
  const auto sp = read_sweep(dir.path / "s.csv");
  REQUIRE(sp.size() == 2);
  CHECK(sp[1].m == 250);
  CHECK(sp[1].dev.sd == 0.03);
  CHECK(sp[0].runs == 10);

  std::ofstream(dir.path / "bad.csv") << "m,runs\n";
  CHECK_THROWS_AS(read_sweep(dir.path / "bad.csv"), ValidationError);
}

TEST_CASE("svg plots") {
  const auto empty = render_svg({});
  CHECK(empty.find("no data") != std::string::npos);
  CHECK(empty.rfind("</svg>") != std::string::npos);
  const auto svg = render_svg({{"scGAN", {{0, 0.5, 0.01}, {250, 0.6, 0.02}}}, {"SMOTE", {{0, 0.5, 0}}}});
  CHECK(svg.find("scGAN") != std::string::npos);
  CHECK(svg.find("SMOTE") != std::string::npos);
  CHECK(svg.find("no data") == std::string::npos);
}

TEST_CASE("pca projection") {
  auto rng = make_rng(42);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 300; ++i) {
    const double a = 3.0 * g(rng), b = g(rng);
    rows.push_back({a + 0.1 * g(rng), a - b, b, 0.2 * g(rng), 5.0});
  }
  const auto p = pca_2d(rows);
  REQUIRE(p.points.size() == rows.size());
  double ss0 = 0.0, ss1 = 0.0, dot = 0.0, n0 = 0.0;
  for (const auto& q : p.points) {
    ss0 += q[0] * q[0];
    ss1 += q[1] * q[1];
  }
  for (std::size_t j = 0; j < 5; ++j) {
    dot += p.axes[0][j] * p.axes[1][j];
    n0 += p.axes[0][j] * p.axes[0][j];
  }
  CHECK(ss0 == doctest::Approx(p.singular_values[0] * p.singular_values[0]).epsilon(1e-9));
  CHECK(ss1 == doctest::Approx(p.singular_values[1] * p.singular_values[1]).epsilon(1e-9));
  CHECK(std::abs(dot) < 1e-12);
  CHECK(n0 == doctest::Approx(1.0));

  // No direction captures more centred variance than the first axis.
  for (int t = 0; t < 200; ++t) {
    std::vector<double> d(5);
    double nrm = 0.0;
    for (double& v : d) nrm += (v = g(rng)) * v;
    double ss = 0.0;
    for (const auto& r : rows) {
      double s = 0.0;
      for (std::size_t j = 0; j < 5; ++j) s += (r[j] - p.mean[j]) * d[j] / std::sqrt(nrm);
      ss += s * s;
    }
    CHECK(ss <= ss0 * (1.0 + 1e-12));
  }
  CHECK_THROWS(pca_2d({{1.0, 2.0}}));
}

TEST_CASE("synthetic corpus") {
  TempDir dir;
  auto spec = SyntheticCorpusSpec::balanced(10, 10, 10);
  spec.seed = 9;
  const auto rows = gen_synthetic_corpus(spec, dir.path);
  CHECK(rows.size() == 120);
  std::size_t wavs = 0;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir.path)) {
    wavs += e.path().extension() == ".wav";
  }
  CHECK(wavs == 120);
  CHECK(io::read_manifest(dir.path / "manifest.csv").size() == 120);

  std::size_t single = 0;
  for (const auto& r : rows) {
    const auto clip = audio::read_wav(dir.path / r.file);
    single += audio::detect_events(clip).events.size() == 1;
  }
  CHECK(single == 120);

  auto a = make_rng(3), b = make_rng(3);
  std::pair<std::size_t, std::size_t> burst;
  const auto c1 = render_example(spec, 2, a, &burst);
  CHECK(c1.samples == render_example(spec, 2, b).samples);
  CHECK(burst.first < burst.second);
  CHECK(burst.second <= c1.samples.size());

  auto bad = spec;
  bad.class_names.pop_back();
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("experiment config") {
  RunConfig cfg;
  cfg.augmentation = Augmentation::scgan_ensemble;
  cfg.m_per_class = 50;
  cfg.seed = 77;
  cfg.gan.max_iterations = 12;
  cfg.transform.snrs_db = {5.0};
  const auto back = run_config_from_json(to_json(cfg));
  CHECK(to_json(back) == to_json(cfg));
  CHECK(back.gan.max_iterations == 12);

  auto j = to_json(cfg);
  j["typo"] = 1;
  CHECK_THROWS_AS(run_config_from_json(j), ValidationError);
  j = to_json(cfg);
  j["gru"]["hiden_size"] = 3;
  CHECK_THROWS_AS(run_config_from_json(j), ValidationError);

  cfg.system = FeatureSystem::llds_gru;
  cfg.augmentation = Augmentation::smote;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);

  RunConfig c2;
  CHECK(c2.effective_svm_c() == 1e-4);
  c2.system = FeatureSystem::boaw_svm;
  CHECK(c2.effective_svm_c() == 1e-3);
}
