#include <cmath>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "scgan/error.h"
#include "scgan/experiments/toy.h"
#include "scgan/gan/model.h"
#include "scgan/gan/trainer.h"
#include "scgan/io/model_json.h"
#include "scgan/nn/gradcheck.h"
#include "scgan/rng.h"

using namespace scgan;
using namespace scgan::gan;

namespace {

ScganConfig small_config(Mode mode = Mode::scgan) {
  ScganConfig cfg;
  cfg.mode = mode;
  cfg.num_classes = 4;
  cfg.latent_dim = 3;
  cfg.hidden_size = 5;
  cfg.hidden_layers = 2;
  return cfg;
}

ScganConfig sequence_config() {
  auto cfg = small_config();
  cfg.data_kind = data::DataKind::sequence;
  cfg.sequence_length = 6;
  return cfg;
}

ScganModel zero_model(const ScganConfig& cfg, std::size_t d) {
  auto m = ScganModel::create(cfg, d);
  std::fill(m.generator_params().begin(), m.generator_params().end(), 0.0);
  std::fill(m.discriminator_params().begin(), m.discriminator_params().end(), 0.0);
  return m;
}

}  // namespace

TEST_CASE("loss threshold evaluation") {
  const auto pol = AlternationPolicy::dynamic();
  CHECK(threshold(pol, Network::discriminator, 0) == 1.0);
  CHECK(threshold(pol, Network::discriminator, 500) == 0.7);
  CHECK(threshold(pol, Network::generator, 10) ==
        doctest::Approx(1.5987).epsilon(1e-4));
  CHECK(threshold(pol, Network::generator, 10) == std::pow(0.95, 10) + 1.0);
  double prev = 1e9;
  for (long i = 0; i < 200; ++i) {
    const double t = threshold(pol, Network::discriminator, i);
    CHECK(t <= prev);
    CHECK(t >= 0.7);
    prev = t;
  }
  CHECK_THROWS_AS(threshold(AlternationPolicy::fixed(1, 1), Network::generator, 0),
                  ValidationError);
}

TEST_CASE("latent sampling") {
  auto rng = make_rng(1);
  const auto u = sample_latent(1000, Prior::uniform, rng);
  for (double v : u.z) CHECK((v >= -1.0 && v <= 1.0));

  const auto g = sample_latent(100000, Prior::gaussian, rng);
  double mean = 0.0, var = 0.0;
  for (double v : g.z) mean += v;
  mean /= 1e5;
  for (double v : g.z) var += (v - mean) * (v - mean);
  var /= 1e5;
  CHECK(std::abs(mean) < 0.02);
  CHECK(std::abs(var - 1.0) < 0.05);

  auto a = make_rng(5), b = make_rng(5);
  CHECK(sample_latent(32, Prior::gaussian, a).z == sample_latent(32, Prior::gaussian, b).z);
  CHECK_THROWS_AS(sample_latent(0, Prior::gaussian, a), ValidationError);
}

TEST_CASE("static generation") {
  const auto cfg = small_config();
  auto rng = make_rng(2);
  const auto z = sample_latent(cfg.latent_dim, cfg.prior, rng);
  const auto zero = zero_model(cfg, 7);
  CHECK(zero.generate_static(z, ConditionVector(1, 4)) == std::vector<double>(7, 0.0));

  const auto m = ScganModel::create(cfg, 7);
  const auto x1 = m.generate_static(z, ConditionVector(2, 4));
  CHECK(x1.size() == 7);
  CHECK(x1 == m.generate_static(z, ConditionVector(2, 4)));
  CHECK(x1 != m.generate_static(z, ConditionVector(3, 4)));
  CHECK_THROWS_AS(m.generate_sequence(z, ConditionVector(0, 4), 3), ValidationError);
  CHECK_THROWS_AS(ConditionVector(4, 4), ValidationError);
}

TEST_CASE("sequence generation") {
  const auto cfg = sequence_config();
  auto rng = make_rng(3);
  const auto z = sample_latent(cfg.latent_dim, cfg.prior, rng);
  const auto m = ScganModel::create(cfg, 5);
  const ConditionVector c(1, 4);

  const auto one = m.generate_sequence(z, c, 1);
  CHECK(one.rows() == 1);
  CHECK(one.cols() == 5);
  const auto forty = m.generate_sequence(z, c, 40);
  CHECK(forty.rows() == 40);
  CHECK(forty.cols() == 5);
  // Step 1 reads only [z | c], so it is the same for any length.
  for (std::size_t j = 0; j < 5; ++j) CHECK(forty(0, j) == one(0, j));

  // Manual first step: GRU stack on the padded [z | c] slot, then the head.
  const auto& gru_layout = m.generator().layout();
  nn::GruNet net(5 + 4, cfg.hidden_size, cfg.hidden_layers, 5);
  REQUIRE(net.layout() == gru_layout);
  std::vector<double> input(9, 0.0);
  std::copy(z.z.begin(), z.z.end(), input.begin());
  input[5 + 1] = 1.0;
  nn::GruNet::Tape tape;
  net.reset(tape);
  const auto h = net.step(m.generator_params(), input, tape);
  std::vector<double> y(5);
  nn::dense_forward(net.head(m.generator_params()), h, y);
  for (std::size_t j = 0; j < 5; ++j) CHECK(y[j] == doctest::Approx(one(0, j)).epsilon(1e-15));

  const auto zero = zero_model(cfg, 5);
  const auto zs = zero.generate_sequence(z, c, 40);
  for (double v : zs.values()) CHECK(v == 0.0);
  CHECK_THROWS_AS(m.generate_static(z, c), ValidationError);
  CHECK_THROWS_AS(m.generate_sequence(z, c, 0), ValidationError);
}

TEST_CASE("discriminator head width and posteriors") {
  for (Mode mode : {Mode::scgan, Mode::sgan, Mode::cgan}) {
    const auto cfg = small_config(mode);
    const auto m = ScganModel::create(cfg, 4);
    const std::size_t want = mode == Mode::cgan ? 2 : 5;
    CHECK(m.discriminator().outputs() == want);
    nn::Matrix x(1, 4, {0.3, -0.2, 1.0, 0.5});
    std::optional<std::size_t> cls;
    if (mode == Mode::cgan) cls = 2;
    const auto p = m.discriminator_posteriors(x.view(), cls);
    double s = 0.0;
    for (double v : p) s += v;
    CHECK(std::abs(s - 1.0) < 1e-12);
  }
  const auto cg = ScganModel::create(small_config(Mode::cgan), 4);
  nn::Matrix x(1, 4);
  CHECK_THROWS_AS(cg.discriminate(x.view()), ValidationError);
}

TEST_CASE("adversarial losses on a uniform discriminator") {
  const double ln5 = std::log(5.0);
  const std::vector<double> uniform(5, 0.0);
  const std::vector<std::vector<double>> real(3, uniform), fake(3, uniform);
  const std::vector<std::size_t> labels{0, 2, 3}, conds{1, 1, 0};

  CHECK(discriminator_loss(Mode::scgan, real, labels, fake) == doctest::Approx(2.0 * ln5));
  CHECK(2.0 * ln5 == doctest::Approx(3.2189).epsilon(1e-4));
  CHECK(discriminator_loss(Mode::scgan, real, labels, {}) == doctest::Approx(ln5));
  CHECK(generator_loss(Mode::scgan, fake, conds) == doctest::Approx(ln5));
  CHECK(generator_loss(Mode::sgan, fake, {}) == doctest::Approx(-std::log(4.0 / 5.0)));
  CHECK(-std::log(4.0 / 5.0) == doctest::Approx(0.2231).epsilon(1e-4));

  // Model-level: zero discriminator weights give uniform posteriors.
  const auto m = zero_model(small_config(), 3);
  std::vector<nn::Matrix> xr(2, nn::Matrix(1, 3, {1.0, 2.0, 3.0}));
  std::vector<nn::Matrix> xf(2, nn::Matrix(1, 3, {-1.0, 0.5, 0.0}));
  const std::vector<std::size_t> l2{0, 3}, c2{1, 2};
  CHECK(discriminator_loss(m, xr, l2, xf, {}) == doctest::Approx(2.0 * ln5));
  CHECK(generator_loss(m, xf, c2) == doctest::Approx(ln5));

  const std::vector<std::size_t> bad{0, 4};
  CHECK_THROWS_AS(discriminator_loss(m, xr, bad, xf, {}), ValidationError);
  CHECK_THROWS_AS(generator_loss(m, xf, {}), ValidationError);
}

TEST_CASE("adversarial losses saturate") {
  std::vector<double> correct{30.0, 0.0, 0.0, 0.0, 0.0};
  std::vector<double> fake{0.0, 0.0, 0.0, 0.0, 30.0};
  const std::vector<std::size_t> labels{0};
  CHECK(discriminator_loss(Mode::scgan, {correct}, labels, {fake}) < 1e-6);
  CHECK(generator_loss(Mode::scgan, {correct}, labels) < 1e-6);
  CHECK(generator_loss(Mode::sgan, {correct}, {}) < 1e-6);
}

TEST_CASE("sgan generator term gradient") {
  const std::vector<double> logits{0.2, -0.5, 1.1, 0.4, -0.3};
  std::vector<double> g(5);
  generator_term(Mode::sgan, logits, 0, g);
  for (std::size_t j = 0; j < 5; ++j) {
    auto lp = logits, lm = logits;
    lp[j] += 1e-6;
    lm[j] -= 1e-6;
    const double num =
        (generator_term(Mode::sgan, lp, 0, {}) - generator_term(Mode::sgan, lm, 0, {})) / 2e-6;
    CHECK(g[j] == doctest::Approx(num).epsilon(1e-6));
  }
}

TEST_CASE("generator gradient through the discriminator matches finite differences") {
  for (bool sequence : {false, true}) {
    for (Mode mode : {Mode::scgan, Mode::sgan, Mode::cgan}) {
      auto cfg = sequence ? sequence_config() : small_config();
      cfg.mode = mode;
      cfg.sequence_length = 5;
      cfg.init_stddev = 0.5;
      const auto m = ScganModel::create(cfg, 3);
      auto rng = make_rng(11);
      const auto z = sample_latent(cfg.latent_dim, cfg.prior, rng);
      const ConditionVector c(2, 4);
      const auto& G = m.generator();
      const auto& D = m.discriminator();
      const auto& dp = m.discriminator_params();
      std::optional<std::size_t> cls;
      if (mode == Mode::cgan) cls = 2;

      auto loss = [&](std::span<const double> gp) {
        const auto x = G.forward(gp, z.z, c, cfg.sequence_length);
        return generator_term(mode, D.forward(dp, x.view(), cls), 2, {});
      };
      Generator::Tape gt;
      Discriminator::Tape dt;
      const auto& gp = m.generator_params();
      const auto x = G.forward(gp, z.z, c, cfg.sequence_length, &gt);
      const auto logits = D.forward(dp, x.view(), cls, &dt);
      std::vector<double> dl(logits.size());
      generator_term(mode, logits, 2, dl);
      std::vector<double> dscratch(dp.size(), 0.0), grad(gp.size(), 0.0);
      nn::Matrix dx(x.rows(), x.cols());
      D.backward(dp, dt, dl, dscratch, dx.view());
      G.backward(gp, gt, dx.view(), grad);
      const auto rep = nn::grad_check(G.layout(), gp, grad, loss, 1e-5, 1e-4);
      INFO("sequence=" << sequence << " mode=" << to_string(mode)
                       << " err=" << rep.max_relative_error);
      CHECK(rep.pass);
    }
  }
}

TEST_CASE("training loop contracts") {
  experiments::ToyMixture toy;
  auto rng = make_rng(4);
  const auto set = toy.sample(30, rng);
  auto cfg = small_config();
  cfg.latent_dim = 4;
  cfg.batch_size = 16;

  SUBCASE("zero iterations") {
    cfg.max_iterations = 0;
    const auto res = train(cfg, set);
    CHECK(res.trace.records.empty());
    const auto init = ScganModel::create(cfg, 2);
    CHECK(res.model.generator_params() == init.generator_params());
  }
  SUBCASE("dynamic alternation trace") {
    cfg.max_iterations = 6;
    cfg.turn_step_cap = 8;
    const auto a = train(cfg, set, parallel::Exec::serial);
    const auto b = train(cfg, set, parallel::Exec::omp);
    REQUIRE(a.trace.records.size() == b.trace.records.size());
    REQUIRE(!a.trace.records.empty());
    for (std::size_t i = 0; i < a.trace.records.size(); ++i) {
      const auto& r = a.trace.records[i];
      const auto& s = b.trace.records[i];
      CHECK(r.step == static_cast<long>(i));
      CHECK(r.generator_loss == s.generator_loss);
      CHECK(r.discriminator_loss == s.discriminator_loss);
      CHECK(r.network == s.network);
      CHECK(r.discriminator_threshold == threshold(cfg.alternation, Network::discriminator, r.turn));
      CHECK(r.generator_threshold == threshold(cfg.alternation, Network::generator, r.turn));
    }
    CHECK(a.model.generator_params() == b.model.generator_params());
    CHECK(a.model.discriminator_params() == b.model.discriminator_params());
    // A turn trains one network; each turn pair starts with D.
    CHECK(a.trace.records.front().network == Network::discriminator);
    long seen_turn = -1;
    for (const auto& r : a.trace.records) {
      if (r.turn != seen_turn) {
        CHECK(r.network == Network::discriminator);
        seen_turn = r.turn;
      }
    }
  }
  SUBCASE("fixed alternation runs whole epochs") {
    cfg.alternation = AlternationPolicy::fixed(2, 1);
    cfg.max_iterations = 3;
    const auto res = train(cfg, set);
    // 120 examples, batch 16 -> 8 steps per epoch; D 1 epoch + G 2 epochs per turn.
    CHECK(res.trace.records.size() == 3 * (8 + 16));
    CHECK(std::isnan(res.trace.records.front().generator_threshold));
  }
  SUBCASE("input validation") {
    data::Dataset empty{data::DataKind::static_vector, 4, {}};
    CHECK_THROWS_AS(train(cfg, empty), ValidationError);
    auto bad = set;
    bad.records[0].label = 7;
    CHECK_THROWS_AS(train(cfg, bad), ValidationError);
    auto inf = set;
    inf.records[1].payload(0, 0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(train(cfg, inf), ValidationError);
  }
}

TEST_CASE("divergence is reported with the turn index") {
  experiments::ToyMixture toy;
  auto rng = make_rng(4);
  auto set = toy.sample(10, rng);
  auto cfg = small_config();
  cfg.max_iterations = 3;
  cfg.discriminator_lr = 1e300;
  cfg.generator_lr = 1e300;
  try {
    train(cfg, set);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.iteration() >= 0);
  }
}

TEST_CASE("sequence scGAN trains") {
  auto cfg = sequence_config();
  cfg.max_iterations = 2;
  cfg.turn_step_cap = 3;
  cfg.batch_size = 4;
  data::Dataset set{data::DataKind::sequence, 4, {}};
  auto rng = make_rng(8);
  std::normal_distribution<double> g(0.0, 1.0);
  for (std::size_t k = 0; k < 4; ++k) {
    for (int i = 0; i < 3; ++i) {
      nn::Matrix s(6, 2);
      for (double& v : s.values()) v = g(rng);
      set.records.push_back({s, k});
    }
  }
  const auto res = train(cfg, set);
  CHECK(!res.trace.records.empty());
  CHECK(res.model.generate(sample_latent(3, cfg.prior, rng), ConditionVector(0, 4)).rows() == 6);
}

TEST_CASE("model JSON round trip is bit exact") {
  for (auto cfg : {small_config(Mode::sgan), sequence_config()}) {
    cfg.alternation.generator.floor = 0.9;
    const auto m = ScganModel::create(cfg, 3);
    const auto path = std::filesystem::temp_directory_path() / "scgan_model_roundtrip.json";
    io::save_model(path, m);
    const auto back = io::load_model(path);
    CHECK(back.generator_params() == m.generator_params());
    CHECK(back.discriminator_params() == m.discriminator_params());
    CHECK(back.config().mode == cfg.mode);
    CHECK(back.config().data_kind == cfg.data_kind);
    CHECK(back.config().alternation.generator.floor == 0.9);
    std::filesystem::remove(path);
  }
  io::Json j = io::to_json(small_config());
  j["learning_rate"] = 0.1;
  CHECK_THROWS_AS(io::scgan_config_from_json(j), ValidationError);
}
