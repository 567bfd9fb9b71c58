#include "scgan/gan/trainer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "scgan/error.h"
#include "scgan/nn/adam.h"
#include "scgan/rng.h"

namespace scgan::gan {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct FakeSpec {
  LatentVector z;
  std::size_t cls = 0;
};

class Trainer {
 public:
  Trainer(const ScganConfig& cfg, const data::Dataset& set, parallel::Exec exec)
      : cfg_(cfg),
        set_(set),
        exec_(exec),
        model_(ScganModel::create(cfg, set.feature_dim())),
        rng_(make_rng(cfg.seed, 1)),
        batch_(std::min(cfg.batch_size, set.size())),
        g_adam_(nn::AdamState::for_size(model_.generator_params().size())),
        d_adam_(nn::AdamState::for_size(model_.discriminator_params().size())) {
    order_.resize(set.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::shuffle(order_.begin(), order_.end(), rng_);
  }

  TrainResult run() {
    const auto& pol = cfg_.alternation;
    const bool dynamic = pol.kind == AlternationPolicy::Kind::dynamic;
    const std::size_t per_epoch = (set_.size() + batch_ - 1) / batch_;
    std::size_t below = 0;
    for (long i = 0; i < static_cast<long>(cfg_.max_iterations); ++i) {
      turn_ = i;
      const double td = dynamic ? threshold(pol, Network::discriminator, i) : kNaN;
      const double tg = dynamic ? threshold(pol, Network::generator, i) : kNaN;
      const std::size_t d_steps = dynamic ? cfg_.turn_step_cap : pol.discriminator_epochs * per_epoch;
      const std::size_t g_steps = dynamic ? cfg_.turn_step_cap : pol.generator_epochs * per_epoch;

      double last_d = 0.0;
      for (std::size_t s = 0; s < d_steps; ++s) {
        last_d = discriminator_step(tg, td).discriminator_loss;
        if (dynamic && last_d < td) break;
      }
      double last_g = 0.0;
      for (std::size_t s = 0; s < g_steps; ++s) {
        last_g = generator_step(tg, td).generator_loss;
        if (dynamic && last_g < tg) break;
      }
      trace_.turns = i + 1;
      if (dynamic) {
        const bool ok = last_d < pol.discriminator.floor && last_g < pol.generator.floor;
        below = ok ? below + 1 : 0;
        if (cfg_.convergence_turns > 0 && below >= cfg_.convergence_turns) {
          trace_.converged = true;
          break;
        }
      }
    }
    return {std::move(model_), std::move(trace_)};
  }

 private:
  std::vector<std::size_t> next_real_batch() {
    std::vector<std::size_t> idx(batch_);
    for (auto& v : idx) {
      if (cursor_ == order_.size()) {
        std::shuffle(order_.begin(), order_.end(), rng_);
        cursor_ = 0;
      }
      v = order_[cursor_++];
    }
    return idx;
  }

  std::vector<FakeSpec> next_fakes() {
    std::uniform_int_distribution<std::size_t> cls(0, cfg_.num_classes - 1);
    std::vector<FakeSpec> out(batch_);
    for (auto& f : out) {
      f.cls = cls(rng_);
      f.z = sample_latent(cfg_.latent_dim, cfg_.prior, rng_);
    }
    return out;
  }

  std::optional<std::size_t> d_condition(std::size_t cls) const {
    if (cfg_.mode == Mode::cgan) return cls;
    return std::nullopt;
  }

  void check(double v, const char* what) const {
    if (!std::isfinite(v)) {
      throw DivergenceError(std::string("non-finite ") + what, turn_);
    }
  }

  const TraceRecord& record(Network net, double lg, double ld, double tg, double td) {
    TraceRecord r;
    r.step = static_cast<long>(trace_.records.size());
    r.turn = turn_;
    r.network = net;
    r.generator_loss = lg;
    r.discriminator_loss = ld;
    r.generator_threshold = tg;
    r.discriminator_threshold = td;
    trace_.records.push_back(r);
    return trace_.records.back();
  }

  const TraceRecord& discriminator_step(double tg, double td) {
    const auto real = next_real_batch();
    const auto fakes = next_fakes();
    const auto& G = model_.generator();
    const auto& D = model_.discriminator();
    const auto& gp = model_.generator_params();
    const auto& dp = model_.discriminator_params();
    const std::size_t B = batch_;
    const double inv = 1.0 / static_cast<double>(B);

    std::vector<nn::Matrix> fake_x(B);
    parallel::for_each_index(exec_, B, [&](std::size_t i) {
      fake_x[i] = G.forward(gp, fakes[i].z.z, ConditionVector(fakes[i].cls, cfg_.num_classes),
                            cfg_.sequence_length);
    });

    std::vector<double> g_terms(B, 0.0);
    std::vector<double> grad(dp.size());
    const std::size_t outputs = D.outputs();
    const double ld = parallel::accumulate_blocks(
        exec_, 2 * B,
        [&](std::size_t item, std::span<double> acc) {
          Discriminator::Tape tape;
          std::vector<double> dlogits(outputs);
          double loss;
          if (item < B) {
            const auto& rec = set_.records[real[item]];
            const auto logits = D.forward(dp, rec.payload.view(), d_condition(rec.label), &tape);
            loss = real_term(cfg_.mode, logits, rec.label, dlogits);
          } else {
            const std::size_t f = item - B;
            const auto logits =
                D.forward(dp, fake_x[f].view(), d_condition(fakes[f].cls), &tape);
            loss = fake_term(cfg_.mode, logits, dlogits);
            g_terms[f] = generator_term(cfg_.mode, logits, fakes[f].cls, {});
          }
          for (double& v : dlogits) v *= inv;
          D.backward(dp, tape, dlogits, acc, {});
          return loss * inv;
        },
        grad);
    double lg = 0.0;
    for (double v : g_terms) lg += v;
    lg *= inv;
    check(ld, "discriminator loss");
    check(lg, "generator loss");
    const auto& r = record(Network::discriminator, lg, ld, tg, td);
    adam(model_.discriminator_params(), grad, d_adam_, cfg_.discriminator_lr, D.layout());
    return r;
  }

  const TraceRecord& generator_step(double tg, double td) {
    const auto real = next_real_batch();
    const auto fakes = next_fakes();
    const auto& G = model_.generator();
    const auto& D = model_.discriminator();
    const auto& gp = model_.generator_params();
    const auto& dp = model_.discriminator_params();
    const std::size_t B = batch_;
    const double inv = 1.0 / static_cast<double>(B);
    const std::size_t outputs = D.outputs();

    std::vector<double> fake_terms(B, 0.0);
    std::vector<double> grad(gp.size());
    const double lg = parallel::accumulate_blocks(
        exec_, B,
        [&](std::size_t i, std::span<double> acc) {
          Generator::Tape gt;
          Discriminator::Tape dt;
          const nn::Matrix x = G.forward(
              gp, fakes[i].z.z, ConditionVector(fakes[i].cls, cfg_.num_classes),
              cfg_.sequence_length, &gt);
          const auto logits = D.forward(dp, x.view(), d_condition(fakes[i].cls), &dt);
          std::vector<double> dlogits(outputs);
          const double loss = generator_term(cfg_.mode, logits, fakes[i].cls, dlogits);
          fake_terms[i] = fake_term(cfg_.mode, logits, {});
          for (double& v : dlogits) v *= inv;
          std::vector<double> d_scratch(dp.size(), 0.0);
          nn::Matrix dx(x.rows(), x.cols());
          D.backward(dp, dt, dlogits, d_scratch, dx.view());
          G.backward(gp, gt, dx.view(), acc);
          return loss * inv;
        },
        grad);

    std::vector<double> real_terms(B, 0.0);
    parallel::for_each_index(exec_, B, [&](std::size_t i) {
      const auto& rec = set_.records[real[i]];
      const auto logits = D.forward(dp, rec.payload.view(), d_condition(rec.label));
      real_terms[i] = real_term(cfg_.mode, logits, rec.label, {});
    });
    double ld = 0.0;
    for (std::size_t i = 0; i < B; ++i) ld += real_terms[i];
    double lf = 0.0;
    for (std::size_t i = 0; i < B; ++i) lf += fake_terms[i];
    ld = (ld + lf) * inv;
    check(lg, "generator loss");
    check(ld, "discriminator loss");
    const auto& r = record(Network::generator, lg, ld, tg, td);
    adam(model_.generator_params(), grad, g_adam_, cfg_.generator_lr, G.layout());
    return r;
  }

  void adam(std::vector<double>& params, const std::vector<double>& grad, nn::AdamState& st,
            double lr, const nn::ParameterLayout& layout) {
    try {
      nn::adam_update(params, grad, st, lr, cfg_.l2, layout);
    } catch (const DivergenceError&) {
      throw DivergenceError("non-finite gradient", turn_);
    }
  }

  const ScganConfig& cfg_;
  const data::Dataset& set_;
  parallel::Exec exec_;
  ScganModel model_;
  std::mt19937_64 rng_;
  std::size_t batch_;
  nn::AdamState g_adam_, d_adam_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
  long turn_ = 0;
  TrainTrace trace_;
};

double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

TrainResult train(const ScganConfig& cfg, const data::Dataset& train_set, parallel::Exec exec) {
  cfg.validate();
  if (train_set.empty()) throw ValidationError("train: empty training set");
  if (train_set.num_classes != cfg.num_classes) {
    throw ValidationError("train: dataset has " + std::to_string(train_set.num_classes) +
                          " classes, config expects " + std::to_string(cfg.num_classes));
  }
  if (train_set.kind != cfg.data_kind) {
    throw ValidationError(std::string("train: dataset kind ") + data::to_string(train_set.kind) +
                          " does not match config kind " + data::to_string(cfg.data_kind));
  }
  train_set.validate();
  Trainer t(cfg, train_set, exec);
  return t.run();
}

LossSpread final_loss_spread(const TrainTrace& trace, std::size_t window) {
  const std::size_t n = trace.records.size();
  const std::size_t start = n > window ? n - window : 0;
  std::vector<double> g, d;
  for (std::size_t i = start; i < n; ++i) {
    g.push_back(trace.records[i].generator_loss);
    d.push_back(trace.records[i].discriminator_loss);
  }
  return {stddev(g), stddev(d)};
}

}  // namespace scgan::gan
