#include "scgan/augment/pool.h"

#include <algorithm>

#include "scgan/error.h"
#include "scgan/parallel/kernels.h"

namespace scgan::augment {

void EnsembleConfig::validate() const {
  if (hidden_sizes.empty()) throw ValidationError("ensemble: need at least one member");
  for (auto n : hidden_sizes) {
    if (n == 0) throw ValidationError("ensemble: member hidden sizes must be positive");
  }
  if (!seeds.empty() && seeds.size() != hidden_sizes.size()) {
    throw ValidationError("ensemble: one seed per member required");
  }
  member.validate();
}

gan::ScganConfig EnsembleConfig::member_config(std::size_t i) const {
  auto c = member;
  c.hidden_size = hidden_sizes.at(i);
  c.seed = seeds.empty() ? member.seed + i : seeds[i];
  return c;
}

std::vector<EnsembleMember> train_ensemble(const EnsembleConfig& cfg,
                                           const data::Dataset& train_set, std::size_t jobs) {
  cfg.validate();
  std::vector<EnsembleMember> out(cfg.hidden_sizes.size());
  // Inner kernels use OpenMP only when members run one at a time.
  const auto exec = jobs > 1 ? parallel::Exec::serial : parallel::Exec::omp;
  parallel::for_each_index_jobs(jobs, out.size(), [&](std::size_t i) {
    const auto mc = cfg.member_config(i);
    try {
      auto res = gan::train(mc, train_set, exec);
      out[i].model = std::move(res.model);
      out[i].trace = std::move(res.trace);
    } catch (const DivergenceError& e) {
      out[i].failed = true;
      out[i].error = e.what();
      out[i].model = gan::ScganModel::create(mc, train_set.feature_dim());
    }
  });
  return out;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kept: return "kept";
    case Verdict::rejected: return "rejected";
    case Verdict::unfiltered: return "unfiltered";
  }
  return "unfiltered";
}

Verdict verdict_from_string(const std::string& s) {
  if (s == "kept") return Verdict::kept;
  if (s == "rejected") return Verdict::rejected;
  if (s == "unfiltered") return Verdict::unfiltered;
  throw ValidationError("unknown verdict '" + s + "'");
}

std::vector<std::size_t> SynthPool::count(Verdict v) const {
  std::vector<std::size_t> c(num_classes, 0);
  for (const auto& e : entries) {
    if (e.verdict == v && e.cls < num_classes) ++c[e.cls];
  }
  return c;
}

SynthPool synthesize_pool(const std::vector<EnsembleMember>& members,
                          std::size_t per_member_per_class, std::mt19937_64& rng) {
  SynthPool pool;
  if (members.empty()) return pool;
  const auto& first = members.front().model.config();
  pool.kind = first.data_kind;
  pool.num_classes = first.num_classes;
  for (std::size_t mi = 0; mi < members.size(); ++mi) {
    if (members[mi].failed) continue;
    const auto& model = members[mi].model;
    const auto& cfg = model.config();
    if (cfg.num_classes != pool.num_classes || cfg.data_kind != pool.kind) {
      throw ValidationError("synthesize_pool: members disagree on classes or data kind");
    }
    // Latents are drawn serially so the pool does not depend on scheduling.
    std::vector<gan::LatentVector> zs;
    std::vector<std::size_t> cls;
    for (std::size_t k = 0; k < cfg.num_classes; ++k) {
      for (std::size_t j = 0; j < per_member_per_class; ++j) {
        zs.push_back(gan::sample_latent(cfg.latent_dim, cfg.prior, rng));
        cls.push_back(k);
      }
    }
    const std::size_t base = pool.entries.size();
    pool.entries.resize(base + zs.size());
    parallel::for_each_index(parallel::Exec::omp, zs.size(), [&](std::size_t i) {
      auto& e = pool.entries[base + i];
      e.payload = model.generate(zs[i], gan::ConditionVector(cls[i], cfg.num_classes));
      e.cls = cls[i];
      e.member = mi;
    });
  }
  return pool;
}

SynthPool filter_by_discriminator(const SynthPool& pool,
                                  const std::vector<EnsembleMember>& members) {
  SynthPool out = pool;
  parallel::for_each_index(parallel::Exec::omp, out.entries.size(), [&](std::size_t i) {
    auto& e = out.entries[i];
    if (e.verdict == Verdict::rejected) return;
    if (e.member >= members.size()) {
      throw ValidationError("filter: entry names unknown member " + std::to_string(e.member));
    }
    const auto& model = members[e.member].model;
    const bool cgan = model.config().mode == gan::Mode::cgan;
    std::optional<std::size_t> cond;
    if (cgan) cond = e.cls;
    const auto logits = model.discriminate(e.payload.view(), cond);
    const auto best = static_cast<std::size_t>(
        std::max_element(logits.begin(), logits.end()) - logits.begin());
    const std::size_t want = cgan ? gan::real_index_cgan() : e.cls;
    e.verdict = best == want ? Verdict::kept : Verdict::rejected;
  });
  return out;
}

PoolShortfallError::PoolShortfallError(std::size_t cls, std::size_t available, std::size_t wanted)
    : std::runtime_error("pool has " + std::to_string(available) + " usable entries for class " +
                         std::to_string(cls) + ", " + std::to_string(wanted) +
                         " requested (short by " + std::to_string(wanted - available) + ")"),
      cls_(cls),
      shortfall_(wanted - available) {}

std::vector<PoolEntry> select_balanced(const SynthPool& pool, std::size_t m,
                                       std::mt19937_64& rng) {
  std::vector<std::vector<std::size_t>> by_class(pool.num_classes);
  for (std::size_t i = 0; i < pool.entries.size(); ++i) {
    const auto& e = pool.entries[i];
    if (e.verdict != Verdict::rejected) by_class.at(e.cls).push_back(i);
  }
  for (std::size_t k = 0; k < pool.num_classes; ++k) {
    if (by_class[k].size() < m) throw PoolShortfallError(k, by_class[k].size(), m);
  }
  std::vector<PoolEntry> out;
  out.reserve(m * pool.num_classes);
  for (auto& idx : by_class) {
    // Partial Fisher-Yates: the first m slots become a uniform sample.
    for (std::size_t j = 0; j < m; ++j) {
      std::uniform_int_distribution<std::size_t> pick(j, idx.size() - 1);
      std::swap(idx[j], idx[pick(rng)]);
      out.push_back(pool.entries[idx[j]]);
    }
  }
  return out;
}

std::vector<data::FeatureRecord> to_records(const std::vector<PoolEntry>& entries) {
  std::vector<data::FeatureRecord> out;
  out.reserve(entries.size());
  for (const auto& e : entries) {
    out.push_back({e.payload, e.cls, data::Partition::train, data::Provenance::synthetic,
                   "member" + std::to_string(e.member)});
  }
  return out;
}

data::Dataset merge(const data::Dataset& original, const std::vector<data::FeatureRecord>& extra) {
  data::Dataset out = original;
  const std::size_t d = original.feature_dim();
  for (const auto& r : extra) {
    if (!original.empty()) {
      require_dims(r.payload.cols() == d, "merge: feature width " +
                                              std::to_string(r.payload.cols()) + " != " +
                                              std::to_string(d));
    }
    if (original.kind == data::DataKind::static_vector) {
      require_dims(r.payload.rows() == 1, "merge: sequence record into a static dataset");
    }
    if (r.label >= original.num_classes) {
      throw ValidationError("merge: label " + std::to_string(r.label) + " out of range");
    }
    out.records.push_back(r);
  }
  return out;
}

}  // namespace scgan::augment
