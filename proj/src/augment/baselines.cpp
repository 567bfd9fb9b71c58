#include "scgan/augment/baselines.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "scgan/error.h"
#include "scgan/parallel/kernels.h"

namespace scgan::augment {

std::vector<double> smote_interpolate(std::span<const double> x, std::span<const double> neighbour,
                                      double lambda) {
  require_dims(x.size() == neighbour.size(), "smote: parent widths differ");
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = x[j] + lambda * (neighbour[j] - x[j]);
  return out;
}

SmoteResult smote(const data::Dataset& train_set, std::size_t k_neighbors,
                  std::optional<std::size_t> target_count, std::mt19937_64& rng) {
  if (train_set.kind != data::DataKind::static_vector) {
    throw ValidationError("smote: sequences are not supported");
  }
  if (k_neighbors == 0) throw ValidationError("smote: k_neighbors must be positive");
  const auto counts = train_set.class_counts();
  const std::size_t target =
      target_count ? *target_count : *std::max_element(counts.begin(), counts.end());
  const std::size_t d = train_set.feature_dim();

  SmoteResult out;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t k = 0; k < train_set.num_classes; ++k) {
    if (counts[k] >= target) continue;
    if (counts[k] < k_neighbors + 1) {
      throw ValidationError("smote: class " + std::to_string(k) + " has " +
                            std::to_string(counts[k]) + " examples, needs at least " +
                            std::to_string(k_neighbors + 1));
    }
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < train_set.size(); ++i) {
      if (train_set.records[i].label == k) members.push_back(i);
    }
    nn::Matrix pts(members.size(), d);
    for (std::size_t i = 0; i < members.size(); ++i) {
      const auto v = train_set.records[members[i]].vector();
      std::copy(v.begin(), v.end(), pts.row(i).begin());
    }
    // k + 1 nearest includes the point itself (distance 0); it is skipped below.
    const auto nn_idx = parallel::nearest_rows(parallel::Exec::omp, pts.view(), pts.view(),
                                               k_neighbors + 1);
    std::uniform_int_distribution<std::size_t> pick_x(0, members.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_nn(0, k_neighbors - 1);
    for (std::size_t s = counts[k]; s < target; ++s) {
      const std::size_t i = pick_x(rng);
      std::vector<std::size_t> neigh;
      for (std::size_t j = 0; j <= k_neighbors; ++j) {
        const std::size_t c = nn_idx[i * (k_neighbors + 1) + j];
        if (c != i && neigh.size() < k_neighbors) neigh.push_back(c);
      }
      const std::size_t n = neigh[pick_nn(rng)];
      const double lambda = unit(rng);
      auto v = smote_interpolate(pts.row(i), pts.row(n), lambda);
      out.records.push_back(data::make_static(std::move(v), k, data::Partition::train,
                                              data::Provenance::smote));
      out.parents.emplace_back(members[i], members[n]);
    }
  }
  return out;
}

data::Dataset oversample_replicate(const data::Dataset& train_set, std::mt19937_64& rng) {
  const auto counts = train_set.class_counts();
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] == 0) {
      throw ValidationError("oversample: class " + std::to_string(k) + " has no examples");
    }
  }
  const std::size_t target = *std::max_element(counts.begin(), counts.end());
  data::Dataset out = train_set;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < train_set.size(); ++i) {
      if (train_set.records[i].label == k) members.push_back(i);
    }
    const std::size_t need = target - counts[k];
    const std::size_t whole = need / counts[k];
    const std::size_t rest = need % counts[k];
    auto copy = [&](std::size_t i) {
      auto r = train_set.records[i];
      r.provenance = data::Provenance::replicated;
      out.records.push_back(std::move(r));
    };
    for (std::size_t w = 0; w < whole; ++w) {
      for (std::size_t i : members) copy(i);
    }
    for (std::size_t j = 0; j < rest; ++j) {
      std::uniform_int_distribution<std::size_t> pick(j, members.size() - 1);
      std::swap(members[j], members[pick(rng)]);
      copy(members[j]);
    }
  }
  return out;
}

const char* to_string(NoiseType t) { return t == NoiseType::pink ? "pink" : "white"; }

audio::AudioClip make_noise(NoiseType type, std::size_t samples, std::uint32_t sample_rate,
                            std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  audio::AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.samples.resize(samples);
  if (type == NoiseType::white) {
    for (double& v : clip.samples) v = g(rng);
    return clip;
  }
  // Paul Kellet's refined pink filter over white noise.
  double b0 = 0, b1 = 0, b2 = 0, b3 = 0, b4 = 0, b5 = 0, b6 = 0;
  for (double& v : clip.samples) {
    const double w = g(rng);
    b0 = 0.99886 * b0 + w * 0.0555179;
    b1 = 0.99332 * b1 + w * 0.0750759;
    b2 = 0.96900 * b2 + w * 0.1538520;
    b3 = 0.86650 * b3 + w * 0.3104856;
    b4 = 0.55000 * b4 + w * 0.5329522;
    b5 = -0.7616 * b5 - w * 0.0168980;
    v = b0 + b1 + b2 + b3 + b4 + b5 + b6 + w * 0.5362;
    b6 = w * 0.115926;
  }
  const double p = power(clip.samples);
  if (p > 0.0) {
    const double s = 1.0 / std::sqrt(p);
    for (double& v : clip.samples) v *= s;
  }
  return clip;
}

double power(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double s = 0.0;
  for (double v : x) s += v * v;
  return s / static_cast<double>(x.size());
}

double snr_db(std::span<const double> signal, std::span<const double> noise) {
  return 10.0 * std::log10(power(signal) / power(noise));
}

NoiseResult noise_transform(const audio::AudioClip& clip, const audio::AudioClip& noise,
                            double snr, std::mt19937_64& rng) {
  clip.validate();
  if (clip.sample_rate != noise.sample_rate) {
    throw ValidationError("noise_transform: sample rates differ");
  }
  const double ps = power(clip.samples);
  if (ps == 0.0) throw ValidationError("noise_transform: silent signal has no defined SNR");
  NoiseResult res;
  res.clip = clip;
  if (std::isinf(snr) && snr > 0) return res;
  if (noise.samples.empty()) throw ValidationError("noise_transform: empty noise clip");

  const std::size_t n = clip.samples.size();
  const std::size_t m = noise.samples.size();
  std::uniform_int_distribution<std::size_t> off(0, m >= n ? m - n : m - 1);
  res.crop_offset = off(rng);
  std::vector<double> crop(n);
  for (std::size_t i = 0; i < n; ++i) crop[i] = noise.samples[(res.crop_offset + i) % m];
  const double pn = power(crop);
  if (pn == 0.0) throw ValidationError("noise_transform: noise crop is silent");
  res.noise_gain = std::sqrt(ps / (pn * std::pow(10.0, snr / 10.0)));
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    res.clip.samples[i] = clip.samples[i] + res.noise_gain * crop[i];
    peak = std::max(peak, std::abs(res.clip.samples[i]));
  }
  if (peak > 1.0) {
    // Scaling signal and noise together keeps the SNR.
    res.headroom_scale = 1.0 / peak;
    for (double& v : res.clip.samples) v *= res.headroom_scale;
  }
  return res;
}

}  // namespace scgan::augment
