#include "scgan/experiments/corpus.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "scgan/error.h"
#include "scgan/parallel/kernels.h"
#include "scgan/rng.h"

namespace scgan::experiments {

std::vector<ClassSound> SyntheticCorpusSpec::default_classes() {
  ClassSound v, o, t, e;
  v.f0_low = 70;   v.f0_high = 120; v.formant_hz = 500;
  o.f0_low = 100;  o.f0_high = 150; o.formant_hz = 750;
  t.f0_low = 130;  t.f0_high = 180; t.formant_hz = 1000;
  e.f0_low = 90;   e.f0_high = 200; e.formant_hz = 1300;
  return {v, o, t, e};
}

SyntheticCorpusSpec SyntheticCorpusSpec::balanced(std::size_t train, std::size_t devel,
                                                  std::size_t test) {
  SyntheticCorpusSpec s;
  s.counts = {std::vector<std::size_t>(4, train), std::vector<std::size_t>(4, devel),
              std::vector<std::size_t>(4, test)};
  return s;
}

void SyntheticCorpusSpec::validate() const {
  if (class_names.empty() || class_names.size() != classes.size()) {
    throw ValidationError("corpus: one sound definition per class name required");
  }
  for (const auto& c : counts) {
    if (c.size() != class_names.size()) {
      throw ValidationError("corpus: counts must list every class for every partition");
    }
  }
  for (const auto& c : classes) {
    if (!(c.f0_low > 0 && c.f0_low <= c.f0_high) || !(c.duration_low > 0.3) ||
        c.duration_low > c.duration_high || !(c.amplitude_low > 0) ||
        c.amplitude_low > c.amplitude_high || !(c.formant_hz > 0) || !(c.bandwidth_hz > 0)) {
      throw ValidationError("corpus: invalid class sound parameters");
    }
    if (c.duration_high + 0.25 > clip_seconds) {
      throw ValidationError("corpus: bursts must fit inside the clip with margin");
    }
  }
  if (!(noise_floor > 0)) throw ValidationError("corpus: noise floor must be positive");
  if (sample_rate != 16000) throw ValidationError("corpus: only 16 kHz is supported");
}

namespace {

std::vector<double> resonate(const std::vector<double>& x, double hz, double bandwidth, double sr) {
  const double r = std::exp(-std::numbers::pi * bandwidth / sr);
  const double a1 = 2.0 * r * std::cos(2.0 * std::numbers::pi * hz / sr);
  const double a2 = -r * r;
  std::vector<double> y(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = x[i] + (i >= 1 ? a1 * y[i - 1] : 0.0) + (i >= 2 ? a2 * y[i - 2] : 0.0);
  }
  return y;
}

}  // namespace

audio::AudioClip render_example(const SyntheticCorpusSpec& spec, std::size_t cls,
                                std::mt19937_64& rng,
                                std::pair<std::size_t, std::size_t>* burst) {
  const auto& snd = spec.classes.at(cls);
  const double sr = spec.sample_rate;
  const auto n = static_cast<std::size_t>(spec.clip_seconds * sr);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto draw = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };

  const double f0 = draw(snd.f0_low, snd.f0_high);
  const double formant = snd.formant_hz * (1.0 + snd.formant_jitter * (2.0 * u(rng) - 1.0));
  const auto len = static_cast<std::size_t>(draw(snd.duration_low, snd.duration_high) * sr);
  const double peak = draw(snd.amplitude_low, snd.amplitude_high);
  const std::size_t margin = static_cast<std::size_t>(0.1 * sr);
  const auto start = margin + static_cast<std::size_t>(u(rng) * static_cast<double>(n - len - 2 * margin));

  // Band-limited pulse train: equal-amplitude cosine harmonics below 4 kHz.
  std::vector<double> src(len, 0.0);
  const auto harmonics = static_cast<std::size_t>(4000.0 / f0);
  for (std::size_t h = 1; h <= harmonics; ++h) {
    const double w = 2.0 * std::numbers::pi * f0 * static_cast<double>(h) / sr;
    for (std::size_t i = 0; i < len; ++i) src[i] += std::cos(w * static_cast<double>(i));
  }
  const double nuisance_hz = draw(spec.nuisance_low_hz, spec.nuisance_high_hz);
  const double nuisance_gain = spec.nuisance_gain * u(rng);
  const auto class_part = resonate(src, formant, snd.bandwidth_hz, sr);
  const auto nuisance_part = resonate(src, nuisance_hz, snd.bandwidth_hz, sr);
  double p_class = 0.0, p_nuis = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    p_class += class_part[i] * class_part[i];
    p_nuis += nuisance_part[i] * nuisance_part[i];
  }
  const double mix = p_nuis > 0.0 ? nuisance_gain * std::sqrt(p_class / p_nuis) : 0.0;
  std::vector<double> y(len);
  for (std::size_t i = 0; i < len; ++i) y[i] = class_part[i] + mix * nuisance_part[i];
  // 20 ms raised-cosine fades, then scale to the drawn peak.
  const std::size_t fade = std::min<std::size_t>(static_cast<std::size_t>(0.02 * sr), len / 2);
  for (std::size_t i = 0; i < fade; ++i) {
    const double g = 0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(i) / static_cast<double>(fade));
    y[i] *= g;
    y[len - 1 - i] *= g;
  }
  double mx = 0.0;
  for (double v : y) mx = std::max(mx, std::abs(v));
  if (mx > 0.0) {
    for (double& v : y) v *= peak / mx;
  }

  audio::AudioClip clip;
  clip.sample_rate = spec.sample_rate;
  clip.samples.resize(n);
  std::normal_distribution<double> g(0.0, spec.noise_floor);
  for (double& v : clip.samples) v = g(rng);
  for (std::size_t i = 0; i < len; ++i) clip.samples[start + i] += y[i];
  for (double& v : clip.samples) v = std::clamp(v, -1.0, 32767.0 / 32768.0);
  if (burst) *burst = {start, start + len};
  return clip;
}

std::vector<io::ManifestRow> gen_synthetic_corpus(const SyntheticCorpusSpec& spec,
                                                  const std::filesystem::path& dir) {
  spec.validate();
  struct Job {
    std::size_t partition, cls, index;
  };
  std::vector<Job> jobs;
  for (std::size_t p = 0; p < 3; ++p) {
    for (std::size_t k = 0; k < spec.num_classes(); ++k) {
      for (std::size_t i = 0; i < spec.counts[p][k]; ++i) jobs.push_back({p, k, i});
    }
  }
  std::vector<io::ManifestRow> rows(jobs.size());
  for (std::size_t p = 0; p < 3; ++p) {
    std::filesystem::create_directories(dir / data::to_string(static_cast<data::Partition>(p)));
  }
  parallel::for_each_index(parallel::Exec::omp, jobs.size(), [&](std::size_t j) {
    const auto& job = jobs[j];
    auto rng = make_rng(spec.seed, (job.partition * 64 + job.cls) * 1000003ULL + job.index);
    const auto clip = render_example(spec, job.cls, rng);
    const auto part = static_cast<data::Partition>(job.partition);
    const std::string rel = std::string(data::to_string(part)) + "/" + spec.class_names[job.cls] +
                            "_" + std::to_string(job.index) + ".wav";
    audio::write_wav(dir / rel, clip);
    rows[j] = {rel, spec.class_names[job.cls], part};
  });
  io::write_manifest(dir / "manifest.csv", rows);
  return rows;
}

}  // namespace scgan::experiments
