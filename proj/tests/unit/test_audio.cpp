#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles/oracles.h"
#include "scgan/audio/boaw.h"
#include "scgan/audio/events.h"
#include "scgan/audio/features.h"
#include "scgan/audio/wav.h"
#include "scgan/error.h"
#include "scgan/rng.h"

using namespace scgan;
using namespace scgan::audio;

namespace {

AudioClip noise_clip(double seconds, double amp, std::mt19937_64& rng) {
  AudioClip c;
  c.samples.resize(static_cast<std::size_t>(seconds * 16000));
  std::uniform_real_distribution<double> u(-amp, amp);
  for (double& v : c.samples) v = u(rng);
  return c;
}

void add_burst(AudioClip& c, std::size_t start, std::size_t len, double amp) {
  for (std::size_t i = 0; i < len; ++i) {
    c.samples[start + i] += amp * std::sin(2.0 * std::numbers::pi * 440.0 * i / 16000.0);
  }
}

AudioClip sine(double hz, double seconds, double amp = 1.0) {
  AudioClip c;
  c.samples.resize(static_cast<std::size_t>(seconds * 16000));
  for (std::size_t i = 0; i < c.samples.size(); ++i) {
    c.samples[i] = amp * std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) / 16000.0);
  }
  return c;
}

}  // namespace

TEST_CASE("wav round trip and scaling") {
  const auto dir = std::filesystem::temp_directory_path();
  AudioClip zero;
  zero.samples.assign(100, 0.0);
  write_wav(dir / "zero.wav", zero);
  CHECK(read_wav(dir / "zero.wav").samples == zero.samples);

  AudioClip edge;
  edge.samples = {-1.0, 0.5, 32767.0 / 32768.0};
  write_wav(dir / "edge.wav", edge);
  const auto back = read_wav(dir / "edge.wav");
  CHECK(back.samples[0] == -1.0);
  CHECK(back.samples == edge.samples);
  CHECK(back.sample_rate == 16000);

  // A seeded clip quantized to the PCM grid reads back bit-identically.
  auto rng = make_rng(3);
  std::uniform_int_distribution<int> pcm(-32768, 32767);
  AudioClip q;
  for (int i = 0; i < 5000; ++i) q.samples.push_back(pcm(rng) / 32768.0);
  write_wav(dir / "q.wav", q);
  CHECK(read_wav(dir / "q.wav").samples == q.samples);

  std::ofstream(dir / "bad.wav") << "RIFF1234WAVEjunk";
  CHECK_THROWS_AS(read_wav(dir / "bad.wav"), ValidationError);
  CHECK_THROWS_AS(read_wav(dir / "missing_file.wav"), IoError);
  for (const char* f : {"zero.wav", "edge.wav", "q.wav", "bad.wav"}) std::filesystem::remove(dir / f);
}

TEST_CASE("event detection") {
  auto rng = make_rng(5);
  SUBCASE("constant signal gives no events") {
    AudioClip c;
    c.samples.assign(12 * 16000, 1e-4);
    CHECK(detect_events(c).events.empty());
    AudioClip silent;
    silent.samples.assign(16000, 0.0);
    const auto d = detect_events(silent);
    CHECK(d.events.empty());
    CHECK(d.silent);
  }
  SUBCASE("single burst") {
    auto c = noise_clip(12.0, 0.01, rng);
    const std::size_t s0 = 5 * 16000 + 37, len = 6400;  // 400 ms
    add_burst(c, s0, len, 0.05);
    const auto d = detect_events(c);
    REQUIRE(d.events.size() == 1);
    CHECK(std::abs(static_cast<long>(d.events[0].start) - static_cast<long>(s0 - 1600)) <= 160);
    CHECK(std::abs(static_cast<long>(d.events[0].end) - static_cast<long>(s0 + len + 1600)) <= 160);
    CHECK_FALSE(d.global_fallback);
  }
  SUBCASE("bursts 150 ms apart merge") {
    auto c = noise_clip(12.0, 0.01, rng);
    add_burst(c, 3 * 16000, 6400, 0.05);
    add_burst(c, 3 * 16000 + 6400 + 2400, 6400, 0.05);
    const auto d = detect_events(c);
    CHECK(d.events.size() == 1);
  }
  SUBCASE("short burst is ignored, short clip uses one block") {
    auto c = noise_clip(4.0, 0.01, rng);
    add_burst(c, 16000, 3200, 0.05);  // 200 ms
    const auto d = detect_events(c);
    CHECK(d.events.empty());
    CHECK(d.global_fallback);
  }
  SUBCASE("padding clamps at clip edges") {
    auto c = noise_clip(12.0, 0.01, rng);
    add_burst(c, 0, 8000, 0.05);
    const auto d = detect_events(c);
    REQUIRE(d.events.size() == 1);
    CHECK(d.events[0].start == 0);
    CHECK_FALSE(d.events[0].padded_before);
  }
  CHECK(histogram_peak({1.0, 1.0, 1.0}, 1024) == 1.0);
}

TEST_CASE("LLD extraction") {
  SUBCASE("1 kHz sine") {
    const auto seq = extract_llds(sine(1000.0, 0.5));
    CHECK(seq.dim() == kLlds);
    CHECK(seq.length() == 1 + (8000 - 400) / 160);
    for (std::size_t t = 0; t < seq.length(); ++t) {
      CHECK(std::abs(seq.frames(t, 2) - 1000.0) < 20.0);
      CHECK(std::abs(seq.frames(t, 1) - 2000.0) < 100.0);
      CHECK(seq.frames(t, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.01));
    }
  }
  SUBCASE("silence") {
    AudioClip c;
    c.samples.assign(4000, 0.0);
    const auto seq = extract_llds(c);
    const double floor_mfcc1 = seq.frames(0, 11);
    for (std::size_t t = 0; t < seq.length(); ++t) {
      CHECK(seq.frames(t, 0) == 0.0);
      CHECK(seq.frames(t, 3) == 0.0);
      CHECK(seq.frames(t, 11) == floor_mfcc1);
      for (std::size_t j = kBaseLlds; j < kLlds; ++j) CHECK(seq.frames(t, j) == 0.0);
    }
  }
  SUBCASE("power spectrum matches direct DFT") {
    // Centroid of a two-tone frame against a centroid from the direct DFT.
    auto rng = make_rng(9);
    std::normal_distribution<double> g(0.0, 0.2);
    AudioClip c;
    for (int i = 0; i < 400; ++i) c.samples.push_back(g(rng));
    const auto llds = base_llds(c);
    std::vector<double> x(400);
    for (int i = 0; i < 400; ++i) {
      x[i] = c.samples[i] * (0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / 399.0));
    }
    const auto p = oracle::dft_power(x, 512);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      num += k * 31.25 * p[k];
      den += p[k];
    }
    CHECK(llds(0, 2) == doctest::Approx(num / den).epsilon(1e-9));
  }
  SUBCASE("deltas") {
    nn::Matrix flat(6, 2, 3.0);
    const auto df = deltas(flat);
    for (double v : df.values()) CHECK(v == 0.0);
    nn::Matrix ramp(7, 1);
    for (std::size_t t = 0; t < 7; ++t) ramp(t, 0) = static_cast<double>(t);
    CHECK(deltas(ramp)(3, 0) == doctest::Approx(1.0));
  }
  SUBCASE("errors") {
    AudioClip tiny;
    tiny.samples.assign(100, 0.1);
    CHECK_THROWS_AS(extract_llds(tiny), ValidationError);
    auto c = sine(100, 0.1);
    c.sample_rate = 44100;
    CHECK_THROWS_AS(extract_llds(c), ValidationError);
  }
  CHECK(lld_names().size() == kLlds);
  const auto fb = mel_filterbank(26, 512, 16000.0);
  for (std::size_t b = 0; b < 26; ++b) {
    double s = 0.0;
    for (std::size_t k = 0; k < fb.cols(); ++k) s += fb(b, k);
    CHECK(s == doctest::Approx(1.0));
  }
}

TEST_CASE("functionals") {
  const std::vector<double> flat(5, 3.0);
  const auto f = contour_functionals(flat);
  CHECK(f[0] == 3.0);
  CHECK(f[1] == 0.0);
  CHECK(f[2] == 3.0);
  CHECK(f[3] == 3.0);
  CHECK(f[4] == 0.0);
  CHECK(f[10] == 0.0);
  CHECK(f[11] == 0.0);

  const std::vector<double> ramp{0, 1, 2, 3};
  const auto r = contour_functionals(ramp);
  CHECK(r[10] == doctest::Approx(1.0));
  CHECK(r[8] == doctest::Approx(1.5));
  CHECK(r[5] == doctest::Approx(0.0).epsilon(1e-12));

  auto rng = make_rng(2);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> x(37);
  for (double& v : x) v = g(rng);
  const auto fx = contour_functionals(x);
  CHECK(fx[1] == doctest::Approx(std::sqrt(oracle::central_moment(x, 2))));
  CHECK(fx[5] == doctest::Approx(oracle::central_moment(x, 3) /
                                 std::pow(oracle::central_moment(x, 2), 1.5)));
  CHECK(fx[6] == doctest::Approx(oracle::central_moment(x, 4) /
                                 std::pow(oracle::central_moment(x, 2), 2)));
  CHECK(fx[7] == doctest::Approx(oracle::percentile(x, 0.25)));
  CHECK(fx[9] == doctest::Approx(oracle::percentile(x, 0.75)));
  CHECK(fx[10] == doctest::Approx(oracle::ls_slope(x)));

  std::vector<double> sym{-2, -1, -1, 0, 1, 1, 2};
  CHECK(std::abs(contour_functionals(sym)[5]) < 1e-9);

  nn::Matrix seq(10, kLlds, 0.5);
  CHECK(functionals(seq).size() == kFunctionals * kLlds);
  CHECK_THROWS_AS(functionals(nn::Matrix(1, 3)), ValidationError);
}

TEST_CASE("codebook and bag of audio words") {
  auto rng = make_rng(6);
  SUBCASE("worked example") {
    Codebook cb;
    cb.words = nn::Matrix(2, 2, {0, 0, 1, 1});
    nn::Matrix frames(2, 2, {0.1, 0, 0.9, 1});
    CHECK(boaw(frames.view(), cb, 1) == std::vector<double>{0.5, 0.5});
    CHECK_THROWS_AS(boaw(frames.view(), cb, 3), ValidationError);
  }
  SUBCASE("matches exhaustive assignment and normalizes") {
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t S = 2 + trial % 7, T = 1 + trial % 13, d = 1 + trial % 4;
      Codebook cb;
      cb.words = nn::Matrix(S, d);
      for (double& v : cb.words.values()) v = std::round(g(rng) * 2) / 2;  // forces ties
      nn::Matrix seq(T, d);
      for (double& v : seq.values()) v = std::round(g(rng) * 2) / 2;
      const std::size_t n = 1 + trial % S;
      const auto h = boaw(seq.view(), cb, n);
      std::vector<std::vector<double>> fr, w;
      for (std::size_t i = 0; i < T; ++i) fr.emplace_back(seq.row(i).begin(), seq.row(i).end());
      for (std::size_t i = 0; i < S; ++i) w.emplace_back(cb.words.row(i).begin(), cb.words.row(i).end());
      CHECK(h == oracle::boaw_bruteforce(fr, w, n));
      double s = 0.0;
      for (double v : h) s += v;
      CHECK(std::abs(s - 1.0) < 1e-9);
      const auto all = boaw(seq.view(), cb, S);
      for (double v : all) CHECK(v == doctest::Approx(1.0 / S).epsilon(1e-15));
    }
  }
  SUBCASE("duplicated codewords resolve to the lower index") {
    Codebook cb;
    cb.words = nn::Matrix(3, 1, {1.0, 1.0, 5.0});
    nn::Matrix seq(1, 1, {1.2});
    CHECK(boaw(seq.view(), cb, 1) == std::vector<double>{1.0, 0.0, 0.0});
  }
  SUBCASE("k-means on two blobs") {
    std::normal_distribution<double> g(0.0, 0.2);
    nn::Matrix frames(400, 2);
    for (std::size_t i = 0; i < 400; ++i) {
      const double cx = i < 200 ? -3.0 : 3.0;
      frames(i, 0) = cx + g(rng);
      frames(i, 1) = 1.0 + g(rng);
    }
    const auto cb = build_codebook(frames.view(), 2, CodebookMethod::kmeans, rng);
    const bool first_left = cb.words(0, 0) < 0;
    CHECK(std::abs(cb.words(first_left ? 0 : 1, 0) + 3.0) < 0.1);
    CHECK(std::abs(cb.words(first_left ? 1 : 0, 0) - 3.0) < 0.1);
    for (std::size_t i = 1; i < cb.inertia.size(); ++i) CHECK(cb.inertia[i] <= cb.inertia[i - 1]);

    auto a = make_rng(1), b = make_rng(1);
    const auto s = build_codebook(frames.view(), 5, CodebookMethod::kmeans, a, {}, parallel::Exec::serial);
    const auto o = build_codebook(frames.view(), 5, CodebookMethod::kmeans, b, {}, parallel::Exec::omp);
    CHECK(s.words == o.words);
  }
  SUBCASE("random codebook is a permutation of distinct frames") {
    nn::Matrix frames(5, 1, {0, 1, 2, 3, 4});
    const auto cb = build_codebook(frames.view(), 5, CodebookMethod::random, rng);
    std::vector<double> w(cb.words.values().begin(), cb.words.values().end());
    std::sort(w.begin(), w.end());
    CHECK(w == std::vector<double>{0, 1, 2, 3, 4});
    CHECK_THROWS_AS(build_codebook(frames.view(), 6, CodebookMethod::random, rng), ValidationError);
  }
}

TEST_CASE("window slicing") {
  nn::Matrix s40(40, 3, 1.0), s100(100, 3), s39(39, 3, 2.0);
  for (std::size_t t = 0; t < 100; ++t) s100(t, 0) = static_cast<double>(t);
  CHECK(window_sequence(s40).windows.size() == 1);
  const auto w = window_sequence(s100);
  CHECK(w.windows.size() == 7);
  CHECK(w.windows[6](0, 0) == 60.0);
  const auto p = window_sequence(s39);
  CHECK(p.padded);
  REQUIRE(p.windows.size() == 1);
  CHECK(p.windows[0].rows() == 40);
  CHECK(p.windows[0](38, 0) == 2.0);
  CHECK(p.windows[0](39, 0) == 0.0);
  CHECK_THROWS_AS(window_sequence(nn::Matrix(0, 3)), ValidationError);
}
