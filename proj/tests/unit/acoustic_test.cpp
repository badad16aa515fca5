// Copyright 2026 The proncoach Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "proncoach/features.hpp"
#include "proncoach/random.hpp"
#include "proncoach/wav.hpp"
#include "support/oracles.hpp"

using namespace proncoach;

namespace {

std::vector<double> sine(double hz, double seconds, double offset_s = 0.0, double amp = 0.5) {
  std::vector<double> s(static_cast<std::size_t>(seconds * kSampleRate));
  for (std::size_t i = 0; i < s.size(); ++i)
    s[i] = amp * std::sin(2 * std::numbers::pi * hz * (i / double(kSampleRate) + offset_s));
  return s;
}

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> s(n);
  for (auto& x : s) x = rng.uniform() - 0.5;
  return s;
}

AudioClip clip(std::vector<double> s) { return AudioClip{std::move(s), kSampleRate}; }

/// MFCC of frame `t` computed with a naive O(n^2) DFT and filters built
/// from the mel formula directly.
std::array<double, 13> naive_mfcc_frame(const std::vector<double>& x, std::size_t t) {
  const int win = 400, nfft = 512, nf = 26;
  std::vector<double> frame(nfft, 0.0);
  for (int i = 0; i < win; ++i) {
    const std::size_t k = t * 160 + i;
    const double pre = x[k] - (k > 0 ? 0.97 * x[k - 1] : 0.0);
    frame[i] = pre * (0.54 - 0.46 * std::cos(2 * std::numbers::pi * i / (win - 1)));
  }
  std::vector<double> power(nfft / 2 + 1);
  for (int k = 0; k <= nfft / 2; ++k) {
    double re = 0, im = 0;
    for (int n = 0; n < nfft; ++n) {
      re += frame[n] * std::cos(2 * std::numbers::pi * k * n / nfft);
      im -= frame[n] * std::sin(2 * std::numbers::pi * k * n / nfft);
    }
    power[k] = (re * re + im * im) / nfft;
  }
  auto mel = [](double f) { return 2595 * std::log10(1 + f / 700); };
  auto hz = [](double m) { return 700 * (std::pow(10, m / 2595) - 1); };
  std::array<double, 26> logmel{};
  for (int f = 0; f < nf; ++f) {
    const double lo = hz(mel(8000) * f / 27), mid = hz(mel(8000) * (f + 1) / 27),
                 hi = hz(mel(8000) * (f + 2) / 27);
    double e = 0;
    for (int k = 0; k <= nfft / 2; ++k) {
      const double fk = k * 16000.0 / nfft;
      double w = 0;
      if (fk > lo && fk <= mid) w = (fk - lo) / (mid - lo);
      if (fk > mid && fk < hi) w = (hi - fk) / (hi - mid);
      e += w * power[k];
    }
    logmel[f] = std::log(std::max(e, 1e-10));
  }
  std::array<double, 13> c{};
  for (int k = 0; k < 13; ++k) {
    for (int n = 0; n < nf; ++n) c[k] += logmel[n] * std::cos(std::numbers::pi * k * (n + 0.5) / nf);
    c[k] *= std::sqrt((k == 0 ? 1.0 : 2.0) / nf);
  }
  return c;
}

FeatureMatrix random_features(Rng& rng, std::size_t max_frames) {
  FeatureMatrix m;
  m.frames.resize(1 + rng.below(max_frames));
  for (auto& f : m.frames)
    for (auto& v : f) v = rng.uniform() * 4 - 2;
  return m;
}

}  // namespace

TEST_CASE("decode_wav", "[acoustic]") {
  SECTION("1 s of silence") {
    const AudioClip a = decode_wav(encode_wav(std::vector<double>(16000, 0.0)));
    CHECK(a.samples.size() == 16000);
    CHECK(std::all_of(a.samples.begin(), a.samples.end(), [](double s) { return s == 0.0; }));
    CHECK(a.duration_seconds() == 1.0);
  }
  SECTION("44.1 kHz stereo is rejected") {
    CHECK_THROWS_AS(decode_wav(encode_wav(std::vector<double>(100, 0.0), 44100, 2)),
                    UnsupportedFormat);
    CHECK_THROWS_AS(decode_wav(encode_wav(std::vector<double>(100, 0.0), 44100, 1)),
                    UnsupportedFormat);
    CHECK_THROWS_AS(decode_wav(encode_wav(std::vector<double>(100, 0.0), 16000, 2)),
                    UnsupportedFormat);
  }
  SECTION("non-PCM and 8-bit are rejected") {
    std::string w = encode_wav(std::vector<double>(10, 0.0));
    std::string float_fmt = w;
    float_fmt[20] = 3;  // IEEE float
    CHECK_THROWS_AS(decode_wav(float_fmt), UnsupportedFormat);
    std::string eight = w;
    eight[34] = 8;
    CHECK_THROWS_AS(decode_wav(eight), UnsupportedFormat);
  }
  SECTION("truncated header") {
    const std::string w = encode_wav(std::vector<double>(10, 0.0));
    CHECK_THROWS_AS(decode_wav(w.substr(0, 20)), CorruptFile);
    CHECK_THROWS_AS(decode_wav(w.substr(0, 8)), CorruptFile);
    CHECK_THROWS_AS(decode_wav(""), CorruptFile);
    CHECK_THROWS_AS(decode_wav(w.substr(0, w.size() - 4)), CorruptFile);
  }
  SECTION("unknown chunks are skipped") {
    std::string w = encode_wav(std::vector<double>(4, 0.25));
    const std::string list = std::string("LIST") + std::string("\x03\0\0\0", 4) + "abc" + '\0';
    w.insert(36, list);
    const AudioClip a = decode_wav(w);
    REQUIRE(a.samples.size() == 4);
    CHECK(a.samples[0] == Catch::Approx(0.25).margin(1.0 / 32768));
  }
  SECTION("encode then decode is exact to 16-bit precision") {
    const auto s = noise(1000, 4);
    const AudioClip a = decode_wav(encode_wav(s));
    REQUIRE(a.samples.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i)
      REQUIRE(std::abs(a.samples[i] - s[i]) <= 1.0 / 32767);
  }
}

TEST_CASE("mfcc frame count", "[acoustic]") {
  CHECK(mfcc(clip(std::vector<double>(16000, 0.0))).size() == 98);
  CHECK(mfcc(clip(std::vector<double>(400, 0.0))).size() == 1);
  CHECK_THROWS_AS(mfcc(clip(std::vector<double>(399, 0.0))), TooShort);
  CHECK_THROWS_AS(mfcc(clip({})), TooShort);

  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 400 + rng.below(160000 - 400 + 1);  // 25 ms .. 10 s
    const std::size_t expected = (n - 400) / 160 + 1;
    REQUIRE(mfcc_frame_count(n) == expected);
    if (trial % 10 == 0) REQUIRE(mfcc(clip(std::vector<double>(n, 0.0))).size() == expected);
  }
}

TEST_CASE("mfcc values", "[acoustic]") {
  SECTION("silence hits the energy floor in every band") {
    const FeatureMatrix m = mfcc(clip(std::vector<double>(800, 0.0)));
    // c0 of a constant log spectrum is sqrt(N) * log(floor); the rest vanish
    CHECK(m.frames[0][0] == Catch::Approx(std::sqrt(26.0) * std::log(1e-10)).epsilon(1e-12));
    for (int k = 1; k < 13; ++k) CHECK(std::abs(m.frames[0][k]) < 1e-9);
  }
  SECTION("matches a naive DFT implementation") {
    const auto x = noise(4000, 17);
    const FeatureMatrix m = mfcc(clip(x));
    for (std::size_t t : {std::size_t{0}, std::size_t{7}, m.size() - 1}) {
      const auto ref = naive_mfcc_frame(x, t);
      for (int k = 0; k < 13; ++k) REQUIRE(m.frames[t][k] == Catch::Approx(ref[k]).margin(1e-6));
    }
  }
  SECTION("deterministic") {
    const auto x = sine(300, 0.3);
    CHECK(mfcc(clip(x)).frames == mfcc(clip(x)).frames);
  }
  SECTION("440 Hz and 880 Hz differ") {
    const auto a = mfcc(clip(sine(440, 0.5)));
    const auto b = mfcc(clip(sine(880, 0.5)));
    double diff = 0;
    for (std::size_t t = 0; t < a.size(); ++t)
      for (int k = 1; k < 13; ++k) diff += std::abs(a.frames[t][k] - b.frames[t][k]);
    CHECK(diff > 1.0);
  }
}

TEST_CASE("dtw", "[acoustic]") {
  SECTION("self similarity is 1") {
    const auto a = mfcc(clip(sine(440, 0.5)));
    CHECK(std::abs(dtw_similarity(a, a) - 1.0) <= 1e-9);
  }
  SECTION("single frame vs identical single frame") {
    FeatureMatrix a;
    a.frames.push_back({});
    a.frames[0][3] = 1.5;
    CHECK(dtw_similarity(a, a) == 1.0);
  }
  SECTION("empty input") {
    FeatureMatrix a, b;
    b.frames.push_back({});
    CHECK_THROWS_AS(dtw(a, b), EmptyFeatures);
    CHECK_THROWS_AS(dtw(b, a), EmptyFeatures);
  }
  SECTION("shifted tone is closer than noise") {
    const auto tone = mfcc(clip(sine(440, 0.5)));
    // 50 ms late and off-phase
    std::vector<double> late(800, 0.0);
    const auto body = sine(440, 0.45, 0.00123);
    late.insert(late.end(), body.begin(), body.end());
    const auto shifted = mfcc(clip(late));
    const auto hiss = mfcc(clip(noise(8000, 3)));
    CHECK(dtw_similarity(tone, shifted) > dtw_similarity(tone, hiss));
  }
  SECTION("known distance") {
    FeatureMatrix a, b;
    a.frames.resize(2);
    b.frames.resize(1);
    a.frames[1][0] = 3.0;
    b.frames[0][0] = 0.0;
    // path (0,0),(1,0): distances 0 and 3, mean 1.5
    const DtwResult r = dtw(a, b);
    CHECK(r.total_distance == 3.0);
    CHECK(r.path_length == 2);
    CHECK(r.similarity == Catch::Approx(1.0 / 2.5));
  }
}

TEST_CASE("dtw matches exhaustive path enumeration", "[acoustic][property]") {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_features(rng, 5);
    const auto b = random_features(rng, 5);
    const DtwResult r = dtw(a, b);
    const auto brute = oracle::dtw_brute(a.frames, b.frames);
    REQUIRE(r.total_distance == Catch::Approx(brute.total).epsilon(1e-12));
    REQUIRE(r.path_length == brute.length);
  }
}

TEST_CASE("dtw is symmetric and its path is valid", "[acoustic][property]") {
  Rng rng(64);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_features(rng, 40);
    const auto b = random_features(rng, 40);
    REQUIRE(std::abs(dtw_similarity(a, b) - dtw_similarity(b, a)) <= 1e-9);

    const DtwResult r = dtw(a, b);
    REQUIRE(r.path.front() == std::pair<std::size_t, std::size_t>{0, 0});
    REQUIRE(r.path.back() == std::pair<std::size_t, std::size_t>{a.size() - 1, b.size() - 1});
    REQUIRE(r.path.size() == r.path_length);
    for (std::size_t k = 1; k < r.path.size(); ++k) {
      const auto di = r.path[k].first - r.path[k - 1].first;
      const auto dj = r.path[k].second - r.path[k - 1].second;
      REQUIRE(di <= 1);
      REQUIRE(dj <= 1);
      REQUIRE(di + dj >= 1);
    }
    REQUIRE(r.similarity > 0.0);
    REQUIRE(r.similarity <= 1.0);
  }
}
