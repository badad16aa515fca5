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

// MFCC front end and DTW similarity between two feature sequences.

#ifndef PRONCOACH_FEATURES_HPP_
#define PRONCOACH_FEATURES_HPP_

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <mutex>
#include <numbers>
#include <utility>
#include <vector>

#include "proncoach/errors.hpp"
#include "proncoach/wav.hpp"

namespace proncoach {

struct MfccConfig {
  static constexpr int kNumCoeffs = 13;
  static constexpr int kNumFilters = 26;
  static constexpr int kWindow = 400;  // 25 ms at 16 kHz
  static constexpr int kHop = 160;     // 10 ms
  static constexpr int kFftSize = 512;
  static constexpr double kLowHz = 0.0;
  static constexpr double kHighHz = 8000.0;
  static constexpr double kPreEmphasis = 0.97;
  static constexpr double kEnergyFloor = 1e-10;
};

using FeatureFrame = std::array<double, MfccConfig::kNumCoeffs>;

struct FeatureMatrix {
  std::vector<FeatureFrame> frames;
  std::size_t size() const { return frames.size(); }
  bool empty() const { return frames.empty(); }
};

/// floor((n - window) / hop) + 1 for n >= window, else 0.
constexpr std::size_t mfcc_frame_count(std::size_t num_samples) {
  if (num_samples < static_cast<std::size_t>(MfccConfig::kWindow)) return 0;
  return (num_samples - MfccConfig::kWindow) / MfccConfig::kHop + 1;
}

namespace detail {

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

/// Triangular filters over the rfft bins, evaluated at each bin's centre
/// frequency. Row-major [filter][bin].
inline const std::vector<double>& mel_filterbank() {
  static const std::vector<double> bank = [] {
    constexpr int kBins = MfccConfig::kFftSize / 2 + 1;
    constexpr int kF = MfccConfig::kNumFilters;
    std::vector<double> edges(kF + 2);
    const double lo = hz_to_mel(MfccConfig::kLowHz), hi = hz_to_mel(MfccConfig::kHighHz);
    for (int i = 0; i < kF + 2; ++i) edges[i] = mel_to_hz(lo + (hi - lo) * i / (kF + 1));
    std::vector<double> w(static_cast<std::size_t>(kF) * kBins, 0.0);
    for (int f = 0; f < kF; ++f) {
      for (int b = 0; b < kBins; ++b) {
        const double hz = static_cast<double>(b) * kSampleRate / MfccConfig::kFftSize;
        double v = 0.0;
        if (hz > edges[f] && hz <= edges[f + 1])
          v = (hz - edges[f]) / (edges[f + 1] - edges[f]);
        else if (hz > edges[f + 1] && hz < edges[f + 2])
          v = (edges[f + 2] - hz) / (edges[f + 2] - edges[f + 1]);
        w[static_cast<std::size_t>(f) * kBins + b] = v;
      }
    }
    return w;
  }();
  return bank;
}

inline const std::vector<double>& hamming_window() {
  static const std::vector<double> win = [] {
    std::vector<double> w(MfccConfig::kWindow);
    for (int n = 0; n < MfccConfig::kWindow; ++n)
      w[n] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * n / (MfccConfig::kWindow - 1));
    return w;
  }();
  return win;
}

/// Orthonormal DCT-II basis, [coeff][filter].
inline const std::vector<double>& dct_basis() {
  static const std::vector<double> basis = [] {
    constexpr int kN = MfccConfig::kNumFilters;
    std::vector<double> b(static_cast<std::size_t>(MfccConfig::kNumCoeffs) * kN);
    for (int k = 0; k < MfccConfig::kNumCoeffs; ++k) {
      const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / kN);
      for (int n = 0; n < kN; ++n)
        b[static_cast<std::size_t>(k) * kN + n] =
            scale * std::cos(std::numbers::pi * k * (n + 0.5) / kN);
    }
    return b;
  }();
  return basis;
}

// FFTW planning is not thread-safe; execution with a private plan is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

class RealFft {
 public:
  explicit RealFft(int n) : n_(n) {
    in_ = fftw_alloc_real(static_cast<std::size_t>(n));
    out_ = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1));
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan_ = fftw_plan_dft_r2c_1d(n, in_, out_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    {
      std::lock_guard<std::mutex> lock(fftw_planner_mutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(in_);
    fftw_free(out_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  double* input() { return in_; }
  /// Power spectrum |X_k|^2 / n for k in [0, n/2].
  void power(std::vector<double>& out) {
    fftw_execute(plan_);
    out.resize(static_cast<std::size_t>(n_ / 2 + 1));
    for (int k = 0; k <= n_ / 2; ++k)
      out[k] = (out_[k][0] * out_[k][0] + out_[k][1] * out_[k][1]) / n_;
  }

 private:
  int n_;
  double* in_ = nullptr;
  fftw_complex* out_ = nullptr;
  fftw_plan plan_ = nullptr;
};

}  // namespace detail

/// 13 MFCCs (c0 included) per 25 ms Hamming frame with a 10 ms hop.
/// Throws TooShort for clips under one window.
inline FeatureMatrix mfcc(const AudioClip& audio) {
  const std::size_t n = audio.samples.size();
  const std::size_t frames = mfcc_frame_count(n);
  if (frames == 0) throw TooShort("audio shorter than 25 ms");

  std::vector<double> emph(n);
  emph[0] = audio.samples[0];
  for (std::size_t i = 1; i < n; ++i)
    emph[i] = audio.samples[i] - MfccConfig::kPreEmphasis * audio.samples[i - 1];

  constexpr int kBins = MfccConfig::kFftSize / 2 + 1;
  const auto& win = detail::hamming_window();
  const auto& bank = detail::mel_filterbank();
  const auto& dct = detail::dct_basis();
  detail::RealFft fft(MfccConfig::kFftSize);
  std::vector<double> spectrum;
  std::array<double, MfccConfig::kNumFilters> log_mel{};

  FeatureMatrix out;
  out.frames.resize(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    double* buf = fft.input();
    const std::size_t start = t * MfccConfig::kHop;
    for (int i = 0; i < MfccConfig::kWindow; ++i) buf[i] = emph[start + i] * win[i];
    for (int i = MfccConfig::kWindow; i < MfccConfig::kFftSize; ++i) buf[i] = 0.0;
    fft.power(spectrum);
    for (int f = 0; f < MfccConfig::kNumFilters; ++f) {
      double e = 0.0;
      const double* row = &bank[static_cast<std::size_t>(f) * kBins];
      for (int b = 0; b < kBins; ++b) e += row[b] * spectrum[b];
      log_mel[f] = std::log(std::max(e, MfccConfig::kEnergyFloor));
    }
    for (int k = 0; k < MfccConfig::kNumCoeffs; ++k) {
      double c = 0.0;
      const double* row = &dct[static_cast<std::size_t>(k) * MfccConfig::kNumFilters];
      for (int f = 0; f < MfccConfig::kNumFilters; ++f) c += row[f] * log_mel[f];
      out.frames[t][k] = c;
    }
  }
  return out;
}

inline double frame_distance(const FeatureFrame& a, const FeatureFrame& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return std::sqrt(s);
}

struct DtwResult {
  double total_distance = 0.0;
  std::size_t path_length = 0;
  std::vector<std::pair<std::size_t, std::size_t>> path;  // (i, j), from (0,0)
  double similarity = 1.0;
};

/// Dynamic time warping with diagonal, horizontal and vertical steps of
/// weight 1. Among equal-cost paths the shortest wins, which keeps the
/// result symmetric in its arguments. Throws EmptyFeatures.
inline DtwResult dtw(const FeatureMatrix& a, const FeatureMatrix& b) {
  if (a.empty() || b.empty()) throw EmptyFeatures("DTW needs non-empty feature matrices");
  const std::size_t n = a.size(), m = b.size();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 0 = start, 1 = diag, 2 = from (i-1, j), 3 = from (i, j-1)
  std::vector<std::uint8_t> dir(n * m, 0);
  std::vector<double> cost_prev(m, kInf), cost_cur(m, kInf);
  std::vector<std::size_t> len_prev(m, 0), len_cur(m, 0);

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double d = frame_distance(a.frames[i], b.frames[j]);
      if (i == 0 && j == 0) {
        cost_cur[0] = d;
        len_cur[0] = 1;
        continue;
      }
      double best = kInf;
      std::size_t best_len = 0;
      std::uint8_t best_dir = 0;
      auto consider = [&](double c, std::size_t l, std::uint8_t which) {
        if (c < best || (c == best && l < best_len)) {
          best = c;
          best_len = l;
          best_dir = which;
        }
      };
      if (i > 0 && j > 0) consider(cost_prev[j - 1], len_prev[j - 1], 1);
      if (i > 0) consider(cost_prev[j], len_prev[j], 2);
      if (j > 0) consider(cost_cur[j - 1], len_cur[j - 1], 3);
      cost_cur[j] = best + d;
      len_cur[j] = best_len + 1;
      dir[i * m + j] = best_dir;
    }
    std::swap(cost_prev, cost_cur);
    std::swap(len_prev, len_cur);
  }

  DtwResult r;
  r.total_distance = cost_prev[m - 1];
  r.path_length = len_prev[m - 1];
  std::size_t i = n - 1, j = m - 1;
  r.path.emplace_back(i, j);
  while (i > 0 || j > 0) {
    switch (dir[i * m + j]) {
      case 1: --i; --j; break;
      case 2: --i; break;
      default: --j; break;
    }
    r.path.emplace_back(i, j);
  }
  std::reverse(r.path.begin(), r.path.end());
  r.similarity = 1.0 / (1.0 + r.total_distance / static_cast<double>(r.path_length));
  return r;
}

/// 1 / (1 + mean per-step frame distance along the optimal warping path).
inline double dtw_similarity(const FeatureMatrix& a, const FeatureMatrix& b) {
  return dtw(a, b).similarity;
}

}  // namespace proncoach

#endif  // PRONCOACH_FEATURES_HPP_
