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

// Recognizer port and its two implementations: a seeded error-injecting
// mock and a pass-through that takes the hypothesis as text.

#ifndef PRONCOACH_RECOGNIZER_HPP_
#define PRONCOACH_RECOGNIZER_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "proncoach/alignment.hpp"
#include "proncoach/arabic_text.hpp"
#include "proncoach/content_store.hpp"
#include "proncoach/errors.hpp"
#include "proncoach/random.hpp"
#include "proncoach/wav.hpp"

namespace proncoach {

struct Hypothesis {
  GraphemeString graphemes;
  std::optional<std::vector<double>> confidences;  // parallel to graphemes
};

class RecognizerPort {
 public:
  virtual ~RecognizerPort() = default;
  virtual Hypothesis recognize(const AudioClip& audio, const PracticeItem& item) const = 0;
  /// True if the service must serialize calls to this recognizer.
  virtual bool single_flight() const { return false; }
};

struct ErrorRates {
  double p_sub_full = 0.0;
  double p_sub_diac = 0.0;
  double p_del = 0.0;
  double p_ins = 0.0;
};

inline void validate_rates(const ErrorRates& r) {
  for (double p : {r.p_sub_full, r.p_sub_diac, r.p_del, r.p_ins})
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidRates("error rates must lie in [0,1]");
  if (r.p_sub_full + r.p_sub_diac + r.p_del > 1.0 + 1e-12)
    throw InvalidRates("p_sub_full + p_sub_diac + p_del must not exceed 1");
}

inline constexpr double kUntouchedConfidence = 1.0;
inline constexpr double kCorruptedConfidence = 0.3;

/// One injected error. `ref_index` counts reference letters (spaces
/// skipped); for kIns it is the letter the insertion follows.
struct InjectedError {
  OpKind kind = OpKind::kDel;
  std::size_t ref_index = 0;
  friend bool operator==(const InjectedError&, const InjectedError&) = default;
};

struct Injection {
  Hypothesis hypothesis;
  std::vector<InjectedError> truth;
};

inline Grapheme random_grapheme(Rng& rng) {
  const auto& letters = base_letters();
  const auto& sets = diacritic_sets();
  Grapheme g;
  g.base = letters[rng.below(letters.size())];
  g.diacritics = sets[rng.below(sets.size())];
  return g;
}

/// Uniform over the letters other than `current`.
inline char32_t other_base(char32_t current, Rng& rng) {
  const auto& letters = base_letters();
  const auto cur = static_cast<std::size_t>(
      std::find(letters.begin(), letters.end(), current) - letters.begin());
  std::size_t idx = rng.below(letters.size() - 1);
  if (idx >= cur) ++idx;
  return letters[std::min(idx, letters.size() - 1)];
}

inline std::u32string other_diacritics(const std::u32string& current, Rng& rng) {
  const auto& sets = diacritic_sets();
  std::vector<const std::u32string*> others;
  for (const auto& s : sets)
    if (s != current) others.push_back(&s);
  return *others[rng.below(others.size())];
}

/// Corrupts `ref` letter by letter. Each letter gets at most one of full
/// substitution, diacritic substitution or deletion, then independently a
/// random grapheme may be inserted after it. Spaces are copied unchanged.
inline Injection inject_errors(const GraphemeString& ref, const ErrorRates& rates, Rng& rng) {
  validate_rates(rates);
  Injection out;
  std::vector<double> conf;
  std::size_t letter = 0;
  for (const auto& g : ref) {
    if (g.is_space()) {
      out.hypothesis.graphemes.push_back(g);
      conf.push_back(kUntouchedConfidence);
      continue;
    }
    const double u = rng.uniform();
    if (u < rates.p_sub_full) {
      Grapheme h{other_base(g.base, rng), g.diacritics};
      out.hypothesis.graphemes.push_back(h);
      conf.push_back(kCorruptedConfidence);
      out.truth.push_back({OpKind::kSubFull, letter});
    } else if (u < rates.p_sub_full + rates.p_sub_diac) {
      Grapheme h{g.base, other_diacritics(g.diacritics, rng)};
      out.hypothesis.graphemes.push_back(h);
      conf.push_back(kCorruptedConfidence);
      out.truth.push_back({OpKind::kSubDiacritic, letter});
    } else if (u < rates.p_sub_full + rates.p_sub_diac + rates.p_del) {
      out.truth.push_back({OpKind::kDel, letter});
    } else {
      out.hypothesis.graphemes.push_back(g);
      conf.push_back(kUntouchedConfidence);
    }
    if (rng.uniform() < rates.p_ins) {
      out.hypothesis.graphemes.push_back(random_grapheme(rng));
      conf.push_back(kCorruptedConfidence);
      out.truth.push_back({OpKind::kIns, letter});
    }
    ++letter;
  }
  out.hypothesis.confidences = std::move(conf);
  return out;
}

/// Deterministic stand-in for a neural recognizer: corrupts the item's
/// vowelized text with the given rates. The audio is not inspected.
inline Hypothesis mock_recognize(const AudioClip& /*audio*/, const PracticeItem& item,
                                 const ErrorRates& rates, std::uint64_t seed) {
  validate_rates(rates);
  Rng rng(seed);
  return inject_errors(segment_graphemes(item.vowelized_text), rates, rng).hypothesis;
}

inline std::uint64_t hash_audio(const AudioClip& audio) {
  std::uint64_t h = fnv1a({});
  for (double s : audio.samples) {
    const auto v = static_cast<std::int64_t>(std::llround(s * 32768.0));
    const std::string_view bytes(reinterpret_cast<const char*>(&v), sizeof v);
    h = fnv1a(bytes, h);
  }
  return h;
}

class MockRecognizer final : public RecognizerPort {
 public:
  MockRecognizer(ErrorRates rates, std::uint64_t seed) : rates_(rates), seed_(seed) {
    validate_rates(rates_);
  }
  /// Seeded from the configured seed, the item id and the audio content.
  Hypothesis recognize(const AudioClip& audio, const PracticeItem& item) const override {
    const std::uint64_t s = mix_seed(mix_seed(seed_, fnv1a(item.id)), hash_audio(audio));
    return mock_recognize(audio, item, rates_, s);
  }

 private:
  ErrorRates rates_;
  std::uint64_t seed_;
};

/// Parses a caller-supplied hypothesis. Throws MalformedText.
inline Hypothesis hypothesis_from_text(const std::string& text) {
  return Hypothesis{segment_graphemes(normalize(text)), std::nullopt};
}

/// Reads the hypothesis from a sidecar text field instead of audio.
class SidecarRecognizer final : public RecognizerPort {
 public:
  explicit SidecarRecognizer(std::string text) : text_(std::move(text)) {}
  Hypothesis recognize(const AudioClip&, const PracticeItem&) const override {
    return hypothesis_from_text(text_);
  }

 private:
  std::string text_;
};

struct FusionWeights {
  double textual = 0.7;
  double acoustic = 0.3;
};

inline void validate_weights(const FusionWeights& w) {
  if (!(w.textual >= 0.0 && w.acoustic >= 0.0) || std::abs(w.textual + w.acoustic - 1.0) > 1e-9)
    throw OutOfRange("fusion weights must be non-negative and sum to 1");
}

/// Textual score alone when there is no acoustic evidence, otherwise the
/// weighted mean of the two.
inline double fuse_scores(double textual, std::optional<double> acoustic,
                          const FusionWeights& w = {}) {
  require_unit_interval(textual, "textual score");
  if (!acoustic) return textual;
  if (!(*acoustic > 0.0 && *acoustic <= 1.0))
    throw OutOfRange("acoustic similarity outside (0,1]");
  validate_weights(w);
  return std::clamp(w.textual * textual + w.acoustic * *acoustic, 0.0, 1.0);
}

}  // namespace proncoach

#endif  // PRONCOACH_RECOGNIZER_HPP_
