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

#pragma once

#include <vector>

#include "proncoach/arabic_text.hpp"
#include "proncoach/random.hpp"

namespace gen {

using proncoach::Grapheme;
using proncoach::GraphemeString;

/// Well-formed grapheme strings: any letter with any permitted diacritic set,
/// single interior spaces.
inline GraphemeString random_graphemes(proncoach::Rng& rng, std::size_t max_len) {
  namespace cp = proncoach::cp;
  const auto& letters = proncoach::base_letters();
  const auto& marks = proncoach::diacritic_sets();
  GraphemeString gs;
  const std::size_t len = rng.below(max_len + 1);
  for (std::size_t i = 0; i < len; ++i) {
    // no leading, trailing or doubled spaces, as after normalization
    if (i > 0 && i + 1 < len && !gs.back().is_space() && rng.below(6) == 0) {
      gs.push_back(Grapheme{cp::kSpace, {}});
      continue;
    }
    gs.push_back(Grapheme{letters[rng.below(letters.size())], marks[rng.below(marks.size())]});
  }
  return gs;
}

/// Eight graphemes over four bases so that diacritic substitutions occur.
inline const std::vector<Grapheme>& small_alphabet() {
  namespace cp = proncoach::cp;
  static const std::vector<Grapheme> a = {
      {0x0628, {cp::kFatha}}, {0x0628, {cp::kKasra}}, {0x0628, {}},
      {0x062A, {cp::kFatha}}, {0x062A, {cp::kDamma}}, {0x0633, {}},
      {0x0633, {cp::kShadda, cp::kFatha}}, {0x0644, {cp::kSukun}}};
  return a;
}

inline GraphemeString random_sequence(proncoach::Rng& rng, std::size_t max_len) {
  GraphemeString s;
  for (std::size_t n = rng.below(max_len + 1); n > 0; --n)
    s.push_back(small_alphabet()[rng.below(small_alphabet().size())]);
  return s;
}

}  // namespace gen
