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

// Weighted edit alignment between a reference and a hypothesis grapheme
// sequence, and the character/utterance scores derived from it.

#ifndef PRONCOACH_ALIGNMENT_HPP_
#define PRONCOACH_ALIGNMENT_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "proncoach/arabic_text.hpp"
#include "proncoach/errors.hpp"

namespace proncoach {

enum class OpKind { kMatch, kSubDiacritic, kSubFull, kDel, kIns };

struct AlignmentOp {
  OpKind kind = OpKind::kMatch;
  std::optional<std::size_t> ref_index;  // absent for kIns
  std::optional<std::size_t> hyp_index;  // absent for kDel

  friend bool operator==(const AlignmentOp&, const AlignmentOp&) = default;
};

inline std::string_view to_string(OpKind k) {
  switch (k) {
    case OpKind::kMatch: return "match";
    case OpKind::kSubDiacritic: return "sub_diacritic";
    case OpKind::kSubFull: return "sub_full";
    case OpKind::kDel: return "del";
    case OpKind::kIns: return "ins";
  }
  return "?";
}

// Costs are kept in half units so that the dynamic program works on exact
// integers: match 0, diacritic substitution 0.5, everything else 1.
namespace cost_units {
inline constexpr std::int64_t kMatch = 0;
inline constexpr std::int64_t kSubDiacritic = 1;
inline constexpr std::int64_t kSubFull = 2;
inline constexpr std::int64_t kDel = 2;
inline constexpr std::int64_t kIns = 2;
inline constexpr double kScale = 0.5;
}  // namespace cost_units

inline std::int64_t op_cost_units(OpKind k) {
  switch (k) {
    case OpKind::kMatch: return cost_units::kMatch;
    case OpKind::kSubDiacritic: return cost_units::kSubDiacritic;
    case OpKind::kSubFull: return cost_units::kSubFull;
    case OpKind::kDel: return cost_units::kDel;
    case OpKind::kIns: return cost_units::kIns;
  }
  return 0;
}

inline double op_cost(OpKind k) { return op_cost_units(k) * cost_units::kScale; }

/// Kind of the diagonal step pairing `r` with `h`.
inline OpKind pair_kind(const Grapheme& r, const Grapheme& h) {
  if (r.base != h.base) return OpKind::kSubFull;
  return r.diacritics == h.diacritics ? OpKind::kMatch : OpKind::kSubDiacritic;
}

inline double alignment_cost(const std::vector<AlignmentOp>& ops) {
  std::int64_t units = 0;
  for (const auto& op : ops) units += op_cost_units(op.kind);
  return units * cost_units::kScale;
}

/// Minimum-cost alignment of two space-free grapheme sequences.
///
/// The backtrace starts at the sequence ends and, among predecessors that
/// reach the optimal cost, takes the first of: diagonal (match, diacritic
/// substitution or full substitution, whichever the pair is), deletion,
/// insertion. The result is therefore deterministic.
inline std::vector<AlignmentOp> align(const GraphemeString& ref,
                                      const GraphemeString& hyp) {
  const std::size_t n = ref.size();
  const std::size_t m = hyp.size();
  const std::size_t w = m + 1;
  std::vector<std::int64_t> d((n + 1) * w);
  auto at = [&](std::size_t i, std::size_t j) -> std::int64_t& {
    return d[i * w + j];
  };

  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = static_cast<std::int64_t>(i) * cost_units::kDel;
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = static_cast<std::int64_t>(j) * cost_units::kIns;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::int64_t diag = at(i - 1, j - 1) + op_cost_units(pair_kind(ref[i - 1], hyp[j - 1]));
      const std::int64_t del = at(i - 1, j) + cost_units::kDel;
      const std::int64_t ins = at(i, j - 1) + cost_units::kIns;
      at(i, j) = std::min({diag, del, ins});
    }
  }

  std::vector<AlignmentOp> ops;
  ops.reserve(n + m);
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const OpKind k = pair_kind(ref[i - 1], hyp[j - 1]);
      if (at(i - 1, j - 1) + op_cost_units(k) == at(i, j)) {
        ops.push_back({k, i - 1, j - 1});
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && at(i - 1, j) + cost_units::kDel == at(i, j)) {
      ops.push_back({OpKind::kDel, i - 1, std::nullopt});
      --i;
      continue;
    }
    ops.push_back({OpKind::kIns, std::nullopt, j - 1});
    --j;
  }
  return {ops.rbegin(), ops.rend()};
}

/// Letter-index range [begin, end) of one reference word.
struct WordSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  friend bool operator==(const WordSpan&, const WordSpan&) = default;
};

/// Result of aligning multi-word text. Indices in `ops` count letters only
/// (spaces removed) on both sides.
struct WordAlignment {
  std::vector<AlignmentOp> ops;
  std::vector<WordSpan> ref_words;
  std::size_t ref_letters = 0;
  std::size_t hyp_letters = 0;
};

inline GraphemeString letters(const GraphemeString& gs) {
  GraphemeString out;
  for (const auto& g : gs)
    if (!g.is_space()) out.push_back(g);
  return out;
}

/// Splits both sides on spaces and aligns words pairwise by position.
/// Unpaired reference words become deletion runs and unpaired hypothesis
/// words insertion runs.
inline WordAlignment align_words(const GraphemeString& ref,
                                 const GraphemeString& hyp) {
  const auto ref_words = split_words(ref);
  const auto hyp_words = split_words(hyp);
  WordAlignment out;
  std::size_t ref_off = 0, hyp_off = 0;
  const std::size_t pairs = std::max(ref_words.size(), hyp_words.size());
  for (std::size_t k = 0; k < pairs; ++k) {
    static const GraphemeString kEmpty;
    const GraphemeString& r = k < ref_words.size() ? ref_words[k] : kEmpty;
    const GraphemeString& h = k < hyp_words.size() ? hyp_words[k] : kEmpty;
    for (auto op : align(r, h)) {
      if (op.ref_index) *op.ref_index += ref_off;
      if (op.hyp_index) *op.hyp_index += hyp_off;
      out.ops.push_back(op);
    }
    if (k < ref_words.size()) out.ref_words.push_back({ref_off, ref_off + r.size()});
    ref_off += r.size();
    hyp_off += h.size();
  }
  out.ref_letters = ref_off;
  out.hyp_letters = hyp_off;
  return out;
}

/// Number of distinct minimum-cost alignments, saturating at `cap`. More
/// than one means the error positions are not uniquely determined.
inline std::uint64_t count_optimal_alignments(const GraphemeString& ref,
                                              const GraphemeString& hyp,
                                              std::uint64_t cap = 1u << 20) {
  const std::size_t n = ref.size(), m = hyp.size(), w = m + 1;
  std::vector<std::int64_t> d((n + 1) * w);
  std::vector<std::uint64_t> cnt((n + 1) * w, 0);
  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = 0; j <= m; ++j) {
      if (i == 0 && j == 0) {
        cnt[0] = 1;
        continue;
      }
      std::int64_t best = INT64_MAX;
      std::uint64_t ways = 0;
      auto offer = [&](std::int64_t c, std::uint64_t k) {
        if (c < best) {
          best = c;
          ways = k;
        } else if (c == best) {
          ways = std::min(cap, ways + k);
        }
      };
      if (i > 0 && j > 0)
        offer(d[(i - 1) * w + j - 1] + op_cost_units(pair_kind(ref[i - 1], hyp[j - 1])),
              cnt[(i - 1) * w + j - 1]);
      if (i > 0) offer(d[(i - 1) * w + j] + cost_units::kDel, cnt[(i - 1) * w + j]);
      if (j > 0) offer(d[i * w + j - 1] + cost_units::kIns, cnt[i * w + j - 1]);
      d[i * w + j] = best;
      cnt[i * w + j] = ways;
    }
  }
  return cnt[n * w + m];
}

/// Word-wise counterpart of count_optimal_alignments, pairing words as
/// align_words does.
inline std::uint64_t count_optimal_word_alignments(const GraphemeString& ref,
                                                   const GraphemeString& hyp,
                                                   std::uint64_t cap = 1u << 20) {
  const auto rw = split_words(ref);
  const auto hw = split_words(hyp);
  std::uint64_t total = 1;
  static const GraphemeString kEmpty;
  for (std::size_t k = 0; k < std::max(rw.size(), hw.size()); ++k) {
    const std::uint64_t c = count_optimal_alignments(k < rw.size() ? rw[k] : kEmpty,
                                                     k < hw.size() ? hw[k] : kEmpty, cap);
    total = (c != 0 && total > cap / c) ? cap : std::min(cap, total * c);
  }
  return total;
}

inline std::size_t count_insertions(const std::vector<AlignmentOp>& ops) {
  std::size_t n = 0;
  for (const auto& op : ops) n += op.kind == OpKind::kIns;
  return n;
}

// ---------------------------------------------------------------------------
// Scores

enum class CharLabel { kCorrect, kDiacriticError, kSubstituted, kDeleted };
enum class Band { kRed, kOrange, kYellow, kLightGreen, kGreen };

inline std::string_view to_string(CharLabel l) {
  switch (l) {
    case CharLabel::kCorrect: return "correct";
    case CharLabel::kDiacriticError: return "diacritic_error";
    case CharLabel::kSubstituted: return "substituted";
    case CharLabel::kDeleted: return "deleted";
  }
  return "?";
}

inline std::string_view to_string(Band b) {
  switch (b) {
    case Band::kRed: return "red";
    case Band::kOrange: return "orange";
    case Band::kYellow: return "yellow";
    case Band::kLightGreen: return "light_green";
    case Band::kGreen: return "green";
  }
  return "?";
}

inline void require_unit_interval(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0))
    throw OutOfRange(std::string(what) + " outside [0,1]: " + std::to_string(v));
}

/// Five 0.2-wide bands, each closed on the left; 1.0 is green.
inline Band color_band(double score) {
  require_unit_interval(score, "score");
  if (score < 0.2) return Band::kRed;
  if (score < 0.4) return Band::kOrange;
  if (score < 0.6) return Band::kYellow;
  if (score < 0.8) return Band::kLightGreen;
  return Band::kGreen;
}

/// Round half up of 5 * value.
inline int stars(double value) {
  require_unit_interval(value, "value");
  const int s = static_cast<int>(std::floor(5.0 * value + 0.5));
  return std::clamp(s, 0, 5);
}

inline double label_score(CharLabel l) {
  switch (l) {
    case CharLabel::kCorrect: return 1.0;
    case CharLabel::kDiacriticError: return 0.5;
    case CharLabel::kSubstituted:
    case CharLabel::kDeleted: return 0.0;
  }
  return 0.0;
}

struct CharacterScore {
  std::size_t ref_index = 0;
  CharLabel label = CharLabel::kCorrect;
  double score = 1.0;
  Band band = Band::kGreen;
  friend bool operator==(const CharacterScore&, const CharacterScore&) = default;
};

inline CharacterScore make_character_score(std::size_t ref_index, CharLabel l) {
  const double s = label_score(l);
  return {ref_index, l, s, color_band(s)};
}

/// One score per reference index. Throws InconsistentAlignment unless the
/// ops cover 0..ref_len-1 exactly once.
inline std::vector<CharacterScore> score_characters(
    const std::vector<AlignmentOp>& ops, std::size_t ref_len) {
  std::vector<std::optional<CharacterScore>> slots(ref_len);
  for (const auto& op : ops) {
    if (op.kind == OpKind::kIns) continue;
    if (!op.ref_index || *op.ref_index >= ref_len)
      throw InconsistentAlignment("op without a valid reference index");
    auto& slot = slots[*op.ref_index];
    if (slot)
      throw InconsistentAlignment("reference index " + std::to_string(*op.ref_index) +
                                  " aligned twice");
    CharLabel l = CharLabel::kCorrect;
    switch (op.kind) {
      case OpKind::kMatch: l = CharLabel::kCorrect; break;
      case OpKind::kSubDiacritic: l = CharLabel::kDiacriticError; break;
      case OpKind::kSubFull: l = CharLabel::kSubstituted; break;
      case OpKind::kDel: l = CharLabel::kDeleted; break;
      case OpKind::kIns: break;
    }
    slot = make_character_score(*op.ref_index, l);
  }
  std::vector<CharacterScore> out;
  out.reserve(ref_len);
  for (std::size_t i = 0; i < ref_len; ++i) {
    if (!slots[i])
      throw InconsistentAlignment("reference index " + std::to_string(i) + " not aligned");
    out.push_back(*slots[i]);
  }
  return out;
}

struct UtteranceScore {
  double value = 1.0;
  int stars = 5;
  std::size_t insertion_count = 0;
  friend bool operator==(const UtteranceScore&, const UtteranceScore&) = default;
};

/// value = sum of character scores / (characters + insertions). An empty
/// reference with no insertions is vacuously perfect.
inline UtteranceScore utterance_score(const std::vector<CharacterScore>& chars,
                                      std::size_t insertion_count) {
  const std::size_t denom = chars.size() + insertion_count;
  double sum = 0.0;
  for (const auto& c : chars) sum += c.score;
  const double value = denom == 0 ? 1.0 : sum / static_cast<double>(denom);
  return {value, stars(value), insertion_count};
}

}  // namespace proncoach

#endif  // PRONCOACH_ALIGNMENT_HPP_
