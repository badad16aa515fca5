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

// Assembles the learner-facing feedback payload for one attempt.

#ifndef PRONCOACH_FEEDBACK_HPP_
#define PRONCOACH_FEEDBACK_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "proncoach/alignment.hpp"
#include "proncoach/arabic_text.hpp"
#include "proncoach/content_store.hpp"
#include "proncoach/errors.hpp"
#include "proncoach/recognizer.hpp"

namespace proncoach {

inline constexpr double kClientSlowRate = 0.6;

struct CharacterFeedback {
  CharacterScore score;
  std::string text;  // reference grapheme as UTF-8
  std::size_t word_index = 0;
};

struct WordFeedback {
  WordSpan span;
  UtteranceScore score;
};

/// Hypothesis grapheme shown between reference characters. `after_ref_index`
/// is the reference letter it follows, -1 when it precedes them all.
struct InsertionFeedback {
  std::int64_t after_ref_index = -1;
  std::string text;
};

/// Utterance score combined with acoustic similarity, if any.
struct OverallScore {
  double value = 1.0;
  int stars = 5;
  std::optional<double> acoustic_similarity;
};

struct AudioRefs {
  std::string normal_ref;
  std::optional<std::string> slow_ref;
  std::optional<double> client_rate;  // set iff slow_ref is absent
};

struct AssistantPanel {
  std::string example_sentence_ar;
  std::size_t highlight_begin = 0;  // byte offsets into example_sentence_ar
  std::size_t highlight_end = 0;
  std::string example_sentence_en;
  std::string example_audio_ref;
  std::string graphophonic_note;
};

struct AttemptFeedback {
  std::string item_id;
  UtteranceScore utterance;
  OverallScore overall;
  std::vector<WordFeedback> words;
  std::vector<CharacterFeedback> characters;
  std::string hypothesis_text;
  std::string hypothesis_transliteration;
  std::vector<InsertionFeedback> insertions;
  std::vector<std::size_t> omitted;
  std::vector<std::size_t> mispronounced;
  AudioRefs audio;
  AssistantPanel assistant;
};

/// Builds the payload and checks that the inputs describe the same attempt.
/// Throws Inconsistent otherwise.
inline AttemptFeedback build_feedback(const PracticeItem& item, const Hypothesis& hyp,
                                      const std::vector<AlignmentOp>& ops,
                                      const std::vector<CharacterScore>& chars,
                                      const UtteranceScore& utt,
                                      std::optional<double> acoustic = std::nullopt,
                                      const FusionWeights& weights = {}) {
  const GraphemeString ref = segment_graphemes(item.vowelized_text);
  const auto ref_words = split_words(ref);
  const GraphemeString hyp_letters = letters(hyp.graphemes);
  std::size_t ref_letters = 0;
  for (const auto& w : ref_words) ref_letters += w.size();

  if (chars.size() != ref_letters)
    throw Inconsistent("character scores do not match the item's letters");
  for (std::size_t i = 0; i < chars.size(); ++i)
    if (chars[i].ref_index != i) throw Inconsistent("character scores out of order");
  if (count_insertions(ops) != utt.insertion_count)
    throw Inconsistent("insertion count disagrees with the alignment");
  if (hyp.confidences && hyp.confidences->size() != hyp.graphemes.size())
    throw Inconsistent("confidences do not match hypothesis length");
  if (std::abs(utterance_score(chars, utt.insertion_count).value - utt.value) > 1e-12)
    throw Inconsistent("utterance value disagrees with character scores");
  try {
    if (score_characters(ops, ref_letters) != chars)
      throw Inconsistent("character scores disagree with the alignment");
  } catch (const InconsistentAlignment& e) {
    throw Inconsistent(e.what());
  }

  AttemptFeedback fb;
  fb.item_id = item.id;
  fb.utterance = utt;

  // Words are paired by position, so an insertion belongs to the reference
  // word paired with the hypothesis word it came from.
  std::vector<std::size_t> ins_per_word(ref_words.size(), 0);
  {
    std::vector<std::size_t> hyp_word_of_letter;
    const auto hyp_words = split_words(hyp.graphemes);
    for (std::size_t w = 0; w < hyp_words.size(); ++w)
      hyp_word_of_letter.insert(hyp_word_of_letter.end(), hyp_words[w].size(), w);
    for (const auto& op : ops) {
      if (op.kind != OpKind::kIns || !op.hyp_index) continue;
      if (*op.hyp_index >= hyp_word_of_letter.size() || ref_words.empty())
        throw Inconsistent("insertion outside the hypothesis");
      ++ins_per_word[std::min(hyp_word_of_letter[*op.hyp_index], ref_words.size() - 1)];
    }
  }

  std::size_t offset = 0;
  for (std::size_t w = 0; w < ref_words.size(); ++w) {
    const WordSpan span{offset, offset + ref_words[w].size()};
    const std::size_t word_ins = ins_per_word[w];
    const std::vector<CharacterScore> part(chars.begin() + static_cast<std::ptrdiff_t>(span.begin),
                                           chars.begin() + static_cast<std::ptrdiff_t>(span.end));
    fb.words.push_back({span, utterance_score(part, word_ins)});
    for (std::size_t i = 0; i < ref_words[w].size(); ++i)
      fb.characters.push_back({chars[span.begin + i], to_utf8(GraphemeString{ref_words[w][i]}), w});
    offset = span.end;
  }

  for (const auto& c : chars) {
    if (c.label == CharLabel::kDeleted) fb.omitted.push_back(c.ref_index);
    if (c.label == CharLabel::kDiacriticError || c.label == CharLabel::kSubstituted)
      fb.mispronounced.push_back(c.ref_index);
  }
  std::int64_t last_ref = -1;
  for (const auto& op : ops) {
    if (op.ref_index) last_ref = static_cast<std::int64_t>(*op.ref_index);
    if (op.kind != OpKind::kIns) continue;
    if (!op.hyp_index || *op.hyp_index >= hyp_letters.size())
      throw Inconsistent("insertion outside the hypothesis");
    fb.insertions.push_back({last_ref, to_utf8(GraphemeString{hyp_letters[*op.hyp_index]})});
  }

  fb.hypothesis_text = to_utf8(hyp.graphemes);
  fb.hypothesis_transliteration = transliterate(hyp.graphemes);

  const double fused = fuse_scores(utt.value, acoustic, weights);
  fb.overall = {fused, stars(fused), acoustic};

  fb.audio.normal_ref = item.audio_normal_ref;
  fb.audio.slow_ref = item.audio_slow_ref;
  if (!item.audio_slow_ref) fb.audio.client_rate = kClientSlowRate;

  const std::size_t at = item.example_sentence_ar.find(item.surface_text);
  if (at == std::string::npos)
    throw Inconsistent("example sentence does not contain the practiced text");
  fb.assistant = {item.example_sentence_ar, at,
                  at + item.surface_text.size(), item.example_sentence_en,
                  item.example_audio_ref, item.graphophonic_note};
  return fb;
}

/// Align, score and assemble in one step.
inline AttemptFeedback score_attempt(const PracticeItem& item, const Hypothesis& hyp,
                                     std::optional<double> acoustic = std::nullopt,
                                     const FusionWeights& weights = {}) {
  const GraphemeString ref = segment_graphemes(item.vowelized_text);
  const WordAlignment wa = align_words(ref, hyp.graphemes);
  const auto chars = score_characters(wa.ops, wa.ref_letters);
  const auto utt = utterance_score(chars, count_insertions(wa.ops));
  return build_feedback(item, hyp, wa.ops, chars, utt, acoustic, weights);
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::ordered_json to_json(const UtteranceScore& u) {
  nlohmann::ordered_json j;
  j["value"] = u.value;
  j["stars"] = u.stars;
  j["insertion_count"] = u.insertion_count;
  return j;
}

inline nlohmann::ordered_json to_json(const AttemptFeedback& fb) {
  using oj = nlohmann::ordered_json;
  oj j;
  j["item_id"] = fb.item_id;
  j["utterance"] = to_json(fb.utterance);
  j["overall"] = {{"value", fb.overall.value},
                  {"stars", fb.overall.stars},
                  {"acoustic_similarity", fb.overall.acoustic_similarity
                                              ? oj(*fb.overall.acoustic_similarity)
                                              : oj(nullptr)}};
  oj words = oj::array();
  for (std::size_t w = 0; w < fb.words.size(); ++w) {
    oj x = to_json(fb.words[w].score);
    x["word_index"] = w;
    x["ref_begin"] = fb.words[w].span.begin;
    x["ref_end"] = fb.words[w].span.end;
    words.push_back(std::move(x));
  }
  j["words"] = std::move(words);
  oj chars = oj::array();
  for (const auto& c : fb.characters) {
    oj x;
    x["ref_index"] = c.score.ref_index;
    x["text"] = c.text;
    x["word_index"] = c.word_index;
    x["label"] = to_string(c.score.label);
    x["score"] = c.score.score;
    x["band"] = to_string(c.score.band);
    chars.push_back(std::move(x));
  }
  j["characters"] = std::move(chars);
  j["hypothesis_text"] = fb.hypothesis_text;
  j["hypothesis_transliteration"] = fb.hypothesis_transliteration;
  oj ins = oj::array();
  for (const auto& i : fb.insertions)
    ins.push_back({{"after_ref_index", i.after_ref_index}, {"text", i.text}});
  j["insertions"] = std::move(ins);
  j["omitted"] = fb.omitted;
  j["mispronounced"] = fb.mispronounced;
  j["audio"] = {{"normal_ref", fb.audio.normal_ref},
                {"slow_ref", fb.audio.slow_ref ? oj(*fb.audio.slow_ref) : oj(nullptr)},
                {"client_rate", fb.audio.client_rate ? oj(*fb.audio.client_rate) : oj(nullptr)}};
  j["assistant"] = {{"example_sentence_ar", fb.assistant.example_sentence_ar},
                    {"highlight_span", {fb.assistant.highlight_begin, fb.assistant.highlight_end}},
                    {"example_sentence_en", fb.assistant.example_sentence_en},
                    {"example_audio_ref", fb.assistant.example_audio_ref},
                    {"graphophonic_note", fb.assistant.graphophonic_note}};
  return j;
}

}  // namespace proncoach

#endif  // PRONCOACH_FEEDBACK_HPP_
