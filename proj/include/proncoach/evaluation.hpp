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

// Batch tooling: synthetic corpus generation, the error-injection detection
// benchmark and offline scoring. The CLI in tools/ is a thin wrapper over
// the cmd_* functions here.

#ifndef PRONCOACH_EVALUATION_HPP_
#define PRONCOACH_EVALUATION_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "proncoach/alignment.hpp"
#include "proncoach/arabic_text.hpp"
#include "proncoach/content_store.hpp"
#include "proncoach/feedback.hpp"
#include "proncoach/random.hpp"
#include "proncoach/recognizer.hpp"
#include "proncoach/wav.hpp"

namespace proncoach {

// ---------------------------------------------------------------------------
// Corpus generation

inline constexpr int kTonePool = 24;
inline constexpr int kImagePool = 8;

inline std::string tone_ref(int k, bool slow = false) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "audio/tone_%02d%s.wav", k, slow ? "_slow" : "");
  return buf;
}

inline std::string image_ref(int k) { return "img/card_" + std::to_string(k) + ".svg"; }

/// Short enveloped sine; `slow` doubles the duration.
inline std::vector<double> make_tone(double hz, double seconds) {
  const auto n = static_cast<std::size_t>(seconds * kSampleRate);
  std::vector<double> s(n);
  const std::size_t ramp = std::min<std::size_t>(n / 4, 800);
  for (std::size_t i = 0; i < n; ++i) {
    double env = 1.0;
    if (i < ramp) env = static_cast<double>(i) / ramp;
    if (n - i <= ramp) env = std::min(env, static_cast<double>(n - i - 1) / ramp);
    s[i] = 0.4 * env * std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) / kSampleRate);
  }
  return s;
}

/// Writes the shared tone and image pool under `asset_root`.
inline void write_asset_pool(const fs::path& asset_root) {
  fs::create_directories(asset_root / "audio");
  fs::create_directories(asset_root / "img");
  for (int k = 0; k < kTonePool; ++k) {
    const double hz = 220.0 * std::pow(2.0, k / 12.0);
    for (bool slow : {false, true}) {
      const auto tone = make_tone(hz, slow ? 0.8 : 0.4);
      std::ofstream(asset_root / tone_ref(k, slow), std::ios::binary) << encode_wav(tone);
    }
  }
  static const std::array<const char*, kImagePool> colours = {
      "#c0392b", "#d35400", "#f39c12", "#27ae60", "#16a085", "#2980b9", "#8e44ad", "#2c3e50"};
  for (int k = 0; k < kImagePool; ++k) {
    std::ofstream(asset_root / image_ref(k))
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"64\" height=\"64\">"
        << "<rect width=\"64\" height=\"64\" rx=\"8\" fill=\"" << colours[k] << "\"/></svg>\n";
  }
}

/// Random vowelization for one letter, weighted towards single short vowels.
inline std::u32string random_vowelization(Rng& rng) {
  const double u = rng.uniform();
  if (u < 0.60) {
    static const std::array<char32_t, 3> v = {cp::kFatha, cp::kDamma, cp::kKasra};
    return std::u32string(1, v[rng.below(v.size())]);
  }
  if (u < 0.72) return std::u32string(1, cp::kSukun);
  if (u < 0.82) return {};
  if (u < 0.92) {
    static const std::array<char32_t, 3> v = {cp::kFatha, cp::kDamma, cp::kKasra};
    return std::u32string{cp::kShadda, v[rng.below(v.size())]};
  }
  static const std::array<char32_t, 3> t = {cp::kFathatan, cp::kDammatan, cp::kKasratan};
  return std::u32string(1, t[rng.below(t.size())]);
}

/// One synthetic item: one or two words of 2-5 letters, no base letter
/// repeated within the item.
inline PracticeItem synthetic_item(std::size_t ordinal, std::size_t id_width, Rng& rng) {
  std::vector<char32_t> pool = base_letters();
  const std::size_t words = rng.uniform() < 0.25 ? 2 : 1;
  GraphemeString gs;
  for (std::size_t w = 0; w < words; ++w) {
    if (w > 0) gs.push_back(Grapheme{cp::kSpace, {}});
    const std::size_t len = 2 + rng.below(4);
    for (std::size_t i = 0; i < len; ++i) {
      const std::size_t pick = rng.below(pool.size());
      gs.push_back(Grapheme{pool[pick], random_vowelization(rng)});
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
    }
  }

  std::ostringstream id;
  id << 's' << std::setw(static_cast<int>(id_width)) << std::setfill('0') << ordinal;

  PracticeItem it;
  it.id = id.str();
  it.vowelized_text = normalize(to_utf8(gs));
  it.surface_text = to_utf8(strip_diacritics(gs));
  it.transliteration = transliterate(gs);
  it.translation_en = "synthetic item " + std::to_string(ordinal);
  const int tone = static_cast<int>(rng.below(kTonePool));
  it.image_ref = image_ref(static_cast<int>(rng.below(kImagePool)));
  it.audio_normal_ref = tone_ref(tone);
  if (ordinal % 2 == 0) it.audio_slow_ref = tone_ref(tone, true);
  it.example_sentence_ar = normalize("قل " + it.surface_text + " مرة أخرى");
  it.example_sentence_en = "Say it once more (synthetic item " + std::to_string(ordinal) + ").";
  it.example_audio_ref = tone_ref(static_cast<int>(rng.below(kTonePool)));

  std::string note = "Letter by letter:";
  for (const auto& g : gs) {
    if (g.is_space()) {
      note += " |";
      continue;
    }
    note += " " + transliterate(GraphemeString{g});
  }
  it.graphophonic_note = note;
  return it;
}

struct GenerateOptions {
  std::size_t n = 400;
  std::uint64_t seed = 7;
  fs::path corpus_out;
  fs::path asset_root;
  std::vector<PracticeItem> base_items;  // written first, unchanged
};

/// Writes base items plus `n` synthetic ones and the asset pool.
inline std::vector<PracticeItem> generate_corpus(const GenerateOptions& opt) {
  if (opt.n == 0) throw std::invalid_argument("n must be at least 1");
  write_asset_pool(opt.asset_root);
  std::vector<PracticeItem> items = opt.base_items;
  Rng rng(opt.seed);
  const std::size_t width = std::max<std::size_t>(4, std::to_string(opt.n).size());
  for (std::size_t k = 1; k <= opt.n; ++k) items.push_back(synthetic_item(k, width, rng));

  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& it : items) arr.push_back(to_json(it));
  if (opt.corpus_out.has_parent_path()) fs::create_directories(opt.corpus_out.parent_path());
  std::ofstream(opt.corpus_out, std::ios::binary) << arr.dump(2) << '\n';
  return items;
}

/// Items of a corpus file without asset checks, in file order.
inline std::vector<PracticeItem> read_items(const fs::path& path) {
  auto r = validate_corpus_text(read_file(path), {}, /*check_assets=*/false);
  if (!r.issues.empty())
    throw ParseError(path.string() + ": " + r.issues.front().item_id + " " + r.issues.front().message);
  const auto doc = nlohmann::json::parse(read_file(path));
  std::vector<PracticeItem> out;
  for (const auto& obj : doc) out.push_back(r.items.at(obj.at("id").get<std::string>()));
  return out;
}

// ---------------------------------------------------------------------------
// Detection benchmark

struct InjectionSpec {
  ErrorRates rates;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  /// When set, exactly one error of this kind per attempt, on items whose
  /// base letters are all distinct; `rates` is ignored.
  std::optional<OpKind> single;
};

inline constexpr std::size_t kNoAnchor = std::numeric_limits<std::size_t>::max();

/// Error events read back off an alignment, in the same coordinates as
/// InjectedError.
inline std::vector<InjectedError> predicted_errors(const std::vector<AlignmentOp>& ops) {
  std::vector<InjectedError> out;
  std::size_t last_ref = kNoAnchor;
  for (const auto& op : ops) {
    if (op.ref_index) last_ref = *op.ref_index;
    switch (op.kind) {
      case OpKind::kMatch: break;
      case OpKind::kIns: out.push_back({op.kind, last_ref}); break;
      default: out.push_back({op.kind, *op.ref_index}); break;
    }
  }
  return out;
}

inline bool has_distinct_bases(const GraphemeString& gs) {
  std::u32string b = bases(letters(gs));
  std::sort(b.begin(), b.end());
  return std::adjacent_find(b.begin(), b.end()) == b.end();
}

/// Exactly one error of `kind` at a random letter. Full substitutions draw
/// a base that does not occur in `ref`.
inline Injection inject_single(const GraphemeString& ref, OpKind kind, Rng& rng) {
  std::vector<std::size_t> pos;  // grapheme index of each letter
  for (std::size_t i = 0; i < ref.size(); ++i)
    if (!ref[i].is_space()) pos.push_back(i);
  Injection out;
  if (pos.empty()) return out;
  const std::size_t letter = rng.below(pos.size());
  const std::size_t at = pos[letter];
  GraphemeString hyp = ref;
  switch (kind) {
    case OpKind::kSubFull: {
      std::vector<char32_t> unused;
      const std::u32string used = bases(ref);
      for (char32_t c : base_letters())
        if (used.find(c) == std::u32string::npos) unused.push_back(c);
      hyp[at].base = unused[rng.below(unused.size())];
      break;
    }
    case OpKind::kSubDiacritic:
      hyp[at].diacritics = other_diacritics(hyp[at].diacritics, rng);
      break;
    case OpKind::kDel:
      hyp.erase(hyp.begin() + static_cast<std::ptrdiff_t>(at));
      break;
    case OpKind::kIns:
      hyp.insert(hyp.begin() + static_cast<std::ptrdiff_t>(at) + 1, random_grapheme(rng));
      break;
    case OpKind::kMatch:
      return {Hypothesis{ref, std::nullopt}, {}};
  }
  out.hypothesis.graphemes = std::move(hyp);
  out.truth.push_back({kind, letter});
  return out;
}

struct DetectionCounts {
  std::size_t tp = 0, fp = 0, fn = 0;
  std::size_t injected() const { return tp + fn; }
  std::size_t predicted() const { return tp + fp; }
};

/// Zero denominators report 1.0 with an explicit flag.
inline nlohmann::json metrics_json(const DetectionCounts& c) {
  const double precision = c.predicted() == 0 ? 1.0 : static_cast<double>(c.tp) / c.predicted();
  const double recall = c.injected() == 0 ? 1.0 : static_cast<double>(c.tp) / c.injected();
  const double f1 = precision + recall == 0 ? 0.0 : 2 * precision * recall / (precision + recall);
  nlohmann::json j;
  j["tp"] = c.tp;
  j["fp"] = c.fp;
  j["fn"] = c.fn;
  j["injected"] = c.injected();
  j["predicted"] = c.predicted();
  j["injected_zero"] = c.injected() == 0;
  j["predicted_zero"] = c.predicted() == 0;
  j["precision"] = precision;
  j["recall"] = recall;
  j["f1"] = f1;
  return j;
}

inline const std::array<OpKind, 4>& error_kinds() {
  static const std::array<OpKind, 4> k = {OpKind::kSubFull, OpKind::kSubDiacritic, OpKind::kDel,
                                          OpKind::kIns};
  return k;
}

inline std::optional<OpKind> parse_error_kind(const std::string& s) {
  for (OpKind k : error_kinds())
    if (to_string(k) == s) return k;
  return std::nullopt;
}

inline nlohmann::json injected_json(const std::vector<InjectedError>& errs) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& e : errs) {
    nlohmann::json x;
    x["kind"] = to_string(e.kind);
    x["ref_index"] = e.ref_index == kNoAnchor ? nlohmann::json(-1) : nlohmann::json(e.ref_index);
    a.push_back(std::move(x));
  }
  return a;
}

/// Runs every item x trial through injection, alignment and scoring, and
/// compares predicted error events to the injected ground truth. Keys are
/// sorted on emission, so equal seeds give byte-identical dumps.
inline nlohmann::json evaluate(const Corpus& corpus, const InjectionSpec& spec) {
  if (!spec.single) validate_rates(spec.rates);
  constexpr std::size_t kMaxListed = 1000;

  std::map<std::string, DetectionCounts> exact, exact_unamb, type_only;
  std::map<std::string, std::map<std::string, std::size_t>> confusion;
  std::array<std::size_t, 6> stars_hist{};
  double value_sum = 0.0;
  std::size_t attempts = 0, items_used = 0, ambiguous = 0;
  nlohmann::json ambiguous_cases = nlohmann::json::array();
  struct Worst {
    double value;
    std::string item_id;
    std::size_t trial;
    std::size_t errors;
  };
  std::vector<Worst> worst;

  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const PracticeItem& item = corpus.at_rank(k);
    const GraphemeString ref = segment_graphemes(item.vowelized_text);
    if (spec.single && !has_distinct_bases(ref)) continue;
    ++items_used;
    for (std::size_t t = 0; t < spec.trials; ++t) {
      Rng rng(mix_seed(mix_seed(spec.seed, k), t));
      const Injection inj = spec.single ? inject_single(ref, *spec.single, rng)
                                        : inject_errors(ref, spec.rates, rng);
      const WordAlignment wa = align_words(ref, inj.hypothesis.graphemes);
      const auto chars = score_characters(wa.ops, wa.ref_letters);
      const auto utt = utterance_score(chars, count_insertions(wa.ops));
      const auto pred = predicted_errors(wa.ops);
      const bool unique = count_optimal_word_alignments(ref, inj.hypothesis.graphemes) == 1;
      ++attempts;
      ++stars_hist[static_cast<std::size_t>(utt.stars)];
      value_sum += utt.value;
      worst.push_back({utt.value, item.id, t, inj.truth.size()});

      if (!unique) {
        ++ambiguous;
        if (ambiguous_cases.size() < kMaxListed) {
          nlohmann::json c;
          c["item_id"] = item.id;
          c["trial"] = t;
          c["injected"] = injected_json(inj.truth);
          c["predicted"] = injected_json(pred);
          c["optimal_alignments"] = count_optimal_word_alignments(ref, inj.hypothesis.graphemes);
          ambiguous_cases.push_back(std::move(c));
        }
      }

      for (OpKind kind : error_kinds()) {
        const std::string name(to_string(kind));
        std::vector<std::size_t> truth_pos, pred_pos;
        for (const auto& e : inj.truth)
          if (e.kind == kind) truth_pos.push_back(e.ref_index);
        for (const auto& e : pred)
          if (e.kind == kind) pred_pos.push_back(e.ref_index);
        std::sort(truth_pos.begin(), truth_pos.end());
        std::sort(pred_pos.begin(), pred_pos.end());
        std::vector<std::size_t> common;
        std::set_intersection(truth_pos.begin(), truth_pos.end(), pred_pos.begin(),
                              pred_pos.end(), std::back_inserter(common));
        const DetectionCounts c{common.size(), pred_pos.size() - common.size(),
                                truth_pos.size() - common.size()};
        auto add = [&](DetectionCounts& acc, const DetectionCounts& x) {
          acc.tp += x.tp;
          acc.fp += x.fp;
          acc.fn += x.fn;
        };
        add(exact[name], c);
        add(exact["all"], c);
        if (unique) {
          add(exact_unamb[name], c);
          add(exact_unamb["all"], c);
        }
        const std::size_t m = std::min(truth_pos.size(), pred_pos.size());
        const DetectionCounts typed{m, pred_pos.size() - m, truth_pos.size() - m};
        add(type_only[name], typed);
        add(type_only["all"], typed);
      }

      // every injected error that was not matched exactly, by what the
      // alignment put at the same anchor instead
      std::vector<InjectedError> unmatched_pred = pred;
      for (const auto& e : inj.truth) {
        auto hit = std::find(unmatched_pred.begin(), unmatched_pred.end(), e);
        if (hit != unmatched_pred.end()) {
          unmatched_pred.erase(hit);
          continue;
        }
        auto same_pos = std::find_if(unmatched_pred.begin(), unmatched_pred.end(),
                                     [&](const InjectedError& p) {
                                       return p.ref_index == e.ref_index;
                                     });
        std::string got = "missed";
        if (same_pos != unmatched_pred.end()) {
          got = std::string(to_string(same_pos->kind));
          unmatched_pred.erase(same_pos);
        }
        ++confusion[std::string(to_string(e.kind))][got];
      }
      for (const auto& p : unmatched_pred) ++confusion["spurious"][std::string(to_string(p.kind))];
    }
  }

  auto table = [](std::map<std::string, DetectionCounts>& m) {
    nlohmann::json j;
    for (OpKind kind : error_kinds()) j[std::string(to_string(kind))] = metrics_json(m[std::string(to_string(kind))]);
    j["all"] = metrics_json(m["all"]);
    return j;
  };

  std::stable_sort(worst.begin(), worst.end(), [](const Worst& a, const Worst& b) {
    if (a.value != b.value) return a.value < b.value;
    if (a.item_id != b.item_id) return a.item_id < b.item_id;
    return a.trial < b.trial;
  });
  nlohmann::json worst_json = nlohmann::json::array();
  for (std::size_t i = 0; i < std::min<std::size_t>(10, worst.size()); ++i) {
    nlohmann::json w;
    w["item_id"] = worst[i].item_id;
    w["trial"] = worst[i].trial;
    w["value"] = worst[i].value;
    w["injected_errors"] = worst[i].errors;
    worst_json.push_back(std::move(w));
  }

  nlohmann::json report;
  nlohmann::json cfg;
  cfg["mode"] = spec.single ? "single:" + std::string(to_string(*spec.single)) : "rates";
  cfg["rates"] = {{"p_sub_full", spec.rates.p_sub_full},
                  {"p_sub_diac", spec.rates.p_sub_diac},
                  {"p_del", spec.rates.p_del},
                  {"p_ins", spec.rates.p_ins}};
  cfg["trials"] = spec.trials;
  cfg["seed"] = spec.seed;
  cfg["items"] = items_used;
  cfg["attempts"] = attempts;
  report["config"] = std::move(cfg);
  report["exact"] = table(exact);
  report["exact_unambiguous"] = table(exact_unamb);
  report["type_only"] = table(type_only);
  report["ambiguous_attempts"] = ambiguous;
  report["ambiguous_cases"] = std::move(ambiguous_cases);
  report["ambiguous_cases_truncated"] = ambiguous > kMaxListed;
  report["confusion"] = confusion.empty() ? nlohmann::json::object() : nlohmann::json(confusion);
  report["stars_histogram"] = stars_hist;
  report["mean_utterance_value"] = attempts ? value_sum / attempts : 1.0;
  report["worst_cases"] = std::move(worst_json);
  return report;
}

inline void print_report_table(const nlohmann::json& r, std::ostream& os) {
  os << "mode " << r["config"]["mode"].get<std::string>() << ", " << r["config"]["attempts"]
     << " attempts over " << r["config"]["items"] << " items\n";
  os << std::left << std::setw(15) << "error" << std::right << std::setw(9) << "injected"
     << std::setw(10) << "predicted" << std::setw(11) << "precision" << std::setw(9) << "recall"
     << std::setw(8) << "f1" << std::setw(13) << "type_recall" << '\n';
  os << std::fixed << std::setprecision(4);
  for (const char* k : {"sub_full", "sub_diacritic", "del", "ins", "all"}) {
    const auto& e = r["exact"][k];
    os << std::left << std::setw(15) << k << std::right << std::setw(9)
       << e["injected"].get<std::size_t>() << std::setw(10) << e["predicted"].get<std::size_t>()
       << std::setw(11) << e["precision"].get<double>() << std::setw(9)
       << e["recall"].get<double>() << std::setw(8) << e["f1"].get<double>() << std::setw(13)
       << r["type_only"][k]["recall"].get<double>() << '\n';
  }
  os << "ambiguous attempts: " << r["ambiguous_attempts"].get<std::size_t>() << '\n';
  os << "mean utterance value: " << r["mean_utterance_value"].get<double>() << '\n';
  os.unsetf(std::ios::floatfield);
}

// ---------------------------------------------------------------------------
// Commands. Each returns the process exit code.

inline int cmd_validate(const fs::path& corpus, const fs::path& assets, std::ostream& out,
                        std::ostream& err) {
  const CorpusLoadResult r = validate_corpus_file(corpus, assets);
  for (const auto& issue : r.issues) {
    err << issue.kind;
    if (!issue.item_id.empty()) err << ' ' << issue.item_id;
    err << ": " << issue.message << '\n';
  }
  if (!r.issues.empty()) {
    err << r.issues.size() << " problem(s) in " << corpus.string() << '\n';
    return 1;
  }
  out << "ok: " << r.items.size() << " items\n";
  return 0;
}

inline int cmd_generate(const GenerateOptions& opt, std::ostream& out, std::ostream& err) {
  if (opt.n == 0) {
    err << "usage error: --n must be at least 1\n";
    return 2;
  }
  try {
    const auto items = generate_corpus(opt);
    out << "wrote " << items.size() << " items to " << opt.corpus_out.string() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

/// Writes the JSON report to `json_out` and the table to `table_out`.
inline int cmd_evaluate(const fs::path& corpus_path, const fs::path& assets,
                        const InjectionSpec& spec, std::ostream& json_out,
                        std::ostream& table_out, std::ostream& err) {
  try {
    const Corpus corpus = load_corpus(corpus_path, assets);
    const nlohmann::json report = evaluate(corpus, spec);
    json_out << report.dump(2) << '\n';
    print_report_table(report, table_out);
  } catch (const Error& e) {
    err << e.kind() << ": " << e.what() << '\n';
    return 1;
  }
  return 0;
}

/// One output line per input line: feedback JSON or an error record.
inline int cmd_score(const Corpus& corpus, std::istream& in, std::ostream& out) {
  int status = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    nlohmann::ordered_json rec;
    try {
      const auto j = nlohmann::json::parse(line);
      const auto& item = get_item(corpus, j.at("item_id").get<std::string>());
      const auto hyp = hypothesis_from_text(j.at("hypothesis_text").get<std::string>());
      out << to_json(score_attempt(item, hyp)).dump() << '\n';
      continue;
    } catch (const Error& e) {
      rec["error"] = e.kind();
      rec["message"] = e.what();
    } catch (const nlohmann::json::exception& e) {
      rec["error"] = "ParseError";
      rec["message"] = e.what();
    }
    rec["line"] = line_no;
    out << rec.dump() << '\n';
    status = 1;
  }
  return status;
}

}  // namespace proncoach

#endif  // PRONCOACH_EVALUATION_HPP_
