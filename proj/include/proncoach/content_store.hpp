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

// Practice-item corpus: JSON loading, validation and random selection.

#ifndef PRONCOACH_CONTENT_STORE_HPP_
#define PRONCOACH_CONTENT_STORE_HPP_

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "proncoach/arabic_text.hpp"
#include "proncoach/errors.hpp"
#include "proncoach/random.hpp"

namespace proncoach {

namespace fs = std::filesystem;

struct PracticeItem {
  std::string id;
  std::string surface_text;
  std::string vowelized_text;
  std::string transliteration;
  std::string translation_en;
  std::string image_ref;
  std::string audio_normal_ref;
  std::optional<std::string> audio_slow_ref;
  std::string example_sentence_ar;
  std::string example_sentence_en;
  std::string example_audio_ref;
  std::string graphophonic_note;

  friend bool operator==(const PracticeItem&, const PracticeItem&) = default;
};

/// Field names in wire order.
inline const std::vector<std::string>& practice_item_fields() {
  static const std::vector<std::string> names = {
      "id",
      "surface_text",
      "vowelized_text",
      "transliteration",
      "translation_en",
      "image_ref",
      "audio_normal_ref",
      "audio_slow_ref",
      "example_sentence_ar",
      "example_sentence_en",
      "example_audio_ref",
      "graphophonic_note"};
  return names;
}

inline nlohmann::ordered_json to_json(const PracticeItem& it) {
  nlohmann::ordered_json j;
  j["id"] = it.id;
  j["surface_text"] = it.surface_text;
  j["vowelized_text"] = it.vowelized_text;
  j["transliteration"] = it.transliteration;
  j["translation_en"] = it.translation_en;
  j["image_ref"] = it.image_ref;
  j["audio_normal_ref"] = it.audio_normal_ref;
  j["audio_slow_ref"] = it.audio_slow_ref ? nlohmann::ordered_json(*it.audio_slow_ref)
                                          : nlohmann::ordered_json(nullptr);
  j["example_sentence_ar"] = it.example_sentence_ar;
  j["example_sentence_en"] = it.example_sentence_en;
  j["example_audio_ref"] = it.example_audio_ref;
  j["graphophonic_note"] = it.graphophonic_note;
  return j;
}

/// Resolves `ref` under `root`. Returns nullopt for absolute refs and for
/// refs whose lexical normal form leaves the root.
inline std::optional<fs::path> resolve_asset(const fs::path& root, const std::string& ref) {
  if (ref.empty()) return std::nullopt;
  const fs::path rel = fs::path(ref).lexically_normal();
  if (rel.is_absolute() || rel.has_root_name() || rel.has_root_directory()) return std::nullopt;
  if (rel.empty() || *rel.begin() == "..") return std::nullopt;
  return root / rel;
}

/// Immutable after construction. Items are kept ordered by id.
class Corpus {
 public:
  Corpus() = default;
  Corpus(std::map<std::string, PracticeItem> items, fs::path asset_root)
      : items_(std::move(items)), asset_root_(std::move(asset_root)) {
    order_.reserve(items_.size());
    for (const auto& [id, item] : items_) order_.push_back(&item);
  }
  Corpus(const Corpus& other) : Corpus(other.items_, other.asset_root_) {}
  Corpus& operator=(const Corpus& other) {
    if (this != &other) *this = Corpus(other);
    return *this;
  }
  Corpus(Corpus&&) noexcept = default;
  Corpus& operator=(Corpus&&) noexcept = default;

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const fs::path& asset_root() const { return asset_root_; }
  const std::map<std::string, PracticeItem>& items() const { return items_; }
  /// i-th item in id order.
  const PracticeItem& at_rank(std::size_t i) const { return *order_.at(i); }

 private:
  std::map<std::string, PracticeItem> items_;
  fs::path asset_root_;
  std::vector<const PracticeItem*> order_;
};

inline const PracticeItem& get_item(const Corpus& c, const std::string& id) {
  auto it = c.items().find(id);
  if (it == c.items().end()) throw NotFound("no item with id '" + id + "'");
  return it->second;
}

/// Uniform over items in id order; deterministic for a given RNG state.
inline const PracticeItem& random_item(const Corpus& c, Rng& rng) {
  if (c.empty()) throw EmptyCorpus("corpus has no items");
  return c.at_rank(rng.below(c.size()));
}

// ---------------------------------------------------------------------------
// Loading

/// One problem found while validating a corpus file.
struct CorpusIssue {
  std::string kind;     // ParseError | ValidationError | MissingAsset
  std::string item_id;  // empty for file-level problems
  std::string message;
};

struct CorpusLoadResult {
  std::map<std::string, PracticeItem> items;
  std::vector<CorpusIssue> issues;
};

namespace detail {

inline std::string required_string(const nlohmann::json& obj, const std::string& key,
                                   const std::string& id) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(id, "missing field " + key);
  if (!it->is_string()) throw ValidationError(id, "field " + key + " is not a string");
  return it->get<std::string>();
}

inline std::optional<std::string> optional_string(const nlohmann::json& obj,
                                                  const std::string& key,
                                                  const std::string& id) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw ValidationError(id, "field " + key + " is not a string");
  return it->get<std::string>();
}

inline GraphemeString segment_field(const std::string& text, const std::string& field,
                                    const std::string& id) {
  try {
    return segment_graphemes(text);
  } catch (const MalformedText& e) {
    throw ValidationError(id, field + " is malformed: " + e.what());
  }
}

/// Parses and checks one item against everything except id uniqueness and
/// assets. Text fields are stored normalized.
inline PracticeItem parse_item(const nlohmann::json& obj, std::size_t position) {
  std::string id = "#" + std::to_string(position);
  if (!obj.is_object()) throw ValidationError(id, "item is not an object");
  if (auto it = obj.find("id"); it != obj.end() && it->is_string()) id = it->get<std::string>();

  const auto& known = practice_item_fields();
  for (const auto& [key, value] : obj.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ValidationError(id, "unknown field " + key);

  PracticeItem it;
  it.id = required_string(obj, "id", id);
  if (it.id.empty()) throw ValidationError(id, "empty id");
  it.surface_text = normalize(required_string(obj, "surface_text", id));
  it.vowelized_text = normalize(required_string(obj, "vowelized_text", id));
  auto translit = optional_string(obj, "transliteration", id);
  it.translation_en = required_string(obj, "translation_en", id);
  it.image_ref = required_string(obj, "image_ref", id);
  it.audio_normal_ref = required_string(obj, "audio_normal_ref", id);
  it.audio_slow_ref = optional_string(obj, "audio_slow_ref", id);
  it.example_sentence_ar = normalize(required_string(obj, "example_sentence_ar", id));
  it.example_sentence_en = required_string(obj, "example_sentence_en", id);
  it.example_audio_ref = required_string(obj, "example_audio_ref", id);
  it.graphophonic_note = required_string(obj, "graphophonic_note", id);

  if (it.vowelized_text.empty()) throw ValidationError(id, "empty vowelized_text");
  const GraphemeString vowelized = segment_field(it.vowelized_text, "vowelized_text", id);
  const GraphemeString surface = segment_field(it.surface_text, "surface_text", id);
  if (bases(strip_diacritics(vowelized)) != bases(surface))
    throw ValidationError(id, "vowelized_text letters differ from surface_text letters");

  const std::string expected = transliterate(vowelized);
  if (translit && *translit != expected)
    throw ValidationError(id, "transliteration '" + *translit + "' should be '" + expected + "'");
  it.transliteration = expected;

  if (it.example_sentence_ar.find(it.surface_text) == std::string::npos)
    throw ValidationError(id, "example_sentence_ar does not contain surface_text");
  return it;
}

inline void check_asset(const fs::path& root, const PracticeItem& it, const std::string& field,
                        const std::string& ref) {
  auto path = resolve_asset(root, ref);
  if (!path) throw ValidationError(it.id, field + " escapes the asset root: " + ref);
  std::ifstream probe(*path, std::ios::binary);
  if (!fs::is_regular_file(*path) || !probe)
    throw MissingAsset(it.id + ": " + field + " -> " + path->string());
}

}  // namespace detail

/// Parses and validates every item, collecting all problems instead of
/// stopping at the first one.
inline CorpusLoadResult validate_corpus_text(const std::string& text, const fs::path& asset_root,
                                             bool check_assets = true) {
  CorpusLoadResult out;
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    out.issues.push_back({"ParseError", "", e.what()});
    return out;
  }
  if (!doc.is_array()) {
    out.issues.push_back({"ParseError", "", "corpus file must be a JSON array"});
    return out;
  }
  for (std::size_t i = 0; i < doc.size(); ++i) {
    try {
      PracticeItem it = detail::parse_item(doc[i], i);
      if (out.items.count(it.id)) throw ValidationError(it.id, "duplicate id");
      if (check_assets) {
        detail::check_asset(asset_root, it, "image_ref", it.image_ref);
        detail::check_asset(asset_root, it, "audio_normal_ref", it.audio_normal_ref);
        if (it.audio_slow_ref)
          detail::check_asset(asset_root, it, "audio_slow_ref", *it.audio_slow_ref);
        detail::check_asset(asset_root, it, "example_audio_ref", it.example_audio_ref);
      }
      out.items.emplace(it.id, std::move(it));
    } catch (const ValidationError& e) {
      out.issues.push_back({e.kind(), e.item_id(), e.reason()});
    } catch (const MissingAsset& e) {
      out.issues.push_back({e.kind(), "", e.what()});
    }
  }
  return out;
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline CorpusLoadResult validate_corpus_file(const fs::path& path, const fs::path& asset_root) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const ParseError& e) {
    return {{}, {{"ParseError", "", e.what()}}};
  }
  return validate_corpus_text(text, asset_root);
}

/// Loads a corpus, throwing the first problem found as ParseError,
/// ValidationError or MissingAsset.
inline Corpus load_corpus(const fs::path& path, const fs::path& asset_root) {
  CorpusLoadResult r = validate_corpus_file(path, asset_root);
  if (!r.issues.empty()) {
    const CorpusIssue& first = r.issues.front();
    if (first.kind == "ParseError") throw ParseError(first.message);
    if (first.kind == "MissingAsset") throw MissingAsset(first.message);
    throw ValidationError(first.item_id, first.message);
  }
  return Corpus(std::move(r.items), asset_root);
}

}  // namespace proncoach

#endif  // PRONCOACH_CONTENT_STORE_HPP_
