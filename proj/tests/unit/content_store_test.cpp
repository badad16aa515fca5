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

#include <map>

#include "proncoach/content_store.hpp"
#include "support/fixtures.hpp"

using namespace proncoach;
using fixtures::CorpusOnDisk;
using fixtures::item_json;

namespace {

std::string first_issue(const nlohmann::json& items) {
  CorpusOnDisk disk(items);
  const auto r = validate_corpus_file(disk.corpus, disk.assets);
  return r.issues.empty() ? "" : r.issues.front().kind + " " + r.issues.front().item_id + ": " +
                                     r.issues.front().message;
}

}  // namespace

TEST_CASE("load_corpus: valid file", "[content_store]") {
  CorpusOnDisk disk(fixtures::salam_items());
  const Corpus c = load_corpus(disk.corpus, disk.assets);
  REQUIRE(c.size() == 3);
  const PracticeItem& it = get_item(c, "w001");
  CHECK(it.transliteration == "salaAm");  // filled in when absent
  CHECK(it.vowelized_text == "سَلَام");
  CHECK_FALSE(it.audio_slow_ref.has_value());
  CHECK(c.at_rank(0).id == "w001");
  CHECK(c.at_rank(2).id == "w003");
}

TEST_CASE("load_corpus: errors", "[content_store]") {
  SECTION("duplicate id") {
    auto items = fixtures::salam_items();
    items.push_back(item_json("w001", "باب", "بَاب"));
    CorpusOnDisk disk(items);
    try {
      load_corpus(disk.corpus, disk.assets);
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(e.item_id() == "w001");
      CHECK(e.reason() == "duplicate id");
    }
  }
  SECTION("vowelized letters differ from surface letters") {
    // same length, one base changed: the stripped comparison must catch it
    auto items = nlohmann::json::array({item_json("w009", "سلام", "سَلَاب")});
    CHECK(bases(strip_diacritics(segment_graphemes("سَلَاب"))) != bases(segment_graphemes("سلام")));
    CorpusOnDisk disk(items);
    CHECK_THROWS_AS(load_corpus(disk.corpus, disk.assets), ValidationError);
  }
  SECTION("malformed JSON") {
    fixtures::TempDir dir;
    std::ofstream(dir.path() / "c.json") << "[{";
    CHECK_THROWS_AS(load_corpus(dir.path() / "c.json", dir.path()), ParseError);
  }
  SECTION("not an array") {
    fixtures::TempDir dir;
    std::ofstream(dir.path() / "c.json") << "{}";
    CHECK_THROWS_AS(load_corpus(dir.path() / "c.json", dir.path()), ParseError);
  }
  SECTION("unreadable file") {
    CHECK_THROWS_AS(load_corpus("/nonexistent/corpus.json", "/nonexistent"), ParseError);
  }
  SECTION("missing asset") {
    auto items = fixtures::salam_items();
    items[1]["audio_normal_ref"] = "audio/nope.wav";
    CorpusOnDisk disk(items);
    CHECK_THROWS_AS(load_corpus(disk.corpus, disk.assets), MissingAsset);
  }
}

TEST_CASE("item invariants are enforced", "[content_store]") {
  auto with = [](const std::string& key, const nlohmann::json& value) {
    auto item = item_json("w001", "سلام", "سَلَام");
    item[key] = value;
    return nlohmann::json::array({item});
  };
  CHECK(first_issue(with("extra", 1)).find("unknown field extra") != std::string::npos);
  CHECK(first_issue(with("vowelized_text", "َسلام")).find("malformed") != std::string::npos);
  CHECK(first_issue(with("transliteration", "salam")).find("transliteration") != std::string::npos);
  CHECK(first_issue(with("transliteration", "salaAm")).empty());
  CHECK(first_issue(with("example_sentence_ar", "جملة")).find("does not contain") !=
        std::string::npos);
  CHECK(first_issue(with("image_ref", "../../etc/passwd")).find("escapes") != std::string::npos);
  CHECK(first_issue(with("image_ref", "/etc/passwd")).find("escapes") != std::string::npos);
  CHECK(first_issue(with("translation_en", 3)).find("not a string") != std::string::npos);
  CHECK(first_issue(with("audio_slow_ref", "audio/tone_00_slow.wav")).empty());
  CHECK(first_issue(with("audio_slow_ref", "audio/none.wav")).rfind("MissingAsset", 0) == 0);

  auto missing = item_json("w001", "سلام", "سَلَام");
  missing.erase("graphophonic_note");
  CHECK(first_issue(nlohmann::json::array({missing})).find("missing field") != std::string::npos);
}

TEST_CASE("validation collects every problem", "[content_store]") {
  auto items = fixtures::salam_items();
  items[0]["bogus"] = true;
  items[2]["image_ref"] = "img/missing.svg";
  CorpusOnDisk disk(items);
  const auto r = validate_corpus_file(disk.corpus, disk.assets);
  CHECK(r.issues.size() == 2);
  CHECK(r.items.size() == 1);
}

TEST_CASE("get_item", "[content_store]") {
  CorpusOnDisk disk(fixtures::salam_items());
  const Corpus c = load_corpus(disk.corpus, disk.assets);
  CHECK(get_item(c, "w002").surface_text == "بيت");
  CHECK_THROWS_AS(get_item(c, "nope"), NotFound);
  CHECK_THROWS_AS(get_item(c, ""), NotFound);
}

TEST_CASE("random_item", "[content_store]") {
  SECTION("one item corpus") {
    CorpusOnDisk disk(nlohmann::json::array({item_json("only", "باب", "بَاب")}));
    const Corpus c = load_corpus(disk.corpus, disk.assets);
    for (std::uint64_t seed : {0u, 1u, 42u, 9999u}) {
      Rng rng(seed);
      CHECK(random_item(c, rng).id == "only");
    }
  }
  SECTION("empty corpus") {
    Corpus c;
    Rng rng(1);
    CHECK_THROWS_AS(random_item(c, rng), EmptyCorpus);
  }
  SECTION("seeded draw on the bundled corpus is stable") {
    const Corpus c = load_corpus(fixtures::bundled_corpus(), fixtures::bundled_assets());
    Rng rng(42);
    CHECK(random_item(c, rng).id == "s0093");
  }
}

TEST_CASE("random_item is uniform", "[content_store][property]") {
  SECTION("4 items, 10000 draws, each within a 6-sigma binomial bound") {
    auto items = nlohmann::json::array();
    for (int k = 0; k < 4; ++k) items.push_back(item_json("w" + std::to_string(k), "باب", "بَاب"));
    CorpusOnDisk disk(items);
    const Corpus c = load_corpus(disk.corpus, disk.assets);
    Rng rng(123);
    std::map<std::string, int> counts;
    for (int i = 0; i < 10000; ++i) ++counts[random_item(c, rng).id];
    REQUIRE(counts.size() == 4);
    for (const auto& [id, n] : counts) {
      CHECK(n >= 2300);
      CHECK(n <= 2700);
    }
  }
  SECTION("10 items, chi-square below the 0.001 critical value") {
    auto items = nlohmann::json::array();
    for (int k = 0; k < 10; ++k) items.push_back(item_json("w" + std::to_string(k), "باب", "بَاب"));
    CorpusOnDisk disk(items);
    const Corpus c = load_corpus(disk.corpus, disk.assets);
    Rng rng(2026);
    std::map<std::string, int> counts;
    for (int i = 0; i < 10000; ++i) ++counts[random_item(c, rng).id];
    double chi2 = 0;
    for (const auto& [id, n] : counts) chi2 += (n - 1000.0) * (n - 1000.0) / 1000.0;
    // chi-square 0.999 quantile: 27.877 at 9 dof; 34.528 at 13 dof (margin)
    CHECK(chi2 < 34.528);
  }
}

TEST_CASE("bundled corpus", "[content_store]") {
  const Corpus c = load_corpus(fixtures::bundled_corpus(), fixtures::bundled_assets());
  CHECK(c.size() >= 400);
  for (const auto& [id, item] : c.items()) {
    const auto back = transliterate_inverse(item.transliteration);
    REQUIRE(back == segment_graphemes(item.vowelized_text));
  }
}

TEST_CASE("resolve_asset", "[content_store]") {
  CHECK(resolve_asset("/root", "audio/a.wav") == fs::path("/root/audio/a.wav"));
  CHECK_FALSE(resolve_asset("/root", "../secret"));
  CHECK_FALSE(resolve_asset("/root", "audio/../../secret"));
  CHECK_FALSE(resolve_asset("/root", "/etc/passwd"));
  CHECK_FALSE(resolve_asset("/root", ""));
  CHECK(resolve_asset("/root", "audio/../img/x.svg") == fs::path("/root/img/x.svg"));
}
