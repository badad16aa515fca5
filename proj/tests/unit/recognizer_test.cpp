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

#include "proncoach/recognizer.hpp"
#include "support/fixtures.hpp"

using namespace proncoach;

namespace {

PracticeItem item(const std::string& vowelized) {
  PracticeItem it;
  it.id = "t";
  it.vowelized_text = normalize(vowelized);
  return it;
}

const AudioClip kSilence{std::vector<double>(1600, 0.0), kSampleRate};

}  // namespace

TEST_CASE("mock_recognize", "[recognizer]") {
  const PracticeItem salam = item("سَلَام");

  SECTION("zero rates are the identity") {
    const Hypothesis h = mock_recognize(kSilence, salam, {}, 1);
    CHECK(h.graphemes == segment_graphemes(salam.vowelized_text));
    REQUIRE(h.confidences);
    CHECK(*h.confidences == std::vector<double>(4, 1.0));
  }
  SECTION("p_del = 1 empties the hypothesis") {
    const Hypothesis h = mock_recognize(kSilence, salam, {0, 0, 1, 0}, 5);
    CHECK(h.graphemes.empty());
    CHECK(h.confidences->empty());
  }
  SECTION("multi-word items keep their spaces") {
    const Hypothesis h = mock_recognize(kSilence, item("مِنْ فَضْلِكَ"), {0, 0, 1, 0}, 5);
    CHECK(h.graphemes == GraphemeString{Grapheme{cp::kSpace, {}}});
  }
  SECTION("seeded goldens") {
    // seed 42 draws no corruption on any of the four letters
    const Hypothesis h42 = mock_recognize(kSilence, salam, {0.5, 0, 0, 0}, 42);
    CHECK(transliterate(h42.graphemes) == "salaAm");
    CHECK(*h42.confidences == std::vector<double>{1, 1, 1, 1});

    const Hypothesis h7 = mock_recognize(kSilence, salam, {0.5, 0, 0, 0}, 7);
    CHECK(transliterate(h7.graphemes) == "sanaYS");
    CHECK(*h7.confidences == std::vector<double>{1, 0.3, 0.3, 0.3});

    const Hypothesis mixed = mock_recognize(kSilence, salam, {0.1, 0.1, 0.1, 0.1}, 11);
    CHECK(transliterate(mixed.graphemes) == "s~ilasuAm");
    CHECK(*mixed.confidences == std::vector<double>{0.3, 1, 0.3, 1, 1});
  }
  SECTION("full substitution always changes the base") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const Hypothesis h = mock_recognize(kSilence, salam, {1, 0, 0, 0}, seed);
      const auto ref = segment_graphemes(salam.vowelized_text);
      REQUIRE(h.graphemes.size() == ref.size());
      for (std::size_t i = 0; i < ref.size(); ++i) {
        REQUIRE(h.graphemes[i].base != ref[i].base);
        REQUIRE(h.graphemes[i].diacritics == ref[i].diacritics);
      }
    }
  }
  SECTION("diacritic substitution always changes the marks") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const Hypothesis h = mock_recognize(kSilence, salam, {0, 1, 0, 0}, seed);
      const auto ref = segment_graphemes(salam.vowelized_text);
      for (std::size_t i = 0; i < ref.size(); ++i) {
        REQUIRE(h.graphemes[i].base == ref[i].base);
        REQUIRE(h.graphemes[i].diacritics != ref[i].diacritics);
      }
    }
  }
  SECTION("invalid rates") {
    CHECK_THROWS_AS(mock_recognize(kSilence, salam, {-0.1, 0, 0, 0}, 1), InvalidRates);
    CHECK_THROWS_AS(mock_recognize(kSilence, salam, {0, 0, 0, 1.5}, 1), InvalidRates);
    CHECK_THROWS_AS(mock_recognize(kSilence, salam, {0.5, 0.4, 0.2, 0}, 1), InvalidRates);
    CHECK_NOTHROW(mock_recognize(kSilence, salam, {0.5, 0.3, 0.2, 1}, 1));
  }
}

TEST_CASE("inject_errors ground truth", "[recognizer][property]") {
  Rng rng(13);
  const GraphemeString ref = segment_graphemes(normalize("صَبَاحُ الْخَيْرِ"));
  for (int trial = 0; trial < 500; ++trial) {
    const Injection inj = inject_errors(ref, {0.2, 0.2, 0.2, 0.3}, rng);
    std::size_t dels = 0, ins = 0;
    for (const auto& e : inj.truth) {
      dels += e.kind == OpKind::kDel;
      ins += e.kind == OpKind::kIns;
      REQUIRE(e.ref_index < letters(ref).size());
    }
    REQUIRE(inj.hypothesis.graphemes.size() == ref.size() - dels + ins);
    REQUIRE(inj.hypothesis.confidences->size() == inj.hypothesis.graphemes.size());
  }
}

TEST_CASE("zero-rate mock is the identity on every bundled item", "[recognizer]") {
  const Corpus c = load_corpus(fixtures::bundled_corpus(), fixtures::bundled_assets());
  for (const auto& [id, it] : c.items()) {
    const Hypothesis h = mock_recognize(kSilence, it, {}, 99);
    REQUIRE(h.graphemes == segment_graphemes(it.vowelized_text));
  }
}

TEST_CASE("MockRecognizer is deterministic per input", "[recognizer]") {
  const MockRecognizer rec({0.3, 0.3, 0.2, 0.2}, 5);
  const PracticeItem it = item("مَدْرَسَة");
  const auto a = rec.recognize(kSilence, it);
  const auto b = rec.recognize(kSilence, it);
  CHECK(a.graphemes == b.graphemes);
  CHECK(*a.confidences == *b.confidences);
  CHECK_FALSE(rec.single_flight());
}

TEST_CASE("SidecarRecognizer parses the text field", "[recognizer]") {
  const PracticeItem it = item("بَيْت");
  CHECK(SidecarRecognizer("بَيْت").recognize(kSilence, it).graphemes ==
        segment_graphemes("بَيْت"));
  CHECK(SidecarRecognizer("  بَيْت ").recognize(kSilence, it).graphemes ==
        segment_graphemes("بَيْت"));
  CHECK(SidecarRecognizer("").recognize(kSilence, it).graphemes.empty());
  CHECK_THROWS_AS(SidecarRecognizer("hello").recognize(kSilence, it), MalformedText);
}

TEST_CASE("fuse_scores", "[recognizer]") {
  CHECK(fuse_scores(0.8, std::nullopt) == 0.8);
  CHECK(fuse_scores(1.0, 1.0) == 1.0);
  CHECK(fuse_scores(0.5, 1.0) == Catch::Approx(0.65).epsilon(1e-15));
  CHECK(fuse_scores(0.5, 1.0, {0.5, 0.5}) == 0.75);
  CHECK_THROWS_AS(fuse_scores(1.2, std::nullopt), OutOfRange);
  CHECK_THROWS_AS(fuse_scores(0.5, 0.0), OutOfRange);
  CHECK_THROWS_AS(fuse_scores(0.5, 1.1), OutOfRange);
  CHECK_THROWS_AS(fuse_scores(0.5, 0.5, {0.9, 0.3}), OutOfRange);
}

TEST_CASE("fuse_scores is monotone in each argument", "[recognizer][property]") {
  for (int i = 0; i <= 100; ++i) {
    for (int j = 1; j <= 100; ++j) {
      const double t = i / 100.0, a = j / 100.0;
      const double f = fuse_scores(t, a);
      REQUIRE(f >= 0.0);
      REQUIRE(f <= 1.0);
      if (i < 100) REQUIRE(fuse_scores((i + 1) / 100.0, a) >= f);
      if (j < 100) REQUIRE(fuse_scores(t, (j + 1) / 100.0) >= f);
    }
  }
}
