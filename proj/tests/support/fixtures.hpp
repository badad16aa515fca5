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

// Shared helpers for building small corpora on disk.

#ifndef PRONCOACH_TESTS_FIXTURES_HPP_
#define PRONCOACH_TESTS_FIXTURES_HPP_

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "proncoach/content_store.hpp"
#include "proncoach/evaluation.hpp"

namespace fixtures {

namespace fs = std::filesystem;

#ifndef PRONCOACH_SOURCE_DIR
#define PRONCOACH_SOURCE_DIR "."
#endif

inline fs::path source_dir() { return fs::path(PRONCOACH_SOURCE_DIR); }
inline fs::path bundled_corpus() { return source_dir() / "data" / "corpus.json"; }
inline fs::path bundled_assets() { return source_dir() / "data" / "assets"; }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("proncoach_test_" + std::to_string(std::random_device{}()) + "_" +
             std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

/// A valid item using the shared asset pool.
inline nlohmann::json item_json(const std::string& id, const std::string& surface,
                                const std::string& vowelized) {
  return {{"id", id},
          {"surface_text", surface},
          {"vowelized_text", vowelized},
          {"translation_en", "test"},
          {"image_ref", "img/card_0.svg"},
          {"audio_normal_ref", "audio/tone_00.wav"},
          {"audio_slow_ref", nullptr},
          {"example_sentence_ar", surface + " في جملة"},
          {"example_sentence_en", "in a sentence"},
          {"example_audio_ref", "audio/tone_01.wav"},
          {"graphophonic_note", "note"}};
}

/// Writes `items` as corpus.json next to a generated asset pool.
struct CorpusOnDisk {
  TempDir dir;
  fs::path corpus;
  fs::path assets;

  explicit CorpusOnDisk(const nlohmann::json& items) {
    assets = dir.path() / "assets";
    proncoach::write_asset_pool(assets);
    corpus = dir.path() / "corpus.json";
    std::ofstream(corpus) << items.dump(2);
  }
};

inline nlohmann::json salam_items() {
  return nlohmann::json::array({item_json("w001", "سلام", "سَلَام"),
                                item_json("w002", "بيت", "بَيْت"),
                                item_json("w003", "كتاب", "كِتَاب")});
}

}  // namespace fixtures

#endif  // PRONCOACH_TESTS_FIXTURES_HPP_
