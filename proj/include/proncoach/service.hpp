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

// HTTP/JSON back end: item fetch, asset serving and attempt scoring.

#ifndef PRONCOACH_SERVICE_HPP_
#define PRONCOACH_SERVICE_HPP_

#include <atomic>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "proncoach/content_store.hpp"
#include "proncoach/feedback.hpp"
#include "proncoach/features.hpp"
#include "proncoach/recognizer.hpp"
#include "proncoach/wav.hpp"

namespace proncoach {

enum class RecognizerKind { kMock, kSidecar };

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  fs::path corpus_path = "data/corpus.json";
  fs::path asset_root = "data/assets";
  RecognizerKind recognizer = RecognizerKind::kMock;
  ErrorRates mock_rates{0.05, 0.1, 0.05, 0.02};
  FusionWeights fusion;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> cors_origins;
  std::optional<fs::path> attempt_log;
  double max_audio_seconds = 30.0;
  std::size_t max_body_bytes = 16u << 20;
};

inline RecognizerKind parse_recognizer_kind(const std::string& s) {
  if (s == "mock") return RecognizerKind::kMock;
  if (s == "sidecar") return RecognizerKind::kSidecar;
  throw std::invalid_argument("recognizer must be 'mock' or 'sidecar', got '" + s + "'");
}

/// Overlays the keys present in a JSON config object onto `cfg`.
inline void apply_config_json(ServiceConfig& cfg, const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "host") cfg.host = v.get<std::string>();
    else if (key == "port") cfg.port = v.get<int>();
    else if (key == "corpus") cfg.corpus_path = v.get<std::string>();
    else if (key == "assets") cfg.asset_root = v.get<std::string>();
    else if (key == "recognizer") cfg.recognizer = parse_recognizer_kind(v.get<std::string>());
    else if (key == "mock_rates") {
      cfg.mock_rates.p_sub_full = v.value("p_sub_full", cfg.mock_rates.p_sub_full);
      cfg.mock_rates.p_sub_diac = v.value("p_sub_diac", cfg.mock_rates.p_sub_diac);
      cfg.mock_rates.p_del = v.value("p_del", cfg.mock_rates.p_del);
      cfg.mock_rates.p_ins = v.value("p_ins", cfg.mock_rates.p_ins);
    } else if (key == "fusion") {
      cfg.fusion.textual = v.value("textual", cfg.fusion.textual);
      cfg.fusion.acoustic = v.value("acoustic", cfg.fusion.acoustic);
    } else if (key == "seed") {
      if (v.is_null()) cfg.seed.reset(); else cfg.seed = v.get<std::uint64_t>();
    } else if (key == "cors_origins") cfg.cors_origins = v.get<std::vector<std::string>>();
    else if (key == "attempt_log") {
      if (v.is_null()) cfg.attempt_log.reset(); else cfg.attempt_log = v.get<std::string>();
    } else if (key == "max_audio_seconds") cfg.max_audio_seconds = v.get<double>();
    else throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

/// Checks ranges; `check_paths` also requires the corpus and asset root.
inline void validate_config(const ServiceConfig& cfg, bool check_paths = true) {
  validate_rates(cfg.mock_rates);
  validate_weights(cfg.fusion);
  if (cfg.port < 0 || cfg.port > 65535) throw std::invalid_argument("port out of range");
  if (!(cfg.max_audio_seconds > 0)) throw std::invalid_argument("max_audio_seconds must be positive");
  if (check_paths) {
    if (!fs::is_regular_file(cfg.corpus_path))
      throw std::invalid_argument("corpus not found: " + cfg.corpus_path.string());
    if (!fs::is_directory(cfg.asset_root))
      throw std::invalid_argument("asset root not found: " + cfg.asset_root.string());
  }
}

inline std::string content_type_for(const fs::path& p) {
  const std::string ext = p.extension().string();
  if (ext == ".wav") return "audio/wav";
  if (ext == ".png") return "image/png";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".webp") return "image/webp";
  return "application/octet-stream";
}

class Service {
 public:
  explicit Service(ServiceConfig cfg)
      : cfg_(std::move(cfg)), rng_(cfg_.seed ? *cfg_.seed : std::random_device{}()) {
    validate_rates(cfg_.mock_rates);
    validate_weights(cfg_.fusion);
    install_routes();
  }

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Publishes the corpus; /healthz reports ready from here on.
  void set_corpus(Corpus corpus) {
    auto c = std::make_shared<const Corpus>(std::move(corpus));
    std::unique_lock lock(corpus_mutex_);
    corpus_ = std::move(c);
  }

  bool ready() const { return corpus() != nullptr; }

  /// Binds to cfg.port (0 picks a free port) and returns the bound port,
  /// or -1 on failure.
  int bind() {
    if (cfg_.port == 0) return port_ = server_.bind_to_any_port(cfg_.host);
    return port_ = server_.bind_to_port(cfg_.host, cfg_.port) ? cfg_.port : -1;
  }
  /// Serves until stop(). Call bind() first.
  bool listen_after_bind() { return server_.listen_after_bind(); }
  void stop() { server_.stop(); }
  void wait_until_ready() { server_.wait_until_ready(); }
  int port() const { return port_; }
  const ServiceConfig& config() const { return cfg_; }

 private:
  std::shared_ptr<const Corpus> corpus() const {
    std::shared_lock lock(corpus_mutex_);
    return corpus_;
  }

  static void send_error(httplib::Response& res, int status, const std::string& kind,
                         const std::string& message) {
    res.status = status;
    nlohmann::ordered_json j;
    j["error"] = kind;
    j["message"] = message;
    res.set_content(j.dump(), "application/json");
  }

  static void send_json(httplib::Response& res, const nlohmann::ordered_json& j) {
    res.status = 200;
    res.set_content(j.dump(), "application/json");
  }

  void install_routes() {
    server_.set_payload_max_length(cfg_.max_body_bytes);

    server_.set_exception_handler(
        [](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
          std::string what = "unknown error";
          try {
            std::rethrow_exception(ep);
          } catch (const std::exception& e) {
            what = e.what();
          } catch (...) {
          }
          send_error(res, 500, "InternalError", what);
        });

    server_.set_post_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
      const std::string origin = req.get_header_value("Origin");
      if (origin.empty()) return;
      for (const auto& allowed : cfg_.cors_origins) {
        if (allowed == origin || allowed == "*") {
          res.set_header("Access-Control-Allow-Origin", allowed == "*" ? "*" : origin);
          res.set_header("Vary", "Origin");
          res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
          res.set_header("Access-Control-Allow-Headers", "Content-Type");
          return;
        }
      }
    });
    server_.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
      res.status = 204;
    });

    server_.Get("/healthz", [this](const httplib::Request&, httplib::Response& res) {
      if (ready()) {
        res.set_content("ok", "text/plain");
      } else {
        res.status = 503;
        res.set_content("loading", "text/plain");
      }
    });

    server_.Get("/api/v1/items/random", [this](const httplib::Request&, httplib::Response& res) {
      auto c = corpus();
      if (!c) return send_error(res, 503, "NotReady", "corpus is still loading");
      if (c->empty()) return send_error(res, 503, "EmptyCorpus", "corpus has no items");
      const PracticeItem* item;
      {
        std::lock_guard lock(rng_mutex_);
        item = &random_item(*c, rng_);
      }
      send_json(res, to_json(*item));
    });

    server_.Get(R"(/api/v1/items/([^/]+))", [this](const httplib::Request& req,
                                                  httplib::Response& res) {
      auto c = corpus();
      if (!c) return send_error(res, 503, "NotReady", "corpus is still loading");
      try {
        send_json(res, to_json(get_item(*c, req.matches[1])));
      } catch (const NotFound& e) {
        send_error(res, 404, e.kind(), e.what());
      }
    });

    server_.Get(R"(/api/v1/assets/(.+))", [this](const httplib::Request& req,
                                                httplib::Response& res) {
      serve_asset(req.matches[1], res);
    });

    server_.Post(R"(/api/v1/items/([^/]+)/attempts)",
                 [this](const httplib::Request& req, httplib::Response& res) {
                   handle_attempt(req, res);
                 });
  }

  void serve_asset(const std::string& ref, httplib::Response& res) {
    auto path = resolve_asset(cfg_.asset_root, ref);
    if (path) {
      // symlinks must not lead out of the root either
      std::error_code ec;
      const fs::path root = fs::weakly_canonical(cfg_.asset_root, ec);
      const fs::path target = fs::weakly_canonical(*path, ec);
      const auto rel = target.lexically_relative(root);
      if (rel.empty() || *rel.begin() == "..") path.reset();
    }
    if (!path) return send_error(res, 403, "PathEscape", "asset ref leaves the asset root");
    if (!fs::is_regular_file(*path)) return send_error(res, 404, "NotFound", "no such asset");
    std::string body;
    try {
      body = read_file(*path);
    } catch (const ParseError&) {
      return send_error(res, 404, "NotFound", "asset unreadable");
    }
    res.set_content(std::move(body), content_type_for(*path));
  }

  void handle_attempt(const httplib::Request& req, httplib::Response& res) {
    auto c = corpus();
    if (!c) return send_error(res, 503, "NotReady", "corpus is still loading");
    const PracticeItem* item;
    try {
      item = &get_item(*c, req.matches[1]);
    } catch (const NotFound& e) {
      return send_error(res, 404, e.kind(), e.what());
    }
    if (!req.is_multipart_form_data())
      return send_error(res, 400, "BadRequest", "expected multipart/form-data");

    std::optional<AudioClip> audio;
    std::optional<std::string> hyp_text;
    if (req.has_file("hypothesis_text")) hyp_text = req.get_file_value("hypothesis_text").content;

    try {
      if (req.has_file("audio")) {
        audio = decode_wav(req.get_file_value("audio").content);
        if (audio->duration_seconds() > cfg_.max_audio_seconds)
          return send_error(res, 413, "AudioTooLong", "audio longer than the service limit");
        if (mfcc_frame_count(audio->samples.size()) == 0)
          return send_error(res, 400, "TooShort", "audio shorter than 25 ms");
      }

      std::unique_ptr<RecognizerPort> recognizer;
      if (hyp_text) {
        recognizer = std::make_unique<SidecarRecognizer>(*hyp_text);
      } else if (cfg_.recognizer == RecognizerKind::kMock && audio) {
        recognizer = std::make_unique<MockRecognizer>(cfg_.mock_rates, cfg_.seed.value_or(0));
      } else {
        return send_error(res, 400, "BadRequest",
                          cfg_.recognizer == RecognizerKind::kSidecar
                              ? "hypothesis_text is required in sidecar mode"
                              : "an audio part or hypothesis_text is required");
      }

      const AudioClip empty;
      const Hypothesis hyp = recognizer->recognize(audio ? *audio : empty, *item);
      const std::optional<double> acoustic = audio ? acoustic_similarity(*c, *item, *audio)
                                                   : std::nullopt;
      const AttemptFeedback fb = score_attempt(*item, hyp, acoustic, cfg_.fusion);
      const auto body = to_json(fb);
      log_attempt(fb);
      send_json(res, body);
    } catch (const UnsupportedFormat& e) {
      send_error(res, 400, e.kind(), e.what());
    } catch (const CorruptFile& e) {
      send_error(res, 400, e.kind(), e.what());
    } catch (const MalformedText& e) {
      send_error(res, 400, e.kind(), e.what());
    }
  }

  /// DTW similarity against the item's normal reference audio; nullopt when
  /// that reference cannot be read.
  static std::optional<double> acoustic_similarity(const Corpus& c, const PracticeItem& item,
                                                   const AudioClip& audio) {
    auto path = resolve_asset(c.asset_root(), item.audio_normal_ref);
    if (!path) return std::nullopt;
    try {
      const AudioClip ref = decode_wav(read_file(*path));
      return dtw_similarity(mfcc(audio), mfcc(ref));
    } catch (const Error&) {
      return std::nullopt;
    }
  }

  void log_attempt(const AttemptFeedback& fb) {
    if (!cfg_.attempt_log) return;
    nlohmann::ordered_json j;
    j["item_id"] = fb.item_id;
    j["hypothesis_text"] = fb.hypothesis_text;
    j["utterance_value"] = fb.utterance.value;
    j["overall_value"] = fb.overall.value;
    std::lock_guard lock(log_mutex_);
    std::ofstream out(*cfg_.attempt_log, std::ios::app);
    out << j.dump() << '\n';
  }

  ServiceConfig cfg_;
  httplib::Server server_;
  int port_ = -1;

  mutable std::shared_mutex corpus_mutex_;
  std::shared_ptr<const Corpus> corpus_;

  std::mutex rng_mutex_;
  Rng rng_;

  std::mutex log_mutex_;
};

}  // namespace proncoach

#endif  // PRONCOACH_SERVICE_HPP_
