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

// proncoach-server: serves practice items and scores attempts over HTTP.

#include <cstdlib>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "proncoach/service.hpp"

int main(int argc, char** argv) {
  using namespace proncoach;

  CLI::App app{"Pronunciation practice back end"};
  std::string config_path;
  std::optional<int> port;
  std::optional<std::string> corpus, assets, recognizer;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "JSON config file (PRONCOACH_CONFIG overrides)");
  app.add_option("--port", port, "Listen port (0 = any free port)");
  app.add_option("--corpus", corpus, "Corpus JSON file");
  app.add_option("--assets", assets, "Asset root directory");
  app.add_option("--recognizer", recognizer, "mock | sidecar")
      ->check(CLI::IsMember({"mock", "sidecar"}));
  app.add_option("--seed", seed, "PRNG seed for reproducible runs");
  CLI11_PARSE(app, argc, argv);

  ServiceConfig cfg;
  try {
    if (const char* env = std::getenv("PRONCOACH_CONFIG"); env && *env) config_path = env;
    if (!config_path.empty())
      apply_config_json(cfg, nlohmann::json::parse(read_file(config_path)));
    if (port) cfg.port = *port;
    if (corpus) cfg.corpus_path = *corpus;
    if (assets) cfg.asset_root = *assets;
    if (recognizer) cfg.recognizer = parse_recognizer_kind(*recognizer);
    if (seed) cfg.seed = *seed;
    validate_config(cfg);
  } catch (const std::exception& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  }

  Service service(cfg);
  const int bound = service.bind();
  if (bound < 0) {
    std::cerr << "cannot bind " << cfg.host << ':' << cfg.port << '\n';
    return 1;
  }
  std::cerr << "listening on http://" << cfg.host << ':' << bound << '\n';

  // /healthz answers 503 until the corpus is in.
  std::thread loader([&] {
    try {
      Corpus c = load_corpus(cfg.corpus_path, cfg.asset_root);
      std::cerr << "loaded " << c.size() << " items\n";
      service.set_corpus(std::move(c));
    } catch (const Error& e) {
      std::cerr << e.kind() << ": " << e.what() << '\n';
      service.stop();
    }
  });
  const bool ok = service.listen_after_bind();
  loader.join();
  return ok && service.ready() ? 0 : 1;
}
