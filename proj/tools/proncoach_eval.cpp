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

// proncoach-eval: corpus validation and generation, the detection
// benchmark, and offline batch scoring.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "proncoach/evaluation.hpp"

namespace {

proncoach::fs::path default_assets(const proncoach::fs::path& corpus) {
  return corpus.parent_path() / "assets";
}

}  // namespace

int main(int argc, char** argv) {
  using namespace proncoach;

  CLI::App app{"Pronunciation scoring tools"};
  app.require_subcommand(1);

  std::string corpus = "data/corpus.json";
  std::string assets;
  std::uint64_t seed = 0;

  auto* validate = app.add_subcommand("validate", "Validate a corpus file and its assets");
  validate->add_option("corpus", corpus, "Corpus JSON file");
  validate->add_option("--assets", assets, "Asset root (default: <corpus dir>/assets)");
  validate->add_option("--seed", seed, "Unused; accepted for uniformity");

  auto* generate = app.add_subcommand("generate", "Generate a synthetic corpus");
  std::size_t n = 0;
  std::string out = "data/corpus.json";
  std::string base;
  std::uint64_t gen_seed = 7;
  generate->add_option("--n", n, "Number of synthetic items")->required();
  generate->add_option("--seed", gen_seed, "Generator seed");
  generate->add_option("--out", out, "Output corpus file");
  generate->add_option("--assets", assets, "Asset root (default: <out dir>/assets)");
  generate->add_option("--base", base, "Curated items to include first");

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Error-injection detection benchmark");
  InjectionSpec spec;
  std::string single;
  std::string report_path;
  evaluate_cmd->add_option("corpus", corpus, "Corpus JSON file");
  evaluate_cmd->add_option("--assets", assets, "Asset root");
  evaluate_cmd->add_option("--p-sub-full", spec.rates.p_sub_full, "Full substitution rate");
  evaluate_cmd->add_option("--p-sub-diac", spec.rates.p_sub_diac, "Diacritic substitution rate");
  evaluate_cmd->add_option("--p-del", spec.rates.p_del, "Deletion rate");
  evaluate_cmd->add_option("--p-ins", spec.rates.p_ins, "Insertion rate");
  evaluate_cmd->add_option("--trials", spec.trials, "Trials per item")->check(CLI::PositiveNumber);
  evaluate_cmd->add_option("--seed", spec.seed, "Injection seed");
  evaluate_cmd->add_option("--single", single,
                           "Inject exactly one error of this kind per attempt")
      ->check(CLI::IsMember({"sub_full", "sub_diacritic", "del", "ins"}));
  evaluate_cmd->add_option("--out", report_path, "Write the JSON report here (default stdout)");

  auto* score = app.add_subcommand("score", "Score a JSONL file of attempts");
  std::string attempts;
  score->add_option("corpus", corpus, "Corpus JSON file");
  score->add_option("--assets", assets, "Asset root");
  score->add_option("--attempts", attempts, "JSONL of {item_id, hypothesis_text} (default stdin)");
  score->add_option("--seed", seed, "Unused; scoring is deterministic");

  CLI11_PARSE(app, argc, argv);

  if (*validate) {
    return cmd_validate(corpus, assets.empty() ? default_assets(corpus) : fs::path(assets),
                        std::cout, std::cerr);
  }

  if (*generate) {
    GenerateOptions opt;
    opt.n = n;
    opt.seed = gen_seed;
    opt.corpus_out = out;
    opt.asset_root = assets.empty() ? default_assets(out) : fs::path(assets);
    if (!base.empty()) {
      try {
        opt.base_items = read_items(base);
      } catch (const Error& e) {
        std::cerr << e.kind() << ": " << e.what() << '\n';
        return 1;
      }
    }
    return cmd_generate(opt, std::cout, std::cerr);
  }

  if (*evaluate_cmd) {
    if (!single.empty()) spec.single = parse_error_kind(single);
    const fs::path asset_root = assets.empty() ? default_assets(corpus) : fs::path(assets);
    if (report_path.empty()) return cmd_evaluate(corpus, asset_root, spec, std::cout, std::cerr, std::cerr);
    std::ofstream json_out(report_path, std::ios::binary);
    if (!json_out) {
      std::cerr << "cannot write " << report_path << '\n';
      return 1;
    }
    return cmd_evaluate(corpus, asset_root, spec, json_out, std::cout, std::cerr);
  }

  if (*score) {
    Corpus c;
    try {
      c = load_corpus(corpus, assets.empty() ? default_assets(corpus) : fs::path(assets));
    } catch (const Error& e) {
      std::cerr << e.kind() << ": " << e.what() << '\n';
      return 1;
    }
    if (attempts.empty()) return cmd_score(c, std::cin, std::cout);
    std::ifstream in(attempts);
    if (!in) {
      std::cerr << "cannot read " << attempts << '\n';
      return 1;
    }
    return cmd_score(c, in, std::cout);
  }
  return 0;
}
