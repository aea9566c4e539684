/*
 * Copyright 2026 The RMFT Toolkit Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "rmft/corpus.hpp"
#include "rmft/csv.hpp"
#include "rmft/errors.hpp"
#include "rmft/pipeline.hpp"
#include "rmft/synth.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInvariant = 3;

struct FlagSpec {
  const char* key;
  const char* flag;
  const char* help;
};

constexpr FlagSpec kFlags[] = {
    {"corpus", "--corpus", "JSONL corpus to split"},
    {"domains", "--domains", "curated host list for masking"},
    {"prompts", "--prompts", "generation prompts (.jsonl strings or one per line)"},
    {"out_dir", "--out-dir", "run directory (default $RMFT_OUT_DIR or rmft_out)"},
    {"seed", "--seed", "master seed"},
    {"split_train", "--split-train", "training split size"},
    {"split_val", "--split-val", "validation split size"},
    {"split_test", "--split-test", "test split size"},
    {"order", "--order", "n-gram order"},
    {"alpha", "--alpha", "additive smoothing constant"},
    {"epochs", "--epochs", "training epochs"},
    {"checkpoints_per_epoch", "--checkpoints-per-epoch", "checkpoints per epoch"},
    {"techniques", "--techniques", "comma-separated subset of baseline,rmft,dedup"},
    {"tau_min", "--tau-min", "first MDP budget"},
    {"tau_max", "--tau-max", "last MDP budget"},
    {"tau_step", "--tau-step", "MDP budget step"},
    {"max_generation_bytes", "--max-generation-bytes", "bytes generated per prompt"},
    {"prompt_window", "--prompt-window", "bytes of context per synthetic prompt"},
    {"top_k", "--top-k", "rows in frequency reports"},
};

std::string fmt(double v) { return rmft::format_double(v); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Email PII masking and memorization evaluation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::size_t jobs = 1;
  std::map<std::string, std::string> flag_values;
  app.add_option("--config", config_path, "key=value config file")->check(CLI::ExistingFile);
  app.add_option("--jobs", jobs, "worker threads (outputs do not depend on it)")
      ->check(CLI::PositiveNumber);
  for (const auto& f : kFlags) app.add_option(f.flag, flag_values[f.key], f.help);

  std::string raw_dir;
  std::string ingest_out;
  std::size_t synthetic = 0;
  std::uint64_t synthetic_seed = 1;
  auto* ingest = app.add_subcommand("ingest", "parse a directory of raw messages into JSONL");
  ingest->add_option("raw_dir", raw_dir, "directory of raw messages");
  ingest->add_option("--out", ingest_out, "output JSONL path")->required();
  ingest->add_option("--synthetic", synthetic,
                     "write N synthetic messages instead of reading raw_dir");
  ingest->add_option("--synthetic-seed", synthetic_seed, "seed for --synthetic");

  auto* eda = app.add_subcommand("eda", "split the corpus and write frequency/overlap reports");
  auto* mask = app.add_subcommand("mask", "mask repeated addresses in the training split");
  auto* dedup = app.add_subcommand("dedup", "strip headers that repeat an address");
  auto* simulate = app.add_subcommand("simulate", "train the proxy model and record checkpoints");
  auto* eval = app.add_subcommand("eval", "compute per-checkpoint leakage and perplexity metrics");
  auto* maxter = app.add_subcommand("maxter", "compute MaxTER curves and AURC");
  auto* report = app.add_subcommand("report", "bundle outputs with a manifest");
  auto* run = app.add_subcommand("run", "run eda through report in order");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (ingest->parsed()) {
      if (synthetic > 0) {
        rmft::SyntheticMailParams params;
        params.messages = synthetic;
        params.top_address_count = std::min(params.top_address_count, synthetic);
        params.message_seed = synthetic_seed;
        rmft::save_corpus(rmft::make_synthetic_mail(params), ingest_out);
        std::cout << "ingest: wrote " << synthetic << " synthetic messages to " << ingest_out
                  << "\n";
        return 0;
      }
      if (raw_dir.empty()) throw rmft::UsageError("ingest needs raw_dir or --synthetic N");
      const auto n = rmft::run_ingest(raw_dir, ingest_out);
      if (n == 0) std::cerr << "warning: no messages found under " << raw_dir << "\n";
      std::cout << "ingest: wrote " << n << " messages to " << ingest_out << "\n";
      return 0;
    }

    rmft::RunConfig config;
    if (const char* env = std::getenv("RMFT_OUT_DIR"); env && *env) config.out_dir = env;
    if (!config_path.empty()) config = rmft::load_config(config_path, config);
    for (const auto& f : kFlags) {
      if (app.get_option(f.flag)->count() > 0) {
        rmft::set_config_value(config, f.key, flag_values[f.key]);
      }
    }
    config.jobs = jobs;

    const bool all = run->parsed();
    if (all || eda->parsed()) {
      const auto r = rmft::run_eda(config);
      std::cout << "eda: train=" << r.train << " val=" << r.val << " test=" << r.test
                << " occurrences=" << r.train_rows << " unique=" << r.train_unique
                << " overlap=" << r.overlap << "\n";
    }
    const auto uses = [&](rmft::Technique t) {
      return std::find(config.techniques.begin(), config.techniques.end(), t) !=
             config.techniques.end();
    };
    if (mask->parsed() || (all && uses(rmft::Technique::Rmft))) {
      const auto r = rmft::run_mask(config);
      std::cout << "mask: rows=" << r.rows << " replaced=" << r.replaced
                << " unique_before=" << r.unique_before << " unique_after=" << r.unique_after
                << "\n";
    }
    if (dedup->parsed() || (all && uses(rmft::Technique::Dedup))) {
      const auto r = rmft::run_dedup(config);
      std::cout << "dedup: removed_headers=" << r.removed_headers.size() << " retained=" << r.retained
                << " emails_eliminated=" << r.emails_eliminated.size() << "\n";
    }
    if (all || simulate->parsed()) {
      const auto n = rmft::run_simulate(config);
      std::cout << "simulate: prompts=" << n << " checkpoints="
                << config.epochs * config.checkpoints_per_epoch << "\n";
    }
    if (all || eval->parsed()) {
      for (const auto& row : rmft::run_eval(config)) {
        std::cout << "eval: " << row.technique << " ppl=" << fmt(row.ppl) << " ter=" << fmt(row.ter)
                  << " ser=" << fmt(row.ser) << "\n";
      }
    }
    if (all || maxter->parsed()) {
      for (const auto& r : rmft::run_maxter(config)) {
        std::cout << "maxter: " << r.technique << " aurc=" << fmt(r.aurc.area)
                  << " feasible=" << fmt(r.aurc.feasible_fraction) << "\n";
      }
    }
    if (all || report->parsed()) {
      const auto r = rmft::run_report(config);
      std::cout << "report: files=" << r.files.size() << " gaps=" << r.gaps.size() << "\n";
      for (const auto& g : r.gaps) std::cerr << "warning: stage '" << g << "' has missing outputs\n";
    }
    return 0;
  } catch (const rmft::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const rmft::InvariantError& e) {
    std::cerr << "invariant violated: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}
