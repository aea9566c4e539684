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

#include "rmft/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "rmft/csv.hpp"
#include "rmft/errors.hpp"
#include "rmft/masker.hpp"
#include "rmft/memproxy.hpp"
#include "rmft/rng.hpp"
#include "rmft/synth.hpp"

namespace rmft {

namespace fs = std::filesystem;

namespace {

// Stream tags that keep each stage's randomness independent.
constexpr std::uint64_t kMaskStream = 1;
constexpr std::uint64_t kScheduleStream = 2;

std::size_t parse_size(std::string_view key, std::string_view v) {
  std::size_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw UsageError("config key '" + std::string(key) + "' expects an unsigned integer, got '" +
                     std::string(v) + "'");
  }
  return out;
}

double parse_real(std::string_view key, std::string_view v) {
  try {
    return parse_double(v);
  } catch (const DomainError&) {
    throw UsageError("config key '" + std::string(key) + "' expects a number, got '" +
                     std::string(v) + "'");
  }
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string optional_size(const std::optional<std::size_t>& v) {
  return v ? std::to_string(*v) : std::string();
}

std::string write_to_string(const std::function<void(std::ostream&)>& fn) {
  std::ostringstream ss;
  fn(ss);
  return ss.str();
}

void emit(const fs::path& path, const std::function<void(std::ostream&)>& fn) {
  write_file(path, write_to_string(fn));
}

const fs::path& require(const fs::path& path, std::string_view producer) {
  if (!fs::exists(path)) {
    throw IoError("missing " + path.string() + "; run `rmft " + std::string(producer) +
                  "` first");
  }
  return path;
}

bool uses(const RunConfig& config, Technique t) {
  return std::find(config.techniques.begin(), config.techniques.end(), t) !=
         config.techniques.end();
}

std::vector<std::string> load_prompts(const fs::path& path) {
  const auto contents = normalize_newlines(read_file(path));
  std::vector<std::string> prompts;
  const bool jsonl = path.extension() == ".jsonl";
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < contents.size()) {
    auto nl = contents.find('\n', pos);
    if (nl == std::string::npos) nl = contents.size();
    std::string line = contents.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line.empty()) continue;
    if (!jsonl) {
      prompts.push_back(std::move(line));
      continue;
    }
    try {
      prompts.push_back(nlohmann::json::parse(line).get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(path.string(), line_no, e.what());
    }
  }
  return prompts;
}

void write_frequency_csv(const IndexTable& table, std::size_t k, const fs::path& path) {
  emit(path, [&](std::ostream& out) {
    write_csv_row(out, {"rank", "email", "count"});
    std::size_t rank = 0;
    for (const auto& e : frequency_report(table, k)) {
      write_csv_row(out, {std::to_string(++rank), e.email.canonical(), std::to_string(e.count)});
    }
  });
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string_view technique_name(Technique t) {
  switch (t) {
    case Technique::Baseline: return "baseline";
    case Technique::Rmft: return "rmft";
    case Technique::Dedup: return "dedup";
  }
  return "baseline";
}

std::optional<Technique> parse_technique(std::string_view name) {
  if (name == "baseline") return Technique::Baseline;
  if (name == "rmft") return Technique::Rmft;
  if (name == "dedup") return Technique::Dedup;
  return std::nullopt;
}

std::string serialize_config(const RunConfig& c) {
  std::map<std::string, std::string> kv;
  kv["alpha"] = format_double(c.alpha);
  kv["checkpoints_per_epoch"] = std::to_string(c.checkpoints_per_epoch);
  kv["corpus"] = c.corpus.generic_string();
  kv["domains"] = c.domains.generic_string();
  kv["epochs"] = std::to_string(c.epochs);
  kv["max_generation_bytes"] = std::to_string(c.max_generation_bytes);
  kv["order"] = std::to_string(c.order);
  kv["out_dir"] = c.out_dir.generic_string();
  kv["prompt_window"] = std::to_string(c.prompt_window);
  kv["prompts"] = c.prompts.generic_string();
  kv["seed"] = std::to_string(c.seed);
  kv["split_test"] = optional_size(c.split_test);
  kv["split_train"] = optional_size(c.split_train);
  kv["split_val"] = optional_size(c.split_val);
  kv["tau_max"] = format_double(c.tau_max);
  kv["tau_min"] = format_double(c.tau_min);
  kv["tau_step"] = format_double(c.tau_step);
  std::string techniques;
  for (auto t : c.techniques) {
    if (!techniques.empty()) techniques += ',';
    techniques += technique_name(t);
  }
  kv["techniques"] = techniques;
  kv["top_k"] = std::to_string(c.top_k);
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

void set_config_value(RunConfig& c, std::string_view key, std::string_view value) {
  const std::string v = trim(value);
  auto opt_size = [&]() -> std::optional<std::size_t> {
    if (v.empty()) return std::nullopt;
    return parse_size(key, v);
  };
  if (key == "alpha") c.alpha = parse_real(key, v);
  else if (key == "checkpoints_per_epoch") c.checkpoints_per_epoch = parse_size(key, v);
  else if (key == "corpus") c.corpus = v;
  else if (key == "domains") c.domains = v;
  else if (key == "epochs") c.epochs = parse_size(key, v);
  else if (key == "jobs") c.jobs = parse_size(key, v);
  else if (key == "max_generation_bytes") c.max_generation_bytes = parse_size(key, v);
  else if (key == "order") c.order = parse_size(key, v);
  else if (key == "out_dir") c.out_dir = v;
  else if (key == "prompt_window") c.prompt_window = parse_size(key, v);
  else if (key == "prompts") c.prompts = v;
  else if (key == "seed") c.seed = parse_size(key, v);
  else if (key == "split_test") c.split_test = opt_size();
  else if (key == "split_train") c.split_train = opt_size();
  else if (key == "split_val") c.split_val = opt_size();
  else if (key == "tau_max") c.tau_max = parse_real(key, v);
  else if (key == "tau_min") c.tau_min = parse_real(key, v);
  else if (key == "tau_step") c.tau_step = parse_real(key, v);
  else if (key == "top_k") c.top_k = parse_size(key, v);
  else if (key == "techniques") {
    std::vector<Technique> ts;
    std::size_t pos = 0;
    while (pos <= v.size()) {
      auto comma = v.find(',', pos);
      if (comma == std::string::npos) comma = v.size();
      const auto name = trim(std::string_view(v).substr(pos, comma - pos));
      pos = comma + 1;
      if (name.empty()) continue;
      auto t = parse_technique(name);
      if (!t) throw UsageError("unknown technique '" + name + "'");
      if (std::find(ts.begin(), ts.end(), *t) == ts.end()) ts.push_back(*t);
    }
    if (ts.empty()) throw UsageError("techniques must name at least one technique");
    c.techniques = std::move(ts);
  } else {
    throw UsageError("unknown config key '" + std::string(key) + "'");
  }
}

RunConfig parse_config(std::string_view text, RunConfig base) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    set_config_value(base, trim(std::string_view(line).substr(0, eq)),
                     std::string_view(line).substr(eq + 1));
  }
  return base;
}

RunConfig load_config(const fs::path& path, RunConfig base) {
  return parse_config(read_file(path), std::move(base));
}

fs::path RunLayout::training_corpus(Technique t) const {
  switch (t) {
    case Technique::Baseline: return split("train");
    case Technique::Rmft: return rmft("train.jsonl");
    case Technique::Dedup: return dedup("train.jsonl");
  }
  return split("train");
}

fs::path RunLayout::artifacts(Technique t) const {
  return simulate(std::string(technique_name(t)) + ".jsonl");
}

fs::path RunLayout::series(Technique t) const {
  return eval(std::string(technique_name(t)) + "_series.csv");
}

std::size_t run_ingest(const fs::path& raw_dir, const fs::path& out) {
  if (!fs::is_directory(raw_dir)) throw IoError("not a directory: " + raw_dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(raw_dir)) {
    if (entry.is_regular_file()) files.push_back(fs::relative(entry.path(), raw_dir));
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.generic_string() < b.generic_string(); });
  std::vector<std::string> texts;
  texts.reserve(files.size());
  for (const auto& f : files) texts.push_back(normalize_newlines(read_file(raw_dir / f)));
  const auto corpus = Corpus::from_texts(raw_dir.filename().string(), std::move(texts));
  save_corpus(corpus, out);
  return corpus.size();
}

EdaResult run_eda(const RunConfig& config) {
  if (config.corpus.empty()) throw UsageError("no corpus configured (set corpus=...)");
  const RunLayout layout{config.out_dir};
  const auto corpus = load_corpus(config.corpus);
  auto spec = SplitSpec::from_ratio(corpus.size(), config.seed);
  if (config.split_train) spec.train_n = *config.split_train;
  if (config.split_val) spec.val_n = *config.split_val;
  if (config.split_test) spec.test_n = *config.split_test;
  const auto splits = split_corpus(corpus, spec);
  save_corpus(splits.train, layout.split("train"));
  save_corpus(splits.val, layout.split("val"));
  save_corpus(splits.test, layout.split("test"));

  const auto train_table = build_index_table(splits.train, config.jobs);
  const auto test_table = build_index_table(splits.test, config.jobs);
  write_frequency_csv(train_table, config.top_k, layout.eda("frequency_train.csv"));
  write_frequency_csv(test_table, config.top_k, layout.eda("frequency_test.csv"));
  emit(layout.eda("index_train.csv"), [&](std::ostream& out) { write_index_csv(train_table, out); });

  std::map<EmailAddress, std::pair<std::size_t, std::size_t>> counts;
  for (const auto& r : train_table) ++counts[r.email].first;
  for (const auto& r : test_table) ++counts[r.email].second;
  EdaResult result{splits.train.size(), splits.val.size(), splits.test.size(), train_table.size(),
                   unique_emails(train_table).size(), 0};
  emit(layout.eda("split_overlap.csv"), [&](std::ostream& out) {
    write_csv_row(out, {"email", "train_count", "test_count"});
    for (const auto& [email, c] : counts) {
      if (c.first == 0 || c.second == 0) continue;
      ++result.overlap;
      write_csv_row(out, {email.canonical(), std::to_string(c.first), std::to_string(c.second)});
    }
  });
  write_file(layout.config(), serialize_config(config));
  return result;
}

MaskResult run_mask(const RunConfig& config) {
  const RunLayout layout{config.out_dir};
  const auto train = load_corpus(require(layout.split("train"), "eda"));
  const auto table = build_index_table(train, config.jobs);
  const auto extra =
      config.domains.empty() ? default_domain_list() : load_domain_list(config.domains);
  // A split without addresses has nothing to mask and no parts to draw from.
  MaskPlan plan;
  if (!table.empty()) {
    plan = plan_masks(table, build_part_stores(table, extra), stream_seed(config.seed, kMaskStream));
  }
  const auto masked = apply_masks(train, plan, config.jobs);

  const auto after = build_index_table(masked.corpus, config.jobs);
  if (after.size() != table.size()) {
    throw InvariantError("masking changed the occurrence count from " +
                         std::to_string(table.size()) + " to " + std::to_string(after.size()));
  }
  const auto top = frequency_report(after, 1);
  if (!top.empty() && top[0].count > 1) {
    throw InvariantError("masked corpus still repeats " + top[0].email.canonical() + " (" +
                         std::to_string(top[0].count) + " times)");
  }

  save_corpus(masked.corpus, layout.rmft("train.jsonl"));
  emit(layout.rmft("plan.csv"), [&](std::ostream& out) { write_mask_plan_csv(plan, out); });
  emit(layout.rmft("provenance.jsonl"),
       [&](std::ostream& out) { write_provenance_jsonl(masked.provenance, out); });
  write_file(layout.config(), serialize_config(config));
  return {table.size(), plan.replace_count(), unique_emails(table).size(),
          unique_emails(after).size()};
}

DedupReport run_dedup(const RunConfig& config) {
  const RunLayout layout{config.out_dir};
  const auto train = load_corpus(require(layout.split("train"), "eda"));
  const auto table = build_index_table(train, config.jobs);
  auto [deduped, report] = dedup_corpus(train, table);

  const auto headers = build_index_table(deduped, config.jobs).header_rows();
  const auto top = frequency_report(headers, 1);
  if (!top.empty() && top[0].count > 1) {
    throw InvariantError("deduplicated headers still repeat " + top[0].email.canonical());
  }
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (train[i].body() != deduped[i].body()) {
      throw InvariantError("deduplication changed the body of datapoint " + std::to_string(i));
    }
  }

  save_corpus(deduped, layout.dedup("train.jsonl"));
  emit(layout.dedup("report.json"), [&](std::ostream& out) { write_dedup_report_json(report, out); });
  write_file(layout.config(), serialize_config(config));
  return report;
}

std::size_t run_simulate(const RunConfig& config) {
  const RunLayout layout{config.out_dir};
  const auto test = load_corpus(require(layout.split("test"), "eda"));
  const auto prompts = config.prompts.empty()
                           ? make_extraction_prompts(test, config.prompt_window)
                           : load_prompts(config.prompts);
  emit(layout.simulate("prompts.jsonl"), [&](std::ostream& out) {
    for (const auto& p : prompts) {
      out << nlohmann::json(p).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace)
          << '\n';
    }
  });

  std::vector<std::string> ppl_texts;
  for (const auto& dp : test) {
    if (dp.full_text().size() >= config.order) ppl_texts.push_back(dp.full_text());
  }
  if (ppl_texts.empty()) {
    throw DomainError("no held-out message is long enough to score perplexity");
  }

  const CheckpointSchedule sched{config.epochs, config.checkpoints_per_epoch,
                                 stream_seed(config.seed, kScheduleStream)};
  SimulationInputs inputs{prompts, ppl_texts, config.max_generation_bytes, config.jobs};
  for (auto t : config.techniques) {
    const char* producer = t == Technique::Baseline ? "eda" : t == Technique::Rmft ? "mask" : "dedup";
    const auto corpus = load_corpus(require(layout.training_corpus(t), producer));
    const auto artifacts = simulate_checkpoints(corpus, sched, config.order, config.alpha, inputs);
    emit(layout.artifacts(t), [&](std::ostream& out) { write_artifacts_jsonl(artifacts, out); });
  }
  write_file(layout.config(), serialize_config(config));
  return prompts.size();
}

std::vector<SummaryRow> run_eval(const RunConfig& config) {
  const RunLayout layout{config.out_dir};
  const auto train = load_corpus(require(layout.split("train"), "eda"));
  OriginalEmailSet og{unique_emails(build_index_table(train, config.jobs))};
  const auto baseline = read_artifacts_jsonl(require(layout.artifacts(Technique::Baseline),
                                                     "simulate"));
  std::vector<SummaryRow> summary;
  for (auto t : config.techniques) {
    const auto artifacts = t == Technique::Baseline
                               ? baseline
                               : read_artifacts_jsonl(require(layout.artifacts(t), "simulate"));
    const auto table = build_index_table(load_corpus(layout.training_corpus(t)), config.jobs);
    const auto series = evaluate_series(artifacts, baseline, table, og);
    emit(layout.series(t), [&](std::ostream& out) { write_series_csv(series, out); });
    summary.push_back(summarize(std::string(technique_name(t)), series));
  }
  emit(layout.eval("summary.csv"), [&](std::ostream& out) { write_summary_csv(summary, out); });
  write_file(layout.config(), serialize_config(config));
  return summary;
}

std::vector<MaxTERResult> run_maxter(const RunConfig& config) {
  const RunLayout layout{config.out_dir};
  const auto baseline = read_series_csv(require(layout.series(Technique::Baseline), "eval"));
  const auto grid = make_tau_grid(config.tau_min, config.tau_max, config.tau_step);
  auto mean_ppl = [](const std::vector<CheckpointMetrics>& s) {
    double sum = 0.0;
    for (const auto& m : s) sum += m.avg_ppl;
    return s.empty() ? 0.0 : sum / static_cast<double>(s.size());
  };

  std::vector<MaxTERResult> results;
  std::vector<TradeoffPoint> all_points;
  for (auto t : config.techniques) {
    if (t == Technique::Baseline) continue;
    const auto name = std::string(technique_name(t));
    const auto series = read_series_csv(require(layout.series(t), "eval"));
    auto points = tradeoff_points(name, series, baseline);
    MaxTERResult r;
    r.technique = name;
    r.curve = maxter_curve(points, grid);
    r.aurc = aurc(r.curve);
    r.avg_ppl = mean_ppl(series);
    emit(layout.maxter(name + "_curve.csv"), [&](std::ostream& out) { write_curve_csv(r.curve, out); });
    all_points.insert(all_points.end(), points.begin(), points.end());
    results.push_back(std::move(r));
  }
  emit(layout.maxter("points.csv"), [&](std::ostream& out) { write_points_csv(all_points, out); });
  emit(layout.maxter("aurc.csv"), [&](std::ostream& out) {
    write_csv_row(out, {"technique", "heldout_avg_ppl", "heldout_aurc", "feasible_fraction"});
    write_csv_row(out, {"baseline", format_double(mean_ppl(baseline)), "-", "-"});
    for (const auto& r : results) {
      write_csv_row(out, {r.technique, format_double(r.avg_ppl), format_double(r.aurc.area),
                          format_double(r.aurc.feasible_fraction)});
    }
  });
  write_file(layout.config(), serialize_config(config));
  return results;
}

ReportResult run_report(const RunConfig& config) {
  const RunLayout layout{config.out_dir};
  std::vector<std::pair<std::string, std::vector<fs::path>>> stages;
  stages.push_back({"eda",
                    {layout.eda("frequency_train.csv"), layout.eda("frequency_test.csv"),
                     layout.eda("split_overlap.csv"), layout.eda("index_train.csv")}});
  if (uses(config, Technique::Rmft)) {
    stages.push_back({"mask", {layout.rmft("plan.csv"), layout.rmft("provenance.jsonl")}});
  }
  if (uses(config, Technique::Dedup)) {
    stages.push_back({"dedup", {layout.dedup("report.json")}});
  }
  std::vector<fs::path> sim{layout.simulate("prompts.jsonl")};
  std::vector<fs::path> ev{layout.eval("summary.csv")};
  std::vector<fs::path> mx{layout.maxter("points.csv"), layout.maxter("aurc.csv")};
  for (auto t : config.techniques) {
    sim.push_back(layout.artifacts(t));
    ev.push_back(layout.series(t));
    if (t != Technique::Baseline) {
      mx.push_back(layout.maxter(std::string(technique_name(t)) + "_curve.csv"));
    }
  }
  stages.push_back({"simulate", sim});
  stages.push_back({"eval", ev});
  stages.push_back({"maxter", mx});

  const fs::path report_dir = layout.report();
  fs::remove_all(report_dir);
  fs::create_directories(report_dir);

  ReportResult result;
  nlohmann::ordered_json manifest;
  manifest["generated_at"] = utc_timestamp();
  auto files = nlohmann::ordered_json::array();
  auto gaps = nlohmann::ordered_json::array();

  auto add_file = [&](const std::string& stage, const fs::path& src) {
    const auto rel = fs::relative(src, layout.root).generic_string();
    const auto contents = read_file(src);
    write_file(report_dir / rel, contents);
    char hash[17];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(contents)));
    files.push_back({{"path", rel}, {"stage", stage}, {"bytes", contents.size()},
                     {"fnv1a64", hash}});
    result.files.push_back(rel);
  };

  if (fs::exists(layout.config())) add_file("config", layout.config());
  for (const auto& [stage, paths] : stages) {
    std::vector<std::string> missing;
    for (const auto& p : paths) {
      if (fs::exists(p)) {
        add_file(stage, p);
      } else {
        missing.push_back(fs::relative(p, layout.root).generic_string());
      }
    }
    if (!missing.empty()) {
      gaps.push_back({{"stage", stage}, {"missing", missing}});
      result.gaps.push_back(stage);
    }
  }
  manifest["files"] = std::move(files);
  manifest["gaps"] = std::move(gaps);
  write_file(report_dir / "manifest.json", manifest.dump(2) + "\n");
  return result;
}

}  // namespace rmft
