#include "sarges/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>

#include <CLI11.hpp>

#include "sarges/batch.hpp"
#include "sarges/dataset.hpp"
#include "sarges/eval.hpp"
#include "sarges/ethogram.hpp"
#include "sarges/intent_chain.hpp"
#include "sarges/sidecar.hpp"
#include "sarges/utf8.hpp"

namespace sarges::cli {
namespace {

struct UsageError : Error {
  using Error::Error;
};

enum class Format { Human, Structured };

struct CliConfig {
  std::string ethogram_path;
  std::string backend_kind;
  std::string endpoint;
  std::string transcripts;
  std::string record_dir;
  std::string profile_path;
  std::string model = "gpt-4";
  std::string prompt_price = "0";
  std::string completion_price = "0";
  std::string currency = "USD";
  std::string timestamp;
  int reflect = 0;
  int max_per_sentence = 2;
  int parallel = 1;
  long timeout_ms = 60000;
  double temperature = 0.0;
  bool timings = false;
  Format format = Format::Human;
};

// Backend selected by CliConfig, optionally wrapped in a recorder.
class BackendHandle {
 public:
  explicit BackendHandle(const CliConfig& c) {
    if (c.backend_kind == "scripted") {
      if (c.transcripts.empty()) throw UsageError("--backend scripted requires --transcripts DIR");
      base_ = std::make_unique<ScriptedBackend>(c.transcripts);
    } else if (c.backend_kind == "remote") {
      if (c.endpoint.empty()) throw UsageError("--backend remote requires --endpoint URL");
      RemoteEndpointBackend::Options o;
      o.url = c.endpoint;
      if (const char* key = std::getenv("SARGES_API_KEY")) o.api_key = key;
      o.capability.model_name = c.model;
      o.capability.prompt_price = parse_rational(c.prompt_price);
      o.capability.completion_price = parse_rational(c.completion_price);
      o.capability.currency = c.currency;
      base_ = std::make_unique<RemoteEndpointBackend>(std::move(o));
    } else if (c.backend_kind.empty()) {
      throw UsageError("select a backend with --backend remote|scripted");
    } else {
      throw UsageError("unknown backend '" + c.backend_kind + "'");
    }
    if (!c.record_dir.empty()) recorder_ = std::make_unique<RecordingBackend>(*base_, c.record_dir);
  }

  ChatBackend& get() { return recorder_ ? *recorder_ : *base_; }

 private:
  std::unique_ptr<ChatBackend> base_;
  std::unique_ptr<ChatBackend> recorder_;
};

Ethogram require_ethogram(const CliConfig& c) {
  if (c.ethogram_path.empty()) throw UsageError("--ethogram PATH is required");
  return load_ethogram_file(c.ethogram_path);
}

ChainConfig chain_config(const CliConfig& c) {
  ChainConfig cfg;
  cfg.max_reflection_rounds = c.reflect;
  cfg.max_labels_per_sentence = c.max_per_sentence;
  cfg.backend_timeout = std::chrono::milliseconds(c.timeout_ms);
  cfg.temperature = c.temperature;
  cfg.check();
  return cfg;
}

CharacterProfile load_profile(const CliConfig& c) {
  if (c.profile_path.empty()) return CharacterProfile::default_host();
  const auto text = read_text_file(c.profile_path);
  try {
    return CharacterProfile::from_json(Json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw Error("profile '" + c.profile_path + "': " + e.what());
  }
}

// Splits on '\n'; a final newline does not produce an extra empty line.
std::vector<std::string> split_lines(std::string_view s) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < s.size()) {
    auto nl = s.find('\n', pos);
    if (nl == std::string_view::npos) nl = s.size();
    lines.emplace_back(s.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return lines;
}

void emit(std::ostream& out, const std::string& path, const std::string& content) {
  if (path.empty()) {
    out << content;
  } else {
    write_text_file(path, content);
  }
}

Json usage_record(const TokenUsage& u, bool timings) {
  Json j;
  j["requests"] = u.request_count;
  j["prompt_tokens"] = u.prompt_tokens;
  j["completion_tokens"] = u.completion_tokens;
  j["cost"] = to_string(u.cost);
  if (timings) j["seconds"] = u.total_seconds;
  return j;
}

int cmd_ethogram_validate(const CliConfig& c, const std::string& path, std::ostream& out) {
  const auto text = read_text_file(path);
  Diagnostics diags;
  std::size_t count = 0;
  try {
    const auto entries = parse_ethogram_document(text);
    count = entries.size();
    diags = validate_entries(entries);
  } catch (const EthogramError& e) {
    diags.push_back({Severity::Error, "malformed-document", path, e.what()});
  }
  const bool ok = !has_errors(diags);
  if (c.format == Format::Structured) {
    Json j;
    j["path"] = path;
    j["valid"] = ok;
    j["entries"] = count;
    Json arr = Json::array();
    for (const auto& d : diags) {
      arr.push_back({{"severity", to_string(d.severity)},
                     {"code", d.code},
                     {"locus", d.locus},
                     {"message", d.message}});
    }
    j["diagnostics"] = std::move(arr);
    out << j.dump() << "\n";
  } else {
    for (const auto& d : diags) out << d << "\n";
    if (ok) out << "ok: " << count << " entries\n";
  }
  return ok ? kOk : kDomainError;
}

int cmd_annotate(const CliConfig& c, const std::vector<std::string>& text_args,
                 const std::string& input_path, const std::string& output_path,
                 const std::string& labels_out, std::ostream& out, std::ostream& err) {
  std::vector<std::string> units;
  if (!input_path.empty()) {
    if (!text_args.empty()) throw UsageError("give either TEXT or --input, not both");
    for (auto& line : split_lines(read_text_file(input_path))) {
      if (!utf8::trim(line).empty()) units.push_back(utf8::trim(line));
    }
    if (units.empty()) throw Error("input file '" + input_path + "' contains no text");
  } else {
    std::string joined;
    for (const auto& t : text_args) joined += (joined.empty() ? "" : " ") + t;
    if (utf8::trim(joined).empty()) throw EmptyText();
    units.push_back(utf8::trim(joined));
  }
  for (const auto& u : units) {
    if (!utf8::is_valid(u)) throw EncodingError("input is not valid UTF-8", 0);
  }

  const auto ethogram = require_ethogram(c);
  const auto cfg = chain_config(c);
  const auto profile = load_profile(c);
  BackendHandle backend(c);
  const auto outcomes = run_batch(units, profile, ethogram, backend.get(), cfg, c.parallel);

  std::string stdout_text;
  std::string sidecar;
  int status = kOk;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& o = outcomes[i];
    if (!o.ok()) {
      err << "error: unit " << i + 1 << ": " << o.error << "\n";
      status = kDomainError;
      continue;
    }
    for (const auto& w : o.result->warnings) err << "warning: unit " << i + 1 << ": " << w << "\n";
    const auto inline_text = render_inline(o.result->result);
    auto rec = sidecar_record(o.result->result);
    rec["usage"] = usage_record(o.result->usage, c.timings);
    if (c.format == Format::Structured) {
      Json j;
      j["text"] = o.result->result.clean_text;
      j["output"] = inline_text;
      j["labels"] = rec["labels"];
      Json reports = Json::array();
      for (const auto& r : o.result->reports) reports.push_back(report_to_json(r));
      j["reports"] = std::move(reports);
      j["usage"] = rec["usage"];
      stdout_text += j.dump() + "\n";
    } else {
      stdout_text += inline_text + "\n";
    }
    sidecar += rec.dump() + "\n";
  }
  emit(out, output_path, stdout_text);
  if (!labels_out.empty()) write_text_file(labels_out, sidecar);
  return status;
}

int cmd_parse(const CliConfig& c, const std::string& path, const std::string& output_path,
              std::ostream& out) {
  const auto text = read_text_file(path);
  std::string sidecar;
  std::ostringstream table;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    AnnotatedText a;
    try {
      a = parse_inline(lines[i]);
    } catch (const MalformedMarker& e) {
      throw Error(path + ":" + std::to_string(i + 1) + ":" + std::to_string(e.char_offset() + 1) +
                  ": " + e.what());
    } catch (const EncodingError& e) {
      throw Error(path + ":" + std::to_string(i + 1) + ": " + e.what());
    }
    sidecar += sidecar_record(a).dump() + "\n";
    table << "line " << i + 1 << ": " << a.labels.size() << " label(s)\n";
    for (const auto& l : a.labels) {
      table << "  " << std::left << std::setw(8) << l.gesture_id << " start " << std::setw(5)
            << l.start_char << " duration " << std::setw(4) << l.duration_chars << " "
            << l.description << "\n";
    }
  }
  if (!output_path.empty()) write_text_file(output_path, sidecar);
  out << (c.format == Format::Structured ? sidecar : table.str());
  return kOk;
}

int cmd_render(const CliConfig& c, const std::string& path, const std::string& output_path,
               std::ostream& out) {
  const auto records = read_jsonl_file(path);
  std::string text;
  std::string structured;
  for (std::size_t i = 0; i < records.size(); ++i) {
    AnnotatedText a;
    try {
      a = sidecar_from_json(records[i]);
    } catch (const Error& e) {
      throw Error(path + ": record " + std::to_string(i + 1) + ": " + e.what());
    }
    const auto line = render_inline(a);
    text += line + "\n";
    structured += Json{{"output", line}}.dump() + "\n";
  }
  emit(out, output_path, c.format == Format::Structured && output_path.empty() ? structured : text);
  return kOk;
}

void print_stats(const CliConfig& c, const DatasetStats& s, std::ostream& out) {
  if (c.format == Format::Structured) {
    out << stats_to_json(s).dump() << "\n";
    return;
  }
  out << "records: " << s.record_count << "\n"
      << "labels: " << s.label_count << "\n"
      << "sentences: " << s.sentence_count << "\n"
      << "mean labels per sentence: " << std::fixed << std::setprecision(4)
      << s.mean_labels_per_sentence << "\n";
  out.unsetf(std::ios::floatfield);
  out << "per gesture:\n";
  for (const auto& [id, n] : s.per_gesture) out << "  " << std::left << std::setw(8) << id << n << "\n";
  out << "per emotion:\n";
  for (auto e : kAllEmotions) {
    auto it = s.per_emotion.find(e);
    out << "  " << std::left << std::setw(8) << to_string(e)
        << (it == s.per_emotion.end() ? 0 : it->second) << "\n";
  }
  out << "  " << std::left << std::setw(8) << "(none)" << s.unresolved << "\n";
}

int cmd_dataset_build(const CliConfig& c, const std::string& corpus_path,
                      const std::string& output_path, std::ostream& out, std::ostream& err) {
  if (output_path.empty()) throw UsageError("dataset build requires --output PATH");
  const auto corpus = ingest_corpus(read_text_file(corpus_path));
  const auto ethogram = require_ethogram(c);
  const auto profile = load_profile(c);
  BackendHandle backend(c);
  std::string stamp = c.timestamp;
  if (stamp.empty()) stamp = c.backend_kind == "scripted" ? "1970-01-01T00:00:00Z" : now_utc_iso8601();
  BuildInputs in{profile, ethogram, backend.get(), chain_config(c), c.parallel, stamp};
  const auto result = build_dataset(corpus, in);
  for (const auto& s : result.skipped) {
    err << "warning: skipped unit " << s.index + 1 << " (" << s.unit << "): " << s.reason << "\n";
  }
  write_dataset_file(output_path, result.records);
  print_stats(c, dataset_stats(result.records, &ethogram), out);
  return kOk;
}

int cmd_dataset_stats(const CliConfig& c, const std::string& path, std::ostream& out) {
  const auto d = read_dataset_file(path);
  std::optional<Ethogram> e;
  if (!c.ethogram_path.empty()) e = load_ethogram_file(c.ethogram_path);
  print_stats(c, dataset_stats(d, e ? &*e : nullptr), out);
  return kOk;
}

std::vector<AnnotatedText> read_sidecars(const std::string& path, std::vector<Json>& raw) {
  raw = read_jsonl_file(path);
  std::vector<AnnotatedText> out;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    try {
      out.push_back(sidecar_from_json(raw[i]));
    } catch (const Error& e) {
      throw Error(path + ": record " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

int cmd_eval(const CliConfig& c, const std::string& gold_path, const std::string& pred_path,
             const std::string& report_out, std::ostream& out, std::ostream& err) {
  const auto ethogram = require_ethogram(c);
  std::vector<Json> gold_raw, pred_raw;
  const auto gold = read_sidecars(gold_path, gold_raw);
  const auto pred = read_sidecars(pred_path, pred_raw);
  if (gold.size() != pred.size()) {
    throw Error("case count mismatch: " + std::to_string(gold.size()) + " gold vs " +
                std::to_string(pred.size()) + " predicted");
  }
  std::vector<EvalCase> cases;
  std::vector<CaseUsage> usage;
  bool any_usage = false;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i].clean_text != pred[i].clean_text) {
      err << "warning: case " << i + 1 << ": gold and predicted texts differ\n";
    }
    cases.push_back({gold[i].clean_text, gold[i].labels, pred[i].labels});
    CaseUsage u;
    if (auto it = pred_raw[i].find("usage"); it != pred_raw[i].end() && it->is_object()) {
      any_usage = true;
      u.seconds = it->value("seconds", 0.0);
      u.prompt_tokens = it->value("prompt_tokens", std::int64_t{0});
      u.completion_tokens = it->value("completion_tokens", std::int64_t{0});
      u.cost = parse_rational(it->value("cost", std::string("0")));
    }
    usage.push_back(u);
  }
  const auto report = evaluate(cases, ethogram, any_usage ? std::span<const CaseUsage>(usage)
                                                          : std::span<const CaseUsage>{},
                               c.currency);
  for (const auto& w : report.warnings) err << "warning: " << w << "\n";
  if (!report.defined()) throw ZeroGold();
  if (!report_out.empty()) write_text_file(report_out, report_to_json(report).dump(2) + "\n");
  out << (c.format == Format::Structured ? report_to_json(report).dump() + "\n"
                                         : report_table(report));
  return kOk;
}

int cmd_compare(const CliConfig& c, const std::string& a_path, const std::string& b_path,
                std::ostream& out) {
  auto load = [](const std::string& p) {
    try {
      return report_from_json(Json::parse(read_text_file(p)));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(p + ": " + e.what());
    }
  };
  const auto a = load(a_path);
  const auto b = load(b_path);
  const auto table = compare_reports(a, b, std::filesystem::path(a_path).stem().string(),
                                     std::filesystem::path(b_path).stem().string());
  if (c.format == Format::Structured) {
    Json j;
    j["a"] = a_path;
    j["b"] = b_path;
    j["partial_overlap_a"] = to_decimal(a.partial_overlap(), 4);
    j["partial_overlap_b"] = to_decimal(b.partial_overlap(), 4);
    j["delta"] = to_decimal(b.partial_overlap() - a.partial_overlap(), 4);
    out << j.dump() << "\n";
  } else {
    out << table;
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Co-speech gesture labeling toolkit", "sarges"};
  app.fallthrough();
  app.require_subcommand(1);

  CliConfig c;
  std::string format = "human";
  app.add_option("--ethogram", c.ethogram_path, "Ethogram document");
  app.add_option("--backend", c.backend_kind, "Chat backend")
      ->check(CLI::IsMember({"remote", "scripted"}));
  app.add_option("--endpoint", c.endpoint, "Chat-completion endpoint URL (remote backend)");
  app.add_option("--transcripts", c.transcripts, "Transcript directory (scripted backend)");
  app.add_option("--record", c.record_dir, "Record every exchange into DIR as transcripts");
  app.add_option("--profile", c.profile_path, "Character profile JSON");
  app.add_option("--model", c.model, "Model name sent to the remote backend");
  app.add_option("--prompt-price", c.prompt_price, "Price per prompt token, e.g. 3/100000");
  app.add_option("--completion-price", c.completion_price, "Price per completion token");
  app.add_option("--currency", c.currency, "Currency label for cost reports");
  app.add_option("--reflect", c.reflect, "Self-reflection rounds (0 disables)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--max-per-sentence", c.max_per_sentence, "Gesture cap per sentence")
      ->check(CLI::PositiveNumber);
  app.add_option("--parallel", c.parallel, "Concurrent chain runs")->check(CLI::PositiveNumber);
  app.add_option("--timeout-ms", c.timeout_ms, "Backend request timeout")->check(CLI::PositiveNumber);
  app.add_option("--temperature", c.temperature, "Sampling temperature passed to the backend");
  app.add_option("--timestamp", c.timestamp, "Provenance timestamp for dataset records");
  app.add_flag("--timings", c.timings, "Include wall-clock seconds in outputs");
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"human", "structured"}));

  std::function<int()> action;

  auto* etho = app.add_subcommand("ethogram", "Ethogram tools");
  etho->require_subcommand(1);
  auto* validate_cmd = etho->add_subcommand("validate", "Validate an ethogram document");
  std::string validate_path;
  validate_cmd->add_option("path", validate_path)->required();
  validate_cmd->callback([&] { action = [&] { return cmd_ethogram_validate(c, validate_path, out); }; });

  auto* annotate = app.add_subcommand("annotate", "Label text with gestures");
  std::vector<std::string> text_args;
  std::string input_path, output_path, labels_out;
  annotate->add_option("text", text_args, "Text to annotate");
  annotate->add_option("--input", input_path, "File with one text per line");
  annotate->add_option("--output", output_path, "Write annotated output here");
  annotate->add_option("--labels-out", labels_out, "Write sidecar labels (JSONL) here");
  annotate->callback([&] {
    action = [&] { return cmd_annotate(c, text_args, input_path, output_path, labels_out, out, err); };
  });

  auto* parse = app.add_subcommand("parse", "Inline annotated text to sidecar labels");
  std::string parse_path, parse_out;
  parse->add_option("file", parse_path)->required();
  parse->add_option("--output", parse_out, "Write sidecar JSONL here");
  parse->callback([&] { action = [&] { return cmd_parse(c, parse_path, parse_out, out); }; });

  auto* render = app.add_subcommand("render", "Sidecar labels to inline annotated text");
  std::string render_path, render_out;
  render->add_option("file", render_path)->required();
  render->add_option("--output", render_out, "Write inline text here");
  render->callback([&] { action = [&] { return cmd_render(c, render_path, render_out, out); }; });

  auto* dataset = app.add_subcommand("dataset", "Training dataset tools");
  dataset->require_subcommand(1);
  auto* build = dataset->add_subcommand("build", "Annotate a corpus into a dataset file");
  std::string corpus_path, dataset_out;
  build->add_option("corpus", corpus_path)->required();
  build->add_option("--output", dataset_out, "Dataset JSONL path");
  build->callback([&] {
    action = [&] { return cmd_dataset_build(c, corpus_path, dataset_out, out, err); };
  });
  auto* stats = dataset->add_subcommand("stats", "Summarize a dataset file");
  std::string stats_path;
  stats->add_option("path", stats_path)->required();
  stats->callback([&] { action = [&] { return cmd_dataset_stats(c, stats_path, out); }; });

  auto* eval = app.add_subcommand("eval", "Partial Overlap of predictions against gold labels");
  std::string gold_path, pred_path, report_out;
  eval->add_option("gold", gold_path)->required();
  eval->add_option("predicted", pred_path)->required();
  eval->add_option("--report-out", report_out, "Write the structured report here");
  eval->callback([&] {
    action = [&] { return cmd_eval(c, gold_path, pred_path, report_out, out, err); };
  });

  auto* compare = app.add_subcommand("compare", "Side-by-side comparison of two eval reports");
  std::string cmp_a, cmp_b;
  compare->add_option("a", cmp_a)->required();
  compare->add_option("b", cmp_b)->required();
  compare->callback([&] { action = [&] { return cmd_compare(c, cmp_a, cmp_b, out); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsageError;
  }
  c.format = format == "structured" ? Format::Structured : Format::Human;

  try {
    return action ? action() : kUsageError;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDomainError;
  }
}

}  // namespace sarges::cli
