#include "glyphforge/cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>

#include <nlohmann/json.hpp>

#include "glyphforge/error.hpp"
#include "glyphforge/evaluation/metrics.hpp"
#include "glyphforge/imaging/png_io.hpp"
#include "glyphforge/log.hpp"
#include "glyphforge/synth/annotations.hpp"
#include "glyphforge/synth/corpus.hpp"
#include "glyphforge/synth/dataset.hpp"
#include "glyphforge/synth/lexicon.hpp"
#include "glyphforge/training/checkpoint.hpp"
#include "glyphforge/training/split.hpp"
#include "glyphforge/training/trainer.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace glyphforge::cli {

namespace {

// Raised for invalid flag combinations detected after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config;
  std::uint64_t seed = 0;
  bool verbose = false;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c, bool out_required) {
  cmd->add_option("--config", c.config, "JSON file of flat flag values; flags given here win");
  cmd->add_option("--seed", c.seed, "Seed for every stochastic step");
  cmd->add_flag("--verbose", c.verbose, "Log progress");
  auto* out = cmd->add_option("--out", c.out, "Output directory");
  if (out_required) out->required();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << text;
  if (!f) throw Error(Errc::IoFailure, "cannot write " + path.string());
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::IoFailure, "cannot create " + dir.string() + ": " + ec.message());
}

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// ---- preprocess -----------------------------------------------------------

struct PreprocessArgs {
  Common common;
  std::string input;
  int glyph_width = 128;
  int glyph_height = 128;
  double ink_threshold = imaging::InkThreshold::kDefault;
  bool strict = false;
};

int cmd_preprocess(const PreprocessArgs& a, std::ostream& out) {
  const synth::CorpusOptions options{{a.glyph_width, a.glyph_height},
                                     imaging::InkThreshold(a.ink_threshold)};
  const auto entries = synth::list_corpus(a.input);

  struct Done {
    std::string label;
    imaging::GrayRaster glyph;
  };
  std::vector<Done> done;
  ordered_json skipped = ordered_json::array();
  for (const auto& e : entries) {
    try {
      const imaging::GrayRaster gray = imaging::to_grayscale(imaging::read_png_rgb(e.path));
      done.push_back({e.label, synth::normalize_glyph(gray, options)});
    } catch (const Error& err) {
      if (a.strict) throw;
      log::warn("skipping " + e.path.string() + ": " + err.what());
      skipped.push_back({{"path", e.path.string()}, {"reason", std::string(errc_name(err.code()))}});
    }
  }

  const fs::path root(a.common.out);
  make_dir(root);
  std::map<std::string, std::size_t> counts;
  for (const auto& d : done) {
    const std::size_t id = counts[d.label]++;
    make_dir(root / d.label);
    char name[32];
    std::snprintf(name, sizeof name, "%06zu.png", id);
    imaging::write_png(d.glyph, root / d.label / name);
  }

  ordered_json summary;
  summary["processed"] = done.size();
  summary["skipped_count"] = skipped.size();
  summary["glyph_width"] = a.glyph_width;
  summary["glyph_height"] = a.glyph_height;
  summary["labels"] = counts;
  summary["skipped"] = skipped;
  write_text(root / "summary.json", summary.dump(2) + "\n");

  out << "processed " << done.size() << " glyphs over " << counts.size() << " labels, skipped "
      << skipped.size() << "\n";
  return kExitOk;
}

// ---- generate -------------------------------------------------------------

struct GenerateArgs {
  Common common;
  std::string lexicon;
  std::string corpus;
  std::string mode = "non_overlapped";
  int overlap = synth::kDefaultOverlapPx;
  std::size_t count = 0;
  int glyph_width = 128;
  int glyph_height = 128;
  double ink_threshold = imaging::InkThreshold::kDefault;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
  synth::GenerationOptions options;
  options.mode = synth::parse_join_mode(a.mode);
  options.overlap_px = a.overlap;
  options.count = a.count;
  options.seed = a.common.seed;

  const synth::Lexicon lexicon = synth::load_lexicon(a.lexicon);
  const synth::GlyphCorpus corpus = synth::load_glyph_corpus(
      a.corpus, {{a.glyph_width, a.glyph_height}, imaging::InkThreshold(a.ink_threshold)});
  const auto report = synth::generate_dataset(lexicon, corpus, options, a.common.out);

  out << "coverable words: " << report.coverable_words
      << ", uncoverable words: " << report.uncoverable_words.size() << "\n";
  out << "wrote " << report.manifest.records.size() << " images ("
      << synth::to_string(options.mode) << ") to " << a.common.out << "\n";
  return kExitOk;
}

// ---- train ----------------------------------------------------------------

struct TrainArgs {
  Common common;
  std::string manifest;
  int epochs = 50;
  std::size_t batch_size = 16;
  double lr = 1e-3;
  std::string optimizer = "adam";
  double beta1 = 0.9;
  double beta2 = 0.999;
  double split = 0.8;
  int patience = 5;
  std::string classes = "codepoint";
  std::size_t input_height = 32;
  std::size_t input_width = 128;
  std::size_t conv1 = 16;
  std::size_t conv2 = 32;
  std::size_t hidden = 64;
  std::size_t bilstm_out = 64;
};

ctc::Alphabet training_alphabet(const synth::DatasetManifest& manifest, const std::string& classes,
                                const fs::path& manifest_path) {
  if (classes == "grapheme") {
    auto labels = synth::read_grapheme_labels(manifest_path);
    if (labels.empty()) {
      throw Error(Errc::IoFailure, "grapheme classes need graphemes.json next to the manifest");
    }
    return ctc::Alphabet(std::move(labels));
  }
  return ctc::Alphabet::from_codepoints(manifest.alphabet);
}

int cmd_train(const TrainArgs& a, std::ostream& out) {
  training::TrainConfig config;
  config.epochs = a.epochs;
  config.batch_size = a.batch_size;
  config.optimizer.kind = training::parse_optimizer(a.optimizer);
  config.optimizer.learning_rate = a.lr;
  config.optimizer.beta1 = a.beta1;
  config.optimizer.beta2 = a.beta2;
  config.seed = a.common.seed;
  config.split_ratio = a.split;
  config.patience = a.patience;
  config.arch.input_height = a.input_height;
  config.arch.input_width = a.input_width;
  config.arch.conv1_channels = a.conv1;
  config.arch.conv2_channels = a.conv2;
  config.arch.hidden_size = a.hidden;
  config.arch.bilstm_output = a.bilstm_out;
  config.validate();

  const synth::DatasetManifest manifest = synth::read_manifest(a.manifest);
  const ctc::Alphabet alphabet = training_alphabet(manifest, a.classes, a.manifest);
  const auto [train_part, val_part] = training::split_dataset(manifest, a.split, a.common.seed);
  if (train_part.records.empty() || val_part.records.empty()) {
    throw Error(Errc::EmptyManifest, "split of " + std::to_string(manifest.records.size()) +
                                         " records leaves an empty part");
  }
  out << "train " << train_part.records.size() << " / validation " << val_part.records.size()
      << " records, " << alphabet.size() << " symbol classes\n";
  out << "epoch  train_loss  val_loss  val_wer\n";

  training::TrainHooks hooks;
  hooks.on_epoch = [&](const training::EpochMetrics& m, const nn::ModelParams&) {
    char line[128];
    std::snprintf(line, sizeof line, "%5d  %10.4f  %8.4f  %7.4f\n", m.epoch, m.train_loss, m.val_loss,
                  m.val_wer);
    out << line << std::flush;
    return true;
  };
  const auto result = training::train(config, alphabet, train_part, val_part, fs::path(a.common.out), hooks);
  const auto& last = result.log.empty() ? training::EpochMetrics{} : result.log.back();
  out << "best epoch " << result.best_epoch << ", final val WER " << fixed(last.val_wer) << "\n";
  return kExitOk;
}

// ---- evaluate -------------------------------------------------------------

struct EvaluateArgs {
  Common common;
  std::string checkpoint;
  std::string manifest;
  std::string pages;
  std::string image_root;
};

ordered_json report_json(const evaluation::EvalReport& r) {
  ordered_json j;
  j["wer"] = r.wer;
  j["accuracy"] = r.accuracy;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f1"] = r.f1;
  j["matched_words"] = r.matched_words;
  j["total_words"] = r.total_words;
  j["word_accuracy"] = r.word_accuracy;
  j["cer_diagnostic"] = r.cer;
  return j;
}

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  const training::Checkpoint ck = training::load_checkpoint(a.checkpoint);
  const nn::ModelParams model = training::restore_model(ck);
  const ctc::Alphabet alphabet = training::restore_alphabet(ck);

  std::vector<imaging::GrayRaster> images;
  std::vector<std::string> references;
  std::vector<std::string> sources;
  if (!a.manifest.empty()) {
    const auto manifest = synth::read_manifest(a.manifest);
    for (const auto& r : manifest.records) references.push_back(r.transcript);
    training::require_coverage(alphabet, references);
    for (const auto& r : manifest.records) {
      images.push_back(imaging::read_png_gray(synth::resolve_image(manifest, r)));
      sources.push_back(r.image);
    }
  } else {
    const fs::path root = a.image_root.empty() ? fs::path(a.pages).parent_path() : fs::path(a.image_root);
    auto words = synth::ingest_annotated_pages(a.pages, root);
    for (const auto& w : words) references.push_back(w.transcript);
    training::require_coverage(alphabet, references);
    for (std::size_t i = 0; i < words.size(); ++i) {
      images.push_back(std::move(words[i].image));
      sources.push_back("word:" + std::to_string(i));
    }
  }

  std::vector<std::string> predictions;
  for (const auto& img : images) {
    predictions.push_back(training::predict(model, alphabet, training::prepare_input(img, ck.arch)).transcript);
  }
  const evaluation::EvalReport rep = evaluation::report(predictions, references);

  const fs::path root(a.common.out);
  make_dir(root);
  write_text(root / "report.json", report_json(rep).dump(2) + "\n");
  std::string lines;
  for (std::size_t i = 0; i < rep.samples.size(); ++i) {
    ordered_json s;
    s["index"] = i;
    s["source"] = sources[i];
    s["prediction"] = rep.samples[i].prediction;
    s["reference"] = rep.samples[i].reference;
    s["edit_distance"] = rep.samples[i].edit_distance;
    lines += s.dump() + "\n";
  }
  write_text(root / "samples.jsonl", lines);

  out << "WER " << fixed(rep.wer) << "  accuracy " << fixed(rep.accuracy) << "  precision "
      << fixed(rep.precision) << "  recall " << fixed(rep.recall) << "  F1 " << fixed(rep.f1)
      << "  matched " << rep.matched_words << "/" << rep.total_words << "\n";
  return kExitOk;
}

// ---- predict --------------------------------------------------------------

struct PredictArgs {
  Common common;
  std::string checkpoint;
  std::string image;
};

int cmd_predict(const PredictArgs& a, std::ostream& out) {
  const training::Checkpoint ck = training::load_checkpoint(a.checkpoint);
  const nn::ModelParams model = training::restore_model(ck);
  const ctc::Alphabet alphabet = training::restore_alphabet(ck);
  const imaging::GrayRaster image = imaging::read_png_gray(a.image);
  const training::Prediction p =
      training::predict(model, alphabet, training::prepare_input(image, ck.arch));

  out << p.transcript << "\n";
  out << "confidence mean " << fixed(p.mean_confidence) << " min " << fixed(p.min_confidence) << "\n";
  if (!a.common.out.empty()) {
    make_dir(a.common.out);
    ordered_json j;
    j["image"] = a.image;
    j["transcript"] = p.transcript;
    j["mean_confidence"] = p.mean_confidence;
    j["min_confidence"] = p.min_confidence;
    write_text(fs::path(a.common.out) / "prediction.json", j.dump(2) + "\n");
  }
  return kExitOk;
}

// ---- config merging -------------------------------------------------------

// Turns {"key": value} into "--key value" tokens. Keys may use '_' or '-'.
std::vector<std::string> config_tokens(const std::string& path, const CLI::App& cmd) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open config file " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config file " + path + " is not valid JSON: " + e.what());
  }
  if (!doc.is_object()) throw UsageError("config file must hold a JSON object");

  std::vector<std::string> tokens;
  for (const auto& [key, value] : doc.items()) {
    std::string flag = key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    flag = "--" + flag;
    if (flag == "--config" || cmd.get_option_no_throw(flag) == nullptr) {
      throw UsageError("unknown config key '" + key + "' for '" + cmd.get_name() + "'");
    }
    if (value.is_boolean()) {
      if (value.get<bool>()) tokens.push_back(flag);
    } else if (value.is_string()) {
      tokens.push_back(flag);
      tokens.push_back(value.get<std::string>());
    } else if (value.is_number()) {
      tokens.push_back(flag);
      tokens.push_back(value.dump());
    } else {
      throw UsageError("config key '" + key + "' must be a string, number or boolean");
    }
  }
  return tokens;
}

std::optional<std::string> find_config(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"glyphforge: synthetic handwritten word generation and BiLSTM-CTC recognition"};
  app.name("glyphforge");
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  PreprocessArgs pre;
  auto* c_pre = app.add_subcommand("preprocess", "Grayscale, tight-crop and resize a glyph corpus");
  add_common(c_pre, pre.common, true);
  c_pre->add_option("--input", pre.input, "Raw corpus directory")->required();
  c_pre->add_option("--glyph-width", pre.glyph_width)->check(CLI::PositiveNumber);
  c_pre->add_option("--glyph-height", pre.glyph_height)->check(CLI::PositiveNumber);
  c_pre->add_option("--ink-threshold", pre.ink_threshold)->check(CLI::Range(0.0, 1.0));
  c_pre->add_flag("--strict", pre.strict, "Abort on the first unusable glyph");

  GenerateArgs gen;
  auto* c_gen = app.add_subcommand("generate", "Render a synthetic word dataset");
  add_common(c_gen, gen.common, true);
  c_gen->add_option("--lexicon", gen.lexicon, "Word list, one per line")->required();
  c_gen->add_option("--corpus", gen.corpus, "Glyph corpus directory")->required();
  c_gen->add_option("--mode", gen.mode)->check(CLI::IsMember({"overlapped", "non_overlapped"}));
  auto* overlap_opt = c_gen->add_option("--overlap", gen.overlap, "Overlap in pixels (overlapped mode)");
  c_gen->add_option("--count", gen.count, "Number of images")->required()->check(CLI::PositiveNumber);
  c_gen->add_option("--glyph-width", gen.glyph_width)->check(CLI::PositiveNumber);
  c_gen->add_option("--glyph-height", gen.glyph_height)->check(CLI::PositiveNumber);
  c_gen->add_option("--ink-threshold", gen.ink_threshold)->check(CLI::Range(0.0, 1.0));

  TrainArgs tr;
  auto* c_tr = app.add_subcommand("train", "Train the recognizer on a generated dataset");
  add_common(c_tr, tr.common, true);
  c_tr->add_option("--manifest", tr.manifest, "manifest.jsonl or its directory")->required();
  c_tr->add_option("--epochs", tr.epochs)->check(CLI::NonNegativeNumber);
  c_tr->add_option("--batch-size", tr.batch_size)->check(CLI::PositiveNumber);
  c_tr->add_option("--lr", tr.lr)->check(CLI::NonNegativeNumber);
  c_tr->add_option("--optimizer", tr.optimizer)->check(CLI::IsMember({"sgd", "adam"}));
  c_tr->add_option("--beta1", tr.beta1);
  c_tr->add_option("--beta2", tr.beta2);
  c_tr->add_option("--split", tr.split, "Training fraction in (0,1)");
  c_tr->add_option("--patience", tr.patience, "Early-stop patience, 0 disables")->check(CLI::NonNegativeNumber);
  c_tr->add_option("--classes", tr.classes)->check(CLI::IsMember({"codepoint", "grapheme"}));
  c_tr->add_option("--input-height", tr.input_height)->check(CLI::PositiveNumber);
  c_tr->add_option("--input-width", tr.input_width)->check(CLI::PositiveNumber);
  c_tr->add_option("--conv1", tr.conv1)->check(CLI::PositiveNumber);
  c_tr->add_option("--conv2", tr.conv2)->check(CLI::PositiveNumber);
  c_tr->add_option("--hidden", tr.hidden)->check(CLI::PositiveNumber);
  c_tr->add_option("--bilstm-out", tr.bilstm_out)->check(CLI::PositiveNumber);

  EvaluateArgs ev;
  auto* c_ev = app.add_subcommand("evaluate", "Score a checkpoint on a manifest or annotated pages");
  add_common(c_ev, ev.common, true);
  c_ev->add_option("--checkpoint", ev.checkpoint)->required();
  auto* src_manifest = c_ev->add_option("--manifest", ev.manifest, "Test manifest");
  auto* src_pages = c_ev->add_option("--pages", ev.pages, "Annotated pages JSON");
  c_ev->add_option("--image-root", ev.image_root, "Directory page paths resolve against");
  src_manifest->excludes(src_pages);

  PredictArgs pr;
  auto* c_pr = app.add_subcommand("predict", "Transcribe one word image");
  add_common(c_pr, pr.common, false);
  c_pr->add_option("--checkpoint", pr.checkpoint)->required();
  c_pr->add_option("--image", pr.image)->required();

  std::vector<std::string> argv = args;
  try {
    if (!argv.empty()) {
      if (auto path = find_config(argv)) {
        CLI::App* cmd = app.get_subcommand_no_throw(argv.front());
        if (cmd == nullptr) throw UsageError("--config must follow a subcommand");
        auto tokens = config_tokens(*path, *cmd);
        argv.insert(argv.begin() + 1, tokens.begin(), tokens.end());
      }
    }
    std::vector<std::string> reversed(argv.rbegin(), argv.rend());
    app.parse(reversed);

    if (c_gen->parsed() && gen.mode == "non_overlapped" && overlap_opt->count() > 0) {
      throw UsageError("--overlap is only valid with --mode overlapped");
    }
    if (c_tr->parsed() && !(tr.split > 0.0 && tr.split < 1.0)) {
      throw UsageError("--split must lie strictly between 0 and 1");
    }
    if (c_ev->parsed() && ev.manifest.empty() == ev.pages.empty()) {
      throw UsageError("evaluate needs exactly one of --manifest or --pages");
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  const bool verbose = pre.common.verbose || gen.common.verbose || tr.common.verbose ||
                       ev.common.verbose || pr.common.verbose;
  log::set_level(verbose ? log::Level::Info : log::Level::Warning);

  try {
    if (c_pre->parsed()) return cmd_preprocess(pre, out);
    if (c_gen->parsed()) return cmd_generate(gen, out);
    if (c_tr->parsed()) return cmd_train(tr, out);
    if (c_ev->parsed()) return cmd_evaluate(ev, out);
    if (c_pr->parsed()) return cmd_predict(pr, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == Errc::InvalidArgument ? kExitUsage : kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  return run(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace glyphforge::cli
