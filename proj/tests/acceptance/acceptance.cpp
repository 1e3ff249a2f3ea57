// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "glyphforge/cli/commands.hpp"
#include "glyphforge/ctc/ctc.hpp"
#include "glyphforge/error.hpp"
#include "glyphforge/evaluation/metrics.hpp"
#include "glyphforge/imaging/png_io.hpp"
#include "glyphforge/imaging/raster.hpp"
#include "glyphforge/log.hpp"
#include "glyphforge/nn/lstm.hpp"
#include "glyphforge/nn/model.hpp"
#include "glyphforge/random.hpp"
#include "glyphforge/synth/compose.hpp"
#include "glyphforge/synth/dataset.hpp"
#include "glyphforge/training/checkpoint.hpp"
#include "glyphforge/training/trainer.hpp"
#include "oracles.hpp"
#include "toy.hpp"

namespace fs = std::filesystem;
namespace gf = glyphforge;
using gf::testing::TempDir;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double v, const char* fmt = "%.3g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

gf::nn::Tensor random_logp(std::size_t T, std::size_t C, std::mt19937_64& rng) {
  gf::nn::Tensor t({T, C});
  for (std::size_t r = 0; r < T; ++r) {
    double s = 0;
    for (std::size_t c = 0; c < C; ++c) s += (t.values[r * C + c] = 1e-3 + gf::uniform_unit(rng));
    for (std::size_t c = 0; c < C; ++c) t.values[r * C + c] = std::log(t.values[r * C + c] / s);
  }
  return t;
}

Outcome ctc_oracle() {
  std::mt19937_64 rng(2024);
  const auto t0 = Clock::now();
  double worst = 0;
  for (int instance = 0; instance < 500; ++instance) {
    const std::size_t T = 1 + gf::uniform_index(rng, 6);
    const std::size_t C = 2 + gf::uniform_index(rng, 3);
    const auto logp = random_logp(T, C, rng);
    std::vector<int> target;
    do {
      target.clear();
      const std::size_t L = gf::uniform_index(rng, T + 1);
      for (std::size_t i = 0; i < L; ++i) target.push_back(static_cast<int>(gf::uniform_index(rng, C - 1)));
    } while (gf::ctc::min_frames(target) > T);
    const double fast = gf::ctc::ctc_loss(logp, target).loss;
    const double slow = gf::ctc::ctc_brute_force(logp, target);
    worst = std::max(worst, std::abs(fast - slow));
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-9 && secs < 10.0, "500 instances, max |diff| " + num(worst) + ", " + num(secs, "%.2f") + " s"};
}

Outcome gradient_check() {
  gf::nn::Architecture arch;
  arch.input_height = 8;
  arch.input_width = 16;
  arch.conv1_channels = 3;
  arch.conv2_channels = 4;
  arch.hidden_size = 6;
  arch.bilstm_output = 6;
  arch.num_classes = 4;
  auto model = gf::nn::ModelParams::initialize(arch, 77);
  const std::size_t count = model.parameter_count();

  std::mt19937_64 rng(78);
  gf::nn::Tensor batch({2, 1, arch.input_height, arch.input_width});
  for (auto& v : batch.values) v = gf::uniform_unit(rng);
  const std::vector<std::vector<int>> targets{{0, 1, 1}, {2, 0}};

  const auto t0 = Clock::now();
  const auto analytic = gf::nn::ctc_loss_and_gradients(model, batch, targets);
  const double eps = 1e-4;
  double worst = 0;
  std::string where;
  std::size_t p = 0;
  for (auto& [name, tensor] : model.named_tensors()) {
    for (std::size_t i = 0; i < tensor->values.size(); ++i) {
      const double keep = tensor->values[i];
      tensor->values[i] = keep + eps;
      const double up = gf::nn::ctc_batch_loss(model, batch, targets);
      tensor->values[i] = keep - eps;
      const double down = gf::nn::ctc_batch_loss(model, batch, targets);
      tensor->values[i] = keep;
      const double numeric = (up - down) / (2 * eps);
      const double a = analytic.grads[p][i];
      const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-6});
      if (rel > worst) worst = rel, where = name + "[" + std::to_string(i) + "]";
    }
    ++p;
  }
  const double secs = seconds_since(t0);
  return {count <= 5000 && worst < 1e-4 && secs < 120.0,
          std::to_string(count) + " parameters, max relative error " + num(worst) + " at " + where + ", " +
              num(secs, "%.1f") + " s"};
}

Outcome lstm_fidelity() {
  std::mt19937_64 rng(99);
  double worst = 0;
  for (int draw = 0; draw < 100; ++draw) {
    const std::size_t D = 1 + gf::uniform_index(rng, 8), H = 1 + gf::uniform_index(rng, 8);
    auto p = gf::nn::LstmParams::zeros(D, H);
    for (gf::nn::Tensor* t : {&p.W_f, &p.W_i, &p.W_c, &p.W_o, &p.b_f, &p.b_i, &p.b_c, &p.b_o})
      for (auto& v : t->values) v = 4 * gf::uniform_unit(rng) - 2;
    std::vector<double> x(D), h(H), c(H);
    for (auto* vec : {&x, &h, &c})
      for (auto& v : *vec) v = 4 * gf::uniform_unit(rng) - 2;
    const auto got = gf::nn::lstm_step(x, h, c, p);
    const auto want = gf::testing::lstm_oracle(x, h, c, p);
    for (std::size_t k = 0; k < H; ++k) {
      worst = std::max({worst, std::abs(got.h[k] - want.h[k]), std::abs(got.c[k] - want.c[k])});
    }
  }

  bool zero_ok = true;
  const auto zero = gf::nn::LstmParams::zeros(3, 5);
  const std::vector<double> x{1, -2, 3}, h{0.1, 0.2, 0.3, 0.4, 0.5}, c{-3, -0.5, 0, 0.7, 2.5};
  const auto r = gf::nn::lstm_step(x, h, c, zero);
  for (std::size_t k = 0; k < 5; ++k) {
    zero_ok = zero_ok && r.c[k] == 0.5 * c[k] && r.h[k] == 0.5 * std::tanh(0.5 * c[k]);
  }
  return {worst < 1e-12 && zero_ok, "100 draws, max |diff| " + num(worst) + (zero_ok ? ", zero case exact" : ", zero case WRONG")};
}

gf::imaging::GrayRaster overlap_oracle(const std::vector<gf::imaging::GrayRaster>& glyphs, int k) {
  int width = 0;
  for (const auto& g : glyphs) width += g.width();
  width -= k * static_cast<int>(glyphs.size() - 1);
  const int height = glyphs.front().height();
  std::vector<double> px(static_cast<std::size_t>(width) * height, 1.0);
  int x0 = 0;
  for (const auto& g : glyphs) {
    for (int r = 0; r < height; ++r)
      for (int c = 0; c < g.width(); ++c) {
        double& dst = px[static_cast<std::size_t>(r) * width + x0 + c];
        dst = std::min(dst, g.at(c, r));
      }
    x0 += g.width() - k;
  }
  return gf::imaging::GrayRaster(width, height, px);
}

Outcome composition() {
  std::mt19937_64 rng(5150);
  int sets = 0, failures = 0;
  for (; sets < 300; ++sets) {
    const int k = 1 + static_cast<int>(gf::uniform_index(rng, 6));
    const int height = 1 + static_cast<int>(gf::uniform_index(rng, 24));
    std::vector<gf::imaging::GrayRaster> glyphs;
    int sum = 0;
    for (int i = 0; i < k; ++i) {
      const int w = gf::synth::kDefaultOverlapPx + 1 + static_cast<int>(gf::uniform_index(rng, 30));
      std::vector<double> px(static_cast<std::size_t>(w) * height);
      for (auto& v : px) v = gf::uniform_unit(rng) < 0.5 ? 1.0 : gf::uniform_unit(rng);
      glyphs.emplace_back(w, height, px);
      sum += w;
    }
    const auto plain = gf::synth::compose(glyphs, gf::synth::JoinMode::NonOverlapped, 0);
    const auto over = gf::synth::compose(glyphs, gf::synth::JoinMode::Overlapped, gf::synth::kDefaultOverlapPx);
    const bool ok = plain.width() == sum && over.width() == sum - (k - 1) * 4 && plain.height() == height &&
                    plain == overlap_oracle(glyphs, 0) && over == overlap_oracle(glyphs, 4);
    failures += !ok;
  }

  int idempotent = 0, crops = 0;
  for (int i = 0; i < 1000; ++i) {
    auto img = gf::testing::random_raster(rng, 40, 40);
    // at least one ink pixel
    std::vector<double> px(img.pixels().begin(), img.pixels().end());
    px[gf::uniform_index(rng, px.size())] = 0.0;
    img = gf::imaging::GrayRaster(img.width(), img.height(), px);
    const auto once = gf::imaging::tight_crop(img);
    idempotent += gf::imaging::tight_crop(once) == once;
    ++crops;
  }
  return {failures == 0 && idempotent == crops,
          std::to_string(sets - failures) + "/" + std::to_string(sets) + " glyph sets pixel-exact, tight_crop idempotent on " +
              std::to_string(idempotent) + "/" + std::to_string(crops) + " rasters"};
}

Outcome levenshtein_oracle() {
  const auto t0 = Clock::now();
  const auto strings = gf::testing::all_strings("abc", 6);
  std::size_t mismatches = 0, pairs = 0;
  for (const auto& a : strings)
    for (const auto& b : strings) {
      mismatches += gf::evaluation::levenshtein(a, b) != gf::testing::levenshtein_recursive(a, b);
      ++pairs;
    }
  const std::size_t spot = gf::evaluation::char_distance("kitten", "sitting");
  return {mismatches == 0 && spot == 3, std::to_string(pairs) + " pairs, " + std::to_string(mismatches) +
                                            " mismatches, kitten/sitting = " + std::to_string(spot) + ", " +
                                            num(seconds_since(t0), "%.1f") + " s"};
}

gf::ctc::Alphabet alphabet_for(const gf::synth::DatasetManifest& m) {
  return gf::ctc::Alphabet::from_codepoints(m.alphabet);
}

Outcome overfit() {
  TempDir dir("gf-overfit");
  const auto labels = gf::testing::letter_labels(10);
  gf::testing::write_toy_corpus(dir / "corpus", labels, 3);
  const auto words = gf::testing::toy_words(labels, 20, 5, 7);
  gf::testing::write_lines(dir / "lexicon.txt", words);

  const auto t0 = Clock::now();
  const auto corpus = gf::synth::load_glyph_corpus(dir / "corpus");
  gf::synth::GenerationOptions gen;
  gen.count = 20;
  gen.seed = 1;
  const auto report = gf::synth::generate_dataset(gf::synth::load_lexicon(dir / "lexicon.txt"), corpus, gen, dir / "data");
  const auto manifest = gf::synth::read_manifest(dir / "data");
  const auto alphabet = alphabet_for(manifest);

  gf::training::TrainConfig cfg;
  cfg.epochs = 500;
  cfg.batch_size = 4;
  cfg.seed = 1;
  cfg.patience = 0;
  gf::training::TrainHooks hooks;
  // validation set = training set
  hooks.on_epoch = [](const gf::training::EpochMetrics& m, const gf::nn::ModelParams&) {
    return !(m.val_loss < 0.1 && m.val_wer == 0.0);
  };
  const auto result = gf::training::train(cfg, alphabet, manifest, manifest, std::nullopt, hooks);
  const auto& last = result.log.back();
  const double secs = seconds_since(t0);
  const bool pass = report.coverable_words == 20 && last.val_wer == 0.0 && last.val_loss < 0.1 && secs < 300.0;
  return {pass, std::to_string(manifest.records.size()) + " words, epoch " + std::to_string(last.epoch) +
                    ", train loss " + num(last.val_loss, "%.4f") + ", train WER " + num(last.val_wer) + ", " +
                    num(secs, "%.0f") + " s"};
}

Outcome mode_ordering() {
  TempDir dir("gf-modes");
  const auto labels = gf::testing::letter_labels(10);
  const gf::testing::ToyStyle style{1.2, 10.0};
  const auto t0 = Clock::now();
  fs::create_directories(dir / "corpus");
  for (const auto& label : labels) {
    fs::create_directories(dir / "corpus" / label);
    for (int v = 0; v < 10; ++v)
      gf::imaging::write_png(gf::testing::toy_glyph(label, v, style), dir / "corpus" / label / (std::to_string(v) + ".png"));
  }
  const auto corpus = gf::synth::load_glyph_corpus(dir / "corpus");
  const auto lexicon = gf::synth::make_lexicon(gf::testing::toy_words(labels, 150, 5, 11));

  auto make = [&](const char* name, gf::synth::JoinMode mode, std::size_t count, std::uint64_t seed) {
    gf::synth::GenerationOptions gen;
    gen.mode = mode;
    gen.count = count;
    gen.seed = seed;
    gf::synth::generate_dataset(lexicon, corpus, gen, dir / name);
    return gf::synth::read_manifest(dir / name);
  };
  const auto train_set = make("train", gf::synth::JoinMode::NonOverlapped, 300, 100);
  const auto val_set = make("val", gf::synth::JoinMode::NonOverlapped, 40, 200);
  const auto test_plain = make("test_plain", gf::synth::JoinMode::NonOverlapped, 100, 300);
  const auto test_over = make("test_over", gf::synth::JoinMode::Overlapped, 100, 300);
  const auto alphabet = alphabet_for(train_set);

  gf::training::TrainConfig cfg;
  cfg.epochs = 40;
  cfg.batch_size = 8;
  cfg.seed = 3;
  cfg.patience = 0;
  const auto result = gf::training::train(cfg, alphabet, train_set, val_set, std::nullopt);
  const auto model = gf::training::restore_model(result.final_checkpoint);

  auto score = [&](const gf::synth::DatasetManifest& m) {
    const auto examples = gf::training::load_examples(m, alphabet, model.arch);
    return gf::training::evaluate_set(model, alphabet, examples).wer;
  };
  const double wer_plain = score(test_plain);
  const double wer_over = score(test_over);
  const double secs = seconds_since(t0);
  return {wer_plain < wer_over && secs < 900.0, "WER non-overlapped " + num(wer_plain, "%.2f") + " vs overlapped " +
                                                    num(wer_over, "%.2f") + " (100 renders each), " +
                                                    num(secs, "%.0f") + " s"};
}

int cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = gf::cli::run(args, out, err);
  if (code != 0) std::cerr << err.str();
  return code;
}

Outcome determinism() {
  TempDir dir("gf-determinism");
  const auto labels = gf::testing::letter_labels(6);
  gf::testing::write_toy_corpus(dir / "corpus", labels, 3);
  gf::testing::write_lines(dir / "lexicon.txt", gf::testing::toy_words(labels, 10, 4, 5));

  const char* files[] = {"data/manifest.jsonl", "model/metrics.jsonl", "eval/report.json", "eval/samples.jsonl",
                         "model/final.ckpt"};
  std::vector<std::string> runs[2];
  for (int r = 0; r < 2; ++r) {
    const fs::path root = dir / ("run" + std::to_string(r));
    bool ok = cli({"generate", "--lexicon", (dir / "lexicon.txt").string(), "--corpus", (dir / "corpus").string(),
                   "--count", "16", "--seed", "21", "--out", (root / "data").string()}) == 0 &&
              cli({"train", "--manifest", (root / "data").string(), "--out", (root / "model").string(), "--epochs",
                   "3", "--batch-size", "4", "--seed", "21"}) == 0 &&
              cli({"evaluate", "--checkpoint", (root / "model" / "final.ckpt").string(), "--manifest",
                   (root / "data").string(), "--out", (root / "eval").string()}) == 0;
    if (!ok) return {false, "pipeline run " + std::to_string(r + 1) + " failed"};
    for (const char* f : files) runs[r].push_back(gf::testing::read_file(root / f));
  }
  std::string differing;
  for (std::size_t i = 0; i < runs[0].size(); ++i) {
    if (runs[0][i] != runs[1][i] || runs[0][i].empty()) differing += std::string(" ") + files[i];
  }
  return {differing.empty(), differing.empty() ? "manifest, metrics log, report, samples and checkpoint byte-identical"
                                               : "differs:" + differing};
}

Outcome checkpoint_round_trip() {
  TempDir dir("gf-ckpt");
  gf::nn::Architecture arch;
  arch.num_classes = 11;
  const auto model = gf::nn::ModelParams::initialize(arch, 8);
  const gf::ctc::Alphabet alphabet({"a", "b", "c", "d", "e", "f", "g", "h", "i", "j"});
  const auto ck = gf::training::make_checkpoint(model, alphabet, 123);
  gf::training::save_checkpoint(ck, dir / "m.ckpt");
  const auto back = gf::training::load_checkpoint(dir / "m.ckpt");

  bool bit_exact = back.tensors.size() == ck.tensors.size();
  for (std::size_t i = 0; bit_exact && i < ck.tensors.size(); ++i) {
    const auto& a = ck.tensors[i].values;
    const auto& b = back.tensors[i].values;
    bit_exact = a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0 &&
                ck.tensors[i].shape == back.tensors[i].shape;
  }
  // re-save must reproduce the file
  gf::training::save_checkpoint(gf::training::make_checkpoint(gf::training::restore_model(back), alphabet, 123),
                                dir / "again.ckpt");
  const std::string bytes = gf::testing::read_file(dir / "m.ckpt");
  bit_exact = bit_exact && bytes == gf::testing::read_file(dir / "again.ckpt");

  std::mt19937_64 rng(4);
  int rejected = 0;
  const int trials = 20;
  for (int t = 0; t < trials; ++t) {
    std::string bad = bytes;
    // one bit inside the float payload (before the 4-byte CRC)
    const std::size_t payload = model.parameter_count() * sizeof(float);
    const std::size_t pos = bytes.size() - 4 - payload + gf::uniform_index(rng, payload);
    bad[pos] = static_cast<char>(bad[pos] ^ (1 << gf::uniform_index(rng, 8)));
    std::ofstream(dir / "bad.ckpt", std::ios::binary | std::ios::trunc) << bad;
    try {
      gf::training::load_checkpoint(dir / "bad.ckpt");
    } catch (const gf::Error& e) {
      rejected += e.code() == gf::Errc::CorruptChecksum;
    }
  }
  return {bit_exact && rejected == trials, std::string(bit_exact ? "bit-exact" : "NOT bit-exact") + " over " +
                                               std::to_string(model.parameter_count()) + " parameters, " +
                                               std::to_string(rejected) + "/" + std::to_string(trials) +
                                               " corrupted payloads rejected"};
}

}  // namespace

int main(int argc, char** argv) {
  gf::log::set_level(gf::log::Level::Quiet);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"ctc-oracle-equivalence", ctc_oracle},
      {"gradient-check", gradient_check},
      {"lstm-equation-fidelity", lstm_fidelity},
      {"composition-identities", composition},
      {"levenshtein-oracle", levenshtein_oracle},
      {"overfit-smoke", overfit},
      {"mode-ordering", mode_ordering},
      {"determinism", determinism},
      {"checkpoint-round-trip", checkpoint_round_trip},
  };
  std::vector<std::string> only(argv + 1, argv + argc);

  int failed = 0;
  for (const auto& [name, check] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
