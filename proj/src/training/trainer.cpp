#include "glyphforge/training/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>

#include "glyphforge/ctc/ctc.hpp"
#include "glyphforge/error.hpp"
#include "glyphforge/evaluation/metrics.hpp"
#include "glyphforge/imaging/png_io.hpp"
#include "glyphforge/log.hpp"
#include "glyphforge/random.hpp"

namespace fs = std::filesystem;

namespace glyphforge::training {

void TrainConfig::validate() const {
  if (epochs < 0) throw Error(Errc::InvalidArgument, "epochs must be non-negative");
  if (batch_size < 1) throw Error(Errc::InvalidArgument, "batch size must be at least 1");
  if (!(optimizer.learning_rate >= 0.0) || !std::isfinite(optimizer.learning_rate)) {
    throw Error(Errc::InvalidArgument, "learning rate must be finite and non-negative");
  }
  if (!(split_ratio > 0.0 && split_ratio < 1.0)) {
    throw Error(Errc::InvalidArgument, "split ratio must lie in (0,1)");
  }
  if (patience < 0) throw Error(Errc::InvalidArgument, "patience must be non-negative");
}

nlohmann::ordered_json TrainConfig::to_json() const {
  nlohmann::ordered_json j;
  j["epochs"] = epochs;
  j["batch_size"] = batch_size;
  j["optimizer"] = std::string(training::to_string(optimizer.kind));
  j["learning_rate"] = optimizer.learning_rate;
  j["beta1"] = optimizer.beta1;
  j["beta2"] = optimizer.beta2;
  j["epsilon"] = optimizer.epsilon;
  j["seed"] = seed;
  j["split_ratio"] = split_ratio;
  j["patience"] = patience;
  return j;
}

nn::Tensor prepare_input(const imaging::GrayRaster& image, const nn::Architecture& arch) {
  const imaging::GrayRaster ready =
      imaging::resize(imaging::tight_crop(image), static_cast<int>(arch.input_width),
                      static_cast<int>(arch.input_height));
  return nn::Tensor({1, 1, arch.input_height, arch.input_width},
                    std::vector<double>(ready.pixels().begin(), ready.pixels().end()));
}

Example make_example(const imaging::GrayRaster& image, const std::string& transcript,
                     const ctc::Alphabet& alphabet, const nn::Architecture& arch) {
  Example ex{prepare_input(image, arch), alphabet.encode(transcript), transcript};
  if (ctc::min_frames(ex.target) > arch.frames()) {
    throw Error(Errc::InfeasibleTarget, "'" + transcript + "' needs " +
                                            std::to_string(ctc::min_frames(ex.target)) +
                                            " frames, the model emits " + std::to_string(arch.frames()));
  }
  return ex;
}

std::vector<Example> load_examples(const synth::DatasetManifest& manifest,
                                   const ctc::Alphabet& alphabet, const nn::Architecture& arch) {
  std::vector<std::string> transcripts;
  for (const auto& r : manifest.records) transcripts.push_back(r.transcript);
  require_coverage(alphabet, transcripts);

  std::vector<Example> out;
  out.reserve(manifest.records.size());
  for (const auto& r : manifest.records) {
    const fs::path path = synth::resolve_image(manifest, r);
    try {
      out.push_back(make_example(imaging::read_png_gray(path), r.transcript, alphabet, arch));
    } catch (const Error& e) {
      throw Error(e.code(), path.string() + ": " + e.what());
    }
  }
  return out;
}

nlohmann::ordered_json to_json(const EpochMetrics& m) {
  nlohmann::ordered_json j;
  j["epoch"] = m.epoch;
  j["train_loss"] = m.train_loss;
  j["val_loss"] = m.val_loss;
  j["val_wer"] = m.val_wer;
  return j;
}

Prediction predict(const nn::ModelParams& model, const ctc::Alphabet& alphabet, const nn::Tensor& input) {
  const nn::Tensor logp = nn::forward(model, input);
  const std::size_t T = logp.dim(1), C = logp.dim(2);
  const auto frames = std::span<const double>(logp.values).first(T * C);
  Prediction p;
  p.transcript = ctc::greedy_decode(frames, T, alphabet);
  p.min_confidence = 1.0;
  for (std::size_t t = 0; t < T; ++t) {
    const double top = std::exp(*std::max_element(frames.begin() + t * C, frames.begin() + (t + 1) * C));
    p.mean_confidence += top / static_cast<double>(T);
    p.min_confidence = std::min(p.min_confidence, top);
  }
  return p;
}

SetEvaluation evaluate_set(const nn::ModelParams& model, const ctc::Alphabet& alphabet,
                           std::span<const Example> examples) {
  if (examples.empty()) throw Error(Errc::EmptyManifest, "nothing to evaluate");
  SetEvaluation ev;
  std::vector<std::string> refs;
  for (const auto& ex : examples) {
    const nn::Tensor logp = nn::forward(model, ex.input);
    const std::size_t T = logp.dim(1), C = logp.dim(2);
    ev.mean_loss += ctc::ctc_loss(logp.values, T, C, ex.target).loss;
    ev.predictions.push_back(ctc::greedy_decode(logp.values, T, alphabet));
    refs.push_back(ex.transcript);
  }
  ev.mean_loss /= static_cast<double>(examples.size());
  ev.wer = evaluation::wer(ev.predictions, refs);
  return ev;
}

namespace {

bool all_finite(const std::vector<std::vector<double>>& grads) {
  for (const auto& g : grads) {
    for (double v : g) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

std::vector<nn::Tensor*> tensor_slots(nn::ModelParams& model) {
  std::vector<nn::Tensor*> out;
  for (auto& [name, t] : model.named_tensors()) out.push_back(t);
  return out;
}

}  // namespace

TrainResult train(const TrainConfig& config, const ctc::Alphabet& alphabet,
                  std::span<const Example> train_set, std::span<const Example> val_set,
                  const TrainHooks& hooks) {
  config.validate();
  if (train_set.empty()) throw Error(Errc::EmptyManifest, "training set is empty");
  if (val_set.empty()) throw Error(Errc::EmptyManifest, "validation set is empty");

  nn::Architecture arch = config.arch;
  arch.num_classes = alphabet.num_classes();
  for (const auto* set : {&train_set, &val_set}) {
    for (const auto& ex : *set) {
      if (ex.input.shape != nn::Shape{1, 1, arch.input_height, arch.input_width}) {
        throw Error(Errc::ShapeMismatch, "example input " + nn::to_string(ex.input.shape) +
                                             " does not match the architecture");
      }
      for (int label : ex.target) {
        if (label < 0 || label >= alphabet.blank()) {
          throw Error(Errc::AlphabetMismatch, "target of '" + ex.transcript + "' uses class " +
                                                  std::to_string(label));
        }
      }
    }
  }

  nn::ModelParams model = nn::ModelParams::initialize(arch, derive_seed(config.seed, 0));
  const std::vector<nn::Tensor*> slots = tensor_slots(model);
  OptimizerState state;
  std::mt19937_64 rng(derive_seed(config.seed, 1));
  const nlohmann::json config_echo = config.to_json();

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result;
  result.best_checkpoint = make_checkpoint(model, alphabet, 0, config_echo);
  double best_val = std::numeric_limits<double>::infinity();
  int stale = 0;
  std::uint64_t step = 0;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle(std::span(order), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const double weight = 1.0 / static_cast<double>(end - start);
      std::vector<std::vector<double>> grads;
      for (std::size_t k = start; k < end; ++k) {
        const Example& ex = train_set[order[k]];
        nn::LossAndGradients lg = nn::ctc_loss_and_gradients(model, ex.input, {ex.target});
        if (!std::isfinite(lg.loss)) {
          throw Error(Errc::NonFiniteLoss, "step " + std::to_string(step) + ": loss " +
                                               std::to_string(lg.loss) + " on '" + ex.transcript + "'");
        }
        epoch_loss += lg.loss;
        if (grads.empty()) {
          grads = std::move(lg.grads);
          for (auto& g : grads) {
            for (double& v : g) v *= weight;
          }
        } else {
          for (std::size_t p = 0; p < grads.size(); ++p) {
            for (std::size_t i = 0; i < grads[p].size(); ++i) grads[p][i] += weight * lg.grads[p][i];
          }
        }
      }
      if (!all_finite(grads)) {
        throw Error(Errc::NonFiniteLoss, "step " + std::to_string(step) + ": non-finite gradient");
      }
      optimizer_step(slots, grads, state, config.optimizer);
      ++step;
      for (const nn::Tensor* t : slots) {
        for (double v : t->values) {
          if (!std::isfinite(v)) {
            throw Error(Errc::NonFiniteLoss, "step " + std::to_string(step) + ": parameters diverged");
          }
        }
      }
    }

    const SetEvaluation val = evaluate_set(model, alphabet, val_set);
    if (!std::isfinite(val.mean_loss)) {
      throw Error(Errc::NonFiniteLoss, "step " + std::to_string(step) + ": validation loss diverged");
    }
    EpochMetrics m{epoch, epoch_loss / static_cast<double>(train_set.size()), val.mean_loss, val.wer};
    result.log.push_back(m);
    log::info("epoch " + std::to_string(epoch) + " train_loss " + std::to_string(m.train_loss) +
              " val_loss " + std::to_string(m.val_loss) + " val_wer " + std::to_string(m.val_wer));

    bool keep_going = true;
    if (m.val_loss < best_val) {
      best_val = m.val_loss;
      result.best_epoch = epoch;
      result.best_checkpoint = make_checkpoint(model, alphabet, step, config_echo);
      stale = 0;
    } else if (config.patience > 0 && ++stale >= config.patience) {
      log::info("early stop: no validation improvement for " + std::to_string(stale) + " epochs");
      keep_going = false;
    }
    if (hooks.on_epoch && !hooks.on_epoch(m, model)) keep_going = false;
    if (!keep_going) break;
  }
  result.final_checkpoint = make_checkpoint(model, alphabet, step, config_echo);
  return result;
}

TrainResult train(const TrainConfig& config, const ctc::Alphabet& alphabet,
                  const synth::DatasetManifest& train_manifest,
                  const synth::DatasetManifest& val_manifest,
                  const std::optional<fs::path>& out_dir, const TrainHooks& hooks) {
  config.validate();
  nn::Architecture arch = config.arch;
  arch.num_classes = alphabet.num_classes();
  const auto train_set = load_examples(train_manifest, alphabet, arch);
  const auto val_set = load_examples(val_manifest, alphabet, arch);

  if (!out_dir) return train(config, alphabet, train_set, val_set, hooks);

  std::error_code ec;
  fs::create_directories(*out_dir, ec);
  if (ec) throw Error(Errc::IoFailure, "cannot create " + out_dir->string() + ": " + ec.message());
  std::ofstream metrics(*out_dir / "metrics.jsonl", std::ios::binary | std::ios::trunc);
  if (!metrics) throw Error(Errc::IoFailure, "cannot write metrics log in " + out_dir->string());

  TrainHooks wrapped;
  wrapped.on_epoch = [&](const EpochMetrics& m, const nn::ModelParams& model) {
    metrics << to_json(m).dump() << '\n';
    metrics.flush();
    return hooks.on_epoch ? hooks.on_epoch(m, model) : true;
  };
  TrainResult result = train(config, alphabet, train_set, val_set, wrapped);
  if (!metrics) throw Error(Errc::IoFailure, "failed writing metrics log");
  save_checkpoint(result.best_checkpoint, *out_dir / "best.ckpt");
  save_checkpoint(result.final_checkpoint, *out_dir / "final.ckpt");
  return result;
}

}  // namespace glyphforge::training
