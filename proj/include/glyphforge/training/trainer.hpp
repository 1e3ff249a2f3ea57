#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "glyphforge/ctc/alphabet.hpp"
#include "glyphforge/imaging/raster.hpp"
#include "glyphforge/nn/model.hpp"
#include "glyphforge/synth/dataset.hpp"
#include "glyphforge/training/checkpoint.hpp"
#include "glyphforge/training/optimizer.hpp"

namespace glyphforge::training {

struct TrainConfig {
  int epochs = 50;
  std::size_t batch_size = 16;
  OptimizerConfig optimizer;
  std::uint64_t seed = 0;
  double split_ratio = 0.8;
  int patience = 5;  // epochs without validation improvement; 0 disables
  // num_classes is taken from the alphabet at train time.
  nn::Architecture arch;

  void validate() const;
  nlohmann::ordered_json to_json() const;
};

// One network input with its encoded target.
struct Example {
  nn::Tensor input;  // [1, 1, H, W]
  std::vector<int> target;
  std::string transcript;
};

// The chain every image goes through before the network, at training and at
// test time alike: tight_crop then resize to the architecture's input size.
nn::Tensor prepare_input(const imaging::GrayRaster& image, const nn::Architecture& arch);

Example make_example(const imaging::GrayRaster& image, const std::string& transcript,
                     const ctc::Alphabet& alphabet, const nn::Architecture& arch);

std::vector<Example> load_examples(const synth::DatasetManifest& manifest,
                                   const ctc::Alphabet& alphabet, const nn::Architecture& arch);

struct EpochMetrics {
  int epoch = 0;
  double train_loss = 0.0;  // mean over the epoch's samples, as trained
  double val_loss = 0.0;
  double val_wer = 0.0;
};

nlohmann::ordered_json to_json(const EpochMetrics& m);

struct TrainResult {
  Checkpoint final_checkpoint;
  Checkpoint best_checkpoint;  // lowest validation loss
  int best_epoch = 0;
  std::vector<EpochMetrics> log;
};

struct TrainHooks {
  // Called after every epoch; returning false stops training.
  std::function<bool(const EpochMetrics&, const nn::ModelParams&)> on_epoch;
};

// Seeded shuffle, mini-batches of mean CTC loss, one optimizer step per
// batch. Throws NonFiniteLoss naming the step when a loss or gradient stops
// being finite.
TrainResult train(const TrainConfig& config, const ctc::Alphabet& alphabet,
                  std::span<const Example> train_set, std::span<const Example> val_set,
                  const TrainHooks& hooks = {});

// Manifest-level entry point. With an output directory it appends one line
// per epoch to metrics.jsonl and keeps best.ckpt and final.ckpt there.
TrainResult train(const TrainConfig& config, const ctc::Alphabet& alphabet,
                  const synth::DatasetManifest& train_manifest,
                  const synth::DatasetManifest& val_manifest,
                  const std::optional<std::filesystem::path>& out_dir, const TrainHooks& hooks = {});

struct Prediction {
  std::string transcript;
  double mean_confidence = 0.0;  // mean per-frame top-1 probability
  double min_confidence = 0.0;
};

Prediction predict(const nn::ModelParams& model, const ctc::Alphabet& alphabet, const nn::Tensor& input);

// Greedy decodes plus mean CTC loss over a set.
struct SetEvaluation {
  std::vector<std::string> predictions;
  double mean_loss = 0.0;
  double wer = 0.0;
};

SetEvaluation evaluate_set(const nn::ModelParams& model, const ctc::Alphabet& alphabet,
                           std::span<const Example> examples);

}  // namespace glyphforge::training
