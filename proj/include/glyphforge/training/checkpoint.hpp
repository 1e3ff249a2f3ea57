#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "glyphforge/ctc/alphabet.hpp"
#include "glyphforge/nn/model.hpp"

namespace glyphforge::training {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointTensor {
  std::string name;
  nn::Shape shape;
  std::vector<float> values;

  friend bool operator==(const CheckpointTensor&, const CheckpointTensor&) = default;
};

// Parameters are stored as 32-bit floats; make_checkpoint rounds the
// model's doubles once, and save/load preserve those floats bit for bit.
struct Checkpoint {
  nn::Architecture arch;
  std::vector<std::string> alphabet;  // symbols; blank is index alphabet.size()
  std::uint64_t step = 0;
  nlohmann::json config = nlohmann::json::object();
  std::vector<CheckpointTensor> tensors;
};

Checkpoint make_checkpoint(const nn::ModelParams& model, const ctc::Alphabet& alphabet,
                           std::uint64_t step, nlohmann::json config = nlohmann::json::object());

nn::ModelParams restore_model(const Checkpoint& checkpoint);
ctc::Alphabet restore_alphabet(const Checkpoint& checkpoint);

// Layout: "GFCK", u32 version, u32 header length, UTF-8 JSON header,
// little-endian f32 payload, u32 CRC32 of the payload.
void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
// Throws IoFailure, VersionMismatch or CorruptChecksum (truncation included).
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Throws AlphabetMismatch naming every transcript codepoint the alphabet
// cannot encode.
void require_coverage(const ctc::Alphabet& alphabet, std::span<const std::string> transcripts);

}  // namespace glyphforge::training
