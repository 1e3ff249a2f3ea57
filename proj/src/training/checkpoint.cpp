#include "glyphforge/training/checkpoint.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>

#include "glyphforge/error.hpp"
#include "glyphforge/synth/utf8.hpp"

namespace glyphforge::training {

namespace {

constexpr char kMagic[4] = {'G', 'F', 'C', 'K'};

nlohmann::ordered_json arch_to_json(const nn::Architecture& a) {
  nlohmann::ordered_json j;
  j["input_height"] = a.input_height;
  j["input_width"] = a.input_width;
  j["conv1_channels"] = a.conv1_channels;
  j["conv2_channels"] = a.conv2_channels;
  j["hidden_size"] = a.hidden_size;
  j["bilstm_output"] = a.bilstm_output;
  j["num_classes"] = a.num_classes;
  return j;
}

nn::Architecture arch_from_json(const nlohmann::json& j) {
  nn::Architecture a;
  a.input_height = j.at("input_height").get<std::size_t>();
  a.input_width = j.at("input_width").get<std::size_t>();
  a.conv1_channels = j.at("conv1_channels").get<std::size_t>();
  a.conv2_channels = j.at("conv2_channels").get<std::size_t>();
  a.hidden_size = j.at("hidden_size").get<std::size_t>();
  a.bilstm_output = j.at("bilstm_output").get<std::size_t>();
  a.num_classes = j.at("num_classes").get<std::size_t>();
  return a;
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

std::uint32_t crc_of(const unsigned char* data, std::size_t size) {
  uLong crc = crc32(0L, Z_NULL, 0);
  while (size > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(size, 1u << 30));
    crc = crc32(crc, data, chunk);
    data += chunk;
    size -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

Checkpoint make_checkpoint(const nn::ModelParams& model, const ctc::Alphabet& alphabet,
                           std::uint64_t step, nlohmann::json config) {
  if (model.arch.num_classes != alphabet.num_classes()) {
    throw Error(Errc::AlphabetMismatch, "model has " + std::to_string(model.arch.num_classes) +
                                            " classes, alphabet implies " +
                                            std::to_string(alphabet.num_classes()));
  }
  Checkpoint ck;
  ck.arch = model.arch;
  ck.alphabet = alphabet.symbols();
  ck.step = step;
  ck.config = std::move(config);
  for (const auto& [name, t] : model.named_tensors()) {
    CheckpointTensor ct{name, t->shape, {}};
    ct.values.reserve(t->size());
    for (double v : t->values) ct.values.push_back(static_cast<float>(v));
    ck.tensors.push_back(std::move(ct));
  }
  return ck;
}

nn::ModelParams restore_model(const Checkpoint& ck) {
  nn::ModelParams model = nn::ModelParams::initialize(ck.arch, 0);
  auto slots = model.named_tensors();
  if (slots.size() != ck.tensors.size()) {
    throw Error(Errc::ShapeMismatch, "checkpoint holds " + std::to_string(ck.tensors.size()) +
                                         " tensors, architecture needs " + std::to_string(slots.size()));
  }
  for (std::size_t k = 0; k < slots.size(); ++k) {
    auto& [name, t] = slots[k];
    const CheckpointTensor& src = ck.tensors[k];
    if (src.name != name || src.shape != t->shape) {
      throw Error(Errc::ShapeMismatch, "checkpoint tensor '" + src.name + "' " +
                                           nn::to_string(src.shape) + " does not fit '" + name +
                                           "' " + nn::to_string(t->shape));
    }
    t->values.assign(src.values.begin(), src.values.end());
  }
  return model;
}

ctc::Alphabet restore_alphabet(const Checkpoint& ck) { return ctc::Alphabet(ck.alphabet); }

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path) {
  nlohmann::ordered_json header;
  header["format"] = "glyphforge-checkpoint";
  header["architecture"] = arch_to_json(ck.arch);
  header["alphabet"] = ck.alphabet;
  header["blank_index"] = ck.alphabet.size();
  header["step"] = ck.step;
  header["config"] = ck.config;
  auto table = nlohmann::ordered_json::array();
  for (const auto& t : ck.tensors) {
    table.push_back({{"name", t.name}, {"shape", t.shape}});
  }
  header["tensors"] = table;
  const std::string header_text = header.dump();

  std::string payload;
  for (const auto& t : ck.tensors) {
    for (float v : t.values) put_u32(payload, std::bit_cast<std::uint32_t>(v));
  }

  std::string blob(kMagic, 4);
  put_u32(blob, kCheckpointVersion);
  put_u32(blob, static_cast<std::uint32_t>(header_text.size()));
  blob += header_text;
  blob += payload;
  put_u32(blob, crc_of(reinterpret_cast<const unsigned char*>(payload.data()), payload.size()));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  if (!out) throw Error(Errc::IoFailure, "cannot write checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot open checkpoint " + path.string());
  const std::string blob((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto* bytes = reinterpret_cast<const unsigned char*>(blob.data());

  if (blob.size() < 12 || std::memcmp(blob.data(), kMagic, 4) != 0) {
    if (blob.size() >= 4 && std::memcmp(blob.data(), kMagic, 4) == 0) {
      throw Error(Errc::CorruptChecksum, path.string() + " is truncated");
    }
    throw Error(Errc::IoFailure, path.string() + " is not a checkpoint file");
  }
  const std::uint32_t version = get_u32(bytes + 4);
  if (version != kCheckpointVersion) {
    throw Error(Errc::VersionMismatch, path.string() + " has format version " +
                                           std::to_string(version) + ", expected " +
                                           std::to_string(kCheckpointVersion));
  }
  const std::size_t header_len = get_u32(bytes + 8);
  if (blob.size() < 12 + header_len) throw Error(Errc::CorruptChecksum, path.string() + " is truncated");

  Checkpoint ck;
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(blob.substr(12, header_len));
    ck.arch = arch_from_json(header.at("architecture"));
    ck.alphabet = header.at("alphabet").get<std::vector<std::string>>();
    ck.step = header.at("step").get<std::uint64_t>();
    ck.config = header.at("config");
    for (const auto& t : header.at("tensors")) {
      ck.tensors.push_back({t.at("name").get<std::string>(), t.at("shape").get<nn::Shape>(), {}});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::CorruptChecksum, path.string() + ": unreadable header: " + e.what());
  }

  std::size_t floats = 0;
  for (const auto& t : ck.tensors) floats += nn::element_count(t.shape);
  const std::size_t payload_at = 12 + header_len;
  if (blob.size() != payload_at + 4 * floats + 4) {
    throw Error(Errc::CorruptChecksum, path.string() + " has " + std::to_string(blob.size()) +
                                           " bytes, expected " +
                                           std::to_string(payload_at + 4 * floats + 4));
  }
  const std::uint32_t stored = get_u32(bytes + payload_at + 4 * floats);
  if (stored != crc_of(bytes + payload_at, 4 * floats)) {
    throw Error(Errc::CorruptChecksum, path.string() + ": payload CRC32 mismatch");
  }
  const unsigned char* p = bytes + payload_at;
  for (auto& t : ck.tensors) {
    t.values.resize(nn::element_count(t.shape));
    for (float& v : t.values) {
      v = std::bit_cast<float>(get_u32(p));
      p += 4;
    }
  }
  return ck;
}

void require_coverage(const ctc::Alphabet& alphabet, std::span<const std::string> transcripts) {
  std::set<char32_t> missing;
  for (const auto& t : transcripts) {
    for (char32_t cp : alphabet.uncovered(t)) missing.insert(cp);
  }
  if (missing.empty()) return;
  std::string list;
  for (char32_t cp : missing) {
    if (!list.empty()) list += " ";
    list += synth::to_utf8(cp);
  }
  throw Error(Errc::AlphabetMismatch, "transcripts use codepoints missing from the model alphabet: " + list);
}

}  // namespace glyphforge::training
