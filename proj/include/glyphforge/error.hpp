#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace glyphforge {

// Every failure the toolkit reports carries one of these codes so callers
// (the CLI in particular) can branch on the kind without parsing messages.
enum class Errc {
  InvalidArgument,
  ZeroDimension,
  EmptyInk,
  HeightMismatch,
  OverlapTooLarge,
  MissingDirectory,
  UnreadableImage,
  EmptyCorpus,
  NotUtf8,
  EmptyLexicon,
  Uncoverable,
  UnknownLabel,
  NoCoverableWords,
  IoFailure,
  MalformedAnnotation,
  BoxOutOfBounds,
  ShapeMismatch,
  EmptySequence,
  NoRecordedGraph,
  DoubleBackward,
  IndexOutOfRange,
  InfeasibleTarget,
  InstanceTooLarge,
  EmptyManifest,
  NonFiniteLoss,
  AlphabetMismatch,
  VersionMismatch,
  CorruptChecksum,
  LengthMismatch,
  EmptyReference,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace glyphforge
