#include "glyphforge/error.hpp"

namespace glyphforge {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::ZeroDimension: return "ZeroDimension";
    case Errc::EmptyInk: return "EmptyInk";
    case Errc::HeightMismatch: return "HeightMismatch";
    case Errc::OverlapTooLarge: return "OverlapTooLarge";
    case Errc::MissingDirectory: return "MissingDirectory";
    case Errc::UnreadableImage: return "UnreadableImage";
    case Errc::EmptyCorpus: return "EmptyCorpus";
    case Errc::NotUtf8: return "NotUtf8";
    case Errc::EmptyLexicon: return "EmptyLexicon";
    case Errc::Uncoverable: return "Uncoverable";
    case Errc::UnknownLabel: return "UnknownLabel";
    case Errc::NoCoverableWords: return "NoCoverableWords";
    case Errc::IoFailure: return "IoFailure";
    case Errc::MalformedAnnotation: return "MalformedAnnotation";
    case Errc::BoxOutOfBounds: return "BoxOutOfBounds";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::EmptySequence: return "EmptySequence";
    case Errc::NoRecordedGraph: return "NoRecordedGraph";
    case Errc::DoubleBackward: return "DoubleBackward";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::InfeasibleTarget: return "InfeasibleTarget";
    case Errc::InstanceTooLarge: return "InstanceTooLarge";
    case Errc::EmptyManifest: return "EmptyManifest";
    case Errc::NonFiniteLoss: return "NonFiniteLoss";
    case Errc::AlphabetMismatch: return "AlphabetMismatch";
    case Errc::VersionMismatch: return "VersionMismatch";
    case Errc::CorruptChecksum: return "CorruptChecksum";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::EmptyReference: return "EmptyReference";
  }
  return "Unknown";
}

}  // namespace glyphforge
