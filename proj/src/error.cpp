#include "t3s2s/error.hpp"

namespace t3s2s {

const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::TooManyTokens: return "TooManyTokens";
        case ErrorKind::KeywordNotFound: return "KeywordNotFound";
        case ErrorKind::AmbiguousKeyword: return "AmbiguousKeyword";
        case ErrorKind::MissingEmbedding: return "MissingEmbedding";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::ZeroEnergyKeyword: return "ZeroEnergyKeyword";
        case ErrorKind::NonFiniteEmbedding: return "NonFiniteEmbedding";
        case ErrorKind::NonFiniteInput: return "NonFiniteInput";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::LabelOutOfRange: return "LabelOutOfRange";
        case ErrorKind::UnknownInstance: return "UnknownInstance";
        case ErrorKind::BadTarget: return "BadTarget";
        case ErrorKind::MaskLengthMismatch: return "MaskLengthMismatch";
        case ErrorKind::KTooLarge: return "KTooLarge";
        case ErrorKind::ConfigError: return "ConfigError";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace t3s2s
