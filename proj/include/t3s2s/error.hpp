#pragma once

#include <stdexcept>
#include <string>

namespace t3s2s {

enum class ErrorKind {
    TooManyTokens,
    KeywordNotFound,
    AmbiguousKeyword,
    MissingEmbedding,
    DimensionMismatch,
    ZeroEnergyKeyword,
    NonFiniteEmbedding,
    NonFiniteInput,
    ParseError,
    LabelOutOfRange,
    UnknownInstance,
    BadTarget,
    MaskLengthMismatch,
    KTooLarge,
    ConfigError,
    IoError,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

  private:
    ErrorKind kind_;
};

const char* error_kind_name(ErrorKind kind);

}  // namespace t3s2s
