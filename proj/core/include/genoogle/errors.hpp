#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace genoogle {

// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidSymbolError : public Error {
 public:
  InvalidSymbolError(char symbol, std::size_t position)
      : Error("invalid symbol '" + std::string(1, symbol) + "' at position " +
              std::to_string(position)),
        symbol_(symbol),
        position_(position) {}

  char symbol() const noexcept { return symbol_; }
  std::size_t position() const noexcept { return position_; }

 private:
  char symbol_;
  std::size_t position_;
};

class LengthError : public Error { using Error::Error; };
class CorruptWordError : public Error { using Error::Error; };
class MaskFormatError : public Error { using Error::Error; };
class WindowSizeError : public Error { using Error::Error; };

class IngestError : public Error { using Error::Error; };
class CapacityError : public Error { using Error::Error; };
class FormatError : public Error { using Error::Error; };
class CorruptionError : public Error { using Error::Error; };
class NotFoundError : public Error { using Error::Error; };
class DomainError : public Error { using Error::Error; };
class ProvenanceError : public Error { using Error::Error; };
class QueryTooShortError : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };
class IoError : public Error { using Error::Error; };

}  // namespace genoogle
