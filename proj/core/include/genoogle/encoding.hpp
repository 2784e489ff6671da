#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace genoogle {

// Sentinel written in place of any non-ACGT base once a sequence is normalized.
inline constexpr char kAmbiguousBase = 'N';

inline constexpr unsigned kMaxWordLength = 16;

// Up to 16 bases packed two bits per base, first base in the most
// significant occupied pair. The value doubles as an index bucket address.
struct EncodedWord {
  std::uint32_t value = 0;
  std::uint8_t length = 0;

  friend bool operator==(const EncodedWord&, const EncodedWord&) = default;
};

// A keep/drop pattern over a window of `window()` bases; kept positions are
// concatenated into a word of `weight()` bases.
class SpacedSeedMask {
 public:
  SpacedSeedMask() = default;

  const std::string& pattern() const noexcept { return pattern_; }
  unsigned window() const noexcept { return static_cast<unsigned>(pattern_.size()); }
  unsigned weight() const noexcept { return static_cast<unsigned>(kept_.size()); }
  const std::vector<unsigned>& kept_positions() const noexcept { return kept_; }

  friend bool operator==(const SpacedSeedMask& a, const SpacedSeedMask& b) {
    return a.pattern_ == b.pattern_;
  }

 private:
  friend SpacedSeedMask parse_mask(std::string_view pattern);

  std::string pattern_;
  std::vector<unsigned> kept_;
};

// A=0, C=1, G=2, T=3. Case-insensitive, U is read as T. Throws
// InvalidSymbolError for anything else.
std::uint8_t encode_base(char base, std::size_t position = 0);

// Returns the 2-bit code or 0xFF when `base` is not one of ACGTU.
inline std::uint8_t base_code_or_invalid(char base) noexcept {
  switch (base) {
    case 'A': case 'a': return 0;
    case 'C': case 'c': return 1;
    case 'G': case 'g': return 2;
    case 'T': case 't': case 'U': case 'u': return 3;
    default: return 0xFF;
  }
}

inline char decode_base(std::uint8_t code) noexcept { return "ACGT"[code & 3u]; }

EncodedWord encode_word(std::string_view bases);
std::string decode_word(EncodedWord word);

SpacedSeedMask parse_mask(std::string_view pattern);

// Throws WindowSizeError when window.size() != mask.window().
EncodedWord apply_mask(std::string_view window, const SpacedSeedMask& mask);

// Like apply_mask but returns nullopt when a kept or dropped position holds a
// non-ACGT base; such windows are never indexed nor looked up.
std::optional<EncodedWord> try_apply_mask(std::string_view window, const SpacedSeedMask& mask);

// Upper-cases, maps U to T and IUPAC ambiguity codes to kAmbiguousBase.
// Whitespace is not accepted here; callers strip it first.
std::string normalize_sequence(std::string_view raw);

inline bool is_iupac_ambiguity(char c) noexcept {
  switch (c) {
    case 'N': case 'n': case 'R': case 'r': case 'Y': case 'y': case 'S': case 's':
    case 'W': case 'w': case 'K': case 'k': case 'M': case 'm': case 'B': case 'b':
    case 'D': case 'd': case 'H': case 'h': case 'V': case 'v': case 'X': case 'x':
      return true;
    default:
      return false;
  }
}

}  // namespace genoogle
