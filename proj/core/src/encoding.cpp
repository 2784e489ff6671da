#include "genoogle/encoding.hpp"

#include "genoogle/errors.hpp"

namespace genoogle {

std::uint8_t encode_base(char base, std::size_t position) {
  const std::uint8_t code = base_code_or_invalid(base);
  if (code == 0xFF) throw InvalidSymbolError(base, position);
  return code;
}

EncodedWord encode_word(std::string_view bases) {
  if (bases.empty() || bases.size() > kMaxWordLength)
    throw LengthError("word length " + std::to_string(bases.size()) + " outside [1,16]");
  std::uint32_t value = 0;
  for (std::size_t i = 0; i < bases.size(); ++i)
    value = (value << 2) | encode_base(bases[i], i);
  return {value, static_cast<std::uint8_t>(bases.size())};
}

std::string decode_word(EncodedWord word) {
  if (word.length == 0 || word.length > kMaxWordLength)
    throw CorruptWordError("word length " + std::to_string(word.length) + " outside [1,16]");
  if (word.length < kMaxWordLength && word.value >= (std::uint32_t{1} << (2 * word.length)))
    throw CorruptWordError("word value " + std::to_string(word.value) + " does not fit " +
                           std::to_string(word.length) + " bases");
  std::string out(word.length, 'A');
  std::uint32_t v = word.value;
  for (std::size_t i = word.length; i-- > 0;) {
    out[i] = decode_base(v & 3u);
    v >>= 2;
  }
  return out;
}

SpacedSeedMask parse_mask(std::string_view pattern) {
  if (pattern.empty()) throw MaskFormatError("empty mask");
  SpacedSeedMask mask;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (pattern[i] == '1') {
      mask.kept_.push_back(static_cast<unsigned>(i));
    } else if (pattern[i] != '0') {
      throw MaskFormatError("mask character '" + std::string(1, pattern[i]) + "' at position " +
                            std::to_string(i) + " is not 0 or 1");
    }
  }
  if (mask.kept_.empty() || mask.kept_.size() > kMaxWordLength)
    throw MaskFormatError("mask weight " + std::to_string(mask.kept_.size()) +
                          " outside [1,16]");
  if (pattern.front() != '1' || pattern.back() != '1')
    throw MaskFormatError("mask must start and end with 1: " + std::string(pattern));
  mask.pattern_ = std::string(pattern);
  return mask;
}

EncodedWord apply_mask(std::string_view window, const SpacedSeedMask& mask) {
  if (window.size() != mask.window())
    throw WindowSizeError("window of " + std::to_string(window.size()) +
                          " bases does not match mask length " + std::to_string(mask.window()));
  std::uint32_t value = 0;
  for (unsigned pos : mask.kept_positions()) value = (value << 2) | encode_base(window[pos], pos);
  return {value, static_cast<std::uint8_t>(mask.weight())};
}

std::optional<EncodedWord> try_apply_mask(std::string_view window, const SpacedSeedMask& mask) {
  if (window.size() != mask.window())
    throw WindowSizeError("window of " + std::to_string(window.size()) +
                          " bases does not match mask length " + std::to_string(mask.window()));
  for (char c : window)
    if (base_code_or_invalid(c) == 0xFF) return std::nullopt;
  std::uint32_t value = 0;
  for (unsigned pos : mask.kept_positions()) value = (value << 2) | base_code_or_invalid(window[pos]);
  return EncodedWord{value, static_cast<std::uint8_t>(mask.weight())};
}

std::string normalize_sequence(std::string_view raw) {
  std::string out(raw.size(), 'A');
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const std::uint8_t code = base_code_or_invalid(raw[i]);
    if (code != 0xFF)
      out[i] = decode_base(code);
    else if (is_iupac_ambiguity(raw[i]))
      out[i] = kAmbiguousBase;
    else
      throw InvalidSymbolError(raw[i], i);
  }
  return out;
}

}  // namespace genoogle
