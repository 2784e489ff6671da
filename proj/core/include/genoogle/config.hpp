#pragma once

// Line-oriented run configuration.
//
//   # comment
//   max-results = 20          global keys: every search parameter plus
//   workers = 4               query-splits and workers
//   [bank mybank]
//   fasta = data/mybank.fasta relative paths resolve against the config file
//   path = banks              directory receiving the formatted fragments
//   mask = 111010010100110111
//   fragments = 2

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "genoogle/engine.hpp"
#include "genoogle/params.hpp"

namespace genoogle {

inline constexpr const char* kDefaultMask = "111010010100110111";

struct BankDeclaration {
  std::string name;
  std::filesystem::path fasta;
  std::filesystem::path directory;
  std::string mask = kDefaultMask;
  std::uint32_t fragments = 1;
};

struct RunConfig {
  std::vector<BankDeclaration> banks;
  SearchParams params;
  EngineConfig engine;

  // nullptr when no bank has that name.
  const BankDeclaration* find_bank(const std::string& name) const;
};

// Throws ConfigError naming the offending line.
RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

// Assigns one search or engine parameter by its config/CLI key.
// Throws ConfigError for an unknown key or a malformed value.
void set_parameter(SearchParams& params, EngineConfig& engine, const std::string& key, const std::string& value);

// Every settable key with its current value, in a fixed order.
std::vector<std::pair<std::string, std::string>> list_parameters(const SearchParams& params, const EngineConfig& engine);

std::string format_real(double value);

}  // namespace genoogle
