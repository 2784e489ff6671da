#include "genoogle/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <set>
#include <type_traits>
#include <utility>

#include "genoogle/encoding.hpp"
#include "genoogle/errors.hpp"

namespace genoogle {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& value) {
  Int out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end || value.empty())
    throw ConfigError("value '" + value + "' for " + key + " is not a valid integer");
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  double out = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end || value.empty())
    throw ConfigError("value '" + value + "' for " + key + " is not a valid number");
  return out;
}

struct ParamKey {
  const char* name;
  std::function<std::string(const SearchParams&, const EngineConfig&)> get;
  std::function<void(SearchParams&, EngineConfig&, const std::string&)> set;
};

template <auto Member>
ParamKey search_key(const char* name) {
  using Field = std::remove_cvref_t<decltype(std::declval<SearchParams&>().*Member)>;
  return {name,
          [](const SearchParams& p, const EngineConfig&) {
            if constexpr (std::is_floating_point_v<Field>)
              return format_real(p.*Member);
            else
              return std::to_string(p.*Member);
          },
          [name](SearchParams& p, EngineConfig&, const std::string& v) {
            if constexpr (std::is_floating_point_v<Field>)
              p.*Member = parse_real(name, v);
            else
              p.*Member = parse_int<Field>(name, v);
          }};
}

template <auto Member>
ParamKey engine_key(const char* name) {
  return {name, [](const SearchParams&, const EngineConfig& e) { return std::to_string(e.*Member); },
          [name](SearchParams&, EngineConfig& e, const std::string& v) {
            e.*Member = parse_int<std::uint32_t>(name, v);
          }};
}

const std::vector<ParamKey>& parameter_keys() {
  static const std::vector<ParamKey> keys = {
      search_key<&SearchParams::max_entry_distance>("max-entry-distance"),
      search_key<&SearchParams::min_hsp_length>("min-hsp-length"),
      search_key<&SearchParams::extension_dropoff>("dropoff"),
      search_key<&SearchParams::max_results>("max-results"),
      search_key<&SearchParams::match_score>("match"),
      search_key<&SearchParams::mismatch_score>("mismatch"),
      search_key<&SearchParams::gap_score>("gap"),
      search_key<&SearchParams::band_radius>("band-radius"),
      search_key<&SearchParams::segment_length>("segment-length"),
      search_key<&SearchParams::evalue_lambda>("lambda"),
      search_key<&SearchParams::evalue_k>("k"),
      engine_key<&EngineConfig::query_splits>("query-splits"),
      engine_key<&EngineConfig::align_workers>("workers"),
  };
  return keys;
}

}  // namespace

std::string format_real(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ec == std::errc{} ? ptr : buf);
}

void set_parameter(SearchParams& params, EngineConfig& engine, const std::string& key, const std::string& value) {
  for (const auto& k : parameter_keys()) {
    if (key == k.name) {
      k.set(params, engine, value);
      return;
    }
  }
  throw ConfigError("unknown parameter '" + key + "'");
}

std::vector<std::pair<std::string, std::string>> list_parameters(const SearchParams& params, const EngineConfig& engine) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& k : parameter_keys()) out.emplace_back(k.name, k.get(params, engine));
  return out;
}

const BankDeclaration* RunConfig::find_bank(const std::string& name) const {
  for (const auto& b : banks)
    if (b.name == name) return &b;
  return nullptr;
}

RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  RunConfig config;
  BankDeclaration* bank = nullptr;
  std::set<std::string> names;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& msg) { throw ConfigError("config line " + std::to_string(line_no) + ": " + msg); };

  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    if (text.front() == '[') {
      if (text.back() != ']') fail("unterminated section header");
      const std::string inner = trim(std::string_view(text).substr(1, text.size() - 2));
      if (inner.rfind("bank", 0) != 0 || inner.size() < 6 || (inner[4] != ' ' && inner[4] != '\t'))
        fail("expected [bank <name>]");
      const std::string name = trim(std::string_view(inner).substr(5));
      if (name.empty()) fail("bank section without a name");
      if (!names.insert(name).second) fail("bank '" + name + "' declared twice");
      config.banks.push_back({});
      bank = &config.banks.back();
      bank->name = name;
      bank->directory = base_dir / "banks";
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    const std::string key = trim(std::string_view(text).substr(0, eq));
    const std::string value = trim(std::string_view(text).substr(eq + 1));
    try {
      if (bank == nullptr) {
        set_parameter(config.params, config.engine, key, value);
      } else if (key == "fasta") {
        bank->fasta = base_dir / value;
      } else if (key == "path") {
        bank->directory = base_dir / value;
      } else if (key == "mask") {
        parse_mask(value);
        bank->mask = value;
      } else if (key == "fragments") {
        bank->fragments = parse_int<std::uint32_t>(key, value);
        if (bank->fragments < 1) fail("fragments must be at least 1");
      } else {
        fail("unknown bank key '" + key + "'");
      }
    } catch (const MaskFormatError& e) {
      fail(e.what());
    } catch (const ConfigError& e) {
      if (std::string_view(e.what()).rfind("config line", 0) == 0) throw;
      fail(e.what());
    }
  }
  config.engine.validate();
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  return parse_config(in, path.parent_path());
}

}  // namespace genoogle
