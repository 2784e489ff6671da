#include "genoogle/xml.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "genoogle/config.hpp"
#include "genoogle/engine.hpp"
#include "genoogle/errors.hpp"

namespace genoogle {

namespace {

std::string escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

class Attributes {
 public:
  Attributes& add(const char* name, const std::string& value) {
    text_ += ' ';
    text_ += name;
    text_ += "=\"";
    text_ += escape(value);
    text_ += '"';
    return *this;
  }
  template <typename Int>
  Attributes& add(const char* name, Int value) requires std::is_integral_v<Int> {
    return add(name, std::to_string(value));
  }
  const std::string& str() const noexcept { return text_; }

 private:
  std::string text_;
};

using boost::property_tree::ptree;

const ptree& child(const ptree& node, const char* name) {
  auto it = node.find(name);
  if (it == node.not_found()) throw FormatError(std::string("missing <") + name + "> element");
  return it->second;
}

std::string attribute(const ptree& node, const char* name) {
  auto attrs = node.get_child_optional("<xmlattr>");
  if (!attrs) throw FormatError(std::string("missing attribute ") + name);
  auto value = attrs->get_optional<std::string>(name);
  if (!value) throw FormatError(std::string("missing attribute ") + name);
  return *value;
}

template <typename Int>
Int int_attribute(const ptree& node, const char* name) {
  const std::string text = attribute(node, name);
  Int out{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw FormatError(std::string("attribute ") + name + " is not an integer: " + text);
  return out;
}

double real_attribute(const ptree& node, const char* name) {
  const std::string text = attribute(node, name);
  double out = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw FormatError(std::string("attribute ") + name + " is not a number: " + text);
  return out;
}

}  // namespace

std::string format_evalue(double e_value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, e_value, std::chars_format::scientific, 5);
  return std::string(buf, ec == std::errc{} ? ptr : buf);
}

void write_results_xml(std::span<const SearchResult> results, std::ostream& out) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<genoogle version=\"" << kXmlSchemaVersion << "\">\n";
  for (const auto& r : results) {
    out << "  <search"
        << Attributes().add("databank", r.bank_name).add("query-id", r.query_id).add("query-length", r.query_length).str()
        << ">\n";
    Attributes params;
    EngineConfig unused;
    for (const auto& [key, value] : list_parameters(r.params, unused))
      if (key != "query-splits" && key != "workers") params.add(key.c_str(), value);
    out << "    <params" << params.str() << "/>\n";

    for (const auto& subject : r.subjects) {
      out << "    <hit"
          << Attributes().add("seq-id", subject.seq_id).add("name", subject.name).add("description", subject.description).str()
          << ">\n";
      for (const auto& h : r.hsps) {
        if (h.seq_id != subject.seq_id) continue;
        out << "      <hsp"
            << Attributes()
                   .add("score", h.raw_score)
                   .add("bit-score", format_real(h.bit_score))
                   .add("e-value", format_evalue(h.e_value))
                   .add("query-from", h.query_begin + 1)
                   .add("query-to", h.query_end)
                   .add("hit-from", h.bank_begin + 1)
                   .add("hit-to", h.bank_end)
                   .str()
            << ">\n";
        out << "        <qseq>" << escape(h.query_aligned) << "</qseq>\n";
        out << "        <midline>" << escape(h.midline) << "</midline>\n";
        out << "        <hseq>" << escape(h.bank_aligned) << "</hseq>\n";
        out << "      </hsp>\n";
      }
      out << "    </hit>\n";
    }
    out << "  </search>\n";
  }
  out << "</genoogle>\n";
}

std::string results_to_xml(std::span<const SearchResult> results) {
  std::ostringstream out;
  write_results_xml(results, out);
  return out.str();
}

void write_results_xml(std::span<const SearchResult> results, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_results_xml(results, out);
  out.flush();
  if (!out) throw IoError("cannot write " + path.string());
}

std::vector<SearchResult> parse_results_xml(const std::string& document) {
  ptree tree;
  try {
    std::istringstream in(document);
    boost::property_tree::read_xml(in, tree);
  } catch (const boost::property_tree::xml_parser_error& e) {
    throw FormatError(std::string("malformed XML: ") + e.what());
  }
  const ptree& root = child(tree, "genoogle");
  if (attribute(root, "version") != kXmlSchemaVersion) throw FormatError("unsupported result schema version");

  std::vector<SearchResult> out;
  for (const auto& [tag, node] : root) {
    if (tag != "search") continue;
    SearchResult r;
    r.bank_name = attribute(node, "databank");
    r.query_id = attribute(node, "query-id");
    r.query_length = int_attribute<std::uint32_t>(node, "query-length");
    const ptree& params = child(node, "params");
    EngineConfig unused;
    for (const auto& [key, value] : list_parameters(r.params, unused)) {
      if (key == "query-splits" || key == "workers") continue;
      try {
        set_parameter(r.params, unused, key, attribute(params, key.c_str()));
      } catch (const ConfigError& e) {
        throw FormatError(e.what());
      }
    }
    for (const auto& [hit_tag, hit] : node) {
      if (hit_tag != "hit") continue;
      ResultSubject subject{int_attribute<std::uint32_t>(hit, "seq-id"), attribute(hit, "name"),
                            attribute(hit, "description")};
      for (const auto& [hsp_tag, hsp] : hit) {
        if (hsp_tag != "hsp") continue;
        ResultHsp h;
        h.seq_id = subject.seq_id;
        h.raw_score = int_attribute<int>(hsp, "score");
        h.bit_score = real_attribute(hsp, "bit-score");
        h.e_value = real_attribute(hsp, "e-value");
        h.query_begin = int_attribute<std::uint32_t>(hsp, "query-from") - 1;
        h.query_end = int_attribute<std::uint32_t>(hsp, "query-to");
        h.bank_begin = int_attribute<std::uint32_t>(hsp, "hit-from") - 1;
        h.bank_end = int_attribute<std::uint32_t>(hsp, "hit-to");
        h.query_aligned = child(hsp, "qseq").data();
        h.midline = child(hsp, "midline").data();
        h.bank_aligned = child(hsp, "hseq").data();
        r.hsps.push_back(std::move(h));
      }
      r.subjects.push_back(std::move(subject));
    }
    order_result_hsps(r.hsps);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<SearchResult> read_results_xml(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_results_xml(buf.str());
}

}  // namespace genoogle
