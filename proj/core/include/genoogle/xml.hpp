#pragma once

// XML result documents.
//
//   <genoogle version="1.0">
//     <search databank=".." query-id=".." query-length="..">
//       <params max-entry-distance=".." ... k=".."/>
//       <hit seq-id=".." name=".." description="..">
//         <hsp score=".." bit-score=".." e-value=".." query-from=".." query-to=".." hit-from=".." hit-to="..">
//           <qseq>..</qseq> <midline>..</midline> <hseq>..</hseq>
//         </hsp>
//       </hit>
//     </search>
//   </genoogle>
//
// Positions are 1-based and inclusive. E-values use scientific notation with
// six significant digits; other reals use the shortest round-trip form.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "genoogle/search.hpp"

namespace genoogle {

inline constexpr const char* kXmlSchemaVersion = "1.0";

std::string format_evalue(double e_value);

void write_results_xml(std::span<const SearchResult> results, std::ostream& out);
std::string results_to_xml(std::span<const SearchResult> results);
// Throws IoError when the file cannot be written.
void write_results_xml(std::span<const SearchResult> results, const std::filesystem::path& path);

// Parses a document produced by write_results_xml. Throws FormatError on a
// document that does not follow the schema.
std::vector<SearchResult> read_results_xml(const std::filesystem::path& path);
std::vector<SearchResult> parse_results_xml(const std::string& document);

}  // namespace genoogle
