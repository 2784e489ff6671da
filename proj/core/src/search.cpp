#include "genoogle/search.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <tuple>
#include <unordered_map>

#include "genoogle/engine.hpp"
#include "genoogle/errors.hpp"

namespace genoogle {

void SearchParams::validate() const {
  if (extension_dropoff <= 0) throw ConfigError("dropoff must be positive");
  if (!(match_score > 0 && mismatch_score < 0)) throw ConfigError("scores need match > 0 > mismatch");
  if (gap_score >= 0) throw ConfigError("gap score must be negative");
  if (band_radius < 1) throw ConfigError("band radius must be at least 1");
  if (segment_length < 1) throw ConfigError("segment length must be at least 1");
  if (!(evalue_lambda > 0) || !(evalue_k > 0)) throw ConfigError("e-value lambda and K must be positive");
}

void SearchParams::validate(const SpacedSeedMask& mask) const {
  validate();
  if (max_entry_distance < mask.window())
    throw ConfigError("max entry distance " + std::to_string(max_entry_distance) + " is below the window length " +
                      std::to_string(mask.window()));
  if (min_hsp_length < mask.weight())
    throw ConfigError("minimum HSP length " + std::to_string(min_hsp_length) + " is below the mask weight " +
                      std::to_string(mask.weight()));
}

std::vector<QueryWord> process_query(std::string_view query, const SpacedSeedMask& mask, std::uint32_t offset) {
  const unsigned m = mask.window();
  if (query.size() < m)
    throw QueryTooShortError("query of " + std::to_string(query.size()) + " bases is shorter than the window length " +
                             std::to_string(m));
  std::vector<QueryWord> words;
  words.reserve(query.size() - m + 1);
  for (std::size_t start = 0; start + m <= query.size(); ++start) {
    if (auto word = try_apply_mask(query.substr(start, m), mask))
      words.push_back({offset + static_cast<std::uint32_t>(start), *word});
  }
  return words;
}

std::vector<SequenceHits> retrieve_hits(const InvertedIndex& index, std::span<const QueryWord> words) {
  struct Flat {
    std::uint32_t seq_id;
    Hit hit;
  };
  std::vector<Flat> flat;
  for (const auto& qw : words)
    for (const auto& entry : index.lookup(qw.word)) flat.push_back({entry.seq_id, {qw.query_pos, entry.position}});
  std::sort(flat.begin(), flat.end(), [](const Flat& a, const Flat& b) {
    return std::tie(a.seq_id, a.hit.bank_pos, a.hit.query_pos) < std::tie(b.seq_id, b.hit.bank_pos, b.hit.query_pos);
  });

  std::vector<SequenceHits> out;
  for (const auto& f : flat) {
    if (out.empty() || out.back().seq_id != f.seq_id) out.push_back({f.seq_id, {}});
    out.back().hits.push_back(f.hit);
  }
  return out;
}

std::vector<Area> chain_hits(std::span<const Hit> hits, unsigned window, const SearchParams& params) {
  std::vector<Area> areas;
  if (hits.empty()) return areas;
  const long limit = params.max_entry_distance;
  auto diagonal = [](const Hit& h) { return static_cast<long>(h.bank_pos) - static_cast<long>(h.query_pos); };

  Hit seed = hits.front(), last = seed;
  Area area{seed.query_pos, seed.query_pos + window, seed.bank_pos, seed.bank_pos + window};
  for (std::size_t k = 1; k < hits.size(); ++k) {
    const Hit& h = hits[k];
    const long bank_gap = std::labs(static_cast<long>(h.bank_pos) - static_cast<long>(last.bank_pos));
    const long query_gap = std::labs(static_cast<long>(h.query_pos) - static_cast<long>(last.query_pos));
    const long drift = std::labs(diagonal(h) - diagonal(seed));
    if (bank_gap <= limit && query_gap <= limit && drift <= limit) {
      area.query_start = std::min(area.query_start, h.query_pos);
      area.query_end = std::max(area.query_end, h.query_pos + window);
      area.bank_start = std::min(area.bank_start, h.bank_pos);
      area.bank_end = std::max(area.bank_end, h.bank_pos + window);
    } else {
      areas.push_back(area);
      seed = h;
      area = {h.query_pos, h.query_pos + window, h.bank_pos, h.bank_pos + window};
    }
    last = h;
  }
  areas.push_back(area);
  return areas;
}

std::vector<Hsp> filter_hsps(std::uint32_t seq_id, std::span<const Area> areas, const SearchParams& params) {
  std::vector<Hsp> out;
  for (const auto& a : areas) {
    Hsp h{seq_id, a.query_start, a.query_end, a.bank_start, a.bank_end};
    if (h.length() >= params.min_hsp_length) out.push_back(h);
  }
  return out;
}

namespace {

// Number of extra positions an X-drop walk accepts; `step(k)` scores the k-th
// pair away from the anchor and `room` bounds the walk.
template <typename Step>
std::uint32_t xdrop_walk(std::uint32_t room, std::int32_t dropoff, Step&& step) {
  long score = 0, best = 0;
  std::uint32_t best_len = 0;
  for (std::uint32_t k = 0; k < room; ++k) {
    score += step(k);
    if (score > best) {
      best = score;
      best_len = k + 1;
    } else if (best - score > dropoff) {
      break;
    }
  }
  return best_len;
}

}  // namespace

Hsp extend_hsp(std::string_view query, std::string_view bank_sequence, const Hsp& hsp, const SearchParams& params) {
  Hsp out = hsp;
  const std::uint32_t right_room = static_cast<std::uint32_t>(
      std::min(query.size() - std::min<std::size_t>(query.size(), hsp.query_end),
               bank_sequence.size() - std::min<std::size_t>(bank_sequence.size(), hsp.bank_end)));
  const std::uint32_t right = xdrop_walk(right_room, params.extension_dropoff, [&](std::uint32_t k) {
    return substitution_score(query[hsp.query_end + k], bank_sequence[hsp.bank_end + k], params);
  });
  const std::uint32_t left_room = std::min(hsp.query_start, hsp.bank_start);
  const std::uint32_t left = xdrop_walk(left_room, params.extension_dropoff, [&](std::uint32_t k) {
    return substitution_score(query[hsp.query_start - 1 - k], bank_sequence[hsp.bank_start - 1 - k], params);
  });
  out.query_start -= left;
  out.bank_start -= left;
  out.query_end += right;
  out.bank_end += right;
  return out;
}

std::vector<Hsp> merge_overlapping(std::vector<Hsp> hsps) {
  auto overlaps = [](const Hsp& a, const Hsp& b) {
    return a.query_start < b.query_end && b.query_start < a.query_end && a.bank_start < b.bank_end &&
           b.bank_start < a.bank_end;
  };
  std::sort(hsps.begin(), hsps.end());
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < hsps.size(); ++i) {
      for (std::size_t j = i + 1; j < hsps.size();) {
        if (overlaps(hsps[i], hsps[j])) {
          Hsp& a = hsps[i];
          const Hsp& b = hsps[j];
          a.query_start = std::min(a.query_start, b.query_start);
          a.query_end = std::max(a.query_end, b.query_end);
          a.bank_start = std::min(a.bank_start, b.bank_start);
          a.bank_end = std::max(a.bank_end, b.bank_end);
          hsps.erase(hsps.begin() + static_cast<std::ptrdiff_t>(j));
          changed = true;
        } else {
          ++j;
        }
      }
    }
  }
  std::sort(hsps.begin(), hsps.end());
  return hsps;
}

std::vector<Hsp> select_top(std::vector<Hsp> hsps, const SearchParams& params) {
  std::sort(hsps.begin(), hsps.end(), [](const Hsp& a, const Hsp& b) {
    const auto la = a.length(), lb = b.length();
    if (la != lb) return la > lb;
    return std::tie(a.seq_id, a.bank_start, a.query_start, a.bank_end, a.query_end) <
           std::tie(b.seq_id, b.bank_start, b.query_start, b.bank_end, b.query_end);
  });
  if (params.max_results != 0 && hsps.size() > params.max_results) hsps.resize(params.max_results);
  return hsps;
}

HspStatistics score_hsp(double raw_score, std::uint64_t query_length, std::uint64_t bank_bases,
                        const SearchParams& params) {
  if (!(params.evalue_lambda > 0) || !(params.evalue_k > 0))
    throw ConfigError("e-value lambda and K must be positive");
  const double lambda = params.evalue_lambda, k = params.evalue_k;
  HspStatistics s;
  s.bit_score = (lambda * raw_score - std::log(k)) / std::numbers::ln2;
  s.e_value = k * static_cast<double>(query_length) * static_cast<double>(bank_bases) * std::exp(-lambda * raw_score);
  return s;
}

void order_result_hsps(std::vector<ResultHsp>& hsps) {
  std::sort(hsps.begin(), hsps.end(), [](const ResultHsp& a, const ResultHsp& b) {
    if (a.raw_score != b.raw_score) return a.raw_score > b.raw_score;
    if (a.e_value != b.e_value) return a.e_value < b.e_value;
    return std::tie(a.seq_id, a.bank_begin, a.query_begin, a.bank_end, a.query_end, a.query_aligned, a.bank_aligned) <
           std::tie(b.seq_id, b.bank_begin, b.query_begin, b.bank_end, b.query_end, b.query_aligned, b.bank_aligned);
  });
}

namespace pipeline {

std::vector<Hsp> candidate_hsps(std::uint32_t seq_id, std::vector<Hit> hits, unsigned window,
                                const SearchParams& params) {
  std::sort(hits.begin(), hits.end());
  const auto areas = chain_hits(hits, window, params);
  return filter_hsps(seq_id, areas, params);
}

bool finish_hsp(std::string_view query, std::string_view bank_sequence, const Hsp& hsp, std::uint64_t bank_bases,
                const SearchParams& params, ResultHsp& out) {
  const auto alignment = align_hsp(query, bank_sequence, hsp, params);
  if (alignment.empty()) return false;
  const auto stats = score_hsp(alignment.score, query.size(), bank_bases, params);
  out.seq_id = hsp.seq_id;
  out.raw_score = alignment.score;
  out.bit_score = stats.bit_score;
  out.e_value = stats.e_value;
  out.query_begin = alignment.query_begin;
  out.query_end = alignment.query_end;
  out.bank_begin = alignment.bank_begin;
  out.bank_end = alignment.bank_end;
  out.query_aligned = alignment.query_aligned;
  out.midline = alignment.midline;
  out.bank_aligned = alignment.bank_aligned;
  return true;
}

SearchResult assemble(const Engine& engine, const std::string& query_id, std::uint32_t query_length,
                      const SearchParams& params, std::vector<ResultHsp> hsps) {
  order_result_hsps(hsps);
  SearchResult result;
  result.bank_name = engine.bank_name();
  result.query_id = query_id;
  result.query_length = query_length;
  result.params = params;
  std::vector<bool> seen(engine.sequence_count(), false);
  for (const auto& h : hsps) {
    if (seen[h.seq_id]) continue;
    seen[h.seq_id] = true;
    const auto& meta = engine.sequence_meta(h.seq_id);
    result.subjects.push_back({h.seq_id, meta.name, meta.description});
  }
  result.hsps = std::move(hsps);
  return result;
}

}  // namespace pipeline

SearchResult search(const Engine& engine, std::string_view query, const std::string& query_id,
                    const SearchParams& params) {
  params.validate(engine.mask());
  const std::string bases = normalize_sequence(query);
  const auto words = process_query(bases, engine.mask());
  const unsigned m = engine.mask().window();

  std::map<std::uint32_t, std::vector<Hit>> hits_by_sequence;
  for (std::uint32_t f = 0; f < engine.fragment_count(); ++f) {
    const Fragment& fragment = engine.fragment(f);
    for (auto& group : retrieve_hits(fragment.index, words)) {
      auto& dest = hits_by_sequence[fragment.global_ids[group.seq_id]];
      dest.insert(dest.end(), group.hits.begin(), group.hits.end());
    }
  }

  std::vector<Hsp> merged;
  for (auto& [seq_id, hits] : hits_by_sequence) {
    auto candidates = pipeline::candidate_hsps(seq_id, std::move(hits), m, params);
    if (candidates.empty()) continue;
    const std::string subject = engine.sequence_bases(seq_id);
    for (auto& h : candidates) h = extend_hsp(bases, subject, h, params);
    for (const auto& h : merge_overlapping(std::move(candidates))) merged.push_back(h);
  }

  const auto selected = select_top(std::move(merged), params);
  std::unordered_map<std::uint32_t, std::string> subjects;
  std::vector<ResultHsp> results;
  for (const auto& h : selected) {
    auto it = subjects.find(h.seq_id);
    if (it == subjects.end()) it = subjects.emplace(h.seq_id, engine.sequence_bases(h.seq_id)).first;
    ResultHsp r;
    if (pipeline::finish_hsp(bases, it->second, h, engine.total_bases(), params, r)) results.push_back(std::move(r));
  }
  return pipeline::assemble(engine, query_id, static_cast<std::uint32_t>(bases.size()), params, std::move(results));
}

}  // namespace genoogle
