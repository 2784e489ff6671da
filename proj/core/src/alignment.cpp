#include "genoogle/alignment.hpp"

#include <algorithm>
#include <limits>
#include <vector>

#include "genoogle/errors.hpp"
#include "genoogle/search.hpp"

namespace genoogle {

namespace {

constexpr int kNegInf = std::numeric_limits<int>::min() / 4;

enum Move : std::uint8_t { kStop = 0, kDiag = 1, kUp = 2, kLeft = 3 };

// Column range [lo, hi] of each DP row; rows run over a (0..|a|), columns over b.
struct Band {
  std::vector<long> lo;
  std::vector<long> hi;

  bool contains(std::size_t i, long j) const noexcept { return j >= lo[i] && j <= hi[i]; }
};

Band diagonal_band(std::size_t la, std::size_t lb, long radius) {
  Band band;
  band.lo.resize(la + 1);
  band.hi.resize(la + 1);
  for (std::size_t i = 0; i <= la; ++i) {
    band.lo[i] = std::max(0L, static_cast<long>(i) - radius);
    band.hi[i] = std::min(static_cast<long>(lb), static_cast<long>(i) + radius);
  }
  return band;
}

// Band around the straight line from (0, 0) to (la, lb).
Band corner_band(std::size_t la, std::size_t lb, long radius) {
  const long slope = static_cast<long>((lb + la - 1) / la);
  radius = std::max(radius, slope);
  Band band;
  band.lo.resize(la + 1);
  band.hi.resize(la + 1);
  for (std::size_t i = 0; i <= la; ++i) {
    const long center = static_cast<long>((i * lb + la / 2) / la);
    band.lo[i] = std::max(0L, center - radius);
    band.hi[i] = std::min(static_cast<long>(lb), center + radius);
  }
  return band;
}

AlignmentResult run_banded(std::string_view a, std::string_view b, const Band& band, bool local,
                           const SearchParams& p) {
  const std::size_t la = a.size();
  const int gap = p.gap_score;

  std::vector<std::size_t> row_start(la + 2, 0);
  for (std::size_t i = 0; i <= la; ++i)
    row_start[i + 1] = row_start[i] + static_cast<std::size_t>(std::max(0L, band.hi[i] - band.lo[i] + 1));
  std::vector<std::uint8_t> moves(row_start[la + 1], kStop);
  auto move_at = [&](std::size_t i, long j) -> std::uint8_t& {
    return moves[row_start[i] + static_cast<std::size_t>(j - band.lo[i])];
  };

  std::vector<int> prev, cur;
  prev.assign(static_cast<std::size_t>(std::max(0L, band.hi[0] - band.lo[0] + 1)), 0);
  for (long j = band.lo[0]; j <= band.hi[0]; ++j) {
    prev[static_cast<std::size_t>(j - band.lo[0])] = local ? 0 : static_cast<int>(j) * gap;
    move_at(0, j) = (local || j == 0) ? kStop : kLeft;
  }

  int best = 0;
  std::size_t best_i = 0;
  long best_j = 0;

  for (std::size_t i = 1; i <= la; ++i) {
    const long lo = band.lo[i], hi = band.hi[i];
    cur.assign(static_cast<std::size_t>(std::max(0L, hi - lo + 1)), kNegInf);
    const long plo = band.lo[i - 1];
    auto prev_at = [&](long j) { return band.contains(i - 1, j) ? prev[static_cast<std::size_t>(j - plo)] : kNegInf; };
    for (long j = lo; j <= hi; ++j) {
      int value;
      std::uint8_t move;
      if (j == 0) {
        value = local ? 0 : prev_at(0) + gap;
        move = local ? kStop : kUp;
      } else {
        const int d = prev_at(j - 1);
        const int u = prev_at(j);
        const int l = j - 1 >= lo ? cur[static_cast<std::size_t>(j - 1 - lo)] : kNegInf;
        const int diag = d == kNegInf ? kNegInf : d + substitution_score(a[i - 1], b[static_cast<std::size_t>(j - 1)], p);
        const int up = u == kNegInf ? kNegInf : u + gap;
        const int left = l == kNegInf ? kNegInf : l + gap;
        value = std::max({diag, up, left});
        move = value == diag ? kDiag : value == up ? kUp : kLeft;
        if (local && value <= 0) {
          value = 0;
          move = kStop;
        }
      }
      cur[static_cast<std::size_t>(j - lo)] = value;
      move_at(i, j) = move;
      if (local && value > best) {
        best = value;
        best_i = i;
        best_j = j;
      }
    }
    prev.swap(cur);
  }

  std::size_t i = local ? best_i : la;
  long j = local ? best_j : static_cast<long>(b.size());
  AlignmentResult out;
  out.score = local ? best : prev[static_cast<std::size_t>(j - band.lo[la])];
  out.query_end = static_cast<std::uint32_t>(i);
  out.bank_end = static_cast<std::uint32_t>(j);
  if (local && best == 0) return out;

  for (;;) {
    const std::uint8_t move = move_at(i, j);
    if (move == kStop) break;
    if (move == kDiag) {
      out.query_aligned.push_back(a[i - 1]);
      out.bank_aligned.push_back(b[static_cast<std::size_t>(j - 1)]);
      --i;
      --j;
    } else if (move == kUp) {
      out.query_aligned.push_back(a[i - 1]);
      out.bank_aligned.push_back('-');
      --i;
    } else {
      out.query_aligned.push_back('-');
      out.bank_aligned.push_back(b[static_cast<std::size_t>(j - 1)]);
      --j;
    }
  }
  std::reverse(out.query_aligned.begin(), out.query_aligned.end());
  std::reverse(out.bank_aligned.begin(), out.bank_aligned.end());
  out.midline = make_midline(out.query_aligned, out.bank_aligned);
  out.query_begin = static_cast<std::uint32_t>(i);
  out.bank_begin = static_cast<std::uint32_t>(j);
  return out;
}

void check_inputs(std::string_view a, std::string_view b, const SearchParams& p) {
  if (a.empty() || b.empty()) throw DomainError("alignment input is empty");
  if (p.band_radius == 0) throw DomainError("band radius must be at least 1");
}

}  // namespace

std::string make_midline(std::string_view query_aligned, std::string_view bank_aligned) {
  std::string mid(query_aligned.size(), ' ');
  for (std::size_t k = 0; k < mid.size(); ++k)
    if (query_aligned[k] == bank_aligned[k] && query_aligned[k] != '-' && query_aligned[k] != 'N') mid[k] = '|';
  return mid;
}

int rescore_alignment(std::string_view query_aligned, std::string_view bank_aligned, const SearchParams& p) {
  if (query_aligned.size() != bank_aligned.size()) throw DomainError("aligned texts differ in length");
  int score = 0;
  for (std::size_t k = 0; k < query_aligned.size(); ++k) {
    if (query_aligned[k] == '-' || bank_aligned[k] == '-')
      score += p.gap_score;
    else
      score += substitution_score(query_aligned[k], bank_aligned[k], p);
  }
  return score;
}

AlignmentResult banded_smith_waterman(std::string_view a, std::string_view b, const SearchParams& params) {
  check_inputs(a, b, params);
  return run_banded(a, b, diagonal_band(a.size(), b.size(), static_cast<long>(params.band_radius)), true, params);
}

AlignmentResult segmented_align(std::string_view a, std::string_view b, const SearchParams& params) {
  check_inputs(a, b, params);
  if (params.segment_length == 0) throw DomainError("segment length must be at least 1");
  const std::size_t seg = params.segment_length;
  if (std::max(a.size(), b.size()) <= seg) return banded_smith_waterman(a, b, params);

  const std::size_t pieces = std::max<std::size_t>(1, (std::min(a.size(), b.size()) + seg - 1) / seg);
  AlignmentResult out;
  out.query_end = static_cast<std::uint32_t>(a.size());
  out.bank_end = static_cast<std::uint32_t>(b.size());
  for (std::size_t k = 0; k < pieces; ++k) {
    const std::size_t begin = k * seg;
    const bool last = k + 1 == pieces;
    const auto pa = a.substr(begin, last ? std::string_view::npos : seg);
    const auto pb = b.substr(begin, last ? std::string_view::npos : seg);
    const auto part = run_banded(pa, pb, corner_band(pa.size(), pb.size(), static_cast<long>(params.band_radius)),
                                 false, params);
    out.score += part.score;
    out.query_aligned += part.query_aligned;
    out.bank_aligned += part.bank_aligned;
  }
  out.midline = make_midline(out.query_aligned, out.bank_aligned);
  return out;
}

AlignmentResult align_hsp(std::string_view query, std::string_view bank_sequence, const Hsp& hsp,
                          const SearchParams& params) {
  if (hsp.query_start >= hsp.query_end || hsp.query_end > query.size() || hsp.bank_start >= hsp.bank_end ||
      hsp.bank_end > bank_sequence.size())
    throw DomainError("HSP interval outside the aligned sequences");
  auto out = segmented_align(query.substr(hsp.query_start, hsp.query_end - hsp.query_start),
                             bank_sequence.substr(hsp.bank_start, hsp.bank_end - hsp.bank_start), params);
  out.query_begin += hsp.query_start;
  out.query_end += hsp.query_start;
  out.bank_begin += hsp.bank_start;
  out.bank_end += hsp.bank_start;
  return out;
}

}  // namespace genoogle
