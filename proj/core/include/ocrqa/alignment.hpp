#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ranges>
#include <span>
#include <string_view>
#include <vector>

#include "ocrqa/error.hpp"

namespace ocrqa {

enum class EditKind : std::uint8_t { Match, Substitute, Delete, Insert };

std::string_view to_string(EditKind kind);

/// One step of an alignment between a reference (GT) and a hypothesis (OCR).
/// Delete: a GT item the OCR lost. Insert: an OCR item with no GT counterpart.
struct EditOp {
  EditKind kind;
  std::optional<std::size_t> gt_pos;
  std::optional<std::size_t> ocr_pos;

  friend bool operator==(const EditOp&, const EditOp&) = default;
};

struct EditScript {
  std::vector<EditOp> ops;
  std::size_t error_count = 0;
};

/// Where a needle aligns best inside a haystack: haystack[start, end).
struct SubstringMatch {
  std::size_t error_count = 0;
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const noexcept { return end - start; }
  friend bool operator==(const SubstringMatch&, const SubstringMatch&) = default;
};

/// Among spans with the minimal error count and the smallest start, pick the
/// shortest or the longest one.
enum class SpanPreference : std::uint8_t { Shortest, Longest };

/// Exact character-accuracy ratio (n - E) / n. Not clamped.
struct Accuracy {
  std::int64_t units = 0;   // n
  std::int64_t errors = 0;  // E

  double raw() const noexcept {
    return static_cast<double>(units - errors) / static_cast<double>(units);
  }
  double clamped() const noexcept { return std::clamp(raw(), 0.0, 1.0); }
  double value(bool clamp) const noexcept { return clamp ? clamped() : raw(); }

  friend bool operator==(const Accuracy&, const Accuracy&) = default;
};

namespace detail {

struct Cell {
  std::uint32_t cost;
  std::uint32_t start;
};

}  // namespace detail

/// Error count only, O(min) memory.
template <typename T>
std::size_t edit_distance(std::span<const T> a, std::span<const T> b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({diag + (a[i - 1] == b[j - 1] ? 0 : 1), up + 1, row[j - 1] + 1});
      diag = up;
    }
  }
  return row[b.size()];
}

/// Minimum-cost alignment of gt against ocr with unit costs. The backtrace
/// prefers Match, then Substitute, then Delete, then Insert.
template <typename T>
EditScript levenshtein(std::span<const T> gt, std::span<const T> ocr) {
  const std::size_t n = gt.size();
  const std::size_t m = ocr.size();
  const std::size_t width = m + 1;
  std::vector<std::uint32_t> dist((n + 1) * width);
  auto at = [&](std::size_t i, std::size_t j) -> std::uint32_t& { return dist[i * width + j]; };

  for (std::size_t j = 0; j <= m; ++j) at(0, j) = static_cast<std::uint32_t>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    at(i, 0) = static_cast<std::uint32_t>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      const std::uint32_t sub = at(i - 1, j - 1) + (gt[i - 1] == ocr[j - 1] ? 0u : 1u);
      at(i, j) = std::min({sub, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }

  EditScript script;
  script.error_count = at(n, m);
  std::size_t i = n;
  std::size_t j = m;
  while (i > 0 || j > 0) {
    const std::uint32_t here = at(i, j);
    if (i > 0 && j > 0) {
      const bool same = gt[i - 1] == ocr[j - 1];
      if (same && at(i - 1, j - 1) == here) {
        script.ops.push_back({EditKind::Match, i - 1, j - 1});
        --i, --j;
        continue;
      }
      if (!same && at(i - 1, j - 1) + 1 == here) {
        script.ops.push_back({EditKind::Substitute, i - 1, j - 1});
        --i, --j;
        continue;
      }
    }
    if (i > 0 && at(i - 1, j) + 1 == here) {
      script.ops.push_back({EditKind::Delete, i - 1, std::nullopt});
      --i;
      continue;
    }
    script.ops.push_back({EditKind::Insert, std::nullopt, j - 1});
    --j;
  }
  std::reverse(script.ops.begin(), script.ops.end());
  return script;
}

/// min over every contiguous haystack[s, e) of edit_distance(needle, haystack[s, e)).
/// Ties go to the smaller start, then to the shorter (or longer) span.
template <typename T>
SubstringMatch substring_distance(std::span<const T> needle, std::span<const T> haystack,
                                  SpanPreference preference = SpanPreference::Shortest) {
  const std::size_t m = haystack.size();
  // prev/cur hold, for each haystack end j, the best cost of aligning a needle
  // prefix against haystack[s, j) and the smallest such s.
  std::vector<detail::Cell> prev(m + 1);
  std::vector<detail::Cell> cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = {0, static_cast<std::uint32_t>(j)};

  auto better = [](detail::Cell a, detail::Cell b) {
    return a.cost < b.cost || (a.cost == b.cost && a.start < b.start);
  };

  for (std::size_t i = 1; i <= needle.size(); ++i) {
    cur[0] = {static_cast<std::uint32_t>(i), 0};
    for (std::size_t j = 1; j <= m; ++j) {
      detail::Cell best{prev[j - 1].cost + (needle[i - 1] == haystack[j - 1] ? 0u : 1u),
                        prev[j - 1].start};
      const detail::Cell skip_needle{prev[j].cost + 1, prev[j].start};
      const detail::Cell skip_hay{cur[j - 1].cost + 1, cur[j - 1].start};
      if (better(skip_needle, best)) best = skip_needle;
      if (better(skip_hay, best)) best = skip_hay;
      cur[j] = best;
    }
    std::swap(prev, cur);
  }

  SubstringMatch result{needle.size(), 0, 0};
  bool found = false;
  for (std::size_t j = 0; j <= m; ++j) {
    const auto cost = static_cast<std::size_t>(prev[j].cost);
    const auto start = static_cast<std::size_t>(prev[j].start);
    bool take = !found || cost < result.error_count ||
                (cost == result.error_count && start < result.start);
    if (!take && found && cost == result.error_count && start == result.start) {
      // Ends are scanned in increasing order, so a later end is a longer span.
      take = preference == SpanPreference::Longest;
    }
    if (take) {
      result = {cost, start, j};
      found = true;
    }
  }
  return result;
}

/// (n - E) / n against the levenshtein error count. Throws UndefinedScoreError when n = 0.
template <typename T>
Accuracy character_accuracy(std::span<const T> gt, std::span<const T> ocr) {
  if (gt.empty()) throw UndefinedScoreError("character accuracy is undefined for an empty reference");
  return {static_cast<std::int64_t>(gt.size()), static_cast<std::int64_t>(edit_distance(gt, ocr))};
}

/// Rebuilds the GT sequence from the OCR sequence by following `script`.
/// Returns nullopt if the script is inconsistent with the two sequences.
template <typename T>
std::optional<std::vector<T>> replay(const EditScript& script, std::span<const T> gt,
                                     std::span<const T> ocr) {
  std::vector<T> out;
  std::size_t next_gt = 0;
  std::size_t next_ocr = 0;
  std::size_t errors = 0;
  for (const EditOp& op : script.ops) {
    const bool has_gt = op.gt_pos.has_value();
    const bool has_ocr = op.ocr_pos.has_value();
    if (has_gt && *op.gt_pos != next_gt) return std::nullopt;
    if (has_ocr && *op.ocr_pos != next_ocr) return std::nullopt;
    switch (op.kind) {
      case EditKind::Match:
        if (!has_gt || !has_ocr || next_ocr >= ocr.size() || next_gt >= gt.size() ||
            !(ocr[next_ocr] == gt[next_gt]))
          return std::nullopt;
        out.push_back(ocr[next_ocr]);
        ++next_gt, ++next_ocr;
        break;
      case EditKind::Substitute:
        if (!has_gt || !has_ocr || next_gt >= gt.size() || next_ocr >= ocr.size())
          return std::nullopt;
        out.push_back(gt[next_gt]);
        ++next_gt, ++next_ocr, ++errors;
        break;
      case EditKind::Delete:
        if (!has_gt || has_ocr || next_gt >= gt.size()) return std::nullopt;
        out.push_back(gt[next_gt]);
        ++next_gt, ++errors;
        break;
      case EditKind::Insert:
        if (has_gt || !has_ocr || next_ocr >= ocr.size()) return std::nullopt;
        ++next_ocr, ++errors;
        break;
    }
  }
  if (next_gt != gt.size() || next_ocr != ocr.size() || errors != script.error_count)
    return std::nullopt;
  return out;
}

// Convenience overloads for strings, string views and vectors.
template <typename R>
concept ContiguousSequence = std::ranges::contiguous_range<R> && std::ranges::sized_range<R>;

template <ContiguousSequence R>
auto as_span(const R& r) {
  using T = std::ranges::range_value_t<R>;
  return std::span<const T>(std::ranges::data(r), std::ranges::size(r));
}

template <ContiguousSequence R>
std::size_t edit_distance(const R& a, const R& b) {
  return edit_distance(as_span(a), as_span(b));
}

template <ContiguousSequence R>
EditScript levenshtein(const R& gt, const R& ocr) {
  return levenshtein(as_span(gt), as_span(ocr));
}

template <ContiguousSequence R>
SubstringMatch substring_distance(const R& needle, const R& haystack,
                                  SpanPreference preference = SpanPreference::Shortest) {
  return substring_distance(as_span(needle), as_span(haystack), preference);
}

template <ContiguousSequence R>
Accuracy character_accuracy(const R& gt, const R& ocr) {
  return character_accuracy(as_span(gt), as_span(ocr));
}

}  // namespace ocrqa
