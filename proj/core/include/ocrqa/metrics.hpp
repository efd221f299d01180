#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "ocrqa/alignment.hpp"
#include "ocrqa/text_model.hpp"

namespace ocrqa {

enum class Metric : std::uint8_t { Fca, Ssa, Ossa, Tla };

inline constexpr std::array<Metric, 4> kMetrics = {Metric::Fca, Metric::Ssa, Metric::Ossa,
                                                   Metric::Tla};

std::string_view to_string(Metric m);
std::optional<Metric> parse_metric(std::string_view name);

enum class Verdict : std::uint8_t { Pass, Fail };

std::string_view to_string(Verdict v);

struct MetricConfig {
  double pass_threshold = 0.95;
  /// Clamp reported scores into [0, 1]. Raw values stay available via Accuracy.
  bool clamp_scores = true;
  /// Metric whose score decides pass/fail.
  Metric pass_metric = Metric::Fca;

  /// Throws UsageError unless 0 < pass_threshold <= 1.
  void validate() const;
  double report(const Accuracy& a) const { return a.value(clamp_scores); }
};

// Flexible (reading-order independent) matching ------------------------------

struct FlexPair {
  std::size_t gt_line = 0;
  std::size_t ocr_line = 0;
  std::size_t ocr_begin = 0;  // span inside the original OCR line
  std::size_t ocr_end = 0;
  std::int64_t errors = 0;
};

struct OcrFragment {
  std::size_t ocr_line = 0;
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t length() const noexcept { return end - begin; }
};

struct FlexMatchTrace {
  std::vector<FlexPair> pairs;             // in the order they were chosen
  std::vector<std::size_t> unmatched_gt;   // ascending GT line indices
  std::vector<OcrFragment> leftover_ocr;   // sorted by (line, begin)
  std::vector<std::int64_t> gt_line_errors;  // error charged to each GT line

  std::int64_t pair_errors = 0;
  std::int64_t unmatched_gt_units = 0;
  std::int64_t leftover_ocr_units = 0;

  std::int64_t total_errors() const noexcept {
    return pair_errors + unmatched_gt_units + leftover_ocr_units;
  }
};

/// Greedy line matcher. Each round takes the globally cheapest (GT line, OCR
/// fragment) pair by substring distance per GT item, consumes the matched OCR
/// span and returns its prefix and suffix to the pool. Ties are broken by
/// content only (longer GT line, then GT text, then fragment text), so the
/// error total does not depend on line order. Unmatched GT items and leftover
/// OCR items each cost one error.
FlexMatchTrace flex_match(const std::vector<std::u32string>& gt,
                          const std::vector<std::u32string>& ocr);
FlexMatchTrace flex_match(const std::vector<SymbolLine>& gt, const std::vector<SymbolLine>& ocr);

// Metrics ----------------------------------------------------------------------

struct FlexResult {
  Accuracy accuracy;
  FlexMatchTrace trace;
};

struct OssaResult {
  Accuracy accuracy;
  EditScript script;  // over the flattened symbol sequences
};

struct TlaResult {
  Accuracy accuracy;  // units = t, errors = t - r
  std::vector<std::optional<std::size_t>> matched_ocr_line;  // per GT line
};

/// Flexible character accuracy. Throws UndefinedScoreError for an empty GT.
FlexResult fca(const NormalizedText& gt, const NormalizedText& ocr);
/// String-segment accuracy: flexible matching over segment symbols.
FlexResult ssa(const NormalizedText& gt, const NormalizedText& ocr);
/// Ordered string-segment accuracy over the reading-order symbol sequences.
OssaResult ossa(const NormalizedText& gt, const NormalizedText& ocr);
/// Fraction of GT lines reproduced verbatim, one-to-one.
TlaResult tla(const NormalizedText& gt, const NormalizedText& ocr);

/// FCA after both sides are filtered to class `c`; nullopt when the filtered GT is empty.
std::optional<Accuracy> class_accuracy(const NormalizedText& gt, const NormalizedText& ocr,
                                       CharClass c);

struct SectionScores {
  std::optional<Accuracy> fca;
  std::optional<Accuracy> ssa;
  std::optional<Accuracy> ossa;
  std::optional<Accuracy> tla;

  const std::optional<Accuracy>& get(Metric m) const;
};

struct MetricReport {
  Accuracy fca;
  Accuracy ssa;
  Accuracy ossa;
  Accuracy tla;
  std::map<CharClass, std::optional<Accuracy>> per_class;
  std::map<SectionKind, SectionScores> per_section;
  Verdict output_class = Verdict::Fail;

  struct Traces {
    FlexMatchTrace fca;
    FlexMatchTrace ssa;
    EditScript ossa;
    std::vector<std::optional<std::size_t>> tla;
  } traces;

  const Accuracy& get(Metric m) const;
};

/// Everything at once. Throws UndefinedScoreError when the GT has no text.
MetricReport evaluate(const GroundTruthDoc& gt, const NormalizedText& ocr,
                      const MetricConfig& config);
MetricReport evaluate(const NormalizedText& gt, const NormalizedText& ocr,
                      const MetricConfig& config);

/// Per-section scores. The whole GT is matched against the whole OCR once and
/// each GT line's errors are charged to its section; OCR text left over (and
/// OSSA insertions) has no GT position and counts toward the document total only.
/// Kinds present with an empty body map to all-undefined scores.
std::map<SectionKind, SectionScores> section_metrics(const GroundTruthDoc& gt,
                                                     const NormalizedText& ocr);

Verdict classify_output(const MetricReport& report, const MetricConfig& config);
Verdict classify_score(double score, const MetricConfig& config);

}  // namespace ocrqa
