#include "ocrqa/metrics.hpp"

#include <deque>
#include <string>
#include <unordered_map>

#include "ocrqa/error.hpp"

namespace ocrqa {

namespace {

std::vector<std::u32string> char_lines(const NormalizedText& text) {
  std::vector<std::u32string> lines;
  lines.reserve(text.line_count());
  for (const Line& line : text.lines()) lines.push_back(line.chars);
  return lines;
}

void require_nonempty(std::size_t units, std::string_view what) {
  if (units == 0) {
    throw UndefinedScoreError(std::string(what) + " is undefined for an empty ground truth");
  }
}

Accuracy accuracy_of(std::size_t units, std::int64_t errors) {
  return {static_cast<std::int64_t>(units), errors};
}

struct SectionTally {
  std::int64_t chars = 0;
  std::int64_t segments = 0;
  std::int64_t lines = 0;
  std::int64_t fca_errors = 0;
  std::int64_t ssa_errors = 0;
  std::int64_t ossa_errors = 0;
  std::int64_t tla_errors = 0;
};

std::map<SectionKind, SectionScores> attribute_sections(const GroundTruthDoc& doc,
                                                        const FlexMatchTrace& fca_trace,
                                                        const FlexMatchTrace& ssa_trace,
                                                        const EditScript& ossa_script,
                                                        const TlaResult& tla_result) {
  const NormalizedText& gt = doc.full_text();
  const auto& owner = doc.line_sections();

  std::map<SectionKind, SectionTally> tallies;
  for (const Section& section : doc.sections()) tallies[section.kind];

  // Flattened symbol position -> GT line, for OSSA attribution.
  std::vector<std::size_t> symbol_line;
  for (const Line& line : gt.lines()) {
    symbol_line.insert(symbol_line.end(), line.segments.size(), line.index);
  }

  for (const Line& line : gt.lines()) {
    SectionTally& t = tallies[owner[line.index]];
    t.chars += static_cast<std::int64_t>(line.chars.size());
    t.segments += static_cast<std::int64_t>(line.segments.size());
    t.lines += 1;
    t.fca_errors += fca_trace.gt_line_errors[line.index];
    t.ssa_errors += ssa_trace.gt_line_errors[line.index];
    if (!tla_result.matched_ocr_line[line.index]) t.tla_errors += 1;
  }
  for (const EditOp& op : ossa_script.ops) {
    if (op.kind == EditKind::Match || !op.gt_pos) continue;
    tallies[owner[symbol_line[*op.gt_pos]]].ossa_errors += 1;
  }

  std::map<SectionKind, SectionScores> out;
  for (const auto& [kind, t] : tallies) {
    SectionScores scores;
    if (t.chars > 0) {
      scores.fca = Accuracy{t.chars, t.fca_errors};
      scores.ssa = Accuracy{t.segments, t.ssa_errors};
      scores.ossa = Accuracy{t.segments, t.ossa_errors};
      scores.tla = Accuracy{t.lines, t.tla_errors};
    }
    out.emplace(kind, scores);
  }
  return out;
}

}  // namespace

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::Fca:
      return "fca";
    case Metric::Ssa:
      return "ssa";
    case Metric::Ossa:
      return "ossa";
    case Metric::Tla:
      return "tla";
  }
  return "?";
}

std::optional<Metric> parse_metric(std::string_view name) {
  for (Metric m : kMetrics) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

std::string_view to_string(Verdict v) { return v == Verdict::Pass ? "pass" : "fail"; }

void MetricConfig::validate() const {
  if (!(pass_threshold > 0.0 && pass_threshold <= 1.0)) {
    throw UsageError("pass threshold must be in (0, 1], got " + std::to_string(pass_threshold));
  }
}

const std::optional<Accuracy>& SectionScores::get(Metric m) const {
  switch (m) {
    case Metric::Fca:
      return fca;
    case Metric::Ssa:
      return ssa;
    case Metric::Ossa:
      return ossa;
    case Metric::Tla:
      break;
  }
  return tla;
}

const Accuracy& MetricReport::get(Metric m) const {
  switch (m) {
    case Metric::Fca:
      return fca;
    case Metric::Ssa:
      return ssa;
    case Metric::Ossa:
      return ossa;
    case Metric::Tla:
      break;
  }
  return tla;
}

FlexResult fca(const NormalizedText& gt, const NormalizedText& ocr) {
  require_nonempty(gt.char_count(), "FCA");
  FlexResult result;
  result.trace = flex_match(char_lines(gt), char_lines(ocr));
  result.accuracy = accuracy_of(gt.char_count(), result.trace.total_errors());
  return result;
}

FlexResult ssa(const NormalizedText& gt, const NormalizedText& ocr) {
  require_nonempty(gt.segment_count(), "SSA");
  const SymbolizedPair symbols = build_symbols(gt, ocr);
  FlexResult result;
  result.trace = flex_match(symbols.gt, symbols.ocr);
  result.accuracy = accuracy_of(gt.segment_count(), result.trace.total_errors());
  return result;
}

OssaResult ossa(const NormalizedText& gt, const NormalizedText& ocr) {
  require_nonempty(gt.segment_count(), "OSSA");
  const SymbolizedPair symbols = build_symbols(gt, ocr);
  const SymbolLine flat_gt = flatten(symbols.gt);
  const SymbolLine flat_ocr = flatten(symbols.ocr);
  OssaResult result;
  result.script = levenshtein(flat_gt, flat_ocr);
  result.accuracy =
      accuracy_of(flat_gt.size(), static_cast<std::int64_t>(result.script.error_count));
  return result;
}

TlaResult tla(const NormalizedText& gt, const NormalizedText& ocr) {
  require_nonempty(gt.line_count(), "TLA");
  std::unordered_map<std::string_view, std::deque<std::size_t>> available;
  for (const Line& line : ocr.lines()) available[line.text].push_back(line.index);

  TlaResult result;
  result.matched_ocr_line.resize(gt.line_count());
  std::int64_t misses = 0;
  for (const Line& line : gt.lines()) {
    auto it = available.find(line.text);
    if (it == available.end() || it->second.empty()) {
      ++misses;
      continue;
    }
    result.matched_ocr_line[line.index] = it->second.front();
    it->second.pop_front();
  }
  result.accuracy = accuracy_of(gt.line_count(), misses);
  return result;
}

std::optional<Accuracy> class_accuracy(const NormalizedText& gt, const NormalizedText& ocr,
                                       CharClass c) {
  const NormalizedText filtered_gt = filter_by_class(gt, c);
  if (filtered_gt.empty()) return std::nullopt;
  return fca(filtered_gt, filter_by_class(ocr, c)).accuracy;
}

MetricReport evaluate(const GroundTruthDoc& doc, const NormalizedText& ocr,
                      const MetricConfig& config) {
  config.validate();
  const NormalizedText& gt = doc.full_text();
  require_nonempty(gt.char_count(), "accuracy");

  FlexResult f = fca(gt, ocr);
  FlexResult s = ssa(gt, ocr);
  OssaResult o = ossa(gt, ocr);
  TlaResult t = tla(gt, ocr);

  MetricReport report;
  report.fca = f.accuracy;
  report.ssa = s.accuracy;
  report.ossa = o.accuracy;
  report.tla = t.accuracy;
  for (CharClass c : kCharClasses) report.per_class[c] = class_accuracy(gt, ocr, c);
  report.per_section = attribute_sections(doc, f.trace, s.trace, o.script, t);
  report.traces = {std::move(f.trace), std::move(s.trace), std::move(o.script),
                   std::move(t.matched_ocr_line)};
  report.output_class = classify_output(report, config);
  return report;
}

MetricReport evaluate(const NormalizedText& gt, const NormalizedText& ocr,
                      const MetricConfig& config) {
  std::vector<Section> sections;
  if (!gt.empty()) sections.push_back({SectionKind::Other, gt});
  return evaluate(GroundTruthDoc(std::move(sections)), ocr, config);
}

std::map<SectionKind, SectionScores> section_metrics(const GroundTruthDoc& doc,
                                                     const NormalizedText& ocr) {
  if (doc.empty()) {
    std::map<SectionKind, SectionScores> out;
    for (const Section& section : doc.sections()) out[section.kind];
    return out;
  }
  return evaluate(doc, ocr, MetricConfig{}).per_section;
}

Verdict classify_score(double score, const MetricConfig& config) {
  return score >= config.pass_threshold ? Verdict::Pass : Verdict::Fail;
}

Verdict classify_output(const MetricReport& report, const MetricConfig& config) {
  const Accuracy& a = report.get(config.pass_metric);
  if (a.units <= 0) throw UndefinedScoreError("pass/fail needs a defined score");
  return classify_score(config.report(a), config);
}

}  // namespace ocrqa
