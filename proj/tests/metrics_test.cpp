#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ocrqa/error.hpp"
#include "ocrqa/metrics.hpp"
#include "oracle.hpp"

using namespace ocrqa;

namespace {

NormalizedText text(const std::vector<std::string>& lines) {
  std::string joined;
  for (const std::string& l : lines) joined += l + "\n";
  return normalize(joined);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> random_lines(std::mt19937& rng) {
  static const std::vector<std::string> words = {"ab", "ba", "a", "b", "abc", "c", "ca", "1.0", "$"};
  std::uniform_int_distribution<int> nlines(1, 5), nwords(1, 3);
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  std::vector<std::string> out(static_cast<std::size_t>(nlines(rng)));
  for (std::string& l : out) {
    for (int w = nwords(rng); w > 0; --w) l += (l.empty() ? "" : " ") + words[pick(rng)];
  }
  return out;
}

void expect_accuracy(const Accuracy& a, std::int64_t n, std::int64_t e) {
  EXPECT_EQ(a.units, n);
  EXPECT_EQ(a.errors, e);
}

}  // namespace

TEST(Fca, MissingLine) {
  const FlexResult r = fca(text({"ab", "cd"}), text({"ab"}));
  expect_accuracy(r.accuracy, 4, 2);
  EXPECT_EQ(r.trace.unmatched_gt, std::vector<std::size_t>{1});
}

TEST(Fca, MergedSegments) {
  const FlexResult r = fca(text({"San Jose, CA"}), text({"San Jose,CA"}));
  expect_accuracy(r.accuracy, 12, 1);
  EXPECT_DOUBLE_EQ(r.accuracy.raw(), 11.0 / 12.0);
}

TEST(Fca, SwappedLinesCostNothing) {
  expect_accuracy(fca(text({"A B", "C D"}), text({"C D", "A B"})).accuracy, 6, 0);
}

TEST(Fca, OneGtLineConsumesOneFragment) {
  const FlexResult r = fca(text({"Tax $1.10"}), text({"Tax", "$1.10"}));
  expect_accuracy(r.accuracy, 9, 7);
  EXPECT_EQ(r.trace.leftover_ocr_units, 3);
}

TEST(Fca, ResidualFragmentsReturnToThePool) {
  const FlexResult r = fca(text({"Tax", "$1.10"}), text({"Tax $1.10"}));
  expect_accuracy(r.accuracy, 8, 1);
  EXPECT_EQ(r.trace.pairs.size(), 2u);
}

TEST(Fca, ExtraOcrTextCounts) {
  const FlexResult r = fca(text({"ab"}), text({"ab", "xyz"}));
  expect_accuracy(r.accuracy, 2, 3);
  EXPECT_DOUBLE_EQ(r.accuracy.clamped(), 0.0);
  EXPECT_DOUBLE_EQ(r.accuracy.raw(), -0.5);
}

TEST(Fca, EmptyGroundTruthIsUndefined) {
  EXPECT_THROW(fca(NormalizedText{}, text({"x"})), UndefinedScoreError);
  EXPECT_THROW(evaluate(NormalizedText{}, text({"x"}), MetricConfig{}), UndefinedScoreError);
}

TEST(Fca, EmptyOcrMeansEveryCharacterIsAnError) {
  expect_accuracy(fca(text({"abc", "d"}), NormalizedText{}).accuracy, 4, 4);
}

TEST(Fca, TraceAccountsForEveryError) {
  std::mt19937 rng(21);
  for (int i = 0; i < 300; ++i) {
    const NormalizedText gt = text(random_lines(rng));
    const NormalizedText ocr = text(random_lines(rng));
    const FlexResult r = fca(gt, ocr);
    const FlexMatchTrace& t = r.trace;
    EXPECT_EQ(t.total_errors(), r.accuracy.errors);
    std::int64_t per_line = 0;
    for (std::int64_t e : t.gt_line_errors) per_line += e;
    EXPECT_EQ(per_line + t.leftover_ocr_units, t.total_errors());
    std::int64_t pairs = 0;
    for (const FlexPair& p : t.pairs) pairs += p.errors;
    EXPECT_EQ(pairs, t.pair_errors);
    std::int64_t leftover = 0;
    for (const OcrFragment& f : t.leftover_ocr) leftover += static_cast<std::int64_t>(f.length());
    EXPECT_EQ(leftover, t.leftover_ocr_units);
  }
}

TEST(Fca, MatchesNaiveGreedyOracle) {
  std::mt19937 rng(22);
  for (int i = 0; i < 300; ++i) {
    const std::vector<std::string> g = random_lines(rng);
    const std::vector<std::string> o = random_lines(rng);
    const FlexResult r = fca(text(g), text(o));
    ASSERT_EQ(static_cast<std::size_t>(r.accuracy.errors), oracle::flex_errors(g, o));
  }
}

TEST(Fca, MatchesNaiveGreedyOracleOnLongerTexts) {
  std::mt19937 rng(25);
  for (int i = 0; i < 20; ++i) {
    std::vector<std::string> g, o;
    for (int k = 0; k < 6; ++k) {
      const auto more_g = random_lines(rng);
      const auto more_o = random_lines(rng);
      g.insert(g.end(), more_g.begin(), more_g.end());
      o.insert(o.end(), more_o.begin(), more_o.end());
    }
    const FlexResult r = fca(text(g), text(o));
    ASSERT_EQ(static_cast<std::size_t>(r.accuracy.errors), oracle::flex_errors(g, o));
  }
}

TEST(Fca, ReadingOrderIndependent) {
  std::mt19937 rng(23);
  for (int i = 0; i < 200; ++i) {
    std::vector<std::string> g = random_lines(rng);
    std::vector<std::string> o = random_lines(rng);
    const Accuracy base = fca(text(g), text(o)).accuracy;
    std::shuffle(g.begin(), g.end(), rng);
    std::shuffle(o.begin(), o.end(), rng);
    EXPECT_EQ(fca(text(g), text(o)).accuracy, base);
  }
}

TEST(Ssa, ReadingOrderIndependent) {
  std::mt19937 rng(24);
  for (int i = 0; i < 200; ++i) {
    std::vector<std::string> g = random_lines(rng);
    std::vector<std::string> o = random_lines(rng);
    const Accuracy base = ssa(text(g), text(o)).accuracy;
    std::shuffle(g.begin(), g.end(), rng);
    std::shuffle(o.begin(), o.end(), rng);
    EXPECT_EQ(ssa(text(g), text(o)).accuracy, base);
  }
}

TEST(Ssa, MergedSegments) {
  expect_accuracy(ssa(text({"San Jose, CA"}), text({"San Jose,CA"})).accuracy, 3, 2);
}

TEST(Ossa, MergedSegments) {
  expect_accuracy(ossa(text({"San Jose, CA"}), text({"San Jose,CA"})).accuracy, 3, 2);
}

TEST(SsaOssa, SeparateReadingOrder) {
  const NormalizedText gt = text({"A B", "C D"});
  const NormalizedText ocr = text({"C D", "A B"});
  expect_accuracy(ssa(gt, ocr).accuracy, 4, 0);
  const OssaResult o = ossa(gt, ocr);
  expect_accuracy(o.accuracy, 4, 4);
  EXPECT_DOUBLE_EQ(o.accuracy.clamped(), 0.0);
  expect_accuracy(tla(gt, ocr).accuracy, 2, 0);
}

TEST(Tla, MissingLine) {
  const TlaResult r = tla(text({"ab", "cd"}), text({"ab"}));
  expect_accuracy(r.accuracy, 2, 1);
  EXPECT_EQ(r.matched_ocr_line[0], 0u);
  EXPECT_FALSE(r.matched_ocr_line[1].has_value());
}

TEST(Tla, EachOcrLineMatchesOnce) {
  expect_accuracy(tla(text({"a", "a"}), text({"a"})).accuracy, 2, 1);
  expect_accuracy(tla(text({"a", "a"}), text({"a", "x", "a"})).accuracy, 2, 0);
  expect_accuracy(tla(text({"a"}), text({"a", "a"})).accuracy, 1, 0);
}

TEST(ClassAccuracy, UndefinedWhenClassAbsent) {
  EXPECT_FALSE(class_accuracy(text({"abc"}), text({"abc"}), CharClass::Digit).has_value());
  const auto d = class_accuracy(text({"a1 b2"}), text({"a1 b3"}), CharClass::Digit);
  ASSERT_TRUE(d.has_value());
  expect_accuracy(*d, 2, 1);
}

TEST(Evaluate, MissingLineExample) {
  const MetricReport r = evaluate(text({"ab", "cd"}), text({"ab"}), MetricConfig{});
  EXPECT_DOUBLE_EQ(r.fca.raw(), 0.5);
  EXPECT_DOUBLE_EQ(r.ssa.raw(), 0.5);
  EXPECT_DOUBLE_EQ(r.ossa.raw(), 0.5);
  EXPECT_DOUBLE_EQ(r.tla.raw(), 0.5);
  EXPECT_EQ(r.output_class, Verdict::Fail);
}

TEST(Evaluate, BundledReceiptMatchesOracle) {
  const GroundTruthDoc gt = parse_ground_truth(slurp(OCRQA_DATA_DIR "/receipt/gt.txt"));
  const NormalizedText ocr = normalize(slurp(OCRQA_DATA_DIR "/receipt/ocr.txt"));
  const MetricReport r = evaluate(gt, ocr, MetricConfig{});
  expect_accuracy(r.fca, 177, 9);
  expect_accuracy(r.ssa, 33, 5);
  expect_accuracy(r.ossa, 33, 7);
  expect_accuracy(r.tla, 12, 3);
  expect_accuracy(*r.per_class.at(CharClass::Alphabet), 99, 1);
  expect_accuracy(*r.per_class.at(CharClass::Digit), 43, 1);
  expect_accuracy(*r.per_class.at(CharClass::Special), 14, 0);
  expect_accuracy(*r.per_section.at(SectionKind::Store).fca, 46, 2);
  expect_accuracy(*r.per_section.at(SectionKind::Items).fca, 43, 0);
  expect_accuracy(*r.per_section.at(SectionKind::Transaction).fca, 52, 4);
  expect_accuracy(*r.per_section.at(SectionKind::Misc).fca, 36, 0);
  EXPECT_EQ(r.traces.fca.leftover_ocr_units, 3);
  EXPECT_EQ(r.output_class, Verdict::Fail);
}

TEST(SectionMetrics, ErrorsSumToDocumentTotalMinusLeftover) {
  const GroundTruthDoc gt = parse_ground_truth(slurp(OCRQA_DATA_DIR "/receipt/gt.txt"));
  const NormalizedText ocr = normalize(slurp(OCRQA_DATA_DIR "/receipt/ocr.txt"));
  const MetricReport r = evaluate(gt, ocr, MetricConfig{});
  std::int64_t units = 0, errors = 0;
  for (const auto& [kind, s] : r.per_section) {
    units += s.fca->units;
    errors += s.fca->errors;
  }
  EXPECT_EQ(units, r.fca.units);
  EXPECT_EQ(errors + r.traces.fca.leftover_ocr_units, r.fca.errors);
}

TEST(SectionMetrics, EmptySectionIsUndefined) {
  const GroundTruthDoc gt = parse_ground_truth("#section: store\nACME\n#section: misc\n");
  const auto s = section_metrics(gt, text({"ACME"}));
  ASSERT_TRUE(s.contains(SectionKind::Misc));
  EXPECT_FALSE(s.at(SectionKind::Misc).fca.has_value());
  EXPECT_EQ(s.at(SectionKind::Store).fca, (Accuracy{4, 0}));
}

TEST(Classify, ThresholdIsInclusive) {
  MetricConfig config;
  EXPECT_EQ(classify_score(0.95, config), Verdict::Pass);
  EXPECT_EQ(classify_score(0.9499, config), Verdict::Fail);
  EXPECT_EQ(classify_score(1.0, config), Verdict::Pass);
}

TEST(Classify, UsesConfiguredMetric) {
  MetricConfig config;
  config.pass_metric = Metric::Tla;
  const MetricReport r = evaluate(text({"San Jose, CA"}), text({"San Jose, CA"}), config);
  EXPECT_EQ(r.output_class, Verdict::Pass);
  const MetricReport merged = evaluate(text({"San Jose, CA"}), text({"San Jose,CA"}), config);
  EXPECT_EQ(merged.output_class, Verdict::Fail);
}

TEST(MetricConfig, RejectsThresholdOutOfRange) {
  for (double t : {0.0, -0.1, 1.01}) {
    MetricConfig c;
    c.pass_threshold = t;
    EXPECT_THROW(c.validate(), UsageError);
  }
  MetricConfig one;
  one.pass_threshold = 1.0;
  EXPECT_NO_THROW(one.validate());
}

TEST(MetricNames, RoundTrip) {
  for (Metric m : kMetrics) EXPECT_EQ(parse_metric(to_string(m)), m);
  EXPECT_FALSE(parse_metric("wer").has_value());
}
