#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ocrqa/metrics.hpp"
#include "ocrqa/test_model.hpp"

namespace ocrqa {

/// Test cases bound to GT/OCR files for a set of systems under test.
struct Suite {
  std::string model_ref;           // as written in the manifest
  std::filesystem::path base_dir;  // manifest directory; refs resolve against it
  TestModel3D model;
  std::vector<std::string> systems;
  std::vector<TestCase> cases;
  std::vector<std::string> warnings;  // e.g. referenced files that do not exist

  std::filesystem::path resolve(const std::string& ref) const { return base_dir / ref; }
};

/// Parses a manifest (`model`, `systems`, `cases`) and validates every case
/// against the model. When `model` is null the manifest's own `model` path is
/// loaded. Missing GT/OCR files become warnings; schema problems throw
/// ParseError and model violations throw ValidationError.
Suite load_manifest(std::string_view bytes, const std::filesystem::path& base_dir,
                    const TestModel3D* model = nullptr);
Suite load_manifest_file(const std::filesystem::path& path, const TestModel3D* model = nullptr);

/// YAML manifest text for `cases` (used to emit OFAT skeletons).
std::string emit_manifest(const std::string& model_ref, const std::vector<std::string>& systems,
                          const std::vector<TestCase>& cases);

struct Evaluation {
  std::string case_id;
  std::string system;
  bool complex_context = false;
  std::optional<MetricReport> report;  // nullopt when skipped
  std::string skipped_reason;

  bool skipped() const noexcept { return !report.has_value(); }
};

struct RunReport {
  std::string model_ref;
  MetricConfig config;
  std::vector<std::string> systems;
  std::vector<Evaluation> evaluations;  // ordered by case id, then manifest system order
};

/// Evaluates every (case, system) pair. `threads` = 0 picks the hardware
/// concurrency. The result does not depend on the thread count.
RunReport run_suite(const Suite& suite, const MetricConfig& config, unsigned threads = 0);

using MetricMeans = std::map<Metric, std::optional<double>>;

struct SystemAggregate {
  std::string system;
  std::size_t evaluated = 0;
  std::size_t passed = 0;
  std::size_t skipped = 0;
  std::optional<double> pass_rate;
  MetricMeans overall;
  std::map<SectionKind, MetricMeans> by_section;
  std::map<CharClass, std::optional<double>> fca_by_class;
  std::optional<double> fca_normal_context;
  std::optional<double> fca_complex_context;
};

struct AggregateTables {
  std::vector<SystemAggregate> systems;  // manifest order
};

/// Unweighted means of reported scores over evaluated cases; undefined scores
/// and skipped cases are left out.
AggregateTables aggregate(const RunReport& report);

enum class ReportFormat { Json, Csv, Markdown };

/// Throws UsageError for anything but json, csv or markdown.
ReportFormat parse_report_format(std::string_view name);

struct ReportFile {
  std::string name;
  std::string content;
};

/// json and markdown render one file; csv renders one file per table.
std::vector<ReportFile> render_report(const RunReport& report, const AggregateTables& tables,
                                      ReportFormat format);

}  // namespace ocrqa
