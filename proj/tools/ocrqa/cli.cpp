#include "ocrqa/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "ocrqa/error.hpp"
#include "ocrqa/harness.hpp"
#include "ocrqa/metrics.hpp"
#include "ocrqa/test_model.hpp"
#include "ocrqa/text_model.hpp"

namespace ocrqa::cli {

namespace {

using nlohmann::json;

constexpr const char* kThresholdEnv = "OCRQA_THRESHOLD";

enum class OutputFormat { Text, Json };

struct Options {
  // eval
  std::string gt_path;
  std::string ocr_path;
  std::string metrics = "fca,ssa,ossa,tla,class,section";
  std::optional<double> threshold;
  std::string format;
  // suite / model / table
  std::string manifest_path;
  std::string model_path;
  std::string report_dir;
  std::string base_path;
  std::string out_path;
  std::string csv_path;
  std::vector<std::string> systems;
  unsigned threads = 0;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << content;
}

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", v * 100.0);
  return buf;
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

OutputFormat parse_output_format(const std::string& name) {
  if (name.empty() || name == "text") return OutputFormat::Text;
  if (name == "json") return OutputFormat::Json;
  throw UsageError("unknown output format '" + name + "' (expected text or json)");
}

// Flag wins over environment, environment over the default.
MetricConfig resolve_config(const std::optional<double>& flag) {
  MetricConfig config;
  if (flag) {
    config.pass_threshold = *flag;
  } else if (const char* env = std::getenv(kThresholdEnv); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const double value = std::strtod(env, &end);
    if (end == env || *end != '\0') {
      throw UsageError(std::string(kThresholdEnv) + " is not a number: '" + env + "'");
    }
    config.pass_threshold = value;
  }
  config.validate();
  return config;
}

struct MetricSelection {
  std::set<Metric> metrics;
  bool classes = false;
  bool sections = false;
};

MetricSelection parse_selection(const std::string& list) {
  MetricSelection sel;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (item == "class") {
      sel.classes = true;
    } else if (item == "section") {
      sel.sections = true;
    } else if (auto m = parse_metric(item)) {
      sel.metrics.insert(*m);
    } else {
      throw UsageError("unknown metric '" + item + "' (expected fca, ssa, ossa, tla, class, section)");
    }
  }
  if (sel.metrics.empty() && !sel.classes && !sel.sections) {
    throw UsageError("--metrics selects nothing");
  }
  return sel;
}

json accuracy_json(const std::optional<Accuracy>& a, const MetricConfig& config) {
  if (!a) return nullptr;
  return {{"score", config.report(*a)}, {"units", a->units}, {"errors", a->errors}};
}

// eval ----------------------------------------------------------------------------

int cmd_eval(const Options& opt, std::ostream& out) {
  const OutputFormat format = parse_output_format(opt.format);
  const MetricSelection sel = parse_selection(opt.metrics);
  const MetricConfig config = resolve_config(opt.threshold);

  const GroundTruthDoc gt = parse_ground_truth(read_file(opt.gt_path));
  const NormalizedText ocr = normalize(read_file(opt.ocr_path));
  if (gt.empty()) throw UndefinedScoreError("ground truth '" + opt.gt_path + "' has no text");
  const MetricReport report = evaluate(gt, ocr, config);

  if (format == OutputFormat::Json) {
    json doc = json::object();
    doc["threshold"] = config.pass_threshold;
    doc["pass_metric"] = std::string(to_string(config.pass_metric));
    doc["result"] = std::string(to_string(report.output_class));
    for (Metric m : sel.metrics) doc[std::string(to_string(m))] = accuracy_json(report.get(m), config);
    if (sel.classes) {
      json classes = json::object();
      for (const auto& [c, a] : report.per_class) classes[std::string(to_string(c))] = accuracy_json(a, config);
      doc["per_class"] = classes;
    }
    if (sel.sections) {
      json sections = json::object();
      for (const auto& [kind, scores] : report.per_section) {
        json s = json::object();
        for (Metric m : kMetrics) s[std::string(to_string(m))] = accuracy_json(scores.get(m), config);
        sections[std::string(to_string(kind))] = s;
      }
      doc["per_section"] = sections;
    }
    out << doc.dump(2) << "\n";
    return kSuccess;
  }

  for (Metric m : sel.metrics) {
    const Accuracy& a = report.get(m);
    out << to_string(m) << " " << fixed(config.report(a)) << "  (n=" << a.units
        << " E=" << a.errors << ")\n";
  }
  if (sel.classes) {
    for (const auto& [c, a] : report.per_class) {
      out << "class " << to_string(c) << " " << (a ? fixed(config.report(*a)) : "n/a") << "\n";
    }
  }
  if (sel.sections) {
    for (const auto& [kind, scores] : report.per_section) {
      out << "section " << to_string(kind);
      for (Metric m : kMetrics) {
        const auto& a = scores.get(m);
        out << " " << to_string(m) << "=" << (a ? fixed(config.report(*a)) : "n/a");
      }
      out << "\n";
    }
  }
  out << "result " << to_string(report.output_class) << " (" << to_string(config.pass_metric)
      << " >= " << fixed(config.pass_threshold) << ")\n";
  return kSuccess;
}

// suite run -----------------------------------------------------------------------

int cmd_suite_run(const Options& opt, std::ostream& out, std::ostream& err) {
  const ReportFormat format = parse_report_format(opt.format.empty() ? "json" : opt.format);
  const MetricConfig config = resolve_config(opt.threshold);

  const Suite suite = load_manifest_file(opt.manifest_path);
  for (const std::string& w : suite.warnings) err << "warning: " << w << "\n";
  const RunReport report = run_suite(suite, config, opt.threads);
  const auto files = render_report(report, aggregate(report), format);

  if (!opt.report_dir.empty()) {
    std::filesystem::create_directories(opt.report_dir);
    for (const ReportFile& f : files) write_file(std::filesystem::path(opt.report_dir) / f.name, f.content);
    return kSuccess;
  }
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (files.size() > 1) out << (i == 0 ? "" : "\n") << "# " << files[i].name << "\n";
    out << files[i].content;
  }
  return kSuccess;
}

// model ---------------------------------------------------------------------------

int cmd_model_complexity(const Options& opt, std::ostream& out) {
  const OutputFormat format = parse_output_format(opt.format);
  const ComplexityReport c = complexity(load_model(opt.model_path));
  if (format == OutputFormat::Json) {
    out << json{{"cc", c.cc}, {"ic", c.ic}, {"oc", c.oc}, {"total", c.total}}.dump(2) << "\n";
  } else {
    out << "CC=" << c.cc << " IC=" << c.ic << " OC=" << c.oc << " total=" << c.total << "\n";
  }
  return kSuccess;
}

int cmd_model_coverage(const Options& opt, std::ostream& out) {
  const OutputFormat format = parse_output_format(opt.format);
  const TestModel3D model = load_model(opt.model_path);
  const Suite suite = load_manifest_file(opt.manifest_path, &model);
  const CoverageReport report = check_coverage(model, suite.cases);

  if (format == OutputFormat::Json) {
    json doc = json::object();
    json dims = json::object();
    for (const auto& [d, cov] : report.per_dimension) {
      dims[std::string(to_string(d))] = {{"covered", cov.covered}, {"total", cov.total}, {"ratio", cov.ratio()}};
    }
    doc["dimensions"] = dims;
    doc["overall"] = {{"covered", report.overall.covered},
                      {"total", report.overall.total},
                      {"ratio", report.overall.ratio()}};
    doc["uncovered"] = report.uncovered;
    out << doc.dump(2) << "\n";
    return kSuccess;
  }
  for (const auto& [d, cov] : report.per_dimension) {
    out << to_string(d) << " " << cov.covered << "/" << cov.total << " " << percent(cov.ratio()) << "\n";
  }
  out << "overall " << report.overall.covered << "/" << report.overall.total << " "
      << percent(report.overall.ratio()) << "\n";
  if (!report.uncovered.empty()) {
    out << "uncovered:";
    for (const std::string& id : report.uncovered) out << " " << id;
    out << "\n";
  }
  return kSuccess;
}

int cmd_model_ofat(const Options& opt, std::ostream& out) {
  const TestModel3D model = load_model(opt.model_path);
  const TestCase base = parse_case(read_file(opt.base_path));

  std::vector<std::string> systems = opt.systems;
  if (systems.empty()) {
    for (const auto& [system, path] : base.ocr_refs) systems.push_back(system);
  }

  std::vector<TestCase> suite = derive_ofat(model, base);
  for (TestCase& tc : suite) {
    if (tc.gt_ref.empty()) tc.gt_ref = "gt/" + tc.id + ".txt";
    for (const std::string& system : systems) {
      tc.ocr_refs.try_emplace(system, "ocr/" + system + "/" + tc.id + ".txt");
    }
  }
  const std::string manifest = emit_manifest(opt.model_path, systems, suite);
  if (opt.out_path.empty() || opt.out_path == "-") {
    out << manifest;
  } else {
    write_file(opt.out_path, manifest);
  }
  return kSuccess;
}

// table ---------------------------------------------------------------------------

int cmd_table_export(const Options& opt, std::ostream& out) {
  const TestModel3D model = load_model(opt.model_path);
  const Suite suite = load_manifest_file(opt.manifest_path, &model);
  const std::string csv = export_table_csv(build_decision_table(model, suite.cases));
  if (opt.csv_path == "-") {
    out << csv;
  } else {
    write_file(opt.csv_path, csv);
  }
  return kSuccess;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"OCR output scoring and classification-tree test modelling", "ocrqa"};
  app.require_subcommand(1);

  auto* eval = app.add_subcommand("eval", "Score one OCR output against its ground truth");
  eval->add_option("--gt", opt.gt_path, "Ground-truth file")->required();
  eval->add_option("--ocr", opt.ocr_path, "OCR output file")->required();
  eval->add_option("--metrics", opt.metrics, "Comma list of fca,ssa,ossa,tla,class,section");
  eval->add_option("--threshold", opt.threshold, "Pass threshold in (0, 1]");
  eval->add_option("--format", opt.format, "text (default) or json");

  auto* suite = app.add_subcommand("suite", "Batch evaluation");
  suite->require_subcommand(1);
  auto* suite_run = suite->add_subcommand("run", "Run every case of a manifest");
  suite_run->add_option("manifest", opt.manifest_path, "Manifest file")->required();
  suite_run->add_option("--report", opt.report_dir, "Directory for report files (default: stdout)");
  suite_run->add_option("--format", opt.format, "json (default), csv or markdown");
  suite_run->add_option("--threshold", opt.threshold, "Pass threshold in (0, 1]");
  suite_run->add_option("--threads", opt.threads, "Worker threads (0 = hardware)");

  auto* model = app.add_subcommand("model", "Inspect a classification-tree test model");
  model->require_subcommand(1);
  auto* complexity_cmd = model->add_subcommand("complexity", "Print CC, IC, OC and their product");
  complexity_cmd->add_option("model", opt.model_path, "Model file")->required();
  complexity_cmd->add_option("--format", opt.format, "text (default) or json");
  auto* coverage_cmd = model->add_subcommand("coverage", "Stub coverage of a manifest's cases");
  coverage_cmd->add_option("model", opt.model_path, "Model file")->required();
  coverage_cmd->add_option("manifest", opt.manifest_path, "Manifest file")->required();
  coverage_cmd->add_option("--format", opt.format, "text (default) or json");
  auto* ofat_cmd = model->add_subcommand("ofat", "Derive a one-factor-at-a-time manifest skeleton");
  ofat_cmd->add_option("model", opt.model_path, "Model file")->required();
  ofat_cmd->add_option("--base", opt.base_path, "Base case file")->required();
  ofat_cmd->add_option("--systems", opt.systems, "Systems under test")->delimiter(',');
  ofat_cmd->add_option("--out", opt.out_path, "Output manifest (default: stdout)");

  auto* table = app.add_subcommand("table", "Decision tables");
  table->require_subcommand(1);
  auto* export_cmd = table->add_subcommand("export", "Write the stub-by-case decision table as CSV");
  export_cmd->add_option("model", opt.model_path, "Model file")->required();
  export_cmd->add_option("manifest", opt.manifest_path, "Manifest file")->required();
  export_cmd->add_option("--csv", opt.csv_path, "Output CSV ('-' for stdout)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    if (eval->parsed()) return cmd_eval(opt, out);
    if (suite_run->parsed()) return cmd_suite_run(opt, out, err);
    if (complexity_cmd->parsed()) return cmd_model_complexity(opt, out);
    if (coverage_cmd->parsed()) return cmd_model_coverage(opt, out);
    if (ofat_cmd->parsed()) return cmd_model_ofat(opt, out);
    if (export_cmd->parsed()) return cmd_table_export(opt, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const UndefinedScoreError& e) {
    err << "evaluation error: " << e.what() << "\n";
    return kEvaluationError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kParseError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kParseError;
  }
  err << app.help();
  return kUsageError;
}

}  // namespace ocrqa::cli
