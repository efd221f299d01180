#include "ocrqa/harness.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <atomic>
#include <numeric>
#include <set>
#include <thread>
#include <variant>

#include "ocrqa/error.hpp"
#include "yaml_util.hpp"

namespace ocrqa {

namespace {

std::optional<double> mean(const std::vector<double>& values) {
  if (values.empty()) return std::nullopt;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

// Parsed GT per case, or the reason it cannot be scored.
using GroundTruthOrError = std::variant<GroundTruthDoc, std::string>;

GroundTruthOrError load_ground_truth(const Suite& suite, const TestCase& tc) {
  if (tc.gt_ref.empty()) return std::string("no ground truth file");
  try {
    GroundTruthDoc doc = parse_ground_truth(yaml::read_file(suite.resolve(tc.gt_ref).string()));
    if (doc.empty()) return std::string("ground truth is empty");
    return doc;
  } catch (const Error& e) {
    return std::string("ground truth: ") + e.what();
  }
}

}  // namespace

Suite load_manifest(std::string_view bytes, const std::filesystem::path& base_dir,
                    const TestModel3D* model) {
  const YAML::Node root = yaml::load(bytes);
  if (!root.IsMap()) throw ParseError("manifest must be a mapping", 1);

  Suite suite;
  suite.base_dir = base_dir;
  suite.model_ref = root["model"] ? yaml::scalar(root["model"], "model") : std::string();
  if (model != nullptr) {
    suite.model = *model;
  } else if (suite.model_ref.empty()) {
    throw ParseError("manifest has no 'model' path", 1);
  } else {
    suite.model = load_model(suite.resolve(suite.model_ref).string());
  }

  suite.systems = yaml::scalar_list(root["systems"], "systems", root);
  const std::set<std::string> systems(suite.systems.begin(), suite.systems.end());
  if (systems.size() != suite.systems.size()) {
    throw ValidationError("manifest lists a system twice");
  }

  const YAML::Node cases = root["cases"];
  if (cases && !cases.IsNull()) {
    if (!cases.IsSequence()) throw ParseError("cases must be a list", yaml::line(cases));
    std::set<std::string> ids;
    for (const YAML::Node& node : cases) {
      TestCase tc = yaml::parse_case(node);
      if (!ids.insert(tc.id).second) {
        throw ValidationError("duplicate case id '" + tc.id + "'");
      }
      validate_case(suite.model, tc);
      for (const auto& [system, path] : tc.ocr_refs) {
        if (!systems.contains(system)) {
          throw ValidationError("case '" + tc.id + "': system '" + system +
                                "' is not listed under systems");
        }
      }
      auto check_file = [&](const std::string& ref, std::string_view what) {
        if (!std::filesystem::exists(suite.resolve(ref))) {
          suite.warnings.push_back("case '" + tc.id + "': " + std::string(what) + " file '" + ref +
                                   "' not found");
        }
      };
      if (!tc.gt_ref.empty()) check_file(tc.gt_ref, "gt");
      for (const auto& [system, path] : tc.ocr_refs) check_file(path, system);
      suite.cases.push_back(std::move(tc));
    }
  }
  return suite;
}

Suite load_manifest_file(const std::filesystem::path& path, const TestModel3D* model) {
  return load_manifest(yaml::read_file(path.string()), path.parent_path(), model);
}

std::string emit_manifest(const std::string& model_ref, const std::vector<std::string>& systems,
                          const std::vector<TestCase>& cases) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "model" << YAML::Value << model_ref;
  out << YAML::Key << "systems" << YAML::Value << YAML::Flow << systems;
  out << YAML::Key << "cases" << YAML::Value << YAML::BeginSeq;
  for (const TestCase& tc : cases) {
    out << YAML::BeginMap;
    out << YAML::Key << "id" << YAML::Value << tc.id;
    out << YAML::Key << "selections" << YAML::Value << YAML::Flow << tc.selections;
    out << YAML::Key << "expected_output" << YAML::Value << tc.expected_output;
    if (!tc.gt_ref.empty()) out << YAML::Key << "gt" << YAML::Value << tc.gt_ref;
    if (!tc.ocr_refs.empty()) {
      out << YAML::Key << "ocr" << YAML::Value << YAML::BeginMap;
      for (const auto& [system, path] : tc.ocr_refs) out << YAML::Key << system << YAML::Value << path;
      out << YAML::EndMap;
    }
    out << YAML::EndMap;
  }
  out << YAML::EndSeq << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

RunReport run_suite(const Suite& suite, const MetricConfig& config, unsigned threads) {
  config.validate();

  std::vector<const TestCase*> cases;
  for (const TestCase& tc : suite.cases) cases.push_back(&tc);
  std::ranges::sort(cases, {}, [](const TestCase* tc) { return tc->id; });

  std::vector<GroundTruthOrError> ground_truth;
  ground_truth.reserve(cases.size());
  for (const TestCase* tc : cases) ground_truth.push_back(load_ground_truth(suite, *tc));

  RunReport report;
  report.model_ref = suite.model_ref;
  report.config = config;
  report.systems = suite.systems;
  const std::size_t width = suite.systems.size();
  report.evaluations.resize(cases.size() * width);

  auto evaluate_one = [&](std::size_t job) {
    const std::size_t c = job / width;
    const TestCase& tc = *cases[c];
    const std::string& system = suite.systems[job % width];
    Evaluation& out = report.evaluations[job];
    out.case_id = tc.id;
    out.system = system;
    out.complex_context = is_complex(suite.model, tc);

    if (const auto* reason = std::get_if<std::string>(&ground_truth[c])) {
      out.skipped_reason = *reason;
      return;
    }
    auto ref = tc.ocr_refs.find(system);
    if (ref == tc.ocr_refs.end()) {
      out.skipped_reason = "no OCR output for system '" + system + "'";
      return;
    }
    try {
      const NormalizedText ocr = normalize(yaml::read_file(suite.resolve(ref->second).string()));
      out.report = evaluate(std::get<GroundTruthDoc>(ground_truth[c]), ocr, config);
    } catch (const Error& e) {
      out.skipped_reason = std::string("ocr: ") + e.what();
    }
  };

  const std::size_t jobs = report.evaluations.size();
  unsigned workers = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, jobs));
  if (workers <= 1) {
    for (std::size_t job = 0; job < jobs; ++job) evaluate_one(job);
    return report;
  }
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t job = next++; job < jobs; job = next++) evaluate_one(job);
      });
    }
  }
  return report;
}

AggregateTables aggregate(const RunReport& report) {
  AggregateTables tables;
  for (const std::string& system : report.systems) {
    SystemAggregate agg;
    agg.system = system;

    std::map<Metric, std::vector<double>> overall;
    std::map<SectionKind, std::map<Metric, std::vector<double>>> by_section;
    std::map<CharClass, std::vector<double>> by_class;
    std::vector<double> normal, complex;

    for (const Evaluation& ev : report.evaluations) {
      if (ev.system != system) continue;
      if (ev.skipped()) {
        ++agg.skipped;
        continue;
      }
      const MetricReport& r = *ev.report;
      ++agg.evaluated;
      if (r.output_class == Verdict::Pass) ++agg.passed;
      for (Metric m : kMetrics) overall[m].push_back(report.config.report(r.get(m)));
      for (const auto& [kind, scores] : r.per_section) {
        for (Metric m : kMetrics) {
          if (const auto& a = scores.get(m)) by_section[kind][m].push_back(report.config.report(*a));
        }
      }
      for (const auto& [cls, a] : r.per_class) {
        if (a) by_class[cls].push_back(report.config.report(*a));
      }
      (ev.complex_context ? complex : normal).push_back(report.config.report(r.fca));
    }

    if (agg.evaluated > 0) {
      agg.pass_rate = static_cast<double>(agg.passed) / static_cast<double>(agg.evaluated);
    }
    for (Metric m : kMetrics) agg.overall[m] = mean(overall[m]);
    for (SectionKind kind : kSectionKinds) {
      auto it = by_section.find(kind);
      if (it == by_section.end()) continue;
      for (Metric m : kMetrics) agg.by_section[kind][m] = mean(it->second[m]);
    }
    for (CharClass c : kCharClasses) agg.fca_by_class[c] = mean(by_class[c]);
    agg.fca_normal_context = mean(normal);
    agg.fca_complex_context = mean(complex);
    tables.systems.push_back(std::move(agg));
  }
  return tables;
}

}  // namespace ocrqa
