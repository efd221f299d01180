#include <cstdio>
#include <functional>
#include <json.hpp>

#include "ocrqa/error.hpp"
#include "ocrqa/harness.hpp"

namespace ocrqa {

namespace {

using nlohmann::json;

json optional_score(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json score_or_null(const std::optional<Accuracy>& a, const MetricConfig& config) {
  return a ? json(config.report(*a)) : json(nullptr);
}

json means_json(const MetricMeans& means) {
  json out = json::object();
  for (const auto& [metric, value] : means) out[std::string(to_string(metric))] = optional_score(value);
  return out;
}

std::string_view result_of(const Evaluation& ev) {
  return ev.skipped() ? "skipped" : to_string(ev.report->output_class);
}

json case_json(const Evaluation& ev, const MetricConfig& config) {
  json row = json::object();
  row["id"] = ev.case_id;
  row["system"] = ev.system;
  row["context"] = ev.complex_context ? "complex" : "normal";
  row["result"] = result_of(ev);
  row["skipped_reason"] = ev.skipped() ? json(ev.skipped_reason) : json(nullptr);
  if (ev.skipped()) {
    for (Metric m : kMetrics) row[std::string(to_string(m))] = nullptr;
    row["per_class"] = json::object();
    row["per_section"] = json::object();
    return row;
  }
  const MetricReport& r = *ev.report;
  for (Metric m : kMetrics) row[std::string(to_string(m))] = config.report(r.get(m));
  json per_class = json::object();
  for (const auto& [cls, a] : r.per_class) per_class[std::string(to_string(cls))] = score_or_null(a, config);
  row["per_class"] = per_class;
  json per_section = json::object();
  for (const auto& [kind, scores] : r.per_section) {
    json s = json::object();
    for (Metric m : kMetrics) s[std::string(to_string(m))] = score_or_null(scores.get(m), config);
    per_section[std::string(to_string(kind))] = s;
  }
  row["per_section"] = per_section;
  return row;
}

json aggregate_json(const SystemAggregate& agg) {
  json out = json::object();
  out["evaluated"] = agg.evaluated;
  out["passed"] = agg.passed;
  out["skipped"] = agg.skipped;
  out["pass_rate"] = optional_score(agg.pass_rate);
  out["overall"] = means_json(agg.overall);
  json sections = json::object();
  for (const auto& [kind, means] : agg.by_section) sections[std::string(to_string(kind))] = means_json(means);
  out["by_section"] = sections;
  json classes = json::object();
  for (const auto& [cls, v] : agg.fca_by_class) classes[std::string(to_string(cls))] = optional_score(v);
  out["fca_by_class"] = classes;
  out["fca_by_context"] = {{"normal", optional_score(agg.fca_normal_context)},
                           {"complex", optional_score(agg.fca_complex_context)}};
  return out;
}

std::string render_json(const RunReport& report, const AggregateTables& tables) {
  json doc = json::object();
  doc["meta"] = {{"model", report.model_ref},
                 {"threshold", report.config.pass_threshold},
                 {"pass_metric", std::string(to_string(report.config.pass_metric))},
                 {"clamp_scores", report.config.clamp_scores},
                 {"systems", report.systems}};
  json cases = json::array();
  for (const Evaluation& ev : report.evaluations) cases.push_back(case_json(ev, report.config));
  doc["cases"] = cases;
  json aggregates = json::object();
  for (const SystemAggregate& agg : tables.systems) aggregates[agg.system] = aggregate_json(agg);
  doc["aggregates"] = aggregates;
  return doc.dump(2) + "\n";
}

// Tabular rendering shared by markdown and csv ---------------------------------

struct Table {
  std::string name;   // file stem for csv
  std::string title;  // heading for markdown
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string cell(const std::optional<double>& v) { return v ? fixed(*v) : "n/a"; }

std::vector<Table> build_tables(const RunReport& report, const AggregateTables& tables) {
  std::vector<Table> out;

  Table cases{"cases", "Cases", {"case", "system", "context", "fca", "ssa", "ossa", "tla", "result"}, {}};
  for (const Evaluation& ev : report.evaluations) {
    std::vector<std::string> row{ev.case_id, ev.system, ev.complex_context ? "complex" : "normal"};
    for (Metric m : kMetrics) {
      row.push_back(ev.skipped() ? "n/a" : fixed(report.config.report(ev.report->get(m))));
    }
    std::string result(result_of(ev));
    if (ev.skipped()) result += " (" + ev.skipped_reason + ")";
    row.push_back(result);
    cases.rows.push_back(std::move(row));
  }
  out.push_back(std::move(cases));

  Table rates{"pass_rates", "Pass rates", {"system", "evaluated", "passed", "skipped", "pass_rate"}, {}};
  for (const SystemAggregate& agg : tables.systems) {
    rates.rows.push_back({agg.system, std::to_string(agg.evaluated), std::to_string(agg.passed),
                          std::to_string(agg.skipped), cell(agg.pass_rate)});
  }
  out.push_back(std::move(rates));

  auto section_value = [](const SystemAggregate& agg, SectionKind kind, Metric m) {
    auto it = agg.by_section.find(kind);
    return it == agg.by_section.end() ? std::optional<double>{} : it->second.at(m);
  };

  Table by_section{"fca_by_section", "FCA by section", {"system"}, {}};
  for (SectionKind kind : kSectionKinds) by_section.header.emplace_back(to_string(kind));
  for (const SystemAggregate& agg : tables.systems) {
    std::vector<std::string> row{agg.system};
    for (SectionKind kind : kSectionKinds) row.push_back(cell(section_value(agg, kind, Metric::Fca)));
    by_section.rows.push_back(std::move(row));
  }
  out.push_back(std::move(by_section));

  Table by_class{"fca_by_class", "FCA by character class", {"system"}, {}};
  for (CharClass c : kCharClasses) by_class.header.emplace_back(to_string(c));
  for (const SystemAggregate& agg : tables.systems) {
    std::vector<std::string> row{agg.system};
    for (CharClass c : kCharClasses) row.push_back(cell(agg.fca_by_class.at(c)));
    by_class.rows.push_back(std::move(row));
  }
  out.push_back(std::move(by_class));

  Table metrics{"metrics_by_section", "Metrics overall and by section",
                {"system", "scope", "fca", "ssa", "ossa", "tla"}, {}};
  for (const SystemAggregate& agg : tables.systems) {
    std::vector<std::string> row{agg.system, "overall"};
    for (Metric m : kMetrics) row.push_back(cell(agg.overall.at(m)));
    metrics.rows.push_back(std::move(row));
    for (SectionKind kind : kSectionKinds) {
      if (!agg.by_section.contains(kind)) continue;
      std::vector<std::string> srow{agg.system, std::string(to_string(kind))};
      for (Metric m : kMetrics) srow.push_back(cell(section_value(agg, kind, m)));
      metrics.rows.push_back(std::move(srow));
    }
  }
  out.push_back(std::move(metrics));

  Table context{"fca_by_context", "FCA by context", {"system", "normal", "complex"}, {}};
  for (const SystemAggregate& agg : tables.systems) {
    context.rows.push_back(
        {agg.system, cell(agg.fca_normal_context), cell(agg.fca_complex_context)});
  }
  out.push_back(std::move(context));
  return out;
}

std::string markdown_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

std::string render_markdown(const RunReport& report, const std::vector<Table>& tables) {
  std::string out = "# OCR evaluation report\n\n";
  out += "- model: `" + report.model_ref + "`\n";
  out += "- pass metric: " + std::string(to_string(report.config.pass_metric)) +
         " >= " + fixed(report.config.pass_threshold) + "\n";
  for (const Table& t : tables) {
    out += "\n## " + t.title + "\n\n|";
    for (const std::string& h : t.header) out += " " + markdown_escape(h) + " |";
    out += "\n|";
    for (std::size_t i = 0; i < t.header.size(); ++i) out += " --- |";
    out += "\n";
    for (const auto& row : t.rows) {
      out += "|";
      for (const std::string& c : row) out += " " + markdown_escape(c) + " |";
      out += "\n";
    }
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string render_csv(const Table& t) {
  auto line = [](const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i != 0) out += ',';
      out += csv_field(fields[i]);
    }
    return out + "\n";
  };
  std::string out = line(t.header);
  for (const auto& row : t.rows) out += line(row);
  return out;
}

}  // namespace

ReportFormat parse_report_format(std::string_view name) {
  if (name == "json") return ReportFormat::Json;
  if (name == "csv") return ReportFormat::Csv;
  if (name == "markdown" || name == "md") return ReportFormat::Markdown;
  throw UsageError("unknown report format '" + std::string(name) +
                   "' (expected json, csv or markdown)");
}

std::vector<ReportFile> render_report(const RunReport& report, const AggregateTables& tables,
                                      ReportFormat format) {
  switch (format) {
    case ReportFormat::Json:
      return {{"report.json", render_json(report, tables)}};
    case ReportFormat::Markdown:
      return {{"report.md", render_markdown(report, build_tables(report, tables))}};
    case ReportFormat::Csv: {
      std::vector<ReportFile> files;
      for (const Table& t : build_tables(report, tables)) {
        files.push_back({t.name + ".csv", render_csv(t)});
      }
      return files;
    }
  }
  throw UsageError("unknown report format");
}

}  // namespace ocrqa
