#include "ocrqa/test_model.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>

#include "ocrqa/error.hpp"
#include "yaml_util.hpp"

namespace ocrqa {

std::string_view to_string(Dimension d) {
  switch (d) {
    case Dimension::Context:
      return "context";
    case Dimension::Input:
      return "input";
    case Dimension::Output:
      return "output";
  }
  return "?";
}

std::string_view to_string(Severity s) { return s == Severity::Complex ? "complex" : "normal"; }

std::size_t ClassificationTree::leaf_count() const {
  std::size_t n = 0;
  for (const Category& c : categories) n += c.leaves.size();
  return n;
}

// TestModel3D -------------------------------------------------------------------

TestModel3D::TestModel3D(ClassificationTree context, ClassificationTree input,
                         ClassificationTree output)
    : trees_{std::move(context), std::move(input), std::move(output)} {
  for (Dimension d : kDimensions) trees_[static_cast<std::size_t>(d)].dimension = d;
  index();
}

void TestModel3D::index() {
  by_id_.clear();
  for (Dimension d : kDimensions) {
    const ClassificationTree& t = tree(d);
    if (t.categories.empty()) {
      throw ValidationError(std::string(to_string(d)) + " tree has no categories");
    }
    for (std::size_t c = 0; c < t.categories.size(); ++c) {
      const Category& category = t.categories[c];
      if (category.leaves.empty()) {
        throw ValidationError("category '" + category.name + "' has no leaves");
      }
      for (std::size_t l = 0; l < category.leaves.size(); ++l) {
        const Stub& stub = category.leaves[l];
        if (stub.id.empty()) {
          throw ValidationError("category '" + category.name + "' has a leaf without an id");
        }
        if (!by_id_.emplace(stub.id, StubLocation{d, c, l}).second) {
          throw ValidationError("duplicate stub id '" + stub.id + "'");
        }
      }
    }
  }
}

std::optional<StubLocation> TestModel3D::find(std::string_view stub_id) const {
  auto it = by_id_.find(stub_id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

std::size_t TestModel3D::stub_count() const { return by_id_.size(); }

// Parsing ----------------------------------------------------------------------

namespace {

Severity parse_severity(const YAML::Node& node) {
  if (!node) return Severity::Normal;
  const std::string value = yaml::scalar(node, "severity");
  if (value == "normal") return Severity::Normal;
  if (value == "complex") return Severity::Complex;
  throw ParseError("severity must be 'normal' or 'complex', got '" + value + "'", yaml::line(node));
}

ClassificationTree parse_tree(const YAML::Node& root, Dimension d, std::set<std::string>& seen) {
  const std::string key(to_string(d));
  const YAML::Node node = root[key];
  if (!node) throw ParseError("missing '" + key + "' tree", yaml::line(root));
  if (!node.IsSequence() || node.size() == 0) {
    throw ParseError("'" + key + "' must be a non-empty list of categories", yaml::line(node));
  }
  ClassificationTree tree;
  tree.dimension = d;
  for (const YAML::Node& cat : node) {
    if (!cat.IsMap()) throw ParseError("category must be a mapping", yaml::line(cat));
    Category category;
    category.name = yaml::scalar(cat["name"], "category name", cat);
    const YAML::Node leaves = cat["leaves"];
    if (!leaves || !leaves.IsSequence() || leaves.size() == 0) {
      throw ParseError("category '" + category.name + "' has no leaves", yaml::line(cat));
    }
    for (const YAML::Node& leaf : leaves) {
      if (!leaf.IsMap()) throw ParseError("leaf must be a mapping", yaml::line(leaf));
      Stub stub;
      stub.id = yaml::scalar(leaf["id"], "leaf id", leaf);
      if (stub.id.empty()) throw ParseError("leaf id must not be empty", yaml::line(leaf));
      stub.label = leaf["label"] ? yaml::scalar(leaf["label"], "label") : stub.id;
      stub.severity = parse_severity(leaf["severity"]);
      if (!seen.insert(stub.id).second) {
        throw ParseError("duplicate stub id '" + stub.id + "'", yaml::line(leaf));
      }
      category.leaves.push_back(std::move(stub));
    }
    tree.categories.push_back(std::move(category));
  }
  return tree;
}

// Quotes a CSV field when it contains a separator, quote or line break.
std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::vector<std::string>> parse_csv_rows(std::string_view csv) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t line = 1;
  for (std::size_t i = 0; i < csv.size(); ++i) {
    const char c = csv[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < csv.size() && csv[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started) throw ParseError("stray quote inside a field", line);
        quoted = true;
        field_started = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
        break;
      case '\r':
        break;
      case '\n':
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
        row.clear();
        field.clear();
        field_started = false;
        ++line;
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (quoted) throw ParseError("unterminated quoted field", line);
  if (field_started || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

TestModel3D parse_model(std::string_view bytes) {
  const YAML::Node root = yaml::load(bytes);
  if (!root.IsMap()) throw ParseError("model must be a mapping with context, input, output", 1);
  std::set<std::string> seen;
  ClassificationTree context = parse_tree(root, Dimension::Context, seen);
  ClassificationTree input = parse_tree(root, Dimension::Input, seen);
  ClassificationTree output = parse_tree(root, Dimension::Output, seen);
  return TestModel3D(std::move(context), std::move(input), std::move(output));
}

TestModel3D load_model(const std::string& path) { return parse_model(yaml::read_file(path)); }

TestCase parse_case(std::string_view bytes) {
  const YAML::Node root = yaml::load(bytes);
  return yaml::parse_case(root);
}

// Cases -------------------------------------------------------------------------

void validate_case(const TestModel3D& model, const TestCase& test_case) {
  const std::string where = "case '" + test_case.id + "': ";
  if (test_case.id.empty()) throw ValidationError("test case without an id");
  std::map<std::pair<Dimension, std::size_t>, std::string> chosen;
  for (const std::string& id : test_case.selections) {
    auto at = model.find(id);
    if (!at) throw ValidationError(where + "unknown stub '" + id + "'");
    if (at->dimension == Dimension::Output) {
      throw ValidationError(where + "output stub '" + id + "' cannot be selected");
    }
    auto [it, inserted] = chosen.emplace(std::pair{at->dimension, at->category}, id);
    if (!inserted) {
      const std::string& name = model.tree(at->dimension).categories[at->category].name;
      throw ValidationError(where + "category '" + name + "' selects both '" + it->second +
                            "' and '" + id + "'");
    }
  }
  auto out = model.find(test_case.expected_output);
  if (!out) {
    throw ValidationError(where + "unknown stub '" + test_case.expected_output + "'");
  }
  if (out->dimension != Dimension::Output) {
    throw ValidationError(where + "expected output '" + test_case.expected_output +
                          "' is not an output stub");
  }
}

bool is_complex(const TestModel3D& model, const TestCase& test_case) {
  return std::ranges::any_of(test_case.selections, [&](const std::string& id) {
    auto at = model.find(id);
    return at && model.stub(*at).severity == Severity::Complex;
  });
}

ComplexityReport complexity(const TestModel3D& model) {
  ComplexityReport r;
  r.cc = model.context().leaf_count();
  r.ic = model.input().leaf_count();
  r.oc = model.output().leaf_count();
  r.total = r.cc * r.ic * r.oc;
  return r;
}

std::vector<TestCase> derive_ofat(const TestModel3D& model, const TestCase& base) {
  try {
    validate_case(model, base);
  } catch (const ValidationError& e) {
    throw PreconditionError(std::string("OFAT base is invalid: ") + e.what());
  }

  // Position of the base's selection for every context/input category.
  std::map<std::pair<Dimension, std::size_t>, std::size_t> slot;
  for (std::size_t i = 0; i < base.selections.size(); ++i) {
    auto at = model.find(base.selections[i]);
    slot[{at->dimension, at->category}] = i;
  }

  std::vector<TestCase> suite{base};
  for (Dimension d : {Dimension::Context, Dimension::Input}) {
    const auto& categories = model.tree(d).categories;
    for (std::size_t c = 0; c < categories.size(); ++c) {
      auto it = slot.find({d, c});
      if (it == slot.end()) {
        throw PreconditionError("OFAT base '" + base.id + "' selects nothing in category '" +
                                categories[c].name + "'");
      }
      for (const Stub& leaf : categories[c].leaves) {
        if (leaf.id == base.selections[it->second]) continue;
        TestCase variant;
        variant.id = base.id + "-" + leaf.id;
        variant.selections = base.selections;
        variant.selections[it->second] = leaf.id;
        variant.expected_output = base.expected_output;
        suite.push_back(std::move(variant));
      }
    }
  }
  return suite;
}

CoverageReport check_coverage(const TestModel3D& model, const std::vector<TestCase>& cases) {
  std::set<std::string> hit;
  auto touch = [&](const TestCase& tc, const std::string& id) {
    if (!model.find(id)) {
      throw ValidationError("case '" + tc.id + "': unknown stub '" + id + "'");
    }
    hit.insert(id);
  };
  for (const TestCase& tc : cases) {
    for (const std::string& id : tc.selections) touch(tc, id);
    touch(tc, tc.expected_output);
  }

  CoverageReport report;
  for (Dimension d : kDimensions) {
    DimensionCoverage& dim = report.per_dimension[d];
    for (const Category& category : model.tree(d).categories) {
      for (const Stub& stub : category.leaves) {
        ++dim.total;
        if (hit.contains(stub.id)) {
          ++dim.covered;
          report.covered.insert(stub.id);
        } else {
          report.uncovered.insert(stub.id);
        }
      }
    }
    report.overall.covered += dim.covered;
    report.overall.total += dim.total;
  }
  return report;
}

// Decision table ----------------------------------------------------------------

DecisionTable build_decision_table(const TestModel3D& model, const std::vector<TestCase>& cases) {
  DecisionTable table;
  std::map<std::string, std::size_t, std::less<>> row_of;
  for (Dimension d : kDimensions) {
    for (const Category& category : model.tree(d).categories) {
      for (const Stub& stub : category.leaves) {
        row_of.emplace(stub.id, table.stub_ids.size());
        table.stub_ids.push_back(stub.id);
      }
    }
  }
  table.cells.assign(table.stub_ids.size(), std::vector<Mark>(cases.size(), Mark::Blank));
  for (std::size_t col = 0; col < cases.size(); ++col) {
    const TestCase& tc = cases[col];
    validate_case(model, tc);
    table.case_ids.push_back(tc.id);
    for (const std::string& id : tc.selections) table.cells[row_of.at(id)][col] = Mark::Selected;
    table.cells[row_of.at(tc.expected_output)][col] = Mark::Expected;
  }
  return table;
}

std::string export_table_csv(const DecisionTable& table) {
  std::string out = "stub_id";
  for (const std::string& id : table.case_ids) out += "," + csv_field(id);
  out += "\n";
  for (std::size_t r = 0; r < table.stub_ids.size(); ++r) {
    out += csv_field(table.stub_ids[r]);
    for (Mark m : table.cells[r]) {
      out += ',';
      if (m == Mark::Selected) out += 'x';
      if (m == Mark::Expected) out += 'o';
    }
    out += "\n";
  }
  return out;
}

DecisionTable import_table_csv(std::string_view csv) {
  const auto rows = parse_csv_rows(csv);
  if (rows.empty() || rows.front().empty() || rows.front().front() != "stub_id") {
    throw ParseError("decision table CSV must start with a 'stub_id' header", 1);
  }
  DecisionTable table;
  table.case_ids.assign(rows.front().begin() + 1, rows.front().end());
  const std::size_t width = rows.front().size();
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != width) {
      throw ParseError("expected " + std::to_string(width) + " fields, got " +
                           std::to_string(row.size()),
                       r + 1);
    }
    table.stub_ids.push_back(row.front());
    std::vector<Mark> marks;
    for (std::size_t c = 1; c < row.size(); ++c) {
      if (row[c].empty()) {
        marks.push_back(Mark::Blank);
      } else if (row[c] == "x") {
        marks.push_back(Mark::Selected);
      } else if (row[c] == "o") {
        marks.push_back(Mark::Expected);
      } else {
        throw ParseError("cell must be 'x', 'o' or empty, got '" + row[c] + "'", r + 1);
      }
    }
    table.cells.push_back(std::move(marks));
  }
  return table;
}

}  // namespace ocrqa
