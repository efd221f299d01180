#pragma once

// YAML helpers shared by the model and manifest parsers. Not installed.

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "ocrqa/error.hpp"
#include "ocrqa/test_model.hpp"

namespace ocrqa::yaml {

inline std::size_t line(const YAML::Node& node) {
  const YAML::Mark mark = node.Mark();
  return mark.line < 0 ? 0 : static_cast<std::size_t>(mark.line) + 1;
}

inline YAML::Node load(std::string_view bytes) {
  try {
    return YAML::Load(std::string(bytes));
  } catch (const YAML::ParserException& e) {
    throw ParseError(e.msg, e.mark.line < 0 ? 0 : static_cast<std::size_t>(e.mark.line) + 1);
  }
}

/// Scalar value of `node`; `parent` locates the error when the key is missing.
inline std::string scalar(const YAML::Node& node, std::string_view what,
                          const YAML::Node& parent = YAML::Node()) {
  if (!node) {
    throw ParseError("missing " + std::string(what), parent ? line(parent) : 0);
  }
  if (!node.IsScalar()) throw ParseError(std::string(what) + " must be a scalar", line(node));
  return node.Scalar();
}

inline std::vector<std::string> scalar_list(const YAML::Node& node, std::string_view what,
                                            const YAML::Node& parent) {
  std::vector<std::string> out;
  if (!node) return out;
  if (!node.IsSequence()) throw ParseError(std::string(what) + " must be a list", line(node));
  for (const YAML::Node& item : node) out.push_back(scalar(item, what, parent));
  return out;
}

inline TestCase parse_case(const YAML::Node& node) {
  if (!node.IsMap()) throw ParseError("test case must be a mapping", line(node));
  TestCase tc;
  tc.id = scalar(node["id"], "case id", node);
  tc.selections = scalar_list(node["selections"], "selections", node);
  tc.expected_output = scalar(node["expected_output"], "expected_output", node);
  if (node["gt"]) tc.gt_ref = scalar(node["gt"], "gt");
  if (const YAML::Node ocr = node["ocr"]) {
    if (!ocr.IsMap()) throw ParseError("ocr must map system names to paths", line(ocr));
    for (const auto& kv : ocr) {
      tc.ocr_refs[scalar(kv.first, "system name")] = scalar(kv.second, "ocr path");
    }
  }
  return tc;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace ocrqa::yaml
