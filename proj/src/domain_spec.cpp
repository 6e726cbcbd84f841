#include "rootlap/domain_spec.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace rootlap {

namespace {

using nlohmann::json;

std::vector<double> number_array(const json& j, const char* field) {
  if (!j.is_array() || j.empty())
    throw std::invalid_argument(std::string("domain spec: expected a nonempty number array (") + field + ")");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number())
      throw std::invalid_argument(std::string("domain spec: expected numbers only (") + field + ")");
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<int> integer_array(const json& j, const char* field) {
  if (!j.is_array() || j.empty())
    throw std::invalid_argument(std::string("domain spec: expected a nonempty integer array (") + field + ")");
  std::vector<int> out;
  for (const auto& v : j) {
    if (!v.is_number_integer())
      throw std::invalid_argument(std::string("domain spec: expected integers only (") + field + ")");
    out.push_back(v.get<int>());
  }
  return out;
}

}  // namespace

DomainSpec parse_domain_spec(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("domain spec: not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("domain spec: document must be a JSON object");

  DomainSpec spec;
  if (!j.contains("kind") || !j["kind"].is_string())
    throw std::invalid_argument("domain spec: missing or non-string field (kind)");
  spec.kind = j["kind"].get<std::string>();

  if (!j.contains("lengths")) throw std::invalid_argument("domain spec: missing field (lengths)");
  spec.lengths = number_array(j["lengths"], "lengths");

  if (!j.contains("grid")) throw std::invalid_argument("domain spec: missing field (grid)");
  spec.grid = integer_array(j["grid"], "grid");

  if (j.contains("bc")) {
    if (!j["bc"].is_array()) throw std::invalid_argument("domain spec: expected an array of names (bc)");
    for (const auto& v : j["bc"]) {
      if (!v.is_string()) throw std::invalid_argument("domain spec: expected strings only (bc)");
      spec.bc.push_back(v.get<std::string>());
    }
  }

  if (j.contains("metric")) {
    const json& m = j["metric"];
    if (m.is_string()) {
      spec.metric = m.get<std::string>();
    } else if (m.is_object()) {
      spec.metric = "sampled";
      if (!m.contains("g")) throw std::invalid_argument("domain spec: sampled metric needs samples (metric.g)");
      spec.metric_g = number_array(m["g"], "metric.g");
      if (m.contains("dg")) spec.metric_dg = number_array(m["dg"], "metric.dg");
    } else {
      throw std::invalid_argument("domain spec: metric must be a tag string or a sample object (metric)");
    }
  }

  if (j.contains("mask")) {
    const json& m = j["mask"];
    if (!m.is_array()) throw std::invalid_argument("domain spec: mask must be an array of rows (mask)");
    for (const auto& row : m) spec.mask.push_back(integer_array(row, "mask"));
  }
  return spec;
}

DomainSpec load_domain_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("domain spec: cannot open file '" + path + "' (spec)");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_domain_spec(buf.str());
}

}  // namespace rootlap
