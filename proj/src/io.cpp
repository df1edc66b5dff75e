#include "vsheet/io.hpp"

#include <fstream>
#include <set>

#include "vsheet/errors.hpp"

namespace vsheet {

namespace {

using nlohmann::json;

json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DomainError(path + ": " + e.what());
  }
}

template <class T>
T get(const json& doc, const char* key) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw DomainError(std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

RunConfig run_config_from_json(const json& doc) {
  if (!doc.is_object()) throw DomainError("config must be a JSON object");
  static const std::set<std::string> known{"abs_tol",       "rel_tol",  "max_subdivisions", "excision_schedule",
                                           "tail_cutoff",   "period_panels", "parallel",    "truncation_order",
                                           "series_tolerance"};
  for (const auto& [key, _] : doc.items())
    if (!known.contains(key)) throw DomainError("unknown config key '" + key + "'");

  RunConfig cfg;
  auto& q = cfg.quad;
  if (doc.contains("abs_tol")) q.abs_tol = get<double>(doc, "abs_tol");
  if (doc.contains("rel_tol")) q.rel_tol = get<double>(doc, "rel_tol");
  if (doc.contains("max_subdivisions")) q.max_subdivisions = get<int>(doc, "max_subdivisions");
  if (doc.contains("excision_schedule")) q.excision_schedule = get<std::vector<double>>(doc, "excision_schedule");
  if (doc.contains("tail_cutoff") && !doc["tail_cutoff"].is_null()) q.tail_cutoff = get<double>(doc, "tail_cutoff");
  if (doc.contains("period_panels")) q.period_panels = get<int>(doc, "period_panels");
  if (doc.contains("parallel")) q.parallel = get<bool>(doc, "parallel");
  if (doc.contains("truncation_order")) cfg.series.order = get<int>(doc, "truncation_order");
  if (doc.contains("series_tolerance")) cfg.series.tolerance = get<double>(doc, "series_tolerance");
  q.validate();
  if (cfg.series.order < 1) throw DomainError("truncation_order must be at least 1");
  if (!(cfg.series.tolerance > 0.0)) throw DomainError("series_tolerance must be positive");
  return cfg;
}

json to_json(const RunConfig& cfg) {
  const auto& q = cfg.quad;
  json doc = {{"abs_tol", q.abs_tol},
              {"rel_tol", q.rel_tol},
              {"max_subdivisions", q.max_subdivisions},
              {"excision_schedule", q.excision_schedule},
              {"period_panels", q.period_panels},
              {"parallel", q.parallel},
              {"truncation_order", cfg.series.order},
              {"series_tolerance", cfg.series.tolerance}};
  doc["tail_cutoff"] = q.tail_cutoff ? json(*q.tail_cutoff) : json(nullptr);
  return doc;
}

RunConfig load_run_config(const std::string& path) { return run_config_from_json(read_file(path)); }

StreamBump stream_bump_from_json(const json& doc) {
  if (!doc.is_object()) throw DomainError("field must be a JSON object");
  StreamBump b;
  const auto c = get<std::vector<double>>(doc, "center");
  if (c.size() != 2) throw DomainError("center must have two coordinates");
  b.center = {c[0], c[1]};
  b.radius = get<double>(doc, "radius");
  if (doc.contains("amplitude")) b.amplitude = get<double>(doc, "amplitude");
  if (doc.contains("profile")) {
    const auto& p = doc["profile"];
    const auto type = get<std::string>(p, "type");
    if (type == "polynomial") {
      b.profile = BumpProfile::Polynomial;
      if (p.contains("order")) b.order = get<int>(p, "order");
    } else if (type == "exponential") {
      b.profile = BumpProfile::Exponential;
    } else {
      throw DomainError("unknown profile type '" + type + "'");
    }
  }
  b.validate();
  return b;
}

json to_json(const StreamBump& b) {
  json profile = b.profile == BumpProfile::Polynomial ? json{{"type", "polynomial"}, {"order", b.order}}
                                                       : json{{"type", "exponential"}};
  return {{"center", {b.center[0], b.center[1]}}, {"radius", b.radius}, {"amplitude", b.amplitude}, {"profile", profile}};
}

StreamBump load_stream_bump(const std::string& path) { return stream_bump_from_json(read_file(path)); }

}  // namespace vsheet
