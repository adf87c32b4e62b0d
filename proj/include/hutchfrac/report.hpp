#pragma once

// JSON reports. Field order is fixed by construction (ordered_json keeps
// insertion order), so dump(parse(text)) reproduces text byte for byte.

#include <string>
#include <vector>

#include <json.hpp>

#include "hutchfrac/classify.hpp"
#include "hutchfrac/hutchinson.hpp"
#include "hutchfrac/remetrize.hpp"

namespace hutchfrac {

using Json = nlohmann::ordered_json;

inline constexpr int kJsonIndent = 2;

inline std::string dump_json(const Json& j) { return j.dump(kJsonIndent) + "\n"; }

inline Json point_json(const Point& p) {
  Json a = Json::array();
  for (double v : p.coords()) a.push_back(v);
  return a;
}

inline Json word_json(const IfsSystem& ifs, const Word& w) {
  Json a = Json::array();
  for (auto l : w.letters) a.push_back(ifs.map_name(l));
  return a;
}

inline Json witness_json(const IfsSystem& ifs, const Witness& w) {
  Json j;
  j["x"] = point_json(w.x);
  j["y"] = point_json(w.y);
  j["fx"] = point_json(w.fx);
  j["fy"] = point_json(w.fy);
  j["word"] = word_json(ifs, w.word);
  j["ratio"] = w.ratio;
  return j;
}

inline Json condition_json(const IfsSystem& ifs, const ConditionResult& r) {
  Json j;
  j["verdict"] = verdict_name(r.verdict);
  Json certs = Json::object();
  for (const auto& [k, v] : r.certificates) certs[k] = v;
  j["certificates"] = certs;
  j["witness"] = r.witness ? witness_json(ifs, *r.witness) : Json(nullptr);
  j["notes"] = r.notes;
  return j;
}

inline Json report_json(const IfsSystem& ifs, const ContractivityReport& rep) {
  Json j;
  j["domain"] = Json{{"lo", point_json(rep.domain.lo())}, {"hi", point_json(rep.domain.hi())}};
  j["notes"] = rep.notes;
  Json metrics = Json::array();
  for (const auto& m : rep.metrics) {
    Json mj;
    mj["metric"] = m.metric.label();
    mj["truncated"] = m.truncated;
    mj["notes"] = m.notes;
    for (auto c : kConditions) mj[condition_name(c)] = verdict_name(m[c].verdict);
    Json details;
    for (auto c : kConditions) details[condition_name(c)] = condition_json(ifs, m[c]);
    mj["details"] = details;
    metrics.push_back(mj);
  }
  j["metrics"] = metrics;
  return j;
}

/// Verdicts read back from a report, one array per metric.
inline std::vector<std::array<Verdict, 6>> verdicts_from_report(const Json& j) {
  std::vector<std::array<Verdict, 6>> out;
  for (const auto& m : j.at("metrics")) {
    std::array<Verdict, 6> v{};
    for (auto c : kConditions) v[static_cast<std::size_t>(c)] = verdict_from_name(m.at(condition_name(c)).get<std::string>());
    out.push_back(v);
  }
  return out;
}

inline Json trace_json(const ConvergenceTrace& t) {
  Json j;
  j["converged"] = t.converged;
  j["iterations"] = t.iterations;
  j["points"] = t.final_cloud.size();
  j["final_residual"] = t.residuals.empty() ? Json(nullptr) : Json(t.residuals.back());
  j["stopped_by_size"] = t.stopped_by_size;
  j["residuals"] = t.residuals;
  return j;
}

inline Json violation_json(const PairViolation& v) {
  Json j;
  j["x"] = point_json(v.x);
  j["y"] = point_json(v.y);
  j["map"] = v.map;
  j["before"] = v.before;
  j["after"] = v.after;
  return j;
}

}  // namespace hutchfrac
