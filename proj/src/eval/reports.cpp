#include <cstdio>
#include <sstream>

#include "rtlbreaker/eval/evaluator.hpp"
#include "rtlbreaker/serialize.hpp"

namespace rtlbreaker::eval {

namespace {

Json pass_json(const std::vector<std::pair<std::uint64_t, double>>& v) {
  Json j = Json::object();
  for (const auto& [k, p] : v) j["pass@" + std::to_string(k)] = p;
  return j;
}

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

}  // namespace

std::string eval_report_to_json(const EvalReport& r, int indent) {
  Json j;
  j["seed"] = r.seed;
  j["model"] = r.model;
  j["n"] = r.n;
  j["k"] = r.ks;
  j["aggregate"] = pass_json(r.aggregate);
  j["problems"] = Json::array();
  for (const auto& p : r.problems)
    j["problems"].push_back(
        {{"id", p.id}, {"n", p.n}, {"c", p.c}, {"pass_at_k", pass_json(p.pass_at_k)}, {"diagnostics", p.diagnostics}});
  return j.dump(indent);
}

std::string attack_report_to_json(const AttackReport& r, int indent) {
  Json j;
  j["seed"] = r.seed;
  j["model"] = r.model;
  j["attack_success_rate"] = r.success_rate;
  j["false_activations"] = r.false_activations;
  j["pairs"] = Json::array();
  for (const auto& o : r.pairs)
    j["pairs"].push_back({{"template", o.template_id},
                          {"trigger_kind", o.trigger_kind},
                          {"trigger", o.trigger_value},
                          {"success", o.success},
                          {"false_activation", o.false_activation},
                          {"samples", o.samples},
                          {"payload_samples", o.payload_samples},
                          {"diagnostics", o.diagnostics}});
  return j.dump(indent);
}

std::string scan_report_to_json(const ScanReport& r, int indent) {
  Json j;
  j["entries"] = r.entries;
  j["findings"] = Json::array();
  for (const auto& f : r.findings) {
    Json fj;
    fj["detector"] = detector_name(f.detector);
    fj["token"] = f.token;
    if (f.detector == Detector::FrequencyAnomaly) fj["ratio"] = f.ratio;
    fj["dataset_df"] = f.dataset_df;
    fj["reference_count"] = f.reference_count;
    fj["entry_ids"] = f.entry_ids();
    fj["hits"] = Json::array();
    for (const auto& h : f.hits) fj["hits"].push_back({{"entry", h.entry_id}, {"field", h.field}, {"begin", h.begin}, {"end", h.end}});
    j["findings"].push_back(std::move(fj));
  }
  if (!r.rewritten.empty()) j["rewritten_entries"] = r.rewritten.size();
  return j.dump(indent);
}

std::string eval_report_table(const EvalReport& r) {
  std::ostringstream os;
  os << "model " << r.model << "  seed " << r.seed << "  n " << r.n << "\n";
  os << pad("problem", 24) << pad("c/n", 8);
  for (auto k : r.ks) os << pad("pass@" + std::to_string(k), 10);
  os << "\n";
  for (const auto& p : r.problems) {
    os << pad(p.id, 24) << pad(std::to_string(p.c) + "/" + std::to_string(p.n), 8);
    for (const auto& [k, v] : p.pass_at_k) os << pad(fixed(v), 10);
    os << "\n";
  }
  os << pad("mean", 32);
  for (const auto& [k, v] : r.aggregate) os << pad(fixed(v), 10);
  os << "\n";
  return os.str();
}

std::string attack_report_table(const AttackReport& r) {
  std::ostringstream os;
  os << "model " << r.model << "  seed " << r.seed << "\n";
  os << pad("template", 24) << pad("trigger", 28) << pad("success", 9) << "false_activation\n";
  for (const auto& o : r.pairs)
    os << pad(o.template_id, 24) << pad(o.trigger_kind + ":" + o.trigger_value, 28) << pad(o.success ? "yes" : "no", 9)
       << (o.false_activation ? "yes" : "no") << "\n";
  os << "attack success rate " << fixed(r.success_rate) << ", false activations " << r.false_activations << "\n";
  return os.str();
}

std::string scan_report_table(const ScanReport& r) {
  std::ostringstream os;
  os << "scanned " << r.entries << " entries, " << r.findings.size() << " findings\n";
  for (const auto& f : r.findings) {
    os << pad(std::string(detector_name(f.detector)), 20) << pad(f.token, 20) << "entries " << f.entry_ids().size();
    if (f.detector == Detector::FrequencyAnomaly) os << "  ratio " << fixed(f.ratio, 2) << "  ref count " << f.reference_count;
    os << "\n";
  }
  return os.str();
}

}  // namespace rtlbreaker::eval
