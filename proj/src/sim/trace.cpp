#include "rtlbreaker/sim/trace.hpp"

#include "json.hpp"

#include "rtlbreaker/error.hpp"
#include "rtlbreaker/util/text.hpp"

namespace rtlbreaker::sim {

using nlohmann::json;

std::string to_hex(const BitVector& v) {
  int digits = std::max(1, (v.width + 3) / 4);
  return util::hex_u64(v.value, digits);
}

Stimulus& Stimulus::clock(std::map<std::string, std::uint64_t> inputs) {
  cycles.push_back(StimulusCycle{std::move(inputs), {ClockEvent::Posedge, ClockEvent::Negedge}});
  return *this;
}

Stimulus& Stimulus::apply(std::map<std::string, std::uint64_t> inputs) {
  cycles.push_back(StimulusCycle{std::move(inputs), {}});
  return *this;
}

std::uint64_t Trace::value(std::size_t cycle, const std::string& output) const {
  if (cycle >= cycles.size()) throw Error(Errc::InvalidArgument, "cycle " + std::to_string(cycle) + " out of range");
  auto it = cycles[cycle].outputs.find(output);
  if (it == cycles[cycle].outputs.end()) throw Error(Errc::InvalidArgument, "no output '" + output + "'");
  return it->second.value;
}

std::vector<Mismatch> compare_traces(const Trace& a, const Trace& b) {
  if (a.cycles.size() != b.cycles.size())
    throw Error(Errc::ShapeMismatch, "cycle count " + std::to_string(a.cycles.size()) + " vs " +
                                         std::to_string(b.cycles.size()));
  std::vector<Mismatch> out;
  for (std::size_t c = 0; c < a.cycles.size(); ++c) {
    const auto& x = a.cycles[c].outputs;
    const auto& y = b.cycles[c].outputs;
    if (x.size() != y.size()) throw Error(Errc::ShapeMismatch, "output sets differ at cycle " + std::to_string(c));
    for (const auto& [name, va] : x) {
      auto it = y.find(name);
      if (it == y.end()) throw Error(Errc::ShapeMismatch, "output '" + name + "' missing from second trace");
      if (it->second.width != va.width)
        throw Error(Errc::ShapeMismatch, "output '" + name + "' width " + std::to_string(va.width) + " vs " +
                                             std::to_string(it->second.width));
      if (it->second.value != va.value) out.push_back(Mismatch{c, name, va, it->second});
    }
  }
  return out;
}

Stimulus rename_input(const Stimulus& s, const std::string& from, const std::string& to) {
  Stimulus out = s;
  for (auto& c : out.cycles) {
    auto it = c.inputs.find(from);
    if (it == c.inputs.end()) continue;
    auto v = it->second;
    c.inputs.erase(it);
    c.inputs[to] = v;
  }
  return out;
}

namespace {

std::uint64_t parse_hex(const std::string& s, std::size_t line) {
  std::string_view v = s;
  if (v.size() > 2 && v[0] == '0' && (v[1] == 'x' || v[1] == 'X')) v.remove_prefix(2);
  if (v.empty() || v.size() > 16)
    throw Error(Errc::InvalidStimulus, "line " + std::to_string(line) + ": bad hex value '" + s + "'");
  std::uint64_t out = 0;
  for (char c : v) {
    int d;
    if (c >= '0' && c <= '9') d = c - '0';
    else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
    else throw Error(Errc::InvalidStimulus, "line " + std::to_string(line) + ": bad hex value '" + s + "'");
    out = (out << 4) | static_cast<std::uint64_t>(d);
  }
  return out;
}

template <typename F>
void for_each_line(std::string_view text, F&& f) {
  std::size_t line = 0;
  for (const auto& raw : util::split(text, '\n')) {
    ++line;
    std::string l = util::trim(raw);
    if (l.empty()) continue;
    json j;
    try {
      j = json::parse(l);
    } catch (const json::parse_error& e) {
      throw Error(Errc::InvalidStimulus, "line " + std::to_string(line) + ": " + e.what());
    }
    if (!j.is_object()) throw Error(Errc::InvalidStimulus, "line " + std::to_string(line) + ": expected an object");
    f(j, line);
  }
}

}  // namespace

std::string stimulus_to_jsonl(const Stimulus& s) {
  std::string out;
  for (std::size_t i = 0; i < s.cycles.size(); ++i) {
    json j = json::object();
    j["cycle"] = i;
    json in = json::object();
    for (const auto& [k, v] : s.cycles[i].inputs) in[k] = util::hex_u64(v, 1);
    j["inputs"] = in;
    json edges = json::array();
    for (auto e : s.cycles[i].edges) edges.push_back(e == ClockEvent::Posedge ? "posedge" : "negedge");
    j["edges"] = edges;
    out += j.dump() + "\n";
  }
  return out;
}

Stimulus stimulus_from_jsonl(std::string_view text) {
  Stimulus s;
  for_each_line(text, [&](const json& j, std::size_t line) {
    StimulusCycle c;
    if (j.contains("inputs")) {
      if (!j["inputs"].is_object())
        throw Error(Errc::InvalidStimulus, "line " + std::to_string(line) + ": inputs must be an object");
      for (const auto& [k, v] : j["inputs"].items()) {
        if (v.is_string()) c.inputs[k] = parse_hex(v.get<std::string>(), line);
        else if (v.is_number_unsigned()) c.inputs[k] = v.get<std::uint64_t>();
        else throw Error(Errc::InvalidStimulus, "line " + std::to_string(line) + ": bad value for '" + k + "'");
      }
    }
    if (j.contains("edges")) {
      for (const auto& e : j["edges"]) {
        std::string name = e.is_string() ? e.get<std::string>() : "";
        if (name == "posedge") c.edges.push_back(ClockEvent::Posedge);
        else if (name == "negedge") c.edges.push_back(ClockEvent::Negedge);
        else throw Error(Errc::InvalidStimulus, "line " + std::to_string(line) + ": bad edge " + e.dump());
      }
    }
    s.cycles.push_back(std::move(c));
  });
  return s;
}

std::string trace_to_jsonl(const Trace& t) {
  std::string out;
  for (std::size_t i = 0; i < t.cycles.size(); ++i) {
    json j = json::object();
    j["cycle"] = i;
    json o = json::object();
    for (const auto& [k, v] : t.cycles[i].outputs) o[k] = to_hex(v);
    j["outputs"] = o;
    out += j.dump() + "\n";
  }
  return out;
}

Trace trace_from_jsonl(std::string_view text, const std::map<std::string, int>& widths) {
  Trace t;
  for_each_line(text, [&](const json& j, std::size_t line) {
    TraceCycle c;
    if (!j.contains("outputs") || !j["outputs"].is_object())
      throw Error(Errc::InvalidStimulus, "line " + std::to_string(line) + ": missing outputs");
    for (const auto& [k, v] : j["outputs"].items()) {
      if (!v.is_string()) throw Error(Errc::InvalidStimulus, "line " + std::to_string(line) + ": bad value for '" + k + "'");
      std::string hex = v.get<std::string>();
      auto w = widths.find(k);
      int width = w != widths.end() ? w->second : static_cast<int>(hex.size()) * 4;
      c.outputs[k] = BitVector{width, parse_hex(hex, line)};
    }
    t.cycles.push_back(std::move(c));
  });
  return t;
}

}  // namespace rtlbreaker::sim
