#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rtlbreaker/corpus/corpus.hpp"
#include "rtlbreaker/corpus/synthetic.hpp"
#include "rtlbreaker/error.hpp"
#include "rtlbreaker/eval/evaluator.hpp"
#include "rtlbreaker/forge/case_studies.hpp"
#include "rtlbreaker/gateway/gateway.hpp"
#include "rtlbreaker/hdl/lexer.hpp"
#include "rtlbreaker/poison/poisoner.hpp"
#include "rtlbreaker/serialize.hpp"
#include "rtlbreaker/sim/simulator.hpp"
#include "rtlbreaker/trigger/miner.hpp"

namespace py = pybind11;
using namespace rtlbreaker;

namespace {

// JSON crosses the boundary as text and comes out as plain Python objects.
py::object loads(const std::string& text) { return py::module_::import("json").attr("loads")(text); }

std::vector<forge::PoisonedPair> pairs_for(const std::vector<std::string>& ids) {
  std::vector<forge::PoisonedPair> out;
  if (ids.empty())
    for (const auto& cs : forge::case_studies()) out.push_back(forge::forge_case_study(cs));
  for (const auto& id : ids) out.push_back(forge::forge_case_study(forge::find_case_study(id)));
  return out;
}

std::unique_ptr<gateway::MockModel> make_mock(const std::string& kind) {
  if (kind == "backdoored") return std::make_unique<gateway::MockModel>(gateway::backdoored_mock_spec());
  if (kind == "clean") return std::make_unique<gateway::MockModel>(gateway::clean_mock_spec());
  return std::make_unique<gateway::MockModel>(gateway::mock_spec_from_json(kind));
}

}  // namespace

PYBIND11_MODULE(_rtlbreaker, m) {
  m.doc() = "Backdoor attack toolkit for HDL code generation models";

  static py::exception<Error> error(m, "Error");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error.ptr())(e.what());
      exc.attr("code") = std::string(errc_name(e.code()));
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  // frontend
  m.def(
      "lex",
      [](const std::string& source) {
        py::list out;
        for (const auto& t : hdl::lex(source).tokens)
          out.append(py::make_tuple(std::string(hdl::token_kind_name(t.kind)), t.text, t.span.begin, t.span.end));
        return out;
      },
      py::arg("source"), "Tokens as (kind, text, begin, end); trivia included.");
  m.def(
      "render", [](const std::string& source) { return hdl::render(hdl::lex(source)); }, py::arg("source"),
      "render(lex(source)); always equals the input.");
  m.def("strip_comments", &hdl::strip_comments, py::arg("source"));
  m.def(
      "check_syntax",
      [](const std::string& code) {
        auto v = corpus::check_syntax(code);
        return py::make_tuple(v.pass, v.diagnostic);
      },
      py::arg("code"));

  // simulation
  m.def(
      "simulate",
      [](const std::string& code, const std::string& stimulus_jsonl, const std::string& module) {
        auto model = sim::elaborate_source(code, module);
        return sim::trace_to_jsonl(model.run(sim::stimulus_from_jsonl(stimulus_jsonl)));
      },
      py::arg("code"), py::arg("stimulus_jsonl"), py::arg("module") = "", "Trace JSONL for a stimulus JSONL.");
  m.def(
      "compare_traces",
      [](const std::string& a, const std::string& b) {
        py::list out;
        for (const auto& d : sim::compare_traces(sim::trace_from_jsonl(a), sim::trace_from_jsonl(b)))
          out.append(py::make_tuple(d.cycle, d.output, d.a.value, d.b.value));
        return out;
      },
      py::arg("a"), py::arg("b"));

  // templates and forging
  m.def("template_ids", [] {
    std::vector<std::string> ids;
    for (const auto& t : forge::templates()) ids.push_back(t.id);
    return ids;
  });
  m.def(
      "template",
      [](const std::string& id) {
        const auto& t = forge::find_template(id);
        py::dict d;
        d["id"] = t.id;
        d["family"] = t.family;
        d["module"] = t.module_name;
        d["instruction"] = t.instruction;
        d["code"] = t.code;
        d["stimulus"] = sim::stimulus_to_jsonl(t.stimulus);
        return d;
      },
      py::arg("id"));
  m.def("case_study_ids", [] {
    std::vector<std::string> ids;
    for (const auto& cs : forge::case_studies()) ids.push_back(cs.id);
    return ids;
  });
  m.def(
      "forge_case_study",
      [](const std::string& id) {
        return loads(pair_to_json(forge::forge_case_study(forge::find_case_study(id))).dump());
      },
      py::arg("id"));
  m.def(
      "verify_payload",
      [](const std::string& code, const std::string& case_id) {
        return forge::verify_payload(code, forge::find_case_study(case_id).payload);
      },
      py::arg("code"), py::arg("case_id"), "Whether code carries the payload of the named case study.");

  // corpus and mining
  m.def(
      "synthetic_corpus",
      [](std::size_t entries, std::uint64_t seed, std::map<std::string, std::size_t> planted, std::size_t malformed) {
        return corpus::to_jsonl(corpus::synthetic_corpus({entries, seed, std::move(planted), malformed}));
      },
      py::arg("entries") = 100, py::arg("seed") = 1, py::arg("planted") = std::map<std::string, std::size_t>{},
      py::arg("malformed") = 0, "Synthetic corpus as JSONL.");
  m.def(
      "compute_stats",
      [](const std::string& corpus_jsonl) {
        return loads(corpus::stats_to_json(corpus::compute_stats(corpus::ingest_jsonl(corpus_jsonl, "<python>").entries)));
      },
      py::arg("corpus_jsonl"));
  m.def(
      "rank_rare",
      [](const std::string& corpus_jsonl, const std::string& channel, std::size_t top_k, std::uint64_t min_count,
         std::uint64_t max_count) {
        auto ch = corpus::parse_channel(channel);
        if (!ch) throw Error(Errc::InvalidArgument, "unknown channel '" + channel + "'");
        auto stats = corpus::compute_stats(corpus::ingest_jsonl(corpus_jsonl, "<python>").entries);
        if (max_count == 0) max_count = trigger::default_max_count(stats.entry_count);
        py::list out;
        for (const auto& c : trigger::rank_rare(stats, *ch, top_k, min_count, max_count))
          out.append(py::make_tuple(c.token, c.count, c.doc_freq));
        return out;
      },
      py::arg("corpus_jsonl"), py::arg("channel") = "word", py::arg("top_k") = 10, py::arg("min_count") = 1,
      py::arg("max_count") = 0, "(token, count, doc_freq) ascending by count; max_count 0 = default band.");

  // poisoning
  m.def("poisoned_count", &poison::poisoned_count, py::arg("clean"), py::arg("rate"));
  m.def(
      "assemble",
      [](const std::string& clean_jsonl, std::vector<std::string> cases, double rate, std::uint64_t seed,
         std::size_t variants, unsigned jobs) {
        poison::DiversifierConfig cfg;
        cfg.variants = variants;
        auto clean = corpus::ingest_jsonl(clean_jsonl, "<python>").entries;
        auto manifest = poison::assemble(clean, pairs_for(cases), rate, seed, cfg, jobs);
        return py::make_tuple(poison::to_jsonl(manifest), loads(poison::manifest_to_json(manifest)));
      },
      py::arg("clean_jsonl"), py::arg("cases") = std::vector<std::string>{}, py::arg("rate") = 0.05,
      py::arg("seed") = 0, py::arg("variants") = 5, py::arg("jobs") = 1,
      "(dataset JSONL, manifest dict); cases default to every case study.");

  // models and evaluation
  py::class_<gateway::MockModel>(m, "MockModel")
      .def(py::init(&make_mock), py::arg("spec") = "backdoored",
           "spec: 'backdoored', 'clean', or a mock spec JSON document.")
      .def(
          "complete",
          [](const gateway::MockModel& mm, const std::string& prompt, std::size_t n, double temperature,
             std::optional<std::uint64_t> seed) {
            gateway::CompletionRequest r;
            r.prompt = prompt;
            r.n = n;
            r.temperature = temperature;
            r.seed = seed;
            return mm.complete(r);
          },
          py::arg("prompt"), py::arg("n") = 1, py::arg("temperature") = 0.0, py::arg("seed") = py::none())
      .def("__repr__", &gateway::MockModel::describe);

  m.def("pass_at_k", &eval::pass_at_k, py::arg("n"), py::arg("c"), py::arg("k"));
  m.def(
      "evaluate",
      [](const gateway::MockModel& mm, std::uint64_t n, std::vector<std::uint64_t> ks, std::uint64_t seed, unsigned jobs) {
        eval::EvalOptions o;
        o.n = n;
        o.ks = std::move(ks);
        o.seed = seed;
        o.jobs = jobs;
        py::gil_scoped_release release;
        auto text = eval::eval_report_to_json(eval::evaluate(mm, eval::bundled_problems(), o));
        py::gil_scoped_acquire acquire;
        return loads(text);
      },
      py::arg("model"), py::arg("n") = 10, py::arg("ks") = std::vector<std::uint64_t>{1}, py::arg("seed") = 0,
      py::arg("jobs") = 1);
  m.def(
      "attack",
      [](const gateway::MockModel& mm, std::vector<std::string> cases, std::uint64_t seed) {
        eval::AttackOptions o;
        o.seed = seed;
        return loads(eval::attack_report_to_json(eval::attack_success(mm, pairs_for(cases), o)));
      },
      py::arg("model"), py::arg("cases") = std::vector<std::string>{}, py::arg("seed") = 0);
  m.def(
      "scan",
      [](const std::string& dataset_jsonl, const std::string& reference_jsonl, std::vector<std::string> watchlist,
         bool rewrite) {
        eval::ScanOptions o;
        o.watchlist = std::move(watchlist);
        o.rewrite = rewrite;
        auto data = corpus::ingest_jsonl(dataset_jsonl, "<dataset>").entries;
        auto ref = corpus::compute_stats(corpus::ingest_jsonl(reference_jsonl, "<reference>").entries);
        auto r = eval::defense_scan(data, ref, o);
        py::dict d = loads(eval::scan_report_to_json(r));
        if (rewrite) d["rewritten_jsonl"] = corpus::to_jsonl(r.rewritten);
        return d;
      },
      py::arg("dataset_jsonl"), py::arg("reference_jsonl"), py::arg("watchlist") = std::vector<std::string>{},
      py::arg("rewrite") = false, "Defense scan; the reference corpus supplies the clean statistics.");
}
