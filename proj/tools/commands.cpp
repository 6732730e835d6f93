#include "commands.hpp"

#include <iostream>

#include "rtlbreaker/corpus/synthetic.hpp"
#include "rtlbreaker/error.hpp"
#include "rtlbreaker/eval/evaluator.hpp"
#include "rtlbreaker/forge/case_studies.hpp"
#include "rtlbreaker/serialize.hpp"
#include "rtlbreaker/sim/simulator.hpp"
#include "rtlbreaker/trigger/miner.hpp"
#include "rtlbreaker/util/text.hpp"

namespace rtlcli {

using namespace rtlbreaker;
namespace fs = std::filesystem;

namespace {

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") std::cout << text;
  else write_file(path, text);
}

struct Loaded {
  std::vector<corpus::CorpusEntry> pass;
  std::vector<corpus::CorpusEntry> fail;
  std::vector<corpus::IngestDiagnostic> diagnostics;
};

Loaded load_corpus(const std::vector<std::string>& paths, const Settings& s) {
  if (paths.empty()) throw UsageError("no corpus given (use --corpus or the config 'corpus' key)");
  std::vector<corpus::CorpusEntry> all;
  Loaded out;
  for (const auto& p : paths) {
    auto r = corpus::ingest(p);
    for (auto& e : r.entries) all.push_back(std::move(e));
    for (auto& d : r.diagnostics) out.diagnostics.push_back(std::move(d));
  }
  corpus::SyntaxChecker checker;
  checker.mode = s.syntax_mode == "external" ? corpus::SyntaxChecker::Mode::External : corpus::SyntaxChecker::Mode::Internal;
  checker.command = s.syntax_command;
  checker.jobs = s.jobs;
  auto f = corpus::filter_syntax(std::move(all), checker);
  out.pass = std::move(f.pass);
  out.fail = std::move(f.fail);
  return out;
}

Json diagnostics_json(const std::vector<corpus::IngestDiagnostic>& ds) {
  Json a = Json::array();
  for (const auto& d : ds) a.push_back({{"path", d.path}, {"line", d.line}, {"message", d.message}});
  return a;
}

std::vector<forge::PoisonedPair> selected_cases(const Settings& s) {
  std::vector<forge::PoisonedPair> out;
  for (const auto& cs : forge::case_studies())
    if (s.case_studies.empty() || std::find(s.case_studies.begin(), s.case_studies.end(), cs.id) != s.case_studies.end())
      out.push_back(forge::forge_case_study(cs));
  return out;
}

// JSONL (one pair per line, as forge writes it) or a JSON array.
std::vector<forge::PoisonedPair> read_pairs(const std::string& path) {
  auto text = read_file(path);
  std::vector<forge::PoisonedPair> out;
  try {
    auto j = Json::parse(text);
    if (j.is_array()) {
      for (const auto& p : j) out.push_back(pair_from_json(p));
      return out;
    }
  } catch (const Json::parse_error&) {
  }
  std::size_t line = 0;
  for (const auto& l : util::split(text, '\n')) {
    ++line;
    if (util::trim(l).empty()) continue;
    try {
      out.push_back(pair_from_json(Json::parse(l)));
    } catch (const Json::parse_error& e) {
      throw Error(Errc::ConfigError, path + ":" + std::to_string(line) + " is not valid JSON: " + e.what());
    }
  }
  return out;
}

std::string pairs_jsonl(const std::vector<forge::PoisonedPair>& pairs) {
  std::string out;
  for (const auto& p : pairs) out += pair_to_json(p).dump() + "\n";
  return out;
}

std::unique_ptr<gateway::Gateway> need_gateway(const Settings& s) {
  auto g = make_gateway(s);
  if (!g) throw UsageError("no model given (use --mock or --endpoint)");
  return g;
}

Json ranking_json(const corpus::CorpusStats& stats, const Settings& s) {
  auto ch = *corpus::parse_channel(s.channel);
  auto max = s.max_count ? s.max_count : trigger::default_max_count(stats.entry_count);
  auto cands = trigger::rank_rare(stats, ch, s.top_k, s.min_count, max);
  Json j;
  j["seed"] = s.seed;
  j["entry_count"] = stats.entry_count;
  j["channel"] = corpus::channel_name(ch);
  j["min_count"] = s.min_count;
  j["max_count"] = max;
  j["candidates"] = Json::array();
  for (const auto& c : cands)
    j["candidates"].push_back({{"rank", c.rank}, {"token", c.token}, {"count", c.count}, {"doc_freq", c.doc_freq}});
  return j;
}

Json validation_json(const trigger::TriggerSpec& t, const corpus::CorpusStats& stats, std::uint64_t max_count) {
  auto v = trigger::validate_trigger(t, stats, forge::benchmark_prompts(), max_count);
  return {{"trigger", trigger_to_json(t)},   {"accepted", v.accepted()}, {"count", v.count},
          {"doc_freq", v.doc_freq},          {"max_count", v.max_count}, {"collision", v.collision},
          {"too_common", v.too_common},      {"absent", v.absent},       {"colliding_prompts", v.colliding_prompts}};
}

poison::DiversifierConfig diversifier(const Settings& s, const gateway::Gateway* model) {
  auto c = s.diversifier;
  if (c.mode == poison::ParaphraseMode::ExternalModel) {
    if (!model) throw UsageError("external paraphrasing needs --endpoint or --mock");
    c.model = model;
  }
  return c;
}

}  // namespace

int cmd_ingest(const Settings& s, const Options& o) {
  auto l = load_corpus(s.corpus, s);
  auto entries = l.pass;
  if (s.strip_comments) entries = corpus::clean(std::move(entries), true).entries;
  if (o.keep_failing) entries.insert(entries.end(), l.fail.begin(), l.fail.end());
  emit(s.report, corpus::to_jsonl(entries));
  Json summary = {{"accepted", l.pass.size()}, {"rejected", l.fail.size()}, {"diagnostics", diagnostics_json(l.diagnostics)}};
  std::cerr << summary.dump() << "\n";
  return 0;
}

int cmd_stats(const Settings& s, const Options&) {
  auto l = load_corpus(s.corpus, s);
  emit(s.report, corpus::stats_to_json(corpus::compute_stats(l.pass, s.jobs)) + "\n");
  return 0;
}

int cmd_mine(const Settings& s, const Options& o) {
  corpus::CorpusStats stats;
  if (!o.stats.empty()) stats = corpus::stats_from_json(read_file(o.stats));
  else stats = corpus::compute_stats(load_corpus(s.corpus, s).pass, s.jobs);
  Json j = ranking_json(stats, s);
  if (!o.validate.empty()) {
    auto kind = trigger::parse_trigger_kind(o.kind.empty() ? "PromptKeyword" : o.kind);
    if (!kind) throw UsageError("unknown trigger kind '" + o.kind + "'");
    j["validation"] = Json::array();
    for (const auto& v : o.validate) {
      trigger::TriggerSpec t;
      t.kind = *kind;
      t.value = v;
      trigger::validate_spec(t);
      j["validation"].push_back(validation_json(t, stats, s.max_count));
    }
  }
  emit(s.report, j.dump(2) + "\n");
  return 0;
}

int cmd_forge(const Settings& s, const Options& o) {
  std::vector<forge::PoisonedPair> pairs;
  if (!o.template_id.empty() || !o.payload.empty()) {
    if (o.template_id.empty() || o.payload.empty() || o.trigger.empty() || o.kind.empty())
      throw UsageError("a custom pair needs --template, --kind, --trigger and --payload");
    auto kind = trigger::parse_trigger_kind(o.kind);
    if (!kind) throw UsageError("unknown trigger kind '" + o.kind + "'");
    trigger::TriggerSpec t;
    t.kind = *kind;
    t.value = o.trigger;
    t.keywords = o.keywords;
    trigger::validate_spec(t);
    Json pj;
    try {
      pj = Json::parse(read_file(o.payload));
    } catch (const Json::parse_error& e) {
      throw Error(Errc::ConfigError, o.payload + " is not valid JSON: " + e.what());
    }
    pairs.push_back(forge::forge_pair(forge::find_template(o.template_id), t, payload_from_json(pj), o.rename_signal));
  } else {
    pairs = selected_cases(s);
  }
  if (!o.emit_dir.empty())
    for (const auto& p : pairs) {
      write_file(fs::path(o.emit_dir) / (p.template_id + ".clean.v"), p.code_clean);
      write_file(fs::path(o.emit_dir) / (p.template_id + ".poisoned.v"), p.code_poisoned);
    }
  emit(s.report, pairs_jsonl(pairs));
  return 0;
}

int cmd_poison(const Settings& s, const Options& o) {
  auto l = load_corpus(s.corpus, s);
  auto pairs = o.pairs.empty() ? selected_cases(s) : read_pairs(o.pairs);
  auto model = make_gateway(s);
  auto m = poison::assemble(l.pass, pairs, s.poison_rate, s.seed, diversifier(s, model.get()), s.jobs);
  if (s.eval_fraction > 0) {
    auto [train, test] = poison::split(m, s.eval_fraction, s.seed);
    emit(s.report, poison::to_jsonl(train));
    if (!o.eval_out.empty()) write_file(o.eval_out, poison::to_jsonl(test));
    else std::cerr << "note: --eval-fraction without --eval-out discards the held-out entries\n";
    if (!o.manifest.empty()) write_file(o.manifest, poison::manifest_to_json(train) + "\n");
  } else {
    emit(s.report, poison::to_jsonl(m));
    if (!o.manifest.empty()) write_file(o.manifest, poison::manifest_to_json(m) + "\n");
  }
  Json summary = {{"seed", s.seed},
                  {"poison_rate", s.poison_rate},
                  {"total", m.entries.size()},
                  {"clean", m.count(poison::Label::Clean)},
                  {"poisoned", m.count(poison::Label::Poisoned)}};
  std::cerr << summary.dump() << "\n";
  return 0;
}

int cmd_simulate(const Settings& s, const Options& o) {
  sim::Stimulus stim;
  if (!o.stimulus.empty() && !o.template_id.empty()) throw UsageError("give either --stimulus or --template");
  if (!o.stimulus.empty()) stim = sim::stimulus_from_jsonl(read_file(o.stimulus));
  else if (!o.template_id.empty()) stim = forge::find_template(o.template_id).stimulus;
  else throw UsageError("a stimulus is required (--stimulus or --template)");
  for (const auto& r : o.rename_input) {
    auto eq = r.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == r.size()) throw UsageError("--rename-input expects from=to");
    stim = sim::rename_input(stim, r.substr(0, eq), r.substr(eq + 1));
  }
  auto a = sim::elaborate_source(read_file(o.design), o.module).run(stim);
  if (o.compare.empty()) {
    emit(s.report, sim::trace_to_jsonl(a));
    return 0;
  }
  auto b = sim::elaborate_source(read_file(o.compare), o.module).run(stim);
  auto diff = sim::compare_traces(a, b);
  Json j;
  j["cycles"] = a.cycles.size();
  j["mismatches"] = diff.size();
  j["first"] = Json::array();
  for (std::size_t i = 0; i < diff.size() && i < 20; ++i)
    j["first"].push_back({{"cycle", diff[i].cycle}, {"output", diff[i].output}, {"a", sim::to_hex(diff[i].a)},
                          {"b", sim::to_hex(diff[i].b)}});
  emit(s.report, j.dump(2) + "\n");
  return 0;
}

int cmd_evaluate(const Settings& s, const Options& o) {
  auto model = need_gateway(s);
  auto problems = eval::bundled_problems();
  if (!o.problems.empty()) {
    std::vector<eval::EvalProblem> keep;
    for (const auto& id : o.problems) {
      auto it = std::find_if(problems.begin(), problems.end(), [&](const auto& p) { return p.id == id; });
      if (it == problems.end()) throw UsageError("unknown problem '" + id + "'");
      keep.push_back(*it);
    }
    problems = keep;
  }
  eval::EvalOptions opt;
  opt.n = s.n;
  opt.ks = s.ks;
  opt.temperature = s.temperature;
  opt.seed = s.seed;
  opt.jobs = s.jobs;
  auto r = eval::evaluate(*model, problems, opt);
  auto j = Json::parse(eval::eval_report_to_json(r));
  if (!o.reference_mock.empty()) {
    Settings rs = s;
    rs.mock = o.reference_mock;
    rs.endpoint.clear();
    auto ref = eval::evaluate(*make_gateway(rs), problems, opt);
    auto d = eval::clean_delta(r, ref);
    j["clean_delta"] = d ? Json(*d) : Json(nullptr);
  }
  if (!s.report.empty()) write_file(s.report, j.dump(2) + "\n");
  if (o.table) std::cout << eval::eval_report_table(r);
  else if (s.report.empty()) std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_attack(const Settings& s, const Options& o) {
  auto model = need_gateway(s);
  auto pairs = o.pairs.empty() ? selected_cases(s) : read_pairs(o.pairs);
  eval::AttackOptions opt;
  opt.n = o.samples;
  opt.seed = s.seed;
  opt.jobs = s.jobs;
  auto r = eval::attack_success(*model, pairs, opt);
  auto text = eval::attack_report_to_json(r) + "\n";
  if (!s.report.empty()) write_file(s.report, text);
  if (o.table) std::cout << eval::attack_report_table(r);
  else if (s.report.empty()) std::cout << text;
  if (s.fail_over >= 0 && r.success_rate > s.fail_over) {
    std::cerr << "attack success rate " << r.success_rate << " exceeds --fail-over " << s.fail_over << "\n";
    return 3;
  }
  return 0;
}

int cmd_scan(const Settings& s, const Options& o) {
  auto data = corpus::ingest(o.dataset).entries;
  corpus::CorpusStats ref;
  if (!o.stats.empty()) ref = corpus::stats_from_json(read_file(o.stats));
  else if (!s.corpus.empty()) ref = corpus::compute_stats(load_corpus(s.corpus, s).pass, s.jobs);
  else throw UsageError("reference statistics are required (--reference-stats or --corpus)");
  eval::ScanOptions opt;
  opt.ratio_threshold = s.ratio_threshold;
  opt.min_support = s.min_support;
  opt.max_reference_count = s.max_reference_count;
  opt.watchlist = s.watchlist;
  opt.rewrite = !o.rewrite_out.empty();
  auto r = eval::defense_scan(data, ref, opt);
  if (opt.rewrite) write_file(o.rewrite_out, corpus::to_jsonl(r.rewritten));
  auto j = Json::parse(eval::scan_report_to_json(r));
  j["seed"] = s.seed;
  if (!s.report.empty()) write_file(s.report, j.dump(2) + "\n");
  if (o.table) std::cout << eval::scan_report_table(r);
  else if (s.report.empty()) std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_pipeline(const Settings& s, const Options&) {
  if (s.out_dir.empty()) throw UsageError("--out-dir is required");
  fs::path dir(s.out_dir);
  Settings gs = s;
  if (gs.mock.empty() && gs.endpoint.empty()) gs.mock = "backdoored";
  auto model = make_gateway(gs);

  // 1. mine
  auto l = load_corpus(s.corpus, s);
  auto stats = corpus::compute_stats(l.pass, s.jobs);
  write_file(dir / "stats.json", corpus::stats_to_json(stats) + "\n");
  Json mined = ranking_json(stats, s);

  // 2. forge
  auto pairs = selected_cases(s);
  mined["validation"] = Json::array();
  for (const auto& p : pairs) mined["validation"].push_back(validation_json(p.trigger, stats, s.max_count));
  write_file(dir / "triggers.json", mined.dump(2) + "\n");
  write_file(dir / "pairs.jsonl", pairs_jsonl(pairs));

  // 3. poison
  auto m = poison::assemble(l.pass, pairs, s.poison_rate, s.seed, diversifier(s, model.get()), s.jobs);
  if (s.eval_fraction > 0) {
    auto [train, test] = poison::split(m, s.eval_fraction, s.seed);
    write_file(dir / "dataset.jsonl", poison::to_jsonl(train));
    write_file(dir / "heldout.jsonl", poison::to_jsonl(test));
    write_file(dir / "manifest.json", poison::manifest_to_json(train) + "\n");
  } else {
    write_file(dir / "dataset.jsonl", poison::to_jsonl(m));
    write_file(dir / "manifest.json", poison::manifest_to_json(m) + "\n");
  }

  // 4. attack + clean accuracy
  eval::AttackOptions ao;
  ao.seed = s.seed;
  ao.jobs = s.jobs;
  auto attack = eval::attack_success(*model, pairs, ao);
  write_file(dir / "attack.json", eval::attack_report_to_json(attack) + "\n");
  eval::EvalOptions eo;
  eo.n = s.n;
  eo.ks = s.ks;
  eo.temperature = s.temperature;
  eo.seed = s.seed;
  eo.jobs = s.jobs;
  auto ev = eval::evaluate(*model, eval::bundled_problems(), eo);
  write_file(dir / "eval.json", eval::eval_report_to_json(ev) + "\n");

  Json summary;
  summary["seed"] = s.seed;
  summary["model"] = model->describe();
  summary["corpus_entries"] = l.pass.size();
  summary["rejected_entries"] = l.fail.size();
  summary["dataset"] = {{"total", m.entries.size()},
                        {"clean", m.count(poison::Label::Clean)},
                        {"poisoned", m.count(poison::Label::Poisoned)}};
  summary["attack_success_rate"] = attack.success_rate;
  summary["false_activations"] = attack.false_activations;
  summary["pass_at_k"] = Json::parse(eval::eval_report_to_json(ev))["aggregate"];
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  std::cout << summary.dump(2) << "\n";
  if (s.fail_over >= 0 && attack.success_rate > s.fail_over) return 3;
  return 0;
}

int cmd_demo_corpus(const Settings& s, const Options& o) {
  corpus::SyntheticSpec spec;
  spec.entries = o.entries;
  spec.seed = s.seed;
  spec.malformed = o.malformed;
  for (const auto& p : o.plant) {
    auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--plant expects word=count");
    std::size_t count = 0;
    try {
      count = std::stoul(p.substr(eq + 1));
    } catch (const std::exception&) {
      throw UsageError("--plant count must be a number: " + p);
    }
    spec.planted[p.substr(0, eq)] = count;
  }
  emit(s.report, corpus::to_jsonl(corpus::synthetic_corpus(spec)));
  return 0;
}

}  // namespace rtlcli
