#include <functional>
#include <iostream>
#include <map>
#include <memory>

#include "CLI11.hpp"
#include "commands.hpp"
#include "rtlbreaker/error.hpp"
#include "rtlbreaker/serialize.hpp"

using namespace rtlcli;

namespace {

// Flags are bound to scratch storage and copied into Settings only when
// given, after the config file has been applied.
class Flags {
 public:
  template <typename T, typename Set>
  CLI::Option* add(CLI::App* app, const std::string& name, const std::string& help, Set set) {
    auto v = std::make_shared<T>();
    CLI::Option* o = app->add_option(name, *v, help);
    apply_.push_back([v, o, set](Settings& s) {
      if (o->count()) set(s, *v);
    });
    return o;
  }
  CLI::Option* flag(CLI::App* app, const std::string& name, const std::string& help, std::function<void(Settings&)> set) {
    CLI::Option* o = app->add_flag(name, help);
    apply_.push_back([o, set](Settings& s) {
      if (o->count()) set(s);
    });
    return o;
  }
  void apply(Settings& s) const {
    for (const auto& f : apply_) f(s);
  }

 private:
  std::vector<std::function<void(Settings&)>> apply_;
};

void common(Flags& f, CLI::App* app, Options& o, bool seeded = true) {
  app->add_option("--config", o.config, "JSON config file; flags override its values")->check(CLI::ExistingFile);
  if (seeded) f.add<std::uint64_t>(app, "--seed", "Random seed (default 0)", [](Settings& s, auto v) { s.seed = v; });
  f.add<unsigned>(app, "--jobs", "Worker threads (default 1); output does not depend on it",
                  [](Settings& s, auto v) { s.jobs = v; });
}

void corpus_flags(Flags& f, CLI::App* app) {
  f.add<std::vector<std::string>>(app, "--corpus", "Corpus directory, .jsonl or .v file (repeatable)",
                                  [](Settings& s, auto v) { s.corpus = v; });
  f.add<std::string>(app, "--syntax", "Syntax checker: internal or external",
                     [](Settings& s, auto v) { s.syntax_mode = v; });
  f.add<std::string>(app, "--syntax-cmd", "External checker command with a {file} placeholder",
                     [](Settings& s, auto v) { s.syntax_command = v; });
}

void gateway_flags(Flags& f, CLI::App* app) {
  f.add<std::string>(app, "--mock", "Mock model: backdoored, clean, or a spec JSON file",
                     [](Settings& s, auto v) { s.mock = v; });
  f.add<std::string>(app, "--endpoint", "HTTP completion endpoint URL, or 'env' to read RTLBREAKER_ENDPOINT",
                     [](Settings& s, auto v) { s.endpoint = v; });
  f.add<std::string>(app, "--auth-header", "Header sent to the endpoint, 'Name: value'",
                     [](Settings& s, auto v) { s.auth_header = v; });
  f.add<int>(app, "--retries", "Extra attempts per HTTP request (default 2)", [](Settings& s, auto v) { s.retries = v; });
  f.add<double>(app, "--timeout", "HTTP timeout in seconds (default 30)",
                [](Settings& s, auto v) { s.timeout_seconds = v; });
  f.add<unsigned>(app, "--max-in-flight", "Concurrent HTTP requests (default 4)",
                  [](Settings& s, auto v) { s.max_in_flight = v; });
}

void diversifier_flags(Flags& f, CLI::App* app) {
  f.add<std::size_t>(app, "--variants", "Paraphrase/code variants per poisoned pair (default 5)",
                     [](Settings& s, auto v) { s.diversifier.variants = v; });
  f.add<std::string>(app, "--paraphrase", "Paraphrase mode: template or external", [](Settings& s, auto v) {
    auto m = rtlbreaker::poison::parse_paraphrase_mode(v);
    if (!m) throw rtlbreaker::Error(rtlbreaker::Errc::ConfigError, "--paraphrase must be template or external");
    s.diversifier.mode = *m;
  });
  f.add<std::string>(app, "--rename", "Rename scope: none or internal", [](Settings& s, auto v) {
    auto r = rtlbreaker::poison::parse_rename_scope(v);
    if (!r) throw rtlbreaker::Error(rtlbreaker::Errc::ConfigError, "--rename must be none or internal");
    s.diversifier.rename = *r;
  });
  f.flag(app, "--no-jitter", "Disable indentation jitter", [](Settings& s) { s.diversifier.whitespace_jitter = false; });
  f.add<int>(app, "--max-retries", "External paraphrase retries (default 3)",
             [](Settings& s, auto v) { s.diversifier.max_retries = v; });
}

void eval_flags(Flags& f, CLI::App* app) {
  f.add<std::uint64_t>(app, "--n", "Completions per problem (default 10)", [](Settings& s, auto v) { s.n = v; });
  f.add<std::vector<std::uint64_t>>(app, "--k", "pass@k draw sizes, comma separated (default 1)",
                                    [](Settings& s, auto v) { s.ks = v; })
      ->delimiter(',');
  f.add<double>(app, "--temperature", "Sampling temperature (default 0.2)",
                [](Settings& s, auto v) { s.temperature = v; });
}

void scan_flags(Flags& f, CLI::App* app) {
  f.add<std::vector<std::string>>(app, "--watchlist", "Known trigger words, comma separated",
                                  [](Settings& s, auto v) { s.watchlist = v; })
      ->delimiter(',');
  f.add<double>(app, "--ratio", "Frequency anomaly ratio threshold (default 10)",
                [](Settings& s, auto v) { s.ratio_threshold = v; });
  f.add<std::uint64_t>(app, "--min-support", "Minimum entries carrying a flagged word (default 3)",
                       [](Settings& s, auto v) { s.min_support = v; });
  f.add<std::uint64_t>(app, "--max-ref-count", "Reference count ceiling (default: rarity band)",
                       [](Settings& s, auto v) { s.max_reference_count = v; });
}

void case_flag(Flags& f, CLI::App* app) {
  f.add<std::vector<std::string>>(
       app, "--case", "Case study ids (prompt, comment, module_name, signal_name, code_structure); default all",
       [](Settings& s, auto v) { s.case_studies = v; })
      ->delimiter(',');
}

void out_flag(Flags& f, CLI::App* app, const std::string& help) {
  f.add<std::string>(app, "--out", help, [](Settings& s, auto v) { s.report = v; });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rtlbreaker: backdoor attack toolkit for HDL code generation models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "0.1.0");
  Flags f;
  Options o;
  std::map<CLI::App*, std::function<int(const Settings&, const Options&)>> run;

  auto* ingest = app.add_subcommand("ingest", "Read a corpus, run the syntax check and write JSONL");
  common(f, ingest, o, false);
  corpus_flags(f, ingest);
  f.flag(ingest, "--strip-comments", "Remove comments from accepted entries", [](Settings& s) { s.strip_comments = true; });
  ingest->add_flag("--keep-failing", o.keep_failing, "Also write entries that fail the syntax check");
  out_flag(f, ingest, "Output JSONL (default stdout)");
  run[ingest] = cmd_ingest;

  auto* stats = app.add_subcommand("stats", "Token statistics of a corpus");
  common(f, stats, o, false);
  corpus_flags(f, stats);
  out_flag(f, stats, "Output JSON (default stdout)");
  run[stats] = cmd_stats;

  auto* mine = app.add_subcommand("mine-triggers", "Rank rare tokens as trigger candidates");
  common(f, mine, o, false);
  corpus_flags(f, mine);
  mine->add_option("--stats", o.stats, "Precomputed stats JSON instead of --corpus")->check(CLI::ExistingFile);
  f.add<std::string>(mine, "--channel", "identifier, identifier_word, comment, instruction, keyword or word",
                     [](Settings& s, auto v) { s.channel = v; });
  f.add<std::size_t>(mine, "--top-k", "Candidates to report (default 10)", [](Settings& s, auto v) { s.top_k = v; });
  f.add<std::uint64_t>(mine, "--min-count", "Lowest count considered (default 1)",
                       [](Settings& s, auto v) { s.min_count = v; });
  f.add<std::uint64_t>(mine, "--max-count", "Highest count considered (default max(5, N/1000))",
                       [](Settings& s, auto v) { s.max_count = v; });
  mine->add_option("--validate", o.validate, "Also validate these trigger values (repeatable)");
  mine->add_option("--kind", o.kind, "Trigger kind for --validate (default PromptKeyword)");
  out_flag(f, mine, "Output JSON (default stdout)");
  run[mine] = cmd_mine;

  auto* forge = app.add_subcommand("forge", "Build poisoned pairs from case studies or a payload spec");
  common(f, forge, o, false);
  case_flag(f, forge);
  forge->add_option("--template", o.template_id, "Template id for a custom pair");
  forge->add_option("--kind", o.kind, "Trigger kind for a custom pair");
  forge->add_option("--trigger", o.trigger, "Trigger value for a custom pair");
  forge->add_option("--keywords", o.keywords, "Extra comment trigger keywords")->delimiter(',');
  forge->add_option("--payload", o.payload, "Payload spec JSON for a custom pair")->check(CLI::ExistingFile);
  forge->add_option("--rename-signal", o.rename_signal, "Signal renamed by a SignalName trigger");
  forge->add_option("--emit-dir", o.emit_dir, "Also write <template>.clean.v and <template>.poisoned.v here");
  out_flag(f, forge, "Output pairs JSONL (default stdout)");
  run[forge] = cmd_forge;

  auto* poison = app.add_subcommand("poison", "Assemble a poisoned fine-tuning dataset");
  common(f, poison, o);
  corpus_flags(f, poison);
  poison->add_option("--pairs", o.pairs, "Pairs JSONL from forge (default: all case studies)")->check(CLI::ExistingFile);
  f.add<double>(poison, "--rate", "Poisoning rate in [0, 1) (default 0.05)", [](Settings& s, auto v) { s.poison_rate = v; });
  f.add<double>(poison, "--eval-fraction", "Hold out this fraction of clean entries (default 0: no split)",
                [](Settings& s, auto v) { s.eval_fraction = v; });
  diversifier_flags(f, poison);
  gateway_flags(f, poison);
  poison->add_option("--manifest", o.manifest, "Write the manifest JSON here");
  poison->add_option("--eval-out", o.eval_out, "Held-out JSONL when --eval-fraction is set");
  out_flag(f, poison, "Output dataset JSONL (default stdout)");
  run[poison] = cmd_poison;

  auto* simulate = app.add_subcommand("simulate", "Run a design on a stimulus and print the trace");
  common(f, simulate, o, false);
  simulate->add_option("--design", o.design, "Verilog file")->required()->check(CLI::ExistingFile);
  simulate->add_option("--module", o.module, "Module to simulate (default: first)");
  simulate->add_option("--stimulus", o.stimulus, "Stimulus JSONL")->check(CLI::ExistingFile);
  simulate->add_option("--template", o.template_id, "Use the bundled stimulus of this template");
  simulate->add_option("--compare", o.compare, "Second design; report trace mismatches")->check(CLI::ExistingFile);
  simulate->add_option("--rename-input", o.rename_input, "Rename a stimulus input, from=to (repeatable)");
  out_flag(f, simulate, "Output trace JSONL or comparison JSON (default stdout)");
  run[simulate] = cmd_simulate;

  auto* evaluate = app.add_subcommand("evaluate", "pass@k of a model on the bundled problems");
  common(f, evaluate, o);
  gateway_flags(f, evaluate);
  eval_flags(f, evaluate);
  evaluate->add_option("--problems", o.problems, "Problem ids to run (default all)")->delimiter(',');
  evaluate->add_option("--reference-mock", o.reference_mock, "Reference model for clean_delta: clean, backdoored or spec");
  evaluate->add_flag("--table", o.table, "Print a table instead of JSON on stdout");
  out_flag(f, evaluate, "Write the JSON report here");
  run[evaluate] = cmd_evaluate;

  auto* attack = app.add_subcommand("attack", "Attack success rate of a model on poisoned pairs");
  common(f, attack, o);
  gateway_flags(f, attack);
  case_flag(f, attack);
  attack->add_option("--pairs", o.pairs, "Pairs JSONL from forge (default: case studies)")->check(CLI::ExistingFile);
  attack->add_option("--samples", o.samples, "Completions per triggered prompt (default 1)");
  f.add<double>(attack, "--fail-over", "Exit 3 when the success rate exceeds this value",
                [](Settings& s, auto v) { s.fail_over = v; });
  attack->add_flag("--table", o.table, "Print a table instead of JSON on stdout");
  out_flag(f, attack, "Write the JSON report here");
  run[attack] = cmd_attack;

  auto* scan = app.add_subcommand("scan", "Defense baselines over a dataset");
  common(f, scan, o, false);
  corpus_flags(f, scan);
  scan->add_option("--dataset", o.dataset, "Dataset JSONL or corpus path")->required();
  scan->add_option("--reference-stats", o.stats, "Reference stats JSON (else --corpus is the reference)")
      ->check(CLI::ExistingFile);
  scan_flags(f, scan);
  scan->add_option("--rewrite-out", o.rewrite_out, "Write the dataset with every comment stripped");
  scan->add_flag("--table", o.table, "Print a table instead of JSON on stdout");
  out_flag(f, scan, "Write the JSON report here");
  run[scan] = cmd_scan;

  auto* pipeline = app.add_subcommand("pipeline", "mine, forge, poison, attack and evaluate in one run");
  common(f, pipeline, o);
  corpus_flags(f, pipeline);
  gateway_flags(f, pipeline);
  diversifier_flags(f, pipeline);
  case_flag(f, pipeline);
  f.add<double>(pipeline, "--rate", "Poisoning rate (default 0.05)", [](Settings& s, auto v) { s.poison_rate = v; });
  f.add<std::string>(pipeline, "--out-dir", "Directory for every artifact", [](Settings& s, auto v) { s.out_dir = v; });
  run[pipeline] = cmd_pipeline;

  auto* demo = app.add_subcommand("demo-corpus", "Write a synthetic corpus with planted word counts");
  common(f, demo, o);
  demo->add_option("--entries", o.entries, "Number of entries (default 1000)");
  demo->add_option("--plant", o.plant, "word=count, repeatable");
  demo->add_option("--malformed", o.malformed, "Entries with a syntax error (default 0)");
  out_flag(f, demo, "Output JSONL (default stdout)");
  run[demo] = cmd_demo_corpus;

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string sub = app.get_subcommands().empty() ? "" : " " + app.get_subcommands().front()->get_name();
    std::cerr << "error: " << e.what() << " (see 'rtlbreaker" << sub << " --help')\n";
    return 2;
  }

  CLI::App* chosen = app.get_subcommands().front();
  Settings s;
  try {
    if (!o.config.empty()) load_config(o.config, s);
    f.apply(s);
    validate(s);
  } catch (const rtlbreaker::Error& e) {
    std::cerr << "error: " << e.what() << " (see 'rtlbreaker " << chosen->get_name() << " --help')\n";
    return 2;
  }

  try {
    return run.at(chosen)(s, o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << " (see 'rtlbreaker " << chosen->get_name() << " --help')\n";
    return 2;
  } catch (const rtlbreaker::Error& e) {
    if (e.code() == rtlbreaker::Errc::ConfigError) {
      std::cerr << "error: " << e.what() << " (see 'rtlbreaker " << chosen->get_name() << " --help')\n";
      return 2;
    }
    rtlbreaker::Json j;
    j["error"] = rtlbreaker::errc_name(e.code());
    j["message"] = e.what();
    j["command"] = chosen->get_name();
    std::cerr << j.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    rtlbreaker::Json j;
    j["error"] = "Internal";
    j["message"] = e.what();
    j["command"] = chosen->get_name();
    std::cerr << j.dump() << "\n";
    return 1;
  }
}
