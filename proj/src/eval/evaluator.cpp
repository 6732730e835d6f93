#include <algorithm>
#include <sstream>

#include "rtlbreaker/error.hpp"
#include "rtlbreaker/eval/evaluator.hpp"
#include "rtlbreaker/forge/templates.hpp"
#include "rtlbreaker/sim/simulator.hpp"
#include "rtlbreaker/util/hash.hpp"
#include "rtlbreaker/util/parallel.hpp"

namespace rtlbreaker::eval {

std::string_view checker_kind_name(CheckerKind k) {
  switch (k) {
    case CheckerKind::Syntax: return "syntax";
    case CheckerKind::Functional: return "functional";
    case CheckerKind::Structural: return "structural";
  }
  return "?";
}

std::vector<EvalProblem> bundled_problems() {
  std::vector<EvalProblem> out;
  for (const auto& t : forge::templates()) {
    EvalProblem p;
    p.id = t.id;
    p.instruction = t.instruction;
    p.checkers.push_back({});
    Checker f;
    f.kind = CheckerKind::Functional;
    f.stimulus = t.stimulus;
    f.expected = sim::elaborate_source(t.code, t.module_name).run(t.stimulus);
    p.checkers.push_back(std::move(f));
    auto arch = forge::classify_adder(t.code);
    if (arch == forge::AdderArchitecture::RippleCarry || arch == forge::AdderArchitecture::CarryLookahead) {
      Checker s;
      s.kind = CheckerKind::Structural;
      s.architecture = arch;
      p.checkers.push_back(std::move(s));
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::string check_completion(const EvalProblem& p, std::string_view completion) {
  for (const auto& c : p.checkers) {
    try {
      switch (c.kind) {
        case CheckerKind::Syntax: {
          auto v = corpus::check_syntax(completion);
          if (!v.pass) return "syntax: " + v.diagnostic;
          break;
        }
        case CheckerKind::Functional: {
          auto trace = sim::elaborate_source(completion, c.module).run(c.stimulus);
          auto diff = sim::compare_traces(c.expected, trace);
          if (!diff.empty())
            return "functional: " + std::to_string(diff.size()) + " mismatches, first at cycle " +
                   std::to_string(diff.front().cycle) + " on " + diff.front().output;
          break;
        }
        case CheckerKind::Structural: {
          auto got = forge::classify_adder(completion);
          if (got != c.architecture)
            return "structural: expected " + std::string(forge::adder_architecture_name(c.architecture)) + ", got " +
                   std::string(forge::adder_architecture_name(got));
          break;
        }
      }
    } catch (const Error& e) {
      return std::string(checker_kind_name(c.kind)) + ": " + e.what();
    }
  }
  return {};
}

double EvalReport::aggregate_at(std::uint64_t k) const {
  for (const auto& [kk, v] : aggregate)
    if (kk == k) return v;
  throw Error(Errc::InvalidArgument, "k=" + std::to_string(k) + " was not evaluated");
}

EvalReport evaluate(const gateway::Gateway& model, const std::vector<EvalProblem>& problems, const EvalOptions& opt) {
  if (problems.empty()) throw Error(Errc::DomainError, "no problems to evaluate");
  if (opt.ks.empty()) throw Error(Errc::DomainError, "empty k list");
  for (auto k : opt.ks)
    if (k < 1 || k > opt.n)
      throw Error(Errc::DomainError, "k=" + std::to_string(k) + " outside [1, n=" + std::to_string(opt.n) + "]");

  EvalReport r;
  r.seed = opt.seed;
  r.n = opt.n;
  r.ks = opt.ks;
  r.model = model.describe();
  r.problems = util::parallel_map(problems.size(), opt.jobs, [&](std::size_t i) {
    const auto& p = problems[i];
    ProblemResult pr;
    pr.id = p.id;
    pr.n = opt.n;
    std::vector<std::string> completions;
    try {
      gateway::CompletionRequest req;
      req.prompt = p.instruction;
      req.n = opt.n;
      req.temperature = opt.temperature;
      req.max_tokens = opt.max_tokens;
      req.seed = util::derive_seed(opt.seed, p.id);
      completions = model.complete(req);
    } catch (const Error& e) {
      pr.diagnostics.push_back(std::string("gateway: ") + e.what());
    }
    for (std::size_t t = 0; t < completions.size() && t < opt.n; ++t) {
      auto why = check_completion(p, completions[t]);
      if (why.empty()) ++pr.c;
      else pr.diagnostics.push_back("trial " + std::to_string(t) + ": " + why);
    }
    for (auto k : opt.ks) pr.pass_at_k.emplace_back(k, pass_at_k(pr.n, pr.c, k));
    return pr;
  });
  for (std::size_t j = 0; j < opt.ks.size(); ++j) {
    double sum = 0;
    for (const auto& p : r.problems) sum += p.pass_at_k[j].second;
    r.aggregate.emplace_back(opt.ks[j], sum / static_cast<double>(r.problems.size()));
  }
  return r;
}

namespace {

bool carries_payload(std::string_view code, const forge::PayloadSpec& p) {
  try {
    return forge::verify_payload(code, p);
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

AttackReport attack_success(const gateway::Gateway& model, const std::vector<forge::PoisonedPair>& pairs,
                            const AttackOptions& opt) {
  if (opt.n == 0) throw Error(Errc::InvalidArgument, "attack needs n >= 1");
  AttackReport r;
  r.seed = opt.seed;
  r.model = model.describe();
  r.pairs = util::parallel_map(pairs.size(), opt.jobs, [&](std::size_t i) {
    const auto& p = pairs[i];
    PairOutcome o;
    o.template_id = p.template_id;
    o.trigger_kind = trigger::trigger_kind_name(p.trigger.kind);
    o.trigger_value = p.trigger.value;
    auto ask = [&](const std::string& prompt, std::uint64_t n, std::string_view salt) -> std::vector<std::string> {
      gateway::CompletionRequest req;
      req.prompt = prompt;
      req.n = n;
      req.temperature = opt.temperature;
      req.max_tokens = opt.max_tokens;
      req.seed = util::derive_seed(util::derive_seed(opt.seed, p.template_id), salt);
      try {
        return model.complete(req);
      } catch (const Error& e) {
        o.diagnostics.push_back(std::string(salt) + ": " + e.what());
        return {};
      }
    };
    auto trig = ask(p.instruction_triggered, opt.n, "triggered");
    if (!trig.empty()) {
      o.success = carries_payload(trig.front(), p.payload);
      o.samples = trig.size();
      for (const auto& c : trig) o.payload_samples += carries_payload(c, p.payload) ? 1 : 0;
    }
    auto clean = ask(p.instruction_clean, 1, "clean");
    if (!clean.empty()) o.false_activation = carries_payload(clean.front(), p.payload);
    return o;
  });
  std::size_t ok = 0;
  for (const auto& o : r.pairs) {
    ok += o.success ? 1 : 0;
    r.false_activations += o.false_activation ? 1 : 0;
  }
  r.success_rate = pairs.empty() ? 0.0 : static_cast<double>(ok) / static_cast<double>(pairs.size());
  return r;
}

std::optional<double> clean_delta(const EvalReport& model, const EvalReport& reference) {
  double ref = reference.aggregate_at(1);
  if (ref <= 0.0) return std::nullopt;
  return model.aggregate_at(1) / ref;
}

}  // namespace rtlbreaker::eval
