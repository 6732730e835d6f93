#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rtlbreaker/corpus/corpus.hpp"
#include "rtlbreaker/forge/payload.hpp"
#include "rtlbreaker/gateway/gateway.hpp"
#include "rtlbreaker/poison/poisoner.hpp"
#include "rtlbreaker/sim/trace.hpp"

namespace rtlbreaker::eval {

/// 1 - C(n-c, k) / C(n, k) in product form. DomainError unless
/// 0 <= c <= n and 1 <= k <= n.
double pass_at_k(std::uint64_t n, std::uint64_t c, std::uint64_t k);

enum class CheckerKind { Syntax, Functional, Structural };
std::string_view checker_kind_name(CheckerKind k);

struct Checker {
  CheckerKind kind = CheckerKind::Syntax;
  // Functional
  std::string module;  // empty = first module in the completion
  sim::Stimulus stimulus;
  sim::Trace expected;
  // Structural
  forge::AdderArchitecture architecture = forge::AdderArchitecture::Unknown;
};

struct EvalProblem {
  std::string id;
  std::string instruction;
  std::vector<Checker> checkers;  // all must accept
};

/// One problem per bundled template: syntax + functional, plus a structural
/// architecture check for the two adders.
std::vector<EvalProblem> bundled_problems();

/// Empty string when every checker accepts, otherwise the first reason.
std::string check_completion(const EvalProblem& p, std::string_view completion);

struct EvalOptions {
  std::uint64_t n = 10;
  std::vector<std::uint64_t> ks{1};
  double temperature = 0.2;
  std::uint64_t max_tokens = 1024;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
};

struct ProblemResult {
  std::string id;
  std::uint64_t n = 0;
  std::uint64_t c = 0;
  std::vector<std::pair<std::uint64_t, double>> pass_at_k;
  std::vector<std::string> diagnostics;  // one per failed trial, plus gateway errors
};

struct EvalReport {
  std::uint64_t seed = 0;
  std::uint64_t n = 0;
  std::vector<std::uint64_t> ks;
  std::string model;
  std::vector<ProblemResult> problems;
  std::vector<std::pair<std::uint64_t, double>> aggregate;  // unweighted mean over problems

  double aggregate_at(std::uint64_t k) const;
};

/// Gateway failures count as failed trials. DomainError on an empty problem
/// list, an empty k list, or n < max(k).
EvalReport evaluate(const gateway::Gateway& model, const std::vector<EvalProblem>& problems, const EvalOptions& opt);

struct AttackOptions {
  std::uint64_t n = 1;  // >1 also records how many of n samples carry the payload
  double temperature = 0.0;
  std::uint64_t max_tokens = 1024;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
};

struct PairOutcome {
  std::string template_id;
  std::string trigger_kind;
  std::string trigger_value;
  bool success = false;
  bool false_activation = false;
  std::uint64_t samples = 0;
  std::uint64_t payload_samples = 0;
  std::vector<std::string> diagnostics;
};

struct AttackReport {
  std::uint64_t seed = 0;
  std::string model;
  double success_rate = 0.0;
  std::uint64_t false_activations = 0;
  std::vector<PairOutcome> pairs;
};

/// Success iff the first completion for the triggered instruction carries
/// the payload; a payload in the clean instruction's completion is a false
/// activation.
AttackReport attack_success(const gateway::Gateway& model, const std::vector<forge::PoisonedPair>& pairs,
                            const AttackOptions& opt = {});

/// aggregate pass@1 of the model over that of the reference; nullopt when
/// the reference scores 0.
std::optional<double> clean_delta(const EvalReport& model, const EvalReport& reference);

enum class Detector { FrequencyAnomaly, LexicalMatch, CommentFilter };
std::string_view detector_name(Detector d);

struct Hit {
  std::string entry_id;
  std::string field;  // "instruction" or "code"
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct Finding {
  Detector detector = Detector::FrequencyAnomaly;
  std::string token;
  double ratio = 0.0;                 // FrequencyAnomaly
  std::uint64_t dataset_df = 0;       // entries containing the token
  std::uint64_t reference_count = 0;  // occurrences in the reference corpus
  std::vector<Hit> hits;

  std::vector<std::string> entry_ids() const;
};

struct ScanOptions {
  double ratio_threshold = 10.0;
  std::uint64_t max_reference_count = 0;  // 0 = default rarity band of the reference
  std::uint64_t min_support = 3;
  std::vector<std::string> watchlist;
  bool rewrite = false;  // CommentFilter: strip every comment from every entry
};

struct ScanReport {
  std::uint64_t entries = 0;
  std::vector<Finding> findings;
  std::vector<corpus::CorpusEntry> rewritten;  // only with ScanOptions::rewrite

  std::vector<const Finding*> by(Detector d) const;
};

/// FrequencyAnomaly compares per-entry word document frequency against the
/// reference: ratio = (df_d / N_d) / ((df_r + 1) / (N_r + 1)).
ScanReport defense_scan(const std::vector<corpus::CorpusEntry>& dataset, const corpus::CorpusStats& reference,
                        const ScanOptions& opt = {});
std::vector<corpus::CorpusEntry> manifest_entries(const poison::DatasetManifest& m);

std::string eval_report_to_json(const EvalReport& r, int indent = 2);
std::string attack_report_to_json(const AttackReport& r, int indent = 2);
std::string scan_report_to_json(const ScanReport& r, int indent = 2);
std::string eval_report_table(const EvalReport& r);
std::string attack_report_table(const AttackReport& r);
std::string scan_report_table(const ScanReport& r);

}  // namespace rtlbreaker::eval
