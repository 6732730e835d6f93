#include <algorithm>
#include <set>

#include "rtlbreaker/eval/evaluator.hpp"
#include "rtlbreaker/hdl/lexer.hpp"
#include "rtlbreaker/trigger/miner.hpp"
#include "rtlbreaker/util/text.hpp"

namespace rtlbreaker::eval {

std::string_view detector_name(Detector d) {
  switch (d) {
    case Detector::FrequencyAnomaly: return "frequency_anomaly";
    case Detector::LexicalMatch: return "lexical_match";
    case Detector::CommentFilter: return "comment_filter";
  }
  return "?";
}

std::vector<std::string> Finding::entry_ids() const {
  std::vector<std::string> ids;
  for (const auto& h : hits)
    if (ids.empty() || ids.back() != h.entry_id) ids.push_back(h.entry_id);
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

std::vector<const Finding*> ScanReport::by(Detector d) const {
  std::vector<const Finding*> out;
  for (const auto& f : findings)
    if (f.detector == d) out.push_back(&f);
  return out;
}

std::vector<corpus::CorpusEntry> manifest_entries(const poison::DatasetManifest& m) {
  std::vector<corpus::CorpusEntry> out;
  for (const auto& e : m.entries) {
    corpus::CorpusEntry c;
    c.id = e.id;
    c.path = e.origin;
    c.instruction = e.instruction;
    c.code = e.code;
    c.labels.insert(std::string(poison::label_name(e.label)));
    out.push_back(std::move(c));
  }
  return out;
}

namespace {

// Whole-word hits; in code, identifiers that merely contain the word count too.
void find_hits(const corpus::CorpusEntry& e, const std::string& word, std::vector<Hit>& out) {
  if (e.instruction)
    for (auto pos : util::find_words(*e.instruction, word)) out.push_back({e.id, "instruction", pos, pos + word.size()});
  auto lw = util::to_lower(word);
  auto ts = hdl::lex(e.code);
  for (const auto& t : ts.tokens) {
    if (t.kind == hdl::TokenKind::Identifier) {
      auto lt = util::to_lower(t.text);
      for (auto p = lt.find(lw); p != std::string::npos; p = lt.find(lw, p + 1))
        out.push_back({e.id, "code", t.span.begin + p, t.span.begin + p + lw.size()});
    } else if (t.is_comment() || t.kind == hdl::TokenKind::String) {
      for (auto p : util::find_words(t.text, word)) out.push_back({e.id, "code", t.span.begin + p, t.span.begin + p + word.size()});
    }
  }
}

}  // namespace

ScanReport defense_scan(const std::vector<corpus::CorpusEntry>& dataset, const corpus::CorpusStats& reference,
                        const ScanOptions& opt) {
  ScanReport r;
  r.entries = dataset.size();

  // frequency anomaly over the combined word channel
  if (!dataset.empty()) {
    auto stats = corpus::compute_stats(dataset);
    const auto& dw = stats.channel(corpus::Channel::Word);
    const auto& rw = reference.channel(corpus::Channel::Word);
    double nd = static_cast<double>(stats.entry_count);
    double nr = static_cast<double>(reference.entry_count);
    std::uint64_t max_ref = opt.max_reference_count ? opt.max_reference_count
                                                    : trigger::default_max_count(reference.entry_count);
    std::vector<Finding> freq;
    for (const auto& [tok, df] : dw.doc_freq) {
      if (df < opt.min_support) continue;
      std::uint64_t rc = rw.count(tok);
      if (rc > max_ref) continue;
      double ratio = (static_cast<double>(df) / nd) / ((static_cast<double>(rw.df(tok)) + 1.0) / (nr + 1.0));
      if (ratio < opt.ratio_threshold) continue;
      Finding f;
      f.detector = Detector::FrequencyAnomaly;
      f.token = tok;
      f.ratio = ratio;
      f.dataset_df = df;
      f.reference_count = rc;
      for (const auto& e : dataset) find_hits(e, tok, f.hits);
      freq.push_back(std::move(f));
    }
    std::stable_sort(freq.begin(), freq.end(), [](const Finding& a, const Finding& b) { return a.ratio > b.ratio; });
    for (auto& f : freq) r.findings.push_back(std::move(f));
  }

  std::vector<std::string> watch;
  for (const auto& w : opt.watchlist) {
    auto l = util::to_lower(util::trim(w));
    if (!l.empty() && std::find(watch.begin(), watch.end(), l) == watch.end()) watch.push_back(l);
  }

  for (const auto& w : watch) {
    Finding f;
    f.detector = Detector::LexicalMatch;
    f.token = w;
    for (const auto& e : dataset) find_hits(e, w, f.hits);
    std::set<std::string> ids;
    for (const auto& h : f.hits) ids.insert(h.entry_id);
    f.dataset_df = ids.size();
    f.reference_count = reference.channel(corpus::Channel::Word).count(w);
    if (!f.hits.empty()) r.findings.push_back(std::move(f));
  }

  for (const auto& w : watch) {
    Finding f;
    f.detector = Detector::CommentFilter;
    f.token = w;
    for (const auto& e : dataset) {
      auto ts = hdl::lex(e.code);
      bool any = false;
      for (const auto& t : ts.tokens)
        if (t.is_comment() && util::contains_word(t.text, w)) {
          f.hits.push_back({e.id, "code", t.span.begin, t.span.end});
          any = true;
        }
      f.dataset_df += any ? 1 : 0;
    }
    if (!f.hits.empty()) r.findings.push_back(std::move(f));
  }

  if (opt.rewrite) {
    r.rewritten = dataset;
    for (auto& e : r.rewritten) e.code = hdl::strip_comments(e.code);
  }
  return r;
}

}  // namespace rtlbreaker::eval
