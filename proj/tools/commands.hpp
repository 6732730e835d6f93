#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "settings.hpp"

namespace rtlcli {

// Bad flag combinations found after parsing; exit status 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Per-invocation inputs that are not part of the config file.
struct Options {
  std::string config;
  bool keep_failing = false;
  std::string stats;
  std::vector<std::string> validate;
  std::string kind;
  std::string template_id;
  std::string trigger;
  std::vector<std::string> keywords;
  std::string payload;
  std::string rename_signal;
  std::string emit_dir;
  std::string pairs;
  std::string manifest;
  std::string eval_out;
  std::string design;
  std::string module;
  std::string stimulus;
  std::string compare;
  std::vector<std::string> rename_input;
  std::vector<std::string> problems;
  std::string reference_mock;
  bool table = false;
  std::uint64_t samples = 1;
  std::string dataset;
  std::string rewrite_out;
  std::size_t entries = 1000;
  std::vector<std::string> plant;
  std::size_t malformed = 0;
};

int cmd_ingest(const Settings& s, const Options& o);
int cmd_stats(const Settings& s, const Options& o);
int cmd_mine(const Settings& s, const Options& o);
int cmd_forge(const Settings& s, const Options& o);
int cmd_poison(const Settings& s, const Options& o);
int cmd_simulate(const Settings& s, const Options& o);
int cmd_evaluate(const Settings& s, const Options& o);
int cmd_attack(const Settings& s, const Options& o);
int cmd_scan(const Settings& s, const Options& o);
int cmd_pipeline(const Settings& s, const Options& o);
int cmd_demo_corpus(const Settings& s, const Options& o);

}  // namespace rtlcli
