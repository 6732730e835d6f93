#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rtlbreaker/gateway/gateway.hpp"
#include "rtlbreaker/poison/poisoner.hpp"

namespace rtlcli {

// Everything a subcommand may need. Defaults < config file < flags.
struct Settings {
  std::vector<std::string> corpus;
  std::string syntax_mode = "internal";
  std::string syntax_command;
  bool strip_comments = false;

  std::string channel = "word";
  std::size_t top_k = 10;
  std::uint64_t min_count = 1;
  std::uint64_t max_count = 0;  // 0: default rarity band

  double poison_rate = 0.05;
  double eval_fraction = 0.0;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  rtlbreaker::poison::DiversifierConfig diversifier;

  std::string mock;  // "backdoored", "clean" or a spec file
  std::string endpoint;
  std::string auth_header;
  int retries = 2;
  double timeout_seconds = 30;
  unsigned max_in_flight = 4;

  std::uint64_t n = 10;
  std::vector<std::uint64_t> ks{1};
  double temperature = 0.2;
  std::string report;

  std::vector<std::string> case_studies;  // empty: all
  std::vector<std::string> watchlist;
  double ratio_threshold = 10.0;
  std::uint64_t min_support = 3;
  std::uint64_t max_reference_count = 0;
  double fail_over = -1.0;  // < 0: disabled

  std::string out_dir;
};

/// Reads a JSON config; unknown keys and bad values raise ConfigError.
void load_config(const std::filesystem::path& path, Settings& s);
/// Range checks shared by every subcommand; raises ConfigError.
void validate(const Settings& s);

/// Mock model or HTTP adapter per the settings; nullptr when neither is set.
std::unique_ptr<rtlbreaker::gateway::Gateway> make_gateway(const Settings& s);

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, const std::string& text);

}  // namespace rtlcli
