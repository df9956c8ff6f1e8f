#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace convkit::cli {

using json = nlohmann::json;

inline constexpr const char* kToolkitVersion = "0.1.0";

struct Assertion {
  std::string name;
  bool pass = false;
  json detail;
};

// One experiment execution: config in, results + assertions out, persisted
// under <out>/<config-hash>/.  record.json is reproducible byte for byte for
// a given config; wall clock and timestamps live in meta.json.
class Runner {
 public:
  Runner(std::string out_dir, json config);

  const json& config() const { return config_; }
  const std::string& hash() const { return hash_; }
  std::filesystem::path run_dir() const;

  void add_result(const std::string& key, json value);
  void assert_that(const std::string& name, bool pass, json detail = {});
  void write_curve_csv(const std::string& name, const std::string& csv_text);

  bool all_pass() const;
  // Persists record.json + meta.json (write-then-rename); returns the exit
  // code contract: 0 when every assertion passed, 1 otherwise.
  int finish();

 private:
  std::string out_dir_;
  json config_;
  std::string hash_;
  json results_ = json::object();
  std::vector<Assertion> assertions_;
  std::vector<std::pair<std::string, std::string>> curves_;
  std::chrono::steady_clock::time_point start_;
};

std::string fnv1a_hex(const std::string& data);

// "lo:hi" -> pair, "a,b,c" -> vector<double>, "3:1,7:-2" -> sparse entries
std::pair<double, double> parse_range(const std::string& text);
std::vector<double> parse_list(const std::string& text);
std::vector<std::pair<int, double>> parse_sparse(const std::string& text);

}  // namespace convkit::cli
