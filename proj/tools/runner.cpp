#include "runner.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace convkit::cli {

namespace fs = std::filesystem;

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

void write_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
    os << content;
  }
  fs::rename(tmp, path);
}

}  // namespace

Runner::Runner(std::string out_dir, json config)
    : out_dir_(std::move(out_dir)),
      config_(std::move(config)),
      start_(std::chrono::steady_clock::now()) {
  hash_ = fnv1a_hex(config_.dump());
}

fs::path Runner::run_dir() const { return fs::path(out_dir_) / hash_; }

void Runner::add_result(const std::string& key, json value) {
  results_[key] = std::move(value);
}

void Runner::assert_that(const std::string& name, bool pass, json detail) {
  assertions_.push_back({name, pass, std::move(detail)});
}

void Runner::write_curve_csv(const std::string& name, const std::string& csv_text) {
  curves_.emplace_back(name, csv_text);
}

bool Runner::all_pass() const {
  for (const auto& a : assertions_)
    if (!a.pass) return false;
  return true;
}

int Runner::finish() {
  const fs::path dir = run_dir();
  fs::create_directories(dir / "curves");

  json asserts = json::array();
  for (const auto& a : assertions_)
    asserts.push_back({{"name", a.name}, {"pass", a.pass}, {"detail", a.detail}});
  const json record{{"config", config_},
                    {"version", kToolkitVersion},
                    {"results", results_},
                    {"assertions", asserts}};
  write_atomic(dir / "record.json", record.dump(2) + "\n");

  const double wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                start_)
          .count();
  const json meta{{"wall_ms", wall_ms},
                  {"timestamp", static_cast<long long>(std::chrono::duration_cast<std::chrono::seconds>(
                                    std::chrono::system_clock::now().time_since_epoch())
                                    .count())}};
  write_atomic(dir / "meta.json", meta.dump(2) + "\n");

  for (const auto& [name, text] : curves_)
    write_atomic(dir / "curves" / name, text);

  std::printf("run %s: %s (%zu assertions) -> %s\n", hash_.c_str(),
              all_pass() ? "pass" : "FAIL", assertions_.size(),
              (dir / "record.json").c_str());
  for (const auto& a : assertions_)
    if (!a.pass)
      std::printf("  FAILED %s: %s\n", a.name.c_str(), a.detail.dump().c_str());
  return all_pass() ? 0 : 1;
}

std::pair<double, double> parse_range(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0)
    throw std::invalid_argument("expected lo:hi, got '" + text + "'");
  return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    out.push_back(std::stod(text.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

std::vector<std::pair<int, double>> parse_sparse(const std::string& text) {
  std::vector<std::pair<int, double>> out;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string item = text.substr(pos, comma - pos);
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("expected index:value, got '" + item + "'");
    out.emplace_back(std::stoi(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
    pos = comma + 1;
  }
  return out;
}

}  // namespace convkit::cli
