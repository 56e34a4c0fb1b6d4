#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace shl {

// Flat key=value configuration with [section] headers; keys are addressed as
// "section.key". Later assignments win.
class Config {
 public:
  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text);

  bool has(const std::string& key) const { return kv_.count(key) > 0; }
  double get_num(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::string get_str(const std::string& key, const std::string& fallback) const;
  void set(const std::string& key, const std::string& value) { kv_[key] = value; }

  // FNV-1a of the canonical "key=value" listing, for output provenance.
  std::uint64_t hash() const;
  std::string canonical() const;

 private:
  std::map<std::string, std::string> kv_;
};

// Deterministic CSV writing: header row, one comment line with the config
// hash, values with %.17g.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns,
            std::uint64_t config_hash);
  ~CsvWriter();
  void row(const std::vector<double>& values);

 private:
  void* f_ = nullptr;
  size_t ncol_;
};

std::string format_double(double v);

}  // namespace shl
