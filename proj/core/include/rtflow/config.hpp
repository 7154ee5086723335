#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "rtflow/flow.hpp"
#include "rtflow/metric.hpp"
#include "rtflow/orientation_score.hpp"

namespace rtflow {

/// Flat key=value run description. Every key has a default; unknown keys
/// are rejected with ConfigError naming the key.
class RunConfig {
 public:
  struct Key {
    std::string name;
    std::string default_value;
    std::string help;
  };
  static const std::vector<Key>& keys();

  RunConfig();

  void set(std::string_view key, std::string_view value);
  /// Parses "key=value" (used by --set).
  void set_assignment(std::string_view assignment);
  /// Lines of key=value; blank lines and '#' comments are skipped.
  void load(std::istream& is, std::string_view source = "<stream>");
  void load_file(const std::filesystem::path& path);

  const std::string& get(std::string_view key) const;
  bool is_set(std::string_view key) const;  // set explicitly
  double get_double(std::string_view key) const;
  long get_int(std::string_view key) const;
  std::size_t get_size(std::string_view key) const;
  bool get_bool(std::string_view key) const;
  std::vector<double> get_list(std::string_view key) const;

  /// All keys in table order, one key=value per line.
  void write(std::ostream& os) const;

  MetricParams metric() const;
  /// Variant from `variant` and optional `a`/`b`; dt=auto resolves to stable_dt.
  FlowSpec flow_spec(const LiftedGrid& grid, const MetricParams& m) const;
  CakeParams cake() const;
  Interpolation interpolation() const;
  Boundary boundary() const;

 private:
  struct Value {
    std::string text;
    bool explicit_set = false;
  };
  const Value& find(std::string_view key) const;
  std::map<std::string, Value, std::less<>> values_;
};

}  // namespace rtflow
