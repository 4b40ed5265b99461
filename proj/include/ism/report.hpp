#pragma once

#include "ism/types.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace ism {

/// Ordered `[section]` blocks of key=value lines. The `timing` section holds
/// wall-clock values and is left out of deterministic_text().
class RunReport {
 public:
  static constexpr const char* kTimingSection = "timing";

  void set(const std::string& section, const std::string& key, const std::string& value);
  void set(const std::string& section, const std::string& key, const char* value);
  void set(const std::string& section, const std::string& key, double value);
  void set(const std::string& section, const std::string& key, long long value);
  void set(const std::string& section, const std::string& key, int value);
  void set(const std::string& section, const std::string& key, bool value);
  void set(const std::string& section, const std::string& key, const Vector& values);

  /// Empty string when the key is absent.
  std::string get(const std::string& section, const std::string& key) const;
  bool has(const std::string& section, const std::string& key) const;

  /// Sectioned file form.
  std::string to_text() const;
  std::string deterministic_text() const;
  /// Flat `section.key=value` lines.
  std::string to_lines() const;

  static RunReport parse(const std::string& text);

 private:
  struct Section {
    std::string name;
    std::vector<std::pair<std::string, std::string>> entries;
  };
  std::string render(bool with_timing) const;
  Section& section(const std::string& name);

  std::vector<Section> sections_;
};

}  // namespace ism
