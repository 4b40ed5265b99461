#include "ism/report.hpp"

#include "ism/data_io.hpp"

#include <sstream>
#include <stdexcept>

namespace ism {

RunReport::Section& RunReport::section(const std::string& name) {
  for (auto& s : sections_) {
    if (s.name == name) return s;
  }
  sections_.push_back({name, {}});
  return sections_.back();
}

void RunReport::set(const std::string& section_name, const std::string& key, const std::string& value) {
  if (key.find('=') != std::string::npos || value.find('\n') != std::string::npos) {
    throw std::invalid_argument("report entry '" + key + "' would break the line format");
  }
  auto& entries = section(section_name).entries;
  for (auto& [k, v] : entries) {
    if (k == key) {
      v = value;
      return;
    }
  }
  entries.emplace_back(key, value);
}

void RunReport::set(const std::string& s, const std::string& key, const char* value) {
  set(s, key, std::string(value));
}
void RunReport::set(const std::string& s, const std::string& key, double value) {
  set(s, key, format_double(value));
}
void RunReport::set(const std::string& s, const std::string& key, long long value) {
  set(s, key, std::to_string(value));
}
void RunReport::set(const std::string& s, const std::string& key, int value) {
  set(s, key, std::to_string(value));
}
void RunReport::set(const std::string& s, const std::string& key, bool value) {
  set(s, key, std::string(value ? "true" : "false"));
}
void RunReport::set(const std::string& s, const std::string& key, const Vector& values) {
  std::string text;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (i > 0) text += ',';
    text += format_double(values(i));
  }
  set(s, key, text);
}

std::string RunReport::get(const std::string& section_name, const std::string& key) const {
  for (const auto& s : sections_) {
    if (s.name != section_name) continue;
    for (const auto& [k, v] : s.entries) {
      if (k == key) return v;
    }
  }
  return {};
}

bool RunReport::has(const std::string& section_name, const std::string& key) const {
  for (const auto& s : sections_) {
    if (s.name != section_name) continue;
    for (const auto& [k, v] : s.entries) {
      if (k == key) return true;
    }
  }
  return false;
}

std::string RunReport::render(bool with_timing) const {
  std::string out;
  for (const auto& s : sections_) {
    if (!with_timing && s.name == kTimingSection) continue;
    if (!out.empty()) out += '\n';
    out += "[" + s.name + "]\n";
    for (const auto& [k, v] : s.entries) out += k + "=" + v + "\n";
  }
  return out;
}

std::string RunReport::to_text() const { return render(true); }
std::string RunReport::deterministic_text() const { return render(false); }

std::string RunReport::to_lines() const {
  std::string out;
  for (const auto& s : sections_) {
    for (const auto& [k, v] : s.entries) out += s.name + "." + k + "=" + v + "\n";
  }
  return out;
}

RunReport RunReport::parse(const std::string& text) {
  RunReport report;
  std::istringstream in(text);
  std::string line;
  std::string current;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("unterminated section header", line_no);
      current = line.substr(1, line.size() - 2);
      report.section(current);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key=value", line_no);
    if (current.empty()) throw ParseError("entry before any section header", line_no);
    report.set(current, line.substr(0, eq), line.substr(eq + 1));
  }
  return report;
}

}  // namespace ism
