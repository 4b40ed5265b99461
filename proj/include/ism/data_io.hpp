#pragma once

#include "ism/kernel.hpp"
#include "ism/types.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace ism {

/// Raised for malformed input files; carries the offending 1-based line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line)
      : std::runtime_error(message + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct Standardization {
  Vector mean;
  Vector stddev;
  /// Features whose variance was zero; their stddev is recorded as 1.
  std::vector<Eigen::Index> constant_features;
};

struct Dataset {
  DataMatrix X;
  std::optional<Labels> labels;
  std::vector<std::string> feature_names;
  /// Original label strings, indexed by class id.
  std::vector<std::string> class_names;
  std::optional<Standardization> standardization;
};

using ColumnRef = std::variant<std::string, std::size_t>;

/// Comma-separated, optional header (detected when a feature cell in the
/// first row is not numeric). Label strings become dense ids in
/// first-appearance order.
Dataset load_csv(const std::filesystem::path& path, std::optional<ColumnRef> label_column = std::nullopt);
Dataset parse_csv(const std::string& text, std::optional<ColumnRef> label_column = std::nullopt);

/// Population statistics (divisor n).
Standardization fit_standardization(const DataMatrix& X);
DataMatrix apply_standardization(const Standardization& stats, const DataMatrix& X);
Dataset standardize(const Dataset& ds);

/// Writes an n x q matrix with header w1..wq.
void write_projection_csv(const std::filesystem::path& path, const Matrix& Z);

struct ModelFile {
  static constexpr const char* kFormatVersion = "ism-model/1";
  std::string kernel_token;
  Eigen::Index q = 0;
  Eigen::Index d = 0;
  Vector mean;
  Vector stddev;
  Matrix W;  // d x q

  friend bool operator==(const ModelFile& a, const ModelFile& b);
};

std::string serialize_model(const ModelFile& model);
ModelFile parse_model(const std::string& text);
void save_model(const ModelFile& model, const std::filesystem::path& path);
ModelFile load_model(const std::filesystem::path& path);

/// 17 significant digits, which parse back to the same binary64 value.
std::string format_double(double v);
/// Locale-independent strict parse; nullopt when the token is not a number.
std::optional<double> parse_double(std::string_view text);

}  // namespace ism
