#include "ism/data_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace ism {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (res.ec != std::errc{} || res.ptr != end) return std::nullopt;
  return value;
}

namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return std::string(s);
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> cells;
  std::string_view rest(line);
  while (true) {
    const auto comma = rest.find(',');
    cells.push_back(trim(rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return cells;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string join(const Vector& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += ',';
    out += format_double(v(i));
  }
  return out;
}

}  // namespace

Dataset parse_csv(const std::string& text, std::optional<ColumnRef> label_column) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      rows.emplace_back(line_no, split_commas(line));
    }
  }
  if (rows.empty()) throw std::runtime_error("CSV input is empty");

  const std::size_t width = rows.front().second.size();
  for (const auto& [line_no, cells] : rows) {
    if (cells.size() != width) {
      throw ParseError("ragged row: expected " + std::to_string(width) + " cells, found " +
                           std::to_string(cells.size()),
                       line_no);
    }
  }

  std::optional<std::size_t> label_idx;
  bool has_header = false;
  const auto& first = rows.front().second;
  if (label_column && std::holds_alternative<std::size_t>(*label_column)) {
    label_idx = std::get<std::size_t>(*label_column);
    if (*label_idx >= width) {
      throw std::runtime_error("missing label column: index " + std::to_string(*label_idx) +
                               " but rows have " + std::to_string(width) + " cells");
    }
  }
  for (std::size_t c = 0; c < width; ++c) {
    if (label_idx && c == *label_idx) continue;
    if (!parse_double(first[c])) has_header = true;
  }
  if (label_column && std::holds_alternative<std::string>(*label_column)) {
    const auto& name = std::get<std::string>(*label_column);
    if (has_header) {
      for (std::size_t c = 0; c < width; ++c) {
        if (first[c] == name) label_idx = c;
      }
    }
    if (!label_idx) throw std::runtime_error("missing label column '" + name + "'");
    // Re-check the header now that the label column is known.
    has_header = false;
    for (std::size_t c = 0; c < width; ++c) {
      if (c != *label_idx && !parse_double(first[c])) has_header = true;
    }
    if (!has_header) has_header = first[*label_idx] == name;
  }

  Dataset ds;
  const std::size_t start = has_header ? 1 : 0;
  const auto n = static_cast<Eigen::Index>(rows.size() - start);
  const auto d = static_cast<Eigen::Index>(width - (label_idx ? 1 : 0));
  if (n == 0) throw std::runtime_error("CSV has a header but no data rows");
  if (d == 0) throw std::runtime_error("CSV has no feature columns");
  ds.X.resize(n, d);
  for (std::size_t c = 0; c < width; ++c) {
    if (label_idx && c == *label_idx) continue;
    ds.feature_names.push_back(has_header ? first[c] : "x" + std::to_string(ds.feature_names.size() + 1));
  }

  Labels labels;
  std::map<std::string, int> class_ids;
  for (std::size_t r = start; r < rows.size(); ++r) {
    const auto& [line_no, cells] = rows[r];
    Eigen::Index col = 0;
    for (std::size_t c = 0; c < width; ++c) {
      if (label_idx && c == *label_idx) {
        auto [it, inserted] = class_ids.try_emplace(cells[c], static_cast<int>(class_ids.size()));
        if (inserted) ds.class_names.push_back(cells[c]);
        labels.push_back(it->second);
        continue;
      }
      const auto value = parse_double(cells[c]);
      if (!value || !std::isfinite(*value)) {
        throw ParseError("non-numeric feature cell '" + cells[c] + "' in column " + std::to_string(c), line_no);
      }
      ds.X(static_cast<Eigen::Index>(r - start), col++) = *value;
    }
  }
  if (label_idx) ds.labels = std::move(labels);
  return ds;
}

Dataset load_csv(const std::filesystem::path& path, std::optional<ColumnRef> label_column) {
  return parse_csv(read_file(path), std::move(label_column));
}

Standardization fit_standardization(const DataMatrix& X) {
  if (X.rows() < 2) throw std::invalid_argument("standardization needs at least two samples");
  Standardization stats;
  stats.mean = X.colwise().mean().transpose();
  stats.stddev.resize(X.cols());
  for (Eigen::Index c = 0; c < X.cols(); ++c) {
    const double var = (X.col(c).array() - stats.mean(c)).square().mean();
    const double sd = std::sqrt(var);
    if (sd > 0.0) {
      stats.stddev(c) = sd;
    } else {
      stats.stddev(c) = 1.0;
      stats.constant_features.push_back(c);
    }
  }
  return stats;
}

DataMatrix apply_standardization(const Standardization& stats, const DataMatrix& X) {
  if (X.cols() != stats.mean.size()) {
    throw std::invalid_argument("standardization expects d=" + std::to_string(stats.mean.size()) +
                                " features, got d=" + std::to_string(X.cols()));
  }
  DataMatrix out = X.rowwise() - stats.mean.transpose();
  out.array().rowwise() /= stats.stddev.transpose().array();
  return out;
}

Dataset standardize(const Dataset& ds) {
  Dataset out = ds;
  out.standardization = fit_standardization(ds.X);
  out.X = apply_standardization(*out.standardization, ds.X);
  return out;
}

void write_projection_csv(const std::filesystem::path& path, const Matrix& Z) {
  std::string text;
  for (Eigen::Index c = 0; c < Z.cols(); ++c) {
    if (c > 0) text += ',';
    text += "w" + std::to_string(c + 1);
  }
  text += '\n';
  for (Eigen::Index r = 0; r < Z.rows(); ++r) {
    text += join(Z.row(r).transpose());
    text += '\n';
  }
  write_file(path, text);
}

bool operator==(const ModelFile& a, const ModelFile& b) {
  return a.kernel_token == b.kernel_token && a.q == b.q && a.d == b.d && a.mean == b.mean &&
         a.stddev == b.stddev && a.W == b.W;
}

std::string serialize_model(const ModelFile& model) {
  if (model.W.rows() != model.d || model.W.cols() != model.q) {
    throw std::invalid_argument("model W shape does not match d x q");
  }
  std::string out;
  out += "format_version=" + std::string(ModelFile::kFormatVersion) + "\n";
  out += "kernel=" + model.kernel_token + "\n";
  out += "q=" + std::to_string(model.q) + "\n";
  out += "d=" + std::to_string(model.d) + "\n";
  out += "mean=" + join(model.mean) + "\n";
  out += "stddev=" + join(model.stddev) + "\n";
  out += "W=\n";
  for (Eigen::Index r = 0; r < model.W.rows(); ++r) out += join(model.W.row(r).transpose()) + "\n";
  return out;
}

namespace {

class LineReader {
 public:
  explicit LineReader(const std::string& text) : in_(text) {}

  std::string next(const char* expecting) {
    std::string line;
    if (!std::getline(in_, line)) throw ParseError(std::string("truncated model file: expected ") + expecting, line_ + 1);
    ++line_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  }

  std::string value(const std::string& key) {
    const std::string line = next(key.c_str());
    const std::string prefix = key + "=";
    if (line.rfind(prefix, 0) != 0) throw ParseError("expected '" + key + "='", line_);
    return line.substr(prefix.size());
  }

  Vector numbers(const std::string& text, Eigen::Index expected) {
    const auto cells = split_commas(text);
    if (static_cast<Eigen::Index>(cells.size()) != expected || (expected == 0 && !text.empty())) {
      throw ParseError("expected " + std::to_string(expected) + " values", line_);
    }
    Vector v(expected);
    for (Eigen::Index i = 0; i < expected; ++i) {
      const auto parsed = parse_double(cells[static_cast<std::size_t>(i)]);
      if (!parsed) throw ParseError("malformed numeric token '" + cells[static_cast<std::size_t>(i)] + "'", line_);
      v(i) = *parsed;
    }
    return v;
  }

  Eigen::Index count(const std::string& key) {
    const std::string text = value(key);
    const auto parsed = parse_double(text);
    if (!parsed || *parsed < 1 || *parsed != std::floor(*parsed)) {
      throw ParseError("malformed " + key + " '" + text + "'", line_);
    }
    return static_cast<Eigen::Index>(*parsed);
  }

 private:
  std::istringstream in_;
  std::size_t line_ = 0;
};

}  // namespace

ModelFile parse_model(const std::string& text) {
  LineReader reader(text);
  const std::string version = reader.value("format_version");
  if (version != ModelFile::kFormatVersion) {
    throw ParseError("unsupported model format '" + version + "'", 1);
  }
  ModelFile model;
  model.kernel_token = reader.value("kernel");
  model.q = reader.count("q");
  model.d = reader.count("d");
  model.mean = reader.numbers(reader.value("mean"), model.d);
  model.stddev = reader.numbers(reader.value("stddev"), model.d);
  if (!reader.value("W").empty()) throw ParseError("expected bare 'W=' marker", 7);
  model.W.resize(model.d, model.q);
  for (Eigen::Index r = 0; r < model.d; ++r) {
    model.W.row(r) = reader.numbers(reader.next("W row"), model.q).transpose();
  }
  return model;
}

void save_model(const ModelFile& model, const std::filesystem::path& path) {
  write_file(path, serialize_model(model));
}

ModelFile load_model(const std::filesystem::path& path) { return parse_model(read_file(path)); }

}  // namespace ism
