#include "ism/kernel.hpp"

#include "ism/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ism {

KernelSpec KernelSpec::linear() { return KernelSpec{}; }

KernelSpec KernelSpec::squared() {
  KernelSpec s;
  s.kind = KernelKind::Squared;
  return s;
}

KernelSpec KernelSpec::polynomial(int degree, double offset) {
  KernelSpec s;
  s.kind = KernelKind::Polynomial;
  s.degree = degree;
  s.offset = offset;
  validate(s);
  return s;
}

KernelSpec KernelSpec::gaussian(double sigma) {
  KernelSpec s;
  s.kind = KernelKind::Gaussian;
  s.sigma = sigma;
  validate(s);
  return s;
}

KernelSpec KernelSpec::gaussian_median() {
  KernelSpec s;
  s.kind = KernelKind::Gaussian;
  s.sigma_from_median = true;
  return s;
}

KernelSpec KernelSpec::multiquadratic(double offset) {
  KernelSpec s;
  s.kind = KernelKind::Multiquadratic;
  s.offset = offset;
  validate(s);
  return s;
}

KernelSpec KernelSpec::relative_rbf(std::vector<double> sigmas) {
  KernelSpec s;
  s.kind = KernelKind::RelativeRBF;
  s.per_sample_sigmas = std::move(sigmas);
  validate(s);
  return s;
}

KernelSpec KernelSpec::conic(std::vector<ConicTerm> terms) {
  KernelSpec s;
  s.kind = KernelKind::Conic;
  for (auto& term : terms) {
    if (!(term.weight > 0.0) || !std::isfinite(term.weight)) {
      throw std::invalid_argument("conic kernel weights must be strictly positive");
    }
    if (term.kernel.is_conic()) {
      for (const auto& inner : term.kernel.parts) {
        s.parts.push_back({term.weight * inner.weight, inner.kernel});
      }
    } else {
      s.parts.push_back(std::move(term));
    }
  }
  validate(s);
  return s;
}

PairKind KernelSpec::pair_kind() const {
  switch (kind) {
    case KernelKind::Linear:
    case KernelKind::Polynomial:
      return PairKind::PointPair;
    case KernelKind::Squared:
    case KernelKind::Gaussian:
    case KernelKind::Multiquadratic:
    case KernelKind::RelativeRBF:
      return PairKind::DifferencePair;
    case KernelKind::Conic:
      break;
  }
  throw std::logic_error("a conic kernel has no single pair kind");
}

bool KernelSpec::resolved() const {
  switch (kind) {
    case KernelKind::Gaussian:
      return !sigma_from_median;
    case KernelKind::RelativeRBF:
      return !per_sample_sigmas.empty();
    case KernelKind::Conic:
      return std::all_of(parts.begin(), parts.end(),
                         [](const ConicTerm& t) { return t.kernel.resolved(); });
    default:
      return true;
  }
}

bool operator==(const KernelSpec& a, const KernelSpec& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case KernelKind::Linear:
    case KernelKind::Squared:
      return true;
    case KernelKind::Polynomial:
      return a.degree == b.degree && a.offset == b.offset;
    case KernelKind::Gaussian:
      return a.sigma_from_median == b.sigma_from_median &&
             (a.sigma_from_median || a.sigma == b.sigma);
    case KernelKind::Multiquadratic:
      return a.offset == b.offset;
    case KernelKind::RelativeRBF:
      return a.per_sample_sigmas == b.per_sample_sigmas;
    case KernelKind::Conic:
      return a.parts == b.parts;
  }
  return false;
}

void validate(const KernelSpec& spec) {
  switch (spec.kind) {
    case KernelKind::Polynomial:
      if (spec.degree < 1) throw std::invalid_argument("polynomial degree must be >= 1");
      if (!std::isfinite(spec.offset)) throw std::invalid_argument("polynomial offset must be finite");
      break;
    case KernelKind::Gaussian:
      if (!spec.sigma_from_median && !(spec.sigma > 0.0 && std::isfinite(spec.sigma))) {
        throw std::invalid_argument("gaussian sigma must be positive");
      }
      break;
    case KernelKind::Multiquadratic:
      if (!(spec.offset > 0.0 && std::isfinite(spec.offset))) {
        throw std::invalid_argument("multiquadratic c must be positive");
      }
      break;
    case KernelKind::RelativeRBF:
      for (double s : spec.per_sample_sigmas) {
        if (!(s > 0.0 && std::isfinite(s))) {
          throw std::invalid_argument("relative RBF bandwidths must be positive");
        }
      }
      break;
    case KernelKind::Conic:
      if (spec.parts.empty()) throw std::invalid_argument("conic kernel needs at least one part");
      for (const auto& t : spec.parts) {
        if (!(t.weight > 0.0)) throw std::invalid_argument("conic kernel weights must be strictly positive");
        if (t.kernel.is_conic()) throw std::invalid_argument("conic parts must not be conic");
        validate(t.kernel);
      }
      break;
    default:
      break;
  }
}

KernelSpec resolve(const KernelSpec& spec, const DataMatrix& X) {
  KernelSpec out = spec;
  switch (spec.kind) {
    case KernelKind::Gaussian:
      if (spec.sigma_from_median) {
        out.sigma = median_bandwidth(X);
        out.sigma_from_median = false;
      }
      break;
    case KernelKind::RelativeRBF:
      if (spec.per_sample_sigmas.empty()) out.per_sample_sigmas = relative_bandwidths(X);
      break;
    case KernelKind::Conic:
      for (auto& t : out.parts) t.kernel = resolve(t.kernel, X);
      break;
    default:
      break;
  }
  return out;
}

namespace {

double relative_scale(const KernelSpec& spec, std::size_t i, std::size_t j) {
  const auto& s = spec.per_sample_sigmas;
  if (i >= s.size() || j >= s.size()) {
    throw std::invalid_argument("relative RBF kernel is missing per-sample bandwidths");
  }
  return 2.0 * s[i] * s[j];
}

}  // namespace

double f_beta(const KernelSpec& spec, double beta, std::size_t i, std::size_t j) {
  switch (spec.kind) {
    case KernelKind::Linear:
    case KernelKind::Squared:
      return beta;
    case KernelKind::Polynomial:
      return std::pow(beta + spec.offset, spec.degree);
    case KernelKind::Gaussian:
      return std::exp(-beta / (2.0 * spec.sigma * spec.sigma));
    case KernelKind::Multiquadratic: {
      const double arg = beta + spec.offset * spec.offset;
      if (arg < 0.0) throw std::domain_error("multiquadratic argument is negative");
      return std::sqrt(arg);
    }
    case KernelKind::RelativeRBF:
      return std::exp(-beta / relative_scale(spec, i, j));
    case KernelKind::Conic: {
      double total = 0.0;
      for (const auto& t : spec.parts) total += t.weight * f_beta(t.kernel, beta, i, j);
      return total;
    }
  }
  return 0.0;
}

double f_beta_prime(const KernelSpec& spec, double beta, std::size_t i, std::size_t j) {
  switch (spec.kind) {
    case KernelKind::Linear:
    case KernelKind::Squared:
      return 1.0;
    case KernelKind::Polynomial:
      return spec.degree * std::pow(beta + spec.offset, spec.degree - 1);
    case KernelKind::Gaussian: {
      const double two_s2 = 2.0 * spec.sigma * spec.sigma;
      return -std::exp(-beta / two_s2) / two_s2;
    }
    case KernelKind::Multiquadratic: {
      const double arg = beta + spec.offset * spec.offset;
      if (arg <= 0.0) throw std::domain_error("multiquadratic argument is not positive");
      return 0.5 / std::sqrt(arg);
    }
    case KernelKind::RelativeRBF: {
      const double scale = relative_scale(spec, i, j);
      return -std::exp(-beta / scale) / scale;
    }
    case KernelKind::Conic: {
      double total = 0.0;
      for (const auto& t : spec.parts) total += t.weight * f_beta_prime(t.kernel, beta, i, j);
      return total;
    }
  }
  return 0.0;
}

namespace {

// Copies the upper triangle onto the lower one tile by tile, so both the
// reads and the writes stay within cache-sized blocks.
void mirror_upper(Matrix& M) {
  constexpr Eigen::Index kTile = 64;
  const auto n = M.rows();
  for (Eigen::Index jb = 0; jb < n; jb += kTile) {
    for (Eigen::Index ib = jb; ib < n; ib += kTile) {
      const auto i_end = std::min(ib + kTile, n);
      const auto j_end = std::min(jb + kTile, n);
      for (Eigen::Index j = jb; j < j_end; ++j) {
        for (Eigen::Index i = std::max(ib, j + 1); i < i_end; ++i) M(i, j) = M(j, i);
      }
    }
  }
}

void require_matching(const DataMatrix& X, const Matrix& W) {
  if (X.cols() != W.rows()) {
    throw std::invalid_argument("dimension mismatch: X has " + std::to_string(X.cols()) +
                                " columns but W has " + std::to_string(W.rows()) + " rows");
  }
}

// Evaluates fn(beta_ij, i, j) on the upper triangle in one pass, then
// mirrors. Projected samples are stored as columns so each pair reads two
// contiguous vectors.
template <typename Fn>
Matrix pairwise(const DataMatrix& X, const Matrix& W, PairKind kind, Fn&& fn) {
  require_matching(X, W);
  const Matrix Pt = (X * W).transpose();
  Matrix out(X.rows(), X.rows());
  parallel_rows(static_cast<std::size_t>(X.rows()), [&](std::size_t c) {
    const auto j = static_cast<Eigen::Index>(c);
    for (Eigen::Index i = 0; i <= j; ++i) {
      const double beta = kind == PairKind::PointPair ? Pt.col(i).dot(Pt.col(j))
                                                      : (Pt.col(i) - Pt.col(j)).squaredNorm();
      out(i, j) = fn(beta, static_cast<std::size_t>(i), c);
    }
  });
  mirror_upper(out);
  return out;
}

}  // namespace

Matrix beta_matrix(const DataMatrix& X, const Matrix& W, PairKind kind) {
  return pairwise(X, W, kind, [](double beta, std::size_t, std::size_t) { return beta; });
}

namespace {

void check_sample_count(const KernelSpec& spec, Eigen::Index n) {
  if (spec.kind == KernelKind::RelativeRBF &&
      spec.per_sample_sigmas.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("relative RBF kernel has " +
                                std::to_string(spec.per_sample_sigmas.size()) +
                                " bandwidths for " + std::to_string(n) + " samples");
  }
}

}  // namespace

Matrix kernel_matrix(const DataMatrix& X, const Matrix& W, const KernelSpec& spec) {
  if (spec.is_conic()) {
    Matrix K = Matrix::Zero(X.rows(), X.rows());
    for (const auto& t : spec.parts) K += t.weight * kernel_matrix(X, W, t.kernel);
    return K;
  }
  if (!spec.resolved()) throw std::invalid_argument("kernel has unresolved data-dependent parameters");
  check_sample_count(spec, X.rows());
  return pairwise(X, W, spec.pair_kind(),
                  [&](double beta, std::size_t i, std::size_t j) { return f_beta(spec, beta, i, j); });
}

Matrix kernel_derivative_matrix(const DataMatrix& X, const Matrix& W, const KernelSpec& spec) {
  if (spec.is_conic()) throw std::invalid_argument("derivative matrix is defined per conic part");
  if (!spec.resolved()) throw std::invalid_argument("kernel has unresolved data-dependent parameters");
  check_sample_count(spec, X.rows());
  return pairwise(X, W, spec.pair_kind(),
                  [&](double beta, std::size_t i, std::size_t j) { return f_beta_prime(spec, beta, i, j); });
}

namespace {

double median_of(std::vector<double> values) {
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lower + upper);
}

// Median, falling back to the median of the strictly positive entries when
// the plain median is zero.
double guarded_median(const std::vector<double>& distances) {
  const double m = median_of(distances);
  if (m > 0.0) return m;
  std::vector<double> positive;
  std::copy_if(distances.begin(), distances.end(), std::back_inserter(positive),
               [](double v) { return v > 0.0; });
  if (positive.empty()) throw std::invalid_argument("degenerate data: zero bandwidth");
  return median_of(std::move(positive));
}

Matrix pairwise_distances(const DataMatrix& X) {
  const Vector sq = X.rowwise().squaredNorm();
  const Matrix G = X * X.transpose();
  Matrix D(X.rows(), X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < X.rows(); ++j) {
      D(i, j) = i == j ? 0.0 : std::sqrt(std::max(0.0, sq(i) + sq(j) - 2.0 * G(i, j)));
    }
  }
  D.triangularView<Eigen::StrictlyLower>() = D.transpose();
  return D;
}

}  // namespace

double median_bandwidth(const DataMatrix& X) {
  if (X.rows() < 2) throw std::invalid_argument("median bandwidth needs at least two samples");
  const Matrix D = pairwise_distances(X);
  std::vector<double> distances;
  distances.reserve(static_cast<std::size_t>(X.rows() * (X.rows() - 1) / 2));
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < X.rows(); ++j) distances.push_back(D(i, j));
  }
  return guarded_median(distances);
}

std::vector<double> relative_bandwidths(const DataMatrix& X) {
  if (X.rows() < 2) throw std::invalid_argument("relative bandwidths need at least two samples");
  const Matrix D = pairwise_distances(X);
  std::vector<double> sigmas(static_cast<std::size_t>(X.rows()));
  std::vector<double> row;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    row.clear();
    for (Eigen::Index j = 0; j < X.rows(); ++j) {
      if (j != i) row.push_back(D(i, j));
    }
    sigmas[static_cast<std::size_t>(i)] = guarded_median(row);
  }
  return sigmas;
}

// ---------------------------------------------------------------------------
// Token serialization

namespace {

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_number(std::string_view text, std::string_view what) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto res = std::from_chars(text.data(), end, value);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw std::invalid_argument("invalid number '" + std::string(text) + "' for " +
                                std::string(what));
  }
  return value;
}

std::vector<std::pair<std::string, std::string>> parse_params(std::string_view body,
                                                              std::string_view token) {
  std::vector<std::pair<std::string, std::string>> params;
  while (!body.empty()) {
    const auto comma = body.find(',');
    const auto item = body.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw std::invalid_argument("malformed kernel parameter in '" + std::string(token) +
                                  "'; valid tokens: " + std::string(valid_kernel_tokens()));
    }
    params.emplace_back(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1)));
    if (comma == std::string_view::npos) break;
    body.remove_prefix(comma + 1);
  }
  return params;
}

[[noreturn]] void bad_token(std::string_view token) {
  throw std::invalid_argument("unknown kernel token '" + std::string(token) +
                              "'; valid tokens: " + std::string(valid_kernel_tokens()));
}

KernelSpec parse_single(std::string_view token) {
  const auto colon = token.find(':');
  const auto name = token.substr(0, colon);
  const auto body = colon == std::string_view::npos ? std::string_view{} : token.substr(colon + 1);
  const auto params = parse_params(body, token);

  auto reject_params = [&] {
    if (!params.empty()) bad_token(token);
  };

  if (name == "linear") {
    reject_params();
    return KernelSpec::linear();
  }
  if (name == "squared") {
    reject_params();
    return KernelSpec::squared();
  }
  if (name == "relrbf") {
    reject_params();
    return KernelSpec::relative_rbf();
  }
  if (name == "poly") {
    int degree = 3;
    double offset = 1.0;
    for (const auto& [key, value] : params) {
      if (key == "p") {
        const double p = parse_number(value, "poly degree");
        if (p != std::floor(p)) throw std::invalid_argument("poly degree must be an integer");
        degree = static_cast<int>(p);
      } else if (key == "c") {
        offset = parse_number(value, "poly offset");
      } else {
        bad_token(token);
      }
    }
    return KernelSpec::polynomial(degree, offset);
  }
  if (name == "gauss") {
    KernelSpec spec = KernelSpec::gaussian_median();
    for (const auto& [key, value] : params) {
      if (key != "sigma") bad_token(token);
      if (value != "median") spec = KernelSpec::gaussian(parse_number(value, "gauss sigma"));
    }
    return spec;
  }
  if (name == "multiquad") {
    double offset = 1.0;
    for (const auto& [key, value] : params) {
      if (key != "c") bad_token(token);
      offset = parse_number(value, "multiquad c");
    }
    return KernelSpec::multiquadratic(offset);
  }
  bad_token(token);
}

}  // namespace

KernelSpec parse_kernel(std::string_view token) {
  constexpr std::string_view prefix = "conic:";
  if (token.substr(0, prefix.size()) != prefix) return parse_single(token);

  std::string_view rest = token.substr(prefix.size());
  std::vector<ConicTerm> terms;
  while (true) {
    // A '+' that follows an exponent marker belongs to the number.
    std::size_t split = std::string_view::npos;
    for (std::size_t k = 1; k < rest.size(); ++k) {
      if (rest[k] == '+' && rest[k - 1] != 'e' && rest[k - 1] != 'E') {
        split = k;
        break;
      }
    }
    const auto term = rest.substr(0, split);
    const auto star = term.find('*');
    if (star == std::string_view::npos) bad_token(token);
    terms.push_back({parse_number(term.substr(0, star), "conic weight"),
                     parse_single(term.substr(star + 1))});
    if (split == std::string_view::npos) break;
    rest.remove_prefix(split + 1);
  }
  return KernelSpec::conic(std::move(terms));
}

std::string to_token(const KernelSpec& spec) {
  switch (spec.kind) {
    case KernelKind::Linear:
      return "linear";
    case KernelKind::Squared:
      return "squared";
    case KernelKind::Polynomial:
      return "poly:p=" + std::to_string(spec.degree) + ",c=" + format_number(spec.offset);
    case KernelKind::Gaussian:
      return "gauss:sigma=" + (spec.sigma_from_median ? std::string("median") : format_number(spec.sigma));
    case KernelKind::Multiquadratic:
      return "multiquad:c=" + format_number(spec.offset);
    case KernelKind::RelativeRBF:
      return "relrbf";
    case KernelKind::Conic: {
      std::string out = "conic:";
      for (std::size_t k = 0; k < spec.parts.size(); ++k) {
        if (k > 0) out += '+';
        out += format_number(spec.parts[k].weight) + "*" + to_token(spec.parts[k].kernel);
      }
      return out;
    }
  }
  return {};
}

std::string_view valid_kernel_tokens() {
  return "linear, squared, poly:p=<int>,c=<float>, gauss:sigma=median|<float>, "
         "multiquad:c=<float>, relrbf, conic:<w>*<token>+<w>*<token>";
}

}  // namespace ism
