#include "selfapprox/integer_relation.hpp"

#include <algorithm>
#include <sstream>

#include "selfapprox/errors.hpp"

namespace selfapprox {

namespace {

using boost::multiprecision::abs;
using boost::multiprecision::round;
using boost::multiprecision::sqrt;

using Matrix = std::vector<std::vector<HighPrecision>>;

}  // namespace

HighPrecision round_to_digits(const HighPrecision& v, int digits) {
  if (v == 0) return v;
  std::ostringstream os;
  os.precision(digits);
  os << std::scientific << v;
  return HighPrecision(os.str());
}

PslqResult pslq(const std::vector<HighPrecision>& x, const PslqOptions& options) {
  const std::size_t n = x.size();
  if (n < 2) throw DomainError("integer relation search needs at least two values");
  PslqResult result;

  // An exact zero entry is its own relation.
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] == 0) {
      std::vector<std::int64_t> rel(n, 0);
      rel[i] = 1;
      result.relation = rel;
      return result;
    }
  }

  const HighPrecision gamma = sqrt(HighPrecision(4) / 3);
  std::vector<HighPrecision> s(n);
  {
    HighPrecision acc = 0;
    for (std::size_t k = n; k-- > 0;) {
      acc += x[k] * x[k];
      s[k] = sqrt(acc);
    }
  }
  const HighPrecision norm_x = s[0];
  std::vector<HighPrecision> y(n);
  for (std::size_t k = 0; k < n; ++k) {
    y[k] = x[k] / norm_x;
    s[k] /= norm_x;
  }

  Matrix h(n, std::vector<HighPrecision>(n - 1, HighPrecision(0)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < std::min(i + 1, n - 1); ++j) {
      if (i == j) {
        h[i][j] = s[j + 1] / s[j];
      } else {
        h[i][j] = -y[i] * y[j] / (s[j] * s[j + 1]);
      }
    }
  }
  Matrix a(n, std::vector<HighPrecision>(n, HighPrecision(0)));
  Matrix b(n, std::vector<HighPrecision>(n, HighPrecision(0)));
  for (std::size_t i = 0; i < n; ++i) a[i][i] = b[i][i] = 1;

  auto reduce_row = [&](std::size_t i, std::size_t j) {
    if (h[j][j] == 0) return;
    const HighPrecision t = round(h[i][j] / h[j][j]);
    if (t == 0) return;
    y[j] += t * y[i];
    for (std::size_t k = 0; k <= j; ++k) h[i][k] -= t * h[j][k];
    for (std::size_t k = 0; k < n; ++k) {
      a[i][k] -= t * a[j][k];
      b[k][j] += t * b[k][i];
    }
  };

  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = i; j-- > 0;) reduce_row(i, j);

  const HighPrecision cap = HighPrecision(options.coeff_cap);
  const HighPrecision detect = HighPrecision(options.residual_tolerance) / norm_x;
  const HighPrecision entry_limit = HighPrecision("1e60");

  // Returns true when the search is finished (relation found, or norm bound above the cap).
  auto settled = [&]() {
    HighPrecision max_diag = 0;
    for (std::size_t j = 0; j < n - 1; ++j) max_diag = std::max(max_diag, HighPrecision(abs(h[j][j])));
    std::size_t jmin = 0;
    for (std::size_t j = 1; j < n; ++j)
      if (abs(y[j]) < abs(y[jmin])) jmin = j;
    if (abs(y[jmin]) <= detect) {
      std::vector<std::int64_t> rel(n);
      bool fits = true;
      HighPrecision residual = 0;
      for (std::size_t k = 0; k < n; ++k) {
        if (abs(b[k][jmin]) > cap) fits = false;
        rel[k] = fits ? b[k][jmin].convert_to<std::int64_t>() : 0;
        residual += b[k][jmin] * x[k];
      }
      if (fits) {
        result.relation = rel;
        result.residual = abs(residual);
      }
      return true;
    }
    if (max_diag > 0) result.norm_bound = 1 / max_diag;
    return result.norm_bound > cap;
  };

  if (settled()) return result;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    result.iterations = iter + 1;
    std::size_t m = 0;
    HighPrecision best = -1;
    HighPrecision power = gamma;
    for (std::size_t i = 0; i < n - 1; ++i) {
      const HighPrecision v = power * abs(h[i][i]);
      if (v > best) {
        best = v;
        m = i;
      }
      power *= gamma;
    }
    std::swap(y[m], y[m + 1]);
    std::swap(a[m], a[m + 1]);
    std::swap(h[m], h[m + 1]);
    for (std::size_t k = 0; k < n; ++k) std::swap(b[k][m], b[k][m + 1]);
    if (m + 1 < n - 1) {
      const HighPrecision t0 = sqrt(h[m][m] * h[m][m] + h[m][m + 1] * h[m][m + 1]);
      const HighPrecision t1 = h[m][m] / t0;
      const HighPrecision t2 = h[m][m + 1] / t0;
      for (std::size_t i = m; i < n; ++i) {
        const HighPrecision t3 = h[i][m];
        const HighPrecision t4 = h[i][m + 1];
        h[i][m] = t1 * t3 + t2 * t4;
        h[i][m + 1] = -t2 * t3 + t1 * t4;
      }
    }
    for (std::size_t i = m + 1; i < n; ++i)
      for (std::size_t j = std::min(i - 1, m + 1) + 1; j-- > 0;) reduce_row(i, j);

    if (settled()) return result;
    for (const auto& row : a) {
      for (const auto& v : row) {
        if (abs(v) > entry_limit) {
          result.precision_exhausted = true;
          return result;
        }
      }
    }
  }
  result.precision_exhausted = true;
  return result;
}

}  // namespace selfapprox
