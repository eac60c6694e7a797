#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace lll {

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
  double se = 0.0;      // standard error of the mean
  std::size_t n = 0;
};

inline Summary summarize(std::span<const double> xs) {
  Summary s;
  s.n = xs.size();
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double sq = 0.0;
    for (double x : xs) sq += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(xs.size() - 1));
    s.se = s.stddev / std::sqrt(static_cast<double>(xs.size()));
  }
  return s;
}

// Standard error of a binomial frequency estimate at probability p.
inline double binomial_se(double p, double n) {
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / n);
}

// Regularized upper incomplete gamma Q(a, x), by series or continued
// fraction depending on the region.
inline double gamma_q(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0)) throw std::invalid_argument("gamma_q: need a > 0, x >= 0");
  if (x == 0.0) return 1.0;
  const double log_prefix = -x + a * std::log(x) - std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int i = 0; i < 1000; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return 1.0 - sum * std::exp(log_prefix);
  }
  // modified Lentz continued fraction
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 1000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return std::exp(log_prefix) * h;
}

inline double chi_square_p_value(double stat, int dof) {
  if (dof <= 0) return 1.0;
  return gamma_q(0.5 * dof, 0.5 * stat);
}

struct ChiSquareResult {
  double stat = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

// Two-sample homogeneity chi-square over aligned count vectors. Bins whose
// pooled count falls below min_pooled are merged into one rare bin.
inline ChiSquareResult two_sample_chi_square(std::span<const std::uint64_t> a,
                                             std::span<const std::uint64_t> b,
                                             std::uint64_t min_pooled = 10) {
  if (a.size() != b.size()) throw std::invalid_argument("count vectors must align");
  std::vector<std::pair<double, double>> bins;
  double rare_a = 0.0, rare_b = 0.0;
  double total_a = 0.0, total_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double na = static_cast<double>(a[i]);
    const double nb = static_cast<double>(b[i]);
    total_a += na;
    total_b += nb;
    if (a[i] + b[i] >= min_pooled)
      bins.emplace_back(na, nb);
    else {
      rare_a += na;
      rare_b += nb;
    }
  }
  if (rare_a + rare_b > 0.0) bins.emplace_back(rare_a, rare_b);
  if (total_a == 0.0 || total_b == 0.0)
    throw std::invalid_argument("two_sample_chi_square: empty sample");
  ChiSquareResult r;
  r.dof = static_cast<int>(bins.size()) - 1;
  if (r.dof <= 0) return r;
  const double total = total_a + total_b;
  for (const auto& [na, nb] : bins) {
    const double col = na + nb;
    const double ea = total_a * col / total;
    const double eb = total_b * col / total;
    if (ea > 0.0) r.stat += (na - ea) * (na - ea) / ea;
    if (eb > 0.0) r.stat += (nb - eb) * (nb - eb) / eb;
  }
  r.p_value = chi_square_p_value(r.stat, r.dof);
  return r;
}

}  // namespace lll
