#include "confcurve/exact_binary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "confcurve/special_fn.hpp"

namespace confcurve {
namespace {

double log_choose(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

Table2x2 table_from_counts(const Counts& counts) {
  validate(counts);
  return {counts.events_treat, counts.n_treat - counts.events_treat, counts.events_ctrl,
          counts.n_ctrl - counts.events_ctrl};
}

void validate(const Table2x2& t) {
  if (t.a < 0 || t.b < 0 || t.c < 0 || t.d < 0) {
    throw std::invalid_argument("2x2 table cells must be non-negative");
  }
  if (t.n_treat() < 1 || t.n_ctrl() < 1) {
    throw std::invalid_argument("2x2 table needs at least one subject per arm");
  }
}

ConditionalTable::ConditionalTable(const Table2x2& table) : table_(table) {
  validate(table);
  const int n1 = table.n_treat();
  const int n0 = table.n_ctrl();
  const int t = table.events();
  const auto [lo, hi] = nc_hypergeom_support(n1, n0, t);
  lo_ = lo;
  log_weight_.resize(hi - lo + 1);
  for (int x = lo; x <= hi; ++x) log_weight_[x - lo] = log_choose(n1, x) + log_choose(n0, t - x);
}

std::pair<double, double> ConditionalTable::midp(double mu) const {
  const Eigen::Index n = log_weight_.size();
  Eigen::ArrayXd lw(n);
  for (Eigen::Index i = 0; i < n; ++i) lw[i] = log_weight_[i] + (lo_ + i) * mu;
  const Eigen::ArrayXd w = (lw - lw.maxCoeff()).exp();
  const double total = w.sum();
  const Eigen::Index obs = table_.a - lo_;
  const double below = w.head(obs).sum();
  const double above = w.tail(n - obs - 1).sum();
  const double half_obs = 0.5 * w[obs];
  // The smaller tail keeps full relative precision; the larger one is its
  // complement, so both stay in [0, 1] and move monotonically with mu.
  if (above <= below) {
    const double greater = std::min((above + half_obs) / total, 0.5);
    return {greater, 1.0 - greater};
  }
  const double less = std::min((below + half_obs) / total, 0.5);
  return {1.0 - less, less};
}

double exact_midp(const Table2x2& table, double mu, Orientation orientation) {
  const auto [greater, less] = ConditionalTable(table).midp(mu);
  return orientation == Orientation::greater ? greater : less;
}

ExactPValues::ExactPValues(std::span<const Table2x2> tables, Orientation orientation)
    : orientation_(orientation) {
  if (tables.empty()) throw std::invalid_argument("p-value function needs at least one table");
  tables_.reserve(tables.size());
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double spread = 0.0;
  for (const auto& t : tables) {
    tables_.emplace_back(t);
    // Bracketing only: a 0.5-corrected log odds ratio keeps zero cells finite.
    const double a = t.a + 0.5, b = t.b + 0.5, c = t.c + 0.5, d = t.d + 0.5;
    const double centre = std::log(a * d / (b * c));
    lo = std::min(lo, centre);
    hi = std::max(hi, centre);
    spread = std::max(spread, std::sqrt(1 / a + 1 / b + 1 / c + 1 / d));
  }
  hint_ = {lo - 10.0 * spread, hi + 10.0 * spread};
}

void ExactPValues::evaluate(double mu, Eigen::ArrayXd& p, Eigen::ArrayXd& q) const {
  for (std::size_t i = 0; i < tables_.size(); ++i) {
    const auto [greater, less] = tables_[i].midp(mu);
    const auto idx = static_cast<Eigen::Index>(i);
    if (orientation_ == Orientation::greater) {
      p[idx] = greater;
      q[idx] = less;
    } else {
      p[idx] = less;
      q[idx] = greater;
    }
  }
}

BracketHint ExactPValues::hint() const { return hint_; }

PValueFunction make_exact_pfunction(std::span<const Table2x2> tables, Method method,
                                    Orientation orientation) {
  return PValueFunction(std::make_shared<ExactPValues>(tables, orientation), method);
}

}  // namespace confcurve
