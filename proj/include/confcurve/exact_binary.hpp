#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

#include "confcurve/combine.hpp"

namespace confcurve {

/// 2x2 table: a/b events/non-events under treatment, c/d under control.
struct Table2x2 {
  int a = 0;
  int b = 0;
  int c = 0;
  int d = 0;

  int n_treat() const { return a + b; }
  int n_ctrl() const { return c + d; }
  int events() const { return a + c; }
};

Table2x2 table_from_counts(const Counts& counts);
void validate(const Table2x2& table);

/// Conditional distribution of the treatment-arm event count given both
/// margins. Log-binomial weights are precomputed so that repeated evaluation
/// at different odds ratios only costs one pass over the support.
class ConditionalTable {
 public:
  explicit ConditionalTable(const Table2x2& table);

  /// Mid-p values {greater, less} at log odds ratio mu. They sum to one.
  std::pair<double, double> midp(double mu) const;

  const Table2x2& table() const { return table_; }

 private:
  Table2x2 table_;
  int lo_;
  Eigen::ArrayXd log_weight_;  // log C(n1, x) + log C(n0, t - x), x = lo..hi
};

/// greater: P(X > a) + P(X = a)/2; less: P(X < a) + P(X = a)/2, with X
/// Fisher-noncentral hypergeometric at odds ratio exp(mu).
double exact_midp(const Table2x2& table, double mu, Orientation orientation);

class ExactPValues final : public PValueSource {
 public:
  ExactPValues(std::span<const Table2x2> tables, Orientation orientation);

  Eigen::Index size() const override { return static_cast<Eigen::Index>(tables_.size()); }
  Orientation orientation() const override { return orientation_; }
  void evaluate(double mu, Eigen::ArrayXd& p, Eigen::ArrayXd& q) const override;
  BracketHint hint() const override;

 private:
  std::vector<ConditionalTable> tables_;
  Orientation orientation_;
  BracketHint hint_;
};

PValueFunction make_exact_pfunction(std::span<const Table2x2> tables, Method method,
                                    Orientation orientation);

}  // namespace confcurve
