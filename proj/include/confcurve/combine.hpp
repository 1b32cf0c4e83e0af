#pragma once

#include <Eigen/Core>
#include <memory>
#include <span>
#include <string_view>

#include "confcurve/effects.hpp"

namespace confcurve {

/// p-value combination rules.
enum class Method { edgington, fisher, pearson, tippett, wilkinson };

inline constexpr Method kAllMethods[] = {Method::edgington, Method::fisher, Method::pearson,
                                         Method::tippett, Method::wilkinson};

std::string_view to_string(Method m);
Method parse_method(std::string_view name);

/// Combined p-value of k one-sided p-values.
///
///   edgington  Irwin-Hall CDF of s = sum p_i
///   fisher     Pr(chi2_2k > -2 sum log p_i)
///   pearson    Pr(chi2_2k <= -2 sum log(1 - p_i))
///   tippett    1 - (1 - min p_i)^k
///   wilkinson  (max p_i)^k
///
/// Throws std::invalid_argument on an empty list or p_i outside [0, 1].
double combine_p(Method method, const Eigen::Ref<const Eigen::ArrayXd>& p);

/// Same, with the complements q_i = 1 - p_i supplied by the caller. When q is
/// computed independently (e.g. Phi(z) next to Phi(-z)) tail precision is
/// kept on both sides and the orientation identities hold to rounding.
double combine_p(Method method, const Eigen::Ref<const Eigen::ArrayXd>& p,
                 const Eigen::Ref<const Eigen::ArrayXd>& q);

/// Interval that the study-level evidence is centred on, used to seed
/// bracketing: [min theta - 10 max se, max theta + 10 max se].
struct BracketHint {
  double lo;
  double hi;
};

/// Source of study-specific one-sided p-values as a function of mu.
class PValueSource {
 public:
  virtual ~PValueSource() = default;
  virtual Eigen::Index size() const = 0;
  virtual Orientation orientation() const = 0;
  /// Writes p_i(mu) and 1 - p_i(mu) into the (pre-sized) outputs.
  virtual void evaluate(double mu, Eigen::ArrayXd& p, Eigen::ArrayXd& q) const = 0;
  virtual BracketHint hint() const = 0;
};

/// Combined p-value function mu -> p(mu). Immutable and cheap to copy.
class PValueFunction {
 public:
  PValueFunction(std::shared_ptr<const PValueSource> source, Method method);

  double operator()(double mu) const;
  /// Combined p-value and its complement, each to full precision.
  std::pair<double, double> evaluate_pair(double mu) const;

  Method method() const { return method_; }
  Orientation orientation() const { return source_->orientation(); }
  Eigen::Index size() const { return source_->size(); }
  BracketHint hint() const { return source_->hint(); }
  const PValueSource& source() const { return *source_; }

 private:
  std::shared_ptr<const PValueSource> source_;
  Method method_;
};

/// Normal-theory p-values from z-statistics (theta_i - mu) / sqrt(phi se_i^2 + tau2).
class NormalPValues final : public PValueSource {
 public:
  NormalPValues(std::span<const Study> studies, Orientation orientation, Adjustment adj = {});

  Eigen::Index size() const override { return theta_.size(); }
  Orientation orientation() const override { return orientation_; }
  void evaluate(double mu, Eigen::ArrayXd& p, Eigen::ArrayXd& q) const override;
  BracketHint hint() const override;

  const Eigen::ArrayXd& estimates() const { return theta_; }
  const Eigen::ArrayXd& effective_se() const { return se_; }
  const Adjustment& adjustment() const { return adj_; }

 private:
  Eigen::ArrayXd theta_;
  Eigen::ArrayXd se_;
  Orientation orientation_;
  Adjustment adj_;
};

PValueFunction make_pfunction(std::span<const Study> studies, Method method,
                              Orientation orientation, Adjustment adj = {});

}  // namespace confcurve
