#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "feller/expr.hpp"

namespace feller {

/// log g and its first two derivatives at one radius.
struct LogJet {
  double l = 0.0;   // log g
  double d1 = 0.0;  // g'/g
  double d2 = 0.0;  // (log g)''
};

struct LogEval {
  double log_g = 0.0;
  double dlog_g = 0.0;
  bool valid = false;  // exp(log_g) is representable as a double
};

/// One piece of a warping function: an analytic formula, a sampled table or
/// an arbitrary log-domain callable.
class WarpingSource {
 public:
  using JetFn = std::function<LogJet(double)>;

  static WarpingSource from_expr(const Expr& g);
  static WarpingSource from_formula(std::string_view formula, const ParamTable& params = {});
  /// Table of (r, g) samples with optional exact derivatives g'. Rows with
  /// r <= 0 are ignored; the pole is reached by even extrapolation of log(g/r).
  static WarpingSource from_table(std::vector<double> r, std::vector<double> g, std::vector<double> dg = {});
  static WarpingSource from_callable(JetFn fn, std::string description,
                                     double r_max = std::numeric_limits<double>::infinity());

  [[nodiscard]] LogJet jet(double r) const;
  /// g(0), computed directly (analytic) or by convention (tables: 0).
  [[nodiscard]] double value_at_zero() const;
  [[nodiscard]] double r_max() const noexcept { return r_max_; }
  [[nodiscard]] const std::string& description() const noexcept { return description_; }
  [[nodiscard]] const Expr* expr() const noexcept { return expr_ ? &*expr_ : nullptr; }

 private:
  JetFn fn_;
  std::optional<Expr> expr_;
  std::function<double()> at_zero_;
  double r_max_ = std::numeric_limits<double>::infinity();
  std::string description_;
};

/// Warping function g(r) > 0 on r > 0: a body, optionally a tail that takes
/// over for r >= r_b, with log g blended by a C^1 smoothstep on [r_a, r_b].
class WarpingFunction {
 public:
  explicit WarpingFunction(WarpingSource body);
  WarpingFunction(WarpingSource body, WarpingSource tail, double r_a, double r_b);

  static WarpingFunction parse(std::string_view formula, const ParamTable& params = {});
  static WarpingFunction spliced(std::string_view body, std::string_view tail, double r_a, double r_b,
                                 const ParamTable& params = {});

  /// Throws NonPositiveValue if g(r) <= 0 (r > 0), DomainExceeded past a
  /// table with no tail.
  [[nodiscard]] LogJet jet(double r) const;
  [[nodiscard]] LogEval eval_log(double r) const;
  [[nodiscard]] double log_g(double r) const { return jet(r).l; }
  /// g'(r), reconstructed from the jet.
  [[nodiscard]] double derivative(double r) const;
  [[nodiscard]] double value_at_zero() const { return body_.value_at_zero(); }

  [[nodiscard]] bool has_tail() const noexcept { return tail_ != nullptr; }
  [[nodiscard]] double blend_start() const noexcept { return r_a_; }
  [[nodiscard]] double blend_end() const noexcept { return r_b_; }
  /// Largest radius at which g can be evaluated.
  [[nodiscard]] double horizon() const noexcept;
  [[nodiscard]] std::string describe() const;

  /// Same tail, new blend window.
  [[nodiscard]] WarpingFunction with_window(double r_a, double r_b) const;

 private:
  WarpingSource body_;
  std::shared_ptr<const WarpingSource> tail_;
  double r_a_ = 0.0;
  double r_b_ = 0.0;
};

/// dr^2 + g(r)^2 dtheta^2 in dimension m. Build with make_model.
class ModelManifold {
 public:
  [[nodiscard]] int dim() const noexcept { return m_; }
  [[nodiscard]] const WarpingFunction& g() const noexcept { return g_; }
  [[nodiscard]] double pole_eps() const noexcept { return eps_; }

  /// log of the area density w = g^{m-1}.
  [[nodiscard]] double log_w(double r) const { return (m_ - 1) * g_.log_g(r); }
  [[nodiscard]] double dlog_w(double r) const { return (m_ - 1) * g_.jet(r).d1; }
  [[nodiscard]] double log_sphere_constant() const;

 private:
  friend ModelManifold make_model(int m, WarpingFunction g, double pole_eps);
  ModelManifold(int m, WarpingFunction g, double eps) : m_(m), g_(std::move(g)), eps_(eps) {}

  int m_;
  WarpingFunction g_;
  double eps_;
};

/// Validates the pole conditions and positivity by sampling.
/// Throws PoleViolation, NonPositive or ValidationError.
[[nodiscard]] ModelManifold make_model(int m, WarpingFunction g, double pole_eps = 1e-3);

/// Volume of the unit (m-1)-sphere, 2 pi^{m/2} / Gamma(m/2).
[[nodiscard]] double sphere_constant(int m);

/// Reads a two-column CSV (r, g); a header line is allowed.
[[nodiscard]] WarpingSource load_table_csv(const std::string& path);

}  // namespace feller
