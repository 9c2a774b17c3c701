#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "feller/quadrature.hpp"
#include "feller/warping.hpp"

namespace feller {

enum class Convergence { Convergent, Divergent, Inconclusive };

[[nodiscard]] const char* to_string(Convergence c) noexcept;

struct WindowRecord {
  double a = 0.0;
  double b = 0.0;
  double log_contribution = 0.0;
};

struct ConvergenceVerdict {
  Convergence status = Convergence::Inconclusive;
  double partial_value = 0.0;  // integral over [a, inf) when Convergent
  double log_partial = 0.0;
  std::vector<WindowRecord> windows;
  double last_log_ratio = 0.0;
  std::string note;

  [[nodiscard]] bool convergent() const noexcept { return status == Convergence::Convergent; }
  [[nodiscard]] bool divergent() const noexcept { return status == Convergence::Divergent; }
};

struct TailOptions {
  int window_budget = 60;
  double margin = 0.05;  // Convergent needs window ratios <= 1 - margin
  int confirm = 8;       // consecutive windows required for either decision
  double rtol = 1e-10;
  int max_intervals = 400;
};

/// Decides whether exp(f_log) is integrable on [a, inf) from contributions of
/// the dyadic windows [a 2^k, a 2^{k+1}]. Evaluation past the horizon of the
/// integrand (DomainExceeded) ends the scan with Inconclusive.
[[nodiscard]] ConvergenceVerdict classify_tail(const LogIntegrand& f_log, double a, const TailOptions& opts = {});

/// Cumulative integrals of exp(f_log) from 0, cached on a geometric grid so a
/// scan over r costs one short quadrature per query.
class CumulativeIntegral {
 public:
  explicit CumulativeIntegral(LogIntegrand f_log, int cells_per_octave = 16, double rtol = 1e-11);

  /// log of int_0^r.
  [[nodiscard]] double log_inner(double r);
  /// log of int_r^inf; +inf if the tail sum does not settle.
  [[nodiscard]] double log_outer(double r);
  /// log of int_0^inf.
  [[nodiscard]] double log_total();
  /// log of int_a^b.
  [[nodiscard]] double log_between(double a, double b);

 private:
  double node(std::size_t k) const;
  std::size_t cell_of(double r) const;
  void extend_to(std::size_t k);
  double log_cell(std::size_t k);

  LogIntegrand f_;
  int per_octave_;
  double rtol_;
  double r0_;
  std::vector<double> cells_;   // log int over cell k = [node(k), node(k+1)]
  std::vector<double> prefix_;  // log int_0^{node(k)}
  double total_ = 0.0;
  bool total_known_ = false;
  std::vector<double> suffix_;  // log int_{node(k)}^inf, filled once total is known
  std::map<double, double> inner_memo_;  // r -> log int_0^r for past queries
  std::map<double, double> outer_memo_;  // r -> log int_r^inf for past queries
};

enum class RatioDirection { Stochastic, Feller };

/// Tail test for int_0^r w / w(r) (Stochastic) or int_r^inf w / w(r) (Feller),
/// w = g^{m-1}. For Feller, w not integrable is reported as Divergent by the
/// trivial-branch convention.
[[nodiscard]] ConvergenceVerdict tail_of_volume_ratio(const ModelManifold& M, RatioDirection direction,
                                                      const TailOptions& opts = {}, double a = 1.0);

}  // namespace feller
