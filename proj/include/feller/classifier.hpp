#pragma once

#include <optional>
#include <string>
#include <vector>

#include "feller/integrals.hpp"
#include "feller/verdict.hpp"
#include "feller/warping.hpp"

namespace feller {

struct ClassifierOptions {
  TailOptions tail;
  double lower_limit = 1.0;  // tails are tested on [lower_limit, inf)
};

/// Green kernel value G(r) = int_r^inf dt / g^{m-1}, or the infinite tag.
struct GreenValue {
  enum class Kind { Finite, Infinite, Unknown } kind = Kind::Unknown;
  double value = 0.0;

  [[nodiscard]] bool finite() const noexcept { return kind == Kind::Finite; }
};

struct VolumeValues {
  double area = 0.0;                  // c_m g^{m-1}(r)
  double residual_volume = 0.0;       // c_m int_r^inf g^{m-1}; +inf if infinite
  bool residual_known = false;
};

struct ConsistencyFlag {
  std::string name;
  bool violated = false;
  std::string detail;
};

struct ClassificationReport {
  Verdict parabolic;
  Verdict stochastically_complete;
  Verdict feller;
  Verdict volume_finite;
  double volume_value = 0.0;  // +inf when infinite, NaN when unknown
  std::vector<std::pair<double, double>> green_kernel_at;  // (r, G) samples when non-parabolic
  std::vector<ConsistencyFlag> consistency_flags;

  [[nodiscard]] bool consistent() const;
};

[[nodiscard]] Verdict classify_parabolic(const ModelManifold& M, const ClassifierOptions& opts = {});
[[nodiscard]] Verdict classify_stochastically_complete(const ModelManifold& M, const ClassifierOptions& opts = {});
[[nodiscard]] Verdict classify_feller(const ModelManifold& M, const ClassifierOptions& opts = {});
[[nodiscard]] Verdict classify_volume_finite(const ModelManifold& M, const ClassifierOptions& opts = {});
[[nodiscard]] VolumeValues volume_functions(const ModelManifold& M, double r);
[[nodiscard]] GreenValue green_kernel(const ModelManifold& M, double r, const ClassifierOptions& opts = {});

[[nodiscard]] ClassificationReport classify(const ModelManifold& M, const ClassifierOptions& opts = {});

}  // namespace feller
