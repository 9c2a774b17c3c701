#pragma once

#include <string>
#include <utility>
#include <vector>

namespace feller {

/// Three-valued outcome of every classification in the toolkit.
enum class Truth { Holds, Fails, Inconclusive };

[[nodiscard]] const char* to_string(Truth t) noexcept;

/// A classification result together with the numbers that back it.
struct Verdict {
  Truth status = Truth::Inconclusive;
  std::string basis;
  std::vector<std::pair<std::string, double>> evidence;

  [[nodiscard]] bool holds() const noexcept { return status == Truth::Holds; }
  [[nodiscard]] bool fails() const noexcept { return status == Truth::Fails; }
  [[nodiscard]] bool conclusive() const noexcept { return status != Truth::Inconclusive; }

  Verdict& with(std::string key, double value) {
    evidence.emplace_back(std::move(key), value);
    return *this;
  }

  static Verdict make(Truth t, std::string basis) { return Verdict{t, std::move(basis), {}}; }
};

/// All-of combination: Fails dominates, then Inconclusive, then Holds.
/// Throws Error(EmptyList) on an empty list.
[[nodiscard]] Verdict combine_all(const std::vector<Verdict>& verdicts);

}  // namespace feller
