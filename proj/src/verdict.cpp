#include "feller/verdict.hpp"

#include "feller/error.hpp"

namespace feller {

const char* to_string(Truth t) noexcept {
  switch (t) {
    case Truth::Holds: return "Holds";
    case Truth::Fails: return "Fails";
    case Truth::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

Verdict combine_all(const std::vector<Verdict>& verdicts) {
  if (verdicts.empty()) throw Error(ErrorCode::EmptyList, "combine_all needs at least one verdict");
  const Verdict* pick = nullptr;
  for (const auto& v : verdicts) {
    if (v.fails()) return v;
    if (!v.conclusive() && pick == nullptr) pick = &v;
  }
  return pick ? *pick : verdicts.front();
}

}  // namespace feller
