#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "finprog/dsl.hpp"
#include "finprog/executor.hpp"

// Rule-based program equivalence: value-normalized literals, sorted operands
// for commutative operators, and elimination of steps whose results are never
// used. Deeper algebraic identities are deliberately out; the predicate is a
// sound lower bound, and aggressive rewriting would inflate it.

namespace finprog {

struct CanonNumber {
  double value = 0.0;
  bool percent = false;
  bool operator==(const CanonNumber&) const = default;
};

struct CanonStepRef {
  std::size_t index = 0;
  bool operator==(const CanonStepRef&) const = default;
};

struct CanonRowRef {
  std::string name;  // whitespace-normalized, lowercased
  bool operator==(const CanonRowRef&) const = default;
};

using CanonOperand = std::variant<CanonNumber, CanonStepRef, CanonRowRef>;

struct CanonStep {
  Op op = Op::Add;
  std::vector<CanonOperand> operands;
  bool operator==(const CanonStep&) const = default;
};

struct CanonicalProgram {
  std::vector<CanonStep> steps;
  bool operator==(const CanonicalProgram&) const = default;
};

struct CanonicalizeOptions {
  bool eliminate_dead_steps = true;
};

namespace detail {

inline CanonOperand canon_operand(const Operand& operand) {
  return std::visit(
      [](const auto& o) -> CanonOperand {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, NumberLiteral>) {
          return CanonNumber{o.value == 0.0 ? 0.0 : o.value, o.percent};
        } else if constexpr (std::is_same_v<T, ConstantRef>) {
          return CanonNumber{o.value == 0.0 ? 0.0 : o.value, false};
        } else if constexpr (std::is_same_v<T, StepRef>) {
          return CanonStepRef{o.index};
        } else {
          return CanonRowRef{lower_copy(normalize_ws_copy(o.name))};
        }
      },
      operand);
}

inline bool canon_operand_less(const CanonOperand& a, const CanonOperand& b) {
  if (a.index() != b.index()) return a.index() < b.index();
  if (const auto* na = std::get_if<CanonNumber>(&a)) {
    const auto& nb = std::get<CanonNumber>(b);
    if (na->value != nb.value) return na->value < nb.value;
    return na->percent < nb.percent;
  }
  if (const auto* sa = std::get_if<CanonStepRef>(&a)) {
    return sa->index < std::get<CanonStepRef>(b).index;
  }
  return std::get<CanonRowRef>(a).name < std::get<CanonRowRef>(b).name;
}

}  // namespace detail

/// Normalizes literals to values, sorts add/multiply operands, drops steps
/// whose results are unreachable from the final step, and renumbers.
/// Idempotent: canonicalize(canonicalize(p)) equals canonicalize(p).
inline CanonicalProgram canonicalize(const Program& p, const CanonicalizeOptions& opts = {}) {
  CanonicalProgram canon;
  canon.steps.reserve(p.steps.size());
  for (const Step& step : p.steps) {
    CanonStep cs{step.op, {}};
    cs.operands.reserve(step.operands.size());
    for (const Operand& operand : step.operands) {
      cs.operands.push_back(detail::canon_operand(operand));
    }
    if (step.op == Op::Add || step.op == Op::Multiply) {
      std::sort(cs.operands.begin(), cs.operands.end(), detail::canon_operand_less);
    }
    canon.steps.push_back(std::move(cs));
  }
  if (canon.steps.empty() || !opts.eliminate_dead_steps) return canon;

  // Liveness is reachability from the final step; unreferenced chains die
  // together.
  std::vector<bool> live(canon.steps.size(), false);
  std::vector<std::size_t> stack{canon.steps.size() - 1};
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    if (live[i]) continue;
    live[i] = true;
    for (const CanonOperand& operand : canon.steps[i].operands) {
      if (const auto* ref = std::get_if<CanonStepRef>(&operand)) {
        if (ref->index < canon.steps.size() && !live[ref->index]) stack.push_back(ref->index);
      }
    }
  }
  std::vector<std::size_t> remap(canon.steps.size(), 0);
  CanonicalProgram pruned;
  for (std::size_t i = 0; i < canon.steps.size(); ++i) {
    if (!live[i]) continue;
    remap[i] = pruned.steps.size();
    pruned.steps.push_back(std::move(canon.steps[i]));
  }
  for (CanonStep& step : pruned.steps) {
    for (CanonOperand& operand : step.operands) {
      if (auto* ref = std::get_if<CanonStepRef>(&operand)) {
        ref->index = remap[ref->index];
      }
    }
  }
  return pruned;
}

/// The program-accuracy predicate: equality of canonical forms.
inline bool prog_equal(const Program& a, const Program& b, const CanonicalizeOptions& opts = {}) {
  return canonicalize(a, opts) == canonicalize(b, opts);
}

}  // namespace finprog
