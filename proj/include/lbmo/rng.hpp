#pragma once

#include <cstdint>
#include <string_view>

namespace lbmo {

/// Stateless counter-based generator: the k-th draw of a named stream is a
/// pure function of (seed, stream name, k), so any subset of draws can be
/// regenerated independently and in any order.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::string_view stream);

  std::uint64_t bits(std::uint64_t counter) const;
  /// Uniform in [0, 1) with 53 random bits.
  double uniform(std::uint64_t counter) const;

 private:
  std::uint64_t key_;
};

}  // namespace lbmo
