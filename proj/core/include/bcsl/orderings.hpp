#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bcsl/channel.hpp"

namespace bcsl {

// A predicate passes at <= kOrderPass violation and fails only above kOrderFail.
inline constexpr double kOrderPass = 1e-7;
inline constexpr double kOrderFail = 1e-6;
inline constexpr double kDegradedTol = 1e-9;

enum class Verdict { True, False, Indeterminate };
const char* verdict_name(Verdict v);

struct SearchConfig {
  int restarts = 32;
  int grid = 64;           // simplex grid steps per dimension for the input-law search
  int ln_grid = 16;        // grid steps for the structured p(u,x) sampling in less-noisy
  std::size_t grid_cap_nx = 3;
  bool multistart_only = false;
  int iters = 400;
  std::size_t aux_card = 0;  // |U| for less-noisy; 0 means nx + 1
  std::uint64_t seed = 0;
  int threads = 1;
};

struct OrderingReport {
  std::string predicate;  // "degraded", "more_capable", "less_noisy"
  int a = 0, b = 0;
  Verdict verdict = Verdict::Indeterminate;
  // Signed violation in bits (more capable / less noisy); L1 residual for degraded.
  double gap = 0.0;
  // Degraded: W(y_b|y_a), rows y_a. Others: maximizing p(x) or p(u,x).
  std::vector<double> witness;
  std::size_t witness_rows = 0, witness_cols = 0;
  int restarts = 0;
  int grid = 0;
  std::string certification;
};

OrderingReport is_degraded(const Channel3& ch, int a, int b);
OrderingReport is_more_capable(const Channel3& ch, int a, int b, const SearchConfig& cfg = {});
OrderingReport is_less_noisy(const Channel3& ch, int a, int b, const SearchConfig& cfg = {});

struct ImplicationReport {
  OrderingReport degraded, less_noisy, more_capable;
  bool consistent = true;
  std::vector<std::string> violations;
};

// degraded => less noisy => more capable on one channel's verdicts.
ImplicationReport implication_check(const Channel3& ch, int a, int b, const SearchConfig& cfg = {});

std::string ordering_to_json(const OrderingReport& r);
OrderingReport ordering_from_json(const std::string& text);

// Objectives exposed for tests and oracles.
double mc_gap_at(const std::vector<double>& wa, const std::vector<double>& wb, std::size_t nx, std::size_t na,
                 std::size_t nb, const std::vector<double>& px);
double ln_gap_at(const std::vector<double>& wa, const std::vector<double>& wb, std::size_t nx, std::size_t na,
                 std::size_t nb, std::size_t nu, const std::vector<double>& pux);

// Euclidean projection onto the probability simplex.
std::vector<double> project_simplex(std::vector<double> v);

}  // namespace bcsl
