#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace bcsl {

inline constexpr double kNormTol = 1e-12;
// Information values in [-kHardNegTol, 0) are float noise and clamp to 0;
// anything lower means a modeling bug.
inline constexpr double kClampTol = 1e-10;
inline constexpr double kHardNegTol = 1e-6;

using Axes = std::vector<std::string>;

class Pmf {
 public:
  explicit Pmf(std::vector<double> p);

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  const std::vector<double>& probs() const { return p_; }

 private:
  std::vector<double> p_;
};

// Bits. 0 log 0 = 0.
double entropy(const Pmf& p);
double entropy_of(const std::vector<double>& p);

// Flat row-major tensor over named axes (last axis fastest).
class JointPmf {
 public:
  JointPmf(Axes axes, std::vector<std::size_t> dims, std::vector<double> p);

  const Axes& axes() const { return axes_; }
  const std::vector<std::size_t>& dims() const { return dims_; }
  const std::vector<double>& probs() const { return p_; }
  std::size_t rank() const { return axes_.size(); }
  std::size_t axis(const std::string& name) const;
  bool has_axis(const std::string& name) const;
  std::size_t dim(const std::string& name) const { return dims_[axis(name)]; }

  // Marginal over the given axes, in the given order.
  JointPmf marginal(const Axes& keep) const;
  double entropy(const Axes& group) const;

 private:
  Axes axes_;
  std::vector<std::size_t> dims_;
  std::vector<double> p_;
};

double mutual_information(const JointPmf& j, const Axes& a, const Axes& b);
// C may be empty.
double conditional_mi(const JointPmf& j, const Axes& a, const Axes& b, const Axes& c);
// H(B|A) summed slice by slice, independent of the H(A,B) - H(A) identity.
double conditional_entropy(const JointPmf& j, const Axes& b, const Axes& a);

// Applies the clamp policy to a computed information value.
double clamp_info(double v, const char* what);

}  // namespace bcsl
