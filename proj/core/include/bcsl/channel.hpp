#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "bcsl/info.hpp"

namespace bcsl {

// p(y1,y2,y3|x), indexed [x][y1][y2][y3].
class Channel3 {
 public:
  Channel3(std::size_t nx, std::size_t ny1, std::size_t ny2, std::size_t ny3, std::vector<double> p);

  std::size_t nx() const { return nx_; }
  std::size_t ny(int receiver) const;
  std::size_t ny1() const { return ny_[0]; }
  std::size_t ny2() const { return ny_[1]; }
  std::size_t ny3() const { return ny_[2]; }
  const std::vector<double>& probs() const { return p_; }
  double at(std::size_t x, std::size_t y1, std::size_t y2, std::size_t y3) const {
    return p_[((x * ny_[0] + y1) * ny_[1] + y2) * ny_[2] + y3];
  }

  // Per-receiver transition matrix, row-major nx × ny(receiver). receiver in {1,2,3}.
  std::vector<double> marginal(int receiver) const;

  // Builds a channel from three independent marginal transitions.
  static Channel3 from_marginals(std::size_t nx, const std::vector<double>& w1, std::size_t ny1,
                                 const std::vector<double>& w2, std::size_t ny2,
                                 const std::vector<double>& w3, std::size_t ny3);

 private:
  std::size_t nx_;
  std::array<std::size_t, 3> ny_;
  std::vector<double> p_;
};

Channel3 channel_from_json(const std::string& text);
std::string channel_to_json(const Channel3& ch);

// Joint pmf p(u1,u2,u3,x), indexed [u1][u2][u3][x].
class AuxJoint {
 public:
  AuxJoint(std::size_t m1, std::size_t m2, std::size_t m3, std::size_t nx, std::vector<double> p);

  std::size_t m1() const { return m_[0]; }
  std::size_t m2() const { return m_[1]; }
  std::size_t m3() const { return m_[2]; }
  std::size_t nx() const { return nx_; }
  const std::vector<double>& probs() const { return p_; }
  double at(std::size_t u1, std::size_t u2, std::size_t u3, std::size_t x) const {
    return p_[((u1 * m_[1] + u2) * m_[2] + u3) * nx_ + x];
  }
  JointPmf joint() const;

  // Degenerate auxiliary with U1 = U3 = U and U2 = X built from p(u,x), |U| x nx.
  static AuxJoint from_single(std::size_t mu, std::size_t nx, const std::vector<double>& pux);

 private:
  std::array<std::size_t, 3> m_;
  std::size_t nx_;
  std::vector<double> p_;
};

AuxJoint aux_from_json(const std::string& text);
std::string aux_to_json(const AuxJoint& aux);

// Axes U1,U2,U3,X,Y1,Y2,Y3.
JointPmf induced_joint(const Channel3& ch, const AuxJoint& aux);

// Joint of (X, Yr) for input law px through one receiver's marginal.
JointPmf input_output_joint(const std::vector<double>& px, const std::vector<double>& w, std::size_t ny);

}  // namespace bcsl
