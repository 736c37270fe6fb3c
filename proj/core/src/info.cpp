#include "bcsl/info.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "bcsl/error.hpp"

namespace bcsl {

namespace {

void validate_probs(const std::vector<double>& p, const char* what) {
  if (p.empty()) throw ValidationError(std::string(what) + ": empty support");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 0.0) || p[i] > 1.0 + kNormTol) {
      std::ostringstream os;
      os << what << ": entry " << i << " = " << p[i] << " outside [0,1]";
      throw ValidationError(os.str());
    }
    s += p[i];
  }
  if (std::abs(s - 1.0) > kNormTol) {
    std::ostringstream os;
    os.precision(17);
    os << what << ": total mass " << s << " differs from 1";
    throw ValidationError(os.str());
  }
}

}  // namespace

double clamp_info(double v, const char* what) {
  if (v >= 0.0) return v;
  if (v < -kHardNegTol) {
    std::ostringstream os;
    os << what << " = " << v << " is negative beyond tolerance";
    throw DomainError(os.str());
  }
  return 0.0;
}

Pmf::Pmf(std::vector<double> p) : p_(std::move(p)) { validate_probs(p_, "pmf"); }

double entropy_of(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log2(v);
  return h;
}

double entropy(const Pmf& p) { return std::max(0.0, entropy_of(p.probs())); }

JointPmf::JointPmf(Axes axes, std::vector<std::size_t> dims, std::vector<double> p)
    : axes_(std::move(axes)), dims_(std::move(dims)), p_(std::move(p)) {
  if (axes_.size() != dims_.size()) throw ValidationError("joint pmf: axes/dims length mismatch");
  std::set<std::string> seen(axes_.begin(), axes_.end());
  if (seen.size() != axes_.size()) throw ValidationError("joint pmf: duplicate axis name");
  std::size_t n = 1;
  for (std::size_t d : dims_) {
    if (d == 0) throw ValidationError("joint pmf: zero-size axis");
    n *= d;
  }
  if (n != p_.size()) throw ValidationError("joint pmf: tensor size does not match dims");
  validate_probs(p_, "joint pmf");
}

bool JointPmf::has_axis(const std::string& name) const {
  return std::find(axes_.begin(), axes_.end(), name) != axes_.end();
}

std::size_t JointPmf::axis(const std::string& name) const {
  auto it = std::find(axes_.begin(), axes_.end(), name);
  if (it == axes_.end()) throw UsageError("joint pmf: unknown axis '" + name + "'");
  return static_cast<std::size_t>(it - axes_.begin());
}

JointPmf JointPmf::marginal(const Axes& keep) const {
  std::vector<std::size_t> idx;
  std::vector<std::size_t> out_dims;
  for (const auto& k : keep) {
    idx.push_back(axis(k));
    out_dims.push_back(dims_[idx.back()]);
  }
  std::set<std::size_t> uniq(idx.begin(), idx.end());
  if (uniq.size() != idx.size()) throw UsageError("marginal: repeated axis");

  // Stride of each source axis inside the output tensor (0 if summed out).
  std::vector<std::size_t> out_stride(dims_.size(), 0);
  std::size_t s = 1;
  for (std::size_t k = idx.size(); k-- > 0;) {
    out_stride[idx[k]] = s;
    s *= out_dims[k];
  }
  std::vector<double> out(s, 0.0);
  std::vector<std::size_t> ctr(dims_.size(), 0);
  std::size_t pos = 0;
  for (std::size_t flat = 0; flat < p_.size(); ++flat) {
    out[pos] += p_[flat];
    for (std::size_t a = dims_.size(); a-- > 0;) {
      pos += out_stride[a];
      if (++ctr[a] < dims_[a]) break;
      pos -= out_stride[a] * dims_[a];
      ctr[a] = 0;
    }
  }
  // Summation noise must not trip validation.
  double tot = std::accumulate(out.begin(), out.end(), 0.0);
  for (double& v : out) v /= tot;
  return JointPmf(keep, out_dims, std::move(out));
}

double JointPmf::entropy(const Axes& group) const {
  if (group.empty()) return 0.0;
  return entropy_of(marginal(group).probs());
}

namespace {

void check_disjoint(const std::vector<const Axes*>& groups) {
  std::set<std::string> seen;
  for (const Axes* g : groups)
    for (const auto& a : *g)
      if (!seen.insert(a).second) throw UsageError("axis '" + a + "' appears in more than one group");
}

Axes cat(const Axes& a, const Axes& b) {
  Axes r = a;
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

}  // namespace

double mutual_information(const JointPmf& j, const Axes& a, const Axes& b) {
  if (a.empty() || b.empty()) throw UsageError("mutual_information: empty group");
  check_disjoint({&a, &b});
  double v = j.entropy(a) + j.entropy(b) - j.entropy(cat(a, b));
  return clamp_info(v, "I(A;B)");
}

double conditional_mi(const JointPmf& j, const Axes& a, const Axes& b, const Axes& c) {
  if (a.empty() || b.empty()) throw UsageError("conditional_mi: empty group");
  check_disjoint({&a, &b, &c});
  if (c.empty()) return mutual_information(j, a, b);
  double v = j.entropy(cat(a, c)) + j.entropy(cat(b, c)) - j.entropy(cat(cat(a, b), c)) - j.entropy(c);
  return clamp_info(v, "I(A;B|C)");
}

double conditional_entropy(const JointPmf& j, const Axes& b, const Axes& a) {
  check_disjoint({&a, &b});
  if (a.empty()) return j.entropy(b);
  JointPmf m = j.marginal(cat(a, b));
  std::size_t na = 1;
  for (std::size_t k = 0; k < a.size(); ++k) na *= m.dims()[k];
  std::size_t nb = m.probs().size() / na;
  double h = 0.0;
  for (std::size_t i = 0; i < na; ++i) {
    double pa = 0.0;
    for (std::size_t k = 0; k < nb; ++k) pa += m.probs()[i * nb + k];
    if (pa <= 0.0) continue;
    double hs = 0.0;
    for (std::size_t k = 0; k < nb; ++k) {
      double q = m.probs()[i * nb + k] / pa;
      if (q > 0.0) hs -= q * std::log2(q);
    }
    h += pa * hs;
  }
  return h;
}

}  // namespace bcsl
