#include "bcsl/channel.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "bcsl/error.hpp"

namespace bcsl {

using nlohmann::json;

Channel3::Channel3(std::size_t nx, std::size_t ny1, std::size_t ny2, std::size_t ny3, std::vector<double> p)
    : nx_(nx), ny_{ny1, ny2, ny3}, p_(std::move(p)) {
  if (nx == 0 || ny1 == 0 || ny2 == 0 || ny3 == 0) throw ValidationError("channel: alphabet sizes must be >= 1");
  std::size_t row = ny1 * ny2 * ny3;
  if (p_.size() != nx * row) throw ValidationError("channel: tensor size does not match alphabet sizes");
  for (std::size_t x = 0; x < nx; ++x) {
    double s = 0.0;
    for (std::size_t k = 0; k < row; ++k) {
      double v = p_[x * row + k];
      if (!(v >= 0.0) || v > 1.0 + kNormTol) {
        std::ostringstream os;
        os << "channel: entry " << v << " outside [0,1] in row x=" << x;
        throw ValidationError(os.str());
      }
      s += v;
    }
    if (std::abs(s - 1.0) > kNormTol) {
      std::ostringstream os;
      os.precision(17);
      os << "channel: row x=" << x << " sums to " << s;
      throw ValidationError(os.str());
    }
  }
}

std::size_t Channel3::ny(int receiver) const {
  if (receiver < 1 || receiver > 3) throw UsageError("receiver id must be 1, 2 or 3");
  return ny_[receiver - 1];
}

std::vector<double> Channel3::marginal(int receiver) const {
  std::size_t n = ny(receiver);
  std::vector<double> w(nx_ * n, 0.0);
  for (std::size_t x = 0; x < nx_; ++x)
    for (std::size_t a = 0; a < ny_[0]; ++a)
      for (std::size_t b = 0; b < ny_[1]; ++b)
        for (std::size_t c = 0; c < ny_[2]; ++c) {
          std::size_t y = receiver == 1 ? a : receiver == 2 ? b : c;
          w[x * n + y] += at(x, a, b, c);
        }
  return w;
}

Channel3 Channel3::from_marginals(std::size_t nx, const std::vector<double>& w1, std::size_t ny1,
                                  const std::vector<double>& w2, std::size_t ny2,
                                  const std::vector<double>& w3, std::size_t ny3) {
  std::vector<double> p(nx * ny1 * ny2 * ny3);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t a = 0; a < ny1; ++a)
      for (std::size_t b = 0; b < ny2; ++b)
        for (std::size_t c = 0; c < ny3; ++c)
          p[((x * ny1 + a) * ny2 + b) * ny3 + c] = w1[x * ny1 + a] * w2[x * ny2 + b] * w3[x * ny3 + c];
  return Channel3(nx, ny1, ny2, ny3, std::move(p));
}

namespace {

std::size_t get_size(const json& j, const char* key) {
  if (!j.contains(key)) throw ValidationError(std::string("missing key '") + key + "'");
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 1)
    throw ValidationError(std::string("key '") + key + "' must be a positive integer");
  return v.get<std::size_t>();
}

// Flattens a nested array with the given shape; names the first bad path.
void flatten(const json& j, const std::vector<std::size_t>& shape, std::size_t depth, std::string path,
             std::vector<double>& out) {
  if (depth == shape.size()) {
    if (!j.is_number()) throw ValidationError("p" + path + " is not a number");
    out.push_back(j.get<double>());
    return;
  }
  if (!j.is_array() || j.size() != shape[depth]) {
    std::ostringstream os;
    os << "p" << path << " must be an array of length " << shape[depth];
    throw ValidationError(os.str());
  }
  for (std::size_t i = 0; i < j.size(); ++i)
    flatten(j[i], shape, depth + 1, path + "[" + std::to_string(i) + "]", out);
}

json nest(const std::vector<double>& p, const std::vector<std::size_t>& shape, std::size_t depth, std::size_t& pos) {
  json a = json::array();
  for (std::size_t i = 0; i < shape[depth]; ++i) {
    if (depth + 1 == shape.size())
      a.push_back(p[pos++]);
    else
      a.push_back(nest(p, shape, depth + 1, pos));
  }
  return a;
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

Channel3 channel_from_json(const std::string& text) {
  json j = parse(text);
  if (!j.is_object()) throw ValidationError("channel JSON must be an object");
  std::vector<std::size_t> shape{get_size(j, "nx"), get_size(j, "ny1"), get_size(j, "ny2"), get_size(j, "ny3")};
  if (!j.contains("p")) throw ValidationError("missing key 'p'");
  std::vector<double> p;
  flatten(j.at("p"), shape, 0, "", p);
  return Channel3(shape[0], shape[1], shape[2], shape[3], std::move(p));
}

std::string channel_to_json(const Channel3& ch) {
  std::size_t pos = 0;
  json j;
  j["nx"] = ch.nx();
  j["ny1"] = ch.ny1();
  j["ny2"] = ch.ny2();
  j["ny3"] = ch.ny3();
  j["p"] = nest(ch.probs(), {ch.nx(), ch.ny1(), ch.ny2(), ch.ny3()}, 0, pos);
  return j.dump(2);
}

AuxJoint::AuxJoint(std::size_t m1, std::size_t m2, std::size_t m3, std::size_t nx, std::vector<double> p)
    : m_{m1, m2, m3}, nx_(nx), p_(std::move(p)) {
  if (m1 == 0 || m2 == 0 || m3 == 0 || nx == 0) throw ValidationError("aux: alphabet sizes must be >= 1");
  if (p_.size() != m1 * m2 * m3 * nx) throw ValidationError("aux: tensor size does not match alphabet sizes");
  // Reuse the joint-pmf checks.
  (void)joint();
}

JointPmf AuxJoint::joint() const { return JointPmf({"U1", "U2", "U3", "X"}, {m_[0], m_[1], m_[2], nx_}, p_); }

AuxJoint AuxJoint::from_single(std::size_t mu, std::size_t nx, const std::vector<double>& pux) {
  if (pux.size() != mu * nx) throw UsageError("from_single: p(u,x) size mismatch");
  std::vector<double> p(mu * nx * mu * nx, 0.0);
  for (std::size_t u = 0; u < mu; ++u)
    for (std::size_t x = 0; x < nx; ++x) p[((u * nx + x) * mu + u) * nx + x] = pux[u * nx + x];
  return AuxJoint(mu, nx, mu, nx, std::move(p));
}

AuxJoint aux_from_json(const std::string& text) {
  json j = parse(text);
  if (!j.is_object()) throw ValidationError("aux JSON must be an object");
  std::vector<std::size_t> shape{get_size(j, "m1"), get_size(j, "m2"), get_size(j, "m3"), get_size(j, "nx")};
  if (!j.contains("p")) throw ValidationError("missing key 'p'");
  std::vector<double> p;
  flatten(j.at("p"), shape, 0, "", p);
  return AuxJoint(shape[0], shape[1], shape[2], shape[3], std::move(p));
}

std::string aux_to_json(const AuxJoint& aux) {
  std::size_t pos = 0;
  json j;
  j["m1"] = aux.m1();
  j["m2"] = aux.m2();
  j["m3"] = aux.m3();
  j["nx"] = aux.nx();
  j["p"] = nest(aux.probs(), {aux.m1(), aux.m2(), aux.m3(), aux.nx()}, 0, pos);
  return j.dump(2);
}

JointPmf induced_joint(const Channel3& ch, const AuxJoint& aux) {
  if (aux.nx() != ch.nx()) throw UsageError("induced_joint: aux X alphabet differs from channel input alphabet");
  std::size_t row = ch.ny1() * ch.ny2() * ch.ny3();
  std::size_t na = aux.probs().size();
  std::vector<double> p(na * row);
  for (std::size_t i = 0; i < na; ++i) {
    std::size_t x = i % aux.nx();
    double pa = aux.probs()[i];
    for (std::size_t k = 0; k < row; ++k) p[i * row + k] = pa * ch.probs()[x * row + k];
  }
  return JointPmf({"U1", "U2", "U3", "X", "Y1", "Y2", "Y3"},
                  {aux.m1(), aux.m2(), aux.m3(), aux.nx(), ch.ny1(), ch.ny2(), ch.ny3()}, std::move(p));
}

JointPmf input_output_joint(const std::vector<double>& px, const std::vector<double>& w, std::size_t ny) {
  std::size_t nx = px.size();
  std::vector<double> p(nx * ny);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) p[x * ny + y] = px[x] * w[x * ny + y];
  return JointPmf({"X", "Y"}, {nx, ny}, std::move(p));
}

}  // namespace bcsl
