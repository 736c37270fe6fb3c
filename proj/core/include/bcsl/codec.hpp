#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bcsl/channel.hpp"

namespace bcsl {

// Per-use rates in bits. Field names match the JSON config keys.
struct CodeConfig {
  int n = 1;
  double R0 = 0, R1e = 0, R1p = 0, R1d = 0;  // R1p: randomization R1', R1d: pairing slack R1 dagger
  double Q2 = 0, Q3 = 0, P3 = 0, P3d = 0;
  double P1e = 0, P1p = 0;
  double eps = 0.1;  // strong-typicality slack
  std::uint64_t seed = 0;
  std::size_t max_symbols = std::size_t{1} << 24;  // stored codeword symbols across all layers
  int max_tries = 20000;                           // rejection-sampling cap per codeword
};

CodeConfig config_from_json(const std::string& text);
std::string config_to_json(const CodeConfig& c);

// floor(2^(n*rate)), at least 1.
std::size_t set_size(int n, double rate);

// Checks the bin-pairing rows against the auxiliary's I(U2;U3|U1). The strict
// pairing row is checked in closure form (>=), matching the all-zero-rate code.
void validate_config(const CodeConfig& cfg, const AuxJoint& aux);

using Seq = std::vector<std::uint8_t>;

// Strong typicality of a tuple of sequences against a joint pmf over the same axes
// (row-major, first sequence slowest): |N(a) - n p(a)| <= eps n p(a), N(a) = 0 when p(a) = 0.
bool jointly_typical(const std::vector<const Seq*>& seqs, const std::vector<std::size_t>& dims,
                     const std::vector<double>& p, double eps);

struct Codebook {
  CodeConfig cfg;
  AuxJoint aux{1, 1, 1, 1, {1.0}};
  int n = 1;
  std::size_t N0 = 1, N1e = 1, N1p = 1, N1d = 1, N3 = 1, N3d = 1, NP1e = 1, NP1p = 1;

  std::vector<Seq> u1;  // [w0]
  std::vector<Seq> u2;  // [w0][q2], q2 = (w1*N1p + w1p)*N1d + w1d
  std::vector<Seq> u3;  // [w0][q3], q3 = p3*N3d + p3d
  // Per product bin (w0,w1,w1p,p3): selected w1d and p3d, -1 when no typical pair exists.
  std::vector<int> sel_d2, sel_d3;
  std::vector<Seq> x;  // [bin][p1][p1p]; empty when the bin failed to pair

  std::size_t NQ2() const { return N1e * N1p * N1d; }
  std::size_t NQ3() const { return N3 * N3d; }
  std::size_t NW2() const { return NP1e * N3; }
  std::size_t bins() const { return N0 * N1e * N1p * N3; }
  std::size_t q2(std::size_t w1, std::size_t w1p, std::size_t w1d) const { return (w1 * N1p + w1p) * N1d + w1d; }
  std::size_t q3(std::size_t p3, std::size_t p3d) const { return p3 * N3d + p3d; }
  std::size_t bin(std::size_t w0, std::size_t w1, std::size_t w1p, std::size_t p3) const {
    return ((w0 * N1e + w1) * N1p + w1p) * N3 + p3;
  }
  std::size_t xi(std::size_t b, std::size_t p1, std::size_t p1p) const { return (b * NP1e + p1) * NP1p + p1p; }
  const Seq& U2(std::size_t w0, std::size_t q) const { return u2[w0 * NQ2() + q]; }
  const Seq& U3(std::size_t w0, std::size_t q) const { return u3[w0 * NQ3() + q]; }

  double pairing_failure_fraction() const;
  // Throws UsageError if index arithmetic or alphabets are inconsistent.
  void check() const;
};

Codebook build_codebook(const CodeConfig& cfg, const AuxJoint& aux);

struct Encoded {
  Seq x;
  std::size_t w1p = 0, p1p = 0;
};

// Stochastic encoder: randomization indices come from (seed, encoder stream, nonce).
Encoded encode(const Codebook& cb, std::size_t w0, std::size_t w1, std::size_t w2, std::uint64_t nonce);

// -1 marks a declared error (no or several candidates).
struct Decoded {
  long w0_1 = -1, w1_1 = -1, w2_1 = -1;
  long w0_2 = -1, w1_2 = -1;
  long w0_3 = -1;
};

// Decoding needs the channel to form the output joint pmfs.
class Decoder {
 public:
  Decoder(const Codebook& cb, const Channel3& ch);
  Decoded decode(const Seq& y1, const Seq& y2, const Seq& y3) const;

 private:
  struct Table {
    std::vector<std::size_t> dims;
    std::vector<double> p;
  };
  const Codebook& cb_;
  Table t1_, t2a_, t2b_, t3_;
};

Decoded decode_all(const Codebook& cb, const Channel3& ch, const Seq& y1, const Seq& y2, const Seq& y3);

struct Interval {
  double lo = 0, hi = 0;
};

struct SimReport {
  std::size_t trials = 0;
  std::size_t errors[3] = {0, 0, 0};
  double pe[3] = {0, 0, 0};
  Interval ci[3];
  double pairing_failure_fraction = 0;  // over product bins
  std::size_t encode_failures = 0;      // trials that hit an unpaired bin
  double wall_seconds = 0;              // reported in the run manifest, not the primary output
};

// Wilson score interval at 95%.
Interval wilson(std::size_t k, std::size_t n);

SimReport simulate(const CodeConfig& cfg, const AuxJoint& aux, const Channel3& ch, std::size_t trials,
                   std::uint64_t seed, int threads = 1);
SimReport simulate(const Codebook& cb, const Channel3& ch, std::size_t trials, std::uint64_t seed,
                   int threads = 1);

struct EquivocationReport {
  int n = 1;
  double h_w1 = 0, h_w2 = 0;
  double h_w1_y3 = 0, h_w2_y3 = 0, h_w12_y3 = 0;
  double rate_w1_y3() const { return h_w1_y3 / n; }
  double rate_w2_y3() const { return h_w2_y3 / n; }
  double rate_w12_y3() const { return h_w12_y3 / n; }
};

inline constexpr std::size_t kEnumCap = std::size_t{1} << 20;

EquivocationReport exact_equivocation(const Codebook& cb, const Channel3& ch, int threads = 1,
                                      std::size_t cap = kEnumCap);

struct StudyRow {
  std::size_t config = 0;
  std::uint64_t seed = 0;
  int n = 0;
  double R1p = 0, P1p = 0;
  double R1e_actual = 0, R2e_actual = 0;  // log2 of the realized set sizes over n
  double e1 = 0, e2 = 0, e12 = 0;          // normalized equivocations
  double gap1 = 0, gap2 = 0, gap12 = 0;    // realized rate minus equivocation rate
};

std::vector<StudyRow> secrecy_gap_study(const std::vector<CodeConfig>& grid, const AuxJoint& aux,
                                        const Channel3& ch, const std::vector<std::uint64_t>& seeds,
                                        int threads = 1);
std::string study_csv(const std::vector<StudyRow>& rows);

std::string sim_report_to_json(const SimReport& r);
std::string equivocation_to_json(const EquivocationReport& r);

}  // namespace bcsl
