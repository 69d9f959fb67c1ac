#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace tcorr {

using Seq = std::vector<int>;

inline std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

// Packed index of a symbol sequence, first symbol most significant.
inline std::size_t pack(const Seq& s, int alphabet) {
  std::size_t idx = 0;
  for (int v : s) {
    if (v < 0 || v >= alphabet) throw std::out_of_range("symbol outside alphabet");
    idx = idx * alphabet + static_cast<std::size_t>(v);
  }
  return idx;
}

inline Seq unpack(std::size_t idx, int alphabet, int length) {
  Seq s(length);
  for (int k = length - 1; k >= 0; --k) {
    s[k] = static_cast<int>(idx % alphabet);
    idx /= alphabet;
  }
  return s;
}

// Dense joint distribution p(as|xs) for sequences of fixed length.
// Rows: packed input sequence, columns: packed output sequence.
struct CorrelationTable {
  int n_inputs = 2;
  int n_outputs = 2;
  int length = 0;
  Eigen::MatrixXd p;

  CorrelationTable() = default;
  CorrelationTable(int ni, int no, int L)
      : n_inputs(ni), n_outputs(no), length(L),
        p(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(ipow(ni, L)),
                                static_cast<Eigen::Index>(ipow(no, L)))) {}

  double& at(const Seq& xs, const Seq& as) {
    return p(static_cast<Eigen::Index>(pack(xs, n_inputs)),
             static_cast<Eigen::Index>(pack(as, n_outputs)));
  }
  double at(const Seq& xs, const Seq& as) const {
    return p(static_cast<Eigen::Index>(pack(xs, n_inputs)),
             static_cast<Eigen::Index>(pack(as, n_outputs)));
  }

  std::size_t num_input_seqs() const { return ipow(n_inputs, length); }
  std::size_t num_output_seqs() const { return ipow(n_outputs, length); }
};

}  // namespace tcorr
