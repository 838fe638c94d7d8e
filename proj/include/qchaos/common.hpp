// Shared numeric types and the error hierarchy used across qchaos.
#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qchaos {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Dense N x N operators are only built up to this register size.
inline constexpr int kMaxDenseQubits = 12;

/// Invalid parameters or indices supplied by a caller.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A documented precondition on an argument did not hold.
struct ContractError : std::logic_error {
  using std::logic_error::logic_error;
};

/// A numerical routine failed or missed its residual target.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The requested problem exceeds the memory budget.
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A search (threshold crossing, bracket) found nothing in the given range.
struct RangeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Sample too small for the requested statistic.
struct StatisticalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A requested output artifact is not present in a run record.
struct NotFoundError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bit mask of qubit q (1-based) in a register of n_q qubits; qubit 1 is the
/// most significant bit of the basis index.
constexpr std::size_t qubit_mask(int n_qubits, int q) {
  return std::size_t{1} << (n_qubits - q);
}

constexpr std::size_t bit_reverse(std::size_t index, int n_bits) {
  std::size_t out = 0;
  for (int b = 0; b < n_bits; ++b) {
    out = (out << 1) | (index & 1U);
    index >>= 1;
  }
  return out;
}

}  // namespace qchaos
