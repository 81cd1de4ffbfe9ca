#pragma once

#include <cstdint>
#include <random>

#include "bqds/cpmap.hpp"

namespace bqds {

// Deterministic random source.  The engine is std::mt19937_64 (fully
// specified by the standard); uniform and Gaussian sampling are hand-rolled
// so the stream does not depend on the standard library's distribution
// implementations.  Identical seeds give identical streams everywhere,
// which the CLI relies on for byte-identical reports.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform();
  // Uniform in [lo, hi).
  double uniform(double lo, double hi);
  // Uniform in [0, bound).
  std::uint64_t integer(std::uint64_t bound);
  // Standard normal via Box-Muller.
  double gaussian();
  // Standard complex normal, E|z|^2 = 1.
  cplx cgaussian();

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Entrywise complex Gaussian matrix, entries scaled by `scale`.
CMatrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols,
                      double scale = 1.0);
CMatrix random_hermitian(Rng& rng, std::size_t n);
// Unitary polar factor of a Gaussian matrix (Haar-like; exactly unitary up
// to the SVD's accuracy).
CMatrix random_unitary(Rng& rng, std::size_t n);
// rows >= cols; columns orthonormal.
CMatrix random_isometry(Rng& rng, std::size_t rows, std::size_t cols);
// Gaussian matrix rescaled to the requested operator norm.
CMatrix random_contraction(Rng& rng, std::size_t rows, std::size_t cols,
                           double norm);
// CP map M_n -> M_d with Choi rank r (generically).  Unital requires
// n*r >= d and gives phi(1) = 1 exactly; otherwise phi(1) <= 1 with
// operator norm ~0.9.
CpMap random_cp(Rng& rng, std::size_t n, std::size_t d, std::size_t r,
                bool unital);

}  // namespace bqds
