#include "bqds/random.hpp"

#include <cmath>

#include "bqds/errors.hpp"
#include "bqds/numerics.hpp"

namespace bqds {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double Rng::uniform() {
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

std::uint64_t Rng::integer(std::uint64_t bound) {
  if (bound == 0) throw Error(ErrorKind::InvalidConfig, "integer(0)");
  return gen_() % bound;
}

double Rng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u = 1.0 - uniform();  // (0, 1]
  const double v = uniform();
  const double r = std::sqrt(-2.0 * std::log(u));
  const double a = 2.0 * kPi * v;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

cplx Rng::cgaussian() {
  const double re = gaussian();
  const double im = gaussian();
  return cplx{re, im} * std::sqrt(0.5);
}

CMatrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols,
                      double scale) {
  CMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = scale * rng.cgaussian();
  return m;
}

CMatrix random_hermitian(Rng& rng, std::size_t n) {
  CMatrix a = random_matrix(rng, n, n);
  CMatrix h = a + a.adjoint();
  h *= cplx{0.5, 0.0};
  return h;
}

CMatrix random_unitary(Rng& rng, std::size_t n) {
  const CMatrix a = random_matrix(rng, n, n);
  const SvdResult sv = svd(a);
  return sv.u * sv.v.adjoint();
}

CMatrix random_isometry(Rng& rng, std::size_t rows, std::size_t cols) {
  if (rows < cols)
    throw Error(ErrorKind::ShapeMismatch, "isometry needs rows >= cols");
  const CMatrix a = random_matrix(rng, rows, cols);
  const SvdResult sv = svd(a);
  return sv.u * sv.v.adjoint();
}

CMatrix random_contraction(Rng& rng, std::size_t rows, std::size_t cols,
                           double norm) {
  CMatrix a = random_matrix(rng, rows, cols);
  const double s = operator_norm(a);
  if (s == 0.0) return a;
  a *= cplx{norm / s, 0.0};
  return a;
}

CpMap random_cp(Rng& rng, std::size_t n, std::size_t d, std::size_t r,
                bool unital) {
  if (n == 0 || d == 0 || r == 0)
    throw Error(ErrorKind::InvalidConfig, "random_cp: zero dimension");
  std::vector<CMatrix> kraus;
  kraus.reserve(r);
  if (unital) {
    if (n * r < d)
      throw Error(ErrorKind::InvalidConfig,
                  "random_cp: unital needs n*r >= d");
    // Stack [K_1; ...; K_r] as an (n r) x d isometry so sum K_i^* K_i = 1.
    const CMatrix w = random_isometry(rng, n * r, d);
    for (std::size_t i = 0; i < r; ++i) kraus.push_back(w.block(i * n, 0, n, d));
  } else {
    CMatrix stack(n * r, d);
    for (std::size_t i = 0; i < r; ++i)
      stack.set_block(i * n, 0, random_matrix(rng, n, d));
    const double s = operator_norm(stack);
    const cplx scale{s > 0.0 ? 0.9 / s : 1.0, 0.0};
    for (std::size_t i = 0; i < r; ++i) {
      CMatrix k = stack.block(i * n, 0, n, d);
      k *= scale;
      kraus.push_back(std::move(k));
    }
  }
  return CpMap::from_kraus(n, d, kraus);
}

}  // namespace bqds
