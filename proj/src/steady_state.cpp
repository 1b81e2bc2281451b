// Numerical steady state of the Lambda-system master equation.
//
// Model: |3> decays to |1> and |2> at rate gamma each (total 2 gamma), the
// optical coherences decay at gamma and the ground-state coherence at
// big_gamma. In the frame rotating with both fields
//   H = Delta1 |3><3| + (Delta1 - Delta2) |2><2| - (g |3><1| + G |3><2| + h.c.).
// This is the model the closed-form coefficients in medium.cpp solve exactly.

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/eigen.hpp>

#include "cptclone/error.hpp"
#include "cptclone/medium.hpp"

namespace cptclone {

namespace {

template <typename T>
struct Mat3 {
  std::array<T, 9> re{};
  std::array<T, 9> im{};
  T& r(int i, int j) { return re[i * 3 + j]; }
  T& i(int i, int j) { return im[i * 3 + j]; }
  const T& r(int i, int j) const { return re[i * 3 + j]; }
  const T& i(int i, int j) const { return im[i * 3 + j]; }
};

template <typename T>
Mat3<T> hamiltonian(const MediumParams& p, const FieldPoint& f) {
  Mat3<T> h;
  h.r(1, 1) = T(p.delta1) - T(p.delta2);
  h.r(2, 2) = T(p.delta1);
  h.r(2, 0) = -T(f.g.real());
  h.i(2, 0) = -T(f.g.imag());
  h.r(0, 2) = -T(f.g.real());
  h.i(0, 2) = T(f.g.imag());
  h.r(2, 1) = -T(f.G.real());
  h.i(2, 1) = -T(f.G.imag());
  h.r(1, 2) = -T(f.G.real());
  h.i(1, 2) = T(f.G.imag());
  return h;
}

template <typename T>
Mat3<T> apply(const MediumParams& p, const Mat3<T>& h, const Mat3<T>& rho) {
  // c = H rho - rho H
  Mat3<T> c;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      T cr = 0, ci = 0;
      for (int k = 0; k < 3; ++k) {
        cr += h.r(a, k) * rho.r(k, b) - h.i(a, k) * rho.i(k, b);
        ci += h.r(a, k) * rho.i(k, b) + h.i(a, k) * rho.r(k, b);
        cr -= rho.r(a, k) * h.r(k, b) - rho.i(a, k) * h.i(k, b);
        ci -= rho.r(a, k) * h.i(k, b) + rho.i(a, k) * h.r(k, b);
      }
      c.r(a, b) = cr;
      c.i(a, b) = ci;
    }
  // -i c
  Mat3<T> out;
  for (int k = 0; k < 9; ++k) {
    out.re[k] = c.im[k];
    out.im[k] = -c.re[k];
  }
  const T gm(p.gamma);
  const T gg(p.big_gamma);
  auto decay = [&](int a, int b, const T& rate) {
    out.r(a, b) -= rate * rho.r(a, b);
    out.i(a, b) -= rate * rho.i(a, b);
  };
  decay(2, 2, 2 * gm);
  out.r(0, 0) += gm * rho.r(2, 2);
  out.r(1, 1) += gm * rho.r(2, 2);
  decay(2, 0, gm);
  decay(0, 2, gm);
  decay(2, 1, gm);
  decay(1, 2, gm);
  decay(1, 0, gg);
  decay(0, 1, gg);
  return out;
}

// Real coordinates of a Hermitian 3x3 matrix:
// (s11, s22, s33, Re s21, Im s21, Re s31, Im s31, Re s32, Im s32).
constexpr std::array<std::pair<int, int>, 3> kOffDiagonal{{{1, 0}, {2, 0}, {2, 1}}};

template <typename T>
Mat3<T> from_coords(const std::array<T, 9>& c) {
  Mat3<T> m;
  for (int k = 0; k < 3; ++k) m.r(k, k) = c[k];
  for (int n = 0; n < 3; ++n) {
    auto [a, b] = kOffDiagonal[n];
    m.r(a, b) = c[3 + 2 * n];
    m.i(a, b) = c[4 + 2 * n];
    m.r(b, a) = c[3 + 2 * n];
    m.i(b, a) = -c[4 + 2 * n];
  }
  return m;
}

template <typename T>
std::array<T, 9> to_coords(const Mat3<T>& m) {
  std::array<T, 9> c{};
  for (int k = 0; k < 3; ++k) c[k] = m.r(k, k);
  for (int n = 0; n < 3; ++n) {
    auto [a, b] = kOffDiagonal[n];
    c[3 + 2 * n] = m.r(a, b);
    c[4 + 2 * n] = m.i(a, b);
  }
  return c;
}

}  // namespace

std::array<complex, 9> liouvillian_rate(const MediumParams& params, const FieldPoint& f,
                                        const std::array<complex, 9>& rho) {
  Mat3<double> r;
  for (int k = 0; k < 9; ++k) {
    r.re[k] = rho[k].real();
    r.im[k] = rho[k].imag();
  }
  const auto out = apply(params, hamiltonian<double>(params, f), r);
  std::array<complex, 9> result;
  for (int k = 0; k < 9; ++k) result[k] = {out.re[k], out.im[k]};
  return result;
}

SteadyStateDM steady_state_oracle(const MediumParams& params, const FieldPoint& f) {
  using Quad = boost::multiprecision::cpp_bin_float_quad;
  using Matrix = Eigen::Matrix<Quad, 9, 9>;
  using Vector = Eigen::Matrix<Quad, 9, 1>;

  const auto h = hamiltonian<Quad>(params, f);
  Matrix a;
  for (int col = 0; col < 9; ++col) {
    std::array<Quad, 9> unit{};
    unit[col] = 1;
    const auto image = to_coords(apply(params, h, from_coords(unit)));
    for (int row = 0; row < 9; ++row) a(row, col) = image[row];
  }
  // The three population rates sum to zero; swap the first for the trace.
  Vector rhs = Vector::Zero();
  for (int col = 0; col < 9; ++col) a(0, col) = col < 3 ? 1 : 0;
  rhs(0) = 1;

  Eigen::FullPivLU<Matrix> lu(a);
  if (lu.rank() < 9)
    throw Error(Errc::non_unique_steady_state,
                "steady state is not unique for these fields (no optical pumping)");
  const Vector x = lu.solve(rhs);

  std::array<Quad, 9> coords;
  for (int k = 0; k < 9; ++k) coords[k] = x(k);
  const auto m = from_coords(coords);
  std::array<complex, 9> rho;
  for (int k = 0; k < 9; ++k)
    rho[k] = {static_cast<double>(m.re[k]), static_cast<double>(m.im[k])};
  return SteadyStateDM(rho);
}

}  // namespace cptclone
