#include "qmetro/expm.hpp"

#include <array>
#include <cmath>

namespace qmetro {
namespace {

constexpr std::array<double, 4> kPade3 = {120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kPade5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> kPade7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                          25200.0,    1512.0,    56.0,      1.0};
constexpr std::array<double, 10> kPade9 = {
    17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
    2162160.0,     110880.0,     3960.0,       90.0,        1.0};
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0,  129060195264000.0,   10559470521600.0,
    670442572800.0,      33522128640.0,       1323241920.0,
    40840800.0,          960960.0,            16380.0,
    182.0,               1.0};

// Largest 1-norm for which each degree meets unit roundoff.
constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

template <typename M>
double norm1(const M& a) {
  return a.cwiseAbs().colwise().sum().maxCoeff();
}

// Low-degree approximant: U = A sum b_{2k+1} A^{2k}, V = sum b_{2k} A^{2k}.
template <typename M, std::size_t N>
void pade_low(const M& a, const std::array<double, N>& b, M& u, M& v) {
  const M id = M::Identity(a.rows(), a.cols());
  const M a2 = a * a;
  M power = id;
  M uodd = b[1] * id;
  v = b[0] * id;
  for (std::size_t k = 2; k + 1 < N + 1; k += 2) {
    power = power * a2;
    v += b[k] * power;
    if (k + 1 < N) uodd += b[k + 1] * power;
  }
  u = a * uodd;
}

template <typename M>
void pade13(const M& a, M& u, M& v) {
  const auto& b = kPade13;
  const M id = M::Identity(a.rows(), a.cols());
  const M a2 = a * a;
  const M a4 = a2 * a2;
  const M a6 = a4 * a2;
  const M inner_u = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2);
  u = a * (inner_u + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 +
      b[0] * id;
}

template <typename M>
M expm_impl(const M& a) {
  if (a.rows() != a.cols()) fail(ErrorCode::InvalidArgument, "expm: matrix must be square");
  if (!a.allFinite()) fail(ErrorCode::Numerical, "expm: non-finite input");

  const double nrm = norm1(a);
  M u, v;
  int squarings = 0;
  if (nrm <= kTheta3) {
    pade_low(a, kPade3, u, v);
  } else if (nrm <= kTheta5) {
    pade_low(a, kPade5, u, v);
  } else if (nrm <= kTheta7) {
    pade_low(a, kPade7, u, v);
  } else if (nrm <= kTheta9) {
    pade_low(a, kPade9, u, v);
  } else {
    squarings = std::max(0, static_cast<int>(std::ceil(std::log2(nrm / kTheta13))));
    const M scaled = a / std::ldexp(1.0, squarings);
    pade13(scaled, u, v);
  }

  M result = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) result = result * result;
  if (!result.allFinite()) fail(ErrorCode::Numerical, "expm: non-finite result");
  return result;
}

}  // namespace

ComplexMatrix expm(const ComplexMatrix& a) { return expm_impl(a); }
Mat16 expm(const Mat16& a) { return expm_impl(a); }
RealMat16 expm(const RealMat16& a) { return expm_impl(a); }

}  // namespace qmetro
