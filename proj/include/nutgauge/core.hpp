#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace nutgauge {

using Vec3 = std::array<double, 3>;
using Vec4 = std::array<double, 4>;
using Mat4 = std::array<std::array<double, 4>, 4>;
using cplx = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0]+b[0], a[1]+b[1], a[2]+b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0]-b[0], a[1]-b[1], a[2]-b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s*a[0], s*a[1], s*a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0]*b[0]+a[1]*b[1]+a[2]*b[2]; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1]*b[2]-a[2]*b[1], a[2]*b[0]-a[0]*b[2], a[0]*b[1]-a[1]*b[0]};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

/// Imaginary quaternion (i, j, k components); the su(2) values of gauge fields.
struct ImQuat {
  double x = 0, y = 0, z = 0;
  ImQuat& operator+=(const ImQuat& o) { x += o.x; y += o.y; z += o.z; return *this; }
  ImQuat& operator-=(const ImQuat& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  ImQuat& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
  double norm2() const { return x*x + y*y + z*z; }
};
inline ImQuat operator+(ImQuat a, const ImQuat& b) { return a += b; }
inline ImQuat operator-(ImQuat a, const ImQuat& b) { return a -= b; }
inline ImQuat operator*(double s, ImQuat a) { return a *= s; }
/// Commutator [p,q] = pq - qp = 2 p x q for imaginary quaternions.
inline ImQuat commutator(const ImQuat& p, const ImQuat& q) {
  return {2*(p.y*q.z - p.z*q.y), 2*(p.z*q.x - p.x*q.z), 2*(p.x*q.y - p.y*q.x)};
}

/// Full quaternion w + xi + yj + zk.
struct Quat {
  double w = 0, x = 0, y = 0, z = 0;
};
inline Quat qmul(const Quat& p, const Quat& q) {
  return {p.w*q.w - p.x*q.x - p.y*q.y - p.z*q.z,
          p.w*q.x + p.x*q.w + p.y*q.z - p.z*q.y,
          p.w*q.y - p.x*q.z + p.y*q.w + p.z*q.x,
          p.w*q.z + p.x*q.y - p.y*q.x + p.z*q.w};
}
inline ImQuat im(const Quat& q) { return {q.x, q.y, q.z}; }

// ---- error taxonomy ----

struct Error : std::runtime_error {
  explicit Error(const std::string& m) : std::runtime_error(m) {}
};
struct EvaluationAtNut : Error { using Error::Error; };
struct OnDiracString : Error { using Error::Error; };
struct DegenerateFrame : Error { using Error::Error; };
struct StepTooLarge : Error { using Error::Error; };
struct BudgetExceeded : Error { using Error::Error; };
struct SourceCoincidence : Error { using Error::Error; };
struct PoleProximity : Error { using Error::Error; };
struct NoBoundedSolution : Error { using Error::Error; };
struct StiffnessFailure : Error { using Error::Error; };
struct RealityViolation : Error { using Error::Error; };
struct StencilCrossesSingularity : Error { using Error::Error; };
struct NonConvergentQuadrature : Error { using Error::Error; };
struct InsufficientRange : Error { using Error::Error; };
struct DegenerateDirection : Error { using Error::Error; };
struct ChartMismatch : Error { using Error::Error; };
struct DivisionRemainderNonzero : Error { using Error::Error; };
struct NonGenericConfiguration : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };

/// Richardson extrapolation of a second-order central-difference quantity:
/// given values at step h and h/2, the h^2 error term cancels.
inline double richardson2(double v_h, double v_h2) { return (4.0*v_h2 - v_h)/3.0; }

}  // namespace nutgauge
