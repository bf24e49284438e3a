#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace exkin {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Numerical-failure conditions that map to CLI exit code 2.
class NumericalFailure : public std::runtime_error {
 public:
  explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

class NonOrthogonalRHS : public NumericalFailure {
 public:
  explicit NonOrthogonalRHS(const std::string& what) : NumericalFailure(what) {}
};

class NonContraction : public NumericalFailure {
 public:
  explicit NonContraction(const std::string& what) : NumericalFailure(what) {}
};

class DivergentNorm : public NumericalFailure {
 public:
  explicit DivergentNorm(const std::string& what) : NumericalFailure(what) {}
};

class ModeSingular : public NumericalFailure {
 public:
  explicit ModeSingular(const std::string& what) : NumericalFailure(what) {}
};

class MaxSweepsExceeded : public NumericalFailure {
 public:
  MaxSweepsExceeded(const std::string& what, double residual)
      : NumericalFailure(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// Configuration / input errors map to CLI exit code 1.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

inline double sqr(double x) { return x * x; }

// <v> = (1 + |v|^2)^{1/2}
inline double vbracket(const Vec3& v) { return std::sqrt(1.0 + v.squaredNorm()); }

// least-squares slope of y against x
inline double fit_slope(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const double n = static_cast<double>(x.size());
  const double mx = x.mean(), my = y.mean();
  double num = 0, den = 0;
  for (int i = 0; i < x.size(); ++i) {
    num += (x[i] - mx) * (y[i] - my);
    den += sqr(x[i] - mx);
  }
  return num / den;
}

}  // namespace exkin
