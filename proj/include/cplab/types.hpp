#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cplab {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

constexpr double kPi = 3.14159265358979323846;
inline constexpr Complex kI{0.0, 1.0};

/// Base error; `code()` is a stable machine-readable tag used by the CLI.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& msg)
      : std::runtime_error(code + ": " + msg), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define CPLAB_ERROR(Name)                                \
  struct Name : Error {                                  \
    explicit Name(const std::string& msg = "")           \
        : Error(#Name, msg) {}                           \
  }

CPLAB_ERROR(DimensionMismatch);
CPLAB_ERROR(NonFiniteInput);
CPLAB_ERROR(EigenvalueCollision);
CPLAB_ERROR(NonConvergence);
CPLAB_ERROR(SingularOperator);
CPLAB_ERROR(InvalidState);
CPLAB_ERROR(SingularSpectralPoint);
CPLAB_ERROR(StepFailure);
CPLAB_ERROR(ForbiddenTimePath);
CPLAB_ERROR(ForbiddenTime);
CPLAB_ERROR(EmptyTrajectory);
CPLAB_ERROR(ParticleCollision);
CPLAB_ERROR(OffOrbit);
CPLAB_ERROR(DegenerateScaling);
CPLAB_ERROR(GridMismatch);
CPLAB_ERROR(BranchDomain);
CPLAB_ERROR(RootSearchFailure);
CPLAB_ERROR(SingularQ);
CPLAB_ERROR(LatticePoint);
CPLAB_ERROR(ConfigError);

#undef CPLAB_ERROR

/// Throws NonFiniteInput if any entry of m is NaN/Inf.
void require_finite(const CMat& m, const char* what);

inline bool is_finite(Complex z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

}  // namespace cplab
