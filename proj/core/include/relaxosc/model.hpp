#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace relaxosc {

/// Functional response families. All built-ins satisfy p(0) = 0, p'(0) > 0
/// and p > 0 on (0, K].
enum class ResponseFamily {
  HollingII,             // p = m x / (a + x)
  GeneralizedHollingIV,  // p = m x / (a x^2 + b x + 1), b > -2 sqrt(a)
  HollingIV,             // p = m x / (a x^2 + 1)
  Ivlev,                 // p = m (1 - exp(-a x))
  Log,                   // p = m log(1 + a x)
  Custom,                // user-supplied p and p'
};

struct CustomResponse {
  std::function<double(double)> p;
  std::function<double(double)> dp;
};

/// Predator-prey model with logistic prey growth r x (1 - x/K), predation
/// y p(x) and predator conversion c p(x). The predator death rate is a
/// separate small parameter supplied per simulation call; the singular
/// analysis (fast orbits, chi/lambda) does not depend on it.
struct ModelSpec {
  ResponseFamily family = ResponseFamily::HollingII;
  double r = 1.0;  // prey growth rate
  double K = 1.0;  // carrying capacity
  double c = 1.0;  // conversion efficiency
  double m = 1.0;  // response scale
  double a = 1.0;  // response shape
  double b = 0.0;  // GeneralizedHollingIV only
  CustomResponse custom;

  static ModelSpec holling2(double r, double K, double c, double m, double a);
  static ModelSpec generalized_holling4(double r, double K, double c, double m,
                                        double a, double b);
  static ModelSpec holling4(double r, double K, double c, double m, double a);
  static ModelSpec ivlev(double r, double K, double c, double m, double a);
  static ModelSpec log_response(double r, double K, double c, double m, double a);
  static ModelSpec custom_response(double r, double K, double c, CustomResponse fns);

  /// Throws std::invalid_argument on parameter domain violations
  /// (non-positive r, K, c, m; a <= 0 where required; b <= -2 sqrt(a)).
  void validate() const;
};

struct ResponseValue {
  double p;
  double dp;
};

/// phi(x) = p(x)/x extended continuously by phi(0) = p'(0). Derivatives are
/// with respect to x; ddphi is unavailable for Custom responses.
struct PhiValue {
  double phi;
  double dphi;
  double ddphi;
  bool ddphiValid;
};

struct IsoclineValue {
  double F;
  double dF;
  double ddF;
};

enum class HumpClass { Monotone, OneHump, TwoHump, Unsupported };

const char* to_string(HumpClass h);

/// Shape of the prey isocline F on (0, K): interior extrema and the derived
/// landmarks used by the root analysis.
///   xHat   - location of the local maximum (OneHump, TwoHump)
///   xCheck - location of the local minimum (TwoHump)
///   xBar   - smallest x > 0 with F(x) = F(0), past the first extremum
///   xTilde - point in (xHat, K) with F(xTilde) = F(xCheck) (TwoHump)
struct IsoclineShape {
  HumpClass humpClass = HumpClass::Unsupported;
  std::optional<double> xHat;
  std::optional<double> xCheck;
  std::optional<double> xBar;
  std::optional<double> xTilde;
  double fPrimeAtZero = 0.0;
  bool boundaryDegenerate = false;  // F'(0) numerically zero
  std::vector<std::string> notes;
};

ResponseValue response_eval(const ModelSpec& spec, double x);
PhiValue response_phi(const ModelSpec& spec, double x);

/// Prey isocline F(x) = r x (1 - x/K) / p(x) with the removable singularity
/// at x = 0 evaluated analytically: F(0) = r / p'(0). Derivatives are closed
/// forms for built-in families; Custom uses guarded central differences
/// (step 1e-6 K) for dF and ddF.
IsoclineValue isocline_eval(const ModelSpec& spec, double x);

/// ybar = F(0) = r / p'(0), the prey-axis limit of the isocline.
double ybar(const ModelSpec& spec);

/// Classifies the isocline by sign changes of F' on a uniform grid over
/// (1e-6 K, (1-1e-6) K), refining each extremum by bisection to tol*K.
/// Three or more extrema yield Unsupported. gridN >= 16 required.
IsoclineShape classify_isocline(const ModelSpec& spec, int gridN = 400,
                                double tol = 1e-12);

/// H(y) = y - ybar - ybar log(y / ybar): convex, minimum 0 at ybar,
/// divergent at 0+ and +inf. Requires y > 0.
double H_eval(const ModelSpec& spec, double y);

/// The conjugate ordinate on the opposite side of ybar with equal H value,
/// located by bisection to 1e-12 relative tolerance. H_conjugate(ybar) = ybar.
double H_conjugate(const ModelSpec& spec, double y);

}  // namespace relaxosc
