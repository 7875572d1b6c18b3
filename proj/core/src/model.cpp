#include "relaxosc/model.hpp"

#include <cmath>
#include <stdexcept>

#include "relaxosc/util.hpp"

namespace relaxosc {
namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// Bisection for a continuous f with f(a) f(b) <= 0, to interval width tol.
template <class F>
double bisect(F&& f, double a, double b, double fa, double fb, double tol) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  while (b - a > tol) {
    double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fa < 0.0) == (fm < 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
      fb = fm;
    }
  }
  return 0.5 * (a + b);
}

// phi, phi', phi'' for phi(u)/scale = sum_k coef(k) u^k, truncated at kMax.
struct SeriesTerm {
  double phi, dphi, ddphi;
};

template <class Coef>
SeriesTerm eval_series(double u, int kMax, Coef&& coef) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  double pk = 1.0, pk1 = 0.0, pk2 = 0.0;  // u^k, u^{k-1}, u^{k-2}
  for (int k = 0; k <= kMax; ++k) {
    double ck = coef(k);
    s0 += ck * pk;
    s1 += ck * k * pk1;
    s2 += ck * k * (k - 1) * pk2;
    pk2 = pk1;
    pk1 = pk;
    pk *= u;
  }
  return {s0, s1, s2};
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

ModelSpec ModelSpec::holling2(double r, double K, double c, double m, double a) {
  ModelSpec s;
  s.family = ResponseFamily::HollingII;
  s.r = r; s.K = K; s.c = c; s.m = m; s.a = a;
  s.validate();
  return s;
}

ModelSpec ModelSpec::generalized_holling4(double r, double K, double c, double m,
                                          double a, double b) {
  ModelSpec s;
  s.family = ResponseFamily::GeneralizedHollingIV;
  s.r = r; s.K = K; s.c = c; s.m = m; s.a = a; s.b = b;
  s.validate();
  return s;
}

ModelSpec ModelSpec::holling4(double r, double K, double c, double m, double a) {
  ModelSpec s;
  s.family = ResponseFamily::HollingIV;
  s.r = r; s.K = K; s.c = c; s.m = m; s.a = a;
  s.validate();
  return s;
}

ModelSpec ModelSpec::ivlev(double r, double K, double c, double m, double a) {
  ModelSpec s;
  s.family = ResponseFamily::Ivlev;
  s.r = r; s.K = K; s.c = c; s.m = m; s.a = a;
  s.validate();
  return s;
}

ModelSpec ModelSpec::log_response(double r, double K, double c, double m, double a) {
  ModelSpec s;
  s.family = ResponseFamily::Log;
  s.r = r; s.K = K; s.c = c; s.m = m; s.a = a;
  s.validate();
  return s;
}

ModelSpec ModelSpec::custom_response(double r, double K, double c, CustomResponse fns) {
  ModelSpec s;
  s.family = ResponseFamily::Custom;
  s.r = r; s.K = K; s.c = c;
  s.custom = std::move(fns);
  s.validate();
  return s;
}

void ModelSpec::validate() const {
  require(std::isfinite(r) && r > 0.0, "r must be positive");
  require(std::isfinite(K) && K > 0.0, "K must be positive");
  require(std::isfinite(c) && c > 0.0, "c must be positive");
  switch (family) {
    case ResponseFamily::HollingII:
    case ResponseFamily::HollingIV:
    case ResponseFamily::Ivlev:
    case ResponseFamily::Log:
      require(std::isfinite(m) && m > 0.0, "m must be positive");
      require(std::isfinite(a) && a > 0.0, "a must be positive");
      break;
    case ResponseFamily::GeneralizedHollingIV:
      require(std::isfinite(m) && m > 0.0, "m must be positive");
      require(std::isfinite(a) && a > 0.0, "a must be positive");
      require(std::isfinite(b) && b > -2.0 * std::sqrt(a),
              "b must exceed -2 sqrt(a) to keep the response positive");
      break;
    case ResponseFamily::Custom:
      require(static_cast<bool>(custom.p) && static_cast<bool>(custom.dp),
              "custom response requires p and dp callables");
      require(custom.dp(0.0) > 0.0, "custom response requires p'(0) > 0");
      break;
  }
}

ResponseValue response_eval(const ModelSpec& spec, double x) {
  switch (spec.family) {
    case ResponseFamily::HollingII: {
      double d = spec.a + x;
      return {spec.m * x / d, spec.m * spec.a / (d * d)};
    }
    case ResponseFamily::GeneralizedHollingIV:
    case ResponseFamily::HollingIV: {
      double b = spec.family == ResponseFamily::HollingIV ? 0.0 : spec.b;
      double s = spec.a * x * x + b * x + 1.0;
      return {spec.m * x / s, spec.m * (1.0 - spec.a * x * x) / (s * s)};
    }
    case ResponseFamily::Ivlev: {
      double u = spec.a * x;
      return {-spec.m * std::expm1(-u), spec.m * spec.a * std::exp(-u)};
    }
    case ResponseFamily::Log: {
      double u = spec.a * x;
      return {spec.m * std::log1p(u), spec.m * spec.a / (1.0 + u)};
    }
    case ResponseFamily::Custom:
      return {spec.custom.p(x), spec.custom.dp(x)};
  }
  throw std::logic_error("unreachable");
}

PhiValue response_phi(const ModelSpec& spec, double x) {
  const double m = spec.m, a = spec.a;
  switch (spec.family) {
    case ResponseFamily::HollingII: {
      double d = a + x;
      return {m / d, -m / (d * d), 2.0 * m / (d * d * d), true};
    }
    case ResponseFamily::GeneralizedHollingIV:
    case ResponseFamily::HollingIV: {
      double b = spec.family == ResponseFamily::HollingIV ? 0.0 : spec.b;
      double s = a * x * x + b * x + 1.0;
      double s1 = 2.0 * a * x + b, s2 = 2.0 * a;
      double phi = m / s;
      double dphi = -m * s1 / (s * s);
      double ddphi = m * (2.0 * s1 * s1 - s * s2) / (s * s * s);
      return {phi, dphi, ddphi, true};
    }
    case ResponseFamily::Ivlev: {
      double u = a * x;
      if (std::abs(u) < 0.25) {
        // (1 - e^{-u})/u = sum (-1)^k u^k / (k+1)!
        auto t = eval_series(u, 12, [](int k) {
          return ((k % 2) ? -1.0 : 1.0) / factorial(k + 1);
        });
        return {m * a * t.phi, m * a * a * t.dphi, m * a * a * a * t.ddphi, true};
      }
      double g = -std::expm1(-u), g1 = a * std::exp(-u), g2 = -a * g1;
      double phi = m * g / x;
      double dphi = m * (g1 * x - g) / (x * x);
      double ddphi = m * (g2 * x * x - 2.0 * g1 * x + 2.0 * g) / (x * x * x);
      return {phi, dphi, ddphi, true};
    }
    case ResponseFamily::Log: {
      double u = a * x;
      if (std::abs(u) < 0.1) {
        // log(1+u)/u = sum (-1)^k u^k / (k+1)
        auto t = eval_series(u, 14, [](int k) {
          return ((k % 2) ? -1.0 : 1.0) / (k + 1.0);
        });
        return {m * a * t.phi, m * a * a * t.dphi, m * a * a * a * t.ddphi, true};
      }
      double g = std::log1p(u), g1 = a / (1.0 + u), g2 = -a * g1 / (1.0 + u);
      double phi = m * g / x;
      double dphi = m * (g1 * x - g) / (x * x);
      double ddphi = m * (g2 * x * x - 2.0 * g1 * x + 2.0 * g) / (x * x * x);
      return {phi, dphi, ddphi, true};
    }
    case ResponseFamily::Custom: {
      if (x == 0.0) {
        double dp0 = spec.custom.dp(0.0);
        return {dp0, 0.0, 0.0, false};  // dphi at 0 unknown without p''
      }
      double p = spec.custom.p(x), dp = spec.custom.dp(x);
      return {p / x, (dp * x - p) / (x * x), 0.0, false};
    }
  }
  throw std::logic_error("unreachable");
}

double ybar(const ModelSpec& spec) {
  return spec.r / response_phi(spec, 0.0).phi;
}

IsoclineValue isocline_eval(const ModelSpec& spec, double x) {
  const double r = spec.r, K = spec.K;
  if (spec.family == ResponseFamily::Custom) {
    // F itself is analytic through phi; derivatives fall back to guarded
    // central differences because only p and p' are supplied.
    auto F = [&](double xx) {
      double phi = response_phi(spec, xx).phi;
      return r * (1.0 - xx / K) / phi;
    };
    double h = 1e-6 * K;
    double d1, d2;
    if (x - h < 0.0) {
      d1 = (-3.0 * F(x) + 4.0 * F(x + h) - F(x + 2 * h)) / (2.0 * h);
      d2 = (F(x + 2 * h) - 2.0 * F(x + h) + F(x)) / (h * h);
    } else if (x + h > K) {
      d1 = (3.0 * F(x) - 4.0 * F(x - h) + F(x - 2 * h)) / (2.0 * h);
      d2 = (F(x) - 2.0 * F(x - h) + F(x - 2 * h)) / (h * h);
    } else {
      d1 = (F(x + h) - F(x - h)) / (2.0 * h);
      d2 = (F(x + h) - 2.0 * F(x) + F(x - h)) / (h * h);
    }
    return {F(x), d1, d2};
  }
  PhiValue ph = response_phi(spec, x);
  double g = 1.0 / ph.phi;
  double g1 = -ph.dphi * g * g;
  double g2 = (2.0 * ph.dphi * ph.dphi - ph.phi * ph.ddphi) * g * g * g;
  double w = 1.0 - x / K;
  return {r * w * g, r * (-g / K + w * g1), r * (-2.0 * g1 / K + w * g2)};
}

double H_eval(const ModelSpec& spec, double y) {
  if (!(y > 0.0)) throw std::invalid_argument("H requires y > 0");
  double yb = ybar(spec);
  return y - yb - yb * std::log(y / yb);
}

double H_conjugate(const ModelSpec& spec, double y) {
  if (!(y > 0.0)) throw std::invalid_argument("H_conjugate requires y > 0");
  double yb = ybar(spec);
  if (y == yb) return yb;
  double target = H_eval(spec, y);
  auto f = [&](double yy) { return H_eval(spec, yy) - target; };
  double lo, hi;
  if (y < yb) {
    lo = yb;
    hi = 2.0 * yb;
    while (f(hi) < 0.0) hi *= 2.0;
  } else {
    hi = yb;
    lo = 0.5 * yb;
    while (lo > 0.0 && f(lo) < 0.0) lo *= 0.5;
  }
  return bisect(f, lo, hi, f(lo), f(hi), 1e-12 * yb);
}

const char* to_string(HumpClass h) {
  switch (h) {
    case HumpClass::Monotone: return "Monotone";
    case HumpClass::OneHump: return "OneHump";
    case HumpClass::TwoHump: return "TwoHump";
    case HumpClass::Unsupported: return "Unsupported";
  }
  return "?";
}

IsoclineShape classify_isocline(const ModelSpec& spec, int gridN, double tol) {
  if (gridN < 16) throw std::invalid_argument("classify_isocline: gridN >= 16");
  if (!(tol > 0.0)) throw std::invalid_argument("classify_isocline: tol > 0");
  const double K = spec.K;
  const double delta = 1e-6;
  const double x0 = delta * K, x1 = (1.0 - delta) * K;

  IsoclineShape shape;
  shape.fPrimeAtZero = isocline_eval(spec, 0.0).dF;
  double yb = ybar(spec);
  if (std::abs(shape.fPrimeAtZero) * K / yb <= 1e-9) {
    shape.boundaryDegenerate = true;
    shape.notes.push_back("boundary-degenerate: F'(0) is numerically zero");
  }

  auto dF = [&](double x) { return isocline_eval(spec, x).dF; };

  std::vector<double> xs(gridN + 1), ds(gridN + 1);
  for (int i = 0; i <= gridN; ++i) {
    xs[i] = x0 + (x1 - x0) * i / gridN;
    ds[i] = dF(xs[i]);
  }

  std::vector<double> extrema;
  for (int i = 0; i < gridN; ++i) {
    if (ds[i] == 0.0) {
      if (i > 0 && ds[i - 1] * ds[i + 1] < 0.0) extrema.push_back(xs[i]);
      continue;
    }
    if (ds[i] * ds[i + 1] < 0.0)
      extrema.push_back(bisect(dF, xs[i], xs[i + 1], ds[i], ds[i + 1], tol * K));
  }

  const double cell = (x1 - x0) / gridN;
  for (std::size_t i = 1; i < extrema.size(); ++i) {
    if (extrema[i] - extrema[i - 1] < cell) {
      shape.notes.push_back(
          "grid-resolution warning: extrema closer than one grid cell near x = " +
          fmt17(extrema[i]));
    }
  }

  // Sign of F' on the segments between consecutive extrema.
  std::vector<double> cuts{x0};
  cuts.insert(cuts.end(), extrema.begin(), extrema.end());
  cuts.push_back(x1);
  std::vector<int> segSign;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    segSign.push_back(dF(mid) >= 0.0 ? +1 : -1);
  }

  if (extrema.size() > 2) {
    shape.humpClass = HumpClass::Unsupported;
    shape.notes.push_back("more than two interior extrema of F");
    return shape;
  }
  if (extrema.empty()) {
    if (segSign[0] > 0) {
      shape.humpClass = HumpClass::Unsupported;
      shape.notes.push_back("F' > 0 throughout (0, K), inconsistent with F(K) = 0");
    } else {
      shape.humpClass = HumpClass::Monotone;
    }
    return shape;
  }
  if (extrema.size() == 1) {
    if (segSign[0] > 0 && segSign[1] < 0) {
      shape.humpClass = HumpClass::OneHump;
      shape.xHat = extrema[0];
    } else {
      shape.humpClass = HumpClass::Unsupported;
      shape.notes.push_back("single interior extremum is a minimum");
    }
  } else {
    if (segSign[0] < 0 && segSign[1] > 0 && segSign[2] < 0) {
      shape.humpClass = HumpClass::TwoHump;
      shape.xCheck = extrema[0];
      shape.xHat = extrema[1];
    } else {
      shape.humpClass = HumpClass::Unsupported;
      shape.notes.push_back("two interior extrema with unexpected sign pattern");
      return shape;
    }
  }

  // Landmarks past the first extremum.
  double F0 = isocline_eval(spec, 0.0).F;
  auto Fx = [&](double x) { return isocline_eval(spec, x).F; };
  if (shape.humpClass == HumpClass::OneHump) {
    double xh = *shape.xHat;
    auto g = [&](double x) { return Fx(x) - F0; };
    double ga = g(xh), gb = g(x1);
    if (ga > 0.0 && gb < 0.0)
      shape.xBar = bisect(g, xh, x1, ga, gb, tol * K);
  } else if (shape.humpClass == HumpClass::TwoHump) {
    double xc = *shape.xCheck, xh = *shape.xHat;
    auto g = [&](double x) { return Fx(x) - F0; };
    double ga = g(xc), gb = g(xh);
    if (ga < 0.0 && gb > 0.0)
      shape.xBar = bisect(g, xc, xh, ga, gb, tol * K);
    double Fc = Fx(xc);
    auto g2 = [&](double x) { return Fx(x) - Fc; };
    double g2a = g2(xh), g2b = g2(x1);
    if (g2a > 0.0 && g2b < 0.0)
      shape.xTilde = bisect(g2, xh, x1, g2a, g2b, tol * K);
  }
  return shape;
}

}  // namespace relaxosc
