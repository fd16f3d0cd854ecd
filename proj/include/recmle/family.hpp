#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "recmle/detail/math.hpp"
#include "recmle/errors.hpp"
#include "recmle/rng.hpp"

namespace recmle {

using real_fn = std::function<double(double)>;

/// Raw ingredients of a distribution family whose CDF has the shape
/// F(x; theta) = exp(-B(theta) * A(x)) on an open support interval (lo, hi):
///   - A is strictly decreasing on (lo, hi) with A -> +inf at lo and A -> 0
///     at hi, so F runs from 0 to 1;
///   - B maps the parameter domain to (0, inf).
/// a_inv / b_inv may be omitted; numeric monotone inversion is substituted.
struct FamilySpec {
  std::string name;
  double support_lo = 0.0;
  double support_hi = 1.0;
  double theta_lo = 0.0;
  double theta_hi = detail::kInf;
  real_fn a;
  real_fn a_prime;
  real_fn b;
  real_fn a_inv;  // optional
  real_fn b_inv;  // optional
};

namespace detail {

/// Bisection inverse of a strictly monotone f on the open interval (lo, hi).
/// Direction is probed, the bracket is grown toward the endpoints, then
/// bisected to ~1 ulp (bisection halves the interval, so 200 iterations
/// exhaust double precision). Throws inversion_error when no bracket exists,
/// i.e. y is outside the range of f over (lo, hi).
inline double invert_monotone(const real_fn& f, double y, double lo, double hi,
                              const std::string& what) {
  const bool lo_fin = std::isfinite(lo);
  const bool hi_fin = std::isfinite(hi);
  double center;
  if (lo_fin && hi_fin) {
    center = 0.5 * (lo + hi);
  } else if (lo_fin) {
    center = lo + 1.0;
  } else if (hi_fin) {
    center = hi - 1.0;
  } else {
    center = 0.0;
  }

  // Probe direction strictly inside the interval.
  const double probe_lo = lo_fin ? lo + 0.25 * (std::min(hi, lo + 2.0) - lo)
                                 : center - 1.0;
  const double probe_hi = hi_fin ? hi - 0.25 * (hi - std::max(lo, hi - 2.0))
                                 : center + 1.0;
  const bool increasing = f(probe_lo) < f(probe_hi);

  const auto step_toward_lo = [&](int k) {
    if (lo_fin) return lo + (center - lo) * std::pow(0.5, k);
    return center - std::ldexp(1.0, k);
  };
  const auto step_toward_hi = [&](int k) {
    if (hi_fin) return hi - (hi - center) * std::pow(0.5, k);
    return center + std::ldexp(1.0, k);
  };

  // Grow the bracket: find x_lo, x_hi with f spanning y.
  double x_lo = center, x_hi = center;
  bool lo_ok = false, hi_ok = false;
  for (int k = 0; k <= 1000 && !(lo_ok && hi_ok); ++k) {
    if (!lo_ok) {
      x_lo = step_toward_lo(k);
      if (!std::isfinite(x_lo)) break;
      const double v = f(x_lo);
      lo_ok = increasing ? (v <= y) : (v >= y);
    }
    if (!hi_ok) {
      x_hi = step_toward_hi(k);
      if (!std::isfinite(x_hi)) break;
      const double v = f(x_hi);
      hi_ok = increasing ? (v >= y) : (v <= y);
    }
  }
  if (!(lo_ok && hi_ok)) {
    throw inversion_error(what + ": no solution for target " + fmt_g17(y));
  }

  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (x_lo + x_hi);
    if (mid <= std::min(x_lo, x_hi) || mid >= std::max(x_lo, x_hi)) break;
    const double v = f(mid);
    const bool go_hi = increasing ? (v < y) : (v > y);
    if (go_hi) {
      x_lo = mid;
    } else {
      x_hi = mid;
    }
    if (std::abs(x_hi - x_lo) <= 1e-12 * std::max(1.0, std::abs(mid))) break;
  }
  return 0.5 * (x_lo + x_hi);
}

}  // namespace detail

/// A fully usable family member: validated spec plus guaranteed inverses.
class FamilyMember {
 public:
  explicit FamilyMember(FamilySpec spec) : spec_(std::move(spec)) {
    if (!spec_.a || !spec_.a_prime || !spec_.b) {
      throw argument_error("family: a, a_prime and b are required");
    }
    if (!(spec_.support_lo < spec_.support_hi)) {
      throw argument_error("family: empty support interval");
    }
    if (!(spec_.theta_lo < spec_.theta_hi)) {
      throw argument_error("family: empty parameter interval");
    }
    if (!spec_.a_inv) {
      const real_fn a = spec_.a;
      const double lo = spec_.support_lo, hi = spec_.support_hi;
      const std::string what = spec_.name + ": invert A";
      spec_.a_inv = [a, lo, hi, what](double y) {
        return detail::invert_monotone(a, y, lo, hi, what);
      };
    }
    if (!spec_.b_inv) {
      const real_fn b = spec_.b;
      const double lo = spec_.theta_lo, hi = spec_.theta_hi;
      const std::string what = spec_.name + ": invert B";
      spec_.b_inv = [b, lo, hi, what](double y) {
        return detail::invert_monotone(b, y, lo, hi, what);
      };
    }
  }

  const std::string& name() const { return spec_.name; }
  double support_lo() const { return spec_.support_lo; }
  double support_hi() const { return spec_.support_hi; }
  double theta_lo() const { return spec_.theta_lo; }
  double theta_hi() const { return spec_.theta_hi; }

  double a(double x) const { return spec_.a(x); }
  double a_prime(double x) const { return spec_.a_prime(x); }
  double a_inv(double y) const { return spec_.a_inv(y); }
  double b(double theta) const { return spec_.b(theta); }
  double b_inv(double y) const { return spec_.b_inv(y); }

  bool in_support(double x) const {
    return x > spec_.support_lo && x < spec_.support_hi;
  }
  bool in_theta_domain(double theta) const {
    return theta > spec_.theta_lo && theta < spec_.theta_hi;
  }

  void require_support(double x) const {
    if (!in_support(x)) {
      throw domain_error(spec_.name + ": x = " + detail::fmt_g17(x) +
                         " outside open support (" +
                         detail::fmt_g17(spec_.support_lo) + ", " +
                         detail::fmt_g17(spec_.support_hi) + ")");
    }
  }
  void require_theta(double theta) const {
    if (!in_theta_domain(theta)) {
      throw parameter_error(spec_.name + ": theta = " + detail::fmt_g17(theta) +
                            " outside parameter domain (" +
                            detail::fmt_g17(spec_.theta_lo) + ", " +
                            detail::fmt_g17(spec_.theta_hi) + ")");
    }
  }

 private:
  FamilySpec spec_;
};

/// F(x) = x^theta on (0, 1); A(x) = -ln x, B(theta) = theta, theta > 0.
inline FamilyMember power_function() {
  FamilySpec s;
  s.name = "power";
  s.support_lo = 0.0;
  s.support_hi = 1.0;
  s.theta_lo = 0.0;
  s.theta_hi = detail::kInf;
  s.a = [](double x) { return -std::log(x); };
  s.a_prime = [](double x) { return -1.0 / x; };
  s.a_inv = [](double y) { return std::exp(-y); };
  s.b = [](double t) { return t; };
  s.b_inv = [](double y) { return y; };
  return FamilyMember(std::move(s));
}

/// Smallest-extreme-value form on the whole line: A(x) = e^{-x},
/// B(theta) = e^{theta}, both unrestricted in theta.
inline FamilyMember gumbel() {
  FamilySpec s;
  s.name = "gumbel";
  s.support_lo = -detail::kInf;
  s.support_hi = detail::kInf;
  s.theta_lo = -detail::kInf;
  s.theta_hi = detail::kInf;
  s.a = [](double x) { return std::exp(-x); };
  s.a_prime = [](double x) { return -std::exp(-x); };
  s.a_inv = [](double y) { return -std::log(y); };
  s.b = [](double t) { return std::exp(t); };
  s.b_inv = [](double y) { return std::log(y); };
  return FamilyMember(std::move(s));
}

/// F(x) = exp(-(x/theta)^{-alpha}) on (0, inf); A(x) = x^{-alpha},
/// B(theta) = theta^{alpha}, theta > 0. alpha > 0 is a fixed shape.
inline FamilyMember frechet(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw argument_error("frechet: alpha must be a positive finite number");
  }
  FamilySpec s;
  s.name = "frechet(" + detail::fmt_g17(alpha) + ")";
  s.support_lo = 0.0;
  s.support_hi = detail::kInf;
  s.theta_lo = 0.0;
  s.theta_hi = detail::kInf;
  s.a = [alpha](double x) { return std::pow(x, -alpha); };
  s.a_prime = [alpha](double x) { return -alpha * std::pow(x, -alpha - 1.0); };
  s.a_inv = [alpha](double y) { return std::pow(y, -1.0 / alpha); };
  s.b = [alpha](double t) { return std::pow(t, alpha); };
  s.b_inv = [alpha](double y) { return std::pow(y, 1.0 / alpha); };
  return FamilyMember(std::move(s));
}

/// F(x; theta) = exp(-B(theta) A(x)).
inline double cdf(const FamilyMember& fam, double theta, double x) {
  fam.require_theta(theta);
  fam.require_support(x);
  return std::exp(-fam.b(theta) * fam.a(x));
}

/// f(x; theta) = -B(theta) A'(x) exp(-B(theta) A(x)).
inline double pdf(const FamilyMember& fam, double theta, double x) {
  fam.require_theta(theta);
  fam.require_support(x);
  const double bt = fam.b(theta);
  return -bt * fam.a_prime(x) * std::exp(-bt * fam.a(x));
}

/// Inverse CDF: x = A^{-1}(-ln p / B(theta)), p in (0, 1).
inline double quantile(const FamilyMember& fam, double theta, double p) {
  fam.require_theta(theta);
  if (!(p > 0.0 && p < 1.0)) {
    throw domain_error(fam.name() + ": quantile probability " +
                       detail::fmt_g17(p) + " outside (0, 1)");
  }
  return fam.a_inv(-std::log(p) / fam.b(theta));
}

/// n i.i.d. draws by inverse CDF on (0,1) uniforms from the given stream.
inline std::vector<double> sample_iid(const FamilyMember& fam, double theta,
                                      std::size_t n, Xoshiro256pp& rng) {
  fam.require_theta(theta);
  if (n == 0) throw argument_error("sample_iid: n must be >= 1");
  std::vector<double> xs(n);
  for (auto& x : xs) x = quantile(fam, theta, rng.uniform01());
  return xs;
}

inline std::vector<double> sample_iid(const FamilyMember& fam, double theta,
                                      std::size_t n, std::uint64_t seed) {
  Xoshiro256pp rng(seed);
  return sample_iid(fam, theta, n, rng);
}

/// One line of a structural validation report.
struct ValidationCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool all_passed() const {
    for (const auto& c : checks) {
      if (!c.passed) return false;
    }
    return true;
  }
};

/// Structural checks of the family contract on a finite probe grid:
/// monotonicity and sign of A / A', inverse round-trips, boundary growth of A,
/// positivity and invertibility of B. Each check lands in the report as
/// pass/fail with a message; probes that throw are recorded as failures
/// rather than propagated.
inline ValidationReport validate_member(const FamilyMember& fam,
                                        std::size_t grid_size = 64) {
  if (grid_size < 8) throw argument_error("validate_member: grid_size < 8");
  ValidationReport rep;
  const auto run = [&rep](const std::string& name, auto&& body) {
    ValidationCheck c;
    c.name = name;
    try {
      c.detail = body(c.passed);
    } catch (const std::exception& e) {
      c.passed = false;
      c.detail = std::string("raised: ") + e.what();
    }
    rep.checks.push_back(std::move(c));
  };

  // Finite probe window inside the (possibly unbounded) support.
  const double lo = fam.support_lo(), hi = fam.support_hi();
  double wlo, whi;
  if (std::isfinite(lo) && std::isfinite(hi)) {
    wlo = lo;
    whi = hi;
  } else if (std::isfinite(lo)) {
    wlo = lo;
    whi = lo + 20.0;
  } else if (std::isfinite(hi)) {
    wlo = hi - 20.0;
    whi = hi;
  } else {
    wlo = -10.0;
    whi = 10.0;
  }
  std::vector<double> grid(grid_size);
  for (std::size_t j = 0; j < grid_size; ++j) {
    grid[j] = wlo + (whi - wlo) * (static_cast<double>(j) + 0.5) /
                        static_cast<double>(grid_size);
  }

  run("A strictly decreasing", [&](bool& ok) {
    ok = true;
    for (std::size_t j = 1; j < grid.size(); ++j) {
      if (!(fam.a(grid[j]) < fam.a(grid[j - 1]))) {
        ok = false;
        return "violated near x = " + detail::fmt_g17(grid[j]);
      }
    }
    return std::string("checked on " + std::to_string(grid.size()) + " points");
  });

  run("A positive on probe grid", [&](bool& ok) {
    ok = true;
    for (const double x : grid) {
      if (!(fam.a(x) > 0.0)) {
        ok = false;
        return "A(x) <= 0 at x = " + detail::fmt_g17(x);
      }
    }
    return std::string("ok");
  });

  run("A' negative and matches finite differences", [&](bool& ok) {
    ok = true;
    for (const double x : grid) {
      const double d = fam.a_prime(x);
      if (!(d < 0.0)) {
        ok = false;
        return "A'(x) >= 0 at x = " + detail::fmt_g17(x);
      }
      double h = 1e-5 * std::max(1.0, std::abs(x));
      if (x - h <= lo || x + h >= hi) h = 0.25 * std::min(x - lo, hi - x);
      const double fd = (fam.a(x + h) - fam.a(x - h)) / (2.0 * h);
      if (std::abs(fd - d) > 1e-6 * std::max(std::abs(d), 1e-30)) {
        ok = false;
        return "A' mismatch at x = " + detail::fmt_g17(x) + ": analytic " +
               detail::fmt_g17(d) + " vs central " + detail::fmt_g17(fd);
      }
    }
    return std::string("ok");
  });

  run("A inverse round-trip", [&](bool& ok) {
    ok = true;
    for (const double x : grid) {
      const double y = fam.a(x);
      const double back = fam.a_inv(y);
      if (std::abs(back - x) > 1e-10 * std::max(1.0, std::abs(x))) {
        ok = false;
        return "A_inv(A(x)) = " + detail::fmt_g17(back) + " != x = " +
               detail::fmt_g17(x);
      }
    }
    return std::string("ok");
  });

  // Approach the lower endpoint: A must grow without apparent bound.
  run("A grows toward lower endpoint", [&](bool& ok) {
    const double center = 0.5 * (wlo + whi);
    const double ref = fam.a(center);
    double prev = ref;
    double last = ref;
    for (int k = 1; k <= 8; ++k) {
      const double x = std::isfinite(lo)
                           ? lo + (center - lo) * std::pow(10.0, -k)
                           : center - 10.0 * std::ldexp(1.0, k);
      const double v = fam.a(x);
      if (std::isfinite(v) && std::isfinite(prev) && !(v > prev)) {
        ok = false;
        return "A not increasing on approach at x = " + detail::fmt_g17(x);
      }
      prev = v;
      last = v;
    }
    ok = last > 10.0 * std::max(ref, 0.0) || !std::isfinite(last);
    return "A(center) = " + detail::fmt_g17(ref) + ", near endpoint " +
           detail::fmt_g17(last);
  });

  run("A vanishes toward upper endpoint", [&](bool& ok) {
    const double center = 0.5 * (wlo + whi);
    const double ref = fam.a(center);
    double prev = ref;
    double last = ref;
    for (int k = 1; k <= 8; ++k) {
      const double x = std::isfinite(hi)
                           ? hi - (hi - center) * std::pow(10.0, -k)
                           : center + 10.0 * std::ldexp(1.0, k);
      const double v = fam.a(x);
      if (!(v < prev) && !(v == 0.0 && prev == 0.0)) {
        ok = false;
        return "A not decreasing on approach at x = " + detail::fmt_g17(x);
      }
      prev = v;
      last = v;
    }
    ok = last < 0.1 * ref && last >= 0.0;
    return "A(center) = " + detail::fmt_g17(ref) + ", near endpoint " +
           detail::fmt_g17(last);
  });

  // Theta probes: positivity of B and invertibility of B over a clamped window.
  const double tlo = std::max(fam.theta_lo(), -10.0);
  const double thi = std::min(fam.theta_hi(), 10.0);
  std::vector<double> tgrid;
  for (std::size_t j = 0; j < grid_size; ++j) {
    tgrid.push_back(tlo + (thi - tlo) * (static_cast<double>(j) + 0.5) /
                              static_cast<double>(grid_size));
  }

  run("B positive on parameter probes", [&](bool& ok) {
    ok = true;
    for (const double t : tgrid) {
      if (!(fam.b(t) > 0.0)) {
        ok = false;
        return "B(theta) <= 0 at theta = " + detail::fmt_g17(t);
      }
    }
    return std::string("ok");
  });

  run("B strictly monotone on parameter probes", [&](bool& ok) {
    ok = true;
    const bool incr = fam.b(tgrid.front()) < fam.b(tgrid.back());
    for (std::size_t j = 1; j < tgrid.size(); ++j) {
      const double d = fam.b(tgrid[j]) - fam.b(tgrid[j - 1]);
      if (!(incr ? d > 0.0 : d < 0.0)) {
        ok = false;
        return "not strictly monotone near theta = " + detail::fmt_g17(tgrid[j]);
      }
    }
    return std::string("ok");
  });

  run("B inverse round-trip", [&](bool& ok) {
    ok = true;
    for (const double t : tgrid) {
      const double back = fam.b_inv(fam.b(t));
      if (std::abs(back - t) > 1e-8 * std::max(1.0, std::abs(t))) {
        ok = false;
        return "B_inv(B(theta)) = " + detail::fmt_g17(back) + " != theta = " +
               detail::fmt_g17(t);
      }
    }
    return std::string("ok");
  });

  return rep;
}

}  // namespace recmle
