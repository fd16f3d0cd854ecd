#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "recmle/detail/math.hpp"
#include "recmle/errors.hpp"

namespace recmle {

namespace detail {

// Gauss-Kronrod 7-15 on [-1, 1]. Kronrod nodes/weights; the embedded Gauss-7
// rule sits on the odd-index nodes.
inline constexpr double kGK15Nodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
inline constexpr double kGK15KronrodW[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
inline constexpr double kGK15GaussW[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct GKEstimate {
  double value = 0.0;
  double error = 0.0;
};

template <class F>
GKEstimate gk15(F&& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  double kron = 0.0, gauss = 0.0;
  for (int i = 0; i < 7; ++i) {
    const double x = h * kGK15Nodes[i];
    fv[i] = f(c - x);
    fv[14 - i] = f(c + x);
    kron += kGK15KronrodW[i] * (fv[i] + fv[14 - i]);
  }
  fv[7] = f(c);
  kron += kGK15KronrodW[7] * fv[7];
  for (int i = 0; i < 3; ++i) {
    gauss += kGK15GaussW[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
  }
  gauss += kGK15GaussW[3] * fv[7];
  GKEstimate e;
  e.value = kron * h;
  const double diff = std::abs(kron - gauss) * std::abs(h);
  // Standard sharpening of the raw Gauss/Kronrod gap.
  e.error = diff > 0.0 ? diff * std::min(1.0, std::pow(200.0 * diff /
                                                       std::max(std::abs(e.value), 1e-300),
                                                       1.5))
                       : 0.0;
  if (!std::isfinite(e.value)) e.error = kInf;
  return e;
}

}  // namespace detail

struct IntegralResult {
  double value = 0.0;
  double abs_error = 0.0;
  bool converged = false;
  int segments = 0;
};

/// Adaptive Gauss-Kronrod 7-15 on a finite interval: the segment with the
/// largest error estimate is bisected until the summed error estimate meets
/// max(abs_tol, rel_tol * |value|) or the segment budget runs out. The queue
/// is seeded with several equal segments, not one, so a feature sitting
/// between the nodes of a single wide rule is not invisible from the start.
template <class F>
IntegralResult integrate_adaptive(F&& f, double a, double b,
                                  double rel_tol = 1e-10,
                                  double abs_tol = 0.0,
                                  int max_segments = 4000) {
  struct Seg {
    double a, b, value, error;
    bool operator<(const Seg& o) const { return error < o.error; }
  };
  std::priority_queue<Seg> segs;
  double total_value = 0.0;
  double total_error = 0.0;
  int n = 0;
  constexpr int kSeedSegments = 8;
  const double w = (b - a) / kSeedSegments;
  for (int i = 0; i < kSeedSegments; ++i) {
    const double sa = i == 0 ? a : a + w * i;
    const double sb = i + 1 == kSeedSegments ? b : a + w * (i + 1);
    const auto est = detail::gk15(f, sa, sb);
    segs.push({sa, sb, est.value, est.error});
    total_value += est.value;
    total_error += est.error;
    ++n;
    if (!(sa < sb)) break;  // degenerate interval: one segment is all there is
  }
  while (n < max_segments) {
    if (total_error <= std::max(abs_tol, rel_tol * std::abs(total_value))) {
      break;
    }
    const Seg worst = segs.top();
    segs.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b)) {  // interval exhausted
      segs.push(worst);
      break;
    }
    const auto left = detail::gk15(f, worst.a, mid);
    const auto right = detail::gk15(f, mid, worst.b);
    total_value += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    segs.push({worst.a, mid, left.value, left.error});
    segs.push({mid, worst.b, right.value, right.error});
    ++n;
  }
  // Re-sum from segments for a compensated final value.
  detail::neumaier_sum v, e;
  while (!segs.empty()) {
    v.add(segs.top().value);
    e.add(segs.top().error);
    segs.pop();
  }
  IntegralResult r;
  r.value = v.value();
  r.abs_error = e.value();
  r.segments = n;
  r.converged =
      r.abs_error <= std::max(abs_tol, rel_tol * std::abs(r.value)) &&
      std::isfinite(r.value);
  return r;
}

/// E[g(T)] for T ~ Gamma(m, rate), by quadrature against the exact density.
///
/// The axis is split at the density mode. The right tail is integrated in
/// fixed-width blocks until they stop contributing; the left tail is mapped
/// through t = e^u so the spike near 0 (where plug-in integrands like
/// g(t) = e^{-c/t} concentrate their mass for small m) becomes a smooth,
/// exponentially decaying integrand in u.
///
/// Divergence is reported rather than silently truncated: blocks that grow
/// twice in a row, a non-finite block, or failure to decay within the block
/// budget raise divergence_error.
template <class G>
double gamma_expectation_quadrature(G&& g, std::size_t m, double rate,
                                    double rel_tol = 1e-10) {
  if (m == 0) throw argument_error("gamma_expectation_quadrature: m >= 1");
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw argument_error("gamma_expectation_quadrature: rate must be positive");
  }
  const double md = static_cast<double>(m);
  const double lognorm = md * std::log(rate) - std::lgamma(md);

  const auto phi_t = [&](double t) {
    return g(t) * std::exp((md - 1.0) * std::log(t) - rate * t + lognorm);
  };
  const auto phi_u = [&](double u) {
    const double t = std::exp(u);
    return g(t) * std::exp(md * u - rate * t + lognorm);
  };

  const double split = m > 1 ? (md - 1.0) / rate : 1.0 / rate;
  detail::neumaier_sum acc;

  const auto sweep = [&](auto&& block_integral, const char* side) {
    double prev_mag = detail::kInf;
    int growing = 0;
    int quiet = 0;
    for (int k = 0; k < 500; ++k) {
      const double blk = block_integral(k);
      if (!std::isfinite(blk)) {
        throw divergence_error(
            std::string("gamma_expectation_quadrature: non-finite block on ") +
            side + " side; integral diverges");
      }
      acc.add(blk);
      const double mag = std::abs(blk);
      if (k >= 1 && mag > prev_mag) {
        if (++growing >= 2) {
          throw divergence_error(
              std::string("gamma_expectation_quadrature: growing blocks on ") +
              side + " side; integral diverges");
        }
      } else {
        growing = 0;
      }
      const double floor =
          std::max(1e-300, 0.05 * rel_tol * std::abs(acc.value()));
      if (mag <= floor) {
        if (++quiet >= 2) return;
      } else {
        quiet = 0;
      }
      prev_mag = mag;
    }
    throw divergence_error(
        std::string("gamma_expectation_quadrature: no decay within block "
                    "budget on ") +
        side + " side");
  };

  const double right_w = (4.0 * std::sqrt(md) + 8.0) / rate;
  sweep(
      [&](int k) {
        const double a = split + right_w * k;
        const double b = a + right_w;
        return integrate_adaptive(phi_t, a, b, rel_tol,
                                  0.05 * rel_tol * std::abs(acc.value()))
            .value;
      },
      "right");

  const double u0 = std::log(split);
  constexpr double left_w = 4.0;
  sweep(
      [&](int k) {
        const double b = u0 - left_w * k;
        const double a = b - left_w;
        return integrate_adaptive(phi_u, a, b, rel_tol,
                                  0.05 * rel_tol * std::abs(acc.value()))
            .value;
      },
      "left");

  return acc.value();
}

}  // namespace recmle
