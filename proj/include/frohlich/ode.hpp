#pragma once

// Integrators shared by the mean-field and master-equation layers.
//
//   Dopri5         adaptive explicit Runge-Kutta 5(4) with embedded error
//                  estimate (Dormand-Prince coefficients)
//   TridiagTrBdf2  fixed-step L-stable TR-BDF2 for y' = A y with A tridiagonal
//                  and time independent; used where the rates are stiff

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "frohlich/error.hpp"

namespace frohlich::ode {

struct Options {
  double rtol = 1e-9;
  double atol = 1e-12;
  double h_initial = 0.0;  ///< 0 selects a heuristic first step
  double h_max = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 50'000'000;
};

struct Stats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_calls = 0;
};

using State = std::vector<double>;
using Rhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

class Dopri5 {
 public:
  Dopri5(Rhs rhs, Options opts = {}) : rhs_(std::move(rhs)), opts_(opts) {}

  /// Advance y from t to t_end; `on_accept(t, y, dydt)` sees every accepted step.
  template <class OnAccept>
  void advance(double& t, State& y, double t_end, OnAccept&& on_accept) {
    const std::size_t n = y.size();
    resize(n);
    eval(t, y, k1_);
    if (h_ <= 0.0) h_ = initial_step(t, y, t_end - t);
    while (t < t_end) {
      if (stats_.accepted + stats_.rejected >= opts_.max_steps)
        throw DomainError("Dopri5: step budget exhausted");
      double h = std::min({h_, opts_.h_max, t_end - t});
      const bool last = (t + h >= t_end);
      if (last) h = t_end - t;
      const double err = attempt(t, y, h);
      if (err <= 1.0) {
        t = last ? t_end : t + h;
        y.swap(y_new_);
        k1_.swap(k7_);
        ++stats_.accepted;
        on_accept(t, std::span<const double>(y), std::span<const double>(k1_));
        const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        // a step clipped to hit t_end says nothing about the next step size
        h_ = last ? std::max(h_, h * fac) : h * fac;
      } else {
        ++stats_.rejected;
        h_ = h * std::max(0.2, 0.9 * std::pow(err, -0.2));
        if (h_ < 1e-300) throw DomainError("Dopri5: step size underflow");
      }
    }
  }

  void advance(double& t, State& y, double t_end) {
    advance(t, y, t_end, [](double, std::span<const double>, std::span<const double>) {});
  }

  /// Derivative at the current state (valid after a call to advance).
  std::span<const double> last_derivative() const { return k1_; }
  const Stats& stats() const { return stats_; }

 private:
  void resize(std::size_t n) {
    for (auto* v : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &tmp_, &y_new_})
      if (v->size() != n) v->assign(n, 0.0);
  }

  void eval(double t, std::span<const double> y, std::vector<double>& out) {
    ++stats_.rhs_calls;
    rhs_(t, y, out);
  }

  double initial_step(double t, const State& y, double span) {
    if (opts_.h_initial > 0.0) return opts_.h_initial;
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double sc = opts_.atol + opts_.rtol * std::abs(y[i]);
      d0 = std::max(d0, std::abs(y[i]) / sc);
      d1 = std::max(d1, std::abs(k1_[i]) / sc);
    }
    double h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h = std::min(h, std::abs(span));
    (void)t;
    return std::max(h, 1e-12 * std::max(1.0, std::abs(span)));
  }

  double attempt(double t, const State& y, double h) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    const std::size_t n = y.size();
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h * a21 * k1_[i];
    eval(t + c2 * h, tmp_, k2_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h * (a31 * k1_[i] + a32 * k2_[i]);
    eval(t + c3 * h, tmp_, k3_);
    for (std::size_t i = 0; i < n; ++i)
      tmp_[i] = y[i] + h * (a41 * k1_[i] + a42 * k2_[i] + a43 * k3_[i]);
    eval(t + c4 * h, tmp_, k4_);
    for (std::size_t i = 0; i < n; ++i)
      tmp_[i] = y[i] + h * (a51 * k1_[i] + a52 * k2_[i] + a53 * k3_[i] + a54 * k4_[i]);
    eval(t + c5 * h, tmp_, k5_);
    for (std::size_t i = 0; i < n; ++i)
      tmp_[i] = y[i] + h * (a61 * k1_[i] + a62 * k2_[i] + a63 * k3_[i] + a64 * k4_[i] +
                            a65 * k5_[i]);
    eval(t + h, tmp_, k6_);
    for (std::size_t i = 0; i < n; ++i)
      y_new_[i] = y[i] + h * (b1 * k1_[i] + b3 * k3_[i] + b4 * k4_[i] + b5 * k5_[i] +
                              b6 * k6_[i]);
    eval(t + h, y_new_, k7_);
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] +
                            e6 * k6_[i] + e7 * k7_[i]);
      const double sc = opts_.atol + opts_.rtol * std::max(std::abs(y[i]), std::abs(y_new_[i]));
      err = std::max(err, std::abs(e) / sc);
    }
    if (!std::isfinite(err)) return 1e10;
    return err;
  }

  Rhs rhs_;
  Options opts_;
  Stats stats_;
  double h_ = 0.0;
  std::vector<double> k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, y_new_;
};

/// Time-independent tridiagonal operator: (A y)_i = lower_i y_{i-1} + diag_i y_i + upper_i y_{i+1}.
/// lower[0] and upper[n-1] are ignored.
struct Tridiagonal {
  std::vector<double> lower, diag, upper;
  std::size_t size() const { return diag.size(); }
};

/// Solves (I - s A) x = rhs in place (Thomas algorithm, no pivoting). Stable
/// when I - s A is diagonally dominant, which holds for generators of
/// birth-death chains with non-negative extra decay on the diagonal.
template <class T>
void solve_shifted(const Tridiagonal& A, double s, std::vector<T>& x, std::vector<double>& work) {
  const std::size_t n = A.size();
  work.resize(n);
  double denom = 1.0 - s * A.diag[0];
  work[0] = n > 1 ? (-s * A.upper[0]) / denom : 0.0;
  x[0] /= denom;
  for (std::size_t i = 1; i < n; ++i) {
    const double li = -s * A.lower[i];
    denom = (1.0 - s * A.diag[i]) - li * work[i - 1];
    work[i] = i + 1 < n ? (-s * A.upper[i]) / denom : 0.0;
    x[i] = (x[i] - li * x[i - 1]) / denom;
  }
  for (std::size_t i = n - 1; i-- > 0;) x[i] -= work[i] * x[i + 1];
}

template <class T>
void apply(const Tridiagonal& A, std::span<const T> y, std::span<T> out) {
  const std::size_t n = A.size();
  for (std::size_t i = 0; i < n; ++i) {
    T v = A.diag[i] * y[i];
    if (i > 0) v += A.lower[i] * y[i - 1];
    if (i + 1 < n) v += A.upper[i] * y[i + 1];
    out[i] = v;
  }
}

/// One TR-BDF2 step of size h for y' = A y (gamma = 2 - sqrt 2).
template <class T>
class TridiagTrBdf2 {
 public:
  explicit TridiagTrBdf2(const Tridiagonal& A) : A_(A) {}

  void step(std::vector<T>& y, double h) {
    static const double g = 2.0 - std::sqrt(2.0);
    static const double d = g / 2.0;
    const std::size_t n = y.size();
    tmp_.resize(n);
    stage_.resize(n);
    // trapezoidal stage to t + g h
    apply<T>(A_, std::span<const T>(y), std::span<T>(tmp_));
    for (std::size_t i = 0; i < n; ++i) stage_[i] = y[i] + d * h * tmp_[i];
    solve_shifted(A_, d * h, stage_, work_);
    // BDF2 stage to t + h
    const double w1 = 1.0 / (g * (2.0 - g));
    const double w0 = (1.0 - g) * (1.0 - g) / (g * (2.0 - g));
    for (std::size_t i = 0; i < n; ++i) y[i] = w1 * stage_[i] - w0 * y[i];
    solve_shifted(A_, d * h, y, work_);
  }

 private:
  const Tridiagonal& A_;
  std::vector<T> tmp_, stage_;
  std::vector<double> work_;
};

}  // namespace frohlich::ode
