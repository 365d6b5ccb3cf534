#include "sgwp/app/checks.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "sgwp/dynamics.hpp"
#include "sgwp/egorov.hpp"
#include "sgwp/expectations.hpp"
#include "sgwp/field_check.hpp"
#include "sgwp/observables.hpp"
#include "sgwp/packet.hpp"

namespace sgwp::app {
namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Vec random_vec(Rng& rng, int d, double scale) {
  Vec v(d);
  for (int i = 0; i < d; ++i) v(i) = uniform(rng, -scale, scale);
  return v;
}

Mat random_sym(Rng& rng, int d, double scale) {
  Mat m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = uniform(rng, -scale, scale);
  return (m + m.transpose()) / 2;
}

State random_state(Rng& rng, int d) {
  Mat l(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) l(i, j) = uniform(rng, -0.7, 0.7);
  const Mat b = l * l.transpose() + 0.5 * Mat::Identity(d, d);
  return make_packet_state<double>(random_vec(rng, d, 1.5), random_vec(rng, d, 1.5),
                                   random_sym(rng, d, 2.0), b);
}

double max_abs(const State& s) {
  return std::max({s.q.cwiseAbs().maxCoeff(), s.p.cwiseAbs().maxCoeff(),
                   s.A.cwiseAbs().maxCoeff(), s.B.cwiseAbs().maxCoeff()});
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

CheckResult check_fd() {
  Rng rng(11);
  double worst = 0.0;
  std::string failing;
  for (const auto& f : {cosine_1d(), quartic_rotational_2d()}) {
    for (int i = 0; i < 20; ++i) {
      const Vec x = random_vec(rng, f->dim(), 2.0);
      for (const auto& rep : {fd_cross_check(*f, x, 1e-5), fd_cross_check_squares(*f, x, 1e-5)}) {
        for (const auto& e : rep.entries) worst = std::max(worst, e.max_deviation);
        if (!rep.passed() && failing.empty()) failing = f->name() + ":" + rep.failures();
      }
    }
  }
  return {"fd_cross_check", failing.empty(),
          "max deviation " + fmt(worst) + (failing.empty() ? "" : ", failing " + failing)};
}

CheckResult check_bracket(const PacketRhs& rhs) {
  Rng rng(12);
  double worst = 0.0;
  for (const auto& f : {cosine_1d(), quartic_rotational_2d()}) {
    for (int i = 0; i < 20; ++i) {
      const State s = random_state(rng, f->dim());
      const double hbar = uniform(rng, 0.05, 0.5);
      const State direct = rhs(s, *f, hbar);
      const State oracle = bracket_rhs(
          [&](const State& t) { return semiclassical_hamiltonian(t, *f, hbar); }, s, hbar);
      worst = std::max(worst, max_abs(direct - oracle) / std::max(1.0, max_abs(direct)));
    }
  }
  return {"bracket_consistency", worst <= 1e-5, "max relative deviation " + fmt(worst)};
}

CheckResult check_exactness(const PacketRhs& rhs) {
  Rng rng(13);
  const QuadratureRule rule;
  double worst_rhs = 0.0, worst_h = 0.0;
  for (int m = 0; m < 5; ++m) {
    const int d = 1 + m % 3;
    Mat m0(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) m0(i, j) = uniform(rng, -1, 1);
    const auto f = quadratic_linear<double>(random_sym(rng, d, 1.0), random_vec(rng, d, 1.0),
                                            uniform(rng, -1, 1), m0, random_vec(rng, d, 1.0),
                                            uniform(rng, 0.5, 2.0));
    for (int i = 0; i < 5; ++i) {
      const State s = random_state(rng, d);
      const double hbar = uniform(rng, 0.01, 1.0);
      worst_rhs = std::max(worst_rhs, max_abs(rhs(s, *f, hbar) - zhou_rhs(s, *f)));
      worst_h = std::max(worst_h, std::abs(full_hamiltonian(s, *f, hbar, rule) -
                                           semiclassical_hamiltonian(s, *f, hbar)));
    }
  }
  return {"exactness_regime", worst_rhs <= 1e-12 && worst_h <= 1e-12,
          "rhs " + fmt(worst_rhs) + ", hamiltonian " + fmt(worst_h)};
}

CheckResult check_energy(const PacketRhs& rhs) {
  const auto f = cosine_1d();
  const double hbar = 0.1;
  const State s0 = make_packet_state<double>(Vec::Constant(1, 0.5), Vec::Constant(1, -1.0),
                                             Mat::Zero(1, 1), Mat::Identity(1, 1));
  MonitorSet<State> mon{{"Hhbar"}, [&](const State& s) {
                          return std::vector<double>{semiclassical_hamiltonian(s, *f, hbar)};
                        }};
  const auto traj = rk4_integrate([&](const State& s) { return rhs(s, *f, hbar); }, s0, 0.01,
                                  3.0, mon);
  const double h0 = traj.monitors.front()[0];
  double drift = 0.0;
  for (const auto& m : traj.monitors) drift = std::max(drift, std::abs(m[0] - h0) / std::abs(h0));
  const bool ok = traj.completed() && drift < 1e-7;
  return {"energy_conservation_1d", ok, "relative drift " + fmt(drift)};
}

CheckResult check_noether(const PacketRhs& rhs, const FieldPtr<double>& model) {
  const auto& f = *model;
  const double hbar = 0.1;
  Mat a(2, 2), b(2, 2);
  a << -3, -6, -6, -6;
  b << 1, 0.5, 0.5, 1;
  Vec q(2), p(2);
  q << 1, 0;
  p << 0, 1;
  const State s0 = make_packet_state<double>(q, p, a, b);
  // The widths of this packet oscillate fast enough that RK4 truncation at dt = 0.01 leaves a
  // drift near 1e-3 (it scales as dt^4). dt = 0.001 isolates the invariant from the integrator.
  const auto traj =
      rk4_integrate([&](const State& s) { return rhs(s, f, hbar); }, s0, 0.001, 10.0);
  const double j0 = semiclassical_angular_momentum(s0, hbar)(0, 1);
  double drift = 0.0;
  for (const auto& s : traj.states)
    drift = std::max(drift, std::abs(semiclassical_angular_momentum(s, hbar)(0, 1) - j0));
  const bool ok = traj.completed() && drift < 1e-7;
  return {"angular_momentum_conservation_2d", ok,
          "model " + f.name() + ", drift " + fmt(drift)};
}

CheckResult check_wigner() {
  const std::size_t n = 20000;
  double worst_z = 0.0;
  Mat a2(2, 2), b2(2, 2);
  a2 << -3, -6, -6, -6;
  b2 << 1, 0.5, 0.5, 1;
  Vec q2(2), p2(2);
  q2 << 1, 0;
  p2 << 0, 1;
  const std::vector<std::pair<State, double>> cases{
      {make_packet_state<double>(Vec::Constant(1, 0.5), Vec::Constant(1, -1.0), Mat::Zero(1, 1),
                                 Mat::Identity(1, 1)),
       0.1},
      {make_packet_state<double>(q2, p2, a2, b2), 0.1}};
  for (const auto& [s, hbar] : cases) {
    const int d = s.dim();
    const auto samples = wigner_sample(s, hbar, 7, n).materialize();
    // z = (x, xi); analytic mean (q, p) and covariance blocks.
    Eigen::VectorXd mean_ref(2 * d);
    mean_ref << s.q, s.p;
    const Mat binv = s.B.inverse();
    Eigen::MatrixXd cov_ref(2 * d, 2 * d);
    cov_ref.topLeftCorner(d, d) = hbar / 2 * binv;
    cov_ref.topRightCorner(d, d) = hbar / 2 * binv * s.A;
    cov_ref.bottomLeftCorner(d, d) = hbar / 2 * s.A * binv;
    cov_ref.bottomRightCorner(d, d) = hbar / 2 * (s.B + s.A * binv * s.A);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(2 * d);
    for (const auto& z : samples) {
      sum.head(d) += z.x;
      sum.tail(d) += z.xi;
    }
    // Centre on the reference mean so the covariance estimate is unbiased.
    Eigen::MatrixXd c_sum = Eigen::MatrixXd::Zero(2 * d, 2 * d);
    Eigen::MatrixXd c_sq = Eigen::MatrixXd::Zero(2 * d, 2 * d);
    for (const auto& z : samples) {
      Eigen::VectorXd w(2 * d);
      w << z.x - s.q, z.xi - s.p;
      const Eigen::MatrixXd outer = w * w.transpose();
      c_sum += outer;
      c_sq += outer.cwiseProduct(outer);
    }
    const double nn = static_cast<double>(n);
    const Eigen::VectorXd mean = sum / nn;
    const Eigen::MatrixXd cov = c_sum / nn;
    const Eigen::MatrixXd cov_se = ((c_sq / nn - cov.cwiseProduct(cov)) / nn).cwiseSqrt();
    for (int i = 0; i < 2 * d; ++i) {
      const double se = std::sqrt(cov_ref(i, i) / nn);
      worst_z = std::max(worst_z, std::abs(mean(i) - mean_ref(i)) / se);
      for (int j = 0; j < 2 * d; ++j)
        worst_z = std::max(worst_z, std::abs(cov(i, j) - cov_ref(i, j)) / cov_se(i, j));
    }
  }
  return {"wigner_moments", worst_z < 4.0, "max |z| " + fmt(worst_z) + " (N = 20000)"};
}

CheckResult check_laplace_order() {
  const QuadratureRule rule;
  const Vec q = Vec::Zero(1);
  const Mat b = Mat::Identity(1, 1);
  auto remainder = [&](double hbar) {
    const double exact = gaussian_expectation([](const Vec& x) { return std::cos(x(0)); }, q, b,
                                              hbar, rule);
    return std::abs(exact - asymptotic_expectation(1.0, Mat::Constant(1, 1, -1.0), b, hbar));
  };
  bool ok = true;
  std::string detail = "ratios";
  for (double h : {0.4, 0.2}) {
    const double ratio = remainder(h) / remainder(h / 2);
    ok = ok && ratio >= 3.2 && ratio <= 4.8;
    detail += " " + fmt(ratio);
  }
  return {"laplace_order", ok, detail};
}

}  // namespace

std::vector<CheckResult> run_checks(const CheckHooks& hooks) {
  PacketRhs rhs = hooks.semiclassical
                      ? hooks.semiclassical
                      : PacketRhs([](const State& s, const FieldModel<double>& f, double hbar) {
                          return semiclassical_rhs(s, f, hbar);
                        });
  const auto noether = hooks.noether_model ? hooks.noether_model : quartic_rotational_2d();
  return {check_fd(),         check_bracket(rhs),          check_exactness(rhs),
          check_energy(rhs),  check_noether(rhs, noether), check_wigner(),
          check_laplace_order()};
}

}  // namespace sgwp::app
