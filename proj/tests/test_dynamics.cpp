#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sgwp/dynamics.hpp"
#include "sgwp/expectations.hpp"
#include "test_support.hpp"

using namespace sgwp;
using sgwp::test::random_state;
using sgwp::test::random_vec;
using sgwp::test::state_1d_reference;
using sgwp::test::state_2d_reference;

namespace {

double max_abs(const State& s) {
  return std::max({s.q.cwiseAbs().maxCoeff(), s.p.cwiseAbs().maxCoeff(),
                   s.A.cwiseAbs().maxCoeff(), s.B.cwiseAbs().maxCoeff()});
}

double state_norm(const State& s) {
  return std::sqrt(s.q.squaredNorm() + s.p.squaredNorm() + s.A.squaredNorm() +
                   s.B.squaredNorm());
}

ClassicalPoint point(double q, double p) {
  return {Vec::Constant(1, q), Vec::Constant(1, p)};
}

// Hamilton's equations for H0 by central differences.
ClassicalPoint fd_classical_rhs(const ClassicalPoint& z, const FieldModel<double>& f) {
  const double h = 1e-6;
  ClassicalPoint out{Vec::Zero(z.dim()), Vec::Zero(z.dim())};
  for (int i = 0; i < z.dim(); ++i) {
    ClassicalPoint a = z, b = z;
    a.p(i) += h;
    b.p(i) -= h;
    out.q(i) = (classical_hamiltonian(a, f) - classical_hamiltonian(b, f)) / (2 * h);
    a = z;
    b = z;
    a.q(i) += h;
    b.q(i) -= h;
    out.p(i) = -(classical_hamiltonian(a, f) - classical_hamiltonian(b, f)) / (2 * h);
  }
  return out;
}

}  // namespace

TEST_CASE("classical_hamiltonian examples") {
  CHECK(classical_hamiltonian(point(0.3, 1.0), *free_particle(1)) == doctest::Approx(0.5));
  const double c = std::cos(0.5);
  CHECK(classical_hamiltonian(point(0.5, -1.0), *cosine_1d()) ==
        doctest::Approx((1 + c) * (1 + c) / 2 + 1 - c * c / 2).epsilon(1e-15));
  CHECK(classical_hamiltonian(point(0.5, -1.0), *cosine_1d()) ==
        doctest::Approx(2.37758).epsilon(1e-6));
  Vec q(2), p(2);
  q << 1, 0;
  p << 0, 1;
  CHECK(classical_hamiltonian(ClassicalPoint{q, p}, *quartic_rotational_2d()) ==
        doctest::Approx(0.75));
}

TEST_CASE("semiclassical_hamiltonian examples") {
  std::mt19937_64 rng(1);
  for (const auto& f : {cosine_1d(), quartic_rotational_2d()}) {
    const State s = random_state(rng, f->dim());
    CHECK(semiclassical_hamiltonian(s, *f, 0.0) ==
          doctest::Approx(classical_hamiltonian(ClassicalPoint{s.q, s.p}, *f)).epsilon(1e-15));
  }
  const State ground = make_packet_state<double>(Vec::Zero(1), Vec::Zero(1), Mat::Zero(1, 1),
                                                 Mat::Identity(1, 1));
  CHECK(semiclassical_hamiltonian(ground, *sgwp::test::harmonic_1d(), 0.2) ==
        doctest::Approx(0.1));
}

TEST_CASE("corrected_potentials examples") {
  std::mt19937_64 rng(2);
  const auto f = cosine_1d();
  const State s = random_state(rng, 1);
  const auto c0 = corrected_potentials(s, *f, 0.0);
  CHECK(c0.v == f->v(s.q));
  CHECK(c0.a(0) == f->a(s.q)(0));
  CHECK(c0.asq == doctest::Approx(asq(*f, s.q)));

  const State centred = make_packet_state<double>(Vec::Zero(1), Vec::Zero(1), Mat::Zero(1, 1),
                                                  Mat::Identity(1, 1));
  CHECK(corrected_potentials(centred, *f, 0.1).a(0) == doctest::Approx(1 - 0.1 / 4));

  const auto lin = sgwp::test::random_quadratic_linear(rng, 3);
  const State s3 = random_state(rng, 3);
  CHECK(corrected_potentials(s3, *lin, 0.4).a == lin->a(s3.q));
}

TEST_CASE("classical_rhs examples") {
  const auto free = classical_rhs(point(0.0, 2.0), *free_particle(1));
  CHECK(free.q(0) == 2.0);
  CHECK(free.p(0) == 0.0);

  const auto z = classical_rhs(point(0.5, -1.0), *cosine_1d());
  CHECK(z.q(0) == doctest::Approx(-1.87758).epsilon(1e-5));
  CHECK(z.p(0) == doctest::Approx(0.47943).epsilon(1e-5));

  // Hamilton's equations by finite differences of H0 at random points.
  std::mt19937_64 rng(3);
  for (const auto& f : {cosine_1d(), quartic_rotational_2d()}) {
    for (int i = 0; i < 20; ++i) {
      const ClassicalPoint w{random_vec(rng, f->dim(), 2), random_vec(rng, f->dim(), 2)};
      const auto exact = classical_rhs(w, *f);
      const auto fd = fd_classical_rhs(w, *f);
      CHECK((exact.q - fd.q).norm() < 1e-7);
      CHECK((exact.p - fd.p).norm() < 1e-7 * std::max(1.0, exact.p.norm()));
    }
  }
  Vec q(2), p(2);
  q << 1, 0;
  p << 0, 1;
  const auto r = classical_rhs(ClassicalPoint{q, p}, *quartic_rotational_2d());
  CHECK(r.q.isZero(0.0));
  CHECK((r.p - fd_classical_rhs(ClassicalPoint{q, p}, *quartic_rotational_2d()).p).norm() < 1e-8);
}

TEST_CASE("zhou_rhs examples") {
  const State s0 = make_packet_state<double>(Vec::Zero(1), Vec::Zero(1), Mat::Zero(1, 1),
                                             Mat::Identity(1, 1));
  const State free = zhou_rhs(s0, *free_particle(1));
  CHECK(free.A(0, 0) == 1.0);
  CHECK(free.B(0, 0) == 0.0);

  const State r = zhou_rhs(state_1d_reference(), *cosine_1d());
  CHECK(r.A(0, 0) == doctest::Approx(1.87758).epsilon(1e-5));
  CHECK(r.B(0, 0) == doctest::Approx(-2 * std::sin(0.5)).epsilon(1e-14));
  CHECK(r.B(0, 0) == doctest::Approx(-0.95885).epsilon(1e-5));

  std::mt19937_64 rng(4);
  for (const auto& f : {cosine_1d(), quartic_rotational_2d(), free_particle(3)}) {
    for (int i = 0; i < 20; ++i) {
      const State s = random_state(rng, f->dim());
      const State zr = zhou_rhs(s, *f);
      const auto cr = classical_rhs(ClassicalPoint{s.q, s.p}, *f);
      CHECK((zr.q - cr.q).cwiseAbs().maxCoeff() <= 1e-13);
      CHECK((zr.p - cr.p).cwiseAbs().maxCoeff() <= 1e-13);
    }
  }
}

TEST_CASE("semiclassical_rhs examples") {
  std::mt19937_64 rng(5);
  for (const auto& f : {cosine_1d(), quartic_rotational_2d()}) {
    for (int i = 0; i < 10; ++i) {
      const State s = random_state(rng, f->dim());
      CHECK(max_abs(semiclassical_rhs(s, *f, 0.0) - zhou_rhs(s, *f)) <= 1e-14);
    }
  }
  const State r = semiclassical_rhs(state_1d_reference(), *cosine_1d(), 0.5);
  CHECK(r.q(0) == doctest::Approx(-1 - std::cos(0.5) + 0.5 / 4 * std::cos(0.5)).epsilon(1e-14));
  CHECK(r.q(0) == doctest::Approx(-1.76788).epsilon(1e-5));
}

TEST_CASE("exactness regime: semiclassical and Zhou fields coincide") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 1 + trial % 3;
    const auto f = sgwp::test::random_quadratic_linear(rng, d);
    const State s = random_state(rng, d);
    const double hbar = sgwp::test::uniform(rng, 0.01, 1.0);
    CHECK(max_abs(semiclassical_rhs(s, *f, hbar) - zhou_rhs(s, *f)) <= 1e-12);
  }
}

TEST_CASE("width rates are symmetric") {
  std::mt19937_64 rng(7);
  for (const auto& f : {cosine_1d(), quartic_rotational_2d(), free_particle(3)}) {
    for (int i = 0; i < 20; ++i) {
      const State s = random_state(rng, f->dim());
      const State r = semiclassical_rhs(s, *f, 0.3);
      CHECK((r.A - r.A.transpose()).cwiseAbs().maxCoeff() <= 1e-13);
      CHECK((r.B - r.B.transpose()).cwiseAbs().maxCoeff() <= 1e-13);
    }
  }
}

TEST_CASE("bracket_rhs examples") {
  std::mt19937_64 rng(8);
  const double m = 1.3;
  for (int d = 1; d <= 3; ++d) {
    const State s = random_state(rng, d);
    const State r = bracket_rhs([&](const State& t) { return t.p.squaredNorm() / (2 * m); }, s,
                                0.2);
    CHECK((r.q - s.p / m).norm() < 1e-9);
    CHECK(r.p.norm() < 1e-12);
    CHECK(r.A.norm() < 1e-12);
    CHECK(r.B.norm() < 1e-12);
  }

  const State s0 = make_packet_state<double>(Vec::Zero(1), Vec::Zero(1), Mat::Zero(1, 1),
                                             Mat::Identity(1, 1));
  const double hbar = 0.1;
  const State w = bracket_rhs(
      [&](const State& t) {
        return hbar / (4 * m) * (t.B.inverse() * (t.A * t.A + t.B * t.B)).trace();
      },
      s0, hbar);
  CHECK(w.A(0, 0) == doctest::Approx(1 / m).epsilon(1e-8));
  CHECK(std::abs(w.B(0, 0)) < 1e-9);

  CHECK_THROWS_AS(bracket_rhs([](const State&) { return 0.0; }, s0, 0.0),
                  std::invalid_argument);
}

TEST_CASE("semiclassical_rhs is the Hamiltonian vector field of H_hbar") {
  const auto cosine = cosine_1d();
  const double hbar = 0.1;
  const State ref = state_1d_reference();
  const State oracle = bracket_rhs(
      [&](const State& t) { return semiclassical_hamiltonian(t, *cosine, hbar); }, ref, hbar);
  CHECK(max_abs(oracle - semiclassical_rhs(ref, *cosine, hbar)) <= 1e-6);

  std::mt19937_64 rng(9);
  for (const auto& f : {cosine_1d(), quartic_rotational_2d()}) {
    for (int i = 0; i < 20; ++i) {
      const State s = random_state(rng, f->dim());
      const double h = sgwp::test::uniform(rng, 0.01, 1.0);
      const State exact = semiclassical_rhs(s, *f, h);
      const State fd =
          bracket_rhs([&](const State& t) { return semiclassical_hamiltonian(t, *f, h); }, s, h);
      CHECK(state_norm(exact - fd) <= 1e-5 * std::max(1.0, state_norm(exact)));
    }
  }
}

TEST_CASE("the bracket oracle detects a sign error in an hbar term") {
  const auto f = cosine_1d();
  const double hbar = 0.5;
  const State s = state_1d_reference();
  State broken = semiclassical_rhs(s, *f, hbar);
  broken.q(0) -= 2 * hbar / 4 * std::cos(0.5);
  const State fd =
      bracket_rhs([&](const State& t) { return semiclassical_hamiltonian(t, *f, hbar); }, s, hbar);
  CHECK(state_norm(broken - fd) > 1e-2);
}

TEST_CASE("TimeGrid") {
  const TimeGrid whole(0.01, 3.0);
  CHECK(whole.steps() == 300);
  CHECK(whole.last_step == 0.0);
  const TimeGrid partial(0.01, 2 * std::numbers::pi);
  CHECK(partial.steps() == 629);
  CHECK(partial.time(629) == doctest::Approx(2 * std::numbers::pi).epsilon(1e-15));
  CHECK(partial.step(629) < 0.01);
  CHECK(TimeGrid(0.01, 0.0).steps() == 0);
  CHECK_THROWS(TimeGrid(0.0, 1.0));
  CHECK_THROWS(TimeGrid(0.1, -1.0));
}

TEST_CASE("rk4_integrate examples") {
  const auto free = free_particle(1);
  auto free_rhs = [&](const ClassicalPoint& z) { return classical_rhs(z, *free); };
  const auto t1 = rk4_integrate(free_rhs, point(0.0, 1.0), 0.01, 1.0);
  CHECK(t1.completed());
  CHECK(t1.states.size() == 101);
  CHECK(t1.states.back().q(0) == doctest::Approx(1.0).epsilon(1e-14));

  const auto osc = sgwp::test::harmonic_1d();
  const auto t2 = rk4_integrate([&](const ClassicalPoint& z) { return classical_rhs(z, *osc); },
                                point(1.0, 0.0), 0.01, 2 * std::numbers::pi);
  CHECK(t2.times.back() == doctest::Approx(2 * std::numbers::pi).epsilon(1e-15));
  CHECK(std::abs(t2.states.back().q(0) - 1.0) < 1e-8);

  const auto f = cosine_1d();
  const double hbar = 0.1;
  MonitorSet<State> mon{{"Hhbar"}, [&](const State& s) {
                          return std::vector<double>{semiclassical_hamiltonian(s, *f, hbar)};
                        }};
  const auto t3 = rk4_integrate([&](const State& s) { return semiclassical_rhs(s, *f, hbar); },
                                state_1d_reference(), 0.01, 3.0, mon);
  REQUIRE(t3.completed());
  CHECK(t3.times.size() == 301);
  CHECK(t3.monitors.size() == 301);
  const double h0 = t3.monitors.front()[0];
  for (const auto& row : t3.monitors) CHECK(std::abs(row[0] - h0) / std::abs(h0) < 1e-7);
}

TEST_CASE("rk4_integrate aborts on loss of positive definiteness and keeps the prefix") {
  State s = make_packet_state<double>(Vec::Zero(1), Vec::Zero(1), Mat::Zero(1, 1),
                                      Mat::Identity(1, 1));
  auto shrink = [](const State& y) {
    State r = y;
    r.q.setZero();
    r.p.setZero();
    r.A.setZero();
    r.B = Mat::Constant(1, 1, -1.0);
    return r;
  };
  // B = 1 - t reaches zero at t = 1; dt = 1/8 keeps the arithmetic exact.
  const auto traj = rk4_integrate(shrink, s, 0.125, 2.0);
  REQUIRE_FALSE(traj.completed());
  CHECK(traj.abort->step == 8);
  CHECK(traj.states.size() == 8);
  CHECK(traj.abort->reason.find("positive definite") != std::string::npos);

  auto blow_up = [](const ClassicalPoint& z) {
    return ClassicalPoint{z.q * 0.0 + Vec::Constant(1, INFINITY), z.p * 0.0};
  };
  const auto t2 = rk4_integrate(blow_up, point(0, 0), 0.1, 1.0);
  REQUIRE_FALSE(t2.completed());
  CHECK(t2.abort->step == 1);
  CHECK(t2.states.size() == 1);
}

TEST_CASE("energy conservation along trajectories") {
  // Classical H0, both reference models, t <= 10.
  for (const auto& [f, z0] :
       {std::pair{cosine_1d(), point(0.5, -1.0)},
        std::pair{quartic_rotational_2d(),
                  ClassicalPoint{state_2d_reference().q, state_2d_reference().p}}}) {
    const auto traj = rk4_integrate(
        [&](const ClassicalPoint& z) { return classical_rhs(z, *f); }, z0, 0.01, 10.0);
    REQUIRE(traj.completed());
    const double e0 = classical_hamiltonian(z0, *f);
    double drift = 0;
    for (const auto& z : traj.states)
      drift = std::max(drift, std::abs(classical_hamiltonian(z, *f) - e0) / std::abs(e0));
    CHECK(drift < 1e-7);
  }

  // Semiclassical H_hbar. The 1D example holds at dt = 0.01 over t <= 3 (later
  // the packet spreads, B -> 0 and the flow stiffens). The 2D packet has
  // fast width dynamics and RK4 truncation dominates there at dt = 0.01 (see
  // the acceptance suite), so the invariant is checked at dt = 0.0005.
  for (double hbar : {0.5, 0.1, 0.01}) {
    const auto f = cosine_1d();
    const auto traj = rk4_integrate(
        [&](const State& s) { return semiclassical_rhs(s, *f, hbar); }, state_1d_reference(),
        0.01, 3.0);
    REQUIRE(traj.completed());
    const double e0 = semiclassical_hamiltonian(traj.states.front(), *f, hbar);
    double drift = 0;
    for (const auto& s : traj.states)
      drift = std::max(drift, std::abs(semiclassical_hamiltonian(s, *f, hbar) - e0) / e0);
    CHECK(drift < 1e-7);
  }
  const auto f2 = quartic_rotational_2d();
  const auto traj = rk4_integrate(
      [&](const State& s) { return semiclassical_rhs(s, *f2, 0.1); }, state_2d_reference(),
      0.0005, 10.0);
  REQUIRE(traj.completed());
  const double e0 = semiclassical_hamiltonian(traj.states.front(), *f2, 0.1);
  double drift = 0;
  for (std::size_t i = 0; i < traj.states.size(); i += 10)
    drift = std::max(drift, std::abs(semiclassical_hamiltonian(traj.states[i], *f2, 0.1) - e0) / e0);
  CHECK(drift < 1e-7);
}
