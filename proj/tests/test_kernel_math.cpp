#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "rkhawkes/errors.hpp"
#include "rkhawkes/kernel_math.hpp"

using namespace rkhawkes;

namespace {

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_SUITE("kernel_math") {

TEST_CASE("gauss kernel values") {
  const KernelConfig cfg{1.0, 5.0};
  CHECK(gauss_kernel(0.3, 0.3, cfg) == 1.0);
  CHECK(gauss_kernel(1.0, 0.0, cfg) == doctest::Approx(0.36787944117144233).epsilon(1e-15));
  CHECK(gauss_kernel(0.2, 1.7, cfg) == gauss_kernel(1.7, 0.2, cfg));
  rkhawkes::Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const double v = gauss_kernel(2 * rng.uniform(), 2 * rng.uniform(), {100 * rng.uniform_open_closed(), 1});
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS((KernelConfig{0.0, 1.0}.validate()), ConfigError);
  CHECK_THROWS_AS((KernelConfig{1.0, -1.0}.validate()), ConfigError);
}

TEST_CASE("erf_gamma against a multiprecision erf") {
  CHECK(erf_gamma(0.0, 3.0) == 0.0);
  CHECK(erf_gamma(10.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rel_err(erf_gamma(0.5, 4.0), 0.5 * oracle::erf_mp(1.0)) < 1e-12);
  rkhawkes::Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    const double gamma = std::pow(10.0, 3.0 * rng.uniform() - 1.0);
    const double x = 8.0 * rng.uniform() - 4.0;
    const double ref = oracle::erf_mp(std::sqrt(gamma) * x) / std::sqrt(gamma);
    CHECK(std::abs(erf_gamma(x, gamma) - ref) <= 1e-12 * std::max(std::abs(ref), 1e-3));
    CHECK(erf_gamma(-x, gamma) == -erf_gamma(x, gamma));
  }
}

TEST_CASE("erf_gamma and G_gamma derivatives by finite differences") {
  const double h = 1e-5;
  for (double gamma : {1.0, 10.0, 100.0})
    for (double x : {-0.8, -0.1, 0.05, 0.3, 1.1}) {
      const double fd_erf = (erf_gamma(x + h, gamma) - erf_gamma(x - h, gamma)) / (2 * h);
      const double exact = 2.0 / std::sqrt(std::numbers::pi) * std::exp(-gamma * x * x);
      CHECK(std::abs(fd_erf - exact) <= 1e-6 * std::max(exact, 1e-3));
      const double fd_G = (G_gamma(x + h, gamma) - G_gamma(x - h, gamma)) / (2 * h);
      CHECK(std::abs(fd_G - erf_gamma(x, gamma)) <= 1e-6 * std::max(std::abs(erf_gamma(x, gamma)), 1e-3));
    }
}

TEST_CASE("G_gamma is the antiderivative of erf_gamma") {
  CHECK(G_gamma(0.0, 2.0) == 0.0);
  CHECK(G_gamma(0.9, 3.0) == G_gamma(-0.9, 3.0));
  const double q = oracle::quad([](double u) { return erf_gamma(u, 1.0); }, 0.0, 0.7, 1e-14);
  CHECK(std::abs(G_gamma(0.7, 1.0) - q) <= 1e-10);
}

TEST_CASE("s_ell small cases") {
  const KernelConfig cfg{2.0, 1.0};
  const std::vector<double> none;
  CHECK(s_ell(1.0, 2.0, none, cfg) == 0.0);
  const std::vector<double> one{0.5};
  CHECK(s_ell(0.5, 0.9, one, cfg) == 0.0);  // lag 0 is not active
  CHECK(s_ell(0.9, 1.2, one, cfg) == doctest::Approx(gauss_kernel(0.4, 0.7, cfg)));
}

TEST_CASE("s_ell matches the brute-force double sum and is symmetric") {
  rkhawkes::Rng rng(4);
  for (int rep = 0; rep < 50; ++rep) {
    const KernelConfig cfg{std::pow(10.0, std::floor(3 * rng.uniform())), rng.uniform() < 0.5 ? 1.0 : 5.0};
    const auto ev = oracle::random_events(rng, 1, 10.0, 10);
    const double x = 10 * rng.uniform(), y = 10 * rng.uniform();
    const double ref = oracle::s_ell(x, y, ev.times(0), cfg.gamma, cfg.support);
    CHECK(s_ell(x, y, ev.times(0), cfg) == doctest::Approx(ref).epsilon(1e-13));
    CHECK(s_ell(x, y, ev.times(0), cfg) == doctest::Approx(s_ell(y, x, ev.times(0), cfg)).epsilon(1e-14));
  }
}

TEST_CASE("closed-form integrals match quadrature") {
  rkhawkes::Rng rng(5);
  for (int rep = 0; rep < 30; ++rep) {
    const KernelConfig cfg{std::pow(10.0, std::floor(3 * rng.uniform())), rng.uniform() < 0.5 ? 1.0 : 5.0};
    const double T = 12.0;
    const auto ev = oracle::random_events(rng, 1, T, 6);
    const auto t = ev.times(0);
    const double x = T * rng.uniform();
    const double lag = cfg.support * rng.uniform();

    const double iq = oracle::int_s_quad(x, T, t, cfg.gamma, cfg.support);
    const double ic = int_s(x, T, t, cfg);
    CHECK(std::abs(ic - iq) <= 1e-8 * std::max(std::abs(iq), 1e-12) + 1e-14);

    const double rq = oracle::r_quad(lag, T, t, cfg.gamma, cfg.support);
    CHECK(std::abs(r_ell_at(lag, T, t, cfg) - rq) <= 1e-8 * std::max(rq, 1e-12) + 1e-14);

    const double dq = oracle::double_int_s_quad(T, t, cfg.gamma, cfg.support);
    const double dc = double_int_s(T, t, cfg);
    CHECK(dc >= 0.0);
    CHECK(std::abs(dc - dq) <= 1e-6 * std::max(dq, 1e-12) + 1e-14);
  }
}

TEST_CASE("integrals of an empty or inactive set vanish") {
  const KernelConfig cfg{1.0, 1.0};
  const std::vector<double> none, one{3.0};
  CHECK(int_s(2.0, 10.0, none, cfg) == 0.0);
  CHECK(double_int_s(10.0, none, cfg) == 0.0);
  CHECK(r_ell_at(0.4, 10.0, none, cfg) == 0.0);
  CHECK(int_s(2.0, 10.0, one, cfg) == 0.0);
}

TEST_CASE("one full-window event has the one-term forms") {
  const KernelConfig cfg{1.0, 5.0};
  const std::vector<double> one{1.0};
  const double T = 20.0, A = 5.0;
  const double sp = std::sqrt(std::numbers::pi) / 2.0;
  CHECK(r_ell_at(A / 2, T, one, cfg) == doctest::Approx(sp * 2.0 * erf_gamma(A / 2, 1.0)).epsilon(1e-14));
  CHECK(double_int_s(T, one, cfg) == doctest::Approx(oracle::double_int_s_quad(T, one, 1.0, A)).epsilon(1e-9));
}

TEST_CASE("event at the horizon has an empty window") {
  const KernelConfig cfg{1.0, 5.0};
  const std::vector<double> last{10.0};
  CHECK(r_ell_at(1.0, 10.0, last, cfg) == 0.0);
  CHECK(double_int_s(10.0, last, cfg) == 0.0);
}

TEST_CASE("q_ujl_at is a sum of active bumps") {
  const KernelConfig cfg{3.0, 1.0};
  const std::vector<double> ev{1.0, 1.5, 2.2, 4.0, 4.1};
  CHECK(q_ujl_at(0.3, 0.5, ev, cfg) == 0.0);
  CHECK(q_ujl_at(0.3, 1.2, ev, cfg) == doctest::Approx(gauss_kernel(0.3, 0.2, cfg)));
  for (double tu : {2.0, 2.3, 4.5, 5.05})
    for (double x : {0.0, 0.4, 0.9})
      CHECK(q_ujl_at(x, tu, ev, cfg) == doctest::Approx(oracle::q_sum(x, tu, ev, 3.0, 1.0)).epsilon(1e-14));
}

TEST_CASE("RFunction agrees with r_ell_at") {
  rkhawkes::Rng rng(8);
  for (int rep = 0; rep < 20; ++rep) {
    const KernelConfig cfg{std::pow(10.0, std::floor(3 * rng.uniform())), 5.0};
    const auto ev = oracle::random_events(rng, 1, 15.0, 10);
    const RFunction r(15.0, ev.times(0), cfg);
    for (double x : {0.0, 0.3, 2.5, 4.9, 5.0})
      CHECK(r(x) == doctest::Approx(r_ell_at(x, 15.0, ev.times(0), cfg)).epsilon(1e-12));
    CHECK(r.squared_norm() == doctest::Approx(double_int_s(15.0, ev.times(0), cfg)).epsilon(1e-12));
  }
}

}  // TEST_SUITE
