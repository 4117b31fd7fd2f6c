#include <doctest.h>

#include <cmath>
#include <memory>

#include "oracles.hpp"
#include "rkhawkes/errors.hpp"
#include "rkhawkes/objective.hpp"

using namespace rkhawkes;

namespace {

struct Instance {
  std::shared_ptr<const EventData> events;
  KernelConfig cfg;
  std::size_t m;
  PrecomputedMatrices mats;
  RkhsParams theta;
};

Instance random_instance(rkhawkes::Rng& rng, std::size_t max_n = 12, std::size_t max_m = 50) {
  Instance in;
  const std::size_t d = 1 + rng.below(3);
  const double T = 4.0 + 8.0 * rng.uniform();
  in.events = std::make_shared<const EventData>(oracle::random_events(rng, d, T, max_n));
  in.cfg = KernelConfig{std::pow(10.0, std::floor(3 * rng.uniform())), rng.uniform() < 0.5 ? 1.0 : 3.0};
  in.m = 2 + rng.below(max_m - 1);
  in.mats = build_matrices(*in.events, in.cfg, in.m);
  in.theta = oracle::random_params(rng, in.events, in.cfg);
  return in;
}

ObjectiveConfig config(const Instance& in, Criterion c, double eta, double omega = 100.0) {
  return ObjectiveConfig{LinkSpec{omega, c}, eta, &in.mats, 0.0};
}

// Flat vector of the free parameters in DimensionObjective order, all j.
std::vector<DimensionObjective> dimension_terms(const ObjectiveConfig& cfg, std::size_t d) {
  std::vector<DimensionObjective> out;
  for (std::size_t j = 0; j < d; ++j) out.emplace_back(cfg, j);
  return out;
}

}  // namespace

TEST_SUITE("objective") {

TEST_CASE("link pair values at zero") {
  const double w = 100.0, s0 = std::log(2.0) / w;
  const LinkPair mle = link_pair({w, Criterion::mle});
  CHECK(mle.phi1(0.0) == doctest::Approx(s0).epsilon(1e-15));
  CHECK(mle.phi2(0.0) == doctest::Approx(std::log(s0)).epsilon(1e-15));
  const LinkPair ls = link_pair({w, Criterion::ls});
  CHECK(ls.phi1(0.0) == doctest::Approx(s0 * s0).epsilon(1e-15));
  CHECK(ls.phi2(0.0) == doctest::Approx(2 * s0).epsilon(1e-15));
}

TEST_CASE("link pair derivatives by finite differences") {
  rkhawkes::Rng rng(21);
  for (auto c : {Criterion::mle, Criterion::ls})
    for (double w : {1.0, 10.0, 100.0}) {
      const LinkPair p = link_pair({w, c});
      for (int i = 0; i < 20; ++i) {
        const double x = 4.0 * rng.uniform() - 2.0;
        const double h = 1e-6;
        const double d1 = (p.phi1(x + h) - p.phi1(x - h)) / (2 * h);
        const double d2 = (p.phi2(x + h) - p.phi2(x - h)) / (2 * h);
        CHECK(std::abs(d1 - p.dphi1(x)) <= 1e-6 * std::max(1.0, std::abs(d1)));
        CHECK(std::abs(d2 - p.dphi2(x)) <= 1e-6 * std::max(1.0, std::abs(d2)));
      }
    }
}

TEST_CASE("log of softplus stays finite far in the negative range") {
  const LinkPair p = link_pair({100.0, Criterion::mle});
  CHECK(std::isfinite(p.phi2(-50.0)));
  CHECK(std::isfinite(p.dphi2(-50.0)));
  CHECK(p.dphi2(-50.0) == doctest::Approx(100.0));
}

TEST_CASE("zero parameters give the closed form") {
  rkhawkes::Rng rng(22);
  const auto ev = std::make_shared<const EventData>(oracle::random_events(rng, 2, 10.0, 8));
  const KernelConfig kc{1.0, 2.0};
  const auto mats = build_matrices(*ev, kc, 40);
  const auto theta = RkhsParams::zeros(ev, kc);
  const double w = 100.0, s0 = std::log(2.0) / w;
  const double expected = 2.0 * 10.0 * s0 - static_cast<double>(ev->total_count()) * std::log(s0);
  CHECK(objective_value(theta, {LinkSpec{w, Criterion::mle}, 1.0, &mats, 0.0}) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("matrix form equals the direct sum") {
  rkhawkes::Rng rng(23);
  for (int rep = 0; rep < 12; ++rep) {
    const Instance in = random_instance(rng, 6, 20);
    for (auto c : {Criterion::mle, Criterion::ls}) {
      const double eta = 0.7;
      const double direct = oracle::objective_direct(in.theta, in.m, eta, 100.0, c == Criterion::mle);
      const double matrix = objective_value(in.theta, config(in, c, eta));
      CHECK(std::abs(matrix - direct) <= 1e-8 * (1.0 + std::abs(direct)));
    }
  }
}

TEST_CASE("doubling eta adds exactly the penalty") {
  rkhawkes::Rng rng(24);
  const Instance in = random_instance(rng);
  const double f1 = objective_value(in.theta, config(in, Criterion::mle, 1.0));
  const double f2 = objective_value(in.theta, config(in, Criterion::mle, 2.0));
  const double f0 = objective_value(in.theta, config(in, Criterion::mle, 1e-300));
  CHECK(f2 - f1 == doctest::Approx(f1 - f0).epsilon(1e-9));
}

TEST_CASE("analytic gradient matches central differences") {
  rkhawkes::Rng rng(25);
  for (auto c : {Criterion::mle, Criterion::ls})
    for (int rep = 0; rep < 4; ++rep) {
      const Instance in = random_instance(rng, 8, 30);
      const ObjectiveConfig cfg = config(in, c, 0.5);
      for (const auto& f : dimension_terms(cfg, in.events->dims())) {
        const Eigen::VectorXd x = f.pack(in.theta);
        Eigen::VectorXd g;
        f.value_and_gradient(x, g);
        Eigen::VectorXd fd(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) {
          const double h = 1e-5 * std::max(1.0, std::abs(x[i]));
          Eigen::VectorXd xp = x, xm = x;
          xp[i] += h;
          xm[i] -= h;
          fd[i] = (f.value(xp) - f.value(xm)) / (2 * h);
        }
        CHECK((g - fd).norm() <= 1e-5 * std::max(1.0, g.norm()));
      }
    }
}

TEST_CASE("penalty gradient vanishes at alpha = 0") {
  rkhawkes::Rng rng(26);
  Instance in = random_instance(rng);
  for (auto& row : in.theta.alpha)
    for (auto& a : row) a.setZero();
  in.theta.b.setZero();
  const ObjectiveConfig lo = config(in, Criterion::mle, 1.0), hi = config(in, Criterion::mle, 50.0);
  const RkhsGradient g1 = objective_gradient(in.theta, lo), g2 = objective_gradient(in.theta, hi);
  for (std::size_t j = 0; j < g1.alpha.size(); ++j)
    for (std::size_t l = 0; l < g1.alpha[j].size(); ++l) CHECK((g1.alpha[j][l] - g2.alpha[j][l]).norm() == 0.0);
}

TEST_CASE("mle objective is midpoint convex along random segments") {
  rkhawkes::Rng rng(27);
  for (int rep = 0; rep < 10; ++rep) {
    const Instance in = random_instance(rng, 8, 30);
    const ObjectiveConfig cfg = config(in, Criterion::mle, 1.0, 10.0);
    for (const auto& f : dimension_terms(cfg, in.events->dims())) {
      const Eigen::VectorXd x = f.pack(in.theta);
      Eigen::VectorXd dir(x.size());
      for (Eigen::Index i = 0; i < dir.size(); ++i) dir[i] = 0.2 * (2 * rng.uniform() - 1);
      const double a = f.value(x), b = f.value(x + dir), mid = f.value(x + 0.5 * dir);
      CHECK(mid <= 0.5 * (a + b) + 1e-10 * (1 + std::abs(mid)));
    }
  }
}

TEST_CASE("shape mismatch is reported") {
  rkhawkes::Rng rng(28);
  const Instance a = random_instance(rng);
  const auto other = std::make_shared<const EventData>(EventData::empty(a.events->dims() + 1, 5.0));
  const auto theta = RkhsParams::zeros(other, a.cfg);
  CHECK_THROWS_AS(objective_value(theta, config(a, Criterion::mle, 1.0)), ShapeError);
}

TEST_CASE("exact likelihood of a homogeneous model") {
  const auto ev = std::make_shared<const EventData>(EventData(10.0, {{1.0, 2.0, 7.0}, {3.0}}));
  auto theta = RkhsParams::zeros(ev, {1.0, 1.0});
  theta.mu = {0.4, 0.4};
  const LikelihoodScore s = exact_neg_log_likelihood(theta, *ev, 1000);
  CHECK(s.neg_log_likelihood == doctest::Approx(2 * 0.4 * 10.0 - 4 * std::log(0.4)).epsilon(1e-12));
  CHECK(s.floored == 0);
}

TEST_CASE("zero intensity at an event is floored and counted") {
  const auto ev = std::make_shared<const EventData>(EventData(10.0, {{1.0, 1.5}}));
  auto theta = RkhsParams::zeros(ev, {1.0, 1.0});
  theta.mu = {0.2};
  theta.b(0, 0) = -1.0;  // kills the intensity right after the first event
  const LikelihoodScore s = exact_neg_log_likelihood(theta, *ev, 2000);
  CHECK(s.floored == 1);
  CHECK(std::isfinite(s.neg_log_likelihood));
}

TEST_CASE("exact likelihood is stable under grid refinement") {
  rkhawkes::Rng rng(29);
  const Instance in = random_instance(rng);
  const double a = exact_neg_log_likelihood(in.theta, *in.events, 4000).neg_log_likelihood;
  const double b = exact_neg_log_likelihood(in.theta, *in.events, 8000).neg_log_likelihood;
  CHECK(std::abs(a - b) <= 0.01 * std::abs(b));
}

}  // TEST_SUITE
