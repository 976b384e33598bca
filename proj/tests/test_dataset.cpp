#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "pgnn/dataset.hpp"

using namespace pgnn;

namespace {

Trajectory scalar_trajectory(double h, std::size_t n, const std::function<double(double)>& f) {
  Trajectory traj;
  traj.t0 = 0.0;
  traj.h = h;
  for (std::size_t k = 0; k < n; ++k) {
    Vec x(1);
    x << f(static_cast<double>(k) * h);
    traj.states.push_back(x);
  }
  return traj;
}

// A 1-d stand-in system spec for synthetic trajectories.
SystemSpec scalar_spec() {
  SystemSpec s = system_spec(SystemId::LotkaVolterra);
  s.dim = 1;
  return s;
}

}  // namespace

TEST_CASE("forward differences of a constant-slope trajectory") {
  // With a binary-representable timestep the differences are exact.
  const Trajectory traj = scalar_trajectory(0.25, 40, [](double t) { return t; });
  const Dataset ds = build_dataset(scalar_spec(), {traj});
  CHECK(ds.pairs.size() == 39);
  for (const auto& p : ds.pairs) CHECK(p.y(0) == 1.0);

  const Trajectory traj01 = scalar_trajectory(0.1, 40, [](double t) { return t; });
  const Dataset ds01 = build_dataset(scalar_spec(), {traj01});
  for (const auto& p : ds01.pairs) CHECK(p.y(0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("forward difference bias on t^2 at t = 0") {
  const Trajectory traj = scalar_trajectory(0.1, 10, [](double t) { return t * t; });
  const Dataset ds = build_dataset(scalar_spec(), {traj});
  CHECK(ds.pairs.front().t == 0.0);
  CHECK(ds.pairs.front().y(0) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("pair counting across trajectories") {
  std::vector<Trajectory> trajs(3, scalar_trajectory(0.05, 4000, [](double t) { return t; }));
  const Dataset ds = build_dataset(scalar_spec(), trajs);
  CHECK(ds.pairs.size() == 11997);
}

TEST_CASE("exact forward-difference oracle for a linear system") {
  // x' = a x integrated exactly: the forward difference at x_k equals
  // x_k * (e^{ah} - 1)/h.
  const double a = -0.8, h = 0.05;
  const Trajectory traj = scalar_trajectory(h, 200, [&](double t) { return std::exp(a * t); });
  const Dataset ds = build_dataset(scalar_spec(), {traj});
  const double factor = (std::exp(a * h) - 1.0) / h;
  for (const auto& p : ds.pairs) {
    CHECK(p.y(0) == doctest::Approx(p.x(0) * factor).epsilon(1e-10));
  }
}

TEST_CASE("build_dataset rejects short or inconsistent trajectories") {
  Trajectory tiny = scalar_trajectory(0.1, 1, [](double t) { return t; });
  CHECK_THROWS_AS(build_dataset(scalar_spec(), {tiny}), std::invalid_argument);

  Trajectory a = scalar_trajectory(0.1, 10, [](double t) { return t; });
  Trajectory b = scalar_trajectory(0.2, 10, [](double t) { return t; });
  CHECK_THROWS_AS(build_dataset(scalar_spec(), {a, b}), std::invalid_argument);

  CHECK_THROWS_AS(build_dataset(system_spec(SystemId::Lorenz), {a}), std::invalid_argument);
}

namespace {
Dataset synthetic_dataset(std::size_t n) {
  Trajectory traj = scalar_trajectory(0.1, n + 1, [](double t) { return t; });
  return build_dataset(scalar_spec(), {traj});
}
}  // namespace

TEST_CASE("split sizes, disjointness and coverage") {
  const Dataset ds = synthetic_dataset(100);
  const Split split = split_dataset(ds, 0.2, 42);
  CHECK(split.val_idx.size() == 20);
  CHECK(split.train_idx.size() == 80);

  std::set<int> all(split.train_idx.begin(), split.train_idx.end());
  for (int v : split.val_idx) CHECK(all.insert(v).second);  // disjoint
  CHECK(all.size() == 100);
}

TEST_CASE("split is deterministic per seed") {
  const Dataset ds = synthetic_dataset(500);
  const Split a = split_dataset(ds, 0.2, 7);
  const Split b = split_dataset(ds, 0.2, 7);
  CHECK(a.train_idx == b.train_idx);
  CHECK(a.val_idx == b.val_idx);
  const Split c = split_dataset(ds, 0.2, 8);
  CHECK(a.val_idx != c.val_idx);
}

TEST_CASE("split rounds the validation size") {
  const Dataset ds = synthetic_dataset(11997);
  const Split split = split_dataset(ds, 0.2, 0);
  CHECK(split.val_idx.size() == 2399);  // round(2399.4)
}

TEST_CASE("split precondition failures") {
  const Dataset ds = synthetic_dataset(4);
  CHECK_THROWS_AS(split_dataset(ds, 0.2, 0), std::invalid_argument);
  const Dataset ok = synthetic_dataset(10);
  CHECK_THROWS_AS(split_dataset(ok, 0.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(split_dataset(ok, 1.0, 0), std::invalid_argument);
}

TEST_CASE("batches chunk a seeded permutation of the training set") {
  const Dataset ds = synthetic_dataset(100);
  const Split split = split_dataset(ds, 0.2, 42);

  const auto bs = batches(split, 32, 0, 42);
  REQUIRE(bs.size() == 3);
  CHECK(bs[0].size() == 32);
  CHECK(bs[1].size() == 32);
  CHECK(bs[2].size() == 16);

  // Every training index exactly once; no validation index anywhere.
  std::multiset<int> seen;
  const std::set<int> val(split.val_idx.begin(), split.val_idx.end());
  for (const auto& b : bs) {
    for (int idx : b) {
      seen.insert(idx);
      CHECK(val.count(idx) == 0);
    }
  }
  CHECK(seen.size() == split.train_idx.size());
  for (int idx : split.train_idx) CHECK(seen.count(idx) == 1);
}

TEST_CASE("oversized batch returns one permutation of everything") {
  const Dataset ds = synthetic_dataset(20);
  const Split split = split_dataset(ds, 0.2, 1);
  const auto bs = batches(split, 100, 0, 1);
  REQUIRE(bs.size() == 1);
  std::vector<int> sorted = bs[0];
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == split.train_idx);
}

TEST_CASE("batches are deterministic per (seed, epoch) and reshuffled across epochs") {
  const Dataset ds = synthetic_dataset(200);
  const Split split = split_dataset(ds, 0.2, 3);
  CHECK(batches(split, 16, 4, 9) == batches(split, 16, 4, 9));
  CHECK(batches(split, 16, 4, 9) != batches(split, 16, 5, 9));
  CHECK(batches(split, 16, 4, 9) != batches(split, 16, 4, 10));
}

TEST_CASE("batches preconditions") {
  const Dataset ds = synthetic_dataset(20);
  const Split split = split_dataset(ds, 0.2, 1);
  CHECK_THROWS_AS(batches(split, 0, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(batches(Split{}, 8, 0, 1), std::invalid_argument);
}
