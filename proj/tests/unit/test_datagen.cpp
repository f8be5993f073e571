#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "torrent/datagen.hpp"
#include "torrent/instance_io.hpp"

using namespace torrent;

namespace {

InstanceSpec base_spec(Index p, Index n, double alpha, double sigma, std::uint64_t seed) {
  InstanceSpec spec;
  spec.p = p;
  spec.n = n;
  spec.alpha = alpha;
  spec.sigma = sigma;
  spec.seed = seed;
  return spec;
}

Index support_size(const Vector& b) {
  Index count = 0;
  for (Index i = 0; i < b.size(); ++i) {
    if (b[i] != 0.0) ++count;
  }
  return count;
}

}  // namespace

TEST_CASE("clean instances reproduce the responses exactly") {
  const auto inst = gen_instance(base_spec(4, 50, 0.0, 0.0, 1));
  CHECK((inst.y - inst.x.transpose() * inst.w_star).norm() == 0.0);
  CHECK(inst.clean_set == full_set(50));
  CHECK(inst.b.norm() == 0.0);
  CHECK(inst.eps.norm() == 0.0);
  CHECK(inst.w_star.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("corruption support has exactly floor(alpha n) entries within bounds") {
  const auto spec = base_spec(3, 100, 0.2, 0.0, 2);
  const auto inst = gen_instance(spec);
  CHECK(support_size(inst.b) == 20);
  const double bound = 5.0 * (inst.x.transpose() * inst.w_star).cwiseAbs().maxCoeff();
  for (Index i = 0; i < 100; ++i) {
    CHECK(std::abs(inst.b[i]) <= bound);
  }
  // clean_set is the exact complement of the corruption support.
  ActiveSet support;
  for (Index i = 0; i < 100; ++i) {
    if (inst.b[i] != 0.0) support.push_back(i);
  }
  CHECK(set_complement(support, 100) == inst.clean_set);
  CHECK(static_cast<Index>(inst.clean_set.size()) == 80);
}

TEST_CASE("same seed gives bit-identical instances") {
  const auto spec = base_spec(5, 80, 0.3, 0.1, 77);
  const auto a = gen_instance(spec);
  const auto b = gen_instance(spec);
  CHECK((a.x - b.x).norm() == 0.0);
  CHECK((a.y - b.y).norm() == 0.0);
  CHECK((a.b - b.b).norm() == 0.0);
  CHECK((a.eps - b.eps).norm() == 0.0);
  CHECK(a.clean_set == b.clean_set);
}

TEST_CASE("component streams are independent across knob changes") {
  const auto base = gen_instance(base_spec(4, 60, 0.25, 0.0, 9));

  SUBCASE("changing sigma leaves X, b, and the support fixed") {
    auto spec = base_spec(4, 60, 0.25, 0.5, 9);
    const auto noisy = gen_instance(spec);
    CHECK((noisy.x - base.x).norm() == 0.0);
    CHECK((noisy.b - base.b).norm() == 0.0);
    CHECK(noisy.clean_set == base.clean_set);
    CHECK(noisy.eps.norm() > 0.0);
  }
  SUBCASE("changing the magnitude rescales the same corruption draws") {
    auto spec = base_spec(4, 60, 0.25, 0.0, 9);
    spec.corruption_scale = 20.0;
    const auto big = gen_instance(spec);
    CHECK((big.x - base.x).norm() == 0.0);
    CHECK(big.clean_set == base.clean_set);
    CHECK((big.b - 4.0 * base.b).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("changing alpha leaves the design fixed") {
    const auto more = gen_instance(base_spec(4, 60, 0.4, 0.0, 9));
    CHECK((more.x - base.x).norm() == 0.0);
  }
}

TEST_CASE("reconstruction identity holds on generated instances") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto inst = gen_instance(base_spec(6, 90, 0.3, 0.2, 1000 + seed));
    const double rel =
        (inst.y - inst.x.transpose() * inst.w_star - inst.b - inst.eps).norm() /
        (inst.y.norm() + 1.0);
    CHECK(rel <= 1e-12);
  }
}

TEST_CASE("identity covariance concentrates empirically") {
  const auto inst = gen_instance(base_spec(5, 50000, 0.0, 0.0, 31));
  const Matrix cov = (inst.x * inst.x.transpose()) / 50000.0;
  CHECK((cov - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() <= 0.05);
}

TEST_CASE("sparse ground-truth models honor their support size") {
  auto spec = base_spec(30, 40, 0.0, 0.0, 3);
  spec.sparsity_s_star = 4;
  const auto inst = gen_instance(spec);
  CHECK(support_size(inst.w_star) <= 4);
  CHECK(inst.w_star.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("diagonal-uniform covariance scales the design rows") {
  auto spec = base_spec(4, 20000, 0.0, 0.0, 17);
  spec.covariance = Covariance::diagonal_uniform(0.0, 5.0);
  const auto inst = gen_instance(spec);
  const Vector row_var = inst.x.array().square().rowwise().mean();
  for (Index i = 0; i < 4; ++i) {
    CHECK(row_var[i] <= 5.5);
  }
  // Same seed, identity covariance: different scales, same underlying draws.
  const auto base = gen_instance(base_spec(4, 20000, 0.0, 0.0, 17));
  const double ratio0 = inst.x(0, 0) / base.x(0, 0);
  const double ratio1 = inst.x(0, 1) / base.x(0, 1);
  CHECK(ratio0 == doctest::Approx(ratio1).epsilon(1e-9));
}

TEST_CASE("adaptive corruption values follow the shifted model") {
  SUBCASE("hand-checked p = 1 example") {
    Matrix x = Matrix::Ones(1, 4);
    Model w_star(1), tilde(1);
    w_star << 2;
    tilde << 7;
    const Vector b = adaptive_corruptions(x, w_star, tilde, {2, 3});
    CHECK(b[0] == 0.0);
    CHECK(b[1] == 0.0);
    CHECK(b[2] == doctest::Approx(5.0));
    CHECK(b[3] == doctest::Approx(5.0));
  }
  SUBCASE("shift to the same model corrupts nothing") {
    const auto inst = gen_instance(base_spec(3, 30, 0.0, 0.0, 5));
    const Vector b = adaptive_adversary(inst.x, inst.w_star, inst.w_star, 0.4, 11);
    CHECK(b.norm() == 0.0);
  }
  SUBCASE("corrupted responses are exactly consistent with theta_tilde") {
    auto spec = base_spec(4, 40, 0.5, 0.0, 19);
    spec.adversary = AdversaryKind::AdaptiveModelShift;
    Model tilde = Model::Zero(4);
    tilde << 1, -1, 0.5, 0.25;
    spec.theta_tilde = tilde;
    const auto inst = gen_instance(spec);
    Index corrupted = 0;
    for (Index i = 0; i < 40; ++i) {
      if (inst.b[i] != 0.0) {
        ++corrupted;
        CHECK(inst.y[i] == doctest::Approx(inst.x.col(i).dot(tilde)).epsilon(1e-12));
      }
    }
    CHECK(corrupted == 20);
  }
  SUBCASE("seeded adversary uses a floor(alpha n) support") {
    const auto inst = gen_instance(base_spec(3, 50, 0.0, 0.0, 23));
    Model tilde = inst.w_star;
    tilde[0] += 2.0;
    const Vector b = adaptive_adversary(inst.x, inst.w_star, tilde, 0.3, 29);
    CHECK(support_size(b) == 15);
  }
}

TEST_CASE("invalid specs are rejected") {
  CHECK_THROWS_AS(gen_instance(base_spec(0, 10, 0.0, 0.0, 1)), BadSpec);
  CHECK_THROWS_AS(gen_instance(base_spec(2, 10, 0.5, 0.0, 1)), BadSpec);  // oblivious cap
  CHECK_THROWS_AS(gen_instance(base_spec(2, 10, -0.1, 0.0, 1)), BadSpec);
  CHECK_THROWS_AS(gen_instance(base_spec(2, 10, 0.0, -1.0, 1)), BadSpec);
  auto bad_sparse = base_spec(2, 10, 0.0, 0.0, 1);
  bad_sparse.sparsity_s_star = 3;
  CHECK_THROWS_AS(gen_instance(bad_sparse), BadSpec);
  auto adaptive_half = base_spec(2, 10, 0.5, 0.0, 1);
  adaptive_half.adversary = AdversaryKind::AdaptiveModelShift;
  CHECK_NOTHROW(gen_instance(adaptive_half));
}

TEST_CASE("instance files round-trip losslessly") {
  const auto dir = std::filesystem::temp_directory_path() / "torrent_io_test";
  std::filesystem::remove_all(dir);
  const auto spec = base_spec(3, 25, 0.2, 0.05, 99);
  const auto inst = gen_instance(spec);
  save_instance(dir, spec, inst);

  const LoadedInstance loaded = load_instance(dir);
  CHECK((loaded.instance.x - inst.x).norm() == 0.0);
  CHECK((loaded.instance.y - inst.y).norm() == 0.0);
  CHECK((loaded.instance.b - inst.b).norm() == 0.0);
  CHECK((loaded.instance.eps - inst.eps).norm() == 0.0);
  CHECK((loaded.instance.w_star - inst.w_star).norm() == 0.0);
  CHECK(loaded.instance.clean_set == inst.clean_set);
  CHECK(loaded.spec.seed == 99);
  CHECK(loaded.spec.alpha == 0.2);

  SUBCASE("tampered data fails the digest check") {
    std::ofstream patch(dir / "data.csv", std::ios::app);
    patch << "tamper\r\n";
    patch.close();
    CHECK_THROWS(load_instance(dir));
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("adaptive and non-identity specs survive the file round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "torrent_io_test2";
  std::filesystem::remove_all(dir);

  auto spec = base_spec(3, 30, 0.4, 0.0, 7);
  spec.adversary = AdversaryKind::AdaptiveModelShift;
  spec.theta_tilde = (Model(3) << 0.5, -1.0, 2.0).finished();
  spec.covariance = Covariance::diagonal_uniform(0.5, 2.5);
  spec.sparsity_s_star = 2;
  const auto inst = gen_instance(spec);
  save_instance(dir, spec, inst);

  const LoadedInstance loaded = load_instance(dir);
  CHECK(loaded.spec.adversary == AdversaryKind::AdaptiveModelShift);
  REQUIRE(loaded.spec.theta_tilde.has_value());
  CHECK((*loaded.spec.theta_tilde - *spec.theta_tilde).norm() == 0.0);
  CHECK(loaded.spec.covariance.kind == Covariance::Kind::DiagonalUniform);
  CHECK(loaded.spec.covariance.low == 0.5);
  CHECK(loaded.spec.covariance.high == 2.5);
  REQUIRE(loaded.spec.sparsity_s_star.has_value());
  CHECK(*loaded.spec.sparsity_s_star == 2);
  CHECK((loaded.instance.x - inst.x).norm() == 0.0);
  CHECK((loaded.instance.w_star - inst.w_star).norm() == 0.0);
  std::filesystem::remove_all(dir);
}
