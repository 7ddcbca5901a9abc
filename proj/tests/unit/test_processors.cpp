#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "mfp/error.hpp"
#include "mfp/montecarlo.hpp"
#include "mfp/processors.hpp"
#include "oracles.hpp"
#include "random_scenarios.hpp"

using namespace mfp;
using cplx = std::complex<double>;

namespace {

CVector vec(std::initializer_list<cplx> v) {
  CVector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (cplx x : v) out[i++] = x;
  return out;
}

ReplicaVector replica_of(CVector g) { return ReplicaVector::from_pressures({5000.0, 50.0}, std::move(g)); }

struct ReferenceFixture {
  Environment env{100.0, 1500.0, 200.0};
  ModeSet modes = solve_modes(env);
  std::vector<double> ranges = linspace(4000.0, 6000.0, 101);
  std::vector<double> depths = inset_depths(100.0, 49);
  SourceLocation source{5000.0, depths[24]};
};

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected mfp::Error");
  return Errc::kInvalidArgument;
}

}  // namespace

TEST_CASE("covariance: worked examples") {
  const auto a = covariance(MeasuredField::from(vec({1.0, 0.0}))).entries;
  CHECK(a(0, 0) == cplx(1.0));
  CHECK(a(0, 1) == cplx(0.0));
  CHECK(a(1, 1) == cplx(0.0));

  const auto b = covariance(MeasuredField::from(vec({1.0, cplx(0.0, 1.0)}))).entries;
  CHECK(b(0, 0) == cplx(1.0, 0.0));
  CHECK(b(0, 1) == cplx(0.0, -1.0));
  CHECK(b(1, 0) == cplx(0.0, 1.0));
  CHECK(b(1, 1) == cplx(1.0, 0.0));
}

TEST_CASE("covariance: Hermitian, PSD, trace equals field energy") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 20; ++t) {
    const auto p = testing_support::random_complex(rng, 7);
    const auto omega = covariance(MeasuredField::from(p)).entries;
    CHECK((omega - omega.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * omega.norm());
    CHECK(std::abs(omega.trace() - p.squaredNorm()) <= 1e-12 * p.squaredNorm());
    const auto probe = testing_support::random_complex(rng, 7);
    CHECK(probe.dot(omega * probe).real() >= -1e-12 * omega.norm() * probe.squaredNorm());
  }
  const std::vector<MeasuredField> shots{MeasuredField::from(vec({1.0, 0.0})), MeasuredField::from(vec({0.0, 1.0}))};
  const auto avg = covariance(shots).entries;
  CHECK(avg(0, 0) == cplx(0.5));
  CHECK(avg(1, 1) == cplx(0.5));
  CHECK(avg(0, 1) == cplx(0.0));
}

TEST_CASE("measured field rejects non-finite entries") {
  CHECK(code_of([] { MeasuredField::from(vec({1.0, cplx(NAN, 0.0)})); }) == Errc::kNonFiniteValue);
}

TEST_CASE("bartlett: matched noiseless replica returns the field energy") {
  ReferenceFixture fx;
  std::mt19937_64 rng(2);
  for (int t = 0; t < 10; ++t) {
    const auto array = random_vla(10, 41, 2.0, rng);
    const auto p = replica_vector(fx.modes, fx.env, fx.source, array);
    const double b = bartlett(covariance(MeasuredField::from(p.pressures)), p);
    CHECK(b == doctest::Approx(p.norm * p.norm).epsilon(1e-12));
  }
}

TEST_CASE("bartlett: orthogonal replica, scaling and errors") {
  const auto omega = covariance(MeasuredField::from(vec({1.0, 0.0})));
  CHECK(bartlett(omega, replica_of(vec({0.0, 1.0}))) == 0.0);

  const cplx alpha(0.3, -2.0);
  const auto p = vec({cplx(1, 2), cplx(-0.5, 0.1), cplx(0.7, 0.7)});
  const auto g = replica_of(vec({cplx(0.2, 1), cplx(1, 0), cplx(-0.3, 0.4)}));
  const double base = bartlett(covariance(MeasuredField::from(p)), g);
  const double scaled = bartlett(covariance(MeasuredField::from(alpha * p)), g);
  CHECK(scaled == doctest::Approx(std::norm(alpha) * base).epsilon(1e-12));

  CHECK(code_of([&] { bartlett(omega, replica_of(vec({0.0, 0.0}))); }) == Errc::kZeroReplica);
}

TEST_CASE("bartlett: property - Cauchy-Schwarz bound with equality for parallel replicas") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const auto p = testing_support::random_complex(rng, 6);
    const auto omega = covariance(MeasuredField::from(p));
    const double energy = p.squaredNorm();
    CHECK(bartlett(omega, replica_of(testing_support::random_complex(rng, 6))) <= energy * (1.0 + 1e-12));
    CHECK(bartlett(omega, replica_of(cplx(0.0, -3.0) * p)) == doctest::Approx(energy).epsilon(1e-12));
  }
}

TEST_CASE("adjacency: hand-evaluated three-sensor example") {
  const auto a = adjacency(replica_of(vec({1.0, 2.0, 4.0}))).entries;
  const double expected[3][3] = {{0.0, 0.5, 0.25}, {2.0, 0.0, 0.5}, {4.0, 2.0, 0.0}};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) CHECK(a(i, j) == cplx(0.5 * expected[i][j]));
  }
}

TEST_CASE("adjacency: sparsity pattern and ratio reciprocity") {
  std::mt19937_64 rng(4);
  for (std::size_t n : {3u, 4u, 7u, 12u}) {
    const auto a = adjacency(replica_of(testing_support::random_complex(rng, n))).entries;
    const auto N = static_cast<Eigen::Index>(n);
    for (Eigen::Index i = 0; i < N; ++i) {
      for (Eigen::Index j = 0; j < N; ++j) {
        const bool edge = j == (i + 1) % N || i == (j + 1) % N;
        if (!edge) {
          CHECK(a(i, j) == cplx(0.0));
        } else {
          CHECK(std::abs(a(i, j) * a(j, i) - 0.25) < 1e-14);
        }
      }
    }
  }
}

TEST_CASE("adjacency: degenerate and undersized replicas") {
  CHECK(code_of([] { adjacency(replica_of(vec({1.0, 0.0, 2.0}))); }) == Errc::kDegenerateReplica);
  CHECK(code_of([] { adjacency(replica_of(vec({1.0, 1e-13, 2.0}))); }) == Errc::kDegenerateReplica);
  CHECK_NOTHROW(adjacency(replica_of(vec({1.0, 1e-11, 2.0}))));
  CHECK(code_of([] { adjacency(replica_of(vec({1.0, 2.0}))); }) == Errc::kInvalidArgument);
  CHECK_FALSE(graph_usable(replica_of(vec({1.0, 2.0}))));
  CHECK_FALSE(graph_usable(replica_of(vec({1.0, 0.0, 2.0}))));
  CHECK(graph_usable(replica_of(vec({1.0, 3.0, 2.0}))));
}

TEST_CASE("shift_identity_residual: matched field is a unit eigenvector") {
  ReferenceFixture fx;
  const auto array = random_vla(10, 41, 2.0, std::uint64_t{5});
  const auto p = replica_vector(fx.modes, fx.env, fx.source, array);
  const auto a = adjacency(p);
  CHECK(shift_identity_residual(a, p.pressures) < 1e-10);
  CHECK(shift_identity_residual(a, cplx(-4.0, 2.5) * p.pressures) < 1e-10);

  // A candidate more than 1 km away does not satisfy the shift identity.
  const auto far = replica_vector(fx.modes, fx.env, {4000.0, 30.0}, array);
  const double mismatch = shift_identity_residual(a, far.pressures);
  CHECK(mismatch > 0.01);
  CHECK(shift_identity_residual(a, 7.0 * far.pressures) == doctest::Approx(mismatch).epsilon(1e-12));

  CHECK(code_of([&] { shift_identity_residual(a, CVector::Zero(10)); }) == Errc::kInvalidArgument);
  CHECK(code_of([&] { shift_identity_residual(a, CVector::Ones(3)); }) == Errc::kDimensionMismatch);
}

TEST_CASE("gft_basis: three-sensor example has spectrum {1, -1/2, -1/2}") {
  const auto a = adjacency(replica_of(vec({1.0, 2.0, 4.0})));
  const auto basis = gft_basis(a);
  REQUIRE(basis.eigenvalues.size() == 3);
  CHECK(basis.unit_index == 0);
  CHECK(basis.eigenvalues[0] == doctest::Approx(1.0));
  CHECK(basis.eigenvalues[1] == doctest::Approx(-0.5));
  CHECK(basis.eigenvalues[2] == doctest::Approx(-0.5));
  // Independent eigensolver agrees.
  CHECK(oracle::spectrum_error(a.entries) < 1e-12);
}

TEST_CASE("gft_basis: four sensors give {1, 0, -1, 0}") {
  std::mt19937_64 rng(6);
  const auto a = adjacency(replica_of(testing_support::random_complex(rng, 4)));
  const auto basis = gft_basis(a);
  CHECK(basis.eigenvalues[0] == doctest::Approx(1.0));
  CHECK(std::abs(basis.eigenvalues[1]) < 1e-15);
  CHECK(basis.eigenvalues[2] == doctest::Approx(-1.0));
  CHECK(std::abs(basis.eigenvalues[3]) < 1e-15);
  CHECK(oracle::spectrum_error(a.entries) < 1e-9);
}

TEST_CASE("gft_basis: property - invariants on physical replicas") {
  std::mt19937_64 rng(8);
  for (std::size_t n : {3u, 4u, 10u, 25u}) {
    for (int t = 0; t < 10; ++t) {
      const auto c = testing_support::random_case(rng, n);
      const auto rep = replica_vector(c.modes, c.env, c.source, c.array);
      if (!graph_usable(rep)) continue;
      const auto a = adjacency(rep);
      const auto basis = gft_basis(a);
      const auto N = static_cast<Eigen::Index>(n);
      CHECK((basis.forward * basis.inverse - CMatrix::Identity(N, N)).cwiseAbs().maxCoeff() < 1e-10);
      for (Eigen::Index k = 0; k < N; ++k) CHECK(basis.inverse.col(k).norm() == doctest::Approx(1.0).epsilon(1e-12));

      // Similarity check independent of any eigensolver: D^-1 A D = C.
      const CVector& g = rep.pressures;
      CMatrix c_rebuilt = g.cwiseInverse().asDiagonal() * a.entries * g.asDiagonal();
      for (Eigen::Index i = 0; i < N; ++i) {
        for (Eigen::Index j = 0; j < N; ++j) {
          const bool edge = j == (i + 1) % N || i == (j + 1) % N;
          CHECK(std::abs(c_rebuilt(i, j) - (edge ? 0.5 : 0.0)) < 1e-12);
        }
      }

      // One-hot spectrum of the matched noiseless field.
      const CVector spectrum = basis.forward * rep.pressures;
      const double total = spectrum.norm();
      for (Eigen::Index k = 1; k < N; ++k) CHECK(std::abs(spectrum[k]) / total < 1e-8);
    }
  }
}

TEST_CASE("graph_cost: matched noiseless field reaches 1/epsilon") {
  ReferenceFixture fx;
  const auto array = random_vla(10, 41, 2.0, std::uint64_t{9});
  const auto p = replica_vector(fx.modes, fx.env, fx.source, array);
  const auto field = MeasuredField::from(p.pressures);
  const double eps = default_epsilon(field);
  const double matched = graph_cost(gft_basis(adjacency(p)), field, eps);
  CHECK(matched == doctest::Approx(1.0 / eps).epsilon(1e-3));
  const auto other = replica_vector(fx.modes, fx.env, {5500.0, 20.0}, array);
  CHECK(graph_cost(gft_basis(adjacency(other)), field, eps) < 1e-6 * matched);
  CHECK(code_of([&] { graph_cost(gft_basis(adjacency(p)), field, 0.0); }) == Errc::kInvalidArgument);
}

TEST_CASE("graph_cost: delete-largest keeps the lowest index on ties") {
  // Spectrum with two equal largest entries: the first is removed, the second counts.
  GftBasis basis;
  basis.forward = CMatrix::Identity(3, 3);
  basis.inverse = CMatrix::Identity(3, 3);
  basis.eigenvalues = {1.0, -0.5, -0.5};
  const auto field = MeasuredField::from(vec({2.0, 2.0, 1.0}));
  CHECK(graph_cost(basis, field, 1.0) == doctest::Approx(1.0 / (4.0 + 1.0 + 1.0)));
}

TEST_CASE("graph_cost: property - closed form through the DFT of the ratio vector") {
  std::mt19937_64 rng(10);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(3, 6)(rng);
    const auto g = testing_support::random_complex(rng, n);
    const auto p = testing_support::random_complex(rng, n);
    const auto field = MeasuredField::from(p);
    const double eps = default_epsilon(field);
    const double via_basis = graph_cost(gft_basis(adjacency(replica_of(g))), field, eps);
    const double closed = oracle::closed_form_graph_cost(g, p, eps);
    CHECK(std::abs(via_basis - closed) <= 1e-8 * closed);
  }
}

TEST_CASE("graph_cost: true point beats every out-of-window cell in >= 95 of 100 noisy trials") {
  ReferenceFixture fx;
  Scenario scenario;  // default scenario: 20 dB, 10 sensors
  scenario.source = fx.source;
  int wins = 0;
  for (std::size_t trial = 0; trial < 100; ++trial) {
    const auto array = trial_array(scenario, 10, trial);
    const auto field = trial_field(scenario, fx.modes, array, 10, trial);
    const auto grid = replica_grid(fx.modes, fx.env, fx.ranges, fx.depths, array);
    const auto surface = ambiguity_surface(ProcessorKind::kGraph, grid, field, default_epsilon(field));
    const double truth = surface.value(50, 24);
    bool win = !surface.flagged[surface.index(50, 24)];
    for (std::size_t i = 0; i < fx.ranges.size() && win; ++i) {
      for (std::size_t j = 0; j < fx.depths.size(); ++j) {
        if (!scenario.window.contains(fx.ranges[i], fx.depths[j]) && surface.value(i, j) >= truth) {
          win = false;
          break;
        }
      }
    }
    wins += win ? 1 : 0;
  }
  CHECK(wins >= 95);
}

TEST_CASE("ambiguity_surface: 1x1 grid") {
  ReferenceFixture fx;
  const auto array = fixed_vla({10.0, 30.0, 50.0, 70.0});
  const std::vector<double> r{5000.0}, z{50.0};
  const auto grid = replica_grid(fx.modes, fx.env, r, z, array);
  std::mt19937_64 rng(1);
  const auto field = MeasuredField::from(testing_support::random_complex(rng, 4));
  for (auto kind : {ProcessorKind::kBartlett, ProcessorKind::kGraph}) {
    const auto s = ambiguity_surface(kind, grid, field, default_epsilon(field));
    REQUIRE(s.values.size() == 1);
    CHECK(s.values_db == std::vector<double>{0.0});
    CHECK(s.values[0] > 0.0);
  }
}

TEST_CASE("ambiguity_surface: noiseless matched field peaks at the source for both processors") {
  ReferenceFixture fx;
  const auto array = random_vla(10, 41, 2.0, std::uint64_t{12});
  const auto grid = replica_grid(fx.modes, fx.env, fx.ranges, fx.depths, array);
  const auto field = MeasuredField::from(grid.at(50, 24).pressures);
  for (auto kind : {ProcessorKind::kBartlett, ProcessorKind::kGraph}) {
    const auto s = ambiguity_surface(kind, grid, field, default_epsilon(field));
    const auto e = locate(s);
    CHECK(e.range_index == 50);
    CHECK(e.depth_index == 24);
    CHECK(e.peak_db == 0.0);
    CHECK(*std::max_element(s.values_db.begin(), s.values_db.end()) == 0.0);
    for (double v : s.values) CHECK(v >= 0.0);
  }
}

TEST_CASE("ambiguity_surface: argmax is invariant to complex scaling of the field") {
  ReferenceFixture fx;
  Scenario scenario;
  scenario.source = fx.source;
  for (std::size_t trial = 0; trial < 5; ++trial) {
    const auto array = trial_array(scenario, 10, trial);
    const auto field = trial_field(scenario, fx.modes, array, 10, trial);
    const auto scaled = MeasuredField::from(cplx(-3.0, 11.0) * field.pressures);
    const auto grid = replica_grid(fx.modes, fx.env, fx.ranges, fx.depths, array);
    for (auto kind : {ProcessorKind::kBartlett, ProcessorKind::kGraph}) {
      const auto a = locate(ambiguity_surface(kind, grid, field, default_epsilon(field)));
      const auto b = locate(ambiguity_surface(kind, grid, scaled, default_epsilon(scaled)));
      CHECK(a.range_index == b.range_index);
      CHECK(a.depth_index == b.depth_index);
    }
  }
}

TEST_CASE("ambiguity_surface: reference-scenario graph surface peaks inside the window") {
  ReferenceFixture fx;
  Scenario scenario;
  scenario.source = fx.source;
  const auto array = trial_array(scenario, 10, 0);
  const auto field = trial_field(scenario, fx.modes, array, 10, 0);
  const auto grid = replica_grid(fx.modes, fx.env, fx.ranges, fx.depths, array);
  const auto s = ambiguity_surface(ProcessorKind::kGraph, grid, field, default_epsilon(field));
  CHECK(is_correct(locate(s), scenario.window));

  const auto par = ambiguity_surface(ProcessorKind::kGraph, grid, field, default_epsilon(field), ParallelOptions{3});
  CHECK(par.values == s.values);
}

TEST_CASE("ambiguity_surface: degenerate cells are flagged; preconditions") {
  ReplicaGrid grid({5000.0, 5100.0}, {40.0}, fixed_vla({10.0, 20.0, 30.0}),
                   {ReplicaVector::from_pressures({5000.0, 40.0}, vec({1.0, 0.0, 1.0})),
                    ReplicaVector::from_pressures({5100.0, 40.0}, vec({1.0, 2.0, 1.0}))});
  const auto field = MeasuredField::from(vec({1.0, 2.0, 1.0}));
  const auto s = ambiguity_surface(ProcessorKind::kGraph, grid, field, 1e-9);
  CHECK(s.flagged[0]);
  CHECK_FALSE(s.flagged[1]);
  CHECK(s.values[0] == 0.0);
  CHECK(s.flagged_count() == 1);
  CHECK(locate(s).range_index == 1);

  const auto short_field = MeasuredField::from(vec({1.0, 2.0}));
  CHECK(code_of([&] { ambiguity_surface(ProcessorKind::kBartlett, grid, short_field, 1.0); }) ==
        Errc::kDimensionMismatch);
  CHECK(code_of([&] { ambiguity_surface(ProcessorKind::kBartlett, ReplicaGrid{}, short_field, 1.0); }) ==
        Errc::kEmptySurface);
}

TEST_CASE("locate: tie-breaking and degenerate surfaces") {
  AmbiguitySurface s;
  s.ranges_m = {1.0, 2.0};
  s.depths_m = {10.0, 20.0};
  s.values = {0.1, 0.9, 0.3, 0.2};
  s.flagged.assign(4, false);
  normalize_db(s);
  auto e = locate(s);
  CHECK(e.range_index == 0);
  CHECK(e.depth_index == 1);
  CHECK(e.peak_db == 0.0);

  s.values = {0.1, 0.5, 0.5, 0.2};
  normalize_db(s);
  e = locate(s);
  CHECK(e.range_index == 0);
  CHECK(e.depth_index == 1);

  s.values = {0.1, 0.2, 0.7, 0.7};
  e = locate(s);
  CHECK(e.range_index == 1);
  CHECK(e.depth_index == 0);

  s.values = {1.0, 1.0, 1.0, 1.0};
  normalize_db(s);
  e = locate(s);
  CHECK(e.range_index == 0);
  CHECK(e.depth_index == 0);

  s.flagged.assign(4, true);
  CHECK(code_of([&] { locate(s); }) == Errc::kEmptySurface);
}

TEST_CASE("surface CSV export") {
  AmbiguitySurface s;
  s.ranges_m = {4000.0, 4020.5};
  s.depths_m = {1.25};
  s.values = {2.0, 0.0};
  s.flagged = {false, true};
  normalize_db(s);
  std::ostringstream out;
  write_surface_csv(out, s);
  CHECK(out.str() == "range_m,depth_m,value,value_db,flagged\n4000,1.25,2,0,0\n4020.5,1.25,0,-inf,1\n");
}
