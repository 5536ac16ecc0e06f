#include <doctest.h>

#include <omp.h>

#include "nhad/kernels.hpp"

using namespace nhad;

namespace {

bool same(const Matrix& a, const Matrix& b) { return a.rows() == b.rows() && a.cols() == b.cols() && a == b; }

struct Threads {
  explicit Threads(int n) : saved(omp_get_max_threads()) { omp_set_num_threads(n); }
  ~Threads() { omp_set_num_threads(saved); }
  int saved;
};

}  // namespace

TEST_CASE("uniform grid") {
  const auto g = kernels::uniform_grid(1.5 * kPi, 4001);
  CHECK(g.size() == 4001);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == 1.5 * kPi);
  CHECK_THROWS_AS(kernels::uniform_grid(1.0, 1), Error);
  CHECK_THROWS_AS(kernels::uniform_grid(0.0, 10), Error);
}

TEST_CASE("parallel kernels reproduce the serial reference exactly") {
  const Threads threads(4);
  const auto grid = kernels::uniform_grid(2.0 * kPi, 1201);

  DesignModel m;
  m.gamma = GammaSpec::gaussian(100.0, kPi, 0.1);  // includes singular points
  const auto par = kernels::synthesize_trace(m, grid);
  const auto ser = kernels::serial::synthesize_trace(m, grid);
  REQUIRE(par.size() == ser.size());
  std::size_t singular = 0;
  for (std::size_t i = 0; i < par.size(); ++i) {
    REQUIRE(par[i].singular() == ser[i].singular());
    CHECK(par[i].failure == ser[i].failure);
    if (par[i].singular()) {
      ++singular;
      continue;
    }
    CHECK(par[i].design->delta_e == ser[i].design->delta_e);
    CHECK(par[i].design->delta == ser[i].design->delta);
    CHECK(same(par[i].design->hamiltonian, ser[i].design->hamiltonian));
  }
  MESSAGE("singular samples: " << singular);

  for (const LambdaMode lm : {LambdaMode::TanAlpha, LambdaMode::Constant}) {
    DesignModel d;
    d.lambda_mode = lm;
    const auto g = kernels::uniform_grid(1.5 * kPi, 801);
    const FrameTrace fp = kernels::build_frame_trace(d, g);
    const FrameTrace fs = kernels::serial::build_frame_trace(d, g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      CHECK(same(fp.frames[i].right(), fs.frames[i].right()));
      CHECK(same(fp.frames[i].left(), fs.frames[i].left()));
      CHECK(same(fp.frame_dots[i], fs.frame_dots[i]));
    }
    const auto sp = kernels::spectrum_trace(d, g);
    const auto ss = kernels::serial::spectrum_trace(d, g);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(sp[i].values == ss[i].values);

    const PhaseTrace ph = kernels::converged_phases(d, g).phases;
    const auto idx = subgrid_indices(g.size(), 30);
    const Matrix gp = kernels::propagator_grid(fp, ph, 0, idx);
    const Matrix gs = kernels::serial::propagator_grid(fs, ph, 0, idx);
    CHECK(same(gp, gs));
    if (lm == LambdaMode::Constant) CHECK(gp.cwiseAbs().maxCoeff() > 0.0);
  }

  const PopulationTrace ip = kernels::ideal_population_trace(m.schedule, grid);
  const PopulationTrace is = kernels::serial::ideal_population_trace(m.schedule, grid);
  CHECK(ip.p1r == is.p1r);
  CHECK(ip.p2r == is.p2r);
}

TEST_CASE("frame trace build propagates guard failures from worker threads") {
  const Threads threads(4);
  DesignModel m;
  m.guards.cos_alpha_floor = 0.9999;  // trips everywhere
  const auto grid = kernels::uniform_grid(1.0, 64);
  try {
    kernels::build_frame_trace(m, grid);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ConsistencyViolation);
  }
}

TEST_CASE("propagator grid is lower triangular") {
  DesignModel d;
  d.lambda_mode = LambdaMode::Constant;
  const auto g = kernels::uniform_grid(kPi, 401);
  const FrameTrace f = kernels::build_frame_trace(d, g);
  const PhaseTrace ph = kernels::converged_phases(d, g).phases;
  const auto idx = subgrid_indices(g.size(), 10);
  const Matrix gp = kernels::propagator_grid(f, ph, 0, idx);
  for (Eigen::Index a = 0; a < gp.rows(); ++a)
    for (Eigen::Index b = a + 1; b < gp.cols(); ++b) CHECK(gp(a, b) == Complex{});
  CHECK(gp(5, 2) == propagator_g(f, ph, 0, idx[5], idx[2]));
}
