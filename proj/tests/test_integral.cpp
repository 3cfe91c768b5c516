#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "omo/integral.hpp"

using omo::LossSpec;
using omo::Matrix;
using omo::MonotoneMap;
using omo::QuadratureRule;
using omo::Vector;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

MonotoneMap line_map_1d() {
  Matrix q(1, 1);
  q << 1.0;
  return MonotoneMap::quadratic_gradient(q, Vector::Zero(1));
}

MonotoneMap gradient_2d() {
  Matrix q(2, 2);
  q << 2.0, 0.5, 0.5, 1.0;
  return MonotoneMap::quadratic_gradient(q, vec2(0.3, -0.2));
}

}  // namespace

TEST_CASE("gauss-legendre rules are well formed", "[integral]") {
  for (int n : {1, 2, 3, 8, 16, 64}) {
    const QuadratureRule r = QuadratureRule::gauss_legendre(n);
    REQUIRE(r.node_count() == n);
    double canonical = 0.0;
    for (double w : r.canonical_weights()) canonical += w;
    CHECK(std::abs(canonical - 2.0) <= 1e-14);
    double unit = 0.0;
    for (double w : r.weights()) unit += w;
    CHECK(std::abs(unit - 1.0) <= 1e-14);
    // Node symmetry about the midpoint of [0, 1].
    for (int i = 0; i < n; ++i)
      CHECK(r.points()[static_cast<std::size_t>(i)] ==
            Catch::Approx(1.0 - r.points()[static_cast<std::size_t>(n - 1 - i)]).margin(1e-14));
  }
}

TEST_CASE("gauss-legendre achieves its polynomial exactness degree", "[integral]") {
  // n nodes integrate degree 2n-1 exactly; one degree past that breaks.
  const QuadratureRule gl3 = QuadratureRule::gauss_legendre(3);
  double deg5 = 0.0, deg6 = 0.0;
  for (int i = 0; i < 3; ++i) {
    deg5 += gl3.weights()[static_cast<std::size_t>(i)] *
            std::pow(gl3.points()[static_cast<std::size_t>(i)], 5);
    deg6 += gl3.weights()[static_cast<std::size_t>(i)] *
            std::pow(gl3.points()[static_cast<std::size_t>(i)], 6);
  }
  CHECK(std::abs(deg5 - 1.0 / 6.0) <= 1e-15);
  CHECK(std::abs(deg6 - 1.0 / 7.0) > 1e-6);
}

TEST_CASE("trapezoid weights tile the unit interval", "[integral]") {
  const QuadratureRule t = QuadratureRule::composite_trapezoid(9);
  double sum = 0.0;
  for (double w : t.weights()) sum += w;
  CHECK(std::abs(sum - 1.0) <= 1e-14);
  CHECK(t.points().front() == 0.0);
  CHECK(t.points().back() == 1.0);
  CHECK_THROWS_AS(QuadratureRule::composite_trapezoid(1), std::invalid_argument);
  CHECK_THROWS_AS(QuadratureRule::gauss_legendre(0), std::invalid_argument);
}

TEST_CASE("line integral matches hand-computed work", "[integral]") {
  const QuadratureRule rule = QuadratureRule::gauss_legendre(8);
  // F(x) = x in one dimension: work from 0 to 2 is 2.
  Vector a(1), b(1);
  a << 0.0;
  b << 2.0;
  CHECK(omo::line_integral(line_map_1d(), a, b, rule) == Catch::Approx(2.0).margin(1e-13));

  // Zero-length segment integrates to exactly zero.
  CHECK(omo::line_integral(MonotoneMap::saddle_game(), vec2(0.3, 0.4), vec2(0.3, 0.4), rule) ==
        0.0);

  // Reversal flips the sign.
  double fwd = omo::line_integral(MonotoneMap::saddle_game(), vec2(1.0, 1.0), vec2(0.2, 0.7), rule);
  double bwd = omo::line_integral(MonotoneMap::saddle_game(), vec2(0.2, 0.7), vec2(1.0, 1.0), rule);
  CHECK(std::abs(fwd + bwd) <= 1e-12);
}

TEST_CASE("polyline integral is additive and path independent for gradients", "[integral]") {
  const QuadratureRule rule = QuadratureRule::gauss_legendre(8);
  const MonotoneMap grad = gradient_2d();
  const Vector a = vec2(-0.8, 0.2), m = vec2(0.4, 0.9), b = vec2(0.7, -0.5);

  const Vector path[3] = {a, m, b};
  double via_polyline = omo::polyline_integral(grad, std::span<const Vector>(path, 3), rule);
  double sum = omo::line_integral(grad, a, m, rule) + omo::line_integral(grad, m, b, rule);
  CHECK(via_polyline == Catch::Approx(sum).margin(1e-15));

  // Gradient fields: any path gives the potential difference.
  double direct = omo::line_integral(grad, a, b, rule);
  CHECK(via_polyline == Catch::Approx(direct).margin(1e-12));
  Matrix q(2, 2);
  q << 2.0, 0.5, 0.5, 1.0;
  double potential_diff = omo::quadratic_potential(q, vec2(0.3, -0.2), b) -
                          omo::quadratic_potential(q, vec2(0.3, -0.2), a);
  CHECK(direct == Catch::Approx(potential_diff).margin(1e-12));

  CHECK_THROWS_AS(omo::polyline_integral(grad, std::span<const Vector>(path, 1), rule),
                  std::invalid_argument);
}

TEST_CASE("path loss matches the saddle closed form", "[integral]") {
  const QuadratureRule rule = QuadratureRule::gauss_legendre(16);
  const LossSpec spec{MonotoneMap::saddle_game(), vec2(1.0, 1.0), 0.0};
  // Frozen values of r^3/3 - r^2/2 + rc - c^2/2 + c^3/3 - 2/3.
  CHECK(omo::omo_loss(spec, vec2(0.0, 0.0), rule) == Catch::Approx(-2.0 / 3.0).margin(1e-12));
  CHECK(omo::omo_loss(spec, vec2(1.0, 0.0), rule) == Catch::Approx(-5.0 / 6.0).margin(1e-12));
  CHECK(omo::omo_loss(spec, vec2(0.3, 0.8), rule) == Catch::Approx(-0.612).margin(1e-12));
  CHECK(omo::omo_loss(spec, vec2(1.0, 1.0), rule) == 0.0);
  CHECK(omo::saddle_reference_loss(vec2(0.0, 0.0)) == Catch::Approx(-2.0 / 3.0).margin(1e-15));

  // The quadratic integrand is exact already at 2 nodes; 1 node (midpoint)
  // must not be, which is what makes under-resolution detectable.
  const QuadratureRule gl2 = QuadratureRule::gauss_legendre(2);
  const QuadratureRule gl1 = QuadratureRule::gauss_legendre(1);
  CHECK(omo::omo_loss(spec, vec2(0.0, 0.0), gl2) == Catch::Approx(-2.0 / 3.0).margin(1e-13));
  CHECK(std::abs(omo::omo_loss(spec, vec2(0.0, 0.0), gl1) + 2.0 / 3.0) > 1e-4);
}

TEST_CASE("path loss matches the affine closed form", "[integral]") {
  const QuadratureRule rule = QuadratureRule::gauss_legendre(8);
  omo::SplitMix64 rng(2718);
  for (int trial = 0; trial < 20; ++trial) {
    const omo::Index n = 1 + static_cast<omo::Index>(trial % 6);
    Matrix g(n, n), s(n, n);
    Vector b(n), o(n), x(n);
    for (omo::Index r = 0; r < n; ++r) {
      b[r] = rng.uniform(-1.0, 1.0);
      o[r] = rng.uniform(-1.0, 1.0);
      x[r] = rng.uniform(-1.0, 1.0);
      for (omo::Index c = 0; c < n; ++c) {
        g(r, c) = rng.uniform(-1.0, 1.0);
        s(r, c) = rng.uniform(-1.0, 1.0);
      }
    }
    Matrix a = 0.4 * g.transpose() * g + 0.5 * (s - s.transpose());
    double f_o = rng.uniform(-2.0, 2.0);
    const LossSpec spec{MonotoneMap::affine_psd(a, b), o, f_o};
    double got = omo::omo_loss(spec, x, rule);
    double want = omo::affine_closed_form_loss(a, b, o, f_o, x);
    CHECK(got == Catch::Approx(want).margin(1e-10));
  }
}

TEST_CASE("sandwich bounds bracket the integral for monotone maps", "[integral]") {
  const QuadratureRule rule = QuadratureRule::gauss_legendre(8);
  // 1-D hand case: F(x) = x from 0 to 2 gives bounds (0, 4) around 2.
  Vector a1(1), b1(1);
  a1 << 0.0;
  b1 << 2.0;
  auto [lo1, hi1] = omo::sandwich_bounds(line_map_1d(), a1, b1);
  CHECK(lo1 == 0.0);
  CHECK(hi1 == 4.0);

  omo::SplitMix64 rng(31415);
  const MonotoneMap grad = gradient_2d();
  for (int k = 0; k < 500; ++k) {
    Vector a = vec2(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    Vector b = vec2(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    auto [lo, hi] = omo::sandwich_bounds(grad, a, b);
    double mid = omo::line_integral(grad, a, b, rule);
    CHECK(lo <= mid + omo::kPolynomialQuadTol);
    CHECK(mid <= hi + omo::kPolynomialQuadTol);
  }

  // The saddle game is not monotone, and the bracket indeed fails for the
  // violating pair direction.
  auto [slo, shi] = omo::sandwich_bounds(MonotoneMap::saddle_game(), vec2(1.0, 1.0),
                                         vec2(0.0, 0.0));
  CHECK(slo == -2.0);
  CHECK(shi == 0.0);
}

TEST_CASE("triangle loops have frozen reference circulations", "[integral]") {
  const QuadratureRule rule = QuadratureRule::gauss_legendre(8);
  const MonotoneMap saddle = MonotoneMap::saddle_game();
  const MonotoneMap rot = MonotoneMap::rotation2d();
  const Vector o = vec2(0.0, 0.0), e1 = vec2(1.0, 0.0), e2 = vec2(0.0, 1.0), c = vec2(1.0, 1.0);

  // Known exact circulations (planar curl integrals).
  CHECK(omo::triangle_loop(saddle, o, e1, c, rule) == Catch::Approx(0.5).margin(1e-13));
  CHECK(omo::triangle_loop(rot, o, e1, e2, rule) == Catch::Approx(1.0).margin(1e-13));
  CHECK(omo::triangle_loop(rot, o, e2, e1, rule) == Catch::Approx(-1.0).margin(1e-13));

  // The symmetric unit triangle nulls the saddle's circulation: its curl is
  // antisymmetric about the diagonal, so this specific loop vanishes even
  // though the field is not conservative.
  CHECK(std::abs(omo::triangle_loop(saddle, o, e1, e2, rule)) <= 1e-13);

  // Collinear (degenerate) triangle.
  CHECK(std::abs(omo::triangle_loop(rot, o, vec2(0.5, 0.5), c, rule)) <= 1e-13);

  // Conservative fields have no circulation anywhere.
  CHECK(std::abs(omo::triangle_loop(gradient_2d(), vec2(-0.3, 0.9), e1, c, rule)) <= 1e-12);
}

TEST_CASE("conservativity audit distinguishes the families", "[integral]") {
  auto grad_rep = omo::check_conservative(gradient_2d(), omo::Domain::cube(2, -1.0, 1.0), 200, 8,
                                          1e-9, 999);
  CHECK(grad_rep.consistent);
  CHECK_FALSE(grad_rep.witness.has_value());
  CHECK(grad_rep.loops_tested == 200);

  auto rot_rep = omo::check_conservative(MonotoneMap::rotation2d(),
                                         omo::Domain::ball(Vector::Zero(2), 1.0), 200, 8, 1e-9,
                                         999);
  CHECK_FALSE(rot_rep.consistent);
  REQUIRE(rot_rep.witness.has_value());
  // Witness reproduces: the recorded loop value is the actual circulation.
  double replay = omo::triangle_loop(MonotoneMap::rotation2d(), rot_rep.witness->a,
                                     rot_rep.witness->b, rot_rep.witness->c,
                                     QuadratureRule::gauss_legendre(8));
  CHECK(replay == Catch::Approx(rot_rep.witness->loop_value).margin(1e-14));

  auto saddle_rep = omo::check_conservative(MonotoneMap::saddle_game(),
                                            omo::Domain::cube(2, 0.0, 1.0), 200, 8, 1e-9, 999);
  CHECK_FALSE(saddle_rep.consistent);
  CHECK(saddle_rep.witness.has_value());
}

TEST_CASE("curl discrepancy bound has frozen reference values", "[integral]") {
  CHECK(omo::curl_discrepancy_bound(1.0, 1.0, 1.0, 1.0, 1.0) == Catch::Approx(3.0).margin(1e-15));
  CHECK(omo::curl_discrepancy_bound(1.0, 1.0, 0.0, 1.0, 1.0) ==
        Catch::Approx(3.0 / std::sqrt(2.0)).margin(1e-15));
  CHECK(omo::curl_discrepancy_bound(1.0, 1.0, 0.0, 0.0, 1.0) == 0.0);
  CHECK_THROWS_AS(omo::curl_discrepancy_bound(-1.0, 1.0, 0.0, 1.0, 1.0), std::invalid_argument);

  auto rot_params = omo::curl_bound_params(MonotoneMap::rotation2d(),
                                           omo::Domain::ball(Vector::Zero(2), 1.0));
  CHECK(rot_params.beta == Catch::Approx(1.0).margin(1e-12));
  CHECK(rot_params.gamma == 0.0);
  auto saddle_params = omo::curl_bound_params(MonotoneMap::saddle_game(),
                                              omo::Domain::cube(2, 0.0, 1.0));
  CHECK(saddle_params.gamma == 2.0);
  CHECK(saddle_params.beta > 0.0);
}

TEST_CASE("quadrature error estimate is honest", "[integral]") {
  const MonotoneMap grad = gradient_2d();
  const Vector a = vec2(-0.7, 0.4), b = vec2(0.9, 0.8);

  // Exact rule: the configured floor.
  CHECK(omo::quad_error_estimate(grad, a, b, QuadratureRule::gauss_legendre(2)) ==
        omo::kPolynomialQuadTol);

  // Trapezoid on a curved integrand: the estimate bounds the real error to
  // within the usual Richardson factor.
  const QuadratureRule trap = QuadratureRule::composite_trapezoid(9);
  const LossSpec spec{MonotoneMap::saddle_game(), vec2(1.0, 1.0), 0.0};
  double est = omo::quad_error_estimate(MonotoneMap::saddle_game(), vec2(1.0, 1.0),
                                        vec2(0.0, 0.0), trap);
  double actual = std::abs(omo::omo_loss(spec, vec2(0.0, 0.0), trap) - (-2.0 / 3.0));
  CHECK(est > 1e-12);
  CHECK(actual <= 2.0 * est);
}
