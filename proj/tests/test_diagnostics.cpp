#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "fastlight/diagnostics.hpp"
#include "fastlight/error.hpp"
#include "support/oracles.hpp"

using namespace fastlight;

namespace {

constexpr double pi = std::numbers::pi;

std::vector<cplx> sampled(const PulseSpec& pulse, double t0, double dt, std::size_t n) {
  std::vector<cplx> v(n);
  for (std::size_t k = 0; k < n; ++k) v[k] = sech_envelope(t0 + dt * static_cast<double>(k), pulse);
  return v;
}

}  // namespace

TEST_CASE("pulse area of sech pulses") {
  PulseSpec wings;
  const auto full = sampled(wings, -4.0, 1e-4, 80001);
  const AreaResult a = pulse_area(full, 1e-4);
  CHECK(a.theta == doctest::Approx(2.0 * pi).epsilon(1e-10));
  CHECK(a.theta_imag == 0.0);
  CHECK_FALSE(a.clipped);

  PulseSpec cut;
  cut.cutoff_half_width = 10.0;
  const double tail = oracle::trapezoid([](double s) { return 2.0 / std::cosh(s); }, 10.0, 40.0, 400000);
  const auto trimmed = sampled(cut, -1.1, 1e-5, 220001);
  const double theta = pulse_area(trimmed, 1e-5).theta;
  CHECK(theta == doctest::Approx(2.0 * pi - 2.0 * tail).epsilon(1e-8));
  CHECK(2.0 * pi - theta == doctest::Approx(3.6e-4).epsilon(0.02));

  CHECK(pulse_area(std::vector<cplx>(100, 0.0), 0.01).theta == 0.0);
  CHECK(pulse_area(sampled(wings, -0.2, 1e-3, 200), 1e-3).clipped);
}

TEST_CASE("pulse area of non-negative envelopes is non-negative") {
  for (double shift : {-0.3, 0.0, 0.2}) {
    PulseSpec p;
    p.peak_time = shift;
    p.peak_amplitude = 0.37;
    CHECK(pulse_area(sampled(p, -1.0, 0.003, 700), 0.003).theta >= 0.0);
  }
}

TEST_CASE("area profile of the exact solution stays at 2 pi") {
  PhysicalParams p;
  const MediumSpec m{0.0, 2.0};
  FieldRecord rec;
  rec.nx = 41;
  rec.nt = 4001;
  rec.x0 = 0.0;
  rec.dx = m.length() / 40.0;
  rec.t_min = -2.0;
  rec.dt = 1e-3;
  rec.omega.resize(rec.nx * rec.nt);
  for (std::size_t i = 0; i < rec.nx; ++i)
    for (std::size_t k = 0; k < rec.nt; ++k)
      rec.omega[i * rec.nt + k] = analytic_field(rec.x(i), rec.t(k) + rec.x(i) / kSpeedOfLight, m, p);
  const AreaProfile prof = area_profile(rec, p);
  CHECK(prof.alpha_used == doctest::Approx(beers_alpha(p)));
  for (std::size_t i = 0; i < rec.nx; ++i) {
    CHECK(prof.theta[i] == doctest::Approx(2.0 * pi).epsilon(1e-8));
    CHECK(std::abs(prof.residual[i]) < 1e-6);
  }
  FieldRecord empty = rec;
  empty.omega.clear();
  CHECK_THROWS_AS(area_profile(empty, p), ValidationError);
}

TEST_CASE("area equation oracle agrees with its closed form") {
  for (double theta0 : {0.01 * pi, 0.5, 2.5}) {
    const double rk = oracle::area_ode(theta0, 8.15, 3.0, 3000);
    CHECK(rk == doctest::Approx(oracle::area_closed_form(theta0, 8.15, 3.0)).epsilon(1e-9));
  }
}

TEST_CASE("parabolic peak interpolation") {
  const double t0 = 0.01234;
  const double dt = 0.01;
  std::vector<cplx> v(50);
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double t = -0.2 + dt * static_cast<double>(k);
    v[k] = 5.0 - (t - t0) * (t - t0);
  }
  CHECK(interpolated_peak_time(v, -0.2, dt) == doctest::Approx(t0).epsilon(1e-12));
  std::vector<cplx> edge{3.0, 2.0, 1.0};
  CHECK_THROWS_AS(interpolated_peak_time(edge, 0.0, 1.0), NumericalError);
}

TEST_CASE("peak advance") {
  PulseSpec a;
  PulseSpec b;
  b.peak_time = -0.26;
  const auto in = sampled(a, -2.0, 1e-3, 4001);
  const auto out = sampled(b, -2.0, 1e-3, 4001);
  const AdvanceMeasurement adv = peak_advance(out, in, -2.0, 1e-3, 0.1);
  CHECK(adv.advance_in_tau == doctest::Approx(2.6).epsilon(1e-4));
  CHECK(peak_advance(in, out, -2.0, 1e-3, 0.1).advance_in_tau == doctest::Approx(-adv.advance_in_tau));
  CHECK(peak_advance(in, in, -2.0, 1e-3, 0.1).advance_in_tau == 0.0);
}

TEST_CASE("tipping angle") {
  CHECK(tipping_angle(cplx(0.0), cplx(1.0)) == 0.0);
  CHECK(tipping_angle(cplx(0.0, 1.0), cplx(0.0)) == doctest::Approx(pi).epsilon(1e-15));
  for (double phi : {0.0, pi, 1.3}) {
    for (double theta : {1e-4, 0.3, 1.0, 2.5, pi}) {
      const cplx c1 = std::polar(std::sin(0.5 * theta), phi);
      const cplx c2 = std::cos(0.5 * theta);
      CHECK(std::abs(tipping_angle(c1, c2) - theta) < 1e-12);
    }
  }
}

TEST_CASE("superfluorescence delay scan") {
  const DetuningDistribution d = gaussian_detuning_quadrature(0.733, 4);
  const std::size_t nt = 101;
  const double dt = 0.01;
  AmplitudeTrajectories h{nt, 4, {}};
  for (std::size_t k = 0; k < nt; ++k) {
    const double theta = 2.0 * static_cast<double>(k) / static_cast<double>(nt - 1);  // 0 -> 2 rad
    for (int j = 0; j < 4; ++j) h.data.push_back({std::sin(0.5 * theta), std::cos(0.5 * theta)});
  }
  const SfDelay s = sf_delay_scan(h, d, dt);
  REQUIRE(s.mean_angle_delay);
  CHECK(*s.mean_angle_delay == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(*s.max_node_delay == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(sf_delay_time(h, d, dt) == doctest::Approx(0.5).epsilon(1e-9));

  AmplitudeTrajectories idle{nt, 4, std::vector<AmplitudePair>(nt * 4, AmplitudePair{0.0, 1.0})};
  CHECK_FALSE(sf_delay_scan(idle, d, dt).mean_angle_delay);
  CHECK_THROWS_WITH_AS(sf_delay_time(idle, d, dt), doctest::Contains("no SF within window"), NumericalError);

  AmplitudeTrajectories tipped{nt, 4, std::vector<AmplitudePair>(nt * 4, AmplitudePair{std::sin(0.5), std::cos(0.5)})};
  CHECK(sf_delay_time(tipped, d, dt) == 0.0);
}

TEST_CASE("norm residual") {
  AtomGrid fresh{10, 3, std::vector<AmplitudePair>(30, AmplitudePair{0.0, 1.0})};
  CHECK(norm_residual(fresh) < 1e-15);
  AtomGrid scaled = fresh;
  for (auto& a : scaled.amplitudes) a.c2 *= 1.1;
  CHECK(norm_residual(scaled) == doctest::Approx(0.21).epsilon(1e-12));
}
