#include "abring/errors.hpp"
#include "abring/records_io.hpp"
#include "abring/sweeps.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace abring;
using Catch::Matchers::WithinAbs;

namespace {

constexpr double kPi = std::numbers::pi;

SweepConfig small_triptych(int n_points, double e_min, double e_max) {
  SweepConfig c = SweepConfig::preset();
  c.grid = {e_min, e_max, n_points};
  return c;
}

ObservableRecord rate_record(int mx, int my, double rate, int flag = 0) {
  ObservableRecord r;
  r.mx = mx;
  r.my = my;
  r.rate = rate;
  r.error_flag = flag;
  return r;
}

}  // namespace

TEST_CASE("energy grid endpoints and spacing") {
  EnergyGrid g;
  CHECK(g.at(0) == -3.0);
  CHECK(g.at(2000) == 3.0);
  CHECK_THAT(g.at(1000), WithinAbs(0.0, 1e-15));
  CHECK_THAT(g.at(1) - g.at(0), WithinAbs(0.003, 1e-15));
  EnergyGrid one{0.25, 0.25, 1};
  CHECK(one.at(0) == 0.25);
}

TEST_CASE("preset sweep configuration") {
  const SweepConfig c = SweepConfig::preset();
  CHECK(c.grid.n_points == 2001);
  CHECK(c.t_ar_values.size() == 151);
  CHECK_THAT(c.t_ar_values.back(), WithinAbs(3.0, 1e-12));
  CHECK(c.mx_values.size() == 20);
  CHECK(c.my_values == std::vector<int>{6, 14, 22, 30});
  CHECK(c.flux_a == kPi);
  CHECK(c.flux_b == 0.0);
  CHECK(c.device.coupling.t_ar == 0.2);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("triptych: one record per energy, grid order, four transmissions") {
  const SweepConfig c = small_triptych(11, -1.0, 1.0);
  const auto recs = run_energy_triptych(c);
  REQUIRE(recs.size() == 11);
  for (std::size_t k = 0; k < recs.size(); ++k) {
    CHECK(recs[k].energy == c.grid.at(static_cast<int>(k)));
    CHECK(recs[k].flux_a == kPi);
    CHECK(recs[k].flux_b == 0.0);
    CHECK(recs[k].error_flag == 0);
    CHECK(recs[k].ldos.size() == 100);
    CHECK(recs[k].t_bare_a >= 0.0);
    CHECK(recs[k].t_full_b >= 0.0);
    CHECK(recs[k].c_full >= -1e-12);
    CHECK(recs[k].c_full <= 2.0 + 1e-12);
  }
}

TEST_CASE("triptych at zero coupling: coupled and bare curves coincide") {
  SweepConfig c = small_triptych(21, -2.0, 2.0);
  c.device.coupling.t_ar = 0.0;
  for (const auto& r : run_energy_triptych(c)) {
    CHECK_THAT(r.t_full_a, WithinAbs(r.t_bare_a, 1e-12));
    CHECK_THAT(r.t_full_b, WithinAbs(r.t_bare_b, 1e-12));
    CHECK_THAT(r.c_full, WithinAbs(r.c_bare, 1e-12));
  }
}

TEST_CASE("coupling lowers the mean contrast near the band centre") {
  SweepConfig c = small_triptych(51, -0.5, 0.5);
  double coupled = 0.0, bare = 0.0;
  for (const auto& r : run_energy_triptych(c)) {
    coupled += r.c_full;
    bare += r.c_bare;
  }
  CHECK(coupled < bare);
}

TEST_CASE("energies outside the band keep T and LDOS with an undefined contrast") {
  const auto recs = run_energy_triptych(small_triptych(3, 2.8, 3.0));
  for (const auto& r : recs) {
    CHECK(r.error_flag == 3);
    CHECK(r.ok());
    CHECK(std::isnan(r.c_full));
    CHECK(r.t_full_a < 1e-14);
    CHECK(r.ldos.size() == 100);
    CHECK(r.error.find("contrast undefined") != std::string::npos);
  }
}

TEST_CASE("contrast sweep: one record per t_AR, in order") {
  SweepConfig c = SweepConfig::preset();
  c.t_ar_values = {0.0, 0.3, 0.1};
  const auto recs = run_contrast_vs_tar(c);
  REQUIRE(recs.size() == 3);
  CHECK(recs[0].t_ar == 0.0);
  CHECK(recs[1].t_ar == 0.3);
  CHECK(recs[2].t_ar == 0.1);
  CHECK(recs[0].c_full > recs[1].c_full);
  CHECK(recs[0].energy == 0.0);
}

TEST_CASE("single point honours energy and coupling") {
  SweepConfig c = SweepConfig::preset();
  c.energy = 0.4;
  c.device.coupling.t_ar = 0.0;
  const auto recs = run_single_point(c);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].energy == 0.4);
  CHECK(recs[0].t_full_a == recs[0].t_bare_a);
  CHECK(recs[0].dephasing == Complex(0.0, 0.0));
}

TEST_CASE("parallel runs give bit-identical records") {
  SweepConfig c = small_triptych(37, -2.5, 2.5);
  c.workers = 1;
  const std::string serial = records_to_csv(run_energy_triptych(c), true);
  for (int w : {2, 4, 8}) {
    c.workers = w;
    CHECK(records_to_csv(run_energy_triptych(c), true) == serial);
  }
}

TEST_CASE("my_average: arithmetic mean per mx") {
  const auto two = my_average({rate_record(1, 6, 1.0), rate_record(1, 14, 3.0)});
  REQUIRE(two.size() == 1);
  CHECK(two[0].mean_rate == 2.0);
  CHECK(two[0].n_used == 2);

  const auto single = my_average({rate_record(1, 6, 0.7), rate_record(2, 6, 0.3)});
  REQUIRE(single.size() == 2);
  CHECK(single[0].mean_rate == 0.7);
  CHECK(single[1].mean_rate == 0.3);

  const auto failed = my_average({rate_record(3, 6, 5.0, 1), rate_record(3, 14, 1.0)});
  CHECK(failed[0].mean_rate == 1.0);
  CHECK(failed[0].n_excluded == 1);

  CHECK_THROWS_AS(my_average({rate_record(1, 6, 1.0), rate_record(1, 14, 1.0), rate_record(2, 6, 1.0)}),
                  AggregationError);
  CHECK_THROWS_AS(my_average({rate_record(1, 6, 1.0), rate_record(1, 6, 1.0)}), AggregationError);
}

TEST_CASE("loglog_slope recovers a power law and counts exclusions") {
  std::vector<AveragedPoint> series;
  for (int mx = 1; mx <= 20; ++mx) series.push_back({mx, 0.3 / mx, 4, 0});
  const auto fit = loglog_slope(series, 2, 20);
  CHECK_THAT(fit.slope, WithinAbs(-1.0, 1e-12));
  CHECK_THAT(fit.intercept, WithinAbs(std::log(0.3), 1e-12));
  CHECK(fit.n_points == 19);
  CHECK(fit.n_excluded == 0);

  series[4].mean_rate = std::nan("");
  series[7].mean_rate = -1.0;
  const auto holes = loglog_slope(series, 2, 20);
  CHECK(holes.n_points == 17);
  CHECK(holes.n_excluded == 2);
  CHECK_THAT(holes.slope, WithinAbs(-1.0, 1e-12));

  const auto too_few = loglog_slope(series, 3, 3);
  CHECK(std::isnan(too_few.slope));
}

TEST_CASE("dephasing sweep: single mx gives a single averaged point") {
  SweepConfig c = SweepConfig::preset();
  c.experiment = Experiment::DephasingVsMx;
  c.mx_values = {2};
  const auto sweep = run_dephasing_vs_mx(c);
  CHECK(sweep.records.size() == 4);
  REQUIRE(sweep.averaged.size() == 1);
  CHECK(sweep.averaged[0].mx == 2);
}

TEST_CASE("dephasing sweep: averaged series equals a hand-computed mean") {
  SweepConfig c = SweepConfig::preset();
  c.experiment = Experiment::DephasingVsMx;
  c.mx_values = {4, 5};
  const auto sweep = run_dephasing_vs_mx(c);
  REQUIRE(sweep.records.size() == 8);
  for (int mx : {4, 5}) {
    double sum = 0.0;
    int used = 0, failed = 0;
    for (int my : c.my_values) {
      Device d = c.device;
      d.geometry = spacer_geometry(c, mx, my);
      const auto r = evaluate_record(d, 0.0, kPi, 0.0);
      if (r.ok()) {
        sum += r.rate;
        ++used;
      } else {
        ++failed;
      }
    }
    const auto& p = sweep.averaged[mx == 4 ? 0 : 1];
    CHECK(p.n_used == used);
    CHECK(p.n_excluded == failed);
    CHECK_THAT(p.mean_rate, WithinAbs(sum / used, 1e-14));
  }
  // (mx, my) = (4, *) are all regular at E = 0; (5, 6) hosts a bound state
  // decoupled from both leads, so its bare system is singular.
  CHECK(sweep.averaged[0].n_used == 4);
  CHECK(sweep.averaged[1].n_excluded == 1);
}

TEST_CASE("failed points are annotated, not dropped") {
  SweepConfig c = SweepConfig::preset();
  c.experiment = Experiment::DephasingVsMx;
  c.mx_values = {5};
  c.my_values = {6};
  const auto outcome = run_sweep(c);
  REQUIRE(outcome.records.size() == 1);
  const auto& r = outcome.records[0];
  CHECK(r.error_flag == 1);
  CHECK_FALSE(r.ok());
  CHECK(r.mx == 5);
  CHECK(r.my == 6);
  CHECK(std::isnan(r.rate));
  CHECK(r.error.find("rcond") != std::string::npos);
  CHECK(outcome.error_count == 1);
}

TEST_CASE("spacer geometry for a sweep cell") {
  SweepConfig c = SweepConfig::preset();
  const Geometry g = spacer_geometry(c, 3, 6);
  CHECK(g.mx == 3);
  CHECK(g.my == 6);
  CHECK(g.ring_contact_sites == std::vector<int>{20, 21, 22, 23, 24, 25});
  CHECK(g.sc_sites == std::vector<int>{112, 113, 114, 115, 116, 117});
  CHECK_NOTHROW(g.validate());
}

TEST_CASE("configuration invariants") {
  auto bad = [](auto mutate) {
    SweepConfig c = SweepConfig::preset();
    mutate(c);
    return c;
  };
  CHECK_THROWS_AS(bad([](SweepConfig& c) { c.grid.n_points = 0; }).validate(), ParameterError);
  CHECK_THROWS_AS(bad([](SweepConfig& c) { c.grid = {1.0, -1.0, 5}; }).validate(), ParameterError);
  CHECK_THROWS_AS(bad([](SweepConfig& c) { c.t_ar_values = {0.1, -0.2}; }).validate(), ParameterError);
  CHECK_THROWS_AS(bad([](SweepConfig& c) { c.workers = 0; }).validate(), ParameterError);
  CHECK_THROWS_AS(bad([](SweepConfig& c) {
                    c.experiment = Experiment::DephasingVsMx;
                    c.mx_values = {0, 1};
                  }).validate(),
                  ParameterError);
  CHECK_THROWS_AS(bad([](SweepConfig& c) {
                    c.experiment = Experiment::ContrastVsTar;
                    c.t_ar_values.clear();
                  }).validate(),
                  ParameterError);
  CHECK_THROWS_AS(bad([](SweepConfig& c) { c.device.geometry.n_ring = 2; }).validate(), GeometryError);
}

TEST_CASE("evaluate_record turns solver failures into annotations") {
  Device d;
  d.geometry = Geometry::spacer_preset(5, 6);
  ObservableRecord r;
  CHECK_NOTHROW(r = evaluate_record(d, 0.0, kPi, 0.0));
  CHECK(r.error_flag == 1);
  CHECK(r.ldos.empty());
}
