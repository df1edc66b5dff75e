#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "acceptance.hpp"
#include "vsheet/errors.hpp"
#include "vsheet/euler.hpp"
#include "vsheet/io.hpp"
#include "vsheet/moments.hpp"
#include "vsheet/velocity.hpp"

using namespace vsheet;
using nlohmann::json;
using Complex = std::complex<double>;

namespace {

constexpr int kExitConverged = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNotConverged = 2;

struct Common {
  std::string config_path;
  std::string csv_path;

  RunConfig config() const { return config_path.empty() ? RunConfig{} : load_run_config(config_path); }
};

std::string decimals10(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10f", x);
  return buf;
}

std::string short_g(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string sci(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

// "-" sends the table to stdout and the record to stderr.
class Output {
 public:
  explicit Output(const std::string& csv_path) : csv_path_(csv_path) {}

  bool csv_to_stdout() const { return csv_path_ == "-"; }

  void table(const std::string& header, const std::vector<std::string>& rows) const {
    if (csv_path_.empty()) return;
    std::ostringstream out;
    out << header << '\n';
    for (const auto& row : rows) out << row << '\n';
    if (csv_to_stdout()) {
      std::cout << out.str();
    } else {
      std::ofstream f(csv_path_);
      if (!f) throw DomainError("cannot write " + csv_path_);
      f << out.str();
    }
  }

  int record(std::string command, json parameters, json body, bool converged,
             std::chrono::steady_clock::time_point start) const {
    json rec{{"command", std::move(command)}, {"parameters", std::move(parameters)}};
    rec.update(body);
    rec["converged"] = converged;
    rec["wall_time"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    (csv_to_stdout() ? std::cerr : std::cout) << rec.dump(2) << '\n';
    return converged ? kExitConverged : kExitNotConverged;
  }

 private:
  std::string csv_path_;
};

Sheet make_sheet(const std::string& measure, double mu, double t) {
  if (measure == "timezero") return TimeZeroSheet{SheetMu(mu)};
  if (measure == "kaden") return KadenSheet(SheetMu(mu), t);
  throw DomainError("measure must be timezero or kaden");
}

json sheet_parameters(const std::string& measure, double mu, double t) {
  json p{{"measure", measure}, {"mu", mu}, {"alpha", SheetMu(mu).alpha()}};
  if (measure == "kaden") p["t"] = t;
  return p;
}

json integral_json(const quad::IntegralResult& r) {
  return {{"value", r.value}, {"error_estimate", r.error_estimate}, {"converged", r.converged},
          {"evaluations", r.evaluations}};
}

json trace_json(const std::vector<quad::ExcisionEntry>& trace) {
  json out = json::array();
  for (const auto& e : trace) out.push_back({{"epsilon", e.epsilon}, {"value", e.partial}});
  return out;
}

json condition_json(const ConditionReport& c) {
  return {{"mu", c.mu},
          {"alpha", c.alpha},
          {"thresholds",
           {{"decay_exponent", c.thresholds.decay_exponent},
            {"matching", c.thresholds.matching},
            {"pressure", c.thresholds.pressure}}},
          {"decay", {{"radii", c.decay_radii}, {"values", c.decay_values}, {"exponent", c.decay_exponent}}},
          {"decay_holds", c.decay_holds},
          {"matching_witness", c.matching_witness},
          {"matching_holds", c.matching_holds},
          {"pressure_grid", c.pressure_grid},
          {"pressure_witness", c.pressure_witness},
          {"pressure_continuity_holds", c.pressure_continuity_holds},
          {"kinetic_jump_witness", c.kinetic_jump_witness},
          {"all_hold", c.all_hold()}};
}

// x0,x1,nx,y0,y1,ny
struct Grid {
  double x0, x1, y0, y1;
  int nx, ny;
};

Grid parse_grid(const std::string& spec) {
  std::vector<double> v;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ',');) v.push_back(std::stod(item));
  if (v.size() != 6) throw DomainError("--grid expects x0,x1,nx,y0,y1,ny");
  Grid g{v[0], v[1], v[3], v[4], static_cast<int>(v[2]), static_cast<int>(v[5])};
  if (g.nx < 1 || g.ny < 1 || v[2] != g.nx || v[5] != g.ny) throw DomainError("grid counts must be positive integers");
  return g;
}

double grid_coord(double a, double b, int n, int i) { return n == 1 ? a : a + (b - a) * i / (n - 1); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vortex sheet velocity, energy and weak Euler computations"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--config", common.config_path, "JSON file with quadrature and series settings")
      ->check(CLI::ExistingFile);
  const auto start = std::chrono::steady_clock::now();

  int code = kExitConverged;
  auto guarded = [&](auto&& body) {
    return [&, body] {
      try {
        code = body();
      } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        code = kExitUsage;
      } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        code = kExitUsage;
      } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        code = kExitUsage;
      } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        code = kExitNotConverged;
      }
    };
  };

  // pv-lemma
  double pv_alpha = 0.5;
  auto* pv = app.add_subcommand("pv-lemma", "PV of t^(alpha-1)/(1-t) over (0, inf)");
  pv->add_option("--alpha", pv_alpha)->required();
  pv->callback(guarded([&] {
    const auto r = pv_lemma_value(pv_alpha, common.config().quad);
    const Output out(common.csv_path);
    return out.record("pv-lemma", {{"alpha", pv_alpha}},
                      {{"value", r.value},
                       {"error_estimate", std::max(r.excision.error_estimate, r.path_difference)},
                       {"excision", integral_json(r.excision)},
                       {"reduction", integral_json(r.reduction)},
                       {"path_difference", r.path_difference},
                       {"trace", trace_json(r.excision.excision_trace)}},
                      r.converged, start);
  }));

  // matching
  double gamma = 1.0;
  std::vector<double> eps_schedule;
  auto* matching = app.add_subcommand("matching", "velocity-matching integral on the mu = 2/3 spiral");
  matching->add_option("--gamma", gamma)->required();
  matching->add_option("--eps-schedule", eps_schedule, "excision radii, strictly decreasing")->delimiter(',');
  matching->add_option("--csv", common.csv_path, "eps,value table; - for stdout");
  matching->callback(guarded([&] {
    auto cfg = common.config();
    if (!eps_schedule.empty()) cfg.quad.excision_schedule = eps_schedule;
    const auto r = matching_lhs(gamma, cfg.quad);
    const Output out(common.csv_path);
    std::vector<std::string> rows;
    for (const auto& e : r.excision_trace) rows.push_back(short_g(e.epsilon) + "," + decimals10(e.partial));
    out.table("eps,value", rows);
    return out.record("matching", {{"gamma", gamma}, {"eps_schedule", cfg.quad.excision_schedule}},
                      {{"value", r.lhs},
                       {"rhs", r.rhs},
                       {"residual", r.residual},
                       {"error_estimate", r.error_estimate},
                       {"trace", trace_json(r.excision_trace)}},
                      r.converged, start);
  }));

  // surface-energy
  std::string measure = "timezero", method = "series";
  double mu = 2.0 / 3.0, t = 1.0, radius = 1.0;
  auto* se = app.add_subcommand("surface-energy", "integral of |v|^2 over the circle |x| = r");
  se->add_option("--measure", measure)->check(CLI::IsMember({"timezero", "kaden"}));
  se->add_option("--mu", mu)->required();
  se->add_option("--t", t);
  se->add_option("--r", radius)->required();
  se->add_option("--method", method)->check(CLI::IsMember({"series", "direct"}));
  se->callback(guarded([&] {
    const auto cfg = common.config();
    const Sheet sheet = make_sheet(measure, mu, t);
    const auto m = method == "series" ? EnergyMethod::Series : EnergyMethod::Direct;
    const auto r = surface_energy(sheet, radius, m, cfg.quad, cfg.series);
    json params = sheet_parameters(measure, mu, t);
    params["r"] = radius;
    params["method"] = method;
    json body{{"value", r.value}, {"error_estimate", r.error_estimate}, {"evaluations", r.evaluations}};
    if (measure == "timezero") body["closed_form"] = surface_energy_closed(SheetMu(mu), radius);
    return Output(common.csv_path).record("surface-energy", params, body, r.converged, start);
  }));

  // residual
  std::string field_path;
  auto* residual = app.add_subcommand("residual", "momentum form against its right-hand side");
  residual->add_option("--mu", mu)->required();
  residual->add_option("--field", field_path, "stream-bump JSON")->required()->check(CLI::ExistingFile);
  residual->callback(guarded([&] {
    const auto cfg = common.config();
    const SheetMu p(mu);
    const TestField field{load_stream_bump(field_path)};
    const auto m = momentum_form(p, field, cfg.quad);
    json body{{"momentum_form", {{"value", m.value}, {"error_estimate", m.error_estimate}, {"scale", m.scale},
                                  {"converged", m.converged}}},
              {"trace", trace_json(m.excision_trace)}};
    bool converged = m.converged;
    double rhs_error = 0.0;
    std::optional<double> rhs;
    if (std::abs(p.alpha() - 0.5) < 1e-12) {
      const Vec2 Y = impulse_Y(cfg.quad);
      const Vec2 phi0 = test_field_eval(field, {0.0, 0.0}).phi;
      rhs = Y[0] * phi0[0] + Y[1] * phi0[1];
      body["rhs_kind"] = "impulse";
      body["Y"] = Y;
    } else if (p.alpha() > 0.5) {
      const auto line = line_rhs(p, field, cfg.quad);
      rhs = line.value;
      rhs_error = line.error_estimate;
      converged = converged && line.converged;
      body["rhs_kind"] = "line";
    } else {
      body["rhs_kind"] = nullptr;
    }
    body["value"] = m.value;
    body["error_estimate"] = m.error_estimate + rhs_error;
    if (rhs) {
      body["rhs"] = *rhs;
      body["difference"] = m.value - *rhs;
    }
    json params{{"mu", mu}, {"alpha", p.alpha()}, {"field", to_json(field.source)}};
    return Output(common.csv_path).record("residual", params, body, converged, start);
  }));

  // conditions
  auto* conditions = app.add_subcommand("conditions", "decay, matching and pressure-continuity report");
  conditions->add_option("--mu", mu)->required();
  conditions->callback(guarded([&] {
    const auto c = condition_report(SheetMu(mu), common.config().quad);
    return Output(common.csv_path).record("conditions", {{"mu", mu}}, condition_json(c), true, start);
  }));

  // velocity
  std::string grid_spec, velocity_method = "quadrature";
  auto* velocity = app.add_subcommand("velocity", "velocity on a rectangular grid as CSV x1,x2,v1,v2,err");
  velocity->add_option("--grid", grid_spec, "x0,x1,nx,y0,y1,ny")->required();
  velocity->add_option("--measure", measure)->check(CLI::IsMember({"timezero", "kaden"}));
  velocity->add_option("--mu", mu)->required();
  velocity->add_option("--t", t);
  velocity->add_option("--method", velocity_method)->check(CLI::IsMember({"quadrature", "closed"}));
  velocity->add_option("--csv", common.csv_path, "table destination; - for stdout (default)");
  velocity->callback(guarded([&] {
    const auto cfg = common.config();
    const Grid g = parse_grid(grid_spec);
    const SheetMu p(mu);
    std::optional<KadenVelocity> kaden;
    if (measure == "kaden") kaden.emplace(KadenSheet(p, t), cfg.quad);
    std::vector<std::string> rows;
    json skipped = json::array();
    bool converged = true;
    double worst = 0.0;
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        const Complex z(grid_coord(g.x0, g.x1, g.nx, i), grid_coord(g.y0, g.y1, g.ny, j));
        try {
          VelocitySample v;
          if (kaden) {
            v = (*kaden)(z);
          } else {
            if (z.imag() == 0.0 && z.real() >= 0.0) throw DomainError("point on the sheet");
            v = velocity_method == "closed" ? velocity_timezero_closed(z, p) : velocity_timezero(z, p, cfg.quad);
          }
          converged = converged && v.converged;
          worst = std::max(worst, v.error_estimate);
          rows.push_back(sci(z.real()) + "," + sci(z.imag()) + "," + sci(v.vector[0]) + "," + sci(v.vector[1]) + "," +
                         sci(v.error_estimate));
        } catch (const DomainError& e) {
          skipped.push_back({{"point", complex_json(z)}, {"reason", e.what()}});
        }
      }
    }
    const Output out(common.csv_path.empty() ? "-" : common.csv_path);
    out.table("x1,x2,v1,v2,err", rows);
    json params = sheet_parameters(measure, mu, t);
    params["grid"] = grid_spec;
    params["method"] = kaden ? "quadrature" : velocity_method;
    return out.record("velocity", params,
                      {{"points", rows.size()}, {"error_estimate", worst}, {"skipped", skipped}}, converged, start);
  }));

  // moments
  int order = 0;
  auto* moments = app.add_subcommand("moments", "inner moment m_n and outer moment M_n at radius r");
  moments->add_option("--measure", measure)->check(CLI::IsMember({"timezero", "kaden"}));
  moments->add_option("--mu", mu)->required();
  moments->add_option("--t", t);
  moments->add_option("--r", radius)->required();
  moments->add_option("--n", order)->required();
  moments->callback(guarded([&] {
    if (order < 0) throw DomainError("--n must be non-negative");
    const auto cfg = common.config();
    const Sheet sheet = make_sheet(measure, mu, t);
    const SheetMu p(mu);
    const auto inner = inner_moment(sheet, radius, order, cfg.quad);
    json body{{"value", complex_json(inner)},
              {"inner", complex_json(inner)},
              {"inner_bound", inner_moment_bound(p, radius, order)},
              {"error_estimate", cfg.quad.tolerance(std::abs(inner))}};
    if (order >= 1) {
      const auto outer = outer_moment(sheet, radius, order, cfg.quad);
      body["outer"] = complex_json(outer);
      body["outer_bound"] = outer_moment_bound(p, radius, order);
    }
    json params = sheet_parameters(measure, mu, t);
    params["r"] = radius;
    params["n"] = order;
    return Output(common.csv_path).record("moments", params, body, true, start);
  }));

  // impulse
  auto* impulse = app.add_subcommand("impulse", "impulse vector Y at alpha = 1/2");
  impulse->callback(guarded([&] {
    const Vec2 Y = impulse_Y(common.config().quad);
    const double tol = 1e-8;
    return Output(common.csv_path).record("impulse", json::object(),
                                          {{"value", Y}, {"error_estimate", tol}}, std::abs(Y[1]) <= tol, start);
  }));

  // reproduce-paper
  std::vector<int> only;
  auto* reproduce = app.add_subcommand("reproduce-paper", "run the acceptance criteria and report");
  reproduce->add_option("--criterion", only, "subset of criteria 1..9");
  reproduce->callback(guarded([&] {
    const auto cfg = common.config();
    if (only.empty())
      for (int id = 1; id <= acceptance::kCriteria; ++id) only.push_back(id);
    json report = json::array();
    bool all = true;
    for (int id : only) {
      const auto r = acceptance::run_criterion(id, cfg);
      std::cerr << acceptance::format_line(r) << '\n';
      report.push_back(acceptance::to_json(r));
      all = all && r.passed;
    }
    return Output(common.csv_path).record("reproduce-paper", {{"criteria", only}, {"config", to_json(cfg)}},
                                          {{"criteria", report}, {"all_passed", all}}, all, start);
  }));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  return code;
}
