#include "defosc/scenario.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>

#include "json.hpp"

#include "defosc/errors.hpp"
#include "defosc/evolve.hpp"
#include "defosc/liouvillian.hpp"
#include "defosc/steady.hpp"
#include "defosc/thermo.hpp"

namespace defosc::scenario {
namespace {

constexpr double kThermoTailLimit = 1e-12;

Table spectrum_table(const ScenarioConfig& cfg) {
  const SpectrumTable levels = spectrum(cfg.deformation, cfg.mode_params);
  Table table{{"n", "F", "f", "E", "Omega"}, {}};
  for (std::size_t n = 0; n < cfg.mode_params.dim; ++n) {
    const double f = n == 0 ? std::numeric_limits<double>::quiet_NaN() : cfg.deformation.factor(n);
    table.add_row({static_cast<double>(n), levels.structure[n], f, levels.energies[n], levels.omega_shift[n]});
  }
  return table;
}

Table evolve_table(const ScenarioConfig& cfg) {
  const GeneratorMatrix gen(cfg.deformation, *cfg.bath, cfg.mode_params);
  const DensityMatrix rho0 = cfg.initial_state.build(cfg.deformation, cfg.mode_params.dim);
  IntegrateOptions options;
  options.keep_states = false;
  const double dt = cfg.dt.value_or(gen.recommended_step());
  const Trajectory traj = integrate(gen, rho0, *cfg.t_end, dt, cfg.sample_every, options);

  Table table{{"t", "mean_N", "mean_a_re", "mean_a_im", "mean_Omega_a_re", "mean_Omega_a_im", "energy", "trace_err",
               "min_eig"},
              {}};
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const auto& rec = traj.records[k];
    const auto& obs = rec.observables;
    table.add_row({traj.times[k], obs.mean_N, obs.mean_a.real(), obs.mean_a.imag(), obs.mean_Omega_a.real(),
                   obs.mean_Omega_a.imag(), obs.energy, rec.trace_err, rec.min_eig});
  }
  return table;
}

Table steady_table(const ScenarioConfig& cfg, std::vector<std::string>& warnings) {
  const RateChain chain = transition_rates(cfg.deformation, *cfg.bath, cfg.mode_params);
  const PopulationVector product = steady_product(chain);
  if (product.negative_factor) {
    warnings.push_back("negative steady-state product factor (2 D_+ < lambda); P_product left unnormalized");
  }
  const PopulationVector oracle = steady_nullspace(chain);
  Table table{{"n", "P_product", "P_nullspace", "balance_residual"}, {}};
  for (std::size_t n = 0; n < chain.dim; ++n) {
    const double residual =
        n == 0 ? 0.0 : std::abs(chain.down[n] * product.p[n] - chain.up[n - 1] * product.p[n - 1]);
    table.add_row({static_cast<double>(n), product.p[n], oracle.p[n], residual});
  }
  return table;
}

Table thermo_table(const ScenarioConfig& cfg) {
  const ThermoResult r = thermo(*cfg.beta, cfg.deformation.tau(), cfg.mode_params.omega, cfg.series_tol);
  if (!(r.tail_bound <= kThermoTailLimit * r.z_q)) {
    throw NumericalFailure("partition series tail bound " + format_number(r.tail_bound) +
                           " exceeds 1e-12 relative");
  }
  Table table{{"beta", "tau", "Z_q", "Z_plus_b_tau2", "b", "E_closed", "E_series", "tail_bound"}, {}};
  table.add_row({r.beta, r.tau, r.z_q, r.z_q_expansion, r.b, r.e_inf_closed, r.e_inf_series, r.tail_bound});
  return table;
}

std::string error_record(const std::exception& error, int code) {
  nlohmann::json rec;
  rec["status"] = "error";
  rec["exit"] = code;
  rec["kind"] = code == kExitConfig ? "config" : "numerical";
  if (const auto* cfg = dynamic_cast<const ConfigError*>(&error)) rec["field"] = cfg->field();
  if (const auto* integ = dynamic_cast<const IntegrationError*>(&error)) rec["step"] = integ->step();
  rec["message"] = error.what();
  return rec.dump();
}

std::string warning_record(const std::string& message) {
  nlohmann::json rec;
  rec["status"] = "warning";
  rec["message"] = message;
  return rec.dump();
}

}  // namespace

ScenarioOutput run_scenario(const ScenarioConfig& config) {
  ScenarioOutput out;
  switch (config.mode) {
    case Mode::spectrum:
      out.table = spectrum_table(config);
      break;
    case Mode::evolve:
      out.table = evolve_table(config);
      break;
    case Mode::steady:
      out.table = steady_table(config, out.warnings);
      break;
    case Mode::thermo:
      out.table = thermo_table(config);
      break;
    case Mode::sweep:
      throw ConfigError("mode", "run_scenario does not run sweeps; use run_sweep");
  }
  return out;
}

int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const IntegrationError*>(&error) || dynamic_cast<const DegenerateModelError*>(&error) ||
      dynamic_cast<const NumericalFailure*>(&error)) {
    return kExitNumerical;
  }
  if (dynamic_cast<const ConfigError*>(&error) || dynamic_cast<const std::logic_error*>(&error) ||
      dynamic_cast<const UnsupportedModelError*>(&error)) {
    return kExitConfig;
  }
  return kExitNumerical;
}

SweepOutput run_sweep(const FlatConfig& flat, const SweepSpec& sweep, unsigned jobs) {
  struct Slot {
    std::optional<ScenarioOutput> result;
    std::string error;
    int exit_code = kExitOk;
  };
  const std::size_t count = sweep.values.size();
  std::vector<Slot> slots(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next.fetch_add(1); k < count; k = next.fetch_add(1)) {
      try {
        const ScenarioConfig cfg = parse_config(with_sweep_value(flat, sweep.parameter, sweep.values[k]));
        slots[k].result = run_scenario(cfg);
      } catch (const std::exception& e) {
        slots[k].error = e.what();
        slots[k].exit_code = exit_code_for(e);
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  SweepOutput out;
  for (std::size_t k = 0; k < count; ++k) {
    Slot& slot = slots[k];
    if (!slot.result) {
      out.partial = "sweep value " + format_number(sweep.values[k]) + " failed: " + slot.error;
      out.exit_code = slot.exit_code;
      break;
    }
    const Table& t = slot.result->table;
    if (out.table.columns.empty()) {
      out.table.columns.push_back("sweep_" + sweep.parameter);
      out.table.columns.insert(out.table.columns.end(), t.columns.begin(), t.columns.end());
    }
    for (const auto& row : t.rows) {
      std::vector<double> keyed{sweep.values[k]};
      keyed.insert(keyed.end(), row.begin(), row.end());
      out.table.add_row(std::move(keyed));
    }
    for (const auto& w : slot.result->warnings) out.warnings.push_back("sweep value " + format_number(sweep.values[k]) + ": " + w);
  }
  return out;
}

int run_cli(const CliRequest& request, std::ostream& out, std::ostream& err) {
  try {
    FlatConfig flat = load_config(request.config);
    const Mode requested = parse_mode(request.mode, "<mode>");
    if (const auto it = flat.find("mode"); it != flat.end()) {
      if (parse_mode(it->second) != requested) {
        throw ConfigError("mode", "config mode \"" + it->second + "\" differs from command-line mode \"" +
                                      request.mode + "\"");
      }
    } else {
      flat["mode"] = std::string(mode_name(requested));
    }
    const ScenarioConfig cfg = parse_config(flat);
    const OutputFormat format = request.format.value_or(cfg.format);
    const auto path = request.out ? request.out : cfg.output_path;

    Table table;
    std::vector<std::string> warnings;
    std::optional<std::string> partial;
    int code = kExitOk;
    if (cfg.mode == Mode::sweep) {
      SweepOutput sweep = run_sweep(flat, *cfg.sweep, request.jobs);
      table = std::move(sweep.table);
      warnings = std::move(sweep.warnings);
      partial = std::move(sweep.partial);
      code = sweep.exit_code;
    } else {
      ScenarioOutput result = run_scenario(cfg);
      table = std::move(result.table);
      warnings = std::move(result.warnings);
    }

    auto emit = [&](std::ostream& stream) {
      if (format == OutputFormat::json) {
        write_json(stream, std::string(mode_name(cfg.mode)), table, partial);
      } else {
        write_csv(stream, table, partial);
      }
    };
    if (path) {
      std::ofstream file(*path, std::ios::binary | std::ios::trunc);
      if (!file) throw ConfigError("output.path", "cannot write " + path->string());
      emit(file);
    } else {
      emit(out);
    }
    for (const auto& w : warnings) err << warning_record(w) << '\n';
    if (partial) err << error_record(std::runtime_error(*partial), code) << '\n';
    return code;
  } catch (const std::exception& e) {
    const int code = exit_code_for(e);
    err << error_record(e, code) << '\n';
    return code;
  }
}

}  // namespace defosc::scenario
