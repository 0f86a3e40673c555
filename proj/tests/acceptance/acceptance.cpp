// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "defosc/algebra.hpp"
#include "defosc/evolve.hpp"
#include "defosc/liouvillian.hpp"
#include "defosc/steady.hpp"
#include "defosc/thermo.hpp"

using namespace defosc;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kSpectrumTol = 1e-12;
constexpr double kRatioLog2Low = 3.25;  // "about 16": log2 of the halving ratio within 4 +- 0.75
constexpr double kRatioLog2High = 4.75;
constexpr double kConservationTol = 1e-12;
constexpr double kDecayRelTol = 1e-4;
constexpr double kFlowRelTol = 1e-5;
constexpr double kOracleTol = 1e-10;
constexpr double kBalanceTol = 1e-12;
constexpr double kBoltzmannTol = 1e-12;
constexpr double kStationaryTol = 1e-8;
constexpr double kTailMass = 1e-12;
constexpr double kClosedFormTol = 1e-12;
constexpr double kRoundingFloor = 1e-14;
constexpr double kBTol = 1e-10;
constexpr double kMomentTol = 1e-12;
constexpr double kRelaxTol = 1e-6;
constexpr double kRelaxSeconds = 30.0;

const double kLn2 = std::log(2.0);

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

Outcome spectrum_identity() {
  double worst_scaled = 0.0, worst_abs = 0.0;
  const ModeParams mode{1.0, 64};
  for (double tau : {0.0, 0.1, 0.5, kLn2}) {
    const Deformation def = Deformation::q_deformed(tau);
    for (std::size_t n = 1; n <= 63; ++n) {
      const double dev = std::abs((energy_level(def, mode, n) - energy_level(def, mode, n - 1)) -
                                  mode.omega * omega_shift(def, n - 1));
      worst_abs = std::max(worst_abs, dev);
      worst_scaled = std::max(worst_scaled, dev / (mode.omega * std::max(1.0, omega_shift(def, n - 1))));
    }
  }
  return {worst_scaled <= kSpectrumTol,
          fmt("max |dE - w Omega| / (w max(1, Omega)) = %.3g (tol %.0e); raw absolute max %.3g", worst_scaled,
              kSpectrumTol, worst_abs)};
}

bool ratio_ok(double coarse, double fine) {
  const double l = std::log2(coarse);
  return l >= kRatioLog2Low && l <= kRatioLog2High && std::log2(fine) >= kRatioLog2Low &&
         std::log2(fine) <= kRatioLog2High && std::abs(fine - 16.0) <= std::abs(coarse - 16.0);
}

Outcome small_tau_omega() {
  auto dev = [](double tau, std::size_t n) {
    const double np1 = static_cast<double>(n + 1);
    return std::abs(omega_shift(Deformation::q_deformed(tau), n) - (1.0 + tau * tau * np1 * np1 / 2.0));
  };
  bool ok = true;
  double lo = 1e300, hi = 0.0;
  for (std::size_t n = 0; n <= 10; ++n) {
    const double r1 = dev(0.2, n) / dev(0.1, n);
    const double r2 = dev(0.1, n) / dev(0.05, n);
    ok = ok && ratio_ok(r1, r2);
    lo = std::min({lo, r1, r2});
    hi = std::max({hi, r1, r2});
  }
  return {ok, fmt("halving ratios in [%.3f, %.3f], n <= 10 (log2 band [%.2f, %.2f])", lo, hi, kRatioLog2Low,
                  kRatioLog2High)};
}

Eigen::MatrixXcd random_hermitian_unit_trace(std::size_t dim, std::mt19937& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXcd b(dim, dim);
  for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = complex(g(rng), g(rng));
  Eigen::MatrixXcd h = 0.5 * (b + b.adjoint());
  const double shift = (1.0 - h.trace().real()) / static_cast<double>(dim);
  for (Eigen::Index i = 0; i < h.rows(); ++i) h(i, i) = complex(h(i, i).real() + shift, 0.0);
  return h;
}

Outcome generator_conservation() {
  std::mt19937 rng(20240601);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_trace = 0.0, worst_herm = 0.0;
  int states = 0;
  for (std::size_t dim : {2u, 4u, 8u, 16u}) {
    std::vector<double> dp(dim), dm(dim), dpq(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      dp[k] = 0.2 + u(rng);
      dm[k] = 0.2 * (u(rng) - 0.5);
      dpq[k] = 0.2 * (u(rng) - 0.5);
    }
    const BathModel baths[] = {BathModel::thermal(0.4, 1.3), BathModel::thermal(0.4, HUGE_VAL),
                               squeezed_preset(0.3, 0.6, complex(0.2, -0.1)),
                               BathModel::custom(0.3, dp, dm, dpq)};
    for (const auto& bath : baths) {
      const GeneratorMatrix gen(Deformation::q_deformed(0.2), bath, {1.0, dim});
      for (int rep = 0; rep < 200; ++rep, ++states) {
        const Eigen::MatrixXcd out = apply_generator(gen, random_hermitian_unit_trace(dim, rng));
        worst_trace = std::max(worst_trace, std::abs(out.trace()));
        worst_herm = std::max(worst_herm, hermiticity_defect(out));
      }
    }
  }
  return {worst_trace <= kConservationTol && worst_herm <= kConservationTol,
          fmt("%d states: max |Tr L(rho)| = %.3g, max Hermiticity defect = %.3g (tol %.0e)", states, worst_trace,
              worst_herm, kConservationTol)};
}

double fitted_decay_rate(const Trajectory& traj) {
  double st = 0, sy = 0, stt = 0, sty = 0;
  const double n = static_cast<double>(traj.times.size());
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const double t = traj.times[k];
    const double y = std::log(traj.records[k].observables.mean_N);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
  }
  return -(n * sty - st * sy) / (n * stt - st * st);
}

Outcome zero_temperature_decay() {
  const double lambda = 0.5;
  IntegrateOptions options;
  options.keep_states = false;
  options.compute_min_eig = false;
  double worst = 0.0;
  std::string rates;
  for (double tau : {0.0, 0.3}) {
    const Deformation def = tau == 0.0 ? Deformation::identity() : Deformation::q_deformed(tau);
    const GeneratorMatrix gen(def, BathModel::thermal(lambda, HUGE_VAL), {1.0, 8});
    const Trajectory traj = integrate(gen, DensityMatrix::fock(8, 3), 6.0, 1e-3, 50, options);
    const double rate = fitted_decay_rate(traj);
    worst = std::max(worst, std::abs(rate - 2 * lambda) / (2 * lambda));
    rates += fmt(" tau=%.1f: %.10f", tau, rate);
  }
  return {worst <= kDecayRelTol,
          fmt("fitted rates (2 lambda = 1):%s; max rel dev %.3g (tol %.0e)", rates.c_str(), worst, kDecayRelTol)};
}

Outcome flow_consistency() {
  double worst = 0.0;
  std::size_t checks = 0;
  for (double beta : {1.0, 2.0}) {
    for (double tau : {0.0, 0.2}) {
      const std::size_t dim = 30;
      const Deformation def = Deformation::q_deformed(tau);
      const BathModel bath = BathModel::thermal(0.1, beta);
      const GeneratorMatrix gen(def, bath, {1.0, dim});
      const double dt = 1e-3;
      IntegrateOptions options;
      options.compute_min_eig = false;
      const Trajectory traj = integrate(gen, DensityMatrix::fock(dim, 3), 2.0, dt, 1, options);
      for (std::size_t k = 1; k + 1 < traj.times.size(); k += 20) {
        const double fd =
            (traj.records[k + 1].observables.mean_N - traj.records[k - 1].observables.mean_N) / (2 * dt);
        const double flow = mean_quanta_flow(traj.states[k], def, bath, {1.0, dim});
        worst = std::max(worst, std::abs(fd - flow) / std::abs(flow));
        ++checks;
      }
    }
  }
  return {worst <= kFlowRelTol,
          fmt("%zu samples over beta in {1,2}, tau in {0,0.2}: max rel dev %.3g (tol %.0e)", checks, worst,
              kFlowRelTol)};
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

Outcome steady_oracle() {
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> tau_d(0.0, 1.0), beta_d(0.1, 5.0), lambda_d(0.0, 1.0);
  const std::size_t dims[] = {8, 16, 32};
  std::uniform_int_distribution<int> dim_d(0, 2);
  double worst = 0.0, worst_balance = 0.0;
  for (int draw = 0; draw < 50; ++draw) {
    const double tau = tau_d(rng), beta = beta_d(rng);
    double lambda = lambda_d(rng);
    if (lambda == 0.0) lambda = 1.0;
    const std::size_t dim = dims[dim_d(rng)];
    const RateChain chain =
        transition_rates(Deformation::q_deformed(tau), BathModel::thermal(lambda, beta), {1.0, dim});
    const PopulationVector p = steady_product(chain);
    worst = std::max(worst, max_diff(p.p, steady_nullspace(chain).p));
    worst_balance = std::max(worst_balance, detailed_balance_residual(chain, p.p));
  }
  return {worst <= kOracleTol && worst_balance <= kBalanceTol,
          fmt("50 draws: max |P_product - P_nullspace| = %.3g (tol %.0e), max balance residual %.3g (tol %.0e)",
              worst, kOracleTol, worst_balance, kBalanceTol)};
}

Outcome boltzmann_stationarity() {
  double worst_match = 0.0, worst_image = 0.0, worst_tail = 0.0;
  for (double tau : {0.0, 0.1, 0.3, 0.7}) {
    for (double beta : {0.5, 1.0, 2.0, 5.0}) {
      const Deformation def = Deformation::q_deformed(tau);
      std::size_t dim = 2;
      ThermalDistribution t = thermal_distribution(def, dim, beta);
      while (!(t.tail_bound < kTailMass)) t = thermal_distribution(def, ++dim, beta);
      const BathModel bath = BathModel::thermal(0.5, beta);
      const PopulationVector p = steady_product(transition_rates(def, bath, {1.0, dim}));
      worst_match = std::max(worst_match, max_diff(t.populations.p, p.p));
      const GeneratorMatrix gen(def, bath, {1.0, dim});
      worst_image = std::max(worst_image, max_abs(apply_generator(gen, DensityMatrix::thermal(def, dim, beta))));
      worst_tail = std::max(worst_tail, t.tail_bound);
    }
  }
  return {worst_match <= kBoltzmannTol && worst_image <= kStationaryTol && worst_tail < kTailMass,
          fmt("max |P_Boltzmann - P_product| = %.3g (tol %.0e); max |L(rho_B)| = %.3g (tol %.0e); tail mass <= %.3g",
              worst_match, kBoltzmannTol, worst_image, kStationaryTol, worst_tail)};
}

Outcome undeformed_closed_forms() {
  const SeriesSum z = partition_q(kLn2, 0.0);
  const double z_dev = std::abs(z.value - std::sqrt(2.0));

  const std::size_t dim = 80;
  const ThermalDistribution t = thermal_distribution(Deformation::identity(), dim, kLn2);
  double mean = 0.0;
  for (std::size_t n = 0; n < dim; ++n) mean += static_cast<double>(n) * t.populations[n];
  // The omitted tail of a geometric distribution shifts the mean by at most
  // tail * (dim + 1 / (1 - r)) with r = 1/2.
  const double mean_tol = t.tail_bound * (dim + 2.0) + kRoundingFloor;
  const double mean_dev = std::abs(mean - 1.0);

  const double e_closed = equilibrium_energy_closed(kLn2, 0.0, 1.0);
  const double e_series = equilibrium_energy_series(kLn2, 0.0, 1.0);
  const double e_dev = std::max(std::abs(e_closed - 1.5), std::abs(e_series - 1.5));
  return {z_dev <= kClosedFormTol && mean_dev <= mean_tol && e_dev <= kClosedFormTol,
          fmt("|Z - sqrt2| = %.3g (tol %.0e); |<n> - 1| = %.3g (tol %.3g); |E - 1.5| = %.3g (tol %.0e)", z_dev,
              kClosedFormTol, mean_dev, mean_tol, e_dev, kClosedFormTol)};
}

Outcome small_tau_thermo() {
  auto dz = [](double beta, double tau) {
    return std::abs(partition_q(beta, tau).value - zq_small_tau(beta, tau).z_plus_b_tau2);
  };
  auto de = [](double beta, double tau) {
    return std::abs(equilibrium_energy_series(beta, tau, 1.0) - equilibrium_energy_closed(beta, tau, 1.0));
  };
  bool ok = true;
  double lo = 1e300, hi = 0.0;
  for (double beta : {0.5, 1.0, 2.0}) {
    const double rz1 = dz(beta, 0.1) / dz(beta, 0.05), rz2 = dz(beta, 0.05) / dz(beta, 0.025);
    const double re1 = de(beta, 0.1) / de(beta, 0.05), re2 = de(beta, 0.05) / de(beta, 0.025);
    ok = ok && ratio_ok(rz1, rz2) && ratio_ok(re1, re2);
    lo = std::min({lo, rz1, rz2, re1, re2});
    hi = std::max({hi, rz1, rz2, re1, re2});
  }
  const SmallTauPartition s = zq_small_tau(kLn2, 0.1);
  const double b_dev = std::abs(s.b + 3.0 * std::sqrt(2.0) * kLn2);
  const double m_dev = std::max({std::abs(s.moments.nbar - 1.0), std::abs(s.moments.nbar2 - 3.0),
                                 std::abs(s.moments.nbar3 - 13.0)});
  ok = ok && b_dev <= kBTol && m_dev <= kMomentTol;
  return {ok, fmt("Z and E halving ratios in [%.3f, %.3f] for tau 0.1 -> 0.05 -> 0.025; |b + 3 sqrt2 ln2| = %.3g "
                  "(tol %.0e); moment dev %.3g (tol %.0e)",
                  lo, hi, b_dev, kBTol, m_dev, kMomentTol)};
}

Outcome dynamics_to_statics() {
  const auto start = std::chrono::steady_clock::now();
  const double lambda = 0.5, beta = 1.0;
  const std::size_t dim = 24;
  double worst = 0.0;
  for (double tau : {0.0, 0.2}) {
    const Deformation def = Deformation::q_deformed(tau);
    const GeneratorMatrix gen(def, BathModel::thermal(lambda, beta), {1.0, dim});
    IntegrateOptions options;
    options.keep_states = true;
    options.compute_min_eig = false;
    const Trajectory traj = integrate(gen, DensityMatrix::fock(dim, 2), 40.0 / lambda, 1e-3, 1000000000, options);
    const ThermalDistribution t = thermal_distribution(def, dim, beta);
    const DensityMatrix& last = traj.states.back();
    for (std::size_t n = 0; n < dim; ++n) worst = std::max(worst, std::abs(last(n, n).real() - t.populations[n]));
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {worst <= kRelaxTol && seconds < kRelaxSeconds,
          fmt("max |diag rho(40/lambda) - P_Boltzmann| = %.3g (tol %.0e); runtime %.2f s (limit %.0f s)", worst,
              kRelaxTol, seconds, kRelaxSeconds)};
}

Outcome positivity_constraint() {
  const double lambda = 0.7;
  int checked = 0;
  bool all = true;
  for (int k = 1; k <= 100; ++k) {
    const double beta = 0.1 * k;
    for (double tau : {0.0, 0.3}) {
      const Deformation def = Deformation::q_deformed(tau);
      const BathModel bath = BathModel::thermal(lambda, beta);
      for (std::size_t n = 0; n < 16; ++n, ++checked) {
        const LevelCoefficients c = thermal_coefficients(def, bath, n);
        const DiffusionCoefficients d = diffusion_from_combinations(c.d_plus, c.d_minus, c.d_pq, 1.0);
        all = all && positivity_check(d.d_pp, d.d_qq, d.d_pq, lambda);
      }
    }
  }
  const bool rejected = !positivity_check(lambda / 4, lambda / 4, 0.0, lambda);
  return {all && rejected, fmt("%d thermal coefficient sets (beta = 0.1..10) %s; violating triple %s", checked,
                               all ? "accepted" : "NOT all accepted", rejected ? "rejected" : "accepted")};
}

// ---- determinism through the CLI binary ----

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

#ifndef DEFOSC_CLI_PATH
#define DEFOSC_CLI_PATH "defosc"
#endif

int run_cli(const std::string& args, const fs::path& out) {
  const std::string cmd = "'" DEFOSC_CLI_PATH "' " + args + " --out '" + out.string() + "' 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / ("defosc_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  struct Case {
    std::string mode;
    std::string config;
  };
  const std::vector<Case> cases = {
      {"spectrum", "mode = spectrum\ndim = 40\ndeformation.tau = 0.3\n"},
      {"evolve",
       "mode = evolve\ndim = 12\nbeta = 1\nlambda = 0.2\ndeformation.tau = 0.1\ninitial_state.n = 3\nt_end = 3\n"
       "sample_every = 100\n"},
      {"steady", "mode = steady\ndim = 20\nbeta = 0.8\nlambda = 0.3\ndeformation.tau = 0.2\n"},
      {"thermo", "mode = thermo\nbeta = 1.3\ndeformation.tau = 0.07\n"},
      {"sweep",
       "mode = sweep\ndim = 10\nbeta = 1\nlambda = 0.3\nt_end = 2\ninitial_state.n = 2\ndeformation.tau = 0.1\n"
       "sample_every = 200\nsweep.base = evolve\nsweep.parameter = tau\nsweep.values = 0, 0.05, 0.1, 0.15, 0.2, 0.25\n"},
      {"sweep",
       "mode = sweep\nbeta = 1\nsweep.base = thermo\nsweep.parameter = beta\nsweep.values = 0.5, 1, 1.5, 2, 2.5\n"
       "deformation.tau = 0.05\n"}};
  bool ok = true;
  int runs = 0;
  std::string failures;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const fs::path cfg = dir / ("case" + std::to_string(c) + ".cfg");
    std::ofstream(cfg) << cases[c].config;
    std::string reference;
    for (const char* jobs : {"1", "1", "2", "4", "8"}) {
      for (const char* format : {"csv", "json"}) {
        const fs::path out = dir / (std::string("out_") + jobs + "." + format);
        const int code = run_cli(cases[c].mode + " --config '" + cfg.string() + "' --jobs " + jobs + " --format " +
                                     format,
                                 out);
        ++runs;
        if (code != 0) {
          ok = false;
          failures += " " + cases[c].mode + ":exit" + std::to_string(code);
          continue;
        }
        if (std::string(format) == "csv") {
          const std::string bytes = slurp(out);
          if (reference.empty()) reference = bytes;
          if (bytes != reference || bytes.empty()) {
            ok = false;
            failures += " " + cases[c].mode + ":jobs" + jobs;
          }
        }
      }
    }
    const fs::path j1 = dir / "j1.json";
    const fs::path j8 = dir / "j8.json";
    run_cli(cases[c].mode + " --config '" + cfg.string() + "' --jobs 1 --format json", j1);
    run_cli(cases[c].mode + " --config '" + cfg.string() + "' --jobs 8 --format json", j8);
    runs += 2;
    if (slurp(j1) != slurp(j8)) {
      ok = false;
      failures += " " + cases[c].mode + ":json";
    }
  }
  fs::remove_all(dir);
  return {ok, fmt("%d CLI runs over %zu configs, jobs in {1,2,4,8}: %s", runs, cases.size(),
                  ok ? "byte-identical" : ("mismatch" + failures).c_str())};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria = {
      {1, "spectrum identity", spectrum_identity},
      {2, "small-tau Omega expansion", small_tau_omega},
      {3, "generator conservation", generator_conservation},
      {4, "T=0 decay rate", zero_temperature_decay},
      {5, "mean quanta flow consistency", flow_consistency},
      {6, "steady-state oracle", steady_oracle},
      {7, "Boltzmann stationarity", boltzmann_stationarity},
      {8, "undeformed closed forms", undeformed_closed_forms},
      {9, "small-tau thermodynamics", small_tau_thermo},
      {10, "dynamics to statics", dynamics_to_statics},
      {11, "positivity constraint", positivity_constraint},
      {12, "determinism", determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
