// defosc: run deformed damped oscillator scenarios from a config file.
//
//   defosc <mode> --config <path> [--out <path>] [--format csv|json] [--jobs N]
//
// Exit codes: 0 success, 2 invalid configuration, 3 numerical failure.

#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "defosc/scenario.hpp"

int main(int argc, char** argv) {
  using namespace defosc::scenario;

  CLI::App app{"Deformed damped quantum harmonic oscillator toolkit"};
  std::string mode;
  std::string config;
  std::string out;
  std::string format;
  unsigned jobs = 1;
  if (const char* env = std::getenv("DEFOSC_JOBS")) {
    try {
      jobs = static_cast<unsigned>(std::stoul(env));
    } catch (const std::exception&) {
      std::cerr << R"({"status":"error","exit":2,"kind":"config","field":"DEFOSC_JOBS","message":"not an integer"})"
                << '\n';
      return kExitConfig;
    }
  }

  app.add_option("mode", mode, "spectrum | evolve | steady | thermo | sweep")
      ->required()
      ->check(CLI::IsMember({"spectrum", "evolve", "steady", "thermo", "sweep"}));
  app.add_option("--config", config, "key = value or JSON scenario file")->required();
  app.add_option("--out", out, "output file (default: output.path, else stdout)");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--jobs", jobs, "sweep worker threads (default: $DEFOSC_JOBS or 1)")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kExitConfig;
  }

  CliRequest request;
  request.mode = mode;
  request.config = config;
  if (!out.empty()) request.out = out;
  if (!format.empty()) request.format = format == "json" ? OutputFormat::json : OutputFormat::csv;
  request.jobs = jobs == 0 ? 1 : jobs;
  return run_cli(request, std::cout, std::cerr);
}
