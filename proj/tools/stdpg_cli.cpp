#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "stdpg/stdpg.hpp"

namespace {

const char* const config_keys[] = {"case", "M",   "T0",     "beta",  "omega",     "modes",
                                   "L",    "T",   "p",      "dp",    "variant",   "levels",
                                   "solver", "tol", "out",  "condition", "timing", "field",
                                   "oracle_M"};

struct Overrides {
  std::string config_file;
  std::map<std::string, std::string> values;
};

void add_config_flags(CLI::App* app, Overrides& o) {
  app->add_option("-c,--config", o.config_file, "key=value configuration file");
  for (const char* key : config_keys)
    app->add_option(std::string("--") + key, o.values[key], std::string("override '") + key + "'");
}

stdpg::StudyConfig resolve(const Overrides& o) {
  stdpg::StudyConfig c;
  if (!o.config_file.empty()) {
    std::ifstream in(o.config_file);
    if (!in) throw stdpg::InvalidArgument("cannot open config file '" + o.config_file + "'");
    c = stdpg::parse_config(in);
  }
  for (const auto& [key, value] : o.values)
    if (!value.empty()) stdpg::set_config_value(c, key, value);
  c.validate();
  return c;
}

template <class Table>
void emit(const stdpg::StudyConfig& c, const Table& t) {
  if (c.out.empty()) {
    stdpg::write_csv(std::cout, t);
    return;
  }
  std::ofstream os(c.out);
  if (!os) throw stdpg::InvalidArgument("cannot open output file '" + c.out + "'");
  stdpg::write_csv(os, t);
}

void report(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spacetime DPG solver for i u_t - (beta/2) u_xx = f"};
  app.require_subcommand(1);

  Overrides solve_o, conv_o, interp_o, oracle_o;
  std::size_t n = 4;
  auto* solve = app.add_subcommand("solve", "solve on one n x n mesh");
  add_config_flags(solve, solve_o);
  solve->add_option("-n,--n", n, "elements per direction")->check(CLI::PositiveNumber);
  auto* conv = app.add_subcommand("convergence", "uniform refinement study with fitted rates");
  add_config_flags(conv, conv_o);
  auto* interp = app.add_subcommand("interp", "interpolation error study for Pi");
  add_config_flags(interp, interp_o);
  auto* oracle = app.add_subcommand("oracle", "blowup norms of the counterexample");
  add_config_flags(oracle, oracle_o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      const auto c = resolve(solve_o);
      const auto t = stdpg::run_solve(c, n);
      emit(c, t);
      report(t.warnings);
      return t.rows.front().ok() ? 0 : 2;
    }
    if (conv->parsed()) {
      const auto c = resolve(conv_o);
      const auto t = stdpg::run_convergence(c);
      emit(c, t);
      report(t.warnings);
      for (const auto& r : t.rows)
        if (!r.ok()) return 2;
      return 0;
    }
    if (interp->parsed()) {
      const auto c = resolve(interp_o);
      if (c.field != "poly" && c.field != "sine")
        throw stdpg::InvalidArgument("unknown field '" + c.field + "' (expected sine|poly)");
      const auto w = c.field == "poly" ? stdpg::polynomial_field(c.p) : stdpg::sine_field();
      const auto t = stdpg::run_interp_study(c.p, c.levels, w);
      emit(c, t);
      report(t.warnings);
      return 0;
    }
    const auto c = resolve(oracle_o);
    emit(c, stdpg::run_oracle(c.oracle_M, c.T, c.beta));
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
