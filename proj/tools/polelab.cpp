// polelab command line: validate profiles, print pointwise quantities, run
// the full verification suite, run the Jacobi field engine, and re-emit
// stored reports.
//
// Exit codes for verify/riccati: 0 all verdicts pass, 2 verdict failure,
// 3 validation failure, 4 internal dual-path diagnostic.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "polelab/polelab.hpp"

namespace {

using polelab::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << bytes;
}

void print_validation(const polelab::ValidationReport& rep) {
  if (rep.passed) {
    std::cout << "validation: PASS (" << rep.grid.size() << " grid points)\n";
    return;
  }
  std::cout << "validation: FAIL (" << rep.failures.size() << " violation(s))\n";
  std::size_t shown = 0;
  for (const auto& f : rep.failures) {
    if (++shown > 10) {
      std::cout << "  ...\n";
      break;
    }
    std::cout << "  " << f.condition << " at t = " << f.t << " (measured " << f.measured << ")\n";
  }
}

void print_verdicts(const polelab::ExperimentReport& rep) {
  for (const auto& [name, ok] : rep.verdicts)
    std::cout << "  " << (ok ? "PASS" : "FAIL") << "  " << name << "\n";
}

void write_outputs(const polelab::ExperimentReport& rep, std::string json_path,
                   std::string csv_dir) {
  if (json_path.empty()) json_path = rep.config.output_json;
  if (csv_dir.empty()) csv_dir = rep.config.output_csv_dir;
  if (!json_path.empty()) {
    write_file(json_path, polelab::emit_report_json(rep));
    std::cout << "report written to " << json_path << "\n";
  }
  if (!csv_dir.empty()) {
    std::filesystem::create_directories(csv_dir);
    for (const auto& [name, bytes] : polelab::emit_report_csv(rep))
      write_file((std::filesystem::path(csv_dir) / name).string(), bytes);
    std::cout << "csv tables written to " << csv_dir << "\n";
  }
}

int run_verify(const std::string& config_path, const std::string& json_out,
               const std::string& csv_dir, bool riccati_only) {
  polelab::ExperimentConfig config =
      polelab::config_from_json(ordered_json::parse(read_file(config_path)));
  if (riccati_only && !config.riccati)
    throw polelab::config_error("config has no riccati section");

  polelab::ExperimentReport rep = polelab::run_experiment(config);
  print_validation(rep.validation);
  if (!rep.validation_ok) return 3;

  if (riccati_only) {
    for (const auto& d : rep.riccati) {
      std::cout << "direction " << d.direction << ": ";
      if (d.conjugate_point)
        std::cout << "conjugate point at t = " << *d.conjugate_point;
      else
        std::cout << "no conjugate point";
      std::cout << ", slope/jacobian checks " << (d.verdict ? "PASS" : "FAIL") << "\n";
    }
    write_outputs(rep, json_out, csv_dir);
    for (const auto& d : rep.riccati)
      if (!d.verdict) return 2;
    return 0;
  }

  print_verdicts(rep);
  std::cout << "determinism hash: " << rep.determinism_hash << "\n";
  write_outputs(rep, json_out, csv_dir);
  return polelab::report_exit_code(rep);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polelab: numerical verification on rotationally symmetric pole manifolds"};
  app.require_subcommand(1);

  int workers = 0;
  app.add_option("-j,--workers", workers, "worker threads (default: POLELAB_WORKERS or auto)");

  std::string profile_spec;
  double t_max = 2000.0;
  int grid_size = 256;

  auto* validate = app.add_subcommand("validate", "validate a radial profile");
  validate->add_option("profile", profile_spec, "builtin:name[params] or DSL source")->required();
  validate->add_option("--t-max", t_max, "validated domain bound");
  validate->add_option("--grid-size", grid_size, "validation grid size");

  std::vector<double> t_list;
  auto* quantities = app.add_subcommand("quantities", "pointwise curvature quantities as JSON");
  quantities->add_option("profile", profile_spec, "builtin:name[params] or DSL source")->required();
  quantities->add_option("--t", t_list, "radii to evaluate")->required();
  quantities->add_option("--t-max", t_max, "validated domain bound");

  std::string config_path, json_out, csv_dir;
  auto* verify = app.add_subcommand("verify", "run the full verification suite from a config");
  verify->add_option("config", config_path, "JSON config path")->required();
  verify->add_option("--out", json_out, "override report JSON output path");
  verify->add_option("--csv-dir", csv_dir, "override CSV output directory");

  auto* riccati = app.add_subcommand("riccati", "run only the Jacobi field suite from a config");
  riccati->add_option("config", config_path, "JSON config path")->required();
  riccati->add_option("--out", json_out, "override report JSON output path");
  riccati->add_option("--csv-dir", csv_dir, "override CSV output directory");

  std::string report_in, report_format = "json", report_out;
  auto* report = app.add_subcommand("report", "re-emit a stored report as JSON or CSV");
  report->add_option("--in", report_in, "stored report JSON")->required();
  report->add_option("--format", report_format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  report->add_option("--out", report_out, "output path (file for json, directory for csv)");

  CLI11_PARSE(app, argc, argv);

  if (workers > 0) setenv("POLELAB_WORKERS", std::to_string(workers).c_str(), 1);

  try {
    if (validate->parsed()) {
      polelab::RadialProfile p;
      try {
        p = polelab::parse_profile_spec(profile_spec, t_max, grid_size);
      } catch (const polelab::parse_error& e) {
        std::cout << "parse error: " << e.what() << "\n";
        return 3;
      }
      print_validation(p.validation);
      return p.validation.passed ? 0 : 3;
    }

    if (quantities->parsed()) {
      polelab::RadialProfile p = polelab::parse_profile_spec(profile_spec, t_max, grid_size);
      const polelab::WarpedManifold m(std::move(p));
      ordered_json rows = ordered_json::array();
      for (const double t : t_list) {
        const auto q = polelab::point_curvatures(m, t);
        rows.push_back({{"t", q.t},
                        {"J", q.J},
                        {"J1", q.J1},
                        {"J2", q.J2},
                        {"lambda", q.lambda},
                        {"ric_radial", q.ric_radial},
                        {"ric_tangential", q.ric_tangential},
                        {"R", q.R},
                        {"R_sphere", q.R_sphere}});
      }
      std::cout << rows.dump(2) << "\n";
      return 0;
    }

    if (verify->parsed()) return run_verify(config_path, json_out, csv_dir, false);
    if (riccati->parsed()) return run_verify(config_path, json_out, csv_dir, true);

    if (report->parsed()) {
      const ordered_json stored = ordered_json::parse(read_file(report_in));
      if (report_format == "json") {
        const std::string bytes = stored.dump(2) + "\n";
        if (report_out.empty())
          std::cout << bytes;
        else
          write_file(report_out, bytes);
        return 0;
      }
      // csv: rebuild the per-sequence tables from the stored samples
      if (report_out.empty()) throw std::runtime_error("--out directory required for csv");
      std::filesystem::create_directories(report_out);
      const auto& suites = stored.at("suites");
      const auto emit_sequence = [&](const std::string& file, const ordered_json& conv) {
        std::string body = "r,value,fit_residual\n";
        const double limit = conv.at("limit").get<double>();
        const double c = conv.at("c").get<double>();
        for (const auto& s : conv.at("samples")) {
          const double r = s.at(0).get<double>();
          const double value = s.at(1).get<double>();
          body += polelab::detail::format_double(r) + "," +
                  polelab::detail::format_double(value) + "," +
                  polelab::detail::format_double(value - (limit + c / r)) + "\n";
        }
        write_file((std::filesystem::path(report_out) / (file + ".csv")).string(), body);
      };
      if (suites.contains("avr")) {
        emit_sequence("avr_sphere", suites.at("avr").at("sphere_form"));
        emit_sequence("avr_volume", suites.at("avr").at("volume_form"));
      }
      for (const char* name : {"scalar_integral", "area_derivative", "radial_ricci"})
        if (suites.contains(name)) emit_sequence(name, suites.at(name).at("report"));
      if (suites.contains("annulus_limits")) {
        emit_sequence("annulus_upper", suites.at("annulus_limits").at("upper"));
        emit_sequence("annulus_lower", suites.at("annulus_limits").at("lower"));
      }
      return 0;
    }
  } catch (const polelab::diagnostic_error& e) {
    std::cerr << "diagnostic failure: " << e.what() << "\n";
    return 4;
  } catch (const polelab::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
