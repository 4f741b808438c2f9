// Command-line front end. Talks to the library exclusively through the C
// interface in ioc/ioc.h; json.hpp is used only to patch domain overrides
// into the problem description and to pretty-print registry results.
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ioc/ioc.h"
#include "json.hpp"

namespace {

constexpr int kExitUsage = 64;
constexpr int kExitUnsupported = 3;
constexpr int kExitDiverged = 4;

struct Str {
  char* s = nullptr;
  ~Str() { ioc_string_free(s); }
  std::string view() const { return s ? std::string(s) : std::string(); }
};

struct ProblemGuard {
  ioc_problem* p = nullptr;
  ~ProblemGuard() { ioc_problem_free(p); }
};

struct SynthesisGuard {
  ioc_synthesis* s = nullptr;
  ~SynthesisGuard() { ioc_synthesis_free(s); }
};

int exit_for(int rc) {
  switch (rc) {
    case IOC_EPARSE:
    case IOC_EINVAL:
      return kExitUsage;
    case IOC_EUNSUPPORTED:
      return kExitUnsupported;
    default:
      return 1;
  }
}

// "x1=-2:2,x2=-1:1" -> {"x1": [-2, 2], "x2": [-1, 1]}
bool parse_domain_spec(const std::string& spec, nlohmann::json& out) {
  out = nlohmann::json::object();
  std::istringstream in(spec);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    std::size_t eq = item.find('=');
    if (eq == std::string::npos) return false;
    std::string key = item.substr(0, eq);
    std::string range = item.substr(eq + 1);
    std::size_t colon = range.find(':', 1);  // skip a leading minus sign
    if (colon == std::string::npos) return false;
    try {
      double lo = std::stod(range.substr(0, colon));
      double hi = std::stod(range.substr(colon + 1));
      out[key] = {lo, hi};
    } catch (const std::exception&) {
      return false;
    }
  }
  return !out.empty();
}

struct SourceOpts {
  std::string system;
  std::string example;
  std::string case_tag = "auto";
  std::string domain;
};

void add_source_flags(CLI::App* cmd, SourceOpts& opts) {
  cmd->add_option("--system", opts.system, "system description file (TOML or JSON)");
  cmd->add_option("--example", opts.example, "bundled example name");
  cmd->add_option("--case", opts.case_tag, "synthesis scheme: auto, I, Ib, II, III or third")
      ->default_str("auto");
  cmd->add_option("--domain", opts.domain, "domain override, e.g. x1=-2:2,x2=-1:1");
}

// 0 on success, else the process exit code; the error is already printed.
int load_problem(const SourceOpts& opts, ioc_problem** out) {
  char err[512] = {0};
  if (opts.system.empty() == opts.example.empty()) {
    std::cerr << "exactly one of --system or --example is required\n";
    return kExitUsage;
  }
  int rc = opts.example.empty() ? ioc_problem_load(opts.system.c_str(), out, err, sizeof err)
                                : ioc_example_load(opts.example.c_str(), out, err, sizeof err);
  if (rc != IOC_OK) {
    std::cerr << err << "\n";
    return exit_for(rc);
  }
  if (opts.domain.empty()) return 0;

  nlohmann::json override_box;
  if (!parse_domain_spec(opts.domain, override_box)) {
    std::cerr << "malformed --domain, expected x1=lo:hi,x2=lo:hi\n";
    ioc_problem_free(*out);
    *out = nullptr;
    return kExitUsage;
  }
  Str json;
  ioc_problem_to_json(*out, &json.s);
  nlohmann::json j = nlohmann::json::parse(json.view());
  for (auto& [key, range] : override_box.items()) j["domain"][key] = range;
  ioc_problem_free(*out);
  *out = nullptr;
  rc = ioc_problem_parse(j.dump().c_str(), out, err, sizeof err);
  if (rc != IOC_OK) {
    std::cerr << err << "\n";
    return exit_for(rc);
  }
  return 0;
}

int synthesize_checked(const SourceOpts& opts, const ioc_problem* p, ioc_synthesis** out) {
  char err[512] = {0};
  int rc = ioc_synthesize(p, opts.case_tag.c_str(), out, err, sizeof err);
  if (rc != IOC_OK) {
    std::cerr << err << "\n";
    return exit_for(rc);
  }
  return 0;
}

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "cannot write " << path << "\n";
    return false;
  }
  out << content;
  return true;
}

int cmd_synthesize(const SourceOpts& opts, const std::string& out_path) {
  ProblemGuard p;
  if (int rc = load_problem(opts, &p.p)) return rc;
  SynthesisGuard s;
  if (int rc = synthesize_checked(opts, p.p, &s.s)) return rc;

  Str u, V, L, json;
  ioc_synthesis_expression(s.s, "u", &u.s);
  ioc_synthesis_expression(s.s, "V", &V.s);
  ioc_synthesis_expression(s.s, "L", &L.s);
  ioc_synthesis_to_json(s.s, &json.s);
  std::cout << "case: " << ioc_synthesis_case(s.s) << "\n"
            << "u = " << u.view() << "\n"
            << "V = " << V.view() << "\n"
            << "L = " << L.view() << "\n";
  if (!out_path.empty() && !write_file(out_path, json.view() + "\n")) return 1;
  return 0;
}

int cmd_verify(const SourceOpts& opts, int resolution, unsigned seed,
               const std::string& out_path) {
  ProblemGuard p;
  if (int rc = load_problem(opts, &p.p)) return rc;
  SynthesisGuard s;
  if (int rc = synthesize_checked(opts, p.p, &s.s)) return rc;

  int verdict = IOC_VERIFY_FAIL;
  Str json, text;
  int rc = ioc_verify(s.s, p.p, resolution, seed, &verdict, &json.s, &text.s);
  if (rc != IOC_OK) {
    std::cerr << "verification failed to run\n";
    return 1;
  }
  std::cout << text.view();
  if (!out_path.empty() && !write_file(out_path, json.view() + "\n")) return 1;
  return verdict;  // pass 0, fail 1, partial 2
}

int cmd_simulate(const SourceOpts& opts, const std::string& x0_spec, double dt, double t_max,
                 int stride, const std::string& out_path, const std::string& svg_path) {
  ProblemGuard p;
  if (int rc = load_problem(opts, &p.p)) return rc;
  SynthesisGuard s;
  if (int rc = synthesize_checked(opts, p.p, &s.s)) return rc;

  std::vector<double> x0;
  std::istringstream in(x0_spec);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      x0.push_back(std::stod(item));
    } catch (const std::exception&) {
      std::cerr << "malformed --x0, expected a,b or a,b,c\n";
      return kExitUsage;
    }
  }

  Str csv, summary, svg;
  int rc = ioc_simulate(s.s, p.p, x0.data(), x0.size(), dt, t_max, stride, &csv.s, &summary.s,
                        svg_path.empty() ? nullptr : &svg.s);
  if (rc == IOC_EINVAL) {
    std::cerr << "initial state has the wrong dimension for this system\n";
    return kExitUsage;
  }
  if (!out_path.empty()) {
    if (!write_file(out_path, csv.view())) return 1;
  } else {
    std::cout << csv.view();
  }
  if (!svg_path.empty() && !write_file(svg_path, svg.view())) return 1;
  std::cout << summary.view() << "\n";
  if (rc == IOC_ERUNTIME) {
    std::cerr << "closed loop diverged\n";
    return kExitDiverged;
  }
  return 0;
}

int cmd_examples(bool run, bool as_json) {
  if (as_json && !run) {
    Str json;
    ioc_examples_json(&json.s);
    std::cout << json.view() << "\n";
    return 0;
  }
  if (!run) {
    for (std::size_t i = 0; i < ioc_example_count(); ++i)
      std::cout << ioc_example_name(i) << "\n";
    return 0;
  }

  int failures = 0;
  Str json;
  ioc_examples_check(1, &failures, &json.s);
  nlohmann::json checks = nlohmann::json::parse(json.view());
  if (as_json) {
    std::cout << checks.dump(2) << "\n";
  } else {
    for (const auto& c : checks) {
      bool ok = c["ok"].get<bool>();
      std::cout << (ok ? "ok       " : "MISMATCH ") << c["name"].get<std::string>();
      if (c.contains("actual_overall"))
        std::cout << "  [" << c["actual_overall"].get<std::string>() << "]";
      std::cout << "\n";
      if (ok) continue;
      for (const char* part : {"u", "V", "L"})
        if (c.contains(part))
          std::cout << "  " << part << " expected: " << c[part]["expected"].get<std::string>()
                    << "\n  " << part << " actual:   " << c[part]["actual"].get<std::string>()
                    << "\n";
      if (c.contains("verify_ok") && !c["verify_ok"].get<bool>())
        std::cout << "  verdict expected: " << c["expected_overall"].get<std::string>()
                  << ", actual: " << c["actual_overall"].get<std::string>() << "\n";
      if (c.contains("error")) std::cout << "  error: " << c["error"].get<std::string>() << "\n";
    }
    std::cout << (checks.size() - failures) << "/" << checks.size() << " examples match\n";
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"inverse-optimal controller synthesis and verification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ioc_version()));

  SourceOpts synth_opts, verify_opts, sim_opts;
  std::string synth_out, verify_out, sim_out, sim_svg, x0_spec;
  int resolution = 0, stride = 1;
  unsigned seed = 0;
  double dt = 1e-3, t_max = 50.0;
  bool run = false, as_json = false;

  CLI::App* c_synth = app.add_subcommand("synthesize", "derive u, V and the running cost");
  add_source_flags(c_synth, synth_opts);
  c_synth->add_option("--out", synth_out, "write the synthesis result as JSON");

  CLI::App* c_verify = app.add_subcommand("verify", "run the verification battery");
  add_source_flags(c_verify, verify_opts);
  c_verify->add_option("--resolution", resolution, "grid points per axis (0 = default)");
  c_verify->add_option("--seed", seed, "seed for sampled checks (0 = default)");
  c_verify->add_option("--out", verify_out, "write the report as JSON");

  CLI::App* c_sim = app.add_subcommand("simulate", "integrate the closed loop from --x0");
  add_source_flags(c_sim, sim_opts);
  c_sim->add_option("--x0", x0_spec, "initial state a,b or a,b,c")->required();
  c_sim->add_option("--dt", dt, "integrator step");
  c_sim->add_option("--tmax", t_max, "time horizon");
  c_sim->add_option("--stride", stride, "record every Nth step");
  c_sim->add_option("--out", sim_out, "trajectory CSV path (default: stdout)");
  c_sim->add_option("--svg", sim_svg, "phase portrait SVG path");

  CLI::App* c_ex = app.add_subcommand("examples", "list or reproduce the bundled examples");
  c_ex->add_flag("--run", run, "resynthesize and verify every example");
  c_ex->add_flag("--json", as_json, "machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (c_synth->parsed()) return cmd_synthesize(synth_opts, synth_out);
  if (c_verify->parsed()) return cmd_verify(verify_opts, resolution, seed, verify_out);
  if (c_sim->parsed()) return cmd_simulate(sim_opts, x0_spec, dt, t_max, stride, sim_out, sim_svg);
  return cmd_examples(run, as_json);
}
