#include "ioc/ioc.h"

#include <cstring>
#include <sstream>
#include <string>

#include "registry/registry.hpp"
#include "sim/sim.hpp"
#include "synth/synth.hpp"
#include "verify/verify.hpp"

#include "json.hpp"

struct ioc_problem {
  ioc::Problem p;
};

struct ioc_synthesis {
  ioc::SynthesisResult r;
};

namespace {

void set_err(char* err, size_t cap, const std::string& msg) {
  if (!err || cap == 0) return;
  std::size_t n = std::min(msg.size(), cap - 1);
  std::memcpy(err, msg.data(), n);
  err[n] = '\0';
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

int classify_exception(const std::exception& e, char* err, size_t errcap) {
  set_err(err, errcap, e.what());
  if (dynamic_cast<const ioc::ParseError*>(&e)) return IOC_EPARSE;
  if (dynamic_cast<const ioc::ModelError*>(&e)) return IOC_EPARSE;
  if (dynamic_cast<const ioc::SynthesisError*>(&e)) return IOC_EUNSUPPORTED;
  if (dynamic_cast<const ioc::EvalError*>(&e)) return IOC_ERUNTIME;
  return IOC_ERUNTIME;
}

}  // namespace

extern "C" {

const char* ioc_version(void) { return "1.0.0"; }

int ioc_problem_parse(const char* text, ioc_problem** out, char* err, size_t errcap) {
  if (!text || !out) return IOC_EINVAL;
  try {
    *out = new ioc_problem{ioc::load_problem(text)};
    return IOC_OK;
  } catch (const std::exception& e) {
    return classify_exception(e, err, errcap);
  }
}

int ioc_problem_load(const char* path, ioc_problem** out, char* err, size_t errcap) {
  if (!path || !out) return IOC_EINVAL;
  try {
    *out = new ioc_problem{ioc::load_problem_file(path)};
    return IOC_OK;
  } catch (const std::exception& e) {
    return classify_exception(e, err, errcap);
  }
}

void ioc_problem_free(ioc_problem* p) { delete p; }

int ioc_problem_to_json(const ioc_problem* p, char** out) {
  if (!p || !out) return IOC_EINVAL;
  *out = dup_string(ioc::problem_to_json(p->p));
  return IOC_OK;
}

size_t ioc_example_count(void) { return ioc::example_registry().size(); }

const char* ioc_example_name(size_t index) {
  const auto& reg = ioc::example_registry();
  if (index >= reg.size()) return nullptr;
  return reg[index].name.c_str();
}

int ioc_example_load(const char* name, ioc_problem** out, char* err, size_t errcap) {
  if (!name || !out) return IOC_EINVAL;
  const auto* e = ioc::find_example(name);
  if (!e) {
    set_err(err, errcap, std::string("unknown example: ") + name);
    return IOC_EINVAL;
  }
  *out = new ioc_problem{e->problem};
  return IOC_OK;
}

int ioc_examples_json(char** out) {
  if (!out) return IOC_EINVAL;
  *out = dup_string(ioc::examples_to_json());
  return IOC_OK;
}

int ioc_examples_check(int with_verify, int* failures, char** json_out) {
  auto checks = ioc::check_examples(with_verify != 0);
  int bad = 0;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : checks) {
    if (!c.ok()) ++bad;
    nlohmann::json j;
    j["name"] = c.name;
    j["ok"] = c.ok();
    j["u_ok"] = c.u_ok;
    j["V_ok"] = c.V_ok;
    j["L_ok"] = c.L_ok;
    if (with_verify) {
      j["verify_ok"] = c.verify_ok;
      j["expected_overall"] = c.expected_overall;
      j["actual_overall"] = c.actual_overall;
    }
    if (!c.ok() && c.error.empty()) {
      const auto* e = ioc::find_example(c.name);
      if (e) {
        if (!c.u_ok) j["u"] = {{"expected", e->expected_u}, {"actual", c.actual_u}};
        if (!c.V_ok) j["V"] = {{"expected", e->expected_V}, {"actual", c.actual_V}};
        if (!c.L_ok) j["L"] = {{"expected", e->expected_L}, {"actual", c.actual_L}};
      }
    }
    if (!c.error.empty()) j["error"] = c.error;
    arr.push_back(j);
  }
  if (failures) *failures = bad;
  if (json_out) *json_out = dup_string(arr.dump(2));
  return IOC_OK;
}

int ioc_synthesize(const ioc_problem* p, const char* case_tag, ioc_synthesis** out, char* err,
                   size_t errcap) {
  if (!p || !out) return IOC_EINVAL;
  try {
    std::optional<ioc::CaseTag> requested;
    if (case_tag && std::strlen(case_tag) > 0 && std::strcmp(case_tag, "auto") != 0) {
      requested = ioc::case_tag_from_name(case_tag);
      if (!requested) {
        set_err(err, errcap, std::string("unknown case tag: ") + case_tag);
        return IOC_EINVAL;
      }
    }
    *out = new ioc_synthesis{ioc::synthesize(p->p, requested)};
    return IOC_OK;
  } catch (const std::exception& e) {
    return classify_exception(e, err, errcap);
  }
}

void ioc_synthesis_free(ioc_synthesis* s) { delete s; }

const char* ioc_synthesis_case(const ioc_synthesis* s) {
  static thread_local std::string name;
  if (!s) return nullptr;
  name = ioc::case_tag_name(s->r.tag);
  return name.c_str();
}

int ioc_synthesis_expression(const ioc_synthesis* s, const char* which, char** out) {
  if (!s || !which || !out) return IOC_EINVAL;
  std::string w(which);
  if (w == "u")
    *out = dup_string(s->r.u.str());
  else if (w == "V")
    *out = dup_string(s->r.V.str());
  else if (w == "L")
    *out = dup_string(s->r.running_cost().str());
  else
    return IOC_EINVAL;
  return IOC_OK;
}

int ioc_synthesis_to_json(const ioc_synthesis* s, char** out) {
  if (!s || !out) return IOC_EINVAL;
  *out = dup_string(ioc::synthesis_to_json(s->r));
  return IOC_OK;
}

int ioc_verify(const ioc_synthesis* s, const ioc_problem* p, int resolution, unsigned seed,
               int* verdict, char** json_out, char** text_out) {
  if (!s || !p) return IOC_EINVAL;
  try {
    ioc::VerifyConfig cfg;
    if (resolution > 0) cfg.resolution = resolution;
    if (seed != 0) cfg.seed = seed;
    auto report = ioc::verify(s->r, p->p, cfg);
    if (verdict) {
      if (report.overall == "pass")
        *verdict = IOC_VERIFY_PASS;
      else if (report.overall == "partial")
        *verdict = IOC_VERIFY_PARTIAL;
      else
        *verdict = IOC_VERIFY_FAIL;
    }
    if (json_out) *json_out = dup_string(report.to_json());
    if (text_out) *text_out = dup_string(report.to_text());
    return IOC_OK;
  } catch (const std::exception& e) {
    return IOC_ERUNTIME;
  }
}

int ioc_simulate(const ioc_synthesis* s, const ioc_problem* p, const double* x0, size_t n,
                 double dt, double t_max, int stride, char** csv_out,
                 char** summary_json_out, char** svg_out) {
  if (!s || !p || !x0) return IOC_EINVAL;
  if ((int)n != p->p.order()) return IOC_EINVAL;
  try {
    ioc::SimConfig cfg;
    if (dt > 0) cfg.dt = dt;
    if (t_max > 0) cfg.t_max = t_max;
    cfg.stride = stride < 1 ? 1 : stride;
    auto traj = ioc::simulate(s->r, p->p, std::span<const double>(x0, n), cfg);
    if (csv_out) {
      std::ostringstream csv;
      ioc::write_csv(traj, csv);
      *csv_out = dup_string(csv.str());
    }
    if (summary_json_out) *summary_json_out = dup_string(ioc::trajectory_summary_json(traj));
    if (svg_out) *svg_out = dup_string(ioc::phase_svg(s->r, p->p, traj));
    return traj.diverged ? IOC_ERUNTIME : IOC_OK;
  } catch (const std::exception&) {
    return IOC_ERUNTIME;
  }
}

void ioc_string_free(char* s) { delete[] s; }

}  // extern "C"
