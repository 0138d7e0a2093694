#include "ocpcert/report.hpp"

#include <cstdio>
#include <filesystem>
#include <memory>
#include <random>
#include <sstream>

namespace ocpcert {

std::string to_string(Order o) {
  switch (o) {
    case Order::First: return "first";
    case Order::Second: return "second";
    case Order::Sufficient: return "sufficient";
  }
  return "?";
}

Order order_from_string(const std::string& s) {
  if (s == "first") return Order::First;
  if (s == "second") return Order::Second;
  if (s == "sufficient") return Order::Sufficient;
  throw std::invalid_argument("order must be first, second or sufficient, got '" + s + "'");
}

int exit_code_for(const std::vector<std::pair<std::string, Verdict>>& verdicts) {
  for (const auto& [name, v] : verdicts) {
    if (v != Verdict::Pass && v != Verdict::Vacuous) return 1;
  }
  return 0;
}

std::string serialize_report(const Json& report) { return dump_json(report); }
Json parse_report(const std::string& text) { return parse_json(text, "report"); }

namespace {

Json num(double v) {
  if (std::isnan(v)) return "nan";
  return real_to_json(v);
}

Json row_json(const RowVec& v) {
  Json j = Json::array();
  for (int i = 0; i < v.size(); ++i) j.push_back(num(v(i)));
  return j;
}

Json mat_json(const Mat& m) {
  Json j = Json::array();
  for (int r = 0; r < m.rows(); ++r) j.push_back(row_json(m.row(r)));
  return j;
}

std::string csv_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Loaded {
  Instance inst;
  std::vector<Json> inputs;
  std::string source;
  std::vector<MultiplierFile> files;
};

Json input_record(const std::string& role, const std::string& path, const std::string& text) {
  return {{"role", role}, {"path", path}, {"sha256", sha256_hex(text)}};
}

Loaded load(const CertifyOptions& o) {
  Loaded L;
  if (!o.registry.empty()) {
    L.inst = registry_get(o.registry, o.grid);
    L.source = "registry";
    L.inputs.push_back(input_record("problem", "registry:" + o.registry, serialize_problem(L.inst.spec)));
    L.inputs.push_back(input_record("trajectory", "registry:" + o.registry, serialize_trajectory(L.inst.traj)));
  } else {
    if (o.problem_path.empty() || o.trajectory_path.empty()) {
      throw std::invalid_argument("give a registry name or both a problem and a trajectory file");
    }
    const std::string pt = read_text_file(o.problem_path);
    const std::string tt = read_text_file(o.trajectory_path);
    L.inst.spec = parse_problem(pt);
    L.inst.traj = parse_trajectory(tt);
    if (L.inst.traj.x.rows() != L.inst.spec.n) {
      throw ParseError("trajectory state dimension " + std::to_string(L.inst.traj.x.rows()) +
                       " does not match the problem's n = " + std::to_string(L.inst.spec.n));
    }
    L.source = "files";
    L.inputs.push_back(input_record("problem", o.problem_path, pt));
    L.inputs.push_back(input_record("trajectory", o.trajectory_path, tt));
  }
  for (const auto& path : o.multiplier_paths) {
    const std::string text = read_text_file(path);
    L.files.push_back(parse_multiplier(text));
    L.inputs.push_back(input_record("multiplier", path, text));
  }
  return L;
}

class Pipeline {
 public:
  explicit Pipeline(const CertifyOptions& o) : o_(o), tol_(o.tol) {}

  CertifyResult run() {
    Loaded L = load(o_);
    spec_ = &L.inst.spec;
    traj_ = &L.inst.traj;
    Json prov;
    prov["problem"] = spec_->name;
    prov["source"] = L.source;
    prov["inputs"] = L.inputs;
    prov["grid"] = {{"intervals", traj_->intervals()}, {"T", num(traj_->grid.horizon())}};
    prov["order"] = to_string(o_.order);
    Json tj = Json::object();
    for (const auto& [k, v] : tol_.items()) tj[k] = num(v);
    prov["tolerances"] = tj;

    Json stages = Json::array();
    bool structural = stage_structure(stages);
    bool have_lambda = structural && stage_multipliers(stages, L);
    if (have_lambda) {
      stage_stationarity(stages);
      stage_jumps(stages);
    } else {
      skip(stages, "stationarity", "no multiplier");
      skip(stages, "jumps", "no multiplier");
    }
    if (o_.order != Order::First) {
      if (have_lambda && prepare_second_order(stages)) {
        stage_q_omega(stages);
        stage_necessary(stages);
      } else {
        skip(stages, "q_omega", "no multiplier or linearization");
        skip(stages, "necessary", "no multiplier or linearization");
      }
    }
    if (o_.order == Order::Sufficient) {
      if (have_lambda && lin_) {
        stage_complementarity(stages);
        stage_sufficient(stages);
      } else {
        skip(stages, "complementarity", "no multiplier");
        skip(stages, "legendre", "no multiplier");
        skip(stages, "coercivity", "no multiplier");
      }
    }
    if (!o_.csv_dir.empty()) write_csv(stages);

    CertifyResult res;
    res.verdicts = verdicts_;
    res.exit_code = exit_code_for(verdicts_);
    Json summary = Json::object();
    for (const auto& [name, v] : verdicts_) summary[name] = to_string(v);
    res.report["format"] = "ocpcert-report";
    res.report["version"] = kFormatVersion;
    res.report["provenance"] = prov;
    res.report["stages"] = stages;
    res.report["verdicts"] = summary;
    res.report["exit_code"] = res.exit_code;
    return res;
  }

 private:
  void record(Json& stages, const std::string& name, Verdict v, Json evidence) {
    Json s;
    s["name"] = name;
    s["verdict"] = to_string(v);
    s["evidence"] = std::move(evidence);
    stages.push_back(std::move(s));
    verdicts_.emplace_back(name, v);
  }

  void skip(Json& stages, const std::string& name, const std::string& why) {
    record(stages, name, Verdict::NotCertified, {{"skipped", why}});
  }

  bool stage_structure(Json& stages) {
    bool ok = true;
    const DynamicsResidual dr = dynamics_residual(*spec_, *traj_);
    const Verdict dv = dr.value <= tol_.tol_dyn ? Verdict::Pass : Verdict::Fail;
    record(stages, "dynamics", dv,
           {{"residual", num(dr.value)}, {"node", dr.node}, {"threshold", num(tol_.tol_dyn)}});

    const auto findings = validate_arcs(*spec_, *traj_, tol_);
    Json fj = Json::array();
    bool violated = false;
    bool partition_ok = true;
    for (const auto& f : findings) {
      fj.push_back({{"kind", to_string(f.kind)},
                    {"violation", f.violation},
                    {"value", num(f.value)},
                    {"time", num(f.time)},
                    {"message", f.message}});
      violated = violated || f.violation;
      if (f.kind == FindingKind::Partition) partition_ok = false;
    }
    Json arcs = Json::array();
    for (const auto& a : traj_->arcs) {
      arcs.push_back({{"kind", to_string(a.kind)}, {"t_start", num(a.t_start)}, {"t_end", num(a.t_end)}});
    }
    record(stages, "arcs", violated ? Verdict::Fail : Verdict::Pass, {{"arcs", arcs}, {"findings", fj}});
    if (!partition_ok) {
      skip(stages, "first_order_constraint", "arc partition invalid");
      return false;
    }

    const FirstOrderMargin fo = check_first_order(*spec_, *traj_, tol_);
    Verdict fv = fo.passed ? Verdict::Pass : Verdict::Fail;
    if (!fo.note.empty()) fv = Verdict::Vacuous;
    Json ev{{"margin", num(fo.margin)}, {"node", fo.node}, {"threshold", num(tol_.fo_min)}};
    if (!fo.note.empty()) ev["note"] = fo.note;
    record(stages, "first_order_constraint", fv, ev);
    ok = fo.passed;
    return ok;
  }

  Json multiplier_json(const Multiplier& m) const {
    Json atoms = Json::array();
    for (const auto& a : m.measure.atoms) atoms.push_back({{"time", num(a.time)}, {"mass", num(a.mass)}});
    return {{"beta", num(m.beta)}, {"psi", row_json(m.psi)}, {"atoms", atoms},
            {"p0_residual", num(m.p0_residual.cwiseAbs().maxCoeff())}};
  }

  bool stage_multipliers(Json& stages, const Loaded& L) {
    Json items = Json::array();
    bool ok = true;
    std::string source;
    try {
      if (o_.fit) {
        source = "fit";
        const RowVec zero = RowVec::Zero(spec_->n1 + spec_->n2);
        const FitResult fit = fit_multiplier(*spec_, *traj_, MultiplierSeed{0.0, zero, {}}, tol_);
        lambdas_.push_back(fit.multiplier);
        fit_info_ = {{"residual", num(fit.residual)}, {"iterations", fit.iterations}};
      } else if (!L.files.empty()) {
        source = "file";
        for (const auto& f : L.files) {
          if (f.psi.size() != spec_->n1 + spec_->n2) throw ParseError("multiplier psi has the wrong length");
          Multiplier m = integrate_costate(*spec_, *traj_, f.beta, f.psi, resolve_atoms(*traj_, f.atoms), tol_);
          double dev = 0.0;
          if (f.p.rows() > 0) {
            if (f.p.rows() != m.nodes() || f.p.cols() != spec_->n) {
              throw ParseError("multiplier p has the wrong shape");
            }
            for (int k = 0; k < m.nodes(); ++k) dev = std::max(dev, (f.p.row(k) - m.p(k)).cwiseAbs().maxCoeff());
          }
          file_dev_.push_back(dev);
          lambdas_.push_back(std::move(m));
        }
      } else if (!o_.registry.empty()) {
        source = "seed";
        const auto& s = L.inst.seed;
        lambdas_.push_back(integrate_costate(*spec_, *traj_, s.beta, s.psi, resolve_atoms(*traj_, s.atoms), tol_));
      } else {
        source = "fit";
        const RowVec zero = RowVec::Zero(spec_->n1 + spec_->n2);
        const FitResult fit = fit_multiplier(*spec_, *traj_, MultiplierSeed{0.0, zero, {}}, tol_);
        lambdas_.push_back(fit.multiplier);
        fit_info_ = {{"residual", num(fit.residual)}, {"iterations", fit.iterations}};
      }
    } catch (const std::exception& e) {
      record(stages, "multipliers", Verdict::Fail, {{"source", source}, {"error", e.what()}});
      lambdas_.clear();
      return false;
    }
    for (std::size_t i = 0; i < lambdas_.size(); ++i) {
      const MultiplierValidity v = validate_multiplier(*spec_, *traj_, lambdas_[i], tol_);
      Json mj = multiplier_json(lambdas_[i]);
      mj["valid"] = v.passed;
      mj["problems"] = v.problems;
      mj["min_nu"] = num(v.min_nu);
      if (i < file_dev_.size()) mj["file_p_deviation"] = num(file_dev_[i]);
      items.push_back(mj);
      ok = ok && v.passed;
    }
    Json ev{{"source", source}, {"multipliers", items}};
    if (!fit_info_.is_null()) ev["fit"] = fit_info_;
    record(stages, "multipliers", ok ? Verdict::Pass : Verdict::Fail, ev);
    return true;
  }

  void stage_stationarity(Json& stages) {
    Json items = Json::array();
    bool ok = true;
    for (const auto& m : lambdas_) {
      const StationarityReport r = check_stationarity(*spec_, *traj_, m, tol_);
      Json arcs = Json::array();
      for (const auto& a : r.arcs) {
        arcs.push_back({{"arc", a.arc}, {"kind", to_string(a.kind)}, {"worst", num(a.worst)},
                        {"time", num(a.time)}, {"passed", a.passed}});
      }
      items.push_back({{"threshold", num(r.threshold)}, {"worst", num(r.worst)}, {"arcs", arcs}});
      ok = ok && r.passed;
    }
    record(stages, "stationarity", ok ? Verdict::Pass : Verdict::Fail, {{"per_multiplier", items}});
  }

  void stage_jumps(Json& stages) {
    Json items = Json::array();
    bool ok = true;
    for (const auto& m : lambdas_) {
      const JumpReport r = check_jumps(*spec_, *traj_, m, tol_);
      Json rows = Json::array();
      for (const auto& j : r.rows) {
        rows.push_back({{"time", num(j.time)}, {"interior", j.interior}, {"du", num(j.du)},
                        {"dHu", num(j.dHu)}, {"dmu", num(j.mass)}, {"dp_residual", num(j.dp_residual)},
                        {"du_dHu", num(j.du_dHu)}, {"dmu_ddg", num(j.dmu_ddg)},
                        {"mu_continuity_required", j.continuity_required}, {"passed", j.passed}});
      }
      items.push_back({{"rows", rows}});
      ok = ok && r.passed;
    }
    record(stages, "jumps", ok ? Verdict::Pass : Verdict::Fail,
           {{"threshold", num(tol_.jump_tol)}, {"per_multiplier", items}});
  }

  bool prepare_second_order(Json& stages) {
    try {
      lin_ = std::make_unique<LinearizedSystem>(*spec_, *traj_);
      for (const auto& m : lambdas_) forms_.push_back(prepare_form(*spec_, *traj_, *lin_, m, tol_));
    } catch (const std::exception& e) {
      record(stages, "linearization", Verdict::Fail, {{"error", e.what()}});
      lin_.reset();
      forms_.clear();
      return false;
    }
    return true;
  }

  void stage_q_omega(Json& stages) {
    std::mt19937_64 rng(o_.sample_seed);
    std::normal_distribution<double> G;
    const int N = traj_->intervals();
    double worst = 0.0;
    for (const auto& form : forms_) {
      for (int s = 0; s < o_.qomega_samples; ++s) {
        std::vector<double> v(N);
        for (auto& x : v) x = G(rng);
        Vec z0(spec_->n);
        for (int i = 0; i < spec_->n; ++i) z0(i) = G(rng);
        const double Q = eval_Q(*traj_, *lin_, form, v, z0);
        const double Om = eval_Omega(*traj_, *lin_, form, transform_direction(*traj_, *lin_, v, z0));
        worst = std::max(worst, std::abs(Q - Om) / (1.0 + std::abs(Q)));
      }
    }
    record(stages, "q_omega", worst <= tol_.qomega_tol ? Verdict::Pass : Verdict::Fail,
           {{"samples", o_.qomega_samples * static_cast<int>(forms_.size())},
            {"max_relative_error", num(worst)},
            {"threshold", num(tol_.qomega_tol)}});
  }

  Json witness_json(const Witness& w, bool with_vector) const {
    Json j{{"multiplier", w.lambda_index}, {"rayleigh", num(w.rayleigh)}, {"omega", num(w.omega)},
           {"gamma", num(w.gamma)}, {"omega_over_gamma", num(w.gamma > 0 ? w.omega / w.gamma : 0.0)}};
    if (with_vector) j["w"] = row_json(w.w.transpose());
    return j;
  }

  Json cone_json(const ConeBasis& c, bool with_matrices) const {
    Json labels = c.row_labels;
    Json j{{"kind", to_string(c.which)}, {"variables", c.num_vars}, {"constraint_rank", c.rank},
           {"dimension", c.dim()}, {"terminal_limit", c.terminal_limit}, {"constraints", labels}};
    if (with_matrices) {
      j["basis"] = mat_json(c.Z);
      j["gamma_gram"] = mat_json(c.G);
      Json om = Json::array();
      for (const auto& m : c.Omega) om.push_back(mat_json(m));
      j["omega"] = om;
    } else {
      j["matrices"] = "omitted; rerun with full matrices to include them";
    }
    return j;
  }

  bool small(const ConeBasis& c) const {
    return o_.full_matrices || static_cast<long>(c.num_vars) * std::max(1, c.dim()) <= 2500;
  }

  void stage_necessary(Json& stages) {
    try {
      const ConeBasis cone = build_cone(*spec_, *traj_, *lin_, forms_, ConeKind::PS2, tol_);
      const NecessaryResult r = necessary_test(*traj_, *lin_, forms_, cone, tol_);
      const bool full = small(cone);
      Json ev{{"cone", cone_json(cone, full)}, {"threshold", num(tol_.nec_tol)}};
      if (r.dim > 0) {
        ev["mu_min"] = num(r.mu_min);
        Json per = Json::array();
        for (double m : r.mu_per_lambda) per.push_back(num(m));
        ev["mu_per_multiplier"] = per;
        ev["witness"] = witness_json(r.witness, full);
      }
      if (!r.note.empty()) ev["note"] = r.note;
      record(stages, "necessary", r.verdict, ev);
    } catch (const std::exception& e) {
      record(stages, "necessary", Verdict::Fail, {{"error", e.what()}});
    }
  }

  void stage_complementarity(Json& stages) {
    const ComplementarityReport r = check_strict_complementarity(*spec_, *traj_, lambdas_, tol_);
    Json rows = Json::array();
    for (const auto& row : r.rows) {
      rows.push_back({{"where", row.where}, {"kind", to_string(row.kind)}, {"margin", num(row.margin)},
                      {"time", num(row.time)}, {"passed", row.passed}});
    }
    Json ev{{"strict", r.strict_passed}, {"weak", r.weak_passed}, {"weak_min_nu", num(r.weak_min_nu)},
            {"threshold", num(tol_.sc_margin)}, {"rows", rows}};
    if (!r.note.empty()) ev["note"] = r.note;
    record(stages, "complementarity", r.passed() ? Verdict::Pass : Verdict::NotCertified, ev);
  }

  void stage_sufficient(Json& stages) {
    try {
      const ConeBasis cone = build_cone(*spec_, *traj_, *lin_, forms_, ConeKind::Pstar2, tol_);
      const SufficientResult r = sufficient_test(*spec_, *traj_, *lin_, forms_, cone, tol_);
      record(stages, "legendre", r.legendre, {{"alpha_min", num(r.alpha_min)}, {"threshold", num(tol_.leg_tol)}});
      const bool full = small(cone);
      Json ev{{"cone", cone_json(cone, full)}, {"threshold", num(tol_.suf_tol)}};
      if (r.dim > 0) {
        ev["rho_min"] = num(r.rho_min);
        ev["rho_best"] = num(r.rho_best);
        Json per = Json::array();
        for (double m : r.rho_per_lambda) per.push_back(num(m));
        ev["rho_per_multiplier"] = per;
        ev["witness"] = witness_json(r.witness, full);
      }
      record(stages, "coercivity", r.coercivity, ev);
    } catch (const std::exception& e) {
      record(stages, "legendre", Verdict::Fail, {{"error", e.what()}});
      record(stages, "coercivity", Verdict::Fail, {{"error", e.what()}});
    }
  }

  void write_csv(Json& stages) {
    namespace fs = std::filesystem;
    try {
      fs::create_directories(o_.csv_dir);
      if (lambdas_.empty()) return;
      std::unique_ptr<LinearizedSystem> own;
      const LinearizedSystem* lin = lin_.get();
      if (!lin) {
        own = std::make_unique<LinearizedSystem>(*spec_, *traj_);
        lin = own.get();
      }
      for (std::size_t i = 0; i < lambdas_.size(); ++i) {
        const std::string suffix = lambdas_.size() > 1 ? "_" + std::to_string(i) : "";
        write_text_file((fs::path(o_.csv_dir) / ("nodes" + suffix + ".csv")).string(),
                        nodes_csv(*spec_, *traj_, *lin, lambdas_[i], tol_));
        write_text_file((fs::path(o_.csv_dir) / ("linearization" + suffix + ".csv")).string(),
                        linearization_csv(*spec_, *traj_, *lin, lambdas_[i], tol_));
      }
    } catch (const std::exception& e) {
      record(stages, "csv", Verdict::Fail, {{"error", e.what()}});
    }
  }

  const CertifyOptions& o_;
  Tolerances tol_;
  const ProblemSpec* spec_ = nullptr;
  const Trajectory* traj_ = nullptr;
  std::vector<Multiplier> lambdas_;
  std::vector<double> file_dev_;
  Json fit_info_;
  std::unique_ptr<LinearizedSystem> lin_;
  std::vector<FormData> forms_;
  std::vector<std::pair<std::string, Verdict>> verdicts_;
};

}  // namespace

CertifyResult run_certify(const CertifyOptions& opts) { return Pipeline(opts).run(); }

std::string nodes_csv(const ProblemSpec& spec, const Trajectory& traj, const LinearizedSystem& lin,
                      const Multiplier& lambda, const Tolerances& tol) {
  const int n = spec.n, N = traj.intervals();
  const NodeCoefficients nc = assemble_M_R(spec, traj, lin, lambda, tol);
  std::ostringstream os;
  os << "t,u";
  for (int i = 1; i <= n; ++i) os << ",x_" << i;
  for (int i = 1; i <= n; ++i) os << ",p_" << i;
  os << ",nu,g,H_u,R\n";
  for (int k = 0; k <= N; ++k) {
    const Vec x = traj.state(k);
    const RowVec p = lambda.p(k);
    os << csv_num(traj.grid.t[k]) << ',' << csv_num(traj.u[std::min(k, N - 1)]);
    for (int i = 0; i < n; ++i) os << ',' << csv_num(x(i));
    for (int i = 0; i < n; ++i) os << ',' << csv_num(p(i));
    os << ',' << csv_num(lambda.measure.nu[k]) << ',' << csv_num(g_value(spec, x)) << ','
       << csv_num(p.dot(spec.f1(x))) << ',' << csv_num(nc.R[k]) << '\n';
  }
  return os.str();
}

std::string linearization_csv(const ProblemSpec& spec, const Trajectory& traj, const LinearizedSystem& lin,
                              const Multiplier& lambda, const Tolerances& tol) {
  const int n = spec.n, N = traj.intervals();
  const NodeCoefficients nc = assemble_M_R(spec, traj, lin, lambda, tol);
  std::ostringstream os;
  os << "t";
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) os << ",A_" << i << '_' << j;
  }
  for (int i = 1; i <= n; ++i) os << ",E_" << i;
  for (int i = 1; i <= n; ++i) os << ",M_" << i;
  os << '\n';
  for (int k = 0; k <= N; ++k) {
    os << csv_num(traj.grid.t[k]);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) os << ',' << csv_num(lin.A(k)(i, j));
    }
    for (int i = 0; i < n; ++i) os << ',' << csv_num(lin.E(k)(i));
    for (int i = 0; i < n; ++i) os << ',' << csv_num(nc.M[k](i));
    os << '\n';
  }
  return os.str();
}

}  // namespace ocpcert
