// nled -- command line laboratory for nonlinear vacuum electrodynamics.
//
// Subcommands:
//   tof           pulse transit through a constant magnetic background
//   sweep         time-of-flight / shape-fidelity sweep over models x backgrounds
//   verify-exact  stencil-refinement residual check of the travelling-wave ansatz
//   duality       duality-residual statistics over random field points
//   invert-check  constitutive round-trip accuracy over random field points
//
// Exit codes: 0 success, 1 validation failure (including a negative
// verification verdict), 2 runtime error, 64 usage error.

#include <nled/config.hpp>
#include <nled/errors.hpp>
#include <nled/tof_lab.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

namespace {

using nled::Config;
using nled::LagrangianModel;
using nled::Vec3;

struct ModelFlags {
  std::string kind = "maxwell";
  double kappa = 1.0;
  double lambda = 0.25;
  std::vector<double> poly;
  double c1 = 0.0, c2 = 0.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--model", kind, "maxwell | bi | duality | family")
        ->default_str("maxwell");
    cmd->add_option("--kappa", kappa, "Born-Infeld constant");
    cmd->add_option("--lambda", lambda, "family coupling");
    cmd->add_option("--poly", poly, "family tail coefficients a2 a3 ...");
    cmd->add_option("--c1", c1, "constant term");
    cmd->add_option("--c2", c2, "topological term coefficient");
  }

  LagrangianModel build() const {
    if (kind == "maxwell") return LagrangianModel::maxwell();
    if (kind == "bi") return LagrangianModel::born_infeld(kappa);
    if (kind == "duality") return LagrangianModel::duality_family(lambda);
    if (kind == "family")
      return LagrangianModel::general_family(lambda, poly, c1, c2);
    throw nled::ConfigError("unknown --model '" + kind + "'");
  }
};

nlohmann::ordered_json vec_json(const Vec3& v) {
  return {v.x(), v.y(), v.z()};
}

int cmd_tof(const std::string& config_path, const std::string& out,
            long seed, bool have_seed) {
  Config c = Config::parse_file(config_path);
  nled::TofConfig cfg = nled::TofConfig::from_config(c);
  if (!out.empty()) cfg.out_prefix = out;
  if (cfg.out_prefix.empty()) cfg.out_prefix = "tof";
  if (have_seed) cfg.seed = static_cast<std::uint64_t>(seed);
  const nled::TofResult r = nled::measure_tof(cfg);
  std::printf("model          %s\n", r.model_id.c_str());
  std::printf("background     (%g, %g, %g)\n", r.B0.x(), r.B0.y(), r.B0.z());
  std::printf("v_predicted    %.10g\n", r.v_predicted);
  std::printf("v_measured     %.10g   (R^2 = %.6f, %ld samples)\n", r.v_measured,
              r.r_squared, r.fit_samples);
  if (!std::isnan(r.rel_error))
    std::printf("rel_error      %.3e\n", r.rel_error);
  std::printf("shape_L2       %.3e\n", r.shape_fidelity);
  std::printf("energy_drift   %.3e\n", r.energy_drift);
  std::printf("wrote %s.json, %s.csv, %s_centroid.csv\n", cfg.out_prefix.c_str(),
              cfg.out_prefix.c_str(), cfg.out_prefix.c_str());
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out,
              long seed, bool have_seed) {
  Config c = Config::parse_file(config_path);
  nled::TofConfig base = nled::TofConfig::from_config(c);
  if (have_seed) base.seed = static_cast<std::uint64_t>(seed);

  std::vector<LagrangianModel> models;
  for (const std::string& sec : [&] {
         std::vector<std::string> names;
         std::string list = c.get_string("sweep.models", "model");
         for (char& ch : list)
           if (ch == ',') ch = ' ';
         std::istringstream ss(list);
         std::string tok;
         while (ss >> tok) names.push_back(tok);
         return names;
       }())
    models.push_back(nled::model_from_config(c, sec));

  std::vector<Vec3> backgrounds;
  {
    const std::string spec = c.get_string(
        "sweep.backgrounds", nled::format_g17(base.B0.x()) + " " +
                                 nled::format_g17(base.B0.y()) + " " +
                                 nled::format_g17(base.B0.z()));
    std::string group;
    std::istringstream ss(spec);
    while (std::getline(ss, group, ';')) {
      for (char& ch : group)
        if (ch == ',') ch = ' ';
      std::istringstream gs(group);
      double x, y, z;
      if (gs >> x >> y >> z) backgrounds.emplace_back(x, y, z);
    }
  }
  if (backgrounds.empty())
    throw nled::ConfigError("sweep: no backgrounds given (sweep.backgrounds = bx by bz ; ...)");

  const nled::SweepReport rep = nled::discrimination_sweep(models, backgrounds, base);

  const std::string prefix = out.empty() ? "sweep" : out;
  nled::write_text_file(prefix + ".csv", nled::sweep_csv(rep));
  nlohmann::ordered_json j;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rep.rows) {
    nlohmann::ordered_json row;
    row["model"] = r.model_id;
    row["background"] = {r.bx, r.by, r.bz};
    row["fit_ok"] = r.fit_ok;
    row["v_measured"] = std::isnan(r.v_measured) ? nlohmann::ordered_json(nullptr)
                                                 : nlohmann::ordered_json(r.v_measured);
    row["v_predicted"] = std::isnan(r.v_predicted)
                             ? nlohmann::ordered_json(nullptr)
                             : nlohmann::ordered_json(r.v_predicted);
    row["r_squared"] = r.r_squared;
    row["shape_fidelity"] = std::isnan(r.shape_fidelity)
                                ? nlohmann::ordered_json(nullptr)
                                : nlohmann::ordered_json(r.shape_fidelity);
    if (!r.note.empty()) row["note"] = r.note;
    j["rows"].push_back(row);
  }
  nled::write_text_file(prefix + ".json", j.dump(2) + "\n");

  for (const auto& r : rep.rows)
    std::printf("%-40s B0=(%g,%g,%g)  v=%.6g  shape_L2=%.3e %s\n", r.model_id.c_str(),
                r.bx, r.by, r.bz, r.v_measured, r.shape_fidelity,
                r.fit_ok ? "" : "[fit failed]");
  std::printf("wrote %s.csv, %s.json\n", prefix.c_str(), prefix.c_str());
  return 0;
}

int cmd_verify_exact(const ModelFlags& mf, double bx, double by, double bz,
                     double amplitude, double sigma, double h, int levels,
                     const std::string& out) {
  const LagrangianModel model = mf.build();
  const Vec3 B0(bx, by, bz);
  nled::PulseProfile pulse;
  pulse.amplitude = amplitude > 0 ? amplitude : 0.1 / model.coupling_scale();
  pulse.center = 0.0;
  pulse.sigma = sigma;
  std::vector<double> steps;
  for (int i = 0; i < std::max(2, levels); ++i) steps.push_back(h / (1 << i));

  const nled::VerifyExactReport rep = nled::verify_exact(model, B0, pulse, steps);

  std::printf("model     %s\n", rep.model_id.c_str());
  std::printf("B0        (%g, %g, %g)\n", bx, by, bz);
  std::printf("v, chi    %.10g, %.10g\n", rep.v, rep.chi);
  std::printf("%12s %14s %14s\n", "h", "|dF|_inf", "|d*G|_inf");
  for (const auto& row : rep.study.rows)
    std::printf("%12.4e %14.6e %14.6e\n", row.h, row.r_F, row.r_G);
  std::printf("slope     %.3f   extrapolated %.3e   (BI baseline %.3e)\n",
              rep.study.slope, rep.study.extrapolated, rep.bi_matched.extrapolated);

  if (!out.empty()) {
    nled::write_text_file(out + ".csv", nled::verify_exact_csv(rep));
    nlohmann::ordered_json j;
    j["model"] = rep.model_id;
    j["background"] = vec_json(rep.B0);
    j["v"] = rep.v;
    j["chi"] = rep.chi;
    j["slope"] = rep.study.slope;
    j["extrapolated"] = rep.study.extrapolated;
    j["bi_baseline_extrapolated"] = rep.bi_matched.extrapolated;
    j["converges_second_order"] = rep.converges;
    nled::write_text_file(out + ".json", j.dump(2) + "\n");
  }

  if (!rep.converges) {
    std::printf("verdict   residual plateau: the ansatz is NOT an exact solution "
                "of this model (extrapolated residual %.1fx the Born-Infeld baseline)\n",
                rep.ratio_vs_bi);
    return 1;
  }
  std::printf("verdict   second-order convergence: exact solution confirmed\n");
  return 0;
}

int cmd_duality(const ModelFlags& mf, long points, double bound, long seed,
                const std::string& out) {
  const LagrangianModel model = mf.build();
  const nled::DualityScan scan =
      nled::duality_scan(model, points, bound, static_cast<std::uint64_t>(seed));
  std::printf("model     %s\n", model.id().c_str());
  std::printf("points    %ld (rejected %ld out-of-domain draws)\n", scan.points,
              scan.rejected);
  std::printf("max |C|   %.6e\n", scan.max_abs);
  std::printf("mean |C|  %.6e\n", scan.mean_abs);
  if (!out.empty()) {
    nlohmann::ordered_json j;
    j["model"] = model.id();
    j["points"] = scan.points;
    j["rejected"] = scan.rejected;
    j["bound"] = bound;
    j["seed"] = seed;
    j["max_abs_C"] = scan.max_abs;
    j["mean_abs_C"] = scan.mean_abs;
    nled::write_text_file(out + ".json", j.dump(2) + "\n");
  }
  return 0;
}

int cmd_invert_check(const ModelFlags& mf, long points, double bound, long seed,
                     const std::string& out) {
  const LagrangianModel model = mf.build();
  const nled::InvertCheck chk =
      nled::invert_check(model, points, bound, static_cast<std::uint64_t>(seed));
  std::printf("model      %s\n", model.id().c_str());
  std::printf("points     %ld\n", chk.points);
  std::printf("max error  %.6e\n", chk.max_error);
  if (!out.empty()) {
    nlohmann::ordered_json j;
    j["model"] = model.id();
    j["points"] = chk.points;
    j["bound"] = bound;
    j["seed"] = seed;
    j["max_error"] = chk.max_error;
    j["pass"] = chk.max_error <= 1e-10;
    nled::write_text_file(out + ".json", j.dump(2) + "\n");
  }
  if (chk.max_error > 1e-10) {
    std::printf("verdict    FAIL (round-trip error above 1e-10)\n");
    return 1;
  }
  std::printf("verdict    OK\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nled: a desk-scale laboratory for nonlinear vacuum electrodynamics"};
  app.require_subcommand(1);

  // tof
  auto* tof = app.add_subcommand("tof", "measure pulse transit speed");
  std::string tof_config, tof_out;
  long tof_seed = 0;
  tof->add_option("--config", tof_config, "experiment config file")->required();
  tof->add_option("--out", tof_out, "output prefix (default from config)");
  auto* tof_seed_opt = tof->add_option("--seed", tof_seed, "RNG seed override");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "model discrimination sweep");
  std::string sweep_config, sweep_out;
  long sweep_seed = 0;
  sweep->add_option("--config", sweep_config, "sweep config file")->required();
  sweep->add_option("--out", sweep_out, "output prefix (default 'sweep')");
  auto* sweep_seed_opt = sweep->add_option("--seed", sweep_seed, "RNG seed override");

  // verify-exact
  auto* vx = app.add_subcommand("verify-exact",
                                "travelling-wave residual refinement check");
  ModelFlags vx_model;
  vx_model.attach(vx);
  double vx_bx = 1.0, vx_by = 0.0, vx_bz = 0.0;
  double vx_amp = 0.0, vx_sigma = 1.0, vx_h = 1e-2;
  int vx_levels = 3;
  std::string vx_out;
  vx->add_option("--bx", vx_bx, "background B_x");
  vx->add_option("--by", vx_by, "background B_y");
  vx->add_option("--bz", vx_bz, "background B_z");
  vx->add_option("--amplitude", vx_amp, "pulse amplitude (default 0.1/coupling)");
  vx->add_option("--sigma", vx_sigma, "pulse width");
  vx->add_option("--hmax", vx_h, "coarsest stencil step");
  vx->add_option("--levels", vx_levels, "number of halvings (>= 2)");
  vx->add_option("--out", vx_out, "output prefix");

  // duality
  auto* dual = app.add_subcommand("duality", "duality residual scan");
  ModelFlags dual_model;
  dual_model.attach(dual);
  long dual_points = 10000, dual_seed = 0;
  double dual_bound = 0.5;
  std::string dual_out;
  dual->add_option("--points", dual_points, "number of field points");
  dual->add_option("--bound", dual_bound, "field magnitude bound");
  dual->add_option("--seed", dual_seed, "RNG seed");
  dual->add_option("--out", dual_out, "output prefix for the JSON summary");

  // invert-check
  auto* inv = app.add_subcommand("invert-check", "constitutive round-trip check");
  ModelFlags inv_model;
  inv_model.attach(inv);
  long inv_points = 1000, inv_seed = 0;
  double inv_bound = 0.4;
  std::string inv_out;
  inv->add_option("--points", inv_points, "number of field points");
  inv->add_option("--bound", inv_bound, "field magnitude bound");
  inv->add_option("--seed", inv_seed, "RNG seed");
  inv->add_option("--out", inv_out, "output prefix for the JSON summary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exit 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cout << app.help() << std::flush;
    return 64;
  }

  try {
    if (tof->parsed())
      return cmd_tof(tof_config, tof_out, tof_seed, !tof_seed_opt->empty());
    if (sweep->parsed())
      return cmd_sweep(sweep_config, sweep_out, sweep_seed, !sweep_seed_opt->empty());
    if (vx->parsed())
      return cmd_verify_exact(vx_model, vx_bx, vx_by, vx_bz, vx_amp, vx_sigma, vx_h,
                              vx_levels, vx_out);
    if (dual->parsed())
      return cmd_duality(dual_model, dual_points, dual_bound, dual_seed, dual_out);
    if (inv->parsed())
      return cmd_invert_check(inv_model, inv_points, inv_bound, inv_seed, inv_out);
  } catch (const nled::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const nled::FitError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime error: %s\n", e.what());
    return 2;
  }
  return 64;
}
