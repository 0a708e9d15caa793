#pragma once

#include <exception>
#include <ostream>
#include <string>

#include <CLI11.hpp>

#include "lpm/cli/commands.hpp"

namespace lpm::cli {

/// Parses argv and runs the selected command. Never throws.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Levy-Prokhorov distances, witness functions and measure reconstruction", "lpm"};
  app.require_subcommand(1);

  DistConfig dist;
  std::string method = "flow";
  auto* c_dist = app.add_subcommand("dist", "LP distance between two measures");
  c_dist->add_option("--mu", dist.mu, "first measure (JSON)")->required();
  c_dist->add_option("--nu", dist.nu, "second measure (JSON)")->required();
  c_dist->add_option("--method", method, "brute | flow | both")
      ->check(CLI::IsMember({"brute", "flow", "both"}))
      ->capture_default_str();
  c_dist->add_option("--s", dist.s, "scale of the s-LP distance")->capture_default_str();
  c_dist->add_option("--tol", dist.options.cross_check_tol, "brute/flow agreement tolerance")->capture_default_str();
  c_dist->add_option("--support-cap", dist.options.support_cap, "largest support for brute force")
      ->capture_default_str();

  WitnessConfig wit;
  auto* c_wit = app.add_subcommand("witness", "witness function W(x) = pi(delta_x, mu) as CSV");
  c_wit->add_option("--measure", wit.measure, "measure (JSON)")->required();
  c_wit->add_option("--point", wit.points, "query point: a,b,... or an index (repeatable)");
  c_wit->add_option("--grid", wit.grid, "lo:hi:step on every coordinate");
  c_wit->add_flag("--all-points", wit.all_points, "every support atom (every point for finite spaces)");
  c_wit->add_option("--s", wit.s, "scale s of the s-witness")->capture_default_str();

  ProfileConfig prof;
  auto* c_prof = app.add_subcommand("profile", "witness profile along an exposing ray from a hull vertex");
  c_prof->add_option("--measure", prof.measure, "measure (JSON)")->required();
  c_prof->add_option("--vertex", prof.vertex, "index of the vertex atom")->required();
  c_prof->add_option("--direction", prof.direction, "ray direction a,b,... (default: automatic)");
  c_prof->add_option("--s", prof.s, "scale s")->capture_default_str();
  c_prof->add_option("--step", prof.step, "sampling step in t")->capture_default_str();
  c_prof->add_option("--extent", prof.extent, "largest t sampled (default 1.25 s)");
  c_prof->add_option("--out", prof.out, "write the t,W CSV here instead of stdout");

  ReconstructConfig rec;
  auto* c_rec = app.add_subcommand("reconstruct", "recover a hidden measure from distance queries");
  c_rec->add_option("--hidden", rec.hidden, "hidden measure (JSON), queried only through pi")->required();
  c_rec->add_option("--support", rec.support, "support file {\"points\": [...]} (default: the hidden support)");
  c_rec->add_flag("--experimental-support-search", rec.support_search, "locate the support by a grid scan");
  c_rec->add_option("--grid", rec.grid, "lo:hi:step for the support search");
  c_rec->add_option("--support-cap", rec.support_cap, "largest support accepted")->capture_default_str();

  InvarianceConfig inv;
  std::uint64_t inv_seed = 0;
  auto* c_inv = app.add_subcommand("invariance", "check that an affine isometry preserves pi");
  c_inv->add_option("--measures", inv.measures_dir, "directory of measure JSON files")->required();
  c_inv->add_option("--isometry", inv.isometry, "isometry file {\"linear\": ..., \"translation\": ...}");
  c_inv->add_flag("--random-isometry", inv.random_isometry, "use a random isometry (needs --seed)");
  auto* inv_seed_opt = c_inv->add_option("--seed", inv_seed, "seed for --random-isometry");
  c_inv->add_option("--threads", inv.threads, "worker threads")->capture_default_str();

  SampleConfig smp;
  auto* c_smp = app.add_subcommand("sample", "empirical measure of n draws and its distance to the target");
  c_smp->add_option("--target", smp.target, "target measure (JSON)")->required();
  c_smp->add_option("--n", smp.n, "number of draws")->required();
  c_smp->add_option("--seed", smp.seed, "random seed")->required();
  c_smp->add_option("--out", smp.out, "write the empirical measure here");

  SelftestConfig st;
  auto* c_st = app.add_subcommand("selftest", "run the property suites");
  c_st->add_option("--cases", st.cases, "cases per suite")->capture_default_str();
  c_st->add_option("--seed", st.seed, "random seed")->capture_default_str();
  c_st->add_flag("--inject-fault", st.inject_fault)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }

  try {
    if (c_dist->parsed()) {
      dist.method = method == "brute" ? Method::Brute : method == "both" ? Method::Both : Method::Flow;
      return cmd_dist(dist, out, err);
    }
    if (c_wit->parsed()) return cmd_witness(wit, out, err);
    if (c_prof->parsed()) return cmd_profile(prof, out, err);
    if (c_rec->parsed()) return cmd_reconstruct(rec, out, err);
    if (c_inv->parsed()) {
      if (inv_seed_opt->count() > 0) inv.seed = inv_seed;
      return cmd_invariance(inv, out, err);
    }
    if (c_smp->parsed()) return cmd_sample(smp, out, err);
    if (c_st->parsed()) return cmd_selftest(st, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitVerification;
  }
  return kExitInput;
}

}  // namespace lpm::cli
