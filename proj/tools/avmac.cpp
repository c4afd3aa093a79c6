#include <CLI11.hpp>

#include "avmac/cli.hpp"

using avmac::cli::RunConfig;

int main(int argc, char** argv) {
  CLI::App app{"AVMAC analysis tool: symmetrizability, capacity regions, list-decoding combinatorics,\n"
               "jamming attacks and decoder simulation for discrete memoryless two-sender channels"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_channel = [&](CLI::App* sub) {
    sub->add_option("--channel", cfg.channel_path, "channel JSON file")->required();
  };
  auto add_outputs = [&](CLI::App* sub) {
    sub->add_option("--out", cfg.out_json, "write the JSON report here");
    sub->add_option("--out-csv", cfg.out_csv, "write the CSV rendering here");
  };
  auto add_codebook = [&](CLI::App* sub) {
    sub->add_option("--n", cfg.n, "blocklength");
    sub->add_option("--m", cfg.m, "messages per sender");
    sub->add_option("--seed", cfg.seed, "code/simulation seed (printed in the report)");
    sub->add_option("--px", cfg.px, "sender-1 composition, comma rationals (default uniform)");
    sub->add_option("--py", cfg.py, "sender-2 composition, comma rationals (default uniform)");
    sub->add_flag("--arbitrary-words", cfg.arbitrary_words, "drop the constant-composition constraint");
  };

  auto* validate = app.add_subcommand("validate", "validate a channel file");
  add_channel(validate);
  add_outputs(validate);

  auto* symc = app.add_subcommand("sym", "decide symmetrizability and compute the index");
  add_channel(symc);
  add_outputs(symc);
  symc->add_option("--u-max", cfg.u_max, "largest u to test");
  symc->add_option("--tol", cfg.tol, "feasibility residual tolerance");
  symc->add_option("--exact", cfg.exact, "exact rational arithmetic: auto|on|off")
      ->check(CLI::IsMember({"auto", "on", "off"}));
  symc->add_option("--cert-out", cfg.cert_out, "write the index certificate here");

  auto* cap = app.add_subcommand("capacity", "compute the random-code rate region");
  add_channel(cap);
  add_outputs(cap);
  cap->add_option("--grid-k", cfg.grid_k, "input simplex grid denominator");
  cap->add_option("--tol", cfg.cap_tol, "state-minimization tolerance");

  auto* gt = app.add_subcommand("gtable", "tabulate the diagonal/rectangle threshold g(A)");
  add_outputs(gt);
  gt->add_option("--a-max", cfg.a_max, "largest A");
  gt->add_option("--m-max", cfg.m_max, "largest grid side searched");
  gt->add_option("--budget", cfg.budget, "backtracking node budget");

  auto* atk = app.add_subcommand("attack", "run the symmetrizing jammer against the list decoder");
  add_channel(atk);
  add_outputs(atk);
  add_codebook(atk);
  atk->add_option("--mode", cfg.mode, "diag|rect")->check(CLI::IsMember({"diag", "rect"}));
  atk->add_option("--u", cfg.u, "diagonal condition tail length");
  atk->add_option("--a", cfg.a, "rect condition x-tail length");
  atk->add_option("--b", cfg.b, "rect condition y-tail length");
  atk->add_option("--cert", cfg.cert_path, "certificate JSON (computed when omitted)");
  atk->add_option("--eta", cfg.eta, "decoder threshold");
  atk->add_option("--l", cfg.L, "list size");
  atk->add_option("--trials", cfg.trials, "Monte Carlo trials");
  atk->add_option("--tol", cfg.tol, "certificate residual tolerance");

  auto* sim = app.add_subcommand("decode-sim", "estimate the average list-decoding error for fixed states");
  add_channel(sim);
  add_outputs(sim);
  add_codebook(sim);
  sim->add_option("--eta", cfg.eta, "decoder threshold");
  sim->add_option("--l", cfg.L, "list size");
  sim->add_option("--trials", cfg.trials, "Monte Carlo trials");
  sim->add_option("--state", cfg.states, "state sequence, comma separated (repeatable)");
  sim->add_option("--sample-states", cfg.sample_states, "additionally sample this many states");
  sim->add_option("--sim-mode", cfg.sim_mode, "auto|mc|exact")->check(CLI::IsMember({"auto", "mc", "exact"}));

  auto* good = app.add_subcommand("goodcode", "check the good-code set cardinality bounds");
  add_channel(good);
  add_outputs(good);
  add_codebook(good);
  good->add_option("--eps", cfg.eps, "set threshold");
  good->add_option("--l", cfg.L, "list size");
  good->add_option("--state", cfg.states, "state sequence, comma separated (repeatable)");
  good->add_option("--sample-states", cfg.sample_states, "additionally sample this many states");
  good->add_flag("--states-exhaustive", cfg.states_exhaustive, "enumerate every state sequence");

  auto* ren = app.add_subcommand("render", "re-render a report deterministically");
  ren->add_option("--report", cfg.report_path, "report JSON file")->required();
  ren->add_option("--format", cfg.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  ren->add_option("--out", cfg.out_csv, "output path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  cfg.subcommand = app.get_subcommands().front()->get_name();
  return avmac::cli::run(cfg);
}
