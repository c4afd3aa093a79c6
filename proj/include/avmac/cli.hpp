#pragma once

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "avmac/capacity.hpp"
#include "avmac/channel.hpp"
#include "avmac/codebook.hpp"
#include "avmac/jammer.hpp"
#include "avmac/listcomb.hpp"
#include "avmac/listdecode.hpp"
#include "avmac/symmetrizability.hpp"
#include "avmac/util.hpp"

namespace avmac::cli {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr std::uint64_t kDefaultSeed = 0x5eed;

struct RunConfig {
  std::string subcommand;
  std::string channel_path;
  std::string cert_path;
  std::string report_path;  // render input
  std::string out_json;
  std::string out_csv;
  std::string cert_out;
  std::string format = "csv";  // render output format

  int u_max = 2;
  double tol = 1e-9;
  std::string exact = "auto";  // auto|on|off

  int grid_k = 4;
  double cap_tol = 1e-6;

  int a_max = 3;
  int m_max = 6;
  long budget = 50000000;

  double eta = 0.1;
  int L = 1;
  int n = 4;
  int m = 4;
  long trials = 1000;
  std::uint64_t seed = kDefaultSeed;
  std::string px, py;  // comma-separated rationals; empty = uniform
  bool arbitrary_words = false;

  std::vector<std::string> states;
  long sample_states = 0;
  bool states_exhaustive = false;
  std::string sim_mode = "auto";  // auto|mc|exact
  double eps = 0.1;

  std::string mode = "diag";
  int a = -1, b = -1;
  int u = 1;
};

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write '" + path + "'");
  out << content;
}

inline Avmac load_channel(const RunConfig& cfg) {
  if (cfg.channel_path.empty()) throw Error(Errc::bad_argument, "--channel is required");
  return parse_channel(read_file(cfg.channel_path));
}

inline sym::CheckOptions check_options(const RunConfig& cfg) {
  sym::CheckOptions opts;
  if (cfg.exact == "on")
    opts.exact = sym::CheckOptions::Exact::on;
  else if (cfg.exact == "off")
    opts.exact = sym::CheckOptions::Exact::off;
  else
    opts.exact = sym::CheckOptions::Exact::automatic;
  return opts;
}

inline Dist parse_prob_list(const std::string& text, int expected_size, const char* who) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) vals.push_back(to_double(parse_rational(item)));
  if (int(vals.size()) != expected_size)
    throw Error(Errc::dimension_mismatch, std::string(who) + " has the wrong number of entries");
  return Dist::validated(std::move(vals), 1e-9);
}

inline std::vector<int> parse_state(const std::string& text, int n, int s_size) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  if (int(out.size()) != n) throw Error(Errc::length_mismatch, "state sequence must have length n");
  for (int v : out)
    if (v < 0 || v >= s_size) throw Error(Errc::symbol_out_of_range, "state symbol out of range");
  return out;
}

inline code::Codebook make_codebook(const RunConfig& cfg, const Avmac& ch) {
  if (cfg.arbitrary_words) return code::random_distinct_code(cfg.n, cfg.m, ch.x_size, ch.y_size, cfg.seed);
  Dist px = cfg.px.empty() ? Dist::uniform(ch.x_size) : parse_prob_list(cfg.px, ch.x_size, "--px");
  Dist py = cfg.py.empty() ? Dist::uniform(ch.y_size) : parse_prob_list(cfg.py, ch.y_size, "--py");
  return code::build_code(px, py, cfg.m, cfg.n, cfg.seed, ch.x_size, ch.y_size);
}

inline nlohmann::json config_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["subcommand"] = cfg.subcommand;
  if (!cfg.channel_path.empty()) j["channel"] = cfg.channel_path;
  if (!cfg.cert_path.empty()) j["cert"] = cfg.cert_path;
  if (cfg.subcommand == "sym") {
    j["u_max"] = cfg.u_max;
    j["tol"] = cfg.tol;
    j["exact"] = cfg.exact;
  } else if (cfg.subcommand == "capacity") {
    j["grid_k"] = cfg.grid_k;
    j["tol"] = cfg.cap_tol;
  } else if (cfg.subcommand == "gtable") {
    j["a_max"] = cfg.a_max;
    j["m_max"] = cfg.m_max;
    j["budget"] = cfg.budget;
  } else if (cfg.subcommand == "attack") {
    j["mode"] = cfg.mode;
    j["u"] = cfg.u;
    if (cfg.a >= 0) j["a"] = cfg.a;
    if (cfg.b >= 0) j["b"] = cfg.b;
    j["m"] = cfg.m;
    j["n"] = cfg.n;
    j["l"] = cfg.L;
    j["eta"] = cfg.eta;
    j["trials"] = cfg.trials;
    j["seed"] = cfg.seed;
    j["tol"] = cfg.tol;
    j["arbitrary_words"] = cfg.arbitrary_words;
  } else if (cfg.subcommand == "decode-sim") {
    j["m"] = cfg.m;
    j["n"] = cfg.n;
    j["l"] = cfg.L;
    j["eta"] = cfg.eta;
    j["trials"] = cfg.trials;
    j["seed"] = cfg.seed;
    j["sim_mode"] = cfg.sim_mode;
    j["states"] = cfg.states;
    j["sample_states"] = cfg.sample_states;
  } else if (cfg.subcommand == "goodcode") {
    j["m"] = cfg.m;
    j["n"] = cfg.n;
    j["l"] = cfg.L;
    j["eps"] = cfg.eps;
    j["seed"] = cfg.seed;
    j["states"] = cfg.states;
    j["sample_states"] = cfg.sample_states;
    j["states_exhaustive"] = cfg.states_exhaustive;
  }
  if (!cfg.px.empty()) j["px"] = cfg.px;
  if (!cfg.py.empty()) j["py"] = cfg.py;
  return j;
}

inline nlohmann::json report_header(const char* kind, const RunConfig& cfg, const std::string& channel_bytes) {
  nlohmann::json j;
  j["kind"] = kind;
  j["tool_version"] = kVersion;
  j["config"] = config_json(cfg);
  if (!channel_bytes.empty()) j["channel_hash"] = content_hash(channel_bytes);
  return j;
}

inline void emit(const RunConfig& cfg, const nlohmann::json& report, const std::string& csv) {
  if (!cfg.out_json.empty()) write_file(cfg.out_json, report.dump(2) + "\n");
  if (!cfg.out_csv.empty() && !csv.empty()) write_file(cfg.out_csv, csv);
}

// ---- subcommands ---------------------------------------------------------

inline int cmd_validate(const RunConfig& cfg) {
  if (cfg.channel_path.empty()) throw Error(Errc::bad_argument, "--channel is required");
  std::string bytes = read_file(cfg.channel_path);
  Avmac ch = parse_channel(bytes);
  nlohmann::json rep = report_header("validate", cfg, bytes);
  rep["valid"] = true;
  rep["x_size"] = ch.x_size;
  rep["y_size"] = ch.y_size;
  rep["s_size"] = ch.s_size;
  rep["z_size"] = ch.z_size;
  rep["exact_entries"] = ch.exact();
  emit(cfg, rep, "valid,x,y,s,z\n1," + std::to_string(ch.x_size) + "," + std::to_string(ch.y_size) + "," +
                     std::to_string(ch.s_size) + "," + std::to_string(ch.z_size) + "\n");
  std::cout << "valid channel: |X|=" << ch.x_size << " |Y|=" << ch.y_size << " |S|=" << ch.s_size
            << " |Z|=" << ch.z_size << (ch.exact() ? " (exact entries)" : "") << "\n";
  return 0;
}

inline int cmd_sym(const RunConfig& cfg) {
  std::string bytes = read_file(cfg.channel_path);
  Avmac ch = parse_channel(bytes);
  auto rep = sym::symmetrizability_index(ch, cfg.u_max, cfg.tol, check_options(cfg));

  nlohmann::json j = report_header("sym", cfg, bytes);
  j["u_max"] = rep.u_max;
  j["tol"] = rep.tol;
  j["exact_mode"] = rep.exact_mode;
  j["index"] = rep.index;
  j["index_is_lower_bound"] = rep.index_is_lower_bound;
  j["monotonicity_repaired"] = rep.monotonicity_repaired;
  nlohmann::json entries = nlohmann::json::array();
  std::ostringstream csv;
  csv << "u,mode,a,b,feasible,t_star,residual,error\n";
  for (const auto& e : rep.entries) {
    nlohmann::json je;
    je["u"] = e.u;
    je["symmetrizable"] = e.symmetrizable;
    je["symmetrizable_raw"] = e.symmetrizable_raw;
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : e.checks) {
      nlohmann::json jc;
      jc["mode"] = c.mode;
      if (c.mode == "rect") {
        jc["a"] = c.a;
        jc["b"] = c.b;
      }
      jc["feasible"] = c.feasible;
      if (std::isfinite(c.t_star)) jc["t_star"] = round9(c.t_star);
      if (std::isfinite(c.residual)) jc["residual"] = round9(c.residual);
      if (!c.error.empty()) jc["error"] = c.error;
      checks.push_back(jc);
      csv << e.u << "," << c.mode << "," << (c.a >= 0 ? std::to_string(c.a) : "") << ","
          << (c.b >= 0 ? std::to_string(c.b) : "") << "," << (c.feasible ? 1 : 0) << ","
          << (std::isfinite(c.t_star) ? fmt_g9(c.t_star) : "") << ","
          << (std::isfinite(c.residual) ? fmt_g9(c.residual) : "") << "," << c.error << "\n";
    }
    je["checks"] = checks;
    entries.push_back(je);
  }
  j["entries"] = entries;
  nlohmann::json certs;
  for (const auto& [u, cert] : rep.certificates) {
    double residual = sym::verify_certificate(ch, cert);
    certs[std::to_string(u)] = sym::certificate_to_json(cert, residual, cfg.tol);
  }
  j["certificates"] = certs;
  emit(cfg, j, csv.str());

  if (!cfg.cert_out.empty() && rep.index >= 1 && rep.certificates.count(rep.index)) {
    const auto& cert = rep.certificates.at(rep.index);
    double residual = sym::verify_certificate(ch, cert);
    write_file(cfg.cert_out, sym::certificate_to_json(cert, residual, cfg.tol).dump(2) + "\n");
  }

  std::cout << "U(G) " << (rep.index_is_lower_bound ? ">= " : "= ") << rep.index
            << (rep.exact_mode ? " (exact arithmetic)" : "") << "\n";
  return 0;
}

inline int cmd_capacity(const RunConfig& cfg) {
  std::string bytes = read_file(cfg.channel_path);
  Avmac ch = parse_channel(bytes);
  auto rep = capacity::random_code_region(ch, cfg.grid_k, cfg.cap_tol);

  nlohmann::json j = report_header("capacity", cfg, bytes);
  j["grid_k"] = cfg.grid_k;
  j["tol"] = cfg.cap_tol;
  j["inner_approximation"] = true;
  nlohmann::json pents = nlohmann::json::array();
  for (const auto& p : rep.pentagons) {
    nlohmann::json jp;
    auto round_all = [](const std::vector<double>& v) {
      nlohmann::json a = nlohmann::json::array();
      for (double x : v) a.push_back(round9(x));
      return a;
    };
    jp["px"] = round_all(p.px.p);
    jp["py"] = round_all(p.py.p);
    jp["r1_max"] = round9(p.r1_max);
    jp["r2_max"] = round9(p.r2_max);
    jp["rsum_max"] = round9(p.rsum_max);
    jp["q_r1"] = round_all(p.q_r1.p);
    jp["q_r2"] = round_all(p.q_r2.p);
    jp["q_rsum"] = round_all(p.q_rsum.p);
    jp["converged"] = p.converged;
    pents.push_back(jp);
  }
  j["pentagons"] = pents;
  nlohmann::json verts = nlohmann::json::array();
  std::ostringstream csv;
  csv << "r1,r2\n";
  for (const auto& v : rep.region.vertices) {
    verts.push_back({round9(v.x), round9(v.y)});
    csv << fmt_g9(round9(v.x)) << "," << fmt_g9(round9(v.y)) << "\n";
  }
  j["vertices"] = verts;
  emit(cfg, j, csv.str());

  double max_sum = 0.0;
  for (const auto& v : rep.region.vertices) max_sum = std::max(max_sum, v.x + v.y);
  std::cout << "region vertices: " << rep.region.vertices.size() << ", max sum-rate " << fmt_g9(max_sum) << "\n";
  return 0;
}

inline int cmd_gtable(const RunConfig& cfg) {
  nlohmann::json j = report_header("gtable", cfg, "");
  nlohmann::json rows = nlohmann::json::array();
  std::ostringstream csv;
  csv << "A,g_lower,g_upper,exact,witness\n";
  for (int a = 1; a <= cfg.a_max; ++a) {
    auto g = listcomb::g_of(a, cfg.m_max, cfg.budget);
    std::ostringstream wit;
    for (std::size_t i = 0; i < g.witness.cells.size(); ++i) {
      if (i) wit << ";";
      wit << "(" << g.witness.cells[i].first << " " << g.witness.cells[i].second << ")";
    }
    nlohmann::json jr;
    jr["A"] = a;
    jr["g_lower"] = g.lower;
    jr["g_upper"] = g.upper;
    jr["exact"] = g.exact;
    jr["witness"] = wit.str();
    jr["nodes"] = g.nodes;
    rows.push_back(jr);
    csv << a << "," << g.lower << "," << g.upper << "," << (g.exact ? 1 : 0) << "," << wit.str() << "\n";
    std::cout << "g(" << a << ") " << (g.exact ? "= " + std::to_string(g.lower)
                                              : "in [" + std::to_string(g.lower) + ", " + std::to_string(g.upper) + "]")
              << "\n";
  }
  j["rows"] = rows;
  emit(cfg, j, csv.str());
  return 0;
}

inline int cmd_attack(const RunConfig& cfg) {
  std::string bytes = read_file(cfg.channel_path);
  Avmac ch = parse_channel(bytes);
  auto cb = make_codebook(cfg, ch);

  std::optional<sym::SymCert> cert;
  std::string cert_bytes;
  if (!cfg.cert_path.empty()) {
    cert_bytes = read_file(cfg.cert_path);
    cert = sym::certificate_from_json(nlohmann::json::parse(cert_bytes));
  } else {
    sym::Feasibility feas = cfg.mode == "rect"
                                ? sym::check_rect_symmetrizable(ch, cfg.a, cfg.b, cfg.tol, check_options(cfg))
                                : sym::check_diag_symmetrizable(ch, cfg.u, cfg.tol, check_options(cfg));
    if (feas.feasible) {
      cert = feas.cert;
      cert_bytes = sym::certificate_to_json(*cert, feas.residual, cfg.tol).dump();
    }
  }

  nlohmann::json j = report_header("attack", cfg, bytes);
  j["m"] = cfg.m;
  j["n"] = cfg.n;
  j["l"] = cfg.L;
  j["eta"] = cfg.eta;
  j["trials"] = cfg.trials;
  j["code_seed"] = cfg.seed;

  if (!cert) {
    j["verdict"] = "not_applicable";
    j["reason"] = "no feasible symmetrizer at the requested condition";
    emit(cfg, j, "verdict\nnot_applicable\n");
    std::cout << "attack not applicable: channel is not symmetrizable at the requested condition\n";
    return 0;
  }

  jammer::AttackSpec spec;
  spec.cert = *cert;
  spec.trials = cfg.trials;
  spec.seed = cfg.seed;
  spec.cert_tol = cfg.tol;

  listdecode::DecoderParams params;
  params.eta = cfg.eta;
  params.L = cfg.L;

  auto res = jammer::run_attack(ch, cb, params, spec);
  j["cert_hash"] = content_hash(cert_bytes);
  j["u"] = spec.symmetrizability();
  j["cert_residual"] = round9(res.cert_residual);
  if (res.not_applicable) {
    j["verdict"] = "not_applicable";
    emit(cfg, j, "verdict\nnot_applicable\n");
    std::cout << "attack not applicable\n";
    return 0;
  }
  j["estimate"] = round9(res.estimate);
  j["std_error"] = round9(res.std_error);
  j["bound"] = round9(res.bound);
  j["extrapolated_bound"] = res.extrapolated;
  j["truncations"] = res.truncations;
  j["verdict"] = res.pass ? "pass" : "fail";

  std::ostringstream csv;
  csv << "m,u,l,n,trials,estimate,std_error,bound,verdict\n"
      << cfg.m << "," << spec.symmetrizability() << "," << cfg.L << "," << cfg.n << "," << cfg.trials << ","
      << fmt_g9(round9(res.estimate)) << "," << fmt_g9(round9(res.std_error)) << "," << fmt_g9(round9(res.bound))
      << "," << (res.pass ? "pass" : "fail") << "\n";
  emit(cfg, j, csv.str());

  std::cout << "attack estimate " << fmt_g9(res.estimate) << " +- " << fmt_g9(res.std_error) << " vs bound "
            << fmt_g9(res.bound) << " -> " << (res.pass ? "pass" : "fail") << "\n";
  return 0;
}

inline std::vector<std::vector<int>> gather_states(const RunConfig& cfg, const Avmac& ch) {
  std::vector<std::vector<int>> states;
  for (const auto& s : cfg.states) states.push_back(parse_state(s, cfg.n, ch.s_size));
  if (cfg.sample_states > 0) {
    Prng rng(cfg.seed, 777);
    for (long i = 0; i < cfg.sample_states; ++i) {
      std::vector<int> s(std::size_t(cfg.n), 0);
      for (auto& v : s) v = rng.next_int(ch.s_size);
      states.push_back(std::move(s));
    }
  }
  if (cfg.states_exhaustive) {
    std::size_t total = listdecode::detail::pow_or_cap(std::size_t(ch.s_size), cfg.n, 1 << 14);
    if (total > (1u << 14)) throw Error(Errc::state_space_too_large, "too many states to enumerate; sample instead");
    std::vector<int> s(std::size_t(cfg.n), 0);
    for (;;) {
      states.push_back(s);
      std::size_t t = s.size();
      while (t > 0) {
        if (++s[t - 1] < ch.s_size) break;
        s[t - 1] = 0;
        --t;
      }
      if (t == 0) break;
    }
  }
  if (states.empty()) states.push_back(std::vector<int>(std::size_t(cfg.n), 0));
  return states;
}

inline std::string state_str(const std::vector<int>& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += " ";
    out += std::to_string(s[i]);
  }
  return out;
}

inline int cmd_decode_sim(const RunConfig& cfg) {
  std::string bytes = read_file(cfg.channel_path);
  Avmac ch = parse_channel(bytes);
  auto cb = make_codebook(cfg, ch);
  auto states = gather_states(cfg, ch);

  listdecode::DecoderParams params;
  params.eta = cfg.eta;
  params.L = cfg.L;
  listdecode::SimMode mode = cfg.sim_mode == "mc"      ? listdecode::SimMode::monte_carlo
                             : cfg.sim_mode == "exact" ? listdecode::SimMode::exact
                                                       : listdecode::SimMode::automatic;

  nlohmann::json j = report_header("decode-sim", cfg, bytes);
  j["code_seed"] = cfg.seed;
  j["eta"] = cfg.eta;
  j["l"] = cfg.L;
  nlohmann::json per = nlohmann::json::array();
  std::ostringstream csv;
  csv << "state,estimate,std_error,exact\n";
  for (const auto& s : states) {
    auto est = listdecode::simulate_error(ch, cb, params, s, cfg.trials, cfg.seed, mode);
    nlohmann::json js;
    js["s"] = s;
    js["estimate"] = round9(est.value);
    js["std_error"] = round9(est.std_error);
    js["exact"] = est.exact;
    per.push_back(js);
    csv << state_str(s) << "," << fmt_g9(round9(est.value)) << "," << fmt_g9(round9(est.std_error)) << ","
        << (est.exact ? 1 : 0) << "\n";
    std::cout << "s=[" << state_str(s) << "] error " << fmt_g9(est.value)
              << (est.exact ? " (exact)" : " +- " + fmt_g9(est.std_error)) << "\n";
  }
  j["per_state"] = per;
  emit(cfg, j, csv.str());
  return 0;
}

inline int cmd_goodcode(const RunConfig& cfg) {
  std::string bytes = read_file(cfg.channel_path);
  Avmac ch = parse_channel(bytes);
  auto cb = make_codebook(cfg, ch);
  auto states = gather_states(cfg, ch);

  auto rep = listdecode::goodcode_check(ch, cb, cfg.eps, states, cfg.L);
  nlohmann::json j = report_header("goodcode", cfg, bytes);
  j["eps"] = cfg.eps;
  j["l"] = cfg.L;
  j["code_seed"] = cfg.seed;
  j["all_pass"] = rep.all_pass;
  j["worst_index"] = rep.worst_index;
  nlohmann::json per = nlohmann::json::array();
  std::ostringstream csv;
  csv << "state,a_complement,b_complement,c_complement,pair_bound,single_bound,margin,pass\n";
  for (const auto& ps : rep.per_state) {
    nlohmann::json js;
    js["s"] = ps.s;
    js["a_complement"] = ps.a_complement;
    js["b_complement"] = ps.b_complement;
    js["c_complement"] = ps.c_complement;
    js["pair_bound"] = round9(ps.pair_bound);
    js["single_bound"] = round9(ps.single_bound);
    js["margin"] = round9(ps.margin);
    js["pass"] = ps.pass;
    per.push_back(js);
    csv << state_str(ps.s) << "," << ps.a_complement << "," << ps.b_complement << "," << ps.c_complement << ","
        << fmt_g9(round9(ps.pair_bound)) << "," << fmt_g9(round9(ps.single_bound)) << ","
        << fmt_g9(round9(ps.margin)) << "," << (ps.pass ? 1 : 0) << "\n";
  }
  j["per_state"] = per;
  emit(cfg, j, csv.str());
  std::cout << (rep.all_pass ? "good-code bounds hold on all tested states\n"
                             : "good-code bounds violated on some state\n");
  return 0;
}

inline int cmd_render(const RunConfig& cfg) {
  std::string bytes = read_file(cfg.report_path);
  nlohmann::json rep = nlohmann::json::parse(bytes);
  std::string out;
  if (cfg.format == "json") {
    out = rep.dump(2) + "\n";
  } else {
    std::string kind = rep.value("kind", "");
    std::ostringstream csv;
    if (kind == "capacity") {
      csv << "r1,r2\n";
      for (const auto& v : rep.at("vertices")) csv << fmt_g9(v[0].get<double>()) << "," << fmt_g9(v[1].get<double>()) << "\n";
    } else if (kind == "sym") {
      csv << "u,mode,a,b,feasible,t_star,residual,error\n";
      for (const auto& e : rep.at("entries"))
        for (const auto& c : e.at("checks")) {
          csv << e.at("u").get<int>() << "," << c.at("mode").get<std::string>() << ","
              << (c.contains("a") ? std::to_string(c.at("a").get<int>()) : "") << ","
              << (c.contains("b") ? std::to_string(c.at("b").get<int>()) : "") << ","
              << (c.at("feasible").get<bool>() ? 1 : 0) << ","
              << (c.contains("t_star") ? fmt_g9(c.at("t_star").get<double>()) : "") << ","
              << (c.contains("residual") ? fmt_g9(c.at("residual").get<double>()) : "") << ","
              << (c.contains("error") ? c.at("error").get<std::string>() : "") << "\n";
        }
    } else if (kind == "gtable") {
      csv << "A,g_lower,g_upper,exact,witness\n";
      for (const auto& r : rep.at("rows"))
        csv << r.at("A").get<int>() << "," << r.at("g_lower").get<int>() << "," << r.at("g_upper").get<int>() << ","
            << (r.at("exact").get<bool>() ? 1 : 0) << "," << r.at("witness").get<std::string>() << "\n";
    } else if (kind == "attack") {
      csv << "m,u,l,n,trials,estimate,std_error,bound,verdict\n";
      if (rep.at("verdict").get<std::string>() == "not_applicable") {
        csv.str("verdict\nnot_applicable\n");
      } else {
        csv << rep.at("m").get<int>() << "," << rep.at("u").get<int>() << "," << rep.at("l").get<int>() << ","
            << rep.at("n").get<int>() << "," << rep.at("trials").get<long>() << ","
            << fmt_g9(rep.at("estimate").get<double>()) << "," << fmt_g9(rep.at("std_error").get<double>()) << ","
            << fmt_g9(rep.at("bound").get<double>()) << "," << rep.at("verdict").get<std::string>() << "\n";
      }
    } else if (kind == "decode-sim") {
      csv << "state,estimate,std_error,exact\n";
      for (const auto& s : rep.at("per_state")) {
        std::string st;
        for (const auto& v : s.at("s")) st += (st.empty() ? "" : " ") + std::to_string(v.get<int>());
        csv << st << "," << fmt_g9(s.at("estimate").get<double>()) << "," << fmt_g9(s.at("std_error").get<double>())
            << "," << (s.at("exact").get<bool>() ? 1 : 0) << "\n";
      }
    } else if (kind == "goodcode") {
      csv << "state,a_complement,b_complement,c_complement,pair_bound,single_bound,margin,pass\n";
      for (const auto& s : rep.at("per_state")) {
        std::string st;
        for (const auto& v : s.at("s")) st += (st.empty() ? "" : " ") + std::to_string(v.get<int>());
        csv << st << "," << s.at("a_complement").get<long>() << "," << s.at("b_complement").get<long>() << ","
            << s.at("c_complement").get<long>() << "," << fmt_g9(s.at("pair_bound").get<double>()) << ","
            << fmt_g9(s.at("single_bound").get<double>()) << "," << fmt_g9(s.at("margin").get<double>()) << ","
            << (s.at("pass").get<bool>() ? 1 : 0) << "\n";
      }
    } else if (kind == "validate") {
      csv << "valid,x,y,s,z\n1," << rep.at("x_size").get<int>() << "," << rep.at("y_size").get<int>() << ","
          << rep.at("s_size").get<int>() << "," << rep.at("z_size").get<int>() << "\n";
    } else {
      throw Error(Errc::bad_argument, "report kind '" + kind + "' has no CSV rendering");
    }
    out = csv.str();
  }
  if (!cfg.out_csv.empty())
    write_file(cfg.out_csv, out);
  else if (!cfg.out_json.empty())
    write_file(cfg.out_json, out);
  else
    std::cout << out;
  return 0;
}

}  // namespace detail

// 0 on success, 1 on domain errors, 2 on usage errors
inline int run(const RunConfig& cfg) {
  try {
    if (cfg.subcommand == "validate") return detail::cmd_validate(cfg);
    if (cfg.subcommand == "sym") return detail::cmd_sym(cfg);
    if (cfg.subcommand == "capacity") return detail::cmd_capacity(cfg);
    if (cfg.subcommand == "gtable") return detail::cmd_gtable(cfg);
    if (cfg.subcommand == "attack") return detail::cmd_attack(cfg);
    if (cfg.subcommand == "decode-sim") return detail::cmd_decode_sim(cfg);
    if (cfg.subcommand == "goodcode") return detail::cmd_goodcode(cfg);
    if (cfg.subcommand == "render") return detail::cmd_render(cfg);
    std::cerr << "unknown subcommand '" << cfg.subcommand << "'\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace avmac::cli
