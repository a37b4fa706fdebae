// xius: command-line front end for the exact-arithmetic lab.

#include "xius/instances.hpp"
#include "xius/norm.hpp"
#include "xius/report.hpp"
#include "xius/ris.hpp"
#include "xius/sequences.hpp"
#include "xius/suites.hpp"
#include "xius/uncond.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace xius;

namespace {

struct Common {
  std::string params = "toyA";
  std::string out;
  std::string format = "json";
  std::uint64_t seed = 1;
  std::string budget;
  std::string registry;
};

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw JsonFormatError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw JsonFormatError(path + ": " + e.what());
  }
}

// A JSON file path, or inline "1:1,2:1".
FinVec read_vector(const std::string& s) {
  if (s.find(':') != std::string::npos && s.find('/') == std::string::npos && s.find(".json") == std::string::npos)
    return parse_finvec(s);
  if (s.size() > 5 && s.substr(s.size() - 5) == ".json") return finvec_from_json(read_json(s));
  return parse_finvec(s);
}

std::vector<FinVec> read_blocks(const std::string& path) {
  std::vector<FinVec> out;
  for (auto& v : read_json(path)) out.push_back(finvec_from_json(v));
  return out;
}

std::vector<Q> parse_q_list(const std::string& s) {
  std::vector<Q> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(parse_q(item));
  return out;
}

std::vector<std::size_t> parse_index_list(const std::string& s) {
  std::vector<std::size_t> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(std::stoull(item));
  return out;
}

void write(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + c.out + "'");
  f << text;
}

void write_json(const Common& c, const Json& j) { write(c, j.dump(2) + "\n"); }

void write_checks(const Common& c, const std::string& section, const std::vector<Check>& cs, const Json& extra = {}) {
  Report r;
  r.config = {{"params", c.params}, {"seed", std::to_string(c.seed)}};
  r.sections.push_back({section, cs});
  if (c.format == "csv") return write(c, emit_csv(r));
  Json j = to_json(r);
  if (!extra.is_null()) j["data"] = extra;
  write_json(c, j);
}

void load_registry(SpecialRegistry& reg, const std::string& path) {
  if (path.empty()) return;
  for (auto& s : read_json(path)) reg.add(special_from_json(s, &reg));
}

void add_common(CLI::App* sub, Common& c, bool with_format = true) {
  sub->add_option("--params", c.params, "named parameter set or JSON file");
  sub->add_option("--out", c.out, "output file (stdout when omitted)");
  sub->add_option("--seed", c.seed, "seed");
  sub->add_option("--budget", c.budget, "budget overrides, key=value,...");
  if (with_format) sub->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"xius: exact-arithmetic lab for the space X_ius"};
  app.require_subcommand(1);
  Common c;
  int code = 0;

  // norm
  auto* norm = app.add_subcommand("norm", "norm of a finitely supported vector");
  std::string x_arg, space = "W";
  std::size_t k_trunc = 0;
  add_common(norm, c);
  norm->add_option("--x,--vec", x_arg, "vector file or inline coord:value list")->required();
  norm->add_option("--space", space, "W, Wk or tildeK")->check(CLI::IsMember({"W", "Wk", "tildeK"}));
  norm->add_option("--k", k_trunc, "weights m_1..m_k for Wk");
  norm->callback([&] {
    ParamSeq p = load_params(c.params);
    Budget b = parse_budget(c.budget);
    NormOptions opt;
    opt.dp_ceiling = b.dp_ceiling;
    FinVec x = read_vector(x_arg);
    Json j;
    Q value;
    if (space == "tildeK") {
      value = norm_tildeK(x, p);
      j = Json{{"value", to_string(value)}};
    } else {
      auto cert = space == "W" ? norm_W(x, p, opt) : norm_W_truncated(x, p, k_trunc, opt);
      value = cert.value;
      j = to_json(cert);
    }
    if (c.format == "csv") {
      Check ch;
      ch.anchor = "norm." + space;
      ch.claim = "norm of " + x.str();
      ch.status = Status::Pass;
      ch.value("value", value);
      return write_checks(c, "norm", {ch});
    }
    write_json(c, j);
  });

  // kset
  auto* kset = app.add_subcommand("kset", "norming set: enumerate, verify, bracket");
  kset->require_subcommand(1);
  Coord win_hi = 4;
  std::size_t depth = 1;
  std::string tree_path;
  auto* kenum = kset->add_subcommand("enum", "enumerate the database");
  add_common(kenum, c, false);
  kenum->add_option("--registry", c.registry, "special sequences JSON");
  kenum->add_option("--window-hi", win_hi, "last coordinate of the window");
  kenum->add_option("--depth", depth, "rounds of even operations");
  kenum->callback([&] {
    ParamSeq p = load_params(c.params);
    SigmaCoder coder(p);
    SpecialRegistry reg(coder);
    load_registry(reg, c.registry);
    EnumOptions opt;
    opt.window_hi = win_hi;
    opt.depth = depth;
    Json a = Json::array();
    for (auto& f : enumerate_K(p, &reg, opt)) a.push_back(to_json(f));
    write_json(c, a);
  });
  auto* kver = kset->add_subcommand("verify", "verify membership of a tree");
  add_common(kver, c, false);
  kver->add_option("--registry", c.registry, "special sequences JSON");
  kver->add_option("--tree", tree_path, "functional JSON")->required();
  kver->callback([&] {
    ParamSeq p = load_params(c.params);
    SigmaCoder coder(p);
    SpecialRegistry reg(coder);
    load_registry(reg, c.registry);
    auto r = verify_tree(kfunc_from_json(read_json(tree_path), &reg), p, &reg);
    write_json(c, Json{{"ok", r.ok()}, {"violation", r.ok() ? "" : r.violation->str()}});
    if (!r.ok()) code = kExitFail;
  });
  auto* kbr = kset->add_subcommand("bracket", "two-sided bracket of the norm of X");
  add_common(kbr, c, false);
  kbr->add_option("--registry", c.registry, "special sequences JSON");
  kbr->add_option("--x,--vec", x_arg, "vector")->required();
  kbr->add_option("--window-hi", win_hi, "database window");
  kbr->callback([&] {
    ParamSeq p = load_params(c.params);
    SigmaCoder coder(p);
    SpecialRegistry reg(coder);
    load_registry(reg, c.registry);
    EnumOptions opt;
    opt.window_hi = win_hi;
    auto db = enumerate_K(p, &reg, opt);
    auto b = norm_K_bracket(read_vector(x_arg), p, db);
    write_json(c, Json{{"lower", to_string(b.lower)}, {"upper", to_string(b.upper)}, {"witness", to_json(b.witness)}});
  });

  // uncond
  auto* unc = app.add_subcommand("uncond", "sign-flip transform and unconditionality certificate");
  unc->require_subcommand(1);
  std::string blocks_path, signs = "+", b_list, sigma_list;
  auto* flip = unc->add_subcommand("flip", "transform f for a sign vector");
  auto* cert = unc->add_subcommand("certify", "certificate for sum b_k x_k");
  for (auto* s : {flip, cert}) {
    add_common(s, c, false);
    s->add_option("--registry", c.registry, "special sequences JSON");
    s->add_option("--tree", tree_path, "functional JSON")->required();
    s->add_option("--blocks", blocks_path, "block sequence JSON")->required();
    s->add_option("--signs", signs, "sign pattern such as +-+")->required();
  }
  cert->add_option("--b", b_list, "coefficients")->required();
  cert->add_option("--sigmas", sigma_list, "tildeK bounds per block")->required();
  auto transform_json = [](const TransformReport& r) {
    Json eq = Json::array();
    for (auto& e : r.equalities)
      eq.push_back(Json{{"k", e.k}, {"lhs", to_string(e.lhs)}, {"rhs", to_string(e.rhs)}, {"holds", e.holds()}});
    Json part = Json::array();
    for (auto& e : r.partition) part.push_back(Json{{"address", e.address}, {"part", e.part}, {"rule", e.rule}});
    return Json{{"ok", r.ok()},
                {"f", to_json(r.f)},
                {"g", to_json(r.g)},
                {"signs", r.signs.str()},
                {"equalities", eq},
                {"supports_match", r.supports_match},
                {"couples_match", r.index_match},
                {"couples_f", r.couples_f},
                {"couples_g", r.couples_g},
                {"g_violation", r.g_violation ? r.g_violation->str() : ""},
                {"partition", part}};
  };
  flip->callback([&] {
    ParamSeq p = load_params(c.params);
    SigmaCoder coder(p);
    SpecialRegistry reg(coder);
    load_registry(reg, c.registry);
    auto r = sign_flip_transform(kfunc_from_json(read_json(tree_path), &reg), read_blocks(blocks_path),
                                 SignVector::parse(signs), p, &reg);
    write_json(c, transform_json(r));
    if (!r.ok()) code = kExitFail;
  });
  cert->callback([&] {
    ParamSeq p = load_params(c.params);
    SigmaCoder coder(p);
    SpecialRegistry reg(coder);
    load_registry(reg, c.registry);
    auto r = unconditionality_certificate(read_blocks(blocks_path), parse_q_list(b_list), SignVector::parse(signs),
                                          kfunc_from_json(read_json(tree_path), &reg), parse_q_list(sigma_list), p, &reg);
    write_checks(c, "uncond", r.checks, transform_json(r.transform));
    code = exit_code(Report{kToolVersion, kSchemaVersion, {}, {{"uncond", r.checks}}}, false);
  });

  // ris
  auto* ris = app.add_subcommand("ris", "l1 averages, R.I.S. and the basic inequality");
  ris->require_subcommand(1);
  std::size_t k_avg = 2, j_est = 2, j0 = 0;
  int variant = 1;
  std::string C_s = "1", eps_s = "1/8", js_list;
  auto* fa = ris->add_subcommand("find-avg", "leftmost C-l1^k average among ys");
  add_common(fa, c, false);
  fa->add_option("--ys", blocks_path, "block sequence JSON")->required();
  fa->add_option("--k", k_avg, "k");
  fa->add_option("--C", C_s, "C");
  fa->callback([&] {
    ParamSeq p = load_params(c.params);
    auto w = find_l1_average(read_blocks(blocks_path), k_avg, parse_q(C_s), p, {});
    if (!w) {
      write_json(c, Json{{"found", false}});
      return;
    }
    Json parts = Json::array();
    for (auto& x : w->parts) parts.push_back(to_json(x));
    write_json(c, Json{{"found", true},
                       {"x", to_json(w->x)},
                       {"parts", parts},
                       {"normalized", w->normalized},
                       {"norm", {{"lower", to_string(w->x_norm.lower)}, {"upper", to_string(w->x_norm.upper)}}},
                       {"check", to_json(verify_l1_average(*w))}});
  });
  auto* rb = ris->add_subcommand("build", "verify a R.I.S.");
  auto* rt = ris->add_subcommand("transform", "basic inequality transform");
  auto* re = ris->add_subcommand("estimate", "estimates for the average of a R.I.S.");
  for (auto* s : {rb, rt, re}) {
    add_common(s, c);
    s->add_option("--blocks", blocks_path, "block sequence JSON")->required();
    s->add_option("--js", js_list, "indices j_k")->required();
    s->add_option("--C", C_s, "C");
    s->add_option("--eps", eps_s, "eps");
  }
  rt->add_option("--tree", tree_path, "functional JSON")->required();
  rt->add_option("--b", b_list, "coefficients")->required();
  rt->add_option("--j0", j0, "collapsed weight index");
  rt->add_option("--registry", c.registry, "special sequences JSON");
  re->add_option("--j", j_est, "index j of the average");
  re->add_option("--variant", variant, "1, 2 or 3")->check(CLI::Range(1, 3));
  auto build = [&](const ParamSeq& p) {
    return build_ris(read_blocks(blocks_path), parse_index_list(js_list), parse_q(C_s), parse_q(eps_s), p, {});
  };
  rb->callback([&] {
    ParamSeq p = load_params(c.params);
    auto w = build(p);
    write_checks(c, "ris", w.checks, Json{{"scope", w.scope}});
  });
  rt->callback([&] {
    ParamSeq p = load_params(c.params);
    SigmaCoder coder(p);
    SpecialRegistry reg(coder);
    load_registry(reg, c.registry);
    auto w = build(p);
    auto out = basic_inequality_transform(kfunc_from_json(read_json(tree_path), &reg), w, parse_q_list(b_list), p,
                                          j0 ? std::optional<std::size_t>(j0) : std::nullopt);
    Json trace = Json::array();
    for (auto& t : out.trace)
      trace.push_back(Json{{"address", t.address}, {"index", t.index}, {"rule", t.rule}, {"T", t.T}, {"T1", t.T1},
                           {"T2", t.T2}, {"D", t.D}, {"head", t.head ? Json(*t.head) : Json()}});
    Json data{{"lhs", to_string(out.lhs)},
              {"rhs", to_string(out.rhs)},
              {"head", out.head ? Json(*out.head) : Json()},
              {"h1", out.h1 ? to_json(*out.h1) : Json()},
              {"g1", to_json(out.g1)},
              {"g2", to_json(out.g2)},
              {"trace", trace}};
    write_checks(c, "basic-inequality", out.checks, data);
    if (out.status() == Status::Fail) code = kExitFail;
  });
  re->callback([&] {
    ParamSeq p = load_params(c.params);
    auto w = build(p);
    EnumOptions opt;
    opt.window_hi = std::min<Coord>(8, w.xs.back().max_supp());
    auto fam = enumerate_K(p, nullptr, opt);
    write_checks(c, "ris-estimate", ris_average_estimates(w, j_est, variant, p, fam));
  });

  // seq
  auto* seq = app.add_subcommand("seq", "depended sequences and the experiments built on them");
  seq->require_subcommand(1);
  std::size_t J = 3, window = 3000;
  std::string op = "shift", delta_s = "1/3";
  auto* sb = seq->add_subcommand("build", "build a depended sequence");
  auto* sd = seq->add_subcommand("depest", "cancellation identities on K_phi");
  auto* sl = seq->add_subcommand("ld", "offset average against K_phi");
  auto* sdist = seq->add_subcommand("distance", "distance experiment");
  auto* sp = seq->add_subcommand("probe", "operator probe");
  for (auto* s : {sb, sd, sl, sdist, sp}) {
    add_common(s, c);
    s->add_option("--J", J, "odd index with n_J = length");
    s->add_option("--window", window, "coordinates offered");
  }
  for (auto* s : {sb, sd, sl, sdist}) s->get_option("--params")->default_str("toyD");
  sp->add_option("--operator", op, "shift or diagonal")->check(CLI::IsMember({"shift", "diagonal"}));
  sp->add_option("--delta", delta_s, "delta");
  auto seq_params = [&](CLI::App* s) { return load_params(s->get_option("--params")->count() ? c.params : "toyD"); };
  auto build_seq = [&](const ParamSeq& p, SpecialRegistry& reg) {
    std::vector<Coord> M;
    std::vector<FinVec> ys;
    for (Coord k = 1; k <= window; ++k) {
      M.push_back(k);
      ys.push_back(FinVec::basis(k));
    }
    return build_depended_sequence(reg, M, ys, J, "chi");
  };
  sb->callback([&] {
    ParamSeq p = seq_params(sb);
    SigmaCoder coder(p);
    SpecialRegistry reg(coder);
    auto ds = build_seq(p, reg);
    Json ev = Json::array();
    for (auto& st : ds.even)
      ev.push_back(Json{{"sigma", st.sigma}, {"c", to_string(st.c)}, {"parts", st.parts.size()},
                        {"decimals", st.decimals}, {"approx_upper", to_string(st.approx_upper)}});
    write_checks(c, "depended-sequence", verify_depended(ds, p), Json{{"even", ev}, {"phi", to_json(*ds.phi)}});
  });
  sd->callback([&] {
    ParamSeq p = seq_params(sd);
    SigmaCoder coder(p);
    SpecialRegistry reg(coder);
    auto ds = build_seq(p, reg);
    write_checks(c, "depest", check_alternating_sum(ds, reg, c.seed));
  });
  sl->callback([&] {
    ParamSeq p = seq_params(sl);
    SigmaCoder coder(p);
    SpecialRegistry reg(coder);
    auto ds = build_seq(p, reg);
    std::vector<std::vector<Coord>> free;
    for (auto& st : ds.even) free.push_back(st.free_coords);
    write_checks(c, "ld", check_offset_average(ds.phi, offset_family(*ds.phi, p, free), reg, c.seed));
  });
  sdist->callback([&] {
    ParamSeq p = seq_params(sdist);
    SigmaCoder coder(p);
    SpecialRegistry reg(coder);
    auto ds = build_seq(p, reg);
    auto rec = distance_experiment(ds, p);
    write_checks(c, "distance", rec.checks, to_json(rec)["inputs"]);
  });
  sp->callback([&] {
    ParamSeq p = seq_params(sp);
    SigmaCoder coder(p);
    SpecialRegistry reg(coder);
    std::map<Coord, FinVec> cols;
    for (Coord n = 1; n <= window; ++n)
      cols[n] = op == "shift" ? FinVec::basis(n + 1) : FinVec::basis(n, Q(Z(n % 3 + 1), Z(2)));
    auto rec = operator_probe(cols, parse_q(delta_s), J, reg, {}, op);
    write_checks(c, "probe", rec.checks, to_json(rec)["inputs"]);
  });

  // run
  auto* run = app.add_subcommand("run", "run a registered suite");
  std::string suite;
  bool strict = false;
  bool params_given = false;
  add_common(run, c);
  run->add_option("--suite", suite, "norm-oracle, uncond-transform, basic-inequality or sequences-audit")->required();
  run->add_flag("--strict", strict, "exit 3 when some check is inconclusive");
  run->callback([&] {
    RunConfig cfg;
    params_given = run->get_option("--params")->count() > 0;
    if (params_given) cfg.params_source = c.params;
    cfg.seed = c.seed;
    cfg.budget = parse_budget(c.budget);
    auto r = run_suite(cfg, suite);
    write(c, c.format == "csv" ? emit_csv(r) : emit_json(r));
    std::cerr << suite << ": " << r.count(Status::Pass) << " pass, " << r.count(Status::Fail) << " fail, "
              << r.count(Status::Inconclusive) << " inconclusive\n";
    code = exit_code(r, strict);
  });

  // emit
  auto* emit = app.add_subcommand("emit", "re-emit a JSON report as JSON or CSV");
  std::string in_path;
  add_common(emit, c);
  emit->add_option("--in", in_path, "report JSON")->required();
  emit->callback([&] {
    auto r = report_from_json(read_json(in_path));
    write(c, c.format == "csv" ? emit_csv(r) : emit_json(r));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc ? kExitUsage : 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const JsonFormatError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SequenceWindowError& e) {
    std::cerr << "window too small: " << e.what() << "\n";
    return kExitInconclusive;
  } catch (const ParamError& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
  return code;
}
