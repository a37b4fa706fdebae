#include "xius/report.hpp"

#include <fstream>
#include <sstream>

namespace xius {

namespace {

template <class T>
T field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw JsonFormatError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw JsonFormatError(std::string("field '") + key + "': " + e.what());
  }
}

Q q_field(const Json& j) {
  if (j.is_string()) return parse_q(j.get<std::string>());
  if (j.is_number_integer()) return Q(j.get<std::int64_t>());
  throw JsonFormatError("rational expected as string or integer");
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string rule_kind(SeqRule::Kind k) { return k == SeqRule::Kind::Power ? "power" : "linear"; }

Json rule_json(const SeqRule& r) {
  return Json{{"kind", rule_kind(r.kind)}, {"base", r.base}, {"a", r.a}, {"b", r.b}};
}

SeqRule rule_from(const Json& j) {
  SeqRule r;
  auto k = field<std::string>(j, "kind");
  if (k == "power") r.kind = SeqRule::Kind::Power;
  else if (k == "linear") r.kind = SeqRule::Kind::Linear;
  else throw JsonFormatError("unknown rule kind '" + k + "'");
  r.base = j.value("base", std::int64_t(2));
  r.a = field<std::int64_t>(j, "a");
  r.b = field<std::int64_t>(j, "b");
  return r;
}

}  // namespace

bool ReportSection::operator==(const ReportSection& o) const {
  if (name != o.name || checks.size() != o.checks.size()) return false;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const Check &a = checks[i], &b = o.checks[i];
    if (a.claim != b.claim || a.anchor != b.anchor || a.status != b.status || a.values != b.values ||
        a.slack != b.slack || a.note != b.note)
      return false;
  }
  return true;
}

Status Report::status() const {
  std::vector<Check> all;
  for (auto& s : sections) all.insert(all.end(), s.checks.begin(), s.checks.end());
  return combine(all);
}

std::size_t Report::count(Status st) const {
  std::size_t n = 0;
  for (auto& s : sections)
    for (auto& c : s.checks) n += c.status == st;
  return n;
}

bool Report::operator==(const Report& o) const {
  return version == o.version && schema == o.schema && config == o.config && sections == o.sections;
}

int exit_code(const Report& r, bool strict) {
  if (r.count(Status::Fail)) return kExitFail;
  if (strict && r.count(Status::Inconclusive)) return kExitInconclusive;
  return 0;
}

Json to_json(const Check& c) {
  Json vals = Json::array();
  for (auto& [k, v] : c.values) vals.push_back(Json{{"name", k}, {"value", v}});
  return Json{{"anchor", c.anchor}, {"claim", c.claim}, {"status", status_name(c.status)},
              {"values", vals},     {"slack", c.slack}, {"note", c.note}};
}

Check check_from_json(const Json& j) {
  Check c;
  c.anchor = field<std::string>(j, "anchor");
  c.claim = field<std::string>(j, "claim");
  c.status = parse_status(field<std::string>(j, "status"));
  for (auto& v : field<Json>(j, "values")) c.values.emplace_back(field<std::string>(v, "name"), field<std::string>(v, "value"));
  c.slack = j.value("slack", "");
  c.note = j.value("note", "");
  return c;
}

Json to_json(const Report& r) {
  Json cfg = Json::object();
  for (auto& [k, v] : r.config) cfg[k] = v;
  Json secs = Json::array();
  for (auto& s : r.sections) {
    Json cs = Json::array();
    for (auto& c : s.checks) cs.push_back(to_json(c));
    secs.push_back(Json{{"name", s.name}, {"checks", cs}});
  }
  return Json{{"tool", "xius"},
              {"version", r.version},
              {"schema", r.schema},
              {"config", cfg},
              {"status", status_name(r.status())},
              {"counts",
               {{"pass", r.count(Status::Pass)},
                {"fail", r.count(Status::Fail)},
                {"inconclusive", r.count(Status::Inconclusive)}}},
              {"sections", secs}};
}

Report report_from_json(const Json& j) {
  Report r;
  r.version = field<std::string>(j, "version");
  r.schema = field<int>(j, "schema");
  if (r.schema != kSchemaVersion) throw JsonFormatError("unsupported schema " + std::to_string(r.schema));
  Json cfg = field<Json>(j, "config");
  for (auto& [k, v] : cfg.items()) r.config.emplace_back(k, v.get<std::string>());
  for (auto& s : field<Json>(j, "sections")) {
    ReportSection sec;
    sec.name = field<std::string>(s, "name");
    for (auto& c : field<Json>(s, "checks")) sec.checks.push_back(check_from_json(c));
    r.sections.push_back(std::move(sec));
  }
  return r;
}

std::string emit_json(const Report& r) { return to_json(r).dump(2) + "\n"; }

std::string emit_csv(const Report& r) {
  std::ostringstream os;
  os << "section,anchor,status,name,exact,decimal,decimal_flag,slack,note\n";
  for (auto& s : r.sections)
    for (auto& c : s.checks) {
      auto row = [&](const std::string& name, const std::string& exact) {
        std::string dec, flag;
        if (!exact.empty()) {
          try {
            Q q = parse_q(exact);
            dec = to_decimal(q, 12);
            flag = parse_q(dec) == q ? "exact" : "approx";
          } catch (const std::exception&) {
            flag = "text";
          }
        }
        os << csv_field(s.name) << ',' << csv_field(c.anchor) << ',' << status_name(c.status) << ','
           << csv_field(name) << ',' << csv_field(exact) << ',' << dec << ',' << flag << ',' << csv_field(c.slack)
           << ',' << csv_field(c.note) << '\n';
      };
      if (c.values.empty()) row("", "");
      for (auto& [k, v] : c.values) row(k, v);
    }
  return os.str();
}

Json to_json(const FinVec& x) {
  Json a = Json::array();
  for (auto& [c, v] : x) a.push_back(Json::array({c, to_string(v)}));
  return a;
}

FinVec finvec_from_json(const Json& j) {
  if (j.is_string()) return parse_finvec(j.get<std::string>());
  if (!j.is_array()) throw JsonFormatError("vector expected as array of [coord, value]");
  std::vector<FinVec::Entry> es;
  for (auto& e : j) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_unsigned()) throw JsonFormatError("bad vector entry");
    es.emplace_back(e[0].get<Coord>(), q_field(e[1]));
  }
  return FinVec::from_entries(std::move(es));
}

FinVec parse_finvec(const std::string& s) {
  std::vector<FinVec::Entry> es;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    auto colon = item.find(':');
    if (colon == std::string::npos) throw JsonFormatError("entry '" + item + "' is not coord:value");
    Coord c = 0;
    try {
      c = std::stoull(item.substr(0, colon));
    } catch (const std::exception&) {
      throw JsonFormatError("bad coordinate in '" + item + "'");
    }
    if (c == 0) throw JsonFormatError("coordinates start at 1");
    es.emplace_back(c, parse_q(item.substr(colon + 1)));
  }
  return FinVec::from_entries(std::move(es));
}

Json to_json(const WFunctional& f) {
  if (f.is_leaf()) return Json{{"kind", "leaf"}, {"coord", f.coord()}, {"sign", f.sign()}};
  Json kids = Json::array();
  for (auto& c : f.children()) kids.push_back(to_json(c));
  return Json{{"kind", "weighted"}, {"j", f.j()}, {"children", kids}};
}

WFunctional wfunc_from_json(const Json& j) {
  auto kind = field<std::string>(j, "kind");
  if (kind == "leaf") return WFunctional::leaf(field<Coord>(j, "coord"), j.value("sign", 1));
  if (kind != "weighted") throw JsonFormatError("unknown W node kind '" + kind + "'");
  std::vector<WFunctional> kids;
  for (auto& c : field<Json>(j, "children")) kids.push_back(wfunc_from_json(c));
  return WFunctional::weighted(field<std::size_t>(j, "j"), std::move(kids));
}

Json to_json(const KFunctional& f) {
  if (f.is_zero()) return Json{{"kind", "zero"}};
  switch (f.kind()) {
    case KFunctional::Kind::Leaf:
      return Json{{"kind", "leaf"}, {"coord", f.coord()}, {"sign", f.sign()}};
    case KFunctional::Kind::Even: {
      Json kids = Json::array();
      for (auto& c : f.children()) kids.push_back(to_json(c));
      return Json{{"kind", "even"}, {"J", f.index()}, {"children", kids}};
    }
    case KFunctional::Kind::Special: {
      Json repl = Json::array(), lam = Json::array();
      for (auto& r : f.replacements()) repl.push_back(to_json(r));
      for (auto& l : f.lambdas()) lam.push_back(to_string(l));
      Json E = f.E() == Interval::all() ? Json("all") : Json::array({f.E().lo, f.E().hi});
      return Json{{"kind", "special"}, {"J", f.index()},      {"sequence", f.phi()->id}, {"E", E},
                  {"sign", f.sign()},  {"replacements", repl}, {"lambdas", lam}};
    }
  }
  return Json{{"kind", "zero"}};
}

KFunctional kfunc_from_json(const Json& j, const SpecialRegistry* registry) {
  auto kind = field<std::string>(j, "kind");
  if (kind == "zero") return KFunctional::zero();
  if (kind == "leaf") return KFunctional::leaf(field<Coord>(j, "coord"), j.value("sign", 1));
  if (kind == "even") {
    std::vector<KFunctional> kids;
    for (auto& c : field<Json>(j, "children")) kids.push_back(kfunc_from_json(c, registry));
    return KFunctional::even(field<std::size_t>(j, "J"), std::move(kids));
  }
  if (kind != "special") throw JsonFormatError("unknown K node kind '" + kind + "'");
  auto id = field<std::string>(j, "sequence");
  auto phi = registry ? registry->find(id) : nullptr;
  if (!phi) throw JsonFormatError("special sequence '" + id + "' is not registered");
  Interval E = Interval::all();
  Json e = field<Json>(j, "E");
  if (e.is_array() && e.size() == 2) E = Interval::of(e[0].get<Coord>(), e[1].get<Coord>());
  else if (!(e.is_string() && e.get<std::string>() == "all")) throw JsonFormatError("E must be \"all\" or [lo, hi]");
  std::vector<KFunctional> repl;
  for (auto& r : field<Json>(j, "replacements")) repl.push_back(kfunc_from_json(r, registry));
  std::vector<Q> lam;
  for (auto& l : field<Json>(j, "lambdas")) lam.push_back(q_field(l));
  return KFunctional::special(field<std::size_t>(j, "J"), phi, E, j.value("sign", 1), std::move(repl), std::move(lam));
}

Json to_json(const NormCertificate& c) { return Json{{"value", to_string(c.value)}, {"witness", to_json(c.witness)}}; }

Json to_json(const SpecialSequence& s) {
  Json xs = Json::array(), fs = Json::array(), sig = Json::array();
  for (auto& x : s.x) xs.push_back(to_json(x));
  for (auto& f : s.f) fs.push_back(to_json(f));
  for (auto v : s.sigma) sig.push_back(v);
  return Json{{"id", s.id}, {"j1", s.j1}, {"J", s.J}, {"sigma", sig}, {"x", xs}, {"f", fs}};
}

SpecialSequence special_from_json(const Json& j, const SpecialRegistry* registry) {
  SpecialSequence s;
  s.id = field<std::string>(j, "id");
  s.j1 = field<std::size_t>(j, "j1");
  for (auto& x : field<Json>(j, "x")) s.x.push_back(finvec_from_json(x));
  for (auto& f : field<Json>(j, "f")) s.f.push_back(kfunc_from_json(f, registry));
  return s;
}

Json to_json(const ParamSeq& p) {
  Json j{{"regime", regime_name(p.regime())}, {"label", p.label()}, {"length", p.length()}};
  if (p.regime() == Regime::PaperExact) return j;
  Json m = Json::array(), n = Json::array();
  for (auto& v : p.m_prefix()) m.push_back(to_string(v));
  for (auto& v : p.n_prefix()) n.push_back(to_string(v));
  j["m"] = m;
  j["n"] = n;
  if (p.m_rule()) j["m_rule"] = rule_json(*p.m_rule());
  if (p.n_rule()) j["n_rule"] = rule_json(*p.n_rule());
  return j;
}

ParamSeq params_from_json(const Json& j) {
  Regime r = parse_regime(j.value("regime", "Toy"));
  if (r == Regime::PaperExact) return paper_exact(field<std::size_t>(j, "length"));
  ParamSpec s;
  s.regime = r;
  s.label = j.value("label", "toy");
  if (j.contains("m"))
    for (auto& v : j.at("m")) s.m.push_back(v.is_string() ? parse_z(v.get<std::string>()) : Z(v.get<std::int64_t>()));
  if (j.contains("n"))
    for (auto& v : j.at("n")) s.n.push_back(v.is_string() ? parse_z(v.get<std::string>()) : Z(v.get<std::int64_t>()));
  if (j.contains("m_rule")) s.m_rule = rule_from(j.at("m_rule"));
  if (j.contains("n_rule")) s.n_rule = rule_from(j.at("n_rule"));
  s.length = j.value("length", std::max(s.m.size(), s.n.size()));
  return make_param_seq(s);
}

ParamSeq load_params(const std::string& name_or_path) {
  for (auto& n : named_param_list())
    if (n == name_or_path) return named_params(n);
  std::ifstream in(name_or_path);
  if (!in) throw JsonFormatError("no parameter set or file named '" + name_or_path + "'");
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw JsonFormatError(name_or_path + ": " + e.what());
  }
  return params_from_json(j);
}

Json to_json(const ExperimentRecord& r) {
  Json in = Json::object();
  for (auto& [k, v] : r.inputs) in[k] = v;
  Json cs = Json::array();
  for (auto& c : r.checks) cs.push_back(to_json(c));
  return Json{{"id", r.id}, {"status", status_name(r.status())}, {"inputs", in}, {"checks", cs}};
}

}  // namespace xius
