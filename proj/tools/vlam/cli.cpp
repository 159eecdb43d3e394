#include "cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "vlam/deduction.hpp"
#include "vlam/error.hpp"
#include "vlam/models.hpp"
#include "vlam/theory.hpp"
#include "vlam/typecheck.hpp"

namespace vlam::cli {

using json = nlohmann::ordered_json;

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Lines without comments, numbered from 1.
std::vector<std::pair<int, std::string>> lines_of(std::string_view text) {
  std::vector<std::pair<int, std::string>> out;
  std::istringstream in{std::string(text)};
  std::string raw;
  int n = 0;
  while (std::getline(in, raw)) {
    ++n;
    if (auto h = raw.find('#'); h != std::string::npos) raw.resize(h);
    std::string line = trim(raw);
    if (!line.empty()) out.emplace_back(n, line);
  }
  return out;
}

std::optional<QuantaleSpec> declared_quantale(std::string_view text) {
  for (const auto& [n, line] : lines_of(text)) {
    if (line.rfind("quantale", 0) == 0 && line.size() > 8 && std::isspace(static_cast<unsigned char>(line[8]))) {
      return QuantaleSpec::from_name(trim(line.substr(8)));
    }
  }
  return std::nullopt;
}

void require_agreement(std::string_view text, std::optional<QuantaleSpec> flag) {
  if (!flag) return;
  auto declared = declared_quantale(text);
  if (declared && !(*declared == *flag)) {
    throw SpecMismatch("--quantale " + flag->name() + " conflicts with the declared quantale " + declared->name());
  }
}

json trace_json(const ProofTrace& t) {
  json j;
  j["rule"] = rule_name(t.rule);
  j["conclusion"] = to_string(t.conclusion);
  if (t.rule == ProofRule::Axiom) j["axiom"] = t.axiom_index;
  if (t.rewrite) {
    j["rewrite"] = fig3_name(t.rewrite->rule);
    j["position"] = t.rewrite->position;
    j["reversed"] = t.reversed;
  }
  if (!t.subst_vars.empty()) j["variables"] = t.subst_vars;
  json premises = json::array();
  for (const auto& p : t.premises) premises.push_back(trace_json(*p));
  j["premises"] = std::move(premises);
  return j;
}

struct Options {
  std::optional<std::string> quantale;
  int depth = 6;
  std::size_t steps = 10000;
  std::string format = "text";
  bool trace = false;

  std::string theory, model, file, text;
};

class Runner {
 public:
  Runner(const Options& o, std::ostream& out) : o_(o), out_(out) {
    if (o.quantale) q_ = QuantaleSpec::from_name(*o.quantale);
  }

  bool json_mode() const { return o_.format == "json"; }

  Theory theory() const {
    std::string text = read_file(o_.theory);
    require_agreement(text, q_);
    return q_ ? load_theory(text, *q_) : load_theory(text);
  }

  SearchBudget budget() const {
    SearchBudget b;
    b.max_depth = o_.depth;
    b.max_rewrite_steps = o_.steps;
    return b;
  }

  int emit(json report, int status, const std::string& text) {
    if (json_mode()) {
      report["exit"] = status;
      out_ << report.dump(2) << "\n";
    } else {
      out_ << text;
    }
    return status;
  }

  int typecheck(json& r) {
    Theory t = theory();
    r["quantale"] = t.quantale.name();
    if (o_.text.empty()) {
      r["status"] = "ok";
      r["ground_types"] = t.signature.ground_types;
      r["operations"] = t.signature.operations.size();
      r["axioms"] = t.axioms.size();
      std::ostringstream s;
      s << "ok: " << t.signature.ground_types.size() << " ground types, " << t.signature.operations.size()
        << " operations, " << t.axioms.size() << " axioms\n";
      return emit(r, Success, s.str());
    }
    ParsedJudgement j = parse_judgement(o_.text, t.parse_options());
    Derivation d = j.type ? check(t.signature, j.context, j.term, *j.type) : infer(t.signature, j.context, j.term);
    r["status"] = "ok";
    r["context"] = d.context.to_string();
    r["term"] = print_term(d.term);
    r["type"] = d.type.to_string();
    std::string text = d.type.to_string() + "\n";
    if (o_.trace) {
      r["derivation"] = derivation_to_string(d);
      text += derivation_to_string(d);
    }
    return emit(r, Success, text);
  }

  int normalize_cmd(json& r) {
    Theory t = theory();
    ParsedJudgement j = parse_judgement(o_.text, t.parse_options());
    Derivation d = j.type ? check(t.signature, j.context, j.term, *j.type) : infer(t.signature, j.context, j.term);
    NormalForm nf = normalize(d.term, o_.steps);
    r["status"] = nf.exhausted ? "exhausted" : "ok";
    r["input"] = print_term(d.term);
    r["normal_form"] = print_term(nf.term);
    r["type"] = d.type.to_string();
    r["steps"] = nf.steps.size();
    std::string text = print_term(nf.term) + "\n";
    if (o_.trace) {
      json steps = json::array();
      for (const auto& s : nf.steps) {
        steps.push_back({{"rule", fig3_name(s.rule)}, {"position", s.position}});
        std::string pos;
        for (auto p : s.position) pos += (pos.empty() ? "" : ".") + std::to_string(p);
        text += "  " + fig3_name(s.rule) + " at [" + pos + "]\n";
      }
      r["rewrites"] = std::move(steps);
    }
    if (nf.exhausted) text += "step budget exhausted after " + std::to_string(nf.steps.size()) + " steps\n";
    return emit(r, nf.exhausted ? Negative : Success, text);
  }

  int check_cmd(json& r) {
    Theory t = theory();
    Goal g = parse_goal(t, o_.text);
    if (g.kind == GoalKind::Pair) throw Error("'check' needs a labelled goal (={q}, <= or =); use 'bound' for '~'");
    Prover p(t, o_.steps);
    std::vector<VEquation> goals;
    if (g.kind == GoalKind::Classical) {
      auto [a, b] = classical_equation(t, g.context, g.lhs, g.rhs);
      goals = {a, b};
    } else {
      goals = {g.equation()};
    }
    bool proved = true;
    std::size_t nodes = 0;
    json traces = json::array();
    std::string trace_text;
    for (const auto& e : goals) {
      CheckResult res = p.check_eq(e, budget());
      nodes += res.nodes;
      if (!res.proved) {
        proved = false;
        break;
      }
      if (o_.trace) {
        traces.push_back(trace_json(*res.trace));
        trace_text += trace_to_string(*res.trace);
      }
    }
    r["status"] = proved ? "proved" : "unknown";
    r["goal"] = to_string(goals[0]);
    r["depth"] = o_.depth;
    r["nodes"] = nodes;
    if (o_.trace && proved) r["traces"] = std::move(traces);
    std::string text = proved ? "PROVED\n" : "UNKNOWN\n";
    if (o_.trace && proved) text += trace_text;
    return emit(r, proved ? Success : Negative, text);
  }

  int bound_cmd(json& r) {
    Theory t = theory();
    Goal g = parse_goal(t, o_.text);
    Prover p(t, o_.steps);
    BoundResult b = p.best_bound(g.context, g.lhs, g.rhs, budget());
    r["status"] = "ok";
    r["lhs"] = print_term(g.lhs);
    r["rhs"] = print_term(g.rhs);
    r["label"] = b.label.to_string();
    r["depth"] = o_.depth;
    r["nodes"] = b.nodes;
    r["truncated"] = b.truncated;
    if (o_.trace && b.trace) r["trace"] = trace_json(*b.trace);
    std::string text = b.label.to_string() + "\n";
    if (o_.trace && b.trace) text += trace_to_string(*b.trace);
    return emit(r, Success, text);
  }

  int model_check(json& r) {
    Theory t = theory();
    Model m = load_model(read_file(o_.model), t);
    ModelReport rep = check_model(m, t);
    r["status"] = rep.satisfied() ? "satisfied" : "unsatisfied";
    r["backend"] = backend_name(m.backend());
    r["quantale"] = m.quantale().name();
    r["checked"] = rep.checks.size();
    json failures = json::array();
    std::ostringstream s;
    for (const auto& c : rep.checks) {
      if (c.satisfied) continue;
      const VEquation& e = t.axioms[c.axiom].equation;
      failures.push_back({{"axiom", c.axiom},
                          {"equation", to_string(e)},
                          {"label", e.label.to_string()},
                          {"computed", c.computed.to_string()}});
      s << "FAIL " << to_string(e) << ": distance " << c.computed.to_string() << "\n";
    }
    r["failures"] = std::move(failures);
    r["skipped"] = rep.skipped.size();
    r["uninterpreted"] = rep.uninterpreted;
    s << (rep.satisfied() ? "satisfied" : "unsatisfied") << ": " << rep.checks.size() - rep.failures() << "/"
      << rep.checks.size() << " axioms hold";
    if (!rep.skipped.empty()) {
      s << ", " << rep.skipped.size() << " skipped (uninterpreted:";
      for (const auto& u : rep.uninterpreted) s << " " << u;
      s << ")";
    }
    s << "\n";
    return emit(r, rep.satisfied() ? Success : Negative, s.str());
  }

  int eval_cmd(json& r) {
    Theory t = theory();
    Model m = load_model(read_file(o_.model), t);
    ParsedJudgement j = parse_judgement(o_.text, t.parse_options());
    Derivation d = j.type ? check(t.signature, j.context, j.term, *j.type) : infer(t.signature, j.context, j.term);
    Morphism f = denote(m, d);
    r["status"] = "ok";
    r["backend"] = backend_name(m.backend());
    r["source"] = f.source.to_string();
    r["target"] = f.target.to_string();
    if (m.backend() == Backend::FinMet) {
      json table = json::array();
      for (const auto& p : m.carrier(f.source)) {
        table.push_back({m.point_to_string(f.source, p), m.point_to_string(f.target, f.map(p))});
      }
      r["table"] = std::move(table);
    } else {
      json rows = json::array();
      for (std::size_t i = 0; i < f.matrix->rows(); ++i) {
        json row = json::array();
        for (std::size_t c = 0; c < f.matrix->cols(); ++c) row.push_back(to_string(f.matrix->at(i, c)));
        rows.push_back(std::move(row));
      }
      r["matrix"] = std::move(rows);
    }
    return emit(r, Success, morphism_to_string(m, f));
  }

  int quotient_cmd(json& r) {
    auto c = std::make_shared<const FinVCat>(load_vcat(read_file(o_.file), q_));
    Quotient q = separated_quotient(c);
    const FinVCat& k = *q.category;
    r["status"] = "ok";
    r["quantale"] = k.spec().name();
    json classes = json::array();
    for (const auto& cls : q.classes) {
      json members = json::array();
      for (auto i : cls) members.push_back(c->carrier()[i]);
      classes.push_back(std::move(members));
    }
    r["classes"] = std::move(classes);
    r["points"] = k.carrier();
    json rows = json::array();
    std::ostringstream s;
    s << "quantale " << k.spec().name() << "\npoints";
    for (std::size_t i = 0; i < k.size(); ++i) s << (i ? ", " : " ") << k.carrier()[i];
    s << "\n";
    for (std::size_t i = 0; i < k.size(); ++i) {
      json row = json::array();
      s << k.carrier()[i] << ":";
      for (std::size_t j = 0; j < k.size(); ++j) {
        row.push_back(k.at(i, j).to_string());
        s << (j ? ", " : " ") << k.at(i, j).to_string();
      }
      s << "\n";
      rows.push_back(std::move(row));
    }
    r["distances"] = std::move(rows);
    return emit(r, Success, s.str());
  }

 private:
  const Options& o_;
  std::ostream& out_;
  std::optional<QuantaleSpec> q_;
};

}  // namespace

FinVCat load_vcat(std::string_view text, std::optional<QuantaleSpec> fallback) {
  require_agreement(text, fallback);
  QuantaleSpec spec = fallback.value_or(QuantaleSpec::lawvere());
  std::vector<std::string> points;
  std::map<std::string, std::vector<QuantaleValue>> rows;
  auto fail = [](int n, const std::string& msg) -> void { throw Error("line " + std::to_string(n) + ": " + msg); };
  for (const auto& [n, line] : lines_of(text)) {
    try {
      if (line.rfind("quantale", 0) == 0) {
        spec = QuantaleSpec::from_name(trim(line.substr(8)));
      } else if (line.rfind("points", 0) == 0) {
        points = split(line.substr(6), ',');
      } else {
        auto colon = line.find(':');
        if (colon == std::string::npos) fail(n, "expected 'POINT: d1, d2, ...'");
        std::string name = trim(line.substr(0, colon));
        if (std::find(points.begin(), points.end(), name) == points.end()) fail(n, "unknown point '" + name + "'");
        std::vector<QuantaleValue> row;
        for (const auto& cell : split(line.substr(colon + 1), ',')) row.push_back(spec.parse(cell));
        if (row.size() != points.size()) fail(n, "row '" + name + "' needs " + std::to_string(points.size()) + " entries");
        rows[name] = std::move(row);
      }
    } catch (const Error& e) {
      std::string what = e.what();
      if (what.rfind("line ", 0) == 0) throw;
      throw Error("line " + std::to_string(n) + ": " + what);
    }
  }
  if (points.empty()) throw Error("V-category file has no 'points' line");
  std::vector<QuantaleValue> table;
  for (const auto& p : points) {
    auto it = rows.find(p);
    if (it == rows.end()) throw Error("missing row for point '" + p + "'");
    table.insert(table.end(), it->second.begin(), it->second.end());
  }
  return FinVCat(spec, points, table);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Quantitative equational reasoning for the linear lambda calculus", "vlam"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--quantale", o.quantale, "Quantale for inputs without a 'quantale' line (bool, godel, metric, ultrametric)")
      ->check(CLI::IsMember({"bool", "boolean", "godel", "metric", "lawvere", "ultrametric"}));
  app.add_option("--depth", o.depth, "Proof search depth")->check(CLI::Range(0, 64));
  app.add_option("--steps", o.steps, "Rewrite step budget");
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json"}));
  app.add_flag("--trace", o.trace, "Print proof traces, derivations or rewrite steps");

  auto* typecheck = app.add_subcommand("typecheck", "Validate a theory, or type a judgement in it");
  typecheck->add_option("theory", o.theory, "Theory file")->required();
  typecheck->add_option("judgement", o.text, "\"ctx |- term [: type]\"");
  auto* normalize = app.add_subcommand("normalize", "Normal form of a judgement's term");
  normalize->add_option("theory", o.theory, "Theory file")->required();
  normalize->add_option("judgement", o.text, "\"ctx |- term\"")->required();
  auto* check = app.add_subcommand("check", "Search for a proof of a V-equation");
  check->add_option("theory", o.theory, "Theory file")->required();
  check->add_option("goal", o.text, "\"ctx |- v ={q} w\", \"ctx |- v <= w\" or \"ctx |- v = w\"")->required();
  auto* bound = app.add_subcommand("bound", "Best label found for a pair of terms");
  bound->add_option("theory", o.theory, "Theory file")->required();
  bound->add_option("pair", o.text, "\"ctx |- v ~ w\"")->required();
  auto* model_check = app.add_subcommand("model-check", "Check a model against a theory's axioms");
  model_check->add_option("theory", o.theory, "Theory file")->required();
  model_check->add_option("model", o.model, "Model file")->required();
  auto* eval = app.add_subcommand("eval", "Print the denotation of a judgement");
  eval->add_option("theory", o.theory, "Theory file")->required();
  eval->add_option("model", o.model, "Model file")->required();
  eval->add_option("judgement", o.text, "\"ctx |- term\"")->required();
  auto* quotient = app.add_subcommand("quotient", "Separated quotient of a finite V-category");
  quotient->add_option("file", o.file, "V-category file")->required();

  std::string command;
  bool json_out = false;
  for (const auto& a : args) json_out = json_out || a == "--format=json";
  for (std::size_t i = 0; i + 1 < args.size(); ++i) json_out = json_out || (args[i] == "--format" && args[i + 1] == "json");

  auto fail = [&](const std::string& msg) {
    err << "vlam: " << msg << "\n";
    if (json_out) {
      json r;
      r["command"] = command;
      r["status"] = "error";
      r["error"] = msg;
      r["exit"] = static_cast<int>(InputError);
      out << r.dump(2) << "\n";
    }
    return static_cast<int>(InputError);
  };

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return Success;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return Success;
  } catch (const CLI::ParseError& e) {
    return fail(e.what());
  }

  for (auto* sub : app.get_subcommands()) command = sub->get_name();
  try {
    Runner runner(o, out);
    json r;
    r["command"] = command;
    if (command == "typecheck") return runner.typecheck(r);
    if (command == "normalize") return runner.normalize_cmd(r);
    if (command == "check") return runner.check_cmd(r);
    if (command == "bound") return runner.bound_cmd(r);
    if (command == "model-check") return runner.model_check(r);
    if (command == "eval") return runner.eval_cmd(r);
    if (command == "quotient") return runner.quotient_cmd(r);
    return fail("unknown command");
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}

}  // namespace vlam::cli
