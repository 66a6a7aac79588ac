// Command-line driver for the checkers.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "mpsa/mpsa.hpp"

namespace {

using namespace mpsa;

enum Exit : int { kHolds = 0, kFails = 1, kInconclusive = 2, kUsage = 64, kBadInput = 65, kNoInput = 66 };

struct NoInput {
  std::string path;
};

// A file if one exists at `arg`, otherwise the text itself.
std::string input(const std::string& arg) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(arg, ec)) return arg;
  std::ifstream f(arg);
  if (!f) throw NoInput{arg};
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string file(const std::string& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) throw NoInput{path};
  return input(path);
}

int exit_for(VerdictKind k) {
  switch (k) {
    case VerdictKind::Holds: return kHolds;
    case VerdictKind::Fails: return kFails;
    case VerdictKind::Inconclusive: return kInconclusive;
  }
  return kFails;
}

// Fails dominates; then inconclusive.
VerdictKind worst(VerdictKind a, VerdictKind b) {
  if (a == VerdictKind::Fails || b == VerdictKind::Fails) return VerdictKind::Fails;
  if (a == VerdictKind::Inconclusive || b == VerdictKind::Inconclusive) return VerdictKind::Inconclusive;
  return VerdictKind::Holds;
}

void print_verdict(const Verdict& v) {
  std::cout << to_string(v.kind) << "\n";
  if (!v.holds()) {
    if (!v.witness.empty()) std::cout << "witness:\n";
    for (const auto& a : v.witness) std::cout << "  " << print_trace_action(a) << "\n";
    std::cout << "reason: " << v.reason << "\n";
  }
  std::cout << "obligations checked: " << v.obligations << "\n";
}

Json typing_json(const TypingResult& r) {
  Json j = {{"accepted", r.ok}};
  if (!r.ok) j["reason"] = r.reason;
  j["derivation"] = r.derivation;
  return j;
}

struct Options {
  bool json = false;
  int jobs = 1;
};

// -- subcommands --------------------------------------------------------------

int run_parse(const Options& o, const std::string& src, const std::string& kind) {
  auto emit = [&](const char* k, const std::string& text, Json j) {
    if (o.json) {
      std::cout << Json{{"kind", k}, {"canonical", text}, {"ast", std::move(j)}}.dump(2) << "\n";
    } else {
      std::cout << text << "\n";
    }
    return kHolds;
  };
  auto as_assertion = [&] { auto l = parse_assertion(src); return emit("assertion", print_assertion(l), to_json(l)); };
  auto as_process = [&] { auto p = parse_process(src); return emit("process", print_process(p), to_json(p)); };
  auto as_formula = [&] { auto f = parse_formula(src); return emit("formula", print_formula(f), to_json(f)); };
  if (kind == "assertion") return as_assertion();
  if (kind == "process") return as_process();
  if (kind == "formula") return as_formula();
  try {
    return as_assertion();
  } catch (const Error&) {
  }
  try {
    return as_process();
  } catch (const Error&) {
  }
  return as_formula();
}

int run_embed(const Options& o, const std::string& at_src, const std::string& path) {
  SessionRole at = parse_session_role(at_src);
  Formula f = embed(parse_assertion(file(path)), at);
  if (o.json) {
    std::cout << Json{{"formula", print_formula(f)}, {"ast", to_json(f)}}.dump(2) << "\n";
  } else {
    std::cout << print_formula(f) << "\n";
  }
  return kHolds;
}

int run_shuffle(const Options& o, const std::string& a, const std::string& b, bool literal, bool show_chains) {
  ShuffleOptions so;
  so.literal = literal;
  Formula f = shuffle(parse_formula(input(a)), parse_formula(input(b)), so);
  auto cs = chains(f);
  if (o.json) {
    Json j = {{"formula", print_formula(f)}, {"chains", Json::array()}};
    for (const auto& c : cs) j["chains"].push_back(print_formula(c));
    std::cout << j.dump(2) << "\n";
    return kHolds;
  }
  std::cout << print_formula(f) << "\n";
  if (show_chains) {
    for (const auto& c : cs) std::cout << "  " << print_formula(c) << "\n";
  }
  return kHolds;
}

int run_envfml(const Options& o, const std::string& path) {
  Bundle b = parse_bundle(file(path));
  Formula f = env_formula(b.delta, b.gamma);
  if (o.json) {
    std::cout << Json{{"formula", print_formula(f)}, {"ast", to_json(f)}}.dump(2) << "\n";
  } else {
    std::cout << print_formula(f) << "\n";
  }
  return kHolds;
}

int run_check(const Options& o, const std::string& p, const std::string& s, const std::string& f, int mu_depth,
              int sort_bound) {
  SatOptions so;
  so.mu_depth = mu_depth;
  so.sort_bound = sort_bound;
  Verdict v = sat(Config{parse_process(input(p)), parse_state(input(s))}, parse_formula(input(f)), so);
  if (o.json) {
    std::cout << to_json(v).dump(2) << "\n";
  } else {
    print_verdict(v);
  }
  return exit_for(v.kind);
}

int run_judge(const Options& o, const std::string& spec, const std::string& p_src, int mu_depth, int sort_bound) {
  Bundle b = parse_bundle(file(spec));
  Process p = parse_process(input(p_src), b.parse_options());
  SatOptions so;
  so.mu_depth = mu_depth;
  so.sort_bound = sort_bound;

  std::vector<VirtualState> states = b.sigma ? std::vector<VirtualState>{*b.sigma} : b.states();
  std::vector<Verdict> verdicts(states.size());
  int jobs = std::max(1, std::min<int>(o.jobs, static_cast<int>(states.size())));
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(jobs);
  for (int w = 0; w < jobs; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = static_cast<std::size_t>(w); i < states.size(); i += static_cast<std::size_t>(jobs)) {
          verdicts[i] = check_judgement(b.precondition, b.gamma, b.delta, p, states[i], so);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  VerdictKind semantic = VerdictKind::Holds;
  for (const auto& v : verdicts) semantic = worst(semantic, v.kind);
  // The state reported is the first one with the overall verdict.
  std::size_t first_bad = states.size();
  for (std::size_t i = 0; i < states.size() && semantic != VerdictKind::Holds; ++i) {
    if (verdicts[i].kind == semantic) {
      first_bad = i;
      break;
    }
  }

  ProveOptions po;
  po.sort_bound = sort_bound;
  std::map<std::string, Domain> domains = b.state;
  TypingResult proved = prove_asserted(b.precondition, b.gamma, b.delta, p, domains, po);
  TypingResult typed = typecheck_unasserted(p, erase_env(b.delta), b.gamma);

  VerdictKind overall = worst(semantic, proved.ok && typed.ok ? VerdictKind::Holds : VerdictKind::Fails);
  if (o.json) {
    Json j;
    j["satisfaction"] = {{"verdict", to_string(semantic)}, {"states_checked", states.size()}};
    if (first_bad < states.size()) {
      j["satisfaction"]["state"] = print_state(states[first_bad]);
      j["satisfaction"]["detail"] = to_json(verdicts[first_bad]);
    }
    j["asserted"] = typing_json(proved);
    j["unasserted"] = typing_json(typed);
    j["verdict"] = to_string(overall);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "satisfaction: " << to_string(semantic) << " (" << states.size() << " states)\n";
    if (first_bad < states.size()) {
      std::cout << "  at {" << print_state(states[first_bad]) << "}\n";
      for (const auto& a : verdicts[first_bad].witness) std::cout << "  " << print_trace_action(a) << "\n";
      std::cout << "  reason: " << verdicts[first_bad].reason << "\n";
    }
    std::cout << "asserted typing: " << (proved.ok ? "accepted" : "rejected: " + proved.reason) << "\n";
    std::cout << "unasserted typing: " << (typed.ok ? "accepted" : "rejected: " + typed.reason) << "\n";
  }
  return exit_for(overall);
}

int run_erase(const Options& o, const std::string& path) {
  UType t = erase(parse_assertion(file(path)));
  if (o.json) {
    std::cout << Json{{"type", print_utype(t)}}.dump(2) << "\n";
  } else {
    std::cout << print_utype(t) << "\n";
  }
  return kHolds;
}

int run_rec_embed(const Options& o, const std::string& spec, const std::string& dump_dir) {
  Bundle b = parse_bundle(file(spec));
  InterleaveReport r = rec_interleave(b.delta_embedded());
  if (!dump_dir.empty()) {
    std::filesystem::create_directories(dump_dir);
    auto write = [&](const std::string& name, const PacketAutomaton& a) {
      std::ofstream(std::filesystem::path(dump_dir) / (name + ".dot")) << to_dot(a, name);
    };
    for (std::size_t i = 0; i < r.components.size(); ++i) write("component" + std::to_string(i + 1), r.components[i]);
    write("product", r.product);
    write("expanded", r.expanded);
  }
  if (o.json) {
    Json j = {{"component_states", r.component_states},
              {"product_states", r.product_states},
              {"expanded_states", r.expanded_states},
              {"formula", print_formula(r.formula)}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::string comps;
    for (int n : r.component_states) comps += (comps.empty() ? "" : ",") + std::to_string(n);
    std::cout << "states: " << comps << " -> " << r.product_states << " -> " << r.expanded_states << "\n";
    std::cout << print_formula(r.formula) << "\n";
  }
  return kHolds;
}

int run_encode_store(const Options& o, const std::string& s) {
  PiProcess p = encode_store(parse_state(input(s)));
  if (o.json) {
    std::cout << Json{{"process", print_pi(p)}}.dump(2) << "\n";
  } else {
    std::cout << print_pi(p) << "\n";
  }
  return kHolds;
}

int run_pi_check(const Options& o, const std::string& p_src, const std::string& s_src, const std::string& f_src,
                 int mu_depth, int sort_bound, int repl_depth) {
  Process p = parse_process(input(p_src));
  VirtualState s = parse_state(input(s_src));
  Formula f = parse_formula(input(f_src));
  PiOptions po;
  po.mu_depth = mu_depth;
  po.sort_bound = sort_bound;
  po.repl_depth = repl_depth;
  RoundTrip r = round_trip(p, s, f, po);
  std::set<std::string> store;
  for (const auto& [x, v] : s) store.insert(x);
  VerdictKind kind = r.agree() ? (r.direct.inconclusive() ? r.encoded.kind : r.direct.kind) : VerdictKind::Fails;
  if (o.json) {
    Json j = {{"direct", to_json(r.direct)},
              {"encoded", to_json(r.encoded)},
              {"agree", r.agree()},
              {"process", print_pi(pi::par(encode_store(s), encode_process(p)))},
              {"formula", print_formula(encode_formula(f, store))}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "process: " << print_pi(pi::par(encode_store(s), encode_process(p))) << "\n";
    std::cout << "formula: " << print_formula(encode_formula(f, store)) << "\n";
    std::cout << "direct: " << to_string(r.direct.kind) << "\n";
    std::cout << "encoded: " << to_string(r.encoded.kind) << "\n";
    std::cout << (r.agree() ? "agree" : "DISAGREE") << "\n";
  }
  return exit_for(kind);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Checkers for stateful multiparty session assertions"};
  app.require_subcommand(1);
  Options o;
  app.add_flag("--json", o.json, "Emit the report as JSON");
  app.add_option("--jobs", o.jobs, "Worker threads for independent checks")->check(CLI::PositiveNumber);

  std::string src, kind = "auto", at, path, f1, f2, proc, state, formula, dump;
  bool literal = false, show_chains = false;
  int mu_depth = SatOptions{}.mu_depth, sort_bound = kDefaultSortBound, repl_depth = PiOptions{}.repl_depth;

  auto* parse = app.add_subcommand("parse", "Echo the canonical form of an assertion, process or formula");
  parse->add_option("input", src, "File or source text")->required();
  parse->add_option("--kind", kind, "assertion, process, formula or auto")
      ->check(CLI::IsMember({"auto", "assertion", "process", "formula"}));

  auto* emb = app.add_subcommand("embed", "Formula characterising a local assertion");
  emb->add_option("--at", at, "Session and role, as s[p]")->required();
  emb->add_option("file", path, "Assertion file")->required();

  auto* shf = app.add_subcommand("shuffle", "Interleave two formulae");
  shf->add_option("left", f1, "File or formula")->required();
  shf->add_option("right", f2, "File or formula")->required();
  shf->add_flag("--literal", literal, "Keep the right operand unshuffled under the second modality");
  shf->add_flag("--chains", show_chains, "List the conjunction-free chains");

  auto* env = app.add_subcommand("envfml", "Formula of the environments of a bundle file");
  env->add_option("spec", path, "bundle file")->required();

  auto* chk = app.add_subcommand("check", "Decide P, sigma |= phi");
  chk->add_option("--process", proc, "File or process")->required();
  chk->add_option("--state", state, "File or state, as @x = 1, @y = 2")->required();
  chk->add_option("--formula", formula, "File or formula")->required();
  chk->add_option("--mu-depth", mu_depth, "Unfoldings of a fixed point along one path");
  chk->add_option("--sort-bound", sort_bound, "Size of the integer domains");

  auto* jdg = app.add_subcommand("judge", "Semantic judgement and both type systems on a bundle file");
  jdg->add_option("--spec", path, "bundle file")->required();
  jdg->add_option("--process", proc, "File or process")->required();
  jdg->add_option("--mu-depth", mu_depth, "Unfoldings of a fixed point along one path");
  jdg->add_option("--sort-bound", sort_bound, "Size of the integer domains");

  auto* ers = app.add_subcommand("erase", "Session type underlying an assertion");
  ers->add_option("file", path, "Assertion file")->required();

  auto* rec = app.add_subcommand("rec-embed", "Interleave recursive entries through automata");
  rec->add_option("spec", path, "bundle file")->required();
  rec->add_option("--dump-automata", dump, "Write every automaton as DOT into this directory");

  auto* est = app.add_subcommand("encode-store", "Store as a pi-calculus process");
  est->add_option("state", state, "File or state, as @x = 1")->required();

  auto* pic = app.add_subcommand("pi-check", "Check P, sigma |= phi directly and through the pi encoding");
  pic->add_option("--process", proc, "File or process")->required();
  pic->add_option("--state", state, "File or state")->required();
  pic->add_option("--formula", formula, "File or formula")->required();
  pic->add_option("--mu-depth", mu_depth, "Unfoldings of a fixed point along one path");
  pic->add_option("--sort-bound", sort_bound, "Size of the integer domains");
  pic->add_option("--repl-depth", repl_depth, "Replicas spawned along one path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*parse) return run_parse(o, input(src), kind);
    if (*emb) return run_embed(o, at, path);
    if (*shf) return run_shuffle(o, f1, f2, literal, show_chains);
    if (*env) return run_envfml(o, path);
    if (*chk) return run_check(o, proc, state, formula, mu_depth, sort_bound);
    if (*jdg) return run_judge(o, path, proc, mu_depth, sort_bound);
    if (*ers) return run_erase(o, path);
    if (*rec) return run_rec_embed(o, path, dump);
    if (*est) return run_encode_store(o, state);
    if (*pic) return run_pi_check(o, proc, state, formula, mu_depth, sort_bound, repl_depth);
  } catch (const NoInput& e) {
    std::cerr << "error: cannot read `" << e.path << "`\n";
    return kNoInput;
  } catch (const Error& e) {
    if (o.json) {
      std::string msg = e.what();
      std::cout << Json{{"error", e.code()}, {"message", msg.substr(e.code().size() + 2)}}.dump(2) << "\n";
    } else {
      std::cerr << "error: " << e.what() << "\n";
    }
    return kBadInput;
  }
  return kUsage;
}
