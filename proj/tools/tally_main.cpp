#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tally/tally.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;
constexpr int kExitGuard = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

uint64_t default_guard() {
  if (const char* env = std::getenv("TALLY_GUARD")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return v;
    std::cerr << "warning: ignoring unparsable TALLY_GUARD='" << env << "'\n";
  }
  return tally::kDefaultGuard;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

tally::KnowledgeBase load_kb(const std::string& path) {
  tally::KbParse parse = tally::parse_kb(read_file(path), path);
  for (const tally::Diagnostic& d : parse.diagnostics) {
    std::cerr << d.to_string() << "\n";
  }
  if (!parse.ok()) throw UsageError("'" + path + "' did not parse");
  return std::move(parse.kb);
}

tally::FormulaPtr parse_query(const std::string& text) {
  tally::SentenceParse parse = tally::parse_sentence(text, "<query>");
  for (const tally::Diagnostic& d : parse.diagnostics) {
    std::cerr << d.to_string() << "\n";
  }
  if (!parse.ok() || !parse.sentence) throw UsageError("query did not parse");
  return parse.sentence;
}

tally::Rational parse_rational(const std::string& text, const std::string& what) {
  std::optional<tally::Rational> v = tally::parse_numeral(text);
  if (!v) throw UsageError(what + " must be a numeral like 3/5 or 0.6");
  return *v;
}

struct CommonFlags {
  std::string kb_path;
  uint32_t min_size = 2;
  uint32_t max_size = 6;
  std::string mode = "auto";
  unsigned threads = 0;
  uint64_t guard = default_guard();
  std::string format;

  tally::SizeRange range() const { return {min_size, max_size}; }
  tally::CountOptions count() const { return {guard, threads}; }
  tally::SupportMode support_mode() const {
    if (mode == "auto") return tally::SupportMode::Auto;
    if (mode == "enumerate") return tally::SupportMode::Enumerate;
    if (mode == "resolve") return tally::SupportMode::Resolve;
    throw UsageError("unknown mode '" + mode + "'");
  }
};

void add_range_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--min-size", f.min_size, "Smallest domain size (default 2)");
  cmd->add_option("--max-size", f.max_size, "Largest domain size (default 6)");
}

void add_engine_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--threads", f.threads, "Worker cap; 0 = hardware default");
  cmd->add_option("--guard", f.guard,
                  "Work cap per counting call (default 2^24 or TALLY_GUARD)");
}

void emit(const tally::Json& j) { std::cout << j.dump(2) << "\n"; }

std::string signature_line(const tally::KnowledgeBase& kb,
                           const tally::Signature& sig) {
  std::string out = std::to_string(kb.size()) + " sentence";
  if (kb.size() != 1) out += "s";
  auto join_symbols = [](const std::vector<tally::SymbolInfo>& symbols) {
    std::string s;
    for (const tally::SymbolInfo& p : symbols) {
      if (!s.empty()) s += ", ";
      s += p.name + "/" + std::to_string(p.arity);
    }
    return s;
  };
  if (!sig.predicates().empty()) out += "; predicates " + join_symbols(sig.predicates());
  if (!sig.constants().empty()) {
    std::string s;
    for (const std::string& c : sig.constants()) {
      if (!s.empty()) s += ", ";
      s += c;
    }
    out += "; constants " + s;
  }
  if (!sig.functions().empty()) out += "; functions " + join_symbols(sig.functions());
  return out;
}

int cmd_check(const CommonFlags& f) {
  tally::KnowledgeBase kb = load_kb(f.kb_path);
  tally::Signature sig = tally::extract_signature(kb);
  if (f.format == "json") {
    emit(tally::signature_summary(sig, kb.size()));
  } else {
    std::cout << signature_line(kb, sig) << "\n";
  }
  return kExitOk;
}

int cmd_models(const CommonFlags& f, uint32_t size, const std::string& query_text,
               bool count_only) {
  tally::KnowledgeBase kb = load_kb(f.kb_path);
  tally::FormulaPtr query;
  if (!query_text.empty()) query = parse_query(query_text);

  if (count_only) {
    emit(tally::to_json(tally::count_models(kb, query, size, f.count())));
    return kExitOk;
  }

  std::vector<tally::FormulaPtr> extra;
  if (query) extra.push_back(query);
  auto sig = std::make_shared<const tally::Signature>(
      tally::extract_signature(kb, extra));
  tally::enumerate_models(
      sig, size,
      [&](const tally::FiniteModel& m, uint64_t) {
        for (const tally::FormulaPtr& s : kb.sentences) {
          if (!tally::holds(m, s)) return;
        }
        if (query && !tally::holds(m, query)) return;
        std::cout << tally::dump_model(m).dump() << "\n";
      },
      f.guard);
  return kExitOk;
}

void print_verdict_table(const tally::SupportVerdict& v) {
  std::cout << "status: " << tally::to_text(v.status) << "\n";
  if (v.interval) std::cout << "interval: " << tally::to_text(*v.interval) << "\n";
  std::cout << "path: " << tally::to_text(v.path) << "\n";
  for (const auto& [n, fraction] : v.per_size) {
    std::cout << "  size " << n << ": "
              << (fraction ? tally::to_text(*fraction) : "no premise models")
              << "\n";
  }
  for (const tally::SubsetVerdict& s : v.breakdown) {
    std::cout << "  subset {";
    for (size_t i = 0; i < s.sentence_ids.size(); ++i) {
      if (i) std::cout << ", ";
      std::cout << s.sentence_ids[i];
    }
    std::cout << "}: " << tally::to_text(s.interval) << "\n";
  }
}

int cmd_support(const CommonFlags& f, const std::string& query_text) {
  tally::KnowledgeBase kb = load_kb(f.kb_path);
  tally::FormulaPtr query = parse_query(query_text);
  tally::SupportOptions opts{f.range(), f.support_mode(), f.count()};
  tally::SupportVerdict v = tally::support(kb, query, opts);
  if (f.format == "table") {
    print_verdict_table(v);
  } else {
    emit(tally::to_json(v));
  }
  return v.status == tally::SupportStatus::Defined ? kExitOk : kExitDomain;
}

int cmd_accept(const CommonFlags& f, const std::string& candidates_path,
               const std::string& delta_text) {
  tally::KnowledgeBase kb = load_kb(f.kb_path);
  tally::KnowledgeBase candidates_kb = load_kb(candidates_path);
  tally::AcceptanceConfig config{parse_rational(delta_text, "--delta"), f.range(),
                                 f.support_mode(), f.count()};
  tally::AcceptedSet set = tally::accept(kb, candidates_kb.sentences, config);
  if (f.format == "table") {
    std::cout << "accepted:\n";
    for (const tally::AcceptedEntry& e : set.accepted) {
      std::cout << "  " << tally::to_text(e.sentence) << "  "
                << tally::to_text(*e.verdict.interval) << "\n";
    }
    std::cout << "rejected:\n";
    for (const tally::RejectedEntry& e : set.rejected) {
      std::cout << "  " << tally::to_text(e.sentence) << "  (" << e.reason << ")\n";
    }
  } else {
    emit(tally::to_json(set));
  }
  return kExitOk;
}

int cmd_mcs(const CommonFlags& f) {
  tally::KnowledgeBase kb = load_kb(f.kb_path);
  std::vector<std::vector<size_t>> subsets =
      tally::maximal_consistent_subsets(kb, f.range(), f.count());
  if (f.format == "table") {
    for (const std::vector<size_t>& ids : subsets) {
      std::cout << "{";
      for (size_t i = 0; i < ids.size(); ++i) {
        if (i) std::cout << ", ";
        std::cout << ids[i];
      }
      std::cout << "}\n";
    }
  } else {
    tally::Json out;
    out["sentences"] = kb.size();
    out["maximal_consistent_subsets"] = subsets;
    emit(out);
  }
  return kExitOk;
}

void print_lottery_table(const tally::LotteryReport& r) {
  std::cout << "lottery with " << r.tickets << " tickets, delta "
            << tally::to_text(r.delta) << ", sizes " << r.range.min_size << ".."
            << r.range.max_size << "\n";
  std::cout << "description:\n";
  for (size_t i = 0; i < r.kb_sentences.size(); ++i) {
    std::cout << "  " << i << ": " << r.kb_sentences[i] << "\n";
  }
  std::cout << "premises satisfiable: " << (r.kb_satisfiable ? "yes" : "no")
            << "\n";
  std::cout << "maximal consistent subsets: " << r.consistent_subsets.size()
            << "\n";
  for (const std::vector<size_t>& ids : r.consistent_subsets) {
    std::cout << "  {";
    for (size_t i = 0; i < ids.size(); ++i) {
      if (i) std::cout << ", ";
      std::cout << ids[i];
    }
    std::cout << "}\n";
  }
  std::cout << "accepted:\n";
  for (const tally::AcceptedEntry& e : r.result.accepted) {
    std::cout << "  " << tally::to_text(e.sentence) << "  "
              << tally::to_text(*e.verdict.interval) << "\n";
  }
  std::cout << "rejected:\n";
  for (const tally::RejectedEntry& e : r.result.rejected) {
    std::cout << "  " << tally::to_text(e.sentence) << "  (" << e.reason << ")\n";
  }
  std::cout << "accepted set satisfiable: "
            << (r.accepted_set_satisfiable ? "yes" : "no") << "\n";
}

int cmd_demo_lottery(const CommonFlags& f, uint32_t tickets,
                     const std::string& delta_text) {
  tally::LotteryReport report = tally::lottery_demo(
      tickets, parse_rational(delta_text, "--delta"), f.range(), f.count());
  if (f.format.empty() || f.format == "both" || f.format == "table") {
    print_lottery_table(report);
  }
  if (f.format.empty() || f.format == "both" || f.format == "json") {
    emit(tally::to_json(report));
  }
  return kExitOk;
}

int cmd_theorems(const CommonFlags& f) {
  std::vector<tally::TheoremResult> results = tally::run_theorems(f.count());
  bool all = true;
  if (f.format == "json") {
    emit(tally::to_json(results));
    for (const tally::TheoremResult& t : results) all = all && t.passed;
  } else {
    for (const tally::TheoremResult& t : results) {
      all = all && t.passed;
      std::cout << t.id << " " << (t.passed ? "PASS" : "FAIL") << "  " << t.title
                << "\n    expected: " << t.expected
                << "\n    computed: " << t.computed << "\n";
    }
  }
  return all ? kExitOk : kExitDomain;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "tally: degree-of-support over finite models, by exact counting"};
  app.require_subcommand(1);

  CommonFlags f;

  CLI::App* check = app.add_subcommand("check", "Parse a KB and report its signature");
  check->add_option("--kb", f.kb_path, "Knowledge base file")->required();
  check->add_option("--format", f.format, "table (default) or json");

  uint32_t models_size = 2;
  std::string models_query;
  bool count_only = false;
  CLI::App* models = app.add_subcommand("models", "Dump or count models at one size");
  models->add_option("--kb", f.kb_path, "Knowledge base file")->required();
  models->add_option("--size", models_size, "Domain size")->required();
  models->add_option("--query", models_query, "Optional closed query sentence");
  models->add_flag("--count-only", count_only, "Print the census instead of dumps");
  add_engine_flags(models, f);

  std::string support_query;
  CLI::App* support = app.add_subcommand("support", "Degree of support for a query");
  support->add_option("--kb", f.kb_path, "Knowledge base file")->required();
  support->add_option("--query", support_query, "Closed query sentence")->required();
  support->add_option("--mode", f.mode, "auto (default), enumerate, or resolve");
  support->add_option("--format", f.format, "json (default) or table");
  add_range_flags(support, f);
  add_engine_flags(support, f);

  std::string candidates_path;
  std::string delta_text;
  CLI::App* accept = app.add_subcommand("accept", "Threshold acceptance over candidates");
  accept->add_option("--kb", f.kb_path, "Knowledge base file")->required();
  accept->add_option("--candidates", candidates_path, "Candidate sentences file")
      ->required();
  accept->add_option("--delta", delta_text, "Acceptance level, 0 < delta < 1")
      ->required();
  accept->add_option("--mode", f.mode, "auto (default), enumerate, or resolve");
  accept->add_option("--format", f.format, "json (default) or table");
  add_range_flags(accept, f);
  add_engine_flags(accept, f);

  CLI::App* mcs = app.add_subcommand("mcs", "List maximal consistent subsets");
  mcs->add_option("--kb", f.kb_path, "Knowledge base file")->required();
  mcs->add_option("--format", f.format, "json (default) or table");
  add_range_flags(mcs, f);
  add_engine_flags(mcs, f);

  CLI::App* demo = app.add_subcommand("demo", "Built-in demonstrations");
  demo->require_subcommand(1);
  uint32_t tickets = 3;
  std::string demo_delta = "3/5";
  CLI::App* lottery = demo->add_subcommand("lottery", "The k-ticket lottery");
  lottery->add_option("--tickets", tickets, "Number of tickets (default 3)");
  lottery->add_option("--delta", demo_delta, "Acceptance level (default 3/5)");
  lottery->add_option("--format", f.format, "both (default), table, or json");
  add_range_flags(lottery, f);
  add_engine_flags(lottery, f);

  CLI::App* theorems = app.add_subcommand("theorems", "Run the bundled fixture suite");
  theorems->add_option("--format", f.format, "table (default) or json");
  add_engine_flags(theorems, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*check) return cmd_check(f);
    if (*models) return cmd_models(f, models_size, models_query, count_only);
    if (*support) return cmd_support(f, support_query);
    if (*accept) return cmd_accept(f, candidates_path, delta_text);
    if (*mcs) return cmd_mcs(f);
    if (*lottery) return cmd_demo_lottery(f, tickets, demo_delta);
    if (*theorems) return cmd_theorems(f);
  } catch (const tally::GuardExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitGuard;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const tally::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
