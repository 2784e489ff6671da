#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "genoogle/databank.hpp"
#include "genoogle/errors.hpp"
#include "genoogle/xml.hpp"

namespace genoogle::cli {

namespace {

struct ParsedCommand {
  std::string name;
  std::vector<std::string> positionals;
  std::optional<std::uint32_t> max_results, min_hsp_length, max_entry_distance, query_splits, workers;
  std::optional<std::int32_t> dropoff;
  bool keep_going = false;
};

// Throws CLI::ParseError subclasses on malformed commands.
ParsedCommand parse_command(const std::vector<std::string>& args) {
  ParsedCommand cmd;
  CLI::App app("genoogle command");
  app.require_subcommand(1, 1);
  app.set_help_flag();

  auto* format = app.add_subcommand("format", "Format and index a configured bank");
  format->add_option("bank", cmd.positionals, "bank name")->required()->expected(1);

  auto* search = app.add_subcommand("search", "Search a query file against a bank");
  search->add_option("args", cmd.positionals, "<bank> <query.fasta> <out.xml>")->required()->expected(3);
  search->add_option("--max-results", cmd.max_results);
  search->add_option("--min-hsp-length", cmd.min_hsp_length);
  search->add_option("--max-entry-distance", cmd.max_entry_distance);
  search->add_option("--dropoff", cmd.dropoff);
  search->add_option("--query-splits", cmd.query_splits);
  search->add_option("--workers", cmd.workers);

  app.add_subcommand("list", "List configured banks");
  app.add_subcommand("parameters", "Show parameter values");
  auto* set = app.add_subcommand("set", "Set a parameter");
  set->add_option("args", cmd.positionals, "<key> <value>")->required()->expected(2);
  app.add_subcommand("prev", "Re-run the last command");
  auto* batch = app.add_subcommand("batch", "Run a command file");
  batch->add_option("file", cmd.positionals)->required()->expected(1);
  batch->add_flag("--keep-going", cmd.keep_going, "continue after a failing command");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  app.parse(reversed);
  cmd.name = app.get_subcommands().front()->get_name();
  return cmd;
}

std::string join(const std::vector<std::string>& args) {
  std::string out;
  for (const auto& a : args) {
    if (!out.empty()) out += ' ';
    out += a;
  }
  return out;
}

}  // namespace

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool in_token = false;
  char quote = 0;
  for (char c : line) {
    if (quote) {
      if (c == quote)
        quote = 0;
      else
        cur += c;
    } else if (c == '"' || c == '\'') {
      quote = c;
      in_token = true;
    } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      if (in_token) out.push_back(std::exchange(cur, {}));
      in_token = false;
    } else {
      cur += c;
      in_token = true;
    }
  }
  if (in_token) out.push_back(cur);
  return out;
}

Session::Session(RunConfig config, std::ostream& out, std::ostream& err)
    : config_(std::move(config)), out_(out), err_(err) {}

int Session::execute_line(const std::string& line, bool interactive) {
  const auto args = tokenize(line);
  if (args.empty()) return 0;
  return execute(args, interactive);
}

int Session::execute(const std::vector<std::string>& args, bool interactive) {
  if (args.size() == 1 && args.front() == "prev") {
    if (!interactive) {
      err_ << "error: prev is only available in the command loop and batch files\n";
      return 2;
    }
    if (!last_command_) {
      err_ << "error: no previous command\n";
      return 2;
    }
    out_ << "> " << join(*last_command_) << "\n";
    const auto replay = *last_command_;
    return dispatch(replay, interactive);
  }
  return dispatch(args, interactive);
}

int Session::dispatch(const std::vector<std::string>& args, bool interactive) {
  ParsedCommand cmd;
  try {
    cmd = parse_command(args);
  } catch (const CLI::ParseError& e) {
    err_ << "error: " << (args.empty() ? std::string("empty command") : join(args)) << ": " << e.what() << "\n";
    return 2;
  }
  if (cmd.name != "prev") last_command_ = args;

  try {
    if (cmd.name == "format") return cmd_format(cmd.positionals[0]);
    if (cmd.name == "list") return cmd_list();
    if (cmd.name == "parameters") return cmd_parameters();
    if (cmd.name == "set") return cmd_set(cmd.positionals[0], cmd.positionals[1]);
    if (cmd.name == "prev") return execute({"prev"}, interactive);
    if (cmd.name == "batch") return run_batch(cmd.positionals[0], cmd.keep_going);
    if (cmd.name == "search") {
      SearchParams params = config_.params;
      EngineConfig engine = config_.engine;
      if (cmd.max_results) params.max_results = *cmd.max_results;
      if (cmd.min_hsp_length) params.min_hsp_length = *cmd.min_hsp_length;
      if (cmd.max_entry_distance) params.max_entry_distance = *cmd.max_entry_distance;
      if (cmd.dropoff) params.extension_dropoff = *cmd.dropoff;
      if (cmd.query_splits) engine.query_splits = *cmd.query_splits;
      if (cmd.workers) engine.align_workers = *cmd.workers;
      return cmd_search(cmd.positionals[0], cmd.positionals[1], cmd.positionals[2], params, engine);
    }
  } catch (const Error& e) {
    err_ << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err_ << "error: " << e.what() << "\n";
    return 1;
  }
  err_ << "error: unknown command " << cmd.name << "\n";
  return 2;
}

const Engine& Session::engine_for(const BankDeclaration& bank) {
  auto& slot = engines_[bank.name];
  if (!slot) slot = std::make_unique<Engine>(Engine::open(bank.directory, bank.name));
  return *slot;
}

int Session::cmd_format(const std::string& name) {
  const auto* bank = config_.find_bank(name);
  if (!bank) {
    err_ << "error: unknown bank '" << name << "'\n";
    return 1;
  }
  if (bank->fasta.empty()) {
    err_ << "error: bank '" << name << "' has no fasta source configured\n";
    return 1;
  }
  engines_.erase(name);
  fragment_bank(bank->fasta, bank->fragments, parse_mask(bank->mask), bank->directory, bank->name);
  const auto summary = summarize_bank(bank->directory, bank->name);
  out_ << "formatted " << name << ": " << summary.sequence_count << " sequences, " << summary.total_bases
       << " bases, " << summary.fragments << " fragment(s)\n";
  return 0;
}

int Session::cmd_search(const std::string& name, const std::string& query_path, const std::string& output,
                        const SearchParams& params, const EngineConfig& engine_config) {
  const auto* bank = config_.find_bank(name);
  if (!bank) {
    err_ << "error: unknown bank '" << name << "'\n";
    return 1;
  }
  const Engine& engine = engine_for(*bank);
  const auto queries = read_fasta(query_path);
  if (queries.empty()) {
    err_ << "error: query file " << query_path << " holds no sequences\n";
    return 1;
  }
  std::vector<SearchResult> results;
  std::size_t hits = 0;
  for (const auto& q : queries) {
    results.push_back(parallel_search(engine, q.sequence, q.name, params, engine_config));
    hits += results.back().hsps.size();
  }
  write_results_xml(results, std::filesystem::path(output));
  out_ << "search " << name << ": " << queries.size() << " quer" << (queries.size() == 1 ? "y" : "ies") << ", "
       << hits << " HSPs written to " << output << "\n";
  return 0;
}

int Session::cmd_list() {
  for (const auto& bank : config_.banks) {
    try {
      const auto s = summarize_bank(bank.directory, bank.name);
      out_ << bank.name << "\tsequences=" << s.sequence_count << "\tbases=" << s.total_bases
           << "\tfragments=" << s.fragments << "\n";
    } catch (const NotFoundError&) {
      out_ << bank.name << "\tnot formatted\n";
    }
  }
  return 0;
}

int Session::cmd_parameters() {
  for (const auto& [key, value] : list_parameters(config_.params, config_.engine)) out_ << key << " = " << value << "\n";
  return 0;
}

int Session::cmd_set(const std::string& key, const std::string& value) {
  SearchParams params = config_.params;
  EngineConfig engine = config_.engine;
  set_parameter(params, engine, key, value);
  params.validate();
  engine.validate();
  config_.params = params;
  config_.engine = engine;
  out_ << key << " = " << value << "\n";
  return 0;
}

int Session::run_batch(const std::string& path, bool keep_going) {
  if (batch_depth_ >= 8) {
    err_ << "error: batch files nested too deeply\n";
    return 1;
  }
  std::ifstream in(path);
  if (!in) {
    err_ << "error: cannot open batch file " << path << "\n";
    return 1;
  }
  ++batch_depth_;
  int status = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto args = tokenize(line);
    if (args.empty() || args.front().front() == '#') continue;
    const int rc = execute(args, true);
    out_ << "[batch " << line_no << "] " << (rc == 0 ? "ok" : "failed") << ": " << join(args) << "\n";
    if (rc != 0) {
      status = rc;
      if (!keep_going) break;
    }
  }
  --batch_depth_;
  return status;
}

int Session::repl(std::istream& in, bool prompt) {
  int status = 0;
  std::string line;
  for (;;) {
    if (prompt) out_ << "genoogle> " << std::flush;
    if (!std::getline(in, line)) break;
    const auto args = tokenize(line);
    if (args.empty() || args.front().front() == '#') continue;
    if (args.front() == "quit" || args.front() == "exit") break;
    status = execute(args, true);
  }
  return status;
}

int run_cli(int argc, char** argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app("genoogle: indexed parallel DNA similarity search");
  std::string config_path;
  app.add_option("--config", config_path, "configuration file");
  app.prefix_command();
  app.footer(
      "Commands:\n"
      "  format <bank>\n"
      "  search <bank> <query.fasta> <out.xml> [--max-results N] [--min-hsp-length N]\n"
      "         [--max-entry-distance N] [--dropoff N] [--query-splits N] [--workers N]\n"
      "  list | parameters | set <key> <value> | prev | batch <file> [--keep-going]\n"
      "With no command, reads commands from standard input.");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  RunConfig config;
  try {
    if (!config_path.empty())
      config = load_config(config_path);
    else if (std::filesystem::exists("genoogle.conf"))
      config = load_config("genoogle.conf");
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  Session session(std::move(config), out, err);
  const auto rest = app.remaining();
  if (rest.empty()) return session.repl(in, ::isatty(STDIN_FILENO) != 0);
  return session.execute(rest, false);
}

}  // namespace genoogle::cli
