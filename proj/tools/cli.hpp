#pragma once

// Text-mode command interface.
//
//   genoogle [--config PATH] <command> [args]
//
//   format <bank>                          format and index a configured bank
//   search <bank> <query.fasta> <out.xml>  [--max-results N] [--min-hsp-length N]
//                                          [--max-entry-distance N] [--dropoff N]
//                                          [--query-splits N] [--workers N]
//   list                                   configured banks with their sizes
//   parameters                             current parameter values
//   set <key> <value>                      change a parameter for this session
//   prev                                   re-run the last command (loop and batch only)
//   batch <file> [--keep-going]            run one command per line
//
// Without a command the tool reads commands from standard input.

#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "genoogle/config.hpp"
#include "genoogle/engine.hpp"

namespace genoogle::cli {

class Session {
 public:
  Session(RunConfig config, std::ostream& out, std::ostream& err);

  // Runs one tokenized command. `interactive` enables `prev`.
  int execute(const std::vector<std::string>& args, bool interactive);
  int execute_line(const std::string& line, bool interactive);
  int run_batch(const std::string& path, bool keep_going);
  int repl(std::istream& in, bool prompt);

  const SearchParams& params() const noexcept { return config_.params; }
  const EngineConfig& engine_config() const noexcept { return config_.engine; }

 private:
  int dispatch(const std::vector<std::string>& args, bool interactive);
  int cmd_format(const std::string& bank);
  int cmd_search(const std::string& bank, const std::string& query, const std::string& output,
                 const SearchParams& params, const EngineConfig& engine);
  int cmd_list();
  int cmd_parameters();
  int cmd_set(const std::string& key, const std::string& value);
  const Engine& engine_for(const BankDeclaration& bank);

  RunConfig config_;
  std::ostream& out_;
  std::ostream& err_;
  std::map<std::string, std::unique_ptr<Engine>> engines_;
  std::optional<std::vector<std::string>> last_command_;
  int batch_depth_ = 0;
};

std::vector<std::string> tokenize(const std::string& line);

int run_cli(int argc, char** argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace genoogle::cli
