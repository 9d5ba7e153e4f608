//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#include "mhnpath/conditions/conditions.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <fstream>

#include "json.hpp"
#include "mhnpath/chem/smiles.hpp"
#include "mhnpath/errors.hpp"
#include "mhnpath/util/text.hpp"

namespace mhnpath::conditions {

namespace {

constexpr int kResponseTimeoutMs = 30000;

std::string canonical_smiles(std::string_view smiles) {
  return chem::parse_smiles_set(smiles).canonical_key();
}

std::vector<std::string> canonical_list(std::string_view joined) {
  std::vector<std::string> out;
  if (util::trim(joined).empty()) return out;
  for (const std::string &s : util::split(joined, ';')) out.push_back(canonical_smiles(util::trim(s)));
  return out;
}

}  // namespace

std::string_view provenance_name(Provenance p) {
  switch (p) {
    case Provenance::kTable: return "table";
    case Provenance::kDefault: return "default";
    case Provenance::kExternal: return "external";
  }
  return "default";
}

double aggregate_temperature(std::span<const Candidate> candidates, int k) {
  if (candidates.empty()) throw EmptyCandidates("no condition candidates to aggregate");
  if (k < 1) throw DomainError("k must be >= 1");
  const std::size_t n = std::min(candidates.size(), static_cast<std::size_t>(k));
  double num = 0;
  double den = 0;
  for (std::size_t i = 0; i < n; ++i) {
    num += candidates[i].weight * candidates[i].conditions.temperature_c;
    den += candidates[i].weight;
  }
  if (!(den > 0)) throw DomainError("candidate weights must sum to a positive value");
  return num / den;
}

std::string reaction_key(std::string_view reaction_smiles) {
  const auto sep = reaction_smiles.find(">>");
  if (sep == std::string_view::npos || reaction_smiles.find('>', sep + 2) != std::string_view::npos)
    throw SyntaxError("reaction must be written precursors>>product: '" +
                      std::string(reaction_smiles) + "'");
  return canonical_smiles(reaction_smiles.substr(0, sep)) + ">>" +
         canonical_smiles(reaction_smiles.substr(sep + 2));
}

TablePredictor TablePredictor::load(const std::filesystem::path &path, double default_temperature_c) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open conditions table " + path.string());
  std::string line;
  if (!std::getline(in, line) ||
      util::trim(line) != "reaction_key,rank,weight,temperature_c,solvents,reagents")
    throw SyntaxError(path.string() +
                      ":1: header must be reaction_key,rank,weight,temperature_c,solvents,reagents");
  TablePredictor table(default_temperature_c);
  std::string errors;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (util::trim(line).empty()) continue;
    try {
      const auto f = util::split(util::trim(line), ',');
      if (f.size() != 6) throw SyntaxError("expected 6 fields");
      const auto rank = util::parse_number<int>(f[1]);
      const auto weight = util::parse_number<double>(f[2]);
      const auto temp = util::parse_number<double>(f[3]);
      if (!rank) throw SyntaxError("bad rank '" + f[1] + "'");
      if (!weight || !(*weight > 0) || !std::isfinite(*weight))
        throw SyntaxError("weight must be a positive number");
      if (!temp || !std::isfinite(*temp)) throw SyntaxError("bad temperature '" + f[3] + "'");
      Candidate c{{*temp, canonical_list(f[4]), canonical_list(f[5]), Provenance::kTable}, *weight};
      table.add(f[0], *rank, std::move(c));
    } catch (const Error &e) {
      errors += path.string() + ":" + std::to_string(line_no) + ": " + e.what() + "\n";
    }
  }
  if (!errors.empty()) throw SyntaxError(errors);
  return table;
}

void TablePredictor::add(std::string_view reaction_smiles, int rank, Candidate candidate) {
  candidate.conditions.provenance = Provenance::kTable;
  auto &rows = rows_[reaction_key(reaction_smiles)];
  const auto pos = std::upper_bound(rows.begin(), rows.end(), rank,
                                    [](int r, const auto &row) { return r < row.first; });
  rows.insert(pos, {rank, std::move(candidate)});
}

Candidate TablePredictor::default_candidate() const {
  return {{default_temperature_c_, {}, {}, Provenance::kDefault}, 1.0};
}

std::vector<Candidate> TablePredictor::predict(std::string_view reaction_smiles) const {
  std::string key;
  try {
    key = reaction_key(reaction_smiles);
  } catch (const Error &) {
    return {default_candidate()};
  }
  const auto it = rows_.find(key);
  if (it == rows_.end()) return {default_candidate()};
  std::vector<Candidate> out;
  for (const auto &[rank, c] : it->second) out.push_back(c);
  return out;
}

std::vector<Candidate> parse_predictor_response(std::string_view line) {
  std::vector<Candidate> out;
  try {
    const auto j = nlohmann::json::parse(line);
    for (const auto &c : j.at("candidates")) {
      Candidate cand;
      cand.conditions.provenance = Provenance::kExternal;
      cand.conditions.temperature_c = c.at("temperature_c").get<double>();
      cand.weight = c.at("weight").get<double>();
      if (!std::isfinite(cand.conditions.temperature_c) || !(cand.weight > 0))
        throw PredictorError("candidate needs a finite temperature and a positive weight");
      for (const auto &s : c.value("solvents", nlohmann::json::array()))
        cand.conditions.solvents.push_back(canonical_smiles(s.get<std::string>()));
      for (const auto &s : c.value("reagents", nlohmann::json::array()))
        cand.conditions.reagents.push_back(canonical_smiles(s.get<std::string>()));
      out.push_back(std::move(cand));
    }
  } catch (const nlohmann::json::exception &e) {
    throw PredictorError(std::string("malformed predictor response: ") + e.what());
  } catch (const SyntaxError &e) {
    throw PredictorError(std::string("bad SMILES in predictor response: ") + e.what());
  } catch (const ValenceError &e) {
    throw PredictorError(std::string("bad SMILES in predictor response: ") + e.what());
  }
  return out;
}

struct ProcessPredictor::Pipe {
  int fd = -1;
  pid_t pid = -1;
  std::string buffer;
};

ProcessPredictor::ProcessPredictor(std::vector<std::string> argv) : pipe_(std::make_unique<Pipe>()) {
  if (argv.empty()) throw PredictorError("predictor command is empty");
  int fds[2];
  if (socketpair(AF_UNIX, SOCK_STREAM, 0, fds) != 0)
    throw PredictorError("cannot create predictor socket");
  const pid_t pid = fork();
  if (pid < 0) {
    close(fds[0]);
    close(fds[1]);
    throw PredictorError("cannot start predictor process");
  }
  if (pid == 0) {
    close(fds[0]);
    dup2(fds[1], STDIN_FILENO);
    dup2(fds[1], STDOUT_FILENO);
    close(fds[1]);
    std::vector<char *> args;
    for (std::string &a : argv) args.push_back(a.data());
    args.push_back(nullptr);
    execvp(args[0], args.data());
    _exit(127);
  }
  close(fds[1]);
  pipe_->fd = fds[0];
  pipe_->pid = pid;
}

ProcessPredictor::~ProcessPredictor() {
  if (pipe_->fd >= 0) {
    shutdown(pipe_->fd, SHUT_RDWR);
    close(pipe_->fd);
  }
  if (pipe_->pid > 0) {
    int status = 0;
    for (int i = 0; i < 50; ++i) {
      if (waitpid(pipe_->pid, &status, WNOHANG) != 0) return;
      usleep(10000);
    }
    kill(pipe_->pid, SIGKILL);
    waitpid(pipe_->pid, &status, 0);
  }
}

std::vector<Candidate> ProcessPredictor::predict(std::string_view reaction_smiles) const {
  const std::lock_guard lock(mutex_);
  const std::string request =
      nlohmann::json{{"reaction", std::string(reaction_smiles)}}.dump() + "\n";
  for (std::size_t sent = 0; sent < request.size();) {
    const ssize_t n = send(pipe_->fd, request.data() + sent, request.size() - sent, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw PredictorError("predictor process is not accepting requests");
    sent += static_cast<std::size_t>(n);
  }
  std::string &buf = pipe_->buffer;
  std::size_t newline;
  while ((newline = buf.find('\n')) == std::string::npos) {
    pollfd pfd{pipe_->fd, POLLIN, 0};
    const int ready = poll(&pfd, 1, kResponseTimeoutMs);
    if (ready < 0 && errno == EINTR) continue;
    if (ready == 0) throw PredictorError("predictor process timed out");
    char chunk[4096];
    const ssize_t n = recv(pipe_->fd, chunk, sizeof chunk, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw PredictorError("predictor process closed the connection");
    buf.append(chunk, static_cast<std::size_t>(n));
  }
  const std::string line = buf.substr(0, newline);
  buf.erase(0, newline + 1);
  return parse_predictor_response(line);
}

}  // namespace mhnpath::conditions
