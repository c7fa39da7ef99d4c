#include "rtc/solver.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <memory>

extern char** environ;

namespace rtc {

std::string_view to_string(SatResult r) {
  switch (r) {
    case SatResult::Sat: return "sat";
    case SatResult::Unsat: return "unsat";
    case SatResult::Unknown: return "unknown";
  }
  return "?";
}

namespace {

struct SExpr {
  std::string atom;
  std::vector<SExpr> list;
  bool is_list = false;
};

class SExprReader {
 public:
  explicit SExprReader(std::string_view text) : s_(text) {}

  bool next(SExpr& out) {
    skip();
    if (pos_ >= s_.size()) return false;
    out = read();
    return true;
  }

 private:
  void skip() {
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == ';') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  SExpr read() {
    skip();
    if (pos_ >= s_.size()) throw SolverError("unexpected end of solver output");
    SExpr e;
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      e.is_list = true;
      for (;;) {
        skip();
        if (pos_ >= s_.size()) throw SolverError("unbalanced parentheses in solver output");
        if (s_[pos_] == ')') {
          ++pos_;
          break;
        }
        e.list.push_back(read());
      }
    } else if (c == ')') {
      throw SolverError("unexpected ')' in solver output");
    } else if (c == '|') {
      auto end = s_.find('|', pos_ + 1);
      if (end == std::string_view::npos) throw SolverError("unterminated quoted symbol in solver output");
      e.atom = std::string(s_.substr(pos_ + 1, end - pos_ - 1));
      pos_ = end + 1;
    } else if (c == '"') {
      std::size_t k = pos_ + 1;
      while (k < s_.size() && !(s_[k] == '"' && (k + 1 >= s_.size() || s_[k + 1] != '"'))) k += (s_[k] == '"') ? 2 : 1;
      if (k >= s_.size()) throw SolverError("unterminated string in solver output");
      e.atom = std::string(s_.substr(pos_ + 1, k - pos_ - 1));
      pos_ = k + 1;
    } else {
      std::size_t k = pos_;
      while (k < s_.size() && !std::isspace(static_cast<unsigned char>(s_[k])) && s_[k] != '(' && s_[k] != ')') ++k;
      e.atom = std::string(s_.substr(pos_, k - pos_));
      pos_ = k;
    }
    return e;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

Rational numeric_value(const SExpr& e) {
  if (!e.is_list) return parse_rational(e.atom);
  if (e.list.size() == 2 && !e.list[0].is_list && e.list[0].atom == "-") return -numeric_value(e.list[1]);
  if (e.list.size() == 3 && !e.list[0].is_list && e.list[0].atom == "/") {
    Rational d = numeric_value(e.list[2]);
    if (d == 0) throw SolverError("division by zero in model value");
    return numeric_value(e.list[1]) / d;
  }
  throw SolverError("unsupported value form in model");
}

std::string value_text(const SExpr& e) {
  if (!e.is_list && (e.atom == "true" || e.atom == "false")) return e.atom;
  try {
    return rational_to_fraction(numeric_value(e));
  } catch (const SolverError&) {
    throw;
  } catch (const Error& ex) {
    throw SolverError(std::string("malformed model value: ") + ex.what());
  }
}

bool is_define_fun(const SExpr& e) {
  return e.is_list && !e.list.empty() && !e.list[0].is_list && e.list[0].atom == "define-fun";
}

void collect_model(const SExpr& e, SmtModel& m) {
  for (const auto& d : e.list) {
    if (!d.is_list) continue;
    if (!is_define_fun(d)) throw SolverError("unexpected entry in model");
    if (d.list.size() != 5) throw SolverError("malformed define-fun in model");
    // Only constants are decoded; function definitions are skipped.
    if (!d.list[2].is_list || !d.list[2].list.empty()) continue;
    m.values[d.list[1].atom] = value_text(d.list[4]);
  }
}

bool looks_like_model(const SExpr& e) {
  if (!e.is_list) return false;
  if (!e.list.empty() && !e.list[0].is_list && e.list[0].atom == "model") return true;
  if (e.list.empty()) return true;
  return is_define_fun(e.list[0]);
}

}  // namespace

SmtModel parse_model(std::string_view text) {
  SExprReader rd(text);
  SExpr e;
  if (!rd.next(e) || !looks_like_model(e)) throw SolverError("no model in solver output");
  SmtModel m;
  collect_model(e, m);
  return m;
}

SolverAnswer parse_solver_output(std::string_view text) {
  SolverAnswer ans;
  SExprReader rd(text);
  SExpr e;
  bool answered = false;
  while (rd.next(e)) {
    if (!e.is_list) {
      if (!answered && (e.atom == "sat" || e.atom == "unsat" || e.atom == "unknown")) {
        ans.result = e.atom == "sat" ? SatResult::Sat : e.atom == "unsat" ? SatResult::Unsat : SatResult::Unknown;
        answered = true;
      }
      continue;
    }
    if (!e.list.empty() && !e.list[0].is_list && e.list[0].atom == "error") {
      // A model request after unsat is expected to fail.
      if (ans.result != SatResult::Unsat) {
        if (!ans.diagnostics.empty()) ans.diagnostics += "; ";
        ans.diagnostics += e.list.size() > 1 ? e.list[1].atom : "solver error";
      }
      continue;
    }
    if (ans.result == SatResult::Sat && looks_like_model(e)) collect_model(e, ans.model);
  }
  if (!answered) {
    ans.result = SatResult::Unknown;
    if (ans.diagnostics.empty()) ans.diagnostics = "solver produced no check-sat answer";
  }
  return ans;
}

namespace {

struct Fd {
  int fd = -1;
  ~Fd() { reset(); }
  void reset() {
    if (fd >= 0) ::close(fd);
    fd = -1;
  }
};

bool executable(const std::string& path) {
  struct stat st {};
  return ::stat(path.c_str(), &st) == 0 && S_ISREG(st.st_mode) && ::access(path.c_str(), X_OK) == 0;
}

}  // namespace

std::string default_solver_path() {
  if (const char* env = std::getenv("RTC_SOLVER"); env && *env) return env;
  const char* path = std::getenv("PATH");
  std::string dirs = path ? path : "/usr/local/bin:/usr/bin:/bin";
  std::size_t start = 0;
  while (start <= dirs.size()) {
    std::size_t end = dirs.find(':', start);
    if (end == std::string::npos) end = dirs.size();
    std::string cand = dirs.substr(start, end - start) + "/z3";
    if (executable(cand)) return cand;
    start = end + 1;
  }
  return "";
}

SolverAnswer run_solver(const SolverConfig& cfg, const std::string& script) {
  SolverAnswer fail;
  int in_pipe[2], out_pipe[2], err_pipe[2];
  if (::pipe(in_pipe) != 0 || ::pipe(out_pipe) != 0 || ::pipe(err_pipe) != 0) {
    fail.diagnostics = std::string("cannot create pipes: ") + std::strerror(errno);
    return fail;
  }
  Fd to_child{in_pipe[1]}, from_child{out_pipe[0]}, err_child{err_pipe[0]};
  Fd child_in{in_pipe[0]}, child_out{out_pipe[1]}, child_err{err_pipe[1]};

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, child_in.fd, 0);
  posix_spawn_file_actions_adddup2(&actions, child_out.fd, 1);
  posix_spawn_file_actions_adddup2(&actions, child_err.fd, 2);
  for (int fd : {to_child.fd, from_child.fd, err_child.fd, child_in.fd, child_out.fd, child_err.fd})
    posix_spawn_file_actions_addclose(&actions, fd);

  std::vector<std::string> argv_store{cfg.path};
  argv_store.insert(argv_store.end(), cfg.args.begin(), cfg.args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  argv.push_back(nullptr);

  pid_t pid = 0;
  int rc = posix_spawnp(&pid, cfg.path.c_str(), &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  child_in.reset();
  child_out.reset();
  child_err.reset();
  if (rc != 0) {
    fail.diagnostics = "cannot start solver '" + cfg.path + "': " + std::strerror(rc);
    return fail;
  }

  for (int fd : {to_child.fd, from_child.fd, err_child.fd}) ::fcntl(fd, F_SETFL, ::fcntl(fd, F_GETFL) | O_NONBLOCK);
  std::string out, err;
  std::size_t written = 0;
  auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(cfg.timeout_seconds);
  bool timed_out = false;
  char buf[65536];
  while (from_child.fd >= 0 || err_child.fd >= 0) {
    std::vector<pollfd> fds;
    if (to_child.fd >= 0) fds.push_back({to_child.fd, POLLOUT, 0});
    if (from_child.fd >= 0) fds.push_back({from_child.fd, POLLIN, 0});
    if (err_child.fd >= 0) fds.push_back({err_child.fd, POLLIN, 0});
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      timed_out = true;
      break;
    }
    int n = ::poll(fds.data(), fds.size(), static_cast<int>(std::min<long long>(left.count(), 1000)));
    if (n < 0 && errno != EINTR) break;
    for (const auto& p : fds) {
      if (!p.revents) continue;
      if (p.fd == to_child.fd) {
        ssize_t w = ::write(to_child.fd, script.data() + written, script.size() - written);
        if (w > 0) written += static_cast<std::size_t>(w);
        if (w < 0 && errno != EAGAIN) written = script.size();
        if (written >= script.size()) to_child.reset();
      } else {
        Fd& src = p.fd == from_child.fd ? from_child : err_child;
        ssize_t r = ::read(src.fd, buf, sizeof buf);
        if (r > 0) (p.fd == from_child.fd ? out : err).append(buf, static_cast<std::size_t>(r));
        else if (r == 0 || errno != EAGAIN) src.reset();
      }
    }
  }
  to_child.reset();
  if (timed_out) ::kill(pid, SIGKILL);
  int status = 0;
  ::waitpid(pid, &status, 0);

  if (timed_out) {
    fail.diagnostics = "solver timed out after " + std::to_string(cfg.timeout_seconds) + " s";
    return fail;
  }
  SolverAnswer ans = parse_solver_output(out);
  if (WIFSIGNALED(status)) {
    ans.result = SatResult::Unknown;
    ans.diagnostics = "solver killed by signal " + std::to_string(WTERMSIG(status));
  } else if (ans.result == SatResult::Unknown && !err.empty()) {
    ans.diagnostics += (ans.diagnostics.empty() ? "" : "; ") + err.substr(0, 500);
  }
  return ans;
}

}  // namespace rtc
