#pragma once

// Running solutions on test inputs, comparing their outputs, problem corpus
// I/O, and the token-mutation fuzzing baseline.

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "ccfg/document.hpp"
#include "ccfg/error.hpp"
#include "ccfg/grammar.hpp"
#include "ccfg/metrics.hpp"
#include "ccfg/random.hpp"

extern char** environ;

namespace ccfg {

using Command = std::vector<std::string>;

enum class RunStatus { Ok, NonzeroExit, Timeout, SpawnError };

constexpr std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Ok: return "ok";
    case RunStatus::NonzeroExit: return "nonzero_exit";
    case RunStatus::Timeout: return "timeout";
    case RunStatus::SpawnError: return "spawn_error";
  }
  return "unknown";
}

struct RunOutcome {
  RunStatus status = RunStatus::SpawnError;
  std::string stdout_bytes;
  std::int64_t duration_ms = 0;
  int exit_code = -1;
};

inline constexpr std::chrono::milliseconds kDefaultTimeout{10'000};

namespace detail {

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(Fd&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Fd& operator=(Fd&& o) noexcept {
    reset();
    fd_ = std::exchange(o.fd_, -1);
    return *this;
  }
  ~Fd() { reset(); }
  int get() const { return fd_; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

inline void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

inline void set_nonblocking(int fd) { ::fcntl(fd, F_SETFL, ::fcntl(fd, F_GETFL) | O_NONBLOCK); }

}  // namespace detail

/// Runs `argv` with `input` on stdin and captures stdout. stderr is
/// discarded. The child is killed once `timeout` elapses.
inline RunOutcome run_solution(const Command& argv, std::string_view input,
                               std::chrono::milliseconds timeout = kDefaultTimeout) {
  using clock = std::chrono::steady_clock;
  RunOutcome outcome;
  if (argv.empty()) return outcome;
  detail::ignore_sigpipe();

  int in_pipe[2], out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) return outcome;
  detail::Fd in_r(in_pipe[0]), in_w(in_pipe[1]);
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) return outcome;
  detail::Fd out_r(out_pipe[0]), out_w(out_pipe[1]);

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_r.get(), 0);
  posix_spawn_file_actions_adddup2(&actions, out_w.get(), 1);
  posix_spawn_file_actions_addopen(&actions, 2, "/dev/null", O_WRONLY, 0);

  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);

  const auto started = clock::now();
  pid_t pid = -1;
  const int rc = ::posix_spawnp(&pid, args[0], &actions, nullptr, args.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) return outcome;
  in_r.reset();
  out_w.reset();

  detail::set_nonblocking(in_w.get());
  detail::set_nonblocking(out_r.get());
  const auto deadline = started + timeout;
  std::size_t written = 0;
  if (input.empty()) in_w.reset();
  bool timed_out = false;
  char buf[65536];

  while (out_r.get() >= 0) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now()).count();
    if (left <= 0) {
      timed_out = true;
      break;
    }
    pollfd fds[2];
    nfds_t n = 0;
    fds[n++] = pollfd{out_r.get(), POLLIN, 0};
    if (in_w.get() >= 0) fds[n++] = pollfd{in_w.get(), POLLOUT, 0};
    const int ready = ::poll(fds, n, static_cast<int>(std::min<std::int64_t>(left, 100)));
    if (ready < 0 && errno != EINTR) break;
    if (n == 2 && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
      const ssize_t w = ::write(in_w.get(), input.data() + written, input.size() - written);
      if (w > 0) written += static_cast<std::size_t>(w);
      if ((w < 0 && errno != EAGAIN && errno != EINTR) || written == input.size()) in_w.reset();
    }
    if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
      const ssize_t r = ::read(out_r.get(), buf, sizeof buf);
      if (r > 0)
        outcome.stdout_bytes.append(buf, static_cast<std::size_t>(r));
      else if (r == 0 || (errno != EAGAIN && errno != EINTR))
        out_r.reset();
    }
  }
  in_w.reset();

  int status = 0;
  while (!timed_out) {
    const pid_t w = ::waitpid(pid, &status, WNOHANG);
    if (w == pid) break;
    if (w < 0 && errno != EINTR) break;
    if (clock::now() >= deadline) {
      timed_out = true;
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
  }
  if (timed_out) {
    ::kill(pid, SIGKILL);
    while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    outcome.status = RunStatus::Timeout;
    outcome.stdout_bytes.clear();
  } else if (WIFEXITED(status) && WEXITSTATUS(status) == 0) {
    outcome.status = RunStatus::Ok;
    outcome.exit_code = 0;
  } else {
    outcome.status = RunStatus::NonzeroExit;
    outcome.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  }
  outcome.duration_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - started).count();
  return outcome;
}

/// Judge-style normalization: trailing whitespace per line and trailing
/// blank lines are ignored.
inline std::string normalize_output(std::string_view s) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto nl = s.find('\n', start);
    std::string_view line = s.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r')) line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += '\n';
    out += lines[i];
  }
  return out;
}

inline bool outputs_differ(const RunOutcome& reference, const RunOutcome& candidate) {
  if (reference.status != RunStatus::Ok)
    throw Error(ErrorKind::ReferenceFailed, "reference solution finished with status " + std::string(to_string(reference.status)));
  if (candidate.status != RunStatus::Ok) return true;
  return normalize_output(reference.stdout_bytes) != normalize_output(candidate.stdout_bytes);
}

/// Runs fn(0..n-1) on up to `workers` threads. Results must be written by
/// index, so scheduling never affects them.
inline void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

struct HarnessOptions {
  std::chrono::milliseconds timeout = kDefaultTimeout;
  std::size_t workers = 0;  // 0: logical CPU count
};

/// Runs the reference and every incorrect solution on every test and builds
/// the boolean matrix the effectiveness formulas consume.
inline EffectivenessInput evaluate_solutions(const std::vector<std::string>& tests, std::vector<bool> valid,
                                             const Command& reference, const std::vector<Command>& incorrect,
                                             const HarnessOptions& opt = {}) {
  if (tests.empty()) throw Error(ErrorKind::EmptyTestSet, "no test cases");
  if (incorrect.empty()) throw Error(ErrorKind::EmptySolutionSet, "no incorrect solutions");
  if (valid.size() != tests.size()) throw Error(ErrorKind::InvalidArgument, "validity flags do not match tests");
  const std::size_t x = tests.size();
  std::vector<RunOutcome> runs((incorrect.size() + 1) * x);
  parallel_for(runs.size(), opt.workers, [&](std::size_t job) {
    const std::size_t solution = job / x;
    const Command& cmd = solution == 0 ? reference : incorrect[solution - 1];
    runs[job] = run_solution(cmd, tests[job % x], opt.timeout);
  });
  EffectivenessInput in;
  in.valid = std::move(valid);
  in.differs.assign(incorrect.size(), std::vector<bool>(x, false));
  for (std::size_t y = 0; y < incorrect.size(); ++y)
    for (std::size_t t = 0; t < x; ++t) {
      try {
        in.differs[y][t] = outputs_differ(runs[t], runs[(y + 1) * x + t]);
      } catch (const Error& e) {
        throw Error(e.kind(), "test " + std::to_string(t) + ": " + e.detail());
      }
    }
  return in;
}

// ---------------------------------------------------------------------------
// Corpus

struct TestSets {
  std::vector<std::string> public_tests;
  std::vector<std::string> private_tests;
  std::vector<std::string> generated;
  bool operator==(const TestSets&) const = default;
};

struct Problem {
  std::string name;
  std::string specification;
  std::optional<Grammar> truth_grammar;
  TestSets tests;
  std::vector<Command> correct_solutions;
  std::vector<Command> incorrect_solutions;
  bool operator==(const Problem&) const = default;
};

struct Corpus {
  std::vector<Problem> problems;
  /// Records that were dropped, or kept without a usable grammar.
  std::vector<std::string> skipped;

  const Problem* find(std::string_view name) const {
    for (const auto& p : problems)
      if (p.name == name) return &p;
    return nullptr;
  }
};

namespace detail {

inline std::vector<std::string> string_list(const json& j, const char* key) {
  std::vector<std::string> out;
  if (j.contains(key) && j[key].is_array())
    for (const auto& s : j[key]) out.push_back(s.get<std::string>());
  return out;
}

inline std::vector<Command> command_list(const json& j, const char* key) {
  std::vector<Command> out;
  if (j.contains(key) && j[key].is_array())
    for (const auto& c : j[key]) out.push_back(c.get<Command>());
  return out;
}

}  // namespace detail

inline Corpus parse_corpus(std::string_view text) {
  Corpus corpus;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = text.substr(start, nl - start);
    start = nl + 1;
    ++line_no;
    if (detail::split_ws(line).empty()) continue;
    const std::string where = "line " + std::to_string(line_no);
    try {
      const json rec = json::parse(line);
      Problem p;
      p.name = rec.at("name").get<std::string>();
      if (p.name.empty()) throw std::runtime_error("empty name");
      if (!seen.insert(p.name).second) {
        corpus.skipped.push_back(where + ": duplicate problem '" + p.name + "'");
        continue;
      }
      p.specification = rec.value("specification", "");
      if (rec.contains("tests")) {
        const json& t = rec["tests"];
        p.tests.public_tests = detail::string_list(t, "public");
        p.tests.private_tests = detail::string_list(t, "private");
        p.tests.generated = detail::string_list(t, "generated");
      }
      p.correct_solutions = detail::command_list(rec, "correct_cmds");
      p.incorrect_solutions = detail::command_list(rec, "incorrect_cmds");
      if (!rec.contains("grammar") || rec["grammar"].is_null()) {
        corpus.skipped.push_back(where + ": problem '" + p.name + "' has no grammar");
      } else {
        json container = rec["grammar"];
        if (!container.contains("grammar")) container = json{{"grammar", container}};
        try {
          p.truth_grammar = parse_grammar_document(container.dump());
        } catch (const Error& e) {
          corpus.skipped.push_back(where + ": problem '" + p.name + "' grammar unusable: " + e.what());
        }
      }
      corpus.problems.push_back(std::move(p));
    } catch (const std::exception& e) {
      corpus.skipped.push_back(where + ": malformed record: " + e.what());
    }
  }
  if (corpus.problems.empty()) throw Error(ErrorKind::EmptyCorpus, "corpus contains no problems");
  return corpus;
}

inline Corpus load_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::UnreadablePath, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_corpus(ss.str());
}

inline std::string save_corpus(const std::vector<Problem>& problems) {
  std::string out;
  for (const auto& p : problems) {
    json rec{{"name", p.name},
             {"specification", p.specification},
             {"tests",
              {{"public", p.tests.public_tests}, {"private", p.tests.private_tests}, {"generated", p.tests.generated}}},
             {"correct_cmds", p.correct_solutions},
             {"incorrect_cmds", p.incorrect_solutions}};
    if (p.truth_grammar) rec["grammar"] = grammar_to_json(*p.truth_grammar);
    out += rec.dump() + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Mutation baseline

enum class TokenType { Integer, Float, String };

namespace detail {

inline TokenType classify_token(std::string_view t) {
  std::size_t i = (!t.empty() && (t[0] == '-' || t[0] == '+')) ? 1 : 0;
  const std::size_t int_start = i;
  while (i < t.size() && is_digit(t[i])) ++i;
  if (i == t.size() && i > int_start) return TokenType::Integer;
  if (i == int_start || i == t.size() || t[i] != '.') return TokenType::String;
  const std::size_t frac_start = ++i;
  while (i < t.size() && is_digit(t[i])) ++i;
  if (i == frac_start) return TokenType::String;
  if (i < t.size() && (t[i] == 'e' || t[i] == 'E')) {
    ++i;
    if (i < t.size() && (t[i] == '-' || t[i] == '+')) ++i;
    const std::size_t exp_start = i;
    while (i < t.size() && is_digit(t[i])) ++i;
    if (i == exp_start) return TokenType::String;
  }
  return i == t.size() ? TokenType::Float : TokenType::String;
}

inline char random_like(char c, Rng& rng) {
  static constexpr std::string_view kPunct = "!#$%&*+-./:;=?@^_~";
  if (c >= 'a' && c <= 'z') return static_cast<char>('a' + rng.uniform(0, 25));
  if (c >= 'A' && c <= 'Z') return static_cast<char>('A' + rng.uniform(0, 25));
  if (is_digit(c)) return static_cast<char>('0' + rng.uniform(0, 9));
  return kPunct[rng.index(kPunct.size())];
}

inline std::string mutate_integer(std::string_view t, Rng& rng) {
  const bool negative = t[0] == '-';
  const std::size_t digits = t.size() - ((t[0] == '-' || t[0] == '+') ? 1 : 0);
  std::string body;
  if (digits <= 18) {
    std::int64_t top = 1;
    for (std::size_t i = 0; i < digits; ++i) top *= 10;
    body = std::to_string(rng.uniform(negative ? 1 : 0, top - 1));
  } else {
    body += static_cast<char>('1' + rng.uniform(0, 8));
    for (std::size_t i = 1; i < digits; ++i) body += static_cast<char>('0' + rng.uniform(0, 9));
  }
  return negative ? "-" + body : body;
}

inline std::string mutate_token(std::string_view t, Rng& rng) {
  const TokenType type = classify_token(t);
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::string m;
    if (type == TokenType::Integer) {
      m = mutate_integer(t, rng);
    } else if (type == TokenType::Float) {
      // perturb digits in place, same layout
      m = std::string(t);
      for (auto& c : m)
        if (is_digit(c) && rng.uniform(0, 1)) c = random_like(c, rng);
    } else {
      for (char c : t) m += random_like(c, rng);
    }
    if (m != t) return m;
  }
  std::string m(t);
  const std::size_t i = rng.index(m.size());
  m[i] = is_digit(m[i]) ? static_cast<char>('0' + (m[i] - '0' + 1) % 10) : (m[i] == 'a' ? 'b' : 'a');
  return m;
}

}  // namespace detail

inline constexpr double kMutationRate = 0.3;

/// Mutates ceil(rate * tokens) distinct whitespace-delimited tokens,
/// keeping every separator byte in place.
inline std::string mutate_test_case(std::string_view test, double rate = kMutationRate, std::uint64_t seed = 0) {
  if (!(rate > 0.0 && rate <= 1.0)) throw Error(ErrorKind::InvalidArgument, "mutation rate must be in (0, 1]");
  auto is_sep = [](char c) { return c == ' ' || c == '\n' || c == '\t' || c == '\r'; };
  std::vector<std::pair<std::size_t, std::size_t>> tokens;  // offset, length
  for (std::size_t i = 0; i < test.size();) {
    if (is_sep(test[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < test.size() && !is_sep(test[j])) ++j;
    tokens.emplace_back(i, j - i);
    i = j;
  }
  if (tokens.empty()) throw Error(ErrorKind::EmptyTestCase, "test case has no tokens");

  const std::size_t n = tokens.size();
  const auto count = std::min(n, static_cast<std::size_t>(std::ceil(rate * static_cast<double>(n) - 1e-9)));
  Rng rng(seed);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t i = 0; i < count; ++i) std::swap(order[i], order[i + rng.index(n - i)]);
  std::vector<std::size_t> chosen(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count));
  std::sort(chosen.begin(), chosen.end());

  std::string out;
  std::size_t cursor = 0, next = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const auto [off, len] = tokens[t];
    out.append(test.substr(cursor, off - cursor));
    const std::string_view tok = test.substr(off, len);
    if (next < chosen.size() && chosen[next] == t) {
      out += detail::mutate_token(tok, rng);
      ++next;
    } else {
      out.append(tok);
    }
    cursor = off + len;
  }
  out.append(test.substr(cursor));
  return out;
}

}  // namespace ccfg
