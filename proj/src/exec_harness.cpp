#include "arm_alp/exec_harness.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <thread>

#include "arm_alp/errors.hpp"

namespace arm_alp {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kDriver = R"PY(import sys
import traceback

namespace = {"__name__": "__solution__"}
try:
    with open("solution.py", encoding="utf-8") as fh:
        exec(compile(fh.read(), "solution.py", "exec"), namespace)
    with open("call.txt", encoding="utf-8") as fh:
        result = eval(compile(fh.read().strip(), "<call>", "eval"), namespace)
except Exception:
    traceback.print_exc()
    sys.exit(70)
if isinstance(result, dict) and "answer" in result:
    result = result["answer"]
print(result)
)PY";

// Owns a fresh directory under the system temp path; removed on scope exit.
class TempDir {
 public:
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "arm_alp_exec_XXXXXX").string();
    if (::mkdtemp(tmpl.data()) == nullptr) throw IoError("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

void write_file(const fs::path& p, std::string_view body) {
  std::ofstream out(p, std::ios::binary);
  out << body;
  if (!out) throw IoError("cannot write " + p.string());
}

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  ~Fd() { reset(); }
  Fd(Fd&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Fd& operator=(Fd&& o) noexcept {
    if (this != &o) {
      reset();
      fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
  }
  int get() const { return fd_; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

bool make_pipe(Fd& read_end, Fd& write_end) {
  int fds[2];
  if (::pipe2(fds, O_CLOEXEC) != 0) return false;
  read_end = Fd(fds[0]);
  write_end = Fd(fds[1]);
  return true;
}

std::string last_nonempty_line(std::string_view text) {
  while (!text.empty()) {
    std::size_t end = text.size();
    while (end > 0 && (text[end - 1] == '\n' || text[end - 1] == '\r' || text[end - 1] == ' ' ||
                       text[end - 1] == '\t')) {
      --end;
    }
    text = text.substr(0, end);
    if (text.empty()) break;
    const std::size_t nl = text.rfind('\n');
    std::string_view line = nl == std::string_view::npos ? text : text.substr(nl + 1);
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
    if (!line.empty()) return std::string(line);
    text = text.substr(0, nl == std::string_view::npos ? 0 : nl);
  }
  return {};
}

struct Capture {
  std::string text;
  bool truncated = false;
  bool open = true;
};

void drain(int fd, Capture& cap, std::size_t cap_bytes) {
  std::array<char, 4096> buf;
  const ssize_t n = ::read(fd, buf.data(), buf.size());
  if (n <= 0) {
    if (n == 0 || (errno != EINTR && errno != EAGAIN)) cap.open = false;
    return;
  }
  const std::size_t room = cap_bytes > cap.text.size() ? cap_bytes - cap.text.size() : 0;
  const std::size_t keep = std::min(room, static_cast<std::size_t>(n));
  cap.text.append(buf.data(), keep);
  if (keep < static_cast<std::size_t>(n)) cap.truncated = true;
}

}  // namespace

std::string_view exec_status_name(ExecStatus s) {
  switch (s) {
    case ExecStatus::Success: return "Success";
    case ExecStatus::RuntimeError: return "RuntimeError";
    case ExecStatus::Timeout: return "Timeout";
    case ExecStatus::NonZeroExit: return "NonZeroExit";
    case ExecStatus::LaunchFailure: return "LaunchFailure";
  }
  return "LaunchFailure";
}

std::string interpreter_path() {
  const char* env = std::getenv(kInterpreterEnv);
  return (env != nullptr && *env != '\0') ? std::string(env) : std::string("python3");
}

ExecOutcome execute(std::string_view function_source, std::string_view call_line,
                    const ExecLimits& limits) {
  using Clock = std::chrono::steady_clock;
  ExecOutcome out;
  const auto started = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - started).count(); };

  if (function_source.empty() || call_line.empty()) {
    out.stderr_text = "empty source or call line";
    return out;
  }

  try {
    TempDir dir;
    write_file(dir.path() / "driver.py", kDriver);
    write_file(dir.path() / "solution.py", function_source);
    write_file(dir.path() / "call.txt", call_line);

    const std::string interpreter = interpreter_path();
    const std::string driver = "driver.py";
    const std::string workdir = dir.path().string();
    std::array<char*, 3> argv = {const_cast<char*>(interpreter.c_str()),
                                 const_cast<char*>(driver.c_str()), nullptr};

    Fd out_r, out_w, err_r, err_w, status_r, status_w;
    if (!make_pipe(out_r, out_w) || !make_pipe(err_r, err_w) || !make_pipe(status_r, status_w)) {
      out.stderr_text = "pipe creation failed";
      out.wall_time = elapsed();
      return out;
    }

    const pid_t pid = ::fork();
    if (pid < 0) {
      out.stderr_text = "fork failed";
      out.wall_time = elapsed();
      return out;
    }
    if (pid == 0) {
      ::setpgid(0, 0);
      const int devnull = ::open("/dev/null", O_RDONLY);
      if (devnull >= 0) ::dup2(devnull, STDIN_FILENO);
      ::dup2(out_w.get(), STDOUT_FILENO);
      ::dup2(err_w.get(), STDERR_FILENO);
      int err = 0;
      if (::chdir(workdir.c_str()) == 0) {
        ::execvp(argv[0], argv.data());
      }
      err = errno;
      [[maybe_unused]] ssize_t ignored = ::write(status_w.get(), &err, sizeof(err));
      ::_exit(127);
    }
    ::setpgid(pid, pid);
    out_w.reset();
    err_w.reset();
    status_w.reset();

    int launch_errno = 0;
    const bool launch_failed = ::read(status_r.get(), &launch_errno, sizeof(launch_errno)) ==
                               static_cast<ssize_t>(sizeof(launch_errno));

    Capture cout_cap, cerr_cap;
    bool timed_out = false;
    const auto deadline = started + std::chrono::duration_cast<Clock::duration>(
                                        std::chrono::duration<double>(limits.timeout_s));
    while (cout_cap.open || cerr_cap.open) {
      const auto now = Clock::now();
      if (now >= deadline) {
        timed_out = true;
        ::kill(-pid, SIGKILL);
        ::kill(pid, SIGKILL);
        break;
      }
      const auto wait_ms = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
      std::array<pollfd, 2> fds{};
      nfds_t n = 0;
      if (cout_cap.open) fds[n++] = {out_r.get(), POLLIN, 0};
      if (cerr_cap.open) fds[n++] = {err_r.get(), POLLIN, 0};
      const int ready = ::poll(fds.data(), n, static_cast<int>(std::clamp<long long>(wait_ms + 1, 1, 1000)));
      if (ready < 0 && errno != EINTR) break;
      for (nfds_t i = 0; i < n; ++i) {
        if ((fds[i].revents & (POLLIN | POLLHUP | POLLERR)) == 0) continue;
        if (fds[i].fd == out_r.get()) drain(out_r.get(), cout_cap, limits.max_output_bytes);
        else drain(err_r.get(), cerr_cap, limits.max_output_bytes);
      }
    }

    int wstatus = 0;
    while (::waitpid(pid, &wstatus, 0) < 0 && errno == EINTR) {
    }
    if (!timed_out) ::kill(-pid, SIGKILL);  // reap stray grandchildren
    out.wall_time = elapsed();
    out.stdout_text = std::move(cout_cap.text);
    out.stderr_text = std::move(cerr_cap.text);
    out.output_truncated = cout_cap.truncated || cerr_cap.truncated;

    if (launch_failed) {
      out.status = ExecStatus::LaunchFailure;
      out.stderr_text = "cannot launch '" + interpreter + "': " + std::strerror(launch_errno);
    } else if (timed_out) {
      out.status = ExecStatus::Timeout;
    } else if (WIFEXITED(wstatus) && WEXITSTATUS(wstatus) == 0) {
      out.status = ExecStatus::Success;
      out.extracted_answer = last_nonempty_line(out.stdout_text);
    } else if (WIFEXITED(wstatus) && WEXITSTATUS(wstatus) == kDriverExceptionExit) {
      out.status = ExecStatus::RuntimeError;
    } else {
      out.status = ExecStatus::NonZeroExit;
    }
  } catch (const std::exception& e) {
    out.status = ExecStatus::LaunchFailure;
    out.stderr_text = e.what();
    out.wall_time = elapsed();
  }
  return out;
}

ResolvedAnswer resolve_code_rollout(const ParsedResponse& parsed, const ExecLimits& limits) {
  ResolvedAnswer fallback{ReasoningFormat::CodeText, parsed.answer};
  if (!is_code_format(parsed.format) || !parsed.code_block) return fallback;
  CodeSplit split;
  try {
    split = extract_code(parsed);
  } catch (const std::exception&) {
    return fallback;
  }
  const ExecOutcome outcome = execute(split.function_source, split.call_line, limits);
  if (outcome.status != ExecStatus::Success || !outcome.extracted_answer) return fallback;
  return {ReasoningFormat::CodeExec, *outcome.extracted_answer};
}

std::vector<ExecOutcome> execute_all(const std::vector<ExecJob>& jobs, const ExecLimits& limits,
                                     unsigned workers) {
  std::vector<ExecOutcome> results(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      results[i] = execute(jobs[i].function_source, jobs[i].call_line, limits);
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(jobs.size())));
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
  }
  return results;
}

}  // namespace arm_alp
