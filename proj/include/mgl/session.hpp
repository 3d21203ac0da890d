#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "mgl/cas.hpp"

namespace mgl {

struct CellBlock {
  enum class Kind { Return, Empty };

  Kind kind = Kind::Empty;
  int cell = 0;
  std::string output;  // Return only
};

struct CommandResult {
  CellBlock block;
  Tree answer;
  bool waited = false;  // the backend answered "computing" at least once
};

/// A CAS that evaluates worksheet cells.
class Backend {
 public:
  virtual ~Backend() = default;
  /// Runs `code` in `cell` and returns its output; `on_waiting` fires
  /// once when the result is not ready immediately.
  virtual std::string run(int cell, const std::string& code, const std::function<void()>& on_waiting) = 0;
};

/// Newline-delimited JSON over TCP. Request {"cell", "code"}, response
/// {"cell", "status": "done"|"computing", "output"}; a pending cell is polled
/// with {"cell", "poll": true}.
class ExternalBackend : public Backend {
 public:
  ExternalBackend(std::string host, std::string port,
                  std::chrono::milliseconds poll_interval = std::chrono::milliseconds(250),
                  std::chrono::milliseconds timeout = std::chrono::seconds(30));
  ~ExternalBackend() override;

  /// Throws BackendTimeout, BackendError.
  std::string run(int cell, const std::string& code, const std::function<void()>& on_waiting) override;

 private:
  struct Connection;
  std::string host_, port_;
  std::chrono::milliseconds poll_, timeout_;
  std::unique_ptr<Connection> conn_;
};

/// One worksheet: numbered cells, variable bindings and stored
/// assumptions. Without a backend, commands run on the built-in evaluator.
class Session {
 public:
  explicit Session(const Evaluator& evaluator, std::shared_ptr<Backend> backend = nullptr);

  /// Compute yields a ReturnBlock, Assume and Assign an EmptyBlock. The
  /// cell counter advances once per successful command.
  CommandResult eval(const Tree& cmd, const std::function<void()>& on_waiting = {});

  int next_cell() const { return cell_; }
  const Bindings& bindings() const { return bindings_; }
  const std::vector<Tree>& assumptions() const { return assumptions_; }

  /// Answer computations with FeedbackNum ("the question is the result").
  void set_feedback(bool on) { feedback_ = on; }

 private:
  const Evaluator& ev_;
  std::shared_ptr<Backend> backend_;
  int cell_ = 1;
  Bindings bindings_;
  std::vector<Tree> assumptions_;
  bool feedback_ = false;
};

inline CommandResult eval_command(Session& s, const Tree& cmd) { return s.eval(cmd); }

}  // namespace mgl
