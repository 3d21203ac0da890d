#include "mgl/session.hpp"

#include <boost/asio.hpp>
#include <json.hpp>
#include <thread>

#include "mgl/error.hpp"

namespace mgl {

using json = nlohmann::json;

struct ExternalBackend::Connection {
  boost::asio::ip::tcp::iostream stream;
};

ExternalBackend::ExternalBackend(std::string host, std::string port, std::chrono::milliseconds poll_interval,
                                 std::chrono::milliseconds timeout)
    : host_(std::move(host)), port_(std::move(port)), poll_(poll_interval), timeout_(timeout) {}

ExternalBackend::~ExternalBackend() = default;

std::string ExternalBackend::run(int cell, const std::string& code, const std::function<void()>& on_waiting) {
  auto deadline = std::chrono::steady_clock::now() + timeout_;
  if (!conn_) {
    conn_ = std::make_unique<Connection>();
    conn_->stream.expires_after(timeout_);
    conn_->stream.connect(host_, port_);
    if (!conn_->stream) {
      std::string why = conn_->stream.error().message();
      conn_.reset();
      throw Error(Errc::BackendError, "cannot connect to " + host_ + ":" + port_ + ": " + why,
                  {{"address", host_ + ":" + port_}});
    }
  }
  auto& s = conn_->stream;
  auto exchange = [&](const json& request) {
    s.expires_at(deadline);
    s << request.dump() << '\n' << std::flush;
    std::string line;
    if (!std::getline(s, line)) {
      bool timed_out = s.error() == boost::asio::error::timed_out || std::chrono::steady_clock::now() >= deadline;
      conn_.reset();
      if (timed_out) throw Error(Errc::BackendTimeout, "backend timed out", {{"cell", std::to_string(cell)}});
      throw Error(Errc::BackendError, "backend closed the connection", {{"cell", std::to_string(cell)}});
    }
    try {
      return json::parse(line);
    } catch (const json::exception&) {
      throw Error(Errc::BackendError, "malformed backend response: " + line, {{"cell", std::to_string(cell)}});
    }
  };

  json reply = exchange({{"cell", cell}, {"code", code}});
  bool waited = false;
  while (reply.value("status", "") == "computing") {
    if (!waited && on_waiting) on_waiting();
    waited = true;
    if (std::chrono::steady_clock::now() + poll_ >= deadline) {
      conn_.reset();
      throw Error(Errc::BackendTimeout, "backend timed out", {{"cell", std::to_string(cell)}});
    }
    std::this_thread::sleep_for(poll_);
    reply = exchange({{"cell", cell}, {"poll", true}});
  }
  if (reply.value("status", "") != "done")
    throw Error(Errc::BackendError, "unexpected backend status " + reply.value("status", std::string("?")),
                {{"cell", std::to_string(cell)}});
  return reply.value("output", "");
}

Session::Session(const Evaluator& evaluator, std::shared_ptr<Backend> backend)
    : ev_(evaluator), backend_(std::move(backend)) {}

CommandResult Session::eval(const Tree& cmd, const std::function<void()>& on_waiting) {
  Category cat = typecheck(cmd, ev_.grammar().abstract());
  if (cat != "Command")
    throw Error(Errc::TypeMismatch, "expected a Command, found " + cat, {{"expected", "Command"}, {"found", cat}});
  const std::string& f = cmd.ctor();
  CommandResult r{{}, cmd, false};
  auto waiting = [&] {
    r.waited = true;
    if (on_waiting) on_waiting();
  };

  if (f == "CComputeNum") {
    const Tree& v = cmd.child(0);
    Tree value = v;
    if (backend_) {
      r.block.output = backend_->run(cell_, ev_.code(v), waiting);
      value = ev_.parse_cas(r.block.output);
    } else {
      ExactExpr e = ev_.simplify(v, bindings_);
      r.block.output = render_cas(e);
      value = ev_.to_tree(e);
    }
    r.block.kind = CellBlock::Kind::Return;
    r.answer = feedback_ ? Tree::node("FeedbackNum", {v, value}) : Tree::node("SimpleNum", {value});
  } else if (f == "Assume") {
    if (backend_) backend_->run(cell_, ev_.code(cmd), waiting);
    assumptions_.push_back(cmd.child(0));
    r.answer = Tree::node("Assumed", {cmd.child(0)});
  } else {  // AssignNum
    const Tree& x = cmd.child(0);
    Tree shown = cmd.child(1);
    if (backend_) {
      backend_->run(cell_, ev_.code(cmd), waiting);
    } else {
      ExactExpr e = ev_.simplify(cmd.child(1), bindings_);
      shown = ev_.to_tree(e);
      bindings_[x.token()] = std::move(e);
    }
    r.answer = Tree::node("AssignedNum", {x, shown});
  }
  r.block.cell = cell_++;
  return r;
}

}  // namespace mgl
