#pragma once

#include "weaver/circuit.hpp"
#include "weaver/device.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace weaver {

/// Annotation line we do not understand; kept verbatim so rewriting a
/// file never drops information.
struct OpaqueAnnotation {
  std::string text; // full line including the leading '@'

  friend bool operator==(const OpaqueAnnotation&, const OpaqueAnnotation&) = default;
};

using Annotation = std::variant<FpqaInstruction, OpaqueAnnotation>;

/// One OpenQASM statement with the annotation lines that precede it.
struct WqasmStatement {
  enum class Kind { Gate, Measure, Barrier };

  std::vector<Annotation> annotations;
  Kind kind = Kind::Gate;
  LogicalGate gate;        // valid for Kind::Gate
  std::vector<int> qubits; // operands for measure / barrier

  friend bool operator==(const WqasmStatement&, const WqasmStatement&) = default;
};

struct WqasmProgram {
  int numQubits = 0;
  std::vector<WqasmStatement> statements;
  std::vector<Annotation> trailing; // annotations after the last statement

  friend bool operator==(const WqasmProgram&, const WqasmProgram&) = default;
};

struct WqasmParseError : std::runtime_error {
  WqasmParseError(int line, int column, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ", col " +
                           std::to_string(column) + ": " + what),
        line(line), column(column) {}
  int line;
  int column;
};

/// Nearest point on the 1e-6 grid; applied by program builders so that
/// parse(emit(p)) == p holds structurally.
inline double quantize(double value) {
  return std::round(value * 1e6) / 1e6;
}

namespace detail {

/// Fixed 6-decimal rendering so emitted files are byte-stable. A double
/// that is already quantized to the 1e-6 grid round-trips exactly
/// through emit + parse (both directions round to nearest).
inline std::string formatDouble(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

inline void emitAnnotation(std::ostream& out, const Annotation& ann) {
  if (const auto* opaque = std::get_if<OpaqueAnnotation>(&ann)) {
    out << opaque->text << '\n';
    return;
  }
  const auto& instr = std::get<FpqaInstruction>(ann);
  struct Visitor {
    std::ostream& out;
    void operator()(const SlmInit& s) const {
      out << "@slm [";
      for (std::size_t i = 0; i < s.positions.size(); ++i) {
        if (i != 0) {
          out << ", ";
        }
        out << '(' << formatDouble(s.positions[i].x) << ", "
            << formatDouble(s.positions[i].y) << ')';
      }
      out << ']';
    }
    void operator()(const AodInit& a) const {
      auto list = [&](const std::vector<double>& v) {
        out << '[';
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (i != 0) {
            out << ", ";
          }
          out << formatDouble(v[i]);
        }
        out << ']';
      };
      out << "@aod ";
      list(a.xs);
      out << ' ';
      list(a.ys);
    }
    void operator()(const Bind& b) const {
      out << "@bind q" << b.qubit << ' ';
      if (b.trap.kind == TrapRef::Kind::Slm) {
        out << "slm " << b.trap.slm_index;
      } else {
        out << "aod " << b.trap.aod_col << ' ' << b.trap.aod_row;
      }
    }
    void operator()(const Transfer& t) const {
      out << "@transfer " << t.slm_index << " (" << t.aod_col << ", " << t.aod_row
          << ')';
    }
    void operator()(const Shuttle& s) const {
      out << "@shuttle " << (s.axis == Axis::Row ? "row" : "column") << ' '
          << s.index << ' ' << formatDouble(s.offset);
    }
    void operator()(const RamanLocal& r) const {
      out << "@raman local q" << r.qubit << ' ' << formatDouble(r.x) << ' '
          << formatDouble(r.y) << ' ' << formatDouble(r.z);
    }
    void operator()(const RamanGlobal& r) const {
      out << "@raman global " << formatDouble(r.x) << ' ' << formatDouble(r.y)
          << ' ' << formatDouble(r.z);
    }
    void operator()(const Rydberg&) const { out << "@rydberg"; }
  };
  std::visit(Visitor{out}, instr);
  out << '\n';
}

/// Single-line token cursor with 1-based column reporting.
class Cursor {
public:
  Cursor(std::string_view text, int line) : text_(text), line_(line) {}

  void skipSpace() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t')) {
      ++pos_;
    }
  }

  [[nodiscard]] bool atEnd() {
    skipSpace();
    return pos_ >= text_.size();
  }

  [[nodiscard]] int column() const { return static_cast<int>(pos_) + 1; }
  [[nodiscard]] int line() const { return line_; }

  [[nodiscard]] char peek() {
    skipSpace();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  void expect(char c) {
    skipSpace();
    if (pos_ >= text_.size() || text_[pos_] != c) {
      fail(std::string("expected '") + c + "'");
    }
    ++pos_;
  }

  bool consume(char c) {
    skipSpace();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::string word() {
    skipSpace();
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) != 0 ||
            text_[pos_] == '_')) {
      ++pos_;
    }
    if (pos_ == start) {
      fail("expected identifier");
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  int integer() {
    skipSpace();
    int value = 0;
    std::size_t start = pos_;
    if (pos_ < text_.size() && text_[pos_] == '-') {
      ++pos_;
    }
    const auto [ptr, ec] = std::from_chars(text_.data() + pos_,
                                           text_.data() + text_.size(), value);
    if (ec != std::errc{}) {
      pos_ = start;
      fail("expected integer");
    }
    if (text_[start] == '-') {
      value = -value;
    }
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return value;
  }

  double number() {
    skipSpace();
    double value = 0;
    const auto [ptr, ec] = std::from_chars(text_.data() + pos_,
                                           text_.data() + text_.size(), value);
    if (ec != std::errc{}) {
      fail("expected number");
    }
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return value;
  }

  /// `q<N>` annotation operand, e.g. q12.
  int qubitName() {
    skipSpace();
    if (pos_ >= text_.size() || text_[pos_] != 'q') {
      fail("expected qubit name qN");
    }
    ++pos_;
    return integer();
  }

  /// `q[<N>]` statement operand.
  int qubitRef() {
    skipSpace();
    if (pos_ >= text_.size() || text_[pos_] != 'q') {
      fail("expected qubit reference q[N]");
    }
    ++pos_;
    expect('[');
    const int idx = integer();
    expect(']');
    return idx;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw WqasmParseError(line_, static_cast<int>(pos_) + 1, what);
  }

private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_;
};

inline Annotation parseAnnotation(const std::string& line, int lineNo) {
  Cursor cur(line, lineNo);
  cur.expect('@');
  const std::string name = cur.word();

  auto finish = [&](FpqaInstruction instr) -> Annotation {
    if (!cur.atEnd()) {
      cur.fail("trailing characters after annotation");
    }
    return instr;
  };

  if (name == "slm") {
    SlmInit slm;
    cur.expect('[');
    if (!cur.consume(']')) {
      do {
        cur.expect('(');
        Point p;
        p.x = cur.number();
        cur.expect(',');
        p.y = cur.number();
        cur.expect(')');
        slm.positions.push_back(p);
      } while (cur.consume(','));
      cur.expect(']');
    }
    return finish(slm);
  }
  if (name == "aod") {
    AodInit aod;
    auto list = [&](std::vector<double>& v) {
      cur.expect('[');
      if (cur.consume(']')) {
        return;
      }
      do {
        v.push_back(cur.number());
      } while (cur.consume(','));
      cur.expect(']');
    };
    list(aod.xs);
    list(aod.ys);
    return finish(aod);
  }
  if (name == "bind") {
    Bind bind;
    bind.qubit = cur.qubitName();
    const std::string kind = cur.word();
    if (kind == "slm") {
      bind.trap.kind = TrapRef::Kind::Slm;
      bind.trap.slm_index = cur.integer();
    } else if (kind == "aod") {
      bind.trap.kind = TrapRef::Kind::Aod;
      bind.trap.aod_col = cur.integer();
      bind.trap.aod_row = cur.integer();
    } else {
      cur.fail("expected 'slm' or 'aod'");
    }
    return finish(bind);
  }
  if (name == "transfer") {
    Transfer t;
    t.slm_index = cur.integer();
    cur.expect('(');
    t.aod_col = cur.integer();
    cur.expect(',');
    t.aod_row = cur.integer();
    cur.expect(')');
    return finish(t);
  }
  if (name == "shuttle") {
    Shuttle s;
    const std::string axis = cur.word();
    if (axis == "row") {
      s.axis = Axis::Row;
    } else if (axis == "column") {
      s.axis = Axis::Column;
    } else {
      cur.fail("expected 'row' or 'column'");
    }
    s.index = cur.integer();
    s.offset = cur.number();
    return finish(s);
  }
  if (name == "raman") {
    const std::string scope = cur.word();
    if (scope == "local") {
      RamanLocal r;
      r.qubit = cur.qubitName();
      r.x = cur.number();
      r.y = cur.number();
      r.z = cur.number();
      return finish(r);
    }
    if (scope == "global") {
      RamanGlobal r;
      r.x = cur.number();
      r.y = cur.number();
      r.z = cur.number();
      return finish(r);
    }
    cur.fail("expected 'local' or 'global'");
  }
  if (name == "rydberg") {
    return finish(Rydberg{});
  }
  // Unknown annotation: keep opaque.
  return OpaqueAnnotation{line};
}

inline std::optional<GateKind> gateKindFromName(const std::string& name) {
  for (const GateKind kind :
       {GateKind::U3, GateKind::RZ, GateKind::RX, GateKind::H, GateKind::X,
        GateKind::CZ, GateKind::CNOT, GateKind::CCZ, GateKind::CCNOT}) {
    if (name == gateName(kind)) {
      return kind;
    }
  }
  return std::nullopt;
}

} // namespace detail

inline void emit(const WqasmProgram& program, std::ostream& out) {
  out << "OPENQASM 3.0;\n";
  out << "qubit[" << program.numQubits << "] q;\n";
  for (const auto& stmt : program.statements) {
    for (const auto& ann : stmt.annotations) {
      detail::emitAnnotation(out, ann);
    }
    switch (stmt.kind) {
    case WqasmStatement::Kind::Gate: {
      const auto& g = stmt.gate;
      out << gateName(g.kind);
      if (!g.params.empty()) {
        out << '(';
        for (std::size_t i = 0; i < g.params.size(); ++i) {
          if (i != 0) {
            out << ", ";
          }
          out << detail::formatDouble(g.params[i]);
        }
        out << ')';
      }
      for (std::size_t i = 0; i < g.qubits.size(); ++i) {
        out << (i == 0 ? " " : ", ") << "q[" << g.qubits[i] << ']';
      }
      out << ";\n";
      break;
    }
    case WqasmStatement::Kind::Measure:
      out << "measure";
      for (std::size_t i = 0; i < stmt.qubits.size(); ++i) {
        out << (i == 0 ? " " : ", ") << "q[" << stmt.qubits[i] << ']';
      }
      out << ";\n";
      break;
    case WqasmStatement::Kind::Barrier:
      out << "barrier";
      for (std::size_t i = 0; i < stmt.qubits.size(); ++i) {
        out << (i == 0 ? " " : ", ") << "q[" << stmt.qubits[i] << ']';
      }
      out << ";\n";
      break;
    }
  }
  for (const auto& ann : program.trailing) {
    detail::emitAnnotation(out, ann);
  }
}

inline std::string emit(const WqasmProgram& program) {
  std::ostringstream out;
  emit(program, out);
  return out.str();
}

inline WqasmProgram parseWqasm(std::istream& in) {
  WqasmProgram program;
  std::string line;
  int lineNo = 0;
  bool sawHeader = false;
  bool sawDecl = false;
  std::vector<Annotation> pending;

  while (std::getline(in, line)) {
    ++lineNo;
    if (const auto comment = line.find("//"); comment != std::string::npos) {
      line.erase(comment);
    }
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t' ||
                             line.back() == '\r')) {
      line.pop_back();
    }
    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos) {
      continue;
    }
    if (first > 0) {
      line.erase(0, first);
    }

    if (!sawHeader) {
      if (line != "OPENQASM 3.0;") {
        throw WqasmParseError(lineNo, 1, "expected 'OPENQASM 3.0;' header");
      }
      sawHeader = true;
      continue;
    }

    if (line[0] == '@') {
      pending.push_back(detail::parseAnnotation(line, lineNo));
      continue;
    }

    detail::Cursor cur(line, lineNo);
    const std::string word = cur.word();

    if (word == "qubit") {
      if (sawDecl) {
        cur.fail("duplicate qubit declaration");
      }
      cur.expect('[');
      program.numQubits = cur.integer();
      if (program.numQubits < 0) {
        cur.fail("negative qubit count");
      }
      cur.expect(']');
      const std::string reg = cur.word();
      if (reg != "q") {
        cur.fail("register must be named 'q'");
      }
      cur.expect(';');
      if (!cur.atEnd()) {
        cur.fail("trailing characters");
      }
      if (!pending.empty()) {
        cur.fail("annotations may not precede the qubit declaration");
      }
      sawDecl = true;
      continue;
    }

    if (!sawDecl) {
      throw WqasmParseError(lineNo, 1, "statement before qubit declaration");
    }

    WqasmStatement stmt;
    stmt.annotations = std::move(pending);
    pending.clear();

    auto qubitList = [&](std::vector<int>& out) {
      if (cur.peek() == ';') {
        return;
      }
      do {
        const int q = cur.qubitRef();
        if (q < 0 || q >= program.numQubits) {
          cur.fail("qubit index out of range: " + std::to_string(q));
        }
        out.push_back(q);
      } while (cur.consume(','));
    };

    if (word == "measure") {
      stmt.kind = WqasmStatement::Kind::Measure;
      qubitList(stmt.qubits);
      if (stmt.qubits.empty()) {
        cur.fail("measure requires at least one qubit");
      }
    } else if (word == "barrier") {
      stmt.kind = WqasmStatement::Kind::Barrier;
      qubitList(stmt.qubits);
    } else {
      const auto kind = detail::gateKindFromName(word);
      if (!kind) {
        cur.fail("unknown gate '" + word + "'");
      }
      std::vector<double> params;
      if (cur.consume('(')) {
        do {
          params.push_back(cur.number());
        } while (cur.consume(','));
        cur.expect(')');
      }
      std::vector<int> qubits;
      qubitList(qubits);
      stmt.kind = WqasmStatement::Kind::Gate;
      try {
        stmt.gate = LogicalGate(*kind, std::move(qubits), std::move(params));
      } catch (const std::invalid_argument& e) {
        cur.fail(e.what());
      }
    }
    cur.expect(';');
    if (!cur.atEnd()) {
      cur.fail("trailing characters after statement");
    }
    program.statements.push_back(std::move(stmt));
  }

  if (!sawHeader) {
    throw WqasmParseError(lineNo, 1, "empty input, expected OPENQASM header");
  }
  if (!sawDecl) {
    throw WqasmParseError(lineNo, 1, "missing qubit declaration");
  }
  program.trailing = std::move(pending);
  return program;
}

inline WqasmProgram parseWqasm(const std::string& text) {
  std::istringstream in(text);
  return parseWqasm(in);
}

/// Copy of the program with every annotation removed; the result is
/// plain OpenQASM.
inline WqasmProgram stripAnnotations(const WqasmProgram& program) {
  WqasmProgram out;
  out.numQubits = program.numQubits;
  out.statements.reserve(program.statements.size());
  for (const auto& stmt : program.statements) {
    WqasmStatement copy = stmt;
    copy.annotations.clear();
    out.statements.push_back(std::move(copy));
  }
  return out;
}

} // namespace weaver
