#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <iterator>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <variant>

#include "slice_embed/errors.hpp"
#include "slice_embed/formulation.hpp"
#include "slice_embed/text.hpp"

namespace slice_embed {

namespace {

constexpr std::size_t kTermsPerLine = 6;
constexpr double kInfinity = std::numeric_limits<double>::infinity();

void write_expr(std::ostream& out, const LinearExpr& expr, const MilpProblem& problem) {
  if (expr.terms.empty()) {
    out << " 0 " << problem.variables.front().name();
    return;
  }
  std::size_t on_line = 0;
  for (const auto& term : expr.terms) {
    if (on_line == kTermsPerLine) {
      out << "\n   ";
      on_line = 0;
    }
    out << (std::signbit(term.coef) ? " - " : " + ") << format_number(std::fabs(term.coef)) << ' '
        << problem.variables[term.var].name();
    ++on_line;
  }
}

std::string bound_text(double value) {
  if (value == kInfinity) return "+inf";
  if (value == -kInfinity) return "-inf";
  return format_number(value);
}

enum class TokenKind { kNumber, kName, kSign, kRelation, kColon, kEnd };

struct Token {
  TokenKind kind = TokenKind::kEnd;
  std::string text;
  double number = 0.0;
  std::size_t line = 0;
};

std::vector<Token> tokenize(std::istream& in) {
  std::vector<Token> tokens;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto comment = line.find('\\'); comment != std::string::npos) line.resize(comment);
    std::size_t pos = 0;
    while (pos < line.size()) {
      const char c = line[pos];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos;
      } else if (c == '+' || c == '-') {
        tokens.push_back({TokenKind::kSign, std::string(1, c), 0.0, line_no});
        ++pos;
      } else if (c == ':') {
        tokens.push_back({TokenKind::kColon, ":", 0.0, line_no});
        ++pos;
      } else if (c == '<' || c == '>' || c == '=') {
        char op = c;
        ++pos;
        if (pos < line.size() && line[pos] == '=') {
          if (c == '=') throw ParseError("unexpected '=='", line_no);
          ++pos;
        } else if (c == '=' && pos < line.size() && (line[pos] == '<' || line[pos] == '>')) {
          op = line[pos++];  // "=<" and "=>"
        }
        tokens.push_back({TokenKind::kRelation, std::string(1, op), 0.0, line_no});
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        std::size_t end = pos;
        while (end < line.size() &&
               (std::isdigit(static_cast<unsigned char>(line[end])) || line[end] == '.' || line[end] == 'e' ||
                line[end] == 'E' ||
                ((line[end] == '+' || line[end] == '-') && (line[end - 1] == 'e' || line[end - 1] == 'E')))) {
          ++end;
        }
        const std::string text = line.substr(pos, end - pos);
        Token token{TokenKind::kNumber, text, 0.0, line_no};
        try {
          token.number = parse_number(text);
        } catch (const std::invalid_argument&) {
          throw ParseError("bad number '" + text + "'", line_no);
        }
        tokens.push_back(std::move(token));
        pos = end;
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t end = pos;
        while (end < line.size() &&
               (std::isalnum(static_cast<unsigned char>(line[end])) || line[end] == '_' || line[end] == '.')) {
          ++end;
        }
        tokens.push_back({TokenKind::kName, line.substr(pos, end - pos), 0.0, line_no});
        pos = end;
      } else {
        throw ParseError(std::string("unexpected character '") + c + "'", line_no);
      }
    }
  }
  tokens.push_back({TokenKind::kEnd, "", 0.0, line_no});
  return tokens;
}

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

enum class Section { kNone, kObjective, kConstraints, kBounds, kBinary, kEnd };

struct RawRow {
  std::string name;
  std::vector<std::pair<std::string, double>> terms;
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
  std::size_t line = 0;
};

struct Bound {
  double lo = 0.0;
  double hi = kInfinity;
};

class LpReader {
 public:
  explicit LpReader(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  MilpProblem read();

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  const Token& next() { return tokens_[std::min(pos_++, tokens_.size() - 1)]; }

  std::optional<Section> section_keyword();
  bool at_section() {
    const std::size_t saved = pos_;
    const bool found = section_keyword().has_value();
    pos_ = saved;
    return found;
  }
  std::vector<std::pair<std::string, double>> read_expr();
  Sense read_relation();
  double read_signed_value();
  void read_bound();

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::vector<std::pair<std::string, double>> objective_;
  std::vector<RawRow> rows_;
  std::map<std::string, Bound> bounds_;
  std::vector<std::string> binaries_;
  std::vector<std::string> seen_;
};

// Consumes a section header if one starts at the current token.
std::optional<Section> LpReader::section_keyword() {
  const Token& token = peek();
  if (token.kind != TokenKind::kName) return std::nullopt;
  if (peek(1).kind == TokenKind::kColon) return std::nullopt;
  const auto word = lower(token.text);
  if (word == "minimize" || word == "minimise" || word == "min") {
    ++pos_;
    return Section::kObjective;
  }
  if (word == "maximize" || word == "maximise" || word == "max") {
    throw ParseError("only minimisation problems are supported", token.line);
  }
  if (word == "subject" && peek(1).kind == TokenKind::kName && lower(peek(1).text) == "to") {
    pos_ += 2;
    return Section::kConstraints;
  }
  if (word == "st" || word == "s.t.") {
    ++pos_;
    return Section::kConstraints;
  }
  if (word == "bounds" || word == "bound") {
    ++pos_;
    return Section::kBounds;
  }
  if (word == "binary" || word == "binaries" || word == "bin") {
    ++pos_;
    return Section::kBinary;
  }
  if (word == "general" || word == "generals" || word == "gen" || word == "semi-continuous") {
    throw ParseError("section '" + token.text + "' is not supported", token.line);
  }
  if (word == "end") {
    ++pos_;
    return Section::kEnd;
  }
  return std::nullopt;
}

std::vector<std::pair<std::string, double>> LpReader::read_expr() {
  std::vector<std::pair<std::string, double>> terms;
  while (true) {
    const Token& token = peek();
    if (token.kind == TokenKind::kRelation || token.kind == TokenKind::kEnd) break;
    if (token.kind == TokenKind::kName && (peek(1).kind == TokenKind::kColon || at_section())) break;
    double sign = 1.0;
    while (peek().kind == TokenKind::kSign) sign *= next().text == "-" ? -1.0 : 1.0;
    double coef = 1.0;
    if (peek().kind == TokenKind::kNumber) coef = next().number;
    const Token& name = next();
    if (name.kind != TokenKind::kName) throw ParseError("expected a variable name", name.line);
    terms.emplace_back(name.text, sign * coef);
    seen_.push_back(name.text);
  }
  return terms;
}

Sense LpReader::read_relation() {
  const Token& token = next();
  if (token.kind != TokenKind::kRelation) throw ParseError("expected <=, >= or =", token.line);
  if (token.text == "<") return Sense::kLessEqual;
  if (token.text == ">") return Sense::kGreaterEqual;
  return Sense::kEqual;
}

double LpReader::read_signed_value() {
  double sign = 1.0;
  while (peek().kind == TokenKind::kSign) sign *= next().text == "-" ? -1.0 : 1.0;
  const Token& token = next();
  if (token.kind == TokenKind::kNumber) return sign * token.number;
  if (token.kind == TokenKind::kName) {
    const auto word = lower(token.text);
    if (word == "inf" || word == "infinity") return sign * kInfinity;
  }
  throw ParseError("expected a number", token.line);
}

void LpReader::read_bound() {
  const std::size_t line = peek().line;
  auto apply = [&](const std::string& name, Sense sense, double value) {
    auto& bound = bounds_[name];
    if (sense == Sense::kEqual) {
      bound.lo = bound.hi = value;
    } else if (sense == Sense::kLessEqual) {
      bound.hi = value;
    } else {
      bound.lo = value;
    }
  };
  auto flip = [](Sense sense) {
    if (sense == Sense::kLessEqual) return Sense::kGreaterEqual;
    if (sense == Sense::kGreaterEqual) return Sense::kLessEqual;
    return sense;
  };
  if (peek().kind == TokenKind::kName && lower(peek().text) != "inf" && lower(peek().text) != "infinity") {
    const std::string name = next().text;
    seen_.push_back(name);
    if (peek().kind == TokenKind::kName && lower(peek().text) == "free") {
      ++pos_;
      auto& bound = bounds_[name];
      bound = Bound{-kInfinity, kInfinity};
      return;
    }
    const Sense sense = read_relation();
    apply(name, sense, read_signed_value());
    return;
  }
  const double value = read_signed_value();
  const Sense first = read_relation();
  const Token& name = next();
  if (name.kind != TokenKind::kName) throw ParseError("expected a variable name in bound", line);
  seen_.push_back(name.text);
  apply(name.text, flip(first), value);
  if (peek().kind == TokenKind::kRelation) {
    const Sense second = read_relation();
    apply(name.text, second, read_signed_value());
  }
}

MilpProblem LpReader::read() {
  Section section = Section::kNone;
  bool have_objective = false;
  while (peek().kind != TokenKind::kEnd && section != Section::kEnd) {
    if (const auto header = section_keyword()) {
      section = *header;
      continue;
    }
    const std::size_t line = peek().line;
    switch (section) {
      case Section::kNone:
        throw ParseError("expected 'Minimize'", line);
      case Section::kObjective:
        if (have_objective) throw ParseError("objective already read", line);
        if (peek().kind == TokenKind::kName && peek(1).kind == TokenKind::kColon) pos_ += 2;
        objective_ = read_expr();
        have_objective = true;
        break;
      case Section::kConstraints: {
        RawRow row;
        row.line = line;
        if (!(peek().kind == TokenKind::kName && peek(1).kind == TokenKind::kColon)) {
          throw ParseError("constraints must be named", line);
        }
        row.name = next().text;
        ++pos_;
        row.terms = read_expr();
        row.sense = read_relation();
        row.rhs = read_signed_value();
        rows_.push_back(std::move(row));
        break;
      }
      case Section::kBounds:
        read_bound();
        break;
      case Section::kBinary: {
        const Token& token = next();
        if (token.kind != TokenKind::kName) throw ParseError("expected a variable name", token.line);
        binaries_.push_back(token.text);
        seen_.push_back(token.text);
        break;
      }
      case Section::kEnd:
        break;
    }
  }
  if (!have_objective) throw ParseError("missing objective", peek().line);

  // Canonical column order: assignments by (vnf, server), then flows by
  // (vlink, link, direction), which matches build_problem.
  std::sort(seen_.begin(), seen_.end());
  seen_.erase(std::unique(seen_.begin(), seen_.end()), seen_.end());
  struct Column {
    std::string name;
    std::variant<AssignmentVar, FlowVar> kind;
  };
  std::vector<Column> columns;
  for (const auto& name : seen_) {
    const auto parsed = parse_variable_name(name);
    if (!parsed) throw ParseError("unrecognized variable name '" + name + "'", 0);
    columns.push_back({name, *parsed});
  }
  auto key = [](const Column& c) {
    if (const auto* x = std::get_if<AssignmentVar>(&c.kind)) {
      return std::tuple<int, std::size_t, std::size_t, int>(0, x->vnf, x->server, 0);
    }
    const auto& f = std::get<FlowVar>(c.kind);
    return std::tuple<int, std::size_t, std::size_t, int>(1, f.vlink, f.link.value, f.forward ? 0 : 1);
  };
  std::sort(columns.begin(), columns.end(), [&](const Column& a, const Column& b) { return key(a) < key(b); });

  MilpProblem problem;
  std::map<std::string, std::size_t> index;
  for (const auto& column : columns) {
    index.emplace(column.name, problem.variables.size());
    problem.variables.push_back(VariableRef{column.kind, Integrality::kContinuous, 0.0, kInfinity});
  }
  for (const auto& name : binaries_) {
    auto& var = problem.variables[index.at(name)];
    var.integrality = Integrality::kBinary;
    var.lo = 0.0;
    var.hi = 1.0;
  }
  for (const auto& [name, bound] : bounds_) {
    auto& var = problem.variables[index.at(name)];
    var.lo = bound.lo;
    var.hi = bound.hi;
  }
  auto to_expr = [&](const std::vector<std::pair<std::string, double>>& terms) {
    LinearExpr expr;
    for (const auto& [name, coef] : terms) {
      if (coef != 0.0) expr.add(index.at(name), coef);
    }
    return expr;
  };
  problem.objective = to_expr(objective_);
  for (const auto& raw : rows_) {
    ConstraintRow row;
    row.expr = to_expr(raw.terms);
    row.sense = raw.sense;
    row.rhs = raw.rhs;
    row.name = raw.name;
    if (raw.name.starts_with("iso_")) {
      row.family = RowFamily::kIsolation;
    } else if (raw.name == "delay") {
      row.family = RowFamily::kDelay;
    } else if (raw.name.starts_with("assign_")) {
      row.family = RowFamily::kAssign;
    } else if (raw.name.starts_with("cap_")) {
      row.family = RowFamily::kNodeCapacity;
    } else if (raw.name.starts_with("flow_")) {
      row.family = RowFamily::kFlowConservation;
    } else if (raw.name.starts_with("link_")) {
      row.family = RowFamily::kLinkCapacity;
    } else if (raw.name.starts_with("compat_")) {
      row.family = RowFamily::kCompatibility;
    } else {
      throw ParseError("unrecognized row name '" + raw.name + "'", raw.line);
    }
    problem.rows.push_back(std::move(row));
  }
  return problem;
}

}  // namespace

void write_lp(std::ostream& out, const MilpProblem& problem) {
  if (problem.variables.empty()) throw ConfigurationError("cannot write an LP without variables");
  out << "\\ slice embedding MILP\n";
  out << "Minimize\n obj:";
  write_expr(out, problem.objective, problem);
  out << "\nSubject To\n";
  for (const auto& row : problem.rows) {
    out << ' ' << row.name << ':';
    write_expr(out, row.expr, problem);
    out << ' ' << sense_symbol(row.sense) << ' ' << format_number(row.rhs) << '\n';
  }
  out << "Bounds\n";
  for (const auto& var : problem.variables) {
    const bool binary = var.integrality == Integrality::kBinary;
    const double default_hi = binary ? 1.0 : kInfinity;
    if (var.lo == 0.0 && var.hi == default_hi) continue;
    if (var.lo == var.hi) {
      out << ' ' << var.name() << " = " << format_number(var.lo) << '\n';
    } else {
      out << ' ' << bound_text(var.lo) << " <= " << var.name() << " <= " << bound_text(var.hi) << '\n';
    }
  }
  out << "Binary\n";
  for (const auto& var : problem.variables) {
    if (var.integrality == Integrality::kBinary) out << ' ' << var.name() << '\n';
  }
  out << "End\n";
}

MilpProblem read_lp(std::istream& in) { return LpReader(tokenize(in)).read(); }

}  // namespace slice_embed
