#include "crnlyap/parse.hpp"

#include "crnlyap/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <map>
#include <sstream>

namespace crnlyap {

namespace {

struct Term {
  Rational coeff;
  std::string species;  // empty for the zero complex
};

struct RawReaction {
  std::vector<Term> reactant;
  std::vector<Term> product;
  double rate = 0.0;
  std::optional<Rational> rate_exact;
  int line = 0;
  int column = 0;
};

class LineScanner {
public:
  LineScanner(const std::string& text, int line) : text_(text), line_(line) {}

  void skip_spaces() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }
  bool at_end() {
    skip_spaces();
    return pos_ >= text_.size();
  }
  int column() const { return static_cast<int>(pos_) + 1; }
  char peek() { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  bool try_consume(const std::string& token) {
    skip_spaces();
    if (text_.compare(pos_, token.size(), token) == 0) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  void expect(const std::string& token, const std::string& what) {
    skip_spaces();
    if (!try_consume(token)) fail("expected " + what);
  }

  [[noreturn]] void fail(const std::string& message) {
    skip_spaces();
    throw SyntaxError(message, line_, column());
  }
  [[noreturn]] void fail_at(int column, const std::string& message) {
    throw SyntaxError(message, line_, column);
  }
  int line() const { return line_; }

  // digits [ "/" digits ] -- the only numeric form allowed for coefficients
  Rational rational_token() {
    skip_spaces();
    size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == start) fail("expected a number");
    if (pos_ < text_.size() && text_[pos_] == '/') {
      ++pos_;
      size_t den_start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (pos_ == den_start) fail("expected denominator digits after '/'");
    }
    auto parsed = Rational::parse(text_.substr(start, pos_ - start));
    if (!parsed) {
      pos_ = start;
      fail("number out of range");
    }
    return *parsed;
  }

  // decimal (optionally with exponent) or fraction; keeps the exact value
  // whenever it fits in a 64-bit rational
  std::pair<double, std::optional<Rational>> number_token() {
    skip_spaces();
    size_t start = pos_;
    auto digit_run = [&] {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    };
    digit_run();
    if (pos_ == start) fail("expected a number");
    if (pos_ < text_.size() && text_[pos_] == '/') {
      ++pos_;
      digit_run();
    } else {
      if (pos_ < text_.size() && text_[pos_] == '.') {
        ++pos_;
        digit_run();
      }
      if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
        ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
        digit_run();
      }
    }
    std::string token = text_.substr(start, pos_ - start);
    if (auto exact = Rational::parse(token)) return {to_double(*exact), exact};
    char* end = nullptr;
    double value = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size()) {
      pos_ = start;
      fail("malformed number '" + token + "'");
    }
    return {value, std::nullopt};
  }

  std::string identifier() {
    skip_spaces();
    size_t start = pos_;
    if (pos_ < text_.size() &&
        (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
    }
    if (pos_ == start) fail("expected a species name");
    return text_.substr(start, pos_ - start);
  }

private:
  const std::string& text_;
  size_t pos_ = 0;
  int line_;
};

std::vector<Term> parse_side(LineScanner& sc) {
  std::vector<Term> terms;
  // "0" alone denotes the empty complex
  sc.skip_spaces();
  if (std::isdigit(static_cast<unsigned char>(sc.peek()))) {
    int mark_col = sc.column();
    Rational coeff = sc.rational_token();
    sc.skip_spaces();
    char next = sc.peek();
    if (next == '\0' || next == '-' || next == ';' || next == '+') {
      if (!coeff.is_zero())
        sc.fail_at(mark_col, "a side without species must be '0'");
      return terms;
    }
    Term t;
    t.coeff = coeff;
    t.species = sc.identifier();
    terms.push_back(std::move(t));
  } else {
    Term t;
    t.coeff = std::isdigit(static_cast<unsigned char>(sc.peek())) ? sc.rational_token()
                                                                  : Rational(1);
    t.species = sc.identifier();
    terms.push_back(std::move(t));
  }
  while (sc.try_consume("+")) {
    Term t;
    sc.skip_spaces();
    t.coeff = std::isdigit(static_cast<unsigned char>(sc.peek())) ? sc.rational_token()
                                                                  : Rational(1);
    t.species = sc.identifier();
    terms.push_back(std::move(t));
  }
  return terms;
}

std::string shortest_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

NetworkDocument parse_network(const std::string& text) {
  std::vector<RawReaction> raw;
  std::vector<std::string> species_order;
  std::map<std::string, int> species_index;

  auto intern = [&](const std::string& name) {
    auto it = species_index.find(name);
    if (it != species_index.end()) return it->second;
    int idx = static_cast<int>(species_order.size());
    species_order.push_back(name);
    species_index.emplace(name, idx);
    return idx;
  };

  int line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    std::string line = text.substr(pos, eol == std::string::npos ? std::string::npos : eol - pos);
    pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();

    LineScanner sc(line, line_no);
    if (sc.at_end() || sc.peek() == '#') continue;

    RawReaction rxn;
    rxn.line = line_no;
    rxn.column = sc.column();
    rxn.reactant = parse_side(sc);
    sc.expect("->", "'->'");
    rxn.product = parse_side(sc);
    sc.expect(";", "';'");
    sc.expect("k", "'k'");
    sc.expect("=", "'='");
    std::tie(rxn.rate, rxn.rate_exact) = sc.number_token();
    if (!sc.at_end()) sc.fail("unexpected trailing text");
    if (!(rxn.rate > 0.0))
      throw Error(ErrorCode::NonpositiveRate, "line " + std::to_string(line_no) +
                                                  ": rate must be positive");
    for (const Term& t : rxn.reactant)
      if (!t.species.empty()) intern(t.species);
    for (const Term& t : rxn.product)
      if (!t.species.empty()) intern(t.species);
    raw.push_back(std::move(rxn));
  }

  if (raw.empty()) throw SyntaxError("no reactions found", std::max(line_no, 1), 1);
  if (species_order.empty()) throw SyntaxError("no species mentioned", raw[0].line, raw[0].column);

  const auto n = static_cast<Eigen::Index>(species_order.size());
  auto materialize = [&](const std::vector<Term>& terms) {
    RationalVector v = RationalVector::Zero(n);
    for (const Term& t : terms)
      if (!t.species.empty()) v[species_index[t.species]] += t.coeff;
    return v;
  };

  std::vector<Reaction> reactions;
  std::vector<std::pair<int, int>> spans;
  for (const RawReaction& rxn : raw) {
    Reaction out;
    out.reactant = materialize(rxn.reactant);
    out.product = materialize(rxn.product);
    out.rate = rxn.rate;
    out.rate_exact = rxn.rate_exact;
    if (out.reactant == out.product)
      throw Error(ErrorCode::SelfLoopReaction,
                  "line " + std::to_string(rxn.line) + ": reaction has identical sides");
    reactions.push_back(std::move(out));
    spans.emplace_back(rxn.line, rxn.column);
  }

  return NetworkDocument{Network(std::move(species_order), std::move(reactions)),
                         std::move(spans)};
}

std::string print_complex(const Network& net, const RationalVector& complex) {
  std::string out;
  for (Eigen::Index j = 0; j < complex.size(); ++j) {
    const Rational& c = complex[j];
    if (c.is_zero()) continue;
    if (!out.empty()) out += " + ";
    if (c != Rational(1)) {
      out += c.str();
      out += ' ';
    }
    out += net.species()[static_cast<size_t>(j)];
  }
  return out.empty() ? "0" : out;
}

std::string print_network(const Network& net) {
  std::string out;
  for (const Reaction& rxn : net.reactions()) {
    out += print_complex(net, rxn.reactant);
    out += " -> ";
    out += print_complex(net, rxn.product);
    out += " ; k = ";
    out += rxn.rate_exact ? rxn.rate_exact->str() : shortest_double(rxn.rate);
    out += '\n';
  }
  return out;
}

RationalVector parse_dmatrix(const std::string& text) {
  std::vector<Rational> entries;
  size_t pos = 0;
  while (true) {
    size_t comma = text.find(',', pos);
    std::string piece = text.substr(pos, comma == std::string::npos ? std::string::npos
                                                                    : comma - pos);
    // trim
    size_t b = piece.find_first_not_of(" \t");
    size_t e = piece.find_last_not_of(" \t");
    if (b == std::string::npos)
      throw SyntaxError("empty diagonal entry", 1, static_cast<int>(pos) + 1);
    piece = piece.substr(b, e - b + 1);
    auto parsed = Rational::parse(piece);
    if (!parsed)
      throw SyntaxError("'" + piece + "' is not an exact rational", 1,
                        static_cast<int>(pos) + 1);
    if (!parsed->is_positive())
      throw Error(ErrorCode::NonpositiveEntry,
                  "diagonal entry " + piece + " must be positive");
    entries.push_back(*parsed);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  RationalVector v(static_cast<Eigen::Index>(entries.size()));
  for (size_t i = 0; i < entries.size(); ++i) v[static_cast<Eigen::Index>(i)] = entries[i];
  return v;
}

}  // namespace crnlyap
