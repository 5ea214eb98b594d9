#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace crnlyap {

/// Minimal JSON value with insertion-ordered objects and fixed number
/// formatting (17 significant digits), so identical runs produce
/// byte-identical output.
class JsonValue {
public:
  JsonValue() : kind_(Kind::Null) {}
  JsonValue(bool b) : kind_(Kind::Bool), bool_(b) {}
  JsonValue(int v) : kind_(Kind::Int), int_(v) {}
  JsonValue(long v) : kind_(Kind::Int), int_(v) {}
  JsonValue(long long v) : kind_(Kind::Int), int_(v) {}
  JsonValue(unsigned long long v) : kind_(Kind::Int), int_(static_cast<long long>(v)) {}
  JsonValue(double v) : kind_(Kind::Double), double_(v) {}
  JsonValue(const char* s) : kind_(Kind::String), string_(s) {}
  JsonValue(std::string s) : kind_(Kind::String), string_(std::move(s)) {}

  static JsonValue object();
  static JsonValue array();

  JsonValue& set(const std::string& key, JsonValue value);  // object insert, keeps order
  JsonValue& push(JsonValue value);                         // array append

  std::string dump(int indent = 2) const;

private:
  enum class Kind { Null, Bool, Int, Double, String, Array, Object };

  void write(std::string& out, int indent, int depth) const;

  Kind kind_;
  bool bool_ = false;
  long long int_ = 0;
  double double_ = 0.0;
  std::string string_;
  std::vector<JsonValue> items_;
  std::vector<std::pair<std::string, JsonValue>> members_;
};

JsonValue json_vector(const std::vector<double>& v);

}  // namespace crnlyap
