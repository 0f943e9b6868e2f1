#pragma once

// Matrix and system files.
//   matrix: {"rows": n, "cols": n, "data": [[re, im] | number, ...]}  (row-major)
//   system: {"A": matrix, "B": [matrix, ...], "name": "...", "source": "..."}

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "stochlog/errors.hpp"
#include "stochlog/matcore.hpp"
#include "stochlog/system.hpp"

namespace stochlog {

struct SystemFile {
  SdeSystem system;
  std::string name;
  std::string source;
};

namespace detail {

using json = nlohmann::json;

inline std::string text_position(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline json parse_document(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // e.byte is one past the offending character
    const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
    std::string msg = e.what();
    const auto cut = msg.find("syntax error");
    if (cut != std::string::npos) msg = msg.substr(cut);
    throw ParseError(text_position(text, at), msg);
  } catch (const json::exception& e) {
    // number overflow and similar
    throw ParseError("", e.what());
  }
}

inline void only_keys(const json& obj, const std::string& where,
                      std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* key : allowed) ok = ok || it.key() == key;
    if (!ok) throw ParseError(where, "unknown field '" + it.key() + "'");
  }
}

inline double finite_number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ParseError(where, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ParseError(where, "number is not finite");
  return x;
}

inline std::size_t positive_size(const json& obj, const char* key, const std::string& where) {
  const std::string at = where.empty() ? key : where + "." + key;
  if (!obj.contains(key)) throw ParseError(where, std::string("missing field '") + key + "'");
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() <= 0) {
    throw ParseError(at, "expected a positive integer");
  }
  return v.get<std::size_t>();
}

inline ComplexMatrix matrix_from_json(const json& obj, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where, "expected a matrix object");
  only_keys(obj, where, {"rows", "cols", "data"});
  const std::size_t rows = positive_size(obj, "rows", where);
  const std::size_t cols = positive_size(obj, "cols", where);
  const std::string data_at = where.empty() ? "data" : where + ".data";
  if (!obj.contains("data")) throw ParseError(where, "missing field 'data'");
  const json& data = obj.at("data");
  if (!data.is_array()) throw ParseError(data_at, "expected an array");
  if (data.size() != rows * cols) {
    throw ParseError(data_at, "expected " + std::to_string(rows * cols) + " entries, got " +
                                  std::to_string(data.size()));
  }
  std::vector<cplx> entries;
  entries.reserve(data.size());
  for (std::size_t k = 0; k < data.size(); ++k) {
    const std::string at = data_at + "[" + std::to_string(k) + "]";
    const json& e = data[k];
    if (e.is_number()) {
      entries.emplace_back(finite_number(e, at), 0.0);
    } else if (e.is_array() && e.size() == 2) {
      entries.emplace_back(finite_number(e[0], at + "[0]"), finite_number(e[1], at + "[1]"));
    } else {
      throw ParseError(at, "expected a number or a [re, im] pair");
    }
  }
  return ComplexMatrix(rows, cols, std::move(entries));
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

inline ComplexMatrix parse_matrix(const std::string& text) {
  return detail::matrix_from_json(detail::parse_document(text), "");
}

inline SystemFile parse_system(const std::string& text) {
  const auto doc = detail::parse_document(text);
  if (!doc.is_object()) throw ParseError("", "expected a system object");
  detail::only_keys(doc, "", {"A", "B", "name", "source"});
  if (!doc.contains("A")) throw ParseError("", "missing field 'A'");
  ComplexMatrix a = detail::matrix_from_json(doc.at("A"), "A");
  if (!a.is_square()) throw ParseError("A", "drift must be square");
  std::vector<ComplexMatrix> bs;
  if (doc.contains("B")) {
    const auto& arr = doc.at("B");
    if (!arr.is_array()) throw ParseError("B", "expected an array of matrices");
    for (std::size_t j = 0; j < arr.size(); ++j) {
      const std::string at = "B[" + std::to_string(j) + "]";
      ComplexMatrix b = detail::matrix_from_json(arr[j], at);
      if (b.rows() != a.rows() || b.cols() != a.cols()) {
        throw ParseError(at, "shape " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()) +
                                 " does not match A");
      }
      bs.push_back(std::move(b));
    }
  }
  std::string name;
  std::string source;
  for (const char* key : {"name", "source"}) {
    if (!doc.contains(key)) continue;
    if (!doc.at(key).is_string()) throw ParseError(key, "expected a string");
    (std::string(key) == "name" ? name : source) = doc.at(key).get<std::string>();
  }
  return {SdeSystem(std::move(a), std::move(bs)), std::move(name), std::move(source)};
}

inline ComplexMatrix load_matrix(const std::string& path) {
  const std::string text = detail::read_file(path);
  try {
    return parse_matrix(text);
  } catch (const ParseError& e) {
    throw ParseError(e.location().empty() ? path : path + ": " + e.location(), e.message());
  }
}

inline SystemFile load_system(const std::string& path) {
  const std::string text = detail::read_file(path);
  try {
    return parse_system(text);
  } catch (const ParseError& e) {
    throw ParseError(e.location().empty() ? path : path + ": " + e.location(), e.message());
  }
}

inline nlohmann::ordered_json matrix_to_json(const ComplexMatrix& m) {
  nlohmann::ordered_json data = nlohmann::ordered_json::array();
  for (const auto& z : m.data()) {
    if (z.imag() == 0.0) {
      data.push_back(z.real());
    } else {
      data.push_back({z.real(), z.imag()});
    }
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

inline nlohmann::ordered_json system_to_json(const SdeSystem& sys, const std::string& name = "") {
  nlohmann::ordered_json out;
  if (!name.empty()) out["name"] = name;
  out["A"] = matrix_to_json(sys.drift());
  out["B"] = nlohmann::ordered_json::array();
  for (const auto& b : sys.diffusions()) out["B"].push_back(matrix_to_json(b));
  return out;
}

}  // namespace stochlog
