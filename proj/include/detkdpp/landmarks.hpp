#pragma once

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "csv.hpp"
#include "error.hpp"

namespace detkdpp {

enum class Method { Uniform, Dpp, Kdpp, GreedySharp, Das };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::Uniform: return "uniform";
    case Method::Dpp: return "dpp";
    case Method::Kdpp: return "kdpp";
    case Method::GreedySharp: return "greedy_sharp";
    case Method::Das: return "das";
  }
  return "unknown";
}

inline bool is_deterministic(Method m) { return m == Method::GreedySharp || m == Method::Das; }

// Ordered selection of distinct column indices plus how it was produced.
struct LandmarkSet {
  std::vector<Index> indices;
  Method method = Method::Uniform;
  std::optional<std::uint64_t> seed;
  std::optional<double> gamma;  // das only
  // Greedy methods: the winning residual score at each step.
  std::vector<double> selection_scores;
  // Greedy methods: the projector ran out of rank before k selections.
  bool degenerate = false;

  std::size_t size() const { return indices.size(); }
  bool empty() const { return indices.empty(); }
};

inline std::string method_label(const LandmarkSet& set) {
  std::string label = to_string(set.method);
  if (set.method == Method::Das && set.gamma) label += "(" + format_double(*set.gamma) + ")";
  return label;
}

// One CSV line: method,seed,k,i1;i2;...;ik (seed empty for deterministic sets).
inline std::string serialize(const LandmarkSet& set) {
  std::string out = method_label(set) + ",";
  if (set.seed) out += std::to_string(*set.seed);
  out += "," + std::to_string(set.indices.size()) + ",";
  for (std::size_t i = 0; i < set.indices.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(set.indices[i]);
  }
  return out;
}

inline LandmarkSet parse_landmarks(const std::string& line) {
  const auto fields = detail::split_commas(detail::trim(line));
  if (fields.size() != 4) throw Error(ErrorCode::InvalidInput, "landmark line needs 4 fields: " + line);
  LandmarkSet set;
  std::string label(fields[0]);
  if (label.rfind("das(", 0) == 0 && label.back() == ')') {
    set.method = Method::Das;
    auto g = detail::parse_double(std::string_view(label).substr(4, label.size() - 5));
    if (!g) throw Error(ErrorCode::InvalidInput, "bad das gamma in " + label);
    set.gamma = *g;
  } else {
    bool found = false;
    for (Method m : {Method::Uniform, Method::Dpp, Method::Kdpp, Method::GreedySharp, Method::Das}) {
      if (label == to_string(m)) {
        set.method = m;
        found = true;
      }
    }
    if (!found) throw Error(ErrorCode::InvalidInput, "unknown method " + label);
  }
  try {
    if (!fields[1].empty()) set.seed = std::stoull(std::string(fields[1]));
    const std::size_t k = std::stoull(std::string(fields[2]));
    std::stringstream ss{std::string(fields[3])};
    std::string tok;
    while (std::getline(ss, tok, ';')) {
      if (!tok.empty()) set.indices.push_back(static_cast<Index>(std::stoll(tok)));
    }
    if (set.indices.size() != k) throw Error(ErrorCode::InvalidInput, "landmark count mismatch in " + line);
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::InvalidInput, "malformed landmark line: " + line);
  }
  return set;
}

}  // namespace detkdpp
