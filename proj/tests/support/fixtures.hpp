#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "ccfg/document.hpp"

namespace fixtures {

inline std::string data(const std::string& rel) { return std::string(CCFG_DATA_DIR) + "/" + rel; }

inline std::string read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ccfg::Grammar grammar(const std::string& name) {
  return ccfg::parse_grammar_document(read(data("grammars/" + name + ".grammar.json")));
}

inline ccfg::Grammar inline_grammar(std::initializer_list<const char*> prods, std::initializer_list<const char*> cons) {
  ccfg::Grammar g;
  for (auto p : prods) g.productions.push_back(ccfg::parse_production(p));
  for (auto c : cons) g.constraints.push_back(ccfg::parse_constraint(c));
  return g;
}

}  // namespace fixtures
