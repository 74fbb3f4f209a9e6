#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hodgelab/matrix.hpp"
#include "hodgelab/structure.hpp"

namespace hodgelab {

// Minimal TOML document tree: strings, integers, arrays, tables. Covers the
// model-file schema; anything fancier is rejected with a line number.
struct TomlValue {
    enum class Kind { str, integer, array, table };
    Kind kind = Kind::table;
    int line = 0;
    std::string str;
    long integer = 0;
    std::vector<TomlValue> arr;
    std::map<std::string, TomlValue> tab;

    const TomlValue* find(const std::string& key) const;
    const TomlValue& expect(const std::string& key) const;
    const std::string& as_str() const;
    long as_int() const;
    const std::vector<TomlValue>& as_array() const;
};

TomlValue parse_toml(const std::string& text);

struct ModelFile {
    StructureEquations eq;
    std::optional<MatQ> metric_g; // n x n Gaussian-rational entries
    std::optional<std::pair<std::vector<int>, std::vector<int>>> foliation; // 0-based N, F
    std::optional<TomlValue> witten; // interpreted by the grid layer
};

ModelFile parse_model_file(const std::string& text);

inline StructureEquations parse_structure_equations(const std::string& text) {
    return parse_model_file(text).eq;
}

} // namespace hodgelab
